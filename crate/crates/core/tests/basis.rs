mod common;

use bpdirac::basis::{
    bessel_matrix, derivative_matrix, eval_basis, gram_matrix, kappa_over_r_matrix, potential_matrix, Basis,
    BasisSpec, NuclearModel,
};
use bpdirac::specfun::sph_bessel_j;
use bpdirac::units::speed_of_light;
use bpdirac::{BigReal, Error, PrecisionCtx};
use common::{bernstein, rel_err, tanh_sinh};
use proptest::prelude::*;

const CTX: PrecisionCtx = PrecisionCtx::QUAD;

fn quad_matrix(basis: &Basis, kernel: &dyn Fn(&BigReal) -> BigReal, breaks: &[f64]) -> Vec<BigReal> {
    let n = basis.len();
    let f = |r: &BigReal| {
        let r = r.to_ctx(CTX);
        let v = basis.eval_all(&r).unwrap();
        let k = kernel(&r);
        let mut out = Vec::with_capacity(n * n);
        for vi in &v {
            let kv = &k * vi;
            for vj in &v {
                out.push(&kv * vj);
            }
        }
        out
    };
    let mut edges = vec![CTX.zero()];
    edges.extend(breaks.iter().map(|&x| CTX.real(x)));
    edges.push(basis.radius());
    let mut total: Option<Vec<BigReal>> = None;
    for pair in edges.windows(2) {
        let part = tanh_sinh(&f, &pair[0], &pair[1], CTX.widen(4));
        total = Some(match total {
            None => part,
            Some(t) => t.iter().zip(&part).map(|(a, b)| a + b).collect(),
        });
    }
    total.unwrap()
}

fn assert_matches(name: &str, basis: &Basis, m: &bpdirac::basis::BasisMatrix, oracle: &[BigReal], tol: f64) {
    let n = basis.len();
    let scale = oracle.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            if m.is_singular(i, j) {
                continue;
            }
            let a = m.at(i, j);
            let b = &oracle[i * n + j];
            let err = (a - b).abs().to_f64() / b.abs().to_f64().max(scale * 1e-12);
            assert!(err <= tol, "{name} ({i},{j}): {} vs {} rel {err:e}", a.to_sci(20), b.to_sci(20));
        }
    }
}

#[test]
fn bernstein_endpoints_and_sum() {
    let spec = BasisSpec::bpoly(10, 7.0).unwrap();
    let zero = CTX.zero();
    assert_eq!(eval_basis(&spec, 0, &zero, CTX).unwrap().to_f64(), 1.0);
    for i in 1..=10 {
        assert!(eval_basis(&spec, i, &zero, CTX).unwrap().is_zero());
    }
    assert!(matches!(eval_basis(&spec, 0, &CTX.real(7.5), CTX), Err(Error::Domain { .. })));
    assert!(matches!(eval_basis(&spec, 0, &CTX.real(-0.1), CTX), Err(Error::Domain { .. })));
}

#[test]
fn first_order_splines_are_indicators() {
    let knots = vec![0.0, 1.0, 2.5, 4.0];
    let spec = BasisSpec::bspline_with_knots(1, 3, 4.0, knots.clone()).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    for (r, hot) in [(0.0, 0), (0.5, 0), (1.0, 1), (2.4, 1), (2.5, 2), (3.9, 2), (4.0, 2)] {
        let v = basis.eval_all(&CTX.real(r)).unwrap();
        for (i, vi) in v.iter().enumerate() {
            assert_eq!(vi.to_f64(), if i == hot { 1.0 } else { 0.0 }, "r = {r}, i = {i}");
        }
    }
}

#[test]
fn spec_validation() {
    assert!(BasisSpec::bpoly(3, 0.0).is_err());
    let mut bad = BasisSpec::bpoly(3, 1.0).unwrap();
    bad.count = 5;
    assert!(matches!(bad.validate(), Err(Error::InvalidBasis(_))));
    assert!(BasisSpec::bspline_with_knots(2, 3, 1.0, vec![0.0, 0.0, 0.5, 1.0]).is_err());
    assert!(BasisSpec::bspline_with_knots(2, 3, 1.0, vec![0.0, 0.0, 0.5, 1.0, 1.0]).is_ok());
    let spec = BasisSpec::bspline(9, 60, 60.0).unwrap();
    assert_eq!(spec.knots.as_ref().unwrap().len(), 69);
    assert!(BasisSpec::bspline(9, 60, 60.0).unwrap().validate().is_ok());
}

#[test]
fn linear_gram_entries() {
    let spec = BasisSpec::bpoly(1, 3.0).unwrap();
    let c = gram_matrix(&spec, CTX).unwrap();
    assert!(rel_err(c.at(0, 0), &CTX.int(1)) < 1e-33);
    assert!(rel_err(c.at(0, 1), &CTX.ratio(1, 2)) < 1e-33);
    assert!(rel_err(c.at(1, 0), &CTX.ratio(1, 2)) < 1e-33);
}

#[test]
fn derivative_matrix_structure() {
    for spec in [
        BasisSpec::bpoly(12, 5.0).unwrap(),
        BasisSpec::bspline(6, 14, 5.0).unwrap(),
    ] {
        let basis = Basis::new(&spec, CTX).unwrap();
        let d = derivative_matrix(&spec, CTX).unwrap();
        let wall = basis.wall_values();
        let origin = basis.origin_values();
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                let lhs = d.at(i, j) + d.at(j, i);
                let rhs = &wall[i] * &wall[j] - &origin[i] * &origin[j];
                assert!((lhs - rhs).abs().to_f64() < 1e-30, "{:?} ({i},{j})", spec.kind);
            }
        }
        if spec.kind == bpdirac::basis::BasisKind::BPolynomial {
            for i in 1..n - 1 {
                assert!(d.at(i, i).is_zero());
            }
        }
    }
}

#[test]
fn kappa_over_r_scaling_and_singularity() {
    let spec = BasisSpec::bpoly(8, 2.0).unwrap();
    let one = kappa_over_r_matrix(&spec, 1, CTX).unwrap();
    let two = kappa_over_r_matrix(&spec, 2, CTX).unwrap();
    let z = 3.0;
    let v = potential_matrix(&spec, &NuclearModel::point(z), CTX).unwrap();
    assert!(matches!(one.get(0, 0), Err(Error::SingularEntry { i: 0, j: 0 })));
    assert!(kappa_over_r_matrix(&spec, 0, CTX).is_err());
    for i in 0..9 {
        for j in 0..9 {
            if i + j == 0 {
                continue;
            }
            assert!(rel_err(two.at(i, j), &(one.at(i, j) * 2)) < 1e-33);
            assert!(rel_err(one.at(i, j), one.at(j, i)) == 0.0);
            // V^p = −(Z/κ)(κ/r)
            let expect = -(two.at(i, j) * CTX.real(z)) / 2;
            assert!(rel_err(v.at(i, j), &expect) < 1e-33);
        }
    }
}

#[test]
fn bernstein_matrices_match_quadrature() {
    let spec = BasisSpec::bpoly(12, 4.0).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let tol = CTX.tol(6);
    let one = CTX.one();
    let c = basis.gram();
    assert_matches("C", &basis, &c, &quad_matrix(&basis, &|_| one.clone(), &[]), tol);
    let kr = basis.kappa_over_r(-2);
    let kap = CTX.int(-2);
    assert_matches("kappa/r", &basis, &kr, &quad_matrix(&basis, &|r| &kap / r, &[]), tol);
    let nuc = NuclearModel::uniform(5.0, 0.75);
    let vu = basis.potential(&nuc).unwrap();
    let oracle = quad_matrix(&basis, &|r| nuc.potential(r), &[0.75]);
    assert_matches("V uniform", &basis, &vu, &oracle, tol);
}

#[test]
fn small_derivative_case() {
    // k = 2: ∫ (1−r/R)² d/dr[2(r/R)(1−r/R)] dr = 1/3 for any R
    let spec = BasisSpec::bpoly(2, 9.0).unwrap();
    let d = derivative_matrix(&spec, CTX).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let radius = basis.radius();
    let f = |r: &BigReal| {
        let t = r / &radius;
        let s = CTX.one() - &t;
        let dp = (CTX.one() - &t * 2) * 2 / &radius;
        vec![&s * &s * dp]
    };
    let q = tanh_sinh(&f, &CTX.zero(), &radius, CTX.widen(4));
    assert!(rel_err(d.at(0, 1), &q[0]) < CTX.tol(6));
    assert!(rel_err(d.at(0, 1), &CTX.ratio(1, 3)) < 1e-33);
}

#[test]
fn uniform_sphere_tends_to_point() {
    let spec = BasisSpec::bpoly(10, 2.0).unwrap();
    let point = potential_matrix(&spec, &NuclearModel::point(1.0), CTX).unwrap();
    let tiny = potential_matrix(&spec, &NuclearModel::uniform(1.0, 2e-8), CTX).unwrap();
    for i in 0..11 {
        for j in 0..11 {
            if i + j == 0 {
                // Finite for the sphere, divergent for the point.
                assert!(tiny.get(0, 0).is_ok());
                continue;
            }
            assert!(rel_err(tiny.at(i, j), point.at(i, j)) < 1e-6, "({i},{j})");
        }
    }
}

/// Direct series ∫ B_i B_j j_L(qr) dr = C C Σ_s (−1)^s q^{L+2s} R^{L+2s+1}
/// (n+L+2s)! (2k−n)! / (2^s s! (2L+2s+1)!! (2k+L+2s+1)!)
fn bessel_series(k: usize, i: usize, j: usize, l: usize, q: &BigReal, radius: &BigReal, ctx: PrecisionCtx) -> BigReal {
    use bpdirac::specfun::{binomial, double_factorial_odd, factorial};
    let n = i + j;
    let w = ctx.widen(20);
    let q = q.to_ctx(w);
    let radius = radius.to_ctx(w);
    let mut acc = w.zero();
    for s in 0..200usize {
        let num = q.powi((l + 2 * s) as i32)
            * radius.powi((l + 2 * s + 1) as i32)
            * factorial((n + l + 2 * s) as u64, w)
            * factorial((2 * k - n) as u64, w);
        let den = w.int(2).powi(s as i32)
            * factorial(s as u64, w)
            * double_factorial_odd((l + s) as u64, w)
            * factorial((2 * k + l + 2 * s + 1) as u64, w);
        let term = num / den;
        if s % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
        if s > 5 && term.abs().to_f64() < acc.abs().to_f64() * 1e-60 {
            break;
        }
    }
    (acc * binomial(k as u64, i as i64, w) * binomial(k as u64, j as i64, w)).to_ctx(ctx)
}

#[test]
fn bessel_matrix_analytic_vs_oracles() {
    let c = speed_of_light(CTX);
    // k = 20, L = 1, ωR/c = 3
    let spec = BasisSpec::bpoly(20, 2.0).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let omega = &c * 3 / &basis.radius();
    let m = basis.bessel(1, &omega, &c).unwrap();
    let q = &omega / &c;
    for (i, j) in [(0, 0), (0, 7), (5, 5), (10, 20), (20, 20), (13, 2)] {
        let oracle = bessel_series(20, i, j, 1, &q, &basis.radius(), CTX);
        assert!(rel_err(m.at(i, j), &oracle) < CTX.tol(6), "({i},{j})");
    }
    let oracle = quad_matrix(&basis, &|r| sph_bessel_j(1, &(&q * r), CTX), &[]);
    assert_matches("j1", &basis, &m, &oracle, CTX.tol(6));

    // i = j = 0, k = 10, L = 0, small ωR/c
    let spec = BasisSpec::bpoly(10, 1.0).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let omega = &c * CTX.ratio(1, 100);
    let m = basis.bessel(0, &omega, &c).unwrap();
    let q = &omega / &c;
    let radius = basis.radius();
    let f = |r: &BigReal| {
        let b0 = &bernstein(10, &radius, r)[0];
        vec![b0 * b0 * sph_bessel_j(0, &(&q * r), CTX)]
    };
    let quad = tanh_sinh(&f, &CTX.zero(), &radius, CTX.widen(4));
    assert!(rel_err(m.at(0, 0), &quad[0]) < 1e-20);
}

#[test]
fn bessel_matrix_at_zero_energy() {
    let c = speed_of_light(CTX);
    for spec in [BasisSpec::bpoly(9, 3.0).unwrap(), BasisSpec::bspline(5, 12, 3.0).unwrap()] {
        let g = gram_matrix(&spec, CTX).unwrap();
        let j0 = bessel_matrix(&spec, 0, &CTX.zero(), &c, CTX).unwrap();
        let j2 = bessel_matrix(&spec, 2, &CTX.zero(), &c, CTX).unwrap();
        for i in 0..spec.count {
            for j in 0..spec.count {
                assert!(rel_err(j0.at(i, j), g.at(i, j)) < 1e-32);
                assert!(j2.at(i, j).is_zero());
            }
        }
    }
}

#[test]
fn bessel_matrix_is_continuous_in_energy() {
    let c = speed_of_light(CTX);
    let spec = BasisSpec::bpoly(8, 10.0).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let omega = CTX.ratio(3, 8);
    let base = basis.bessel(1, &omega, &c).unwrap();
    let mut last = f64::INFINITY;
    for p in [4, 8, 12] {
        let delta = CTX.int(10).powi(-p);
        let moved = basis.bessel(1, &(&omega + &delta), &c).unwrap();
        let diff = (moved.at(3, 4) - base.at(3, 4)).abs().to_f64();
        assert!(diff < last);
        assert!(diff < delta.to_f64() * 10.0);
        last = diff;
    }
}

#[test]
fn spline_matrices_match_quadrature() {
    let spec = BasisSpec::bspline(5, 10, 6.0).unwrap();
    let basis = Basis::new(&spec, CTX).unwrap();
    let breaks: Vec<f64> = spec.knots.as_ref().unwrap()[5..10].to_vec();
    let tol = CTX.tol(6);
    let one = CTX.one();
    let c = basis.gram();
    assert_matches("C", &basis, &c, &quad_matrix(&basis, &|_| one.clone(), &breaks), tol);
    let kr = basis.kappa_over_r(3);
    let kap = CTX.int(3);
    assert_matches("kappa/r", &basis, &kr, &quad_matrix(&basis, &|r| &kap / r, &breaks), tol);
    let clight = speed_of_light(CTX);
    let omega = CTX.int(40);
    let q = &omega / &clight;
    let jm = basis.bessel(2, &omega, &clight).unwrap();
    let oracle = quad_matrix(&basis, &|r| sph_bessel_j(2, &(&q * r), CTX), &breaks);
    assert_matches("j2", &basis, &jm, &oracle, tol);
    let nuc = NuclearModel::uniform(2.0, 0.3);
    let mut with_rn = breaks.clone();
    with_rn.push(0.3);
    with_rn.sort_by(f64::total_cmp);
    let vu = basis.potential(&nuc).unwrap();
    assert_matches("V uniform", &basis, &vu, &quad_matrix(&basis, &|r| nuc.potential(r), &with_rn), tol);
}

#[test]
fn matrix_csv_layout() {
    let spec = BasisSpec::bpoly(1, 3.0).unwrap();
    let csv = kappa_over_r_matrix(&spec, -1, CTX).unwrap().to_csv(12);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "row,col,value");
    assert_eq!(lines[1], "0,0,inf");
    assert_eq!(lines[2], "0,1,-5.00000000000e-01");
    assert_eq!(lines.len(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn partition_of_unity(u in 0.0f64..=1.0) {
        let tol = CTX.tol(2);
        for spec in [BasisSpec::bpoly(10, 50.0).unwrap(), BasisSpec::bspline(9, 30, 50.0).unwrap()] {
            let basis = Basis::new(&spec, CTX).unwrap();
            let r = CTX.real(u * 50.0);
            let s = basis.eval_all(&r).unwrap().iter().fold(CTX.zero(), |a, v| a + v);
            prop_assert!((s - CTX.one()).abs().to_f64() <= tol);
        }
    }

    #[test]
    fn gram_is_symmetric(k in 1usize..16, radius in 0.1f64..100.0) {
        let spec = BasisSpec::bpoly(k, radius).unwrap();
        let c = gram_matrix(&spec, CTX).unwrap();
        for i in 0..=k {
            for j in 0..i {
                prop_assert!(c.at(i, j) == c.at(j, i));
            }
        }
    }
}
