//! Generalized symmetric-definite eigenproblem A v = ε B v at working precision.
//!
//! B = L Lᵀ by Cholesky, C = L⁻¹ A L⁻ᵀ is tridiagonalized by Householder
//! reflections and diagonalized by implicit QL, and v = L⁻ᵀ y. A cyclic
//! Jacobi solver is kept as an independent path for cross-checks.

use crate::error::{Error, Result};
use crate::specfun::{BigReal, PrecisionCtx};

pub type Matrix = Vec<Vec<BigReal>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    HouseholderQl,
    Jacobi,
}

/// Unit roundoff for values built from `ctx`.
fn epsilon(ctx: PrecisionCtx) -> f64 {
    if ctx.is_native() {
        f64::EPSILON
    } else {
        2f64.powi(1 - ctx.bits() as i32)
    }
}

fn hypot(a: &BigReal, b: &BigReal) -> BigReal {
    let (x, y) = (a.abs(), b.abs());
    let (big, small) = if x >= y { (x, y) } else { (y, x) };
    if big.is_zero() {
        return big;
    }
    let t = &small / &big;
    &big * (t.lift(1) + &t * &t).sqrt()
}

/// Lower-triangular L with L Lᵀ = B.
pub fn cholesky(b: &Matrix, ctx: PrecisionCtx) -> Result<Matrix> {
    let n = b.len();
    let mut l = vec![vec![ctx.zero(); n]; n];
    for j in 0..n {
        let mut d = b[j][j].clone();
        for k in 0..j {
            d -= &l[j][k] * &l[j][k];
        }
        if !(d > ctx.zero()) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        for i in j + 1..n {
            let mut s = b[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k];
            }
            l[i][j] = s / &djj;
        }
        l[j][j] = djj;
    }
    Ok(l)
}

/// Solves L X = M column by column.
fn forward(l: &Matrix, m: &Matrix) -> Matrix {
    let n = l.len();
    let cols = m[0].len();
    let mut x = m.clone();
    for c in 0..cols {
        for i in 0..n {
            let mut s = x[i][c].clone();
            for k in 0..i {
                s -= &l[i][k] * &x[k][c];
            }
            x[i][c] = s / &l[i][i];
        }
    }
    x
}

/// Solves Lᵀ v = y.
fn backward_transposed(l: &Matrix, y: &[BigReal]) -> Vec<BigReal> {
    let n = l.len();
    let mut v = y.to_vec();
    for i in (0..n).rev() {
        let mut s = v[i].clone();
        for k in i + 1..n {
            s -= &l[k][i] * &v[k];
        }
        v[i] = s / &l[i][i];
    }
    v
}

fn transpose(m: &Matrix) -> Matrix {
    let n = m.len();
    (0..m[0].len()).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

/// Householder reduction to tridiagonal form; V accumulates the transform.
fn tred2(v: &mut Matrix, d: &mut [BigReal], e: &mut [BigReal], ctx: PrecisionCtx) {
    let n = v.len();
    let zero = ctx.zero();
    for j in 0..n {
        d[j] = v[n - 1][j].clone();
    }
    for i in (1..n).rev() {
        let mut scale = zero.clone();
        let mut h = zero.clone();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale.is_zero() {
            e[i] = d[i - 1].clone();
            for j in 0..i {
                d[j] = v[i - 1][j].clone();
                v[i][j] = zero.clone();
                v[j][i] = zero.clone();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk = &*dk / &scale;
                h += &*dk * &*dk;
            }
            let f = d[i - 1].clone();
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = &scale * &g;
            h -= &f * &g;
            d[i - 1] = &f - &g;
            for ej in e.iter_mut().take(i) {
                *ej = zero.clone();
            }
            for j in 0..i {
                let f = d[j].clone();
                v[j][i] = f.clone();
                let mut g = &e[j] + &v[j][j] * &f;
                for k in j + 1..i {
                    g += &v[k][j] * &d[k];
                    e[k] += &v[k][j] * &f;
                }
                e[j] = g;
            }
            let mut f = zero.clone();
            for j in 0..i {
                e[j] = &e[j] / &h;
                f += &e[j] * &d[j];
            }
            let hh = &f / (&h + &h);
            for j in 0..i {
                e[j] -= &hh * &d[j];
            }
            for j in 0..i {
                let f = d[j].clone();
                let g = e[j].clone();
                for k in j..i {
                    let upd = &f * &e[k] + &g * &d[k];
                    v[k][j] -= upd;
                }
                d[j] = v[i - 1][j].clone();
                v[i][j] = zero.clone();
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i].clone();
        v[i][i] = ctx.one();
        let h = d[i + 1].clone();
        if !h.is_zero() {
            for k in 0..=i {
                d[k] = &v[k][i + 1] / &h;
            }
            for j in 0..=i {
                let mut g = zero.clone();
                for k in 0..=i {
                    g += &v[k][i + 1] * &v[k][j];
                }
                for k in 0..=i {
                    let upd = &g * &d[k];
                    v[k][j] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = zero.clone();
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j].clone();
        v[n - 1][j] = zero.clone();
    }
    v[n - 1][n - 1] = ctx.one();
    e[0] = zero;
}

/// Implicit QL on the tridiagonal (d, e); rotations are applied to V.
fn tql2(v: &mut Matrix, d: &mut [BigReal], e: &mut [BigReal], ctx: PrecisionCtx) -> Result<()> {
    let n = v.len();
    let zero = ctx.zero();
    for i in 1..n {
        e[i - 1] = e[i].clone();
    }
    e[n - 1] = zero.clone();
    let mut f = zero.clone();
    let mut tst1 = 0f64;
    let eps = epsilon(ctx);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs().to_f64() + e[l].abs().to_f64());
        let mut m = l;
        while m < n {
            if e[m].abs().to_f64() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::Convergence {
                        function: "tql2",
                        iterations: 100,
                    });
                }
                let g = d[l].clone();
                let mut p = (&d[l + 1] - &g) / (&e[l] * 2);
                let mut r = hypot(&p, &ctx.one());
                if p.is_negative() {
                    r = -r;
                }
                d[l] = &e[l] / (&p + &r);
                d[l + 1] = &e[l] * (&p + &r);
                let dl1 = d[l + 1].clone();
                let mut h = &g - &d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= &h;
                }
                f += &h;
                p = d[m].clone();
                let mut c = ctx.one();
                let mut c2 = c.clone();
                let mut c3 = c.clone();
                let el1 = e[l + 1].clone();
                let mut s = zero.clone();
                let mut s2 = zero.clone();
                for i in (l..m).rev() {
                    c3 = c2.clone();
                    c2 = c.clone();
                    s2 = s.clone();
                    let g = &c * &e[i];
                    h = &c * &p;
                    r = hypot(&p, &e[i]);
                    e[i + 1] = &s * &r;
                    s = &e[i] / &r;
                    c = &p / &r;
                    p = &c * &d[i] - &s * &g;
                    d[i + 1] = &h + &s * (&c * &g + &s * &d[i]);
                    for row in v.iter_mut() {
                        let h = row[i + 1].clone();
                        row[i + 1] = &s * &row[i] + &c * &h;
                        row[i] = &c * &row[i] - &s * &h;
                    }
                }
                p = -(&s * &s2 * &c3 * &el1 * &e[l]) / &dl1;
                e[l] = &s * &p;
                d[l] = &c * &p;
                if !(e[l].abs().to_f64() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] = &d[l] + &f;
        e[l] = zero.clone();
    }
    Ok(())
}

/// Eigenpairs of a symmetric matrix, ascending, eigenvectors as columns.
pub fn symmetric_eigen(c: &Matrix, ctx: PrecisionCtx, method: EigenMethod) -> Result<(Vec<BigReal>, Matrix)> {
    let n = c.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let (vals, vecs) = match method {
        EigenMethod::HouseholderQl => {
            let mut v = c.clone();
            let mut d = vec![ctx.zero(); n];
            let mut e = vec![ctx.zero(); n];
            if n > 1 {
                tred2(&mut v, &mut d, &mut e, ctx);
                tql2(&mut v, &mut d, &mut e, ctx)?;
            } else {
                d[0] = c[0][0].clone();
                v[0][0] = ctx.one();
            }
            (d, v)
        }
        EigenMethod::Jacobi => jacobi(c, ctx)?,
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite eigenvalues"));
    let sorted_vals = order.iter().map(|&i| vals[i].clone()).collect();
    let sorted_vecs = (0..n)
        .map(|row| order.iter().map(|&i| vecs[row][i].clone()).collect())
        .collect();
    Ok((sorted_vals, sorted_vecs))
}

/// Cyclic Jacobi rotations; slow but unconditionally convergent.
fn jacobi(c: &Matrix, ctx: PrecisionCtx) -> Result<(Vec<BigReal>, Matrix)> {
    let n = c.len();
    let mut a = c.clone();
    let mut v: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect())
        .collect();
    let eps = epsilon(ctx);
    for _sweep in 0..100 {
        let mut off = 0f64;
        let mut diag = 0f64;
        for i in 0..n {
            diag = diag.max(a[i][i].abs().to_f64());
            for j in i + 1..n {
                off = off.max(a[i][j].abs().to_f64());
            }
        }
        if off <= eps * diag.max(f64::MIN_POSITIVE) {
            let vals = (0..n).map(|i| a[i][i].clone()).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs().to_f64() <= eps * 1e-3 * diag {
                    continue;
                }
                let theta = (&a[q][q] - &a[p][p]) / (&a[p][q] * 2);
                let sign = if theta.is_negative() { -1 } else { 1 };
                let t = ctx.int(sign) / (theta.abs() + (&theta * &theta + ctx.one()).sqrt());
                let cs = ctx.one() / (&t * &t + ctx.one()).sqrt();
                let sn = &t * &cs;
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = &cs * &akp - &sn * &akq;
                    a[k][q] = &sn * &akp + &cs * &akq;
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = &cs * &apk - &sn * &aqk;
                    a[q][k] = &sn * &apk + &cs * &aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p].clone();
                    let vq = row[q].clone();
                    row[p] = &cs * &vp - &sn * &vq;
                    row[q] = &sn * &vp + &cs * &vq;
                }
            }
        }
    }
    Err(Error::Convergence {
        function: "jacobi",
        iterations: 100,
    })
}

/// All eigenpairs of A v = ε B v, ascending, each v normalized to vᵀ B v = 1.
pub fn solve_generalized_eig(
    a: &Matrix,
    b: &Matrix,
    ctx: PrecisionCtx,
    method: EigenMethod,
) -> Result<Vec<(BigReal, Vec<BigReal>)>> {
    let n = a.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let l = cholesky(b, ctx)?;
    let y = forward(&l, a);
    let mut c = forward(&l, &transpose(&y));
    for i in 0..n {
        for j in 0..i {
            let avg = (&c[i][j] + &c[j][i]) / 2;
            c[i][j] = avg.clone();
            c[j][i] = avg;
        }
    }
    let (vals, vecs) = symmetric_eigen(&c, ctx, method)?;
    Ok(vals
        .into_iter()
        .enumerate()
        .map(|(col, eps)| {
            let yv: Vec<BigReal> = (0..n).map(|row| vecs[row][col].clone()).collect();
            (eps, backward_transposed(&l, &yv))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_problem() {
        let ctx = PrecisionCtx::QUAD;
        let a = vec![vec![ctx.int(3), ctx.zero()], vec![ctx.zero(), ctx.int(-1)]];
        let b = vec![vec![ctx.one(), ctx.zero()], vec![ctx.zero(), ctx.one()]];
        for method in [EigenMethod::HouseholderQl, EigenMethod::Jacobi] {
            let pairs = solve_generalized_eig(&a, &b, ctx, method).unwrap();
            assert_eq!(pairs[0].0.to_f64(), -1.0);
            assert_eq!(pairs[1].0.to_f64(), 3.0);
            assert_eq!(pairs[0].1[1].abs().to_f64(), 1.0);
            assert!(pairs[0].1[0].is_zero());
        }
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let ctx = PrecisionCtx::QUAD;
        let a = vec![vec![ctx.one(), ctx.zero()], vec![ctx.zero(), ctx.one()]];
        let b = vec![vec![ctx.one(), ctx.int(2)], vec![ctx.int(2), ctx.one()]];
        assert!(matches!(
            solve_generalized_eig(&a, &b, ctx, EigenMethod::HouseholderQl),
            Err(Error::NotPositiveDefinite { pivot: 1 })
        ));
    }
}
