use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{BasisMatrix, BasisSpec, MatrixTag, NuclearModel, NuclearShape};
use crate::error::{Error, Result};
use crate::specfun::{gauss_legendre_on, sph_bessel_j, BigReal, PrecisionCtx};

/// Quadrature nodes per knot interval beyond the k needed for exact
/// polynomial products; these resolve the 1/r and Bessel kernels.
fn extra_nodes(ctx: PrecisionCtx) -> usize {
    8 + ctx.digits() as usize / 2
}

/// Clamped knot sequence with interior breakpoints growing geometrically
/// from `r_min` (default 10⁻³ R/ (N−k+1)) up to R.
pub fn exponential_knots(order: usize, count: usize, radius: f64, r_min: Option<f64>) -> Result<Vec<f64>> {
    if order == 0 || count < order {
        return Err(Error::InvalidBasis(format!(
            "{count} splines cannot have order {order}"
        )));
    }
    let segments = count - order + 1;
    let mut t = vec![0.0; order];
    if segments > 1 {
        let r0 = r_min.unwrap_or(1e-3 * radius / segments as f64);
        if !(r0 > 0.0 && r0 < radius) {
            return Err(Error::InvalidBasis(format!("first breakpoint {r0} outside (0, R)")));
        }
        let ratio = radius / r0;
        for j in 1..segments {
            let e = (j - 1) as f64 / (segments - 1) as f64;
            t.push(r0 * ratio.powf(e));
        }
    }
    t.extend(std::iter::repeat_n(radius, order));
    Ok(t)
}

#[derive(Debug)]
struct Node {
    r: BigReal,
    w: BigReal,
    vals: Vec<BigReal>,
    ders: Vec<BigReal>,
}

#[derive(Debug)]
struct IntervalGrid {
    first: usize,
    nodes: Vec<Node>,
}

#[derive(Debug)]
pub(super) struct Splines {
    k: usize,
    n: usize,
    ctx: PrecisionCtx,
    t: Vec<BigReal>,
    grids: Mutex<HashMap<(usize, usize), Arc<IntervalGrid>>>,
}

impl Splines {
    pub fn new(spec: &BasisSpec, ctx: PrecisionCtx) -> Self {
        let knots = spec.knots.as_ref().expect("validated spline spec");
        Self {
            k: spec.order,
            n: spec.count,
            ctx,
            t: knots.iter().map(|&x| ctx.real(x)).collect(),
            grids: Mutex::new(HashMap::new()),
        }
    }

    /// Nonempty intervals [t_μ, t_μ+1).
    fn intervals(&self) -> impl Iterator<Item = usize> + '_ {
        (self.k - 1..self.n).filter(|&mu| self.t[mu] < self.t[mu + 1])
    }

    fn find_interval(&self, r: &BigReal) -> usize {
        let mut last = self.k - 1;
        for mu in self.intervals() {
            if &self.t[mu] <= r {
                last = mu;
            } else {
                break;
            }
        }
        last
    }

    /// Values and derivatives of the k splines nonzero on interval μ, at x.
    fn basis_funs(&self, mu: usize, x: &BigReal) -> (Vec<BigReal>, Vec<BigReal>) {
        let k = self.k;
        let t = &self.t;
        let one = self.ctx.one();
        let mut b = vec![one.clone()];
        let mut lower = Vec::new();
        for j in 1..k {
            if j == k - 1 {
                lower = b.clone();
            }
            let mut next = Vec::with_capacity(j + 1);
            let mut saved = self.ctx.zero();
            for (r, br) in b.iter().enumerate() {
                let right = &t[mu + r + 1] - x;
                let left = x - &t[mu + 1 + r - j];
                let term = br / (&right + &left);
                next.push(&saved + &right * &term);
                saved = left * term;
            }
            next.push(saved);
            b = next;
        }
        if k == 1 {
            return (b, vec![self.ctx.zero()]);
        }
        // B′_{i,k} = (k−1)[B_{i,k−1}/(t_{i+k−1}−t_i) − B_{i+1,k−1}/(t_{i+k}−t_{i+1})]
        let first = mu + 1 - k;
        let km1 = (k - 1) as i64;
        let mut d = Vec::with_capacity(k);
        for r in 0..k {
            let i = first + r;
            let mut v = self.ctx.zero();
            if r >= 1 {
                v += &lower[r - 1] / (&t[i + k - 1] - &t[i]);
            }
            if r < k - 1 {
                v -= &lower[r] / (&t[i + k] - &t[i + 1]);
            }
            d.push(v * km1);
        }
        (b, d)
    }

    pub fn eval_all(&self, r: &BigReal) -> Vec<BigReal> {
        let mu = self.find_interval(r);
        let (vals, _) = self.basis_funs(mu, r);
        let mut out = vec![self.ctx.zero(); self.n];
        let first = mu + 1 - self.k;
        for (m, v) in vals.into_iter().enumerate() {
            out[first + m] = v;
        }
        out
    }

    fn make_grid(&self, mu: usize, a: &BigReal, b: &BigReal, count: usize) -> IntervalGrid {
        let nodes = gauss_legendre_on(a, b, count, self.ctx)
            .into_iter()
            .map(|(r, w)| {
                let (vals, ders) = self.basis_funs(mu, &r);
                Node { r, w, vals, ders }
            })
            .collect();
        IntervalGrid {
            first: mu + 1 - self.k,
            nodes,
        }
    }

    fn grid(&self, mu: usize, count: usize) -> Arc<IntervalGrid> {
        let mut grids = self.grids.lock().expect("grid cache poisoned");
        grids
            .entry((mu, count))
            .or_insert_with(|| Arc::new(self.make_grid(mu, &self.t[mu], &self.t[mu + 1], count)))
            .clone()
    }

    /// Nodes on interval μ. Away from the origin the 1/r kernel limits
    /// Gauss–Legendre convergence to ρ^(−2n), with ρ set by the interval's
    /// distance from r = 0 relative to its width.
    fn default_count(&self, mu: usize) -> usize {
        let a = self.t[mu].to_f64();
        let b = self.t[mu + 1].to_f64();
        let base = extra_nodes(self.ctx);
        if a == 0.0 {
            return self.k + base;
        }
        let u = (b + a) / (b - a);
        let rho = u + (u * u - 1.0).sqrt();
        let need = ((self.ctx.digits() as f64 + 4.0) * std::f64::consts::LN_10 / (2.0 * rho.ln())).ceil();
        self.k + base.max((need as usize).min(400))
    }

    /// Σ over nodes of w K(r) f_i(r) g_j(r), with `derivative` selecting g = B′.
    fn accumulate(
        &self,
        acc: &mut [Vec<BigReal>],
        grid: &IntervalGrid,
        derivative: bool,
        kernel: &dyn Fn(&BigReal) -> BigReal,
    ) {
        for node in &grid.nodes {
            let wk = &node.w * kernel(&node.r);
            let right = if derivative { &node.ders } else { &node.vals };
            for (a, va) in node.vals.iter().enumerate() {
                let wa = &wk * va;
                for (b, vb) in right.iter().enumerate() {
                    acc[grid.first + a][grid.first + b] += &wa * vb;
                }
            }
        }
    }

    fn integrate(
        &self,
        tag: MatrixTag,
        singular: Vec<(usize, usize)>,
        derivative: bool,
        kernel: &dyn Fn(&BigReal) -> BigReal,
        count: &dyn Fn(usize) -> usize,
    ) -> BasisMatrix {
        let mut acc = vec![vec![self.ctx.zero(); self.n]; self.n];
        for mu in self.intervals() {
            let grid = self.grid(mu, count(mu));
            self.accumulate(&mut acc, &grid, derivative, kernel);
        }
        BasisMatrix::from_fn(tag, self.n, singular, |i, j| acc[i][j].clone())
    }

    pub fn gram(&self) -> BasisMatrix {
        let one = self.ctx.one();
        self.integrate(MatrixTag::Overlap, vec![], false, &|_| one.clone(), &|mu| self.default_count(mu))
    }

    pub fn derivative(&self) -> BasisMatrix {
        let one = self.ctx.one();
        self.integrate(MatrixTag::Derivative, vec![], true, &|_| one.clone(), &|mu| self.default_count(mu))
    }

    pub fn kappa_over_r(&self, kappa: i32) -> BasisMatrix {
        let kap = self.ctx.int(kappa as i64);
        self.integrate(
            MatrixTag::KappaOverR(kappa),
            vec![(0, 0)],
            false,
            &|r| &kap / r,
            &|mu| self.default_count(mu),
        )
    }

    pub fn potential(&self, nuc: &NuclearModel) -> BasisMatrix {
        let kernel = |r: &BigReal| nuc.potential(r);
        match nuc.shape {
            NuclearShape::PointCharge => self.integrate(
                MatrixTag::Potential,
                vec![(0, 0)],
                false,
                &kernel,
                &|mu| self.default_count(mu),
            ),
            NuclearShape::UniformSphere { radius } => {
                let rn = self.ctx.real(radius);
                let mut acc = vec![vec![self.ctx.zero(); self.n]; self.n];
                for mu in self.intervals() {
                    let count = self.default_count(mu);
                    let (a, b) = (&self.t[mu], &self.t[mu + 1]);
                    if a < &rn && &rn < b {
                        for (lo, hi) in [(a, &rn), (&rn, b)] {
                            let grid = self.make_grid(mu, lo, hi, count);
                            self.accumulate(&mut acc, &grid, false, &kernel);
                        }
                    } else {
                        let grid = self.grid(mu, count);
                        self.accumulate(&mut acc, &grid, false, &kernel);
                    }
                }
                BasisMatrix::from_fn(MatrixTag::Potential, self.n, vec![], |i, j| acc[i][j].clone())
            }
        }
    }

    pub fn bessel(&self, l: u32, omega: &BigReal, c: &BigReal) -> BasisMatrix {
        let q = (omega / c).to_ctx(self.ctx);
        let qf = q.to_f64();
        let ctx = self.ctx;
        let tag = MatrixTag::BesselJ {
            l,
            omega: omega.to_f64(),
        };
        self.integrate(
            tag,
            vec![],
            false,
            &|r| sph_bessel_j(l, &(&q * r), ctx),
            &|mu| {
                let width = (&self.t[mu + 1] - &self.t[mu]).to_f64();
                self.default_count(mu).max((qf * width).ceil() as usize + 4)
            },
        )
    }
}
