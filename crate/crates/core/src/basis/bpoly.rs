use super::{BasisMatrix, BasisSpec, MatrixTag, NuclearModel, NuclearShape};
use crate::error::Result;
use crate::specfun::{binomial, factorial, hyp2f1, inc_beta, reg_hyp2f3, BigReal, PrecisionCtx};

/// Bernstein polynomials B_i(r) = C(k,i) (r/R)^i (1 − r/R)^(k−i), i = 0..=k.
#[derive(Debug)]
pub(super) struct Bernstein {
    k: usize,
    radius: BigReal,
    ctx: PrecisionCtx,
    /// C(k, i)
    ck: Vec<BigReal>,
    /// C(2k, n)
    c2k: Vec<BigReal>,
}

impl Bernstein {
    pub fn new(spec: &BasisSpec, ctx: PrecisionCtx) -> Self {
        let k = spec.order;
        Self {
            k,
            radius: ctx.real(spec.radius),
            ctx,
            ck: (0..=k).map(|i| binomial(k as u64, i as i64, ctx)).collect(),
            c2k: (0..=2 * k).map(|n| binomial(2 * k as u64, n as i64, ctx)).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn eval_all(&self, r: &BigReal) -> Vec<BigReal> {
        let t = (r / &self.radius).to_ctx(self.ctx);
        let s = self.ctx.one() - &t;
        let k = self.k;
        let mut tp = vec![self.ctx.one(); k + 1];
        let mut sp = vec![self.ctx.one(); k + 1];
        for m in 1..=k {
            tp[m] = &tp[m - 1] * &t;
            sp[m] = &sp[m - 1] * &s;
        }
        (0..=k).map(|i| &self.ck[i] * &tp[i] * &sp[k - i]).collect()
    }

    /// Matrix whose (i, j) entry is C(k,i) C(k,j) g(i + j).
    fn by_sum(&self, tag: MatrixTag, singular: Vec<(usize, usize)>, g: &[BigReal]) -> BasisMatrix {
        BasisMatrix::from_fn(tag, self.dim(), singular, |i, j| &self.ck[i] * &self.ck[j] * &g[i + j])
    }

    pub fn gram(&self) -> BasisMatrix {
        let k = self.k as i64;
        let g: Vec<BigReal> = self
            .c2k
            .iter()
            .map(|b| &self.radius / (b * (2 * k + 1)))
            .collect();
        self.by_sum(MatrixTag::Overlap, vec![], &g)
    }

    pub fn derivative(&self) -> BasisMatrix {
        let ctx = self.ctx;
        let k = self.k;
        let c2km1: Vec<BigReal> = (0..=2 * k)
            .map(|n| binomial(2 * k as u64 - 1, n as i64, ctx))
            .collect();
        BasisMatrix::from_fn(MatrixTag::Derivative, self.dim(), vec![], |i, j| {
            if i == j {
                // ∫ B_i B_i′ = [B_i²/2] from 0 to R.
                match i {
                    0 => ctx.ratio(-1, 2),
                    _ if i == k => ctx.ratio(1, 2),
                    _ => ctx.zero(),
                }
            } else {
                let n = i + j;
                &self.ck[i] * &self.ck[j] * (j as i64 - i as i64) / (&c2km1[n] * (2 * n as i64))
            }
        })
    }

    /// 1/(n C(2k, n)) = ∫₀¹ tⁿ⁻¹ (1−t)^(2k−n) dt, with n = 0 left at zero.
    fn inverse_r_kernel(&self) -> Vec<BigReal> {
        let mut g: Vec<BigReal> = self
            .c2k
            .iter()
            .enumerate()
            .map(|(n, b)| if n == 0 { self.ctx.zero() } else { self.ctx.one() / (b * n as i64) })
            .collect();
        g[0] = self.ctx.zero();
        g
    }

    pub fn kappa_over_r(&self, kappa: i32) -> BasisMatrix {
        let g: Vec<BigReal> = self.inverse_r_kernel().iter().map(|v| v * kappa as i64).collect();
        self.by_sum(MatrixTag::KappaOverR(kappa), vec![(0, 0)], &g)
    }

    pub fn potential(&self, nuc: &NuclearModel) -> Result<BasisMatrix> {
        let ctx = self.ctx;
        let z = ctx.real(nuc.z);
        let point: Vec<BigReal> = self.inverse_r_kernel().iter().map(|v| -(v * &z)).collect();
        match nuc.shape {
            NuclearShape::PointCharge => Ok(self.by_sum(MatrixTag::Potential, vec![(0, 0)], &point)),
            NuclearShape::UniformSphere { radius } => {
                let x = ctx.real(radius) / &self.radius;
                let k = self.k as i64;
                let mut g = Vec::with_capacity(2 * self.k + 1);
                for n in 0..=2 * k {
                    let xn = x.powi(n as i32);
                    let m = 2 * k - n;
                    let f1 = hyp2f1(&ctx.int(1 + n), &ctx.int(-m), &ctx.int(2 + n), &x, ctx)?;
                    let f3 = hyp2f1(&ctx.int(3 + n), &ctx.int(-m), &ctx.int(4 + n), &x, ctx)?;
                    let inner = &xn * f3 / (3 + n) / 2 - &xn * f1 * 3 / (1 + n) / 2;
                    let coulomb = if n == 0 {
                        // −Z ∫ₓ¹ (1−t)^(2k)/t dt, the finite remainder once the
                        // divergent parts of V^p and B(x; 0, ·) cancel.
                        let mut tail = -x.ln();
                        let mut xm = ctx.one();
                        for mm in 1..=2 * k {
                            xm *= &x;
                            let term = binomial(2 * k as u64, mm, ctx) * (ctx.one() - &xm) / mm;
                            if mm % 2 == 1 {
                                tail -= term;
                            } else {
                                tail += term;
                            }
                        }
                        -(&z * tail)
                    } else {
                        &point[n as usize] + &z * inc_beta(&x, &ctx.int(n), &ctx.int(m + 1), ctx)?
                    };
                    g.push(coulomb + &z * inner);
                }
                Ok(self.by_sum(MatrixTag::Potential, vec![], &g))
            }
        }
    }

    pub fn bessel(&self, l: u32, omega: &BigReal, c: &BigReal) -> Result<BasisMatrix> {
        let ctx = self.ctx;
        let tag = MatrixTag::BesselJ {
            l,
            omega: omega.to_f64(),
        };
        if omega.is_zero() && l > 0 {
            return Ok(BasisMatrix::from_fn(tag, self.dim(), vec![], |_, _| ctx.zero()));
        }
        let k = self.k as i64;
        let li = l as i64;
        let qr = (omega / c).to_ctx(ctx) * &self.radius;
        let half = &qr / 2;
        let arg = -(&half * &half);
        let b1 = ctx.ratio(2 * li + 3, 2);
        let b2 = ctx.ratio(2 * k + li + 2, 2);
        let b3 = ctx.ratio(2 * k + li + 3, 2);
        let pre = &self.radius * qr.powi(l as i32) * ctx.pi() / ctx.int(2).powi(2 * (l as i32 + k as i32 + 1));
        let mut g = Vec::with_capacity(2 * self.k + 1);
        for n in 0..=2 * k {
            let a1 = ctx.ratio(n + li + 1, 2);
            let a2 = ctx.ratio(n + li + 2, 2);
            let f = reg_hyp2f3(&a1, &a2, [&b1, &b2, &b3], &arg, ctx)?;
            let fac = factorial((n + li) as u64, ctx) * factorial((2 * k - n) as u64, ctx);
            g.push(&pre * fac * f);
        }
        Ok(self.by_sum(tag, vec![], &g))
    }
}
