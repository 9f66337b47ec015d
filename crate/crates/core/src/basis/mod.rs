//! Radial basis sets on the cavity [0, R] and their one-particle matrices.
//!
//! Bernstein polynomials of degree k give k+1 functions and closed-form
//! matrices. B-splines of order k (degree k−1) on a clamped knot sequence
//! use per-interval Gauss–Legendre quadrature.

mod bpoly;
mod bspline;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{BigReal, PrecisionCtx};

pub use bspline::exponential_knots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    #[serde(rename = "bpoly")]
    BPolynomial,
    #[serde(rename = "bspline")]
    BSpline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub order: usize,
    pub count: usize,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
}

impl BasisSpec {
    /// Bernstein polynomials of degree `order`, `order + 1` functions.
    pub fn bpoly(order: usize, radius: f64) -> Result<Self> {
        let spec = Self {
            kind: BasisKind::BPolynomial,
            order,
            count: order + 1,
            radius,
            knots: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// B-splines of order `order` on the default exponential grid.
    pub fn bspline(order: usize, count: usize, radius: f64) -> Result<Self> {
        let knots = exponential_knots(order, count, radius, None)?;
        Self::bspline_with_knots(order, count, radius, knots)
    }

    pub fn bspline_with_knots(order: usize, count: usize, radius: f64, knots: Vec<f64>) -> Result<Self> {
        let spec = Self {
            kind: BasisKind::BSpline,
            order,
            count,
            radius,
            knots: Some(knots),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBasis(m));
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("cavity radius must be positive, got {}", self.radius));
        }
        if self.order == 0 {
            return bad("order must be positive".into());
        }
        match self.kind {
            BasisKind::BPolynomial => {
                if self.count != self.order + 1 {
                    return bad(format!(
                        "B-polynomials of degree {} give {} functions, not {}",
                        self.order,
                        self.order + 1,
                        self.count
                    ));
                }
                if self.knots.is_some() {
                    return bad("B-polynomials take no knots".into());
                }
            }
            BasisKind::BSpline => {
                let Some(t) = &self.knots else {
                    return bad("B-splines need a knot sequence".into());
                };
                let (k, n) = (self.order, self.count);
                if n < k {
                    return bad(format!("{n} splines cannot have order {k}"));
                }
                if t.len() != n + k {
                    return bad(format!("expected {} knots, got {}", n + k, t.len()));
                }
                if t[..k].iter().any(|&x| x != 0.0) || t[n..].iter().any(|&x| x != self.radius) {
                    return bad(format!("first and last {k} knots must sit at 0 and R"));
                }
                if t.windows(2).any(|p| !(p[0] <= p[1])) {
                    return bad("knots must be nondecreasing".into());
                }
                if t[k - 1..=n].windows(2).any(|p| p[0] == p[1]) {
                    return bad("interior knots must be simple".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum NuclearShape {
    PointCharge,
    UniformSphere { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuclearModel {
    pub z: f64,
    #[serde(flatten)]
    pub shape: NuclearShape,
}

impl NuclearModel {
    pub fn point(z: f64) -> Self {
        Self {
            z,
            shape: NuclearShape::PointCharge,
        }
    }

    pub fn uniform(z: f64, radius: f64) -> Self {
        Self {
            z,
            shape: NuclearShape::UniformSphere { radius },
        }
    }

    pub fn validate(&self, cavity: f64) -> Result<()> {
        if !(self.z >= 0.0) {
            return Err(domain("NuclearModel", format!("Z must be nonnegative, got {}", self.z)));
        }
        if let NuclearShape::UniformSphere { radius } = self.shape {
            if !(radius > 0.0 && radius < cavity) {
                return Err(domain(
                    "NuclearModel",
                    format!("nuclear radius {radius} must lie in (0, {cavity})"),
                ));
            }
        }
        Ok(())
    }

    /// V(r) in hartree.
    pub fn potential(&self, r: &BigReal) -> BigReal {
        let z = r.lift_f64(self.z);
        match self.shape {
            NuclearShape::PointCharge => -z / r,
            NuclearShape::UniformSphere { radius } => {
                let rn = r.lift_f64(radius);
                if r >= &rn {
                    -z / r
                } else {
                    let s = r / &rn;
                    -(z / (rn * 2)) * (r.lift(3) - &s * &s)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MatrixTag {
    Overlap,
    Derivative,
    KappaOverR(i32),
    Potential,
    BesselJ { l: u32, omega: f64 },
}

/// A dense N×N matrix over the full basis. Entries whose integrand is not
/// integrable are recorded as singular and refuse to be read.
#[derive(Debug, Clone)]
pub struct BasisMatrix {
    pub tag: MatrixTag,
    dim: usize,
    entries: Vec<BigReal>,
    singular: Vec<(usize, usize)>,
}

impl BasisMatrix {
    pub(crate) fn from_fn(
        tag: MatrixTag,
        dim: usize,
        singular: Vec<(usize, usize)>,
        mut f: impl FnMut(usize, usize) -> BigReal,
    ) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            tag,
            dim,
            entries,
            singular,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&BigReal> {
        if self.singular.contains(&(i, j)) {
            return Err(Error::SingularEntry { i, j });
        }
        Ok(&self.entries[i * self.dim + j])
    }

    /// Unchecked access for indices known to be regular.
    pub fn at(&self, i: usize, j: usize) -> &BigReal {
        debug_assert!(!self.singular.contains(&(i, j)));
        &self.entries[i * self.dim + j]
    }

    pub fn is_singular(&self, i: usize, j: usize) -> bool {
        self.singular.contains(&(i, j))
    }

    /// Rows and columns `first..dim` as nested vectors.
    pub fn block(&self, first: usize) -> Result<Vec<Vec<BigReal>>> {
        (first..self.dim)
            .map(|i| (first..self.dim).map(|j| self.get(i, j).cloned()).collect())
            .collect()
    }

    /// `row,col,value` lines after a header; values at `digits` significant digits.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("row,col,value\n");
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.is_singular(i, j) {
                    let _ = writeln!(out, "{i},{j},inf");
                } else {
                    let _ = writeln!(out, "{i},{j},{}", self.at(i, j).to_sci(digits));
                }
            }
        }
        out
    }
}

/// Basis functions plus the precomputed data needed for their matrices.
#[derive(Debug)]
pub struct Basis {
    spec: BasisSpec,
    ctx: PrecisionCtx,
    inner: Inner,
}

#[derive(Debug)]
enum Inner {
    Poly(bpoly::Bernstein),
    Spline(bspline::Splines),
}

impl Basis {
    pub fn new(spec: &BasisSpec, ctx: PrecisionCtx) -> Result<Self> {
        spec.validate()?;
        let inner = match spec.kind {
            BasisKind::BPolynomial => Inner::Poly(bpoly::Bernstein::new(spec, ctx)),
            BasisKind::BSpline => Inner::Spline(bspline::Splines::new(spec, ctx)),
        };
        Ok(Self {
            spec: spec.clone(),
            ctx,
            inner,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn ctx(&self) -> PrecisionCtx {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.spec.count
    }

    pub fn is_empty(&self) -> bool {
        self.spec.count == 0
    }

    pub fn radius(&self) -> BigReal {
        self.ctx.real(self.spec.radius)
    }

    fn check_r(&self, r: &BigReal) -> Result<()> {
        if r.is_negative() || r > &self.radius() {
            return Err(domain(
                "eval_basis",
                format!("r = {} lies outside [0, {}]", r.to_f64(), self.spec.radius),
            ));
        }
        Ok(())
    }

    /// All N basis functions at r.
    pub fn eval_all(&self, r: &BigReal) -> Result<Vec<BigReal>> {
        self.check_r(r)?;
        Ok(match &self.inner {
            Inner::Poly(b) => b.eval_all(r),
            Inner::Spline(s) => s.eval_all(r),
        })
    }

    pub fn eval(&self, i: usize, r: &BigReal) -> Result<BigReal> {
        if i >= self.len() {
            return Err(domain("eval_basis", format!("index {i} out of range")));
        }
        Ok(self.eval_all(r)?.swap_remove(i))
    }

    pub fn gram(&self) -> BasisMatrix {
        match &self.inner {
            Inner::Poly(b) => b.gram(),
            Inner::Spline(s) => s.gram(),
        }
    }

    pub fn derivative(&self) -> BasisMatrix {
        match &self.inner {
            Inner::Poly(b) => b.derivative(),
            Inner::Spline(s) => s.derivative(),
        }
    }

    pub fn kappa_over_r(&self, kappa: i32) -> BasisMatrix {
        match &self.inner {
            Inner::Poly(b) => b.kappa_over_r(kappa),
            Inner::Spline(s) => s.kappa_over_r(kappa),
        }
    }

    pub fn potential(&self, nuc: &NuclearModel) -> Result<BasisMatrix> {
        nuc.validate(self.spec.radius)?;
        match &self.inner {
            Inner::Poly(b) => b.potential(nuc),
            Inner::Spline(s) => Ok(s.potential(nuc)),
        }
    }

    /// (j_L)_ij at photon energy ω, with kernel j_L(ωr/c).
    pub fn bessel(&self, l: u32, omega: &BigReal, c: &BigReal) -> Result<BasisMatrix> {
        if omega.is_negative() {
            return Err(domain("bessel_matrix", "photon energy must be nonnegative"));
        }
        match &self.inner {
            Inner::Poly(b) => b.bessel(l, omega, c),
            Inner::Spline(s) => Ok(s.bessel(l, omega, c)),
        }
    }

    /// B_i(R) B_j(R): only the last function is nonzero at the wall.
    pub fn wall_values(&self) -> Vec<BigReal> {
        self.eval_all(&self.radius()).expect("R is inside the cavity")
    }

    pub fn origin_values(&self) -> Vec<BigReal> {
        self.eval_all(&self.ctx.zero()).expect("0 is inside the cavity")
    }
}

pub fn eval_basis(spec: &BasisSpec, i: usize, r: &BigReal, ctx: PrecisionCtx) -> Result<BigReal> {
    Basis::new(spec, ctx)?.eval(i, r)
}

pub fn gram_matrix(spec: &BasisSpec, ctx: PrecisionCtx) -> Result<BasisMatrix> {
    Ok(Basis::new(spec, ctx)?.gram())
}

pub fn derivative_matrix(spec: &BasisSpec, ctx: PrecisionCtx) -> Result<BasisMatrix> {
    Ok(Basis::new(spec, ctx)?.derivative())
}

pub fn kappa_over_r_matrix(spec: &BasisSpec, kappa: i32, ctx: PrecisionCtx) -> Result<BasisMatrix> {
    if kappa == 0 {
        return Err(domain("kappa_over_r_matrix", "kappa must be nonzero"));
    }
    Ok(Basis::new(spec, ctx)?.kappa_over_r(kappa))
}

pub fn potential_matrix(spec: &BasisSpec, nuc: &NuclearModel, ctx: PrecisionCtx) -> Result<BasisMatrix> {
    Basis::new(spec, ctx)?.potential(nuc)
}

pub fn bessel_matrix(
    spec: &BasisSpec,
    l: u32,
    omega: &BigReal,
    c: &BigReal,
    ctx: PrecisionCtx,
) -> Result<BasisMatrix> {
    Basis::new(spec, ctx)?.bessel(l, omega, c)
}
