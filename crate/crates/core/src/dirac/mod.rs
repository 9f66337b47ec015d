//! Radial Dirac equation in a spherical cavity of radius R.
//!
//! With ε the energy measured from c², the radial pair solves
//!
//! ```text
//!  V P + c (Q′ − κ Q / r)           = ε P
//! −c (P′ + κ P / r) + (V − 2c²) Q   = ε Q
//! ```
//!
//! Note the sign of Q: it is opposite to the Grant convention, so the bag
//! condition at the wall reads P(R) = Q(R).
//!
//! # Matrix layout
//!
//! Both P and Q are expanded in basis functions 1..N; function 0 is the only
//! one nonzero at r = 0 and is dropped from both components. Dropping it from
//! P enforces P(0) = 0; dropping it from Q removes the divergent ∫ B₀² V dr of
//! a point nucleus. The problem then has dimension 2(N−1) with unknowns
//! ordered (p₁ … p_{N−1}, q₁ … q_{N−1}). With n = N−1, E_R = b(R) b(R)ᵀ for
//! the wall values b(R), and M = (c/2)(D − Dᵀ) − c(κ/r):
//!
//! ```text
//! A = | V + (c/2) E_R          M              |     B = | C  0 |
//!     | Mᵀ           −2c² C + V − (c/2) E_R  |         | 0  C |
//! ```
//!
//! The E_R terms come from differentiating the wall term (c/4)[P²(R) − Q²(R)]
//! of the action twice in the coefficients. Only index n (the last function)
//! is nonzero at R, so each E_R block has a single entry. The origin term
//! is assembled the same way from b(0), which vanishes on the reduced basis.

mod eigen;

use serde::{Deserialize, Serialize};

pub use eigen::{cholesky, solve_generalized_eig, symmetric_eigen, EigenMethod, Matrix};

use crate::basis::{Basis, BasisSpec, NuclearModel};
use crate::error::{domain, Error, Result};
use crate::specfun::{BigReal, PrecisionCtx};

/// Relativistic angular quantum number κ = ∓(j + ½) for j = ℓ ± ½.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct AngularKappa(i32);

impl TryFrom<i32> for AngularKappa {
    type Error = Error;
    fn try_from(k: i32) -> Result<Self> {
        Self::new(k)
    }
}

impl From<AngularKappa> for i32 {
    fn from(k: AngularKappa) -> i32 {
        k.0
    }
}

impl AngularKappa {
    pub fn new(kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(domain("kappa", "κ must be nonzero"));
        }
        Ok(Self(kappa))
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// Orbital angular momentum of the large component.
    pub fn l(self) -> u32 {
        if self.0 > 0 {
            self.0 as u32
        } else {
            (-self.0 - 1) as u32
        }
    }

    /// Orbital angular momentum of the small component (that of −κ).
    pub fn l_small(self) -> u32 {
        Self(-self.0).l()
    }

    /// 2j.
    pub fn two_j(self) -> u32 {
        2 * self.0.unsigned_abs() - 1
    }

    pub fn j(self) -> f64 {
        self.two_j() as f64 / 2.0
    }

    /// Lowest principal quantum number with this κ.
    pub fn min_n(self) -> u32 {
        self.l() + 1
    }

    /// Spectroscopic label such as `2p1/2`.
    pub fn label(self, n: u32) -> String {
        const LETTERS: &[u8] = b"spdfghik";
        let letter = LETTERS.get(self.l() as usize).map(|&b| b as char).unwrap_or('?');
        format!("{n}{letter}{}/2", self.two_j())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    NegativeContinuum,
    Bound,
    PositiveContinuum,
}

/// The two readings of the r = 0 boundary term for κ > 0:
/// −(c/2)P(0)[P(0) − Q(0)] as for κ < 0, or −(c/2)P(0)[cP(0) − Q(0)].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginBranch {
    #[default]
    Symmetric,
    ScaledByC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub origin: OriginBranch,
    pub method: EigenMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOrbital {
    pub kappa: AngularKappa,
    /// 1-based position in the ascending spectrum.
    pub index: usize,
    pub energy: BigReal,
    /// Coefficients over the full basis; entry 0 is identically zero.
    pub p_coeffs: Vec<BigReal>,
    pub q_coeffs: Vec<BigReal>,
    pub class: StateClass,
}

impl RadialOrbital {
    pub fn reconstruct(&self, basis: &Basis, r: &BigReal) -> Result<(BigReal, BigReal)> {
        reconstruct(self, basis, r)
    }
}

/// P(r) = Σ p_i B_i(r), Q(r) = Σ q_i B_i(r).
pub fn reconstruct(orbital: &RadialOrbital, basis: &Basis, r: &BigReal) -> Result<(BigReal, BigReal)> {
    let b = basis.eval_all(r)?;
    Ok((
        crate::specfun::dot(&orbital.p_coeffs, &b),
        crate::specfun::dot(&orbital.q_coeffs, &b),
    ))
}

/// Point-nucleus Dirac energy with the rest energy c² removed.
pub fn exact_energy(n: u32, kappa: AngularKappa, z: f64, c: &BigReal) -> Result<BigReal> {
    let k = kappa.value();
    let ka = k.unsigned_abs();
    if n < ka || (k > 0 && n == ka) {
        return Err(domain("exact_energy", format!("n = {n} is not allowed for κ = {k}")));
    }
    let ctx = c.ctx();
    let za = ctx.real(z) / c;
    let kk = ctx.int(ka as i64);
    let radicand = &kk * &kk - &za * &za;
    if !(radicand > ctx.zero()) {
        return Err(domain("exact_energy", format!("Zα ≥ |κ| for Z = {z}")));
    }
    let denom = ctx.int((n - ka) as i64) + radicand.sqrt();
    let x = (&za * &za) / (&denom * &denom);
    // c²[(1+x)^(−1/2) − 1] without cancellation.
    let s = (ctx.one() + &x).sqrt();
    Ok(-(c * c) * x / (&s * (ctx.one() + &s)))
}

/// Assembled (A, B) on the reduced basis (see module docs for the layout).
pub fn assemble(
    basis: &Basis,
    nuc: &NuclearModel,
    kappa: AngularKappa,
    c: &BigReal,
    origin: OriginBranch,
) -> Result<(Matrix, Matrix)> {
    let ctx = basis.ctx();
    let n = basis.len() - 1;
    let c = c.to_ctx(ctx);
    let gram = basis.gram().block(1)?;
    let der = basis.derivative().block(1)?;
    let kr = basis.kappa_over_r(kappa.value()).block(1)?;
    let pot = basis.potential(nuc)?.block(1)?;
    let wall = &basis.wall_values()[1..];
    let zero0 = &basis.origin_values()[1..];
    let half_c = &c / 2;
    let two_c2 = &c * &c * 2;

    let mut a = vec![vec![ctx.zero(); 2 * n]; 2 * n];
    let mut b = vec![vec![ctx.zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let er = &half_c * &wall[i] * &wall[j];
            let e0 = &zero0[i] * &zero0[j];
            a[i][j] = &pot[i][j] + &er;
            a[n + i][n + j] = &pot[i][j] - &gram[i][j] * &two_c2 - &er;
            let m = &half_c * (&der[i][j] - &der[j][i]) - &c * &kr[i][j];
            a[i][n + j] = m.clone();
            a[n + j][i] = m;
            // −(c/2)P(0)[s P(0) − Q(0)] with s = 1 or c.
            if !e0.is_zero() {
                let s = match (origin, kappa.value() > 0) {
                    (OriginBranch::ScaledByC, true) => c.clone(),
                    _ => ctx.one(),
                };
                a[i][j] -= &c * &s * &e0;
                a[i][n + j] += &half_c * &e0;
                a[n + j][i] += &half_c * &e0;
            }
            b[i][j] = gram[i][j].clone();
            b[n + i][n + j] = gram[i][j].clone();
        }
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracSpectrum {
    pub spec: BasisSpec,
    pub nuc: NuclearModel,
    pub kappa: AngularKappa,
    pub speed_of_light: BigReal,
    pub orbitals: Vec<RadialOrbital>,
    /// Diagnostics raised by classification.
    pub warnings: Vec<String>,
    precision: PrecisionCtx,
}

impl DiracSpectrum {
    pub fn compute(
        basis: &Basis,
        nuc: &NuclearModel,
        kappa: AngularKappa,
        c: &BigReal,
        opts: SolveOptions,
    ) -> Result<Self> {
        nuc.validate(basis.spec().radius)?;
        let (a, b) = assemble(basis, nuc, kappa, c, opts.origin)?;
        let pairs = solve_generalized_eig(&a, &b, basis.ctx(), opts.method)?;
        let mut s = classify(pairs, basis.spec(), nuc, kappa, &c.to_ctx(basis.ctx()));
        s.precision = basis.ctx();
        Ok(s)
    }

    /// The context the spectrum was computed in.
    pub fn ctx(&self) -> PrecisionCtx {
        self.precision
    }

    pub fn bound_states(&self) -> impl Iterator<Item = &RadialOrbital> {
        self.orbitals.iter().filter(|o| o.class == StateClass::Bound)
    }

    /// Bound state with principal quantum number n.
    pub fn bound(&self, n: u32) -> Result<&RadialOrbital> {
        let min = self.kappa.min_n();
        let missing = || domain("bound", format!("no bound {} state in this basis", self.kappa.label(n)));
        if n < min {
            return Err(missing());
        }
        self.bound_states().nth((n - min) as usize).ok_or_else(missing)
    }

    /// States above the negative continuum, used in spectral sums.
    pub fn positive_branch(&self) -> impl Iterator<Item = &RadialOrbital> {
        self.orbitals.iter().filter(|o| o.class != StateClass::NegativeContinuum)
    }

    pub fn negative_branch(&self) -> impl Iterator<Item = &RadialOrbital> {
        self.orbitals.iter().filter(|o| o.class == StateClass::NegativeContinuum)
    }

    /// Fails on the first classification warning.
    pub fn check(&self) -> Result<()> {
        match self.warnings.first() {
            Some(w) => Err(Error::SpuriousState(w.clone())),
            None => Ok(()),
        }
    }

    pub fn key(&self) -> SpectrumKey {
        SpectrumKey {
            z: self.nuc.z,
            kappa: self.kappa,
            basis: self.spec.clone(),
            nuclear: self.nuc,
            digits: self.ctx().digits(),
            speed_of_light: self.speed_of_light.to_sci(self.ctx().digits() as usize),
        }
    }

    pub fn to_json(&self) -> String {
        let sig = self.ctx().round_trip_digits();
        let dump = SpectrumDump {
            key: self.key(),
            warnings: self.warnings.clone(),
            orbitals: self
                .orbitals
                .iter()
                .map(|o| OrbitalDump {
                    index: o.index,
                    class: o.class,
                    energy: o.energy.to_sci(sig),
                    p: o.p_coeffs.iter().map(|v| v.to_sci(sig)).collect(),
                    q: o.q_coeffs.iter().map(|v| v.to_sci(sig)).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("spectrum serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: SpectrumDump = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let ctx = PrecisionCtx::new(dump.key.digits)?;
        let parse = |v: &[String]| v.iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>>>();
        let orbitals = dump
            .orbitals
            .iter()
            .map(|o| {
                Ok(RadialOrbital {
                    kappa: dump.key.kappa,
                    index: o.index,
                    energy: ctx.parse(&o.energy)?,
                    p_coeffs: parse(&o.p)?,
                    q_coeffs: parse(&o.q)?,
                    class: o.class,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec: dump.key.basis,
            nuc: dump.key.nuclear,
            kappa: dump.key.kappa,
            speed_of_light: ctx.parse(&dump.key.speed_of_light)?,
            orbitals,
            warnings: dump.warnings,
            precision: ctx,
        })
    }
}

/// Everything a spectrum depends on; serialized, it keys the cache.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumKey {
    pub z: f64,
    pub kappa: AngularKappa,
    pub basis: BasisSpec,
    pub nuclear: NuclearModel,
    pub digits: u32,
    pub speed_of_light: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct OrbitalDump {
    index: usize,
    class: StateClass,
    energy: String,
    p: Vec<String>,
    q: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumDump {
    #[serde(flatten)]
    key: SpectrumKey,
    warnings: Vec<String>,
    orbitals: Vec<OrbitalDump>,
}

/// Labels raw eigenpairs (ascending) and expands them back to the full basis.
pub fn classify(
    pairs: Vec<(BigReal, Vec<BigReal>)>,
    spec: &BasisSpec,
    nuc: &NuclearModel,
    kappa: AngularKappa,
    c: &BigReal,
) -> DiracSpectrum {
    let ctx = c.ctx();
    let threshold = -(c * c * 2);
    let n = pairs.len() / 2;
    let mut orbitals = Vec::with_capacity(pairs.len());
    for (idx, (energy, v)) in pairs.into_iter().enumerate() {
        let class = if energy <= threshold {
            StateClass::NegativeContinuum
        } else if energy.is_negative() {
            StateClass::Bound
        } else {
            StateClass::PositiveContinuum
        };
        let mut p = vec![ctx.zero()];
        p.extend_from_slice(&v[..n]);
        let mut q = vec![ctx.zero()];
        q.extend_from_slice(&v[n..]);
        // Phase: P > 0 near the origin.
        let lead = p
            .iter()
            .find(|x| x.abs().to_f64() > 1e-30 * p.iter().map(|y| y.abs().to_f64()).fold(0.0, f64::max))
            .cloned()
            .unwrap_or_else(|| ctx.one());
        if lead.is_negative() {
            p.iter_mut().for_each(|x| *x = -&*x);
            q.iter_mut().for_each(|x| *x = -&*x);
        }
        orbitals.push(RadialOrbital {
            kappa,
            index: idx + 1,
            energy,
            p_coeffs: p,
            q_coeffs: q,
            class,
        });
    }

    let mut warnings = Vec::new();
    let negative = orbitals.iter().filter(|o| o.class == StateClass::NegativeContinuum).count();
    if negative != n {
        warnings.push(format!("{negative} states below −2c², expected {n}"));
    }
    if kappa.value() > 0 && nuc.z > 0.0 {
        if let Ok(lowest) = exact_energy(kappa.min_n(), kappa, nuc.z, c) {
            let margin = 1e-3 * lowest.abs().to_f64().max(1.0);
            let floor = &lowest - ctx.real(margin);
            for o in &orbitals {
                if o.class == StateClass::Bound && o.energy < floor {
                    warnings.push(format!(
                        "state {} at ε = {} lies below the lowest {} level {}",
                        o.index,
                        o.energy.to_sci(12),
                        kappa.label(kappa.min_n()),
                        lowest.to_sci(12)
                    ));
                }
            }
        }
    }
    DiracSpectrum {
        spec: spec.clone(),
        nuc: *nuc,
        kappa,
        speed_of_light: c.clone(),
        orbitals,
        warnings,
        precision: c.ctx(),
    }
}
