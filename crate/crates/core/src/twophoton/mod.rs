//! Two-photon decay rates from second-order perturbation theory, with the
//! intermediate-state sum running over a finite-basis pseudospectrum.
//!
//! Radial integrals use the orbitals' own Q sign (see [`crate::dirac`]):
//!
//! ```text
//! I±_λ(b, a) = ∫ (P_b Q_a ± Q_b P_a) j_λ(ωr/c) dr
//! J_λ(b, a)  = ∫ (P_b P_a + Q_b Q_a) j_λ(ωr/c) dr
//! ```
//!
//! Reduced one-photon elements ⟨b‖T‖a⟩, with C = ⟨κ_b‖C_L‖κ_a⟩,
//! C̄ = ⟨−κ_b‖C_L‖κ_a⟩ and Δκ = κ_a − κ_b:
//!
//! ```text
//! magnetic  C̄ (κ_a + κ_b)/(L+1) · I⁺_L
//! length   −C [J_L + Δκ/(L+1) I⁺_{L+1} − I⁻_{L+1}]
//! velocity  C/(2L+1) [Δκ (I⁺_{L−1} − L/(L+1) I⁺_{L+1}) + L (I⁻_{L−1} + I⁻_{L+1})]
//! ```
//!
//! A general gauge G interpolates linearly, T(G) = T_v + (G/G_l)(T_l − T_v)
//! with G_l = √((L+1)/L); the full second-order sum is independent of G up
//! to basis truncation. Each element is scaled to unit energy density by
//! √((2L+2)(2L+1) ω / (2π L c)), so a one-photon rate is 2π|⟨b‖T‖a⟩|²/(2j_a+1).

mod angular;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use angular::{reduced_c, wigner_3j, wigner_6j};

use crate::basis::{Basis, NuclearModel};
use crate::dirac::{AngularKappa, DiracSpectrum, RadialOrbital, SolveOptions, StateClass};
use crate::error::{Error, Result};
use crate::specfun::{dot, gauss_legendre_on, BigReal, PrecisionCtx};
use crate::units::per_second;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MultipoleKind {
    Electric,
    Magnetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multipole {
    pub kind: MultipoleKind,
    pub l: u32,
}

impl Multipole {
    pub fn electric(l: u32) -> Self {
        Self {
            kind: MultipoleKind::Electric,
            l,
        }
    }

    pub fn magnetic(l: u32) -> Self {
        Self {
            kind: MultipoleKind::Magnetic,
            l,
        }
    }

    /// Radial orders λ entering the element in either gauge.
    fn orders(self) -> Vec<u32> {
        match self.kind {
            MultipoleKind::Magnetic => vec![self.l],
            MultipoleKind::Electric => vec![self.l - 1, self.l, self.l + 1],
        }
    }

    /// Angular factor of ⟨κ_b‖T‖κ_a⟩; zero when parity or triangle rules fail.
    fn angular(self, kb: AngularKappa, ka: AngularKappa, ctx: PrecisionCtx) -> BigReal {
        match self.kind {
            MultipoleKind::Electric => reduced_c(kb, ka, self.l, ctx),
            MultipoleKind::Magnetic => {
                angular::reduced_c_with(kb.l_small(), kb.two_j(), ka.l(), ka.two_j(), self.l, ctx)
            }
        }
    }

    fn allows(self, kb: AngularKappa, ka: AngularKappa) -> bool {
        !self.angular(kb, ka, PrecisionCtx::DOUBLE).is_zero()
    }
}

impl fmt::Display for Multipole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            MultipoleKind::Electric => 'E',
            MultipoleKind::Magnetic => 'M',
        };
        write!(f, "{c}{}", self.l)
    }
}

impl FromStr for Multipole {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('E' | 'e') => MultipoleKind::Electric,
            Some('M' | 'm') => MultipoleKind::Magnetic,
            _ => return Err(bad()),
        };
        let l: u32 = chars.as_str().parse().map_err(|_| bad())?;
        if l == 0 {
            return Err(bad());
        }
        Ok(Self { kind, l })
    }
}

/// A pair of photon multipoles, written `2E1` or `E1M2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MultipoleChannel {
    pub first: Multipole,
    pub second: Multipole,
}

impl MultipoleChannel {
    pub fn new(first: Multipole, second: Multipole) -> Self {
        Self { first, second }
    }

    pub fn is_magnetic_only(self) -> bool {
        self.first.kind == MultipoleKind::Magnetic && self.second.kind == MultipoleKind::Magnetic
    }

    /// Intermediate κ values reachable in either time ordering.
    pub fn intermediates(self, ki: AngularKappa, kf: AngularKappa) -> Result<Vec<AngularKappa>> {
        let reach = (ki.two_j() + 2 * self.first.l.max(self.second.l)) as i32 / 2 + 1;
        let mut out = Vec::new();
        for k in (-reach..=reach).filter(|&k| k != 0) {
            let nu = AngularKappa::new(k)?;
            let forward = self.first.allows(nu, ki) && self.second.allows(kf, nu);
            let backward = self.second.allows(nu, ki) && self.first.allows(kf, nu);
            if forward || backward {
                out.push(nu);
            }
        }
        if out.is_empty() || couplings(self, ki, kf).is_empty() {
            return Err(Error::SelectionRule(format!(
                "{self} between {} and {}",
                ki.label(ki.min_n()),
                kf.label(kf.min_n())
            )));
        }
        Ok(out)
    }
}

/// Every κ a set of channels needs: intermediates plus the two end states.
pub fn required_kappas(
    channels: &[MultipoleChannel],
    ki: AngularKappa,
    kf: AngularKappa,
) -> Result<Vec<AngularKappa>> {
    let mut out = vec![ki, kf];
    for ch in channels {
        out.extend(ch.intermediates(ki, kf)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Total photon angular momenta J coupling both photons and both states.
fn couplings(ch: MultipoleChannel, ki: AngularKappa, kf: AngularKappa) -> Vec<u32> {
    let (l1, l2) = (ch.first.l as i64, ch.second.l as i64);
    let (ji, jf) = (ki.two_j() as i64, kf.two_j() as i64);
    let lo = (l1 - l2).abs().max((ji - jf).abs() / 2);
    let hi = (l1 + l2).min((ji + jf) / 2);
    (lo..=hi).map(|j| j as u32).collect()
}

impl fmt::Display for MultipoleChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.second {
            write!(f, "2{}", self.first)
        } else {
            write!(f, "{}{}", self.first, self.second)
        }
    }
}

impl FromStr for MultipoleChannel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('2') {
            let m: Multipole = rest.parse()?;
            return Ok(Self::new(m, m));
        }
        let split = t
            .char_indices()
            .skip(1)
            .find(|(_, c)| matches!(c, 'E' | 'M' | 'e' | 'm'))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Parse(s.to_string()))?;
        Ok(Self::new(t[..split].parse()?, t[split..].parse()?))
    }
}

impl TryFrom<String> for MultipoleChannel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MultipoleChannel> for String {
    fn from(c: MultipoleChannel) -> String {
        c.to_string()
    }
}

/// Gauge of the electric multipole field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// G = 0
    Velocity,
    /// G = √((L+1)/L)
    Length,
    Parameter(f64),
}

impl Gauge {
    pub fn parameter(self, l: u32, ctx: PrecisionCtx) -> BigReal {
        match self {
            Gauge::Velocity => ctx.zero(),
            Gauge::Length => (ctx.int(l as i64 + 1) / l as i64).sqrt(),
            Gauge::Parameter(g) => ctx.real(g),
        }
    }

    fn mix(self, l: u32, pair: &ElementPair, ctx: PrecisionCtx) -> BigReal {
        match self {
            Gauge::Velocity => pair.velocity.clone(),
            Gauge::Length => pair.length.clone(),
            Gauge::Parameter(_) => {
                let ratio = self.parameter(l, ctx) / Gauge::Length.parameter(l, ctx);
                &pair.velocity + ratio * (&pair.length - &pair.velocity)
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            Gauge::Velocity => "velocity".into(),
            Gauge::Length => "length".into(),
            Gauge::Parameter(g) => format!("G={g}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    All,
    PositiveOnly,
    NegativeOnly,
}

impl Restriction {
    pub const ALL: [Restriction; 3] = [Restriction::All, Restriction::PositiveOnly, Restriction::NegativeOnly];

    fn admits(self, class: StateClass) -> bool {
        match self {
            Restriction::All => true,
            Restriction::PositiveOnly => class != StateClass::NegativeContinuum,
            Restriction::NegativeOnly => class == StateClass::NegativeContinuum,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Restriction::All => "total",
            Restriction::PositiveOnly => "positive",
            Restriction::NegativeOnly => "negative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Pseudospectra for every κ an expansion needs, all in one basis.
#[derive(Debug)]
pub struct SpectrumSet {
    basis: Basis,
    c: BigReal,
    spectra: BTreeMap<i32, DiracSpectrum>,
}

impl SpectrumSet {
    pub fn new(basis: Basis, c: &BigReal) -> Self {
        let c = c.to_ctx(basis.ctx());
        Self {
            basis,
            c,
            spectra: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, s: DiracSpectrum) -> Result<()> {
        if &s.spec != self.basis.spec() {
            return Err(Error::InvalidBasis("spectrum computed in a different basis".into()));
        }
        self.spectra.insert(s.kappa.value(), s);
        Ok(())
    }

    /// Compute and insert any missing spectra for `kappas`.
    pub fn ensure(
        &mut self,
        nuc: &NuclearModel,
        kappas: &[AngularKappa],
        opts: SolveOptions,
    ) -> Result<()> {
        for &k in kappas {
            if !self.spectra.contains_key(&k.value()) {
                let s = DiracSpectrum::compute(&self.basis, nuc, k, &self.c, opts)?;
                self.insert(s)?;
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn speed_of_light(&self) -> &BigReal {
        &self.c
    }

    pub fn get(&self, kappa: AngularKappa) -> Result<&DiracSpectrum> {
        self.spectra
            .get(&kappa.value())
            .ok_or_else(|| Error::Format(format!("no spectrum for κ = {}", kappa.value())))
    }

    pub fn kappas(&self) -> impl Iterator<Item = AngularKappa> + '_ {
        self.spectra.values().map(|s| s.kappa)
    }
}

/// Bessel-weighted bilinear forms of one photon energy.
struct Kernels {
    mats: BTreeMap<u32, Vec<Vec<BigReal>>>,
}

impl Kernels {
    fn new(mult: &[Multipole], omega: &BigReal, basis: &Basis, c: &BigReal) -> Result<Self> {
        let mut mats = BTreeMap::new();
        for m in mult {
            for lam in m.orders() {
                if !mats.contains_key(&lam) {
                    let b = basis.bessel(lam, omega, c)?;
                    let n = b.dim();
                    mats.insert(lam, (0..n).map(|i| (0..n).map(|j| b.at(i, j).clone()).collect()).collect());
                }
            }
        }
        Ok(Self { mats })
    }
}

/// M p and M q for each order λ.
struct Contracted(BTreeMap<u32, (Vec<BigReal>, Vec<BigReal>)>);

impl Contracted {
    fn new(k: &Kernels, o: &RadialOrbital) -> Self {
        let apply = |m: &Vec<Vec<BigReal>>, v: &[BigReal]| m.iter().map(|row| dot(row, v)).collect::<Vec<_>>();
        Self(
            k.mats
                .iter()
                .map(|(&lam, m)| (lam, (apply(m, &o.p_coeffs), apply(m, &o.q_coeffs))))
                .collect(),
        )
    }
}

/// ∫ X_b Y_a j_λ for the four component pairings.
struct Radial {
    pp: BigReal,
    qq: BigReal,
    pq: BigReal,
    qp: BigReal,
}

impl Radial {
    fn j(&self) -> BigReal {
        &self.pp + &self.qq
    }
    fn i(&self, s: Sign) -> BigReal {
        match s {
            Sign::Plus => &self.pq + &self.qp,
            Sign::Minus => &self.pq - &self.qp,
        }
    }
}

/// Bra b explicit, ket a pre-contracted.
fn radial_ket(b: &RadialOrbital, a: &Contracted, lam: u32) -> Radial {
    let (u, w) = &a.0[&lam];
    Radial {
        pp: dot(&b.p_coeffs, u),
        qq: dot(&b.q_coeffs, w),
        pq: dot(&b.p_coeffs, w),
        qp: dot(&b.q_coeffs, u),
    }
}

/// Bra b pre-contracted, ket a explicit (the kernels are symmetric).
fn radial_bra(b: &Contracted, a: &RadialOrbital, lam: u32) -> Radial {
    let (u, w) = &b.0[&lam];
    Radial {
        pp: dot(u, &a.p_coeffs),
        qq: dot(w, &a.q_coeffs),
        pq: dot(u, &a.q_coeffs),
        qp: dot(w, &a.p_coeffs),
    }
}

struct ElementPair {
    velocity: BigReal,
    length: BigReal,
}

/// Bare ⟨b‖T‖a⟩ in both gauges, before the energy-density scale.
fn element(
    mult: Multipole,
    kb: AngularKappa,
    ka: AngularKappa,
    radial: &dyn Fn(u32) -> Radial,
    ctx: PrecisionCtx,
) -> Option<ElementPair> {
    let ang = mult.angular(kb, ka, ctx);
    if ang.is_zero() {
        return None;
    }
    let l = mult.l as i64;
    match mult.kind {
        MultipoleKind::Magnetic => {
            let v = ang * (ka.value() + kb.value()) as i64 * radial(mult.l).i(Sign::Plus) / (l + 1);
            Some(ElementPair {
                velocity: v.clone(),
                length: v,
            })
        }
        MultipoleKind::Electric => {
            let dk = (ka.value() - kb.value()) as i64;
            let lo = radial(mult.l - 1);
            let hi = radial(mult.l + 1);
            let length = -(&ang * (radial(mult.l).j() + hi.i(Sign::Plus) * dk / (l + 1) - hi.i(Sign::Minus)));
            let velocity = &ang
                * ((lo.i(Sign::Plus) - hi.i(Sign::Plus) * l / (l + 1)) * dk
                    + (lo.i(Sign::Minus) + hi.i(Sign::Minus)) * l)
                / (2 * l + 1);
            Some(ElementPair { velocity, length })
        }
    }
}

/// √((2L+2)(2L+1) ω / (2π L c))
fn density_scale(l: u32, omega: &BigReal, c: &BigReal) -> BigReal {
    let ctx = c.ctx();
    let l = l as i64;
    (omega * ((2 * l + 2) * (2 * l + 1)) / (ctx.pi() * 2 * l * c)).sqrt()
}

fn check_basis(f: &RadialOrbital, i: &RadialOrbital, basis: &Basis) -> Result<()> {
    if f.p_coeffs.len() != basis.len() || i.p_coeffs.len() != basis.len() {
        return Err(Error::InvalidBasis("orbital does not match the basis".into()));
    }
    Ok(())
}

/// I±_L(f, i) at photon energy ω.
pub fn radial_i(
    l: u32,
    sign: Sign,
    f: &RadialOrbital,
    i: &RadialOrbital,
    omega: &BigReal,
    basis: &Basis,
    c: &BigReal,
) -> Result<BigReal> {
    check_basis(f, i, basis)?;
    let m = basis.bessel(l, omega, c)?;
    let n = basis.len();
    let form = |x: &[BigReal], y: &[BigReal]| {
        let mut s = basis.ctx().zero();
        for a in 0..n {
            for b in 0..n {
                s += &x[a] * m.at(a, b) * &y[b];
            }
        }
        s
    };
    let pq = form(&f.p_coeffs, &i.q_coeffs);
    let qp = form(&f.q_coeffs, &i.p_coeffs);
    Ok(match sign {
        Sign::Plus => pq + qp,
        Sign::Minus => pq - qp,
    })
}

/// J_L(f, i) at photon energy ω.
pub fn radial_j(
    l: u32,
    f: &RadialOrbital,
    i: &RadialOrbital,
    omega: &BigReal,
    basis: &Basis,
    c: &BigReal,
) -> Result<BigReal> {
    check_basis(f, i, basis)?;
    let k = Kernels::new(&[Multipole::magnetic(l)], omega, basis, c)?;
    let ci = Contracted::new(&k, i);
    Ok(radial_ket(f, &ci, l).j())
}

/// ⟨f‖T^{σL}(G, ω)‖i⟩ scaled to unit photon energy density.
pub fn reduced_amplitude(
    mult: Multipole,
    gauge: Gauge,
    f: &RadialOrbital,
    i: &RadialOrbital,
    omega: &BigReal,
    basis: &Basis,
    c: &BigReal,
) -> Result<BigReal> {
    check_basis(f, i, basis)?;
    let ctx = basis.ctx();
    let k = Kernels::new(&[mult], omega, basis, c)?;
    let ci = Contracted::new(&k, i);
    let pair = element(mult, f.kappa, i.kappa, &|lam| radial_ket(f, &ci, lam), ctx).ok_or_else(|| {
        Error::SelectionRule(format!(
            "{mult} between κ = {} and κ = {}",
            i.kappa.value(),
            f.kappa.value()
        ))
    })?;
    Ok(gauge.mix(mult.l, &pair, ctx) * density_scale(mult.l, omega, c))
}

/// Coupled second-order amplitudes S^J for one assignment of multipoles to
/// photon energies, per gauge and restriction.
struct Amplitudes {
    /// [gauge][restriction] → per-J sums
    sums: Vec<[Vec<BigReal>; 3]>,
}

const RESONANCE: f64 = 1e-8;

#[allow(clippy::too_many_arguments)]
fn coupled_amplitudes(
    t1: Multipole,
    t2: Multipole,
    omega1: &BigReal,
    omega2: &BigReal,
    set: &SpectrumSet,
    i: &RadialOrbital,
    f: &RadialOrbital,
    gauges: &[Gauge],
    js: &[u32],
) -> Result<Amplitudes> {
    let ctx = set.basis.ctx();
    let c = &set.c;
    let k1 = Kernels::new(&[t1], omega1, &set.basis, c)?;
    let k2 = Kernels::new(&[t2], omega2, &set.basis, c)?;
    let s1 = density_scale(t1.l, omega1, c);
    let s2 = density_scale(t2.l, omega2, c);
    let (ci1, cf1) = (Contracted::new(&k1, i), Contracted::new(&k1, f));
    let (ci2, cf2) = (Contracted::new(&k2, i), Contracted::new(&k2, f));
    let (ki, kf) = (i.kappa, f.kappa);
    let (tji, tjf) = (ki.two_j() as i64, kf.two_j() as i64);
    let (l1, l2) = (t1.l as i64, t2.l as i64);

    let mut sums: Vec<[Vec<BigReal>; 3]> = gauges
        .iter()
        .map(|_| std::array::from_fn(|_| vec![ctx.zero(); js.len()]))
        .collect();

    let channel = MultipoleChannel::new(t1, t2);
    for nu_kappa in channel.intermediates(ki, kf)? {
        let spectrum = set.get(nu_kappa)?;
        let tjn = nu_kappa.two_j() as i64;
        // Recoupling weights per J for both time orderings.
        let weights: Vec<(BigReal, BigReal)> = js
            .iter()
            .map(|&jj| {
                let j2 = 2 * jj as i64;
                let phase = if ((j2 + tji + tjf) / 2) % 2 == 0 { 1 } else { -1 };
                let root = ctx.int(j2 + 1).sqrt() * phase;
                let a = wigner_6j(2 * l2, 2 * l1, j2, tji, tjf, tjn, ctx);
                let b = wigner_6j(2 * l1, 2 * l2, j2, tji, tjf, tjn, ctx);
                let b = if (l1 + l2 - jj as i64) % 2 == 0 { b } else { -b };
                (&root * a, &root * b)
            })
            .collect();
        for nu in &spectrum.orbitals {
            let e1 = &nu.energy - &i.energy + omega1;
            let e2 = &nu.energy - &i.energy + omega2;
            for d in [&e1, &e2] {
                if d.abs().to_f64() < RESONANCE {
                    return Err(Error::Resonance {
                        state: nu.index,
                        denominator: d.to_f64(),
                    });
                }
            }
            // Ordering A: T1 absorbs ω1 first, T2 second; ordering B swapped.
            let a_in = element(t1, nu_kappa, ki, &|lam| radial_ket(nu, &ci1, lam), ctx);
            let a_out = element(t2, kf, nu_kappa, &|lam| radial_bra(&cf2, nu, lam), ctx);
            let b_in = element(t2, nu_kappa, ki, &|lam| radial_ket(nu, &ci2, lam), ctx);
            let b_out = element(t1, kf, nu_kappa, &|lam| radial_bra(&cf1, nu, lam), ctx);
            for (g, gauge) in gauges.iter().enumerate() {
                let first = match (&a_in, &a_out) {
                    (Some(x), Some(y)) => Some(gauge.mix(t2.l, y, ctx) * gauge.mix(t1.l, x, ctx) / &e1),
                    _ => None,
                };
                let second = match (&b_in, &b_out) {
                    (Some(x), Some(y)) => Some(gauge.mix(t1.l, y, ctx) * gauge.mix(t2.l, x, ctx) / &e2),
                    _ => None,
                };
                for (jdx, (wa, wb)) in weights.iter().enumerate() {
                    let mut term = ctx.zero();
                    if let Some(x) = &first {
                        term += wa * x;
                    }
                    if let Some(y) = &second {
                        term += wb * y;
                    }
                    for (r, restriction) in Restriction::ALL.iter().enumerate() {
                        if restriction.admits(nu.class) {
                            sums[g][r][jdx] += &term;
                        }
                    }
                }
            }
        }
    }
    let scale = s1 * s2;
    for per_gauge in &mut sums {
        for per_r in per_gauge.iter_mut() {
            for v in per_r.iter_mut() {
                *v = &*v * &scale;
            }
        }
    }
    Ok(Amplitudes { sums })
}

/// S^J amplitudes (first multipole at ω₁) for one gauge and restriction.
#[allow(clippy::too_many_arguments)]
pub fn second_order_sum(
    channel: MultipoleChannel,
    gauge: Gauge,
    set: &SpectrumSet,
    i: &RadialOrbital,
    f: &RadialOrbital,
    omega1: &BigReal,
    restriction: Restriction,
) -> Result<Vec<(u32, BigReal)>> {
    let omega2 = &i.energy - &f.energy - omega1;
    let js = couplings(channel, i.kappa, f.kappa);
    let amps = coupled_amplitudes(
        channel.first,
        channel.second,
        omega1,
        &omega2,
        set,
        i,
        f,
        &[gauge],
        &js,
    )?;
    let r = Restriction::ALL.iter().position(|&x| x == restriction).unwrap();
    Ok(js.into_iter().zip(amps.sums[0][r].iter().cloned()).collect())
}

/// dw/dω₁ in atomic units for each gauge and restriction.
fn densities(
    channel: MultipoleChannel,
    set: &SpectrumSet,
    i: &RadialOrbital,
    f: &RadialOrbital,
    omega1: &BigReal,
    gauges: &[Gauge],
) -> Result<Vec<[BigReal; 3]>> {
    let ctx = set.basis.ctx();
    let omega2 = &i.energy - &f.energy - omega1;
    let js = couplings(channel, i.kappa, f.kappa);
    let mut assignments = vec![(channel.first, channel.second, omega1.clone(), omega2.clone())];
    if channel.first != channel.second {
        assignments.push((channel.first, channel.second, omega2.clone(), omega1.clone()));
    }
    let mut out: Vec<[BigReal; 3]> = gauges.iter().map(|_| std::array::from_fn(|_| ctx.zero())).collect();
    for (t1, t2, w1, w2) in &assignments {
        let amps = coupled_amplitudes(*t1, *t2, w1, w2, set, i, f, gauges, &js)?;
        for (g, per_gauge) in amps.sums.iter().enumerate() {
            for (r, per_j) in per_gauge.iter().enumerate() {
                for s in per_j {
                    out[g][r] += s * s;
                }
            }
        }
    }
    // Photon indistinguishability: integrate over the full [0, ω_t] with 1/2.
    let pre = ctx.pi() / (i.kappa.two_j() as i64 + 1);
    for per_gauge in &mut out {
        for v in per_gauge.iter_mut() {
            *v = &*v * &pre;
        }
    }
    Ok(out)
}

/// dw/dω₁ in s⁻¹ per hartree of ω₁, intermediate sum unrestricted.
pub fn differential_rate(
    channel: MultipoleChannel,
    gauge: Gauge,
    set: &SpectrumSet,
    i: &RadialOrbital,
    f: &RadialOrbital,
    omega1: &BigReal,
) -> Result<BigReal> {
    let d = densities(channel, set, i, f, omega1, &[gauge])?;
    Ok(per_second(&d[0][0]))
}

/// Rates under each summation restriction, s⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSplit {
    pub total: BigReal,
    pub positive: BigReal,
    pub negative: BigReal,
}

impl RateSplit {
    fn from_array(v: [BigReal; 3]) -> Self {
        let [total, positive, negative] = v;
        Self {
            total,
            positive,
            negative,
        }
    }

    pub fn get(&self, r: Restriction) -> &BigReal {
        match r {
            Restriction::All => &self.total,
            Restriction::PositiveOnly => &self.positive,
            Restriction::NegativeOnly => &self.negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialPoint {
    pub omega1: BigReal,
    pub weight: BigReal,
    pub velocity: RateSplit,
    pub length: Option<RateSplit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub channel: MultipoleChannel,
    pub z: f64,
    pub omega_t: BigReal,
    pub differential: Vec<DifferentialPoint>,
    pub velocity: RateSplit,
    /// Absent for purely magnetic channels.
    pub length: Option<RateSplit>,
    pub delta_lv: Option<BigReal>,
}

impl RateResult {
    /// Length-gauge rates where defined, otherwise the gauge-free value.
    pub fn reported(&self) -> &RateSplit {
        self.length.as_ref().unwrap_or(&self.velocity)
    }

    fn gauges(&self) -> Vec<(&'static str, &RateSplit)> {
        let mut v = Vec::new();
        if let Some(l) = &self.length {
            v.push(("length", l));
        }
        v.push((if self.length.is_some() { "velocity" } else { "none" }, &self.velocity));
        v
    }

    /// `Z,channel,restriction,gauge,rate,delta_lv`, one row per restriction and gauge.
    pub fn to_csv(&self, digits: usize, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str("Z,channel,restriction,gauge,rate,delta_lv\n");
        }
        let delta = self.delta_lv.as_ref().map(|d| d.to_sci(3)).unwrap_or_default();
        for r in Restriction::ALL {
            for (g, split) in self.gauges() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    self.z,
                    self.channel,
                    r.label(),
                    g,
                    split.get(r).to_sci(digits),
                    delta
                ));
            }
        }
        out
    }

    /// `omega1,restriction,gauge,density` at each quadrature node.
    pub fn differential_csv(&self, digits: usize) -> String {
        let mut out = String::from("omega1,restriction,gauge,density\n");
        for p in &self.differential {
            for r in Restriction::ALL {
                let mut gauges = vec![];
                if let Some(l) = &p.length {
                    gauges.push(("length", l));
                }
                gauges.push((if p.length.is_some() { "velocity" } else { "none" }, &p.velocity));
                for (g, split) in gauges {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        p.omega1.to_sci(digits),
                        r.label(),
                        g,
                        split.get(r).to_sci(digits)
                    ));
                }
            }
        }
        out
    }

    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let split = |s: &RateSplit| {
            serde_json::json!({
                "total": s.total.to_sci(digits),
                "positive": s.positive.to_sci(digits),
                "negative": s.negative.to_sci(digits),
            })
        };
        serde_json::json!({
            "channel": self.channel.to_string(),
            "z": self.z,
            "omega_t": self.omega_t.to_sci(digits),
            "velocity": split(&self.velocity),
            "length": self.length.as_ref().map(split),
            "delta_lv": self.delta_lv.as_ref().map(|d| d.to_sci(digits)),
            "differential": self.differential.iter().map(|p| serde_json::json!({
                "omega1": p.omega1.to_sci(digits),
                "weight": p.weight.to_sci(digits),
                "velocity": split(&p.velocity),
                "length": p.length.as_ref().map(split),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Gauss–Legendre integral of dw/dω₁ over [0, ω_t], both gauges and all
/// restrictions.
pub fn total_rate(
    channel: MultipoleChannel,
    set: &SpectrumSet,
    i: &RadialOrbital,
    f: &RadialOrbital,
    quad_points: usize,
    z: f64,
) -> Result<RateResult> {
    let ctx = set.basis.ctx();
    let omega_t = &i.energy - &f.energy;
    if !(omega_t > ctx.zero()) {
        return Err(crate::error::domain("total_rate", "initial state must lie above the final state"));
    }
    channel.intermediates(i.kappa, f.kappa)?;
    let magnetic = channel.is_magnetic_only();
    let gauges: Vec<Gauge> = if magnetic {
        vec![Gauge::Velocity]
    } else {
        vec![Gauge::Velocity, Gauge::Length]
    };
    let mut totals: Vec<[BigReal; 3]> = gauges.iter().map(|_| std::array::from_fn(|_| ctx.zero())).collect();
    let mut differential = Vec::with_capacity(quad_points);
    for (w1, wt) in gauss_legendre_on(&ctx.zero(), &omega_t, quad_points, ctx) {
        let d = densities(channel, set, i, f, &w1, &gauges)?;
        let si: Vec<[BigReal; 3]> = d.iter().map(|g| std::array::from_fn(|r| per_second(&g[r]))).collect();
        if si.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("total_rate"));
        }
        for (acc, g) in totals.iter_mut().zip(&si) {
            for r in 0..3 {
                acc[r] += &wt * &g[r];
            }
        }
        let mut it = si.into_iter();
        let velocity = RateSplit::from_array(it.next().unwrap());
        let length = it.next().map(RateSplit::from_array);
        differential.push(DifferentialPoint {
            omega1: w1,
            weight: wt,
            velocity,
            length,
        });
    }
    let mut it = totals.into_iter();
    let velocity = RateSplit::from_array(it.next().unwrap());
    let length = it.next().map(RateSplit::from_array);
    let delta_lv = length
        .as_ref()
        .map(|l| ((&l.total - &velocity.total) / &l.total).abs());
    Ok(RateResult {
        channel,
        z,
        omega_t,
        differential,
        velocity,
        length,
        delta_lv,
    })
}

/// Rates for each channel between bound states `(κ, n)`, filling `set` with
/// whatever spectra are missing.
#[allow(clippy::too_many_arguments)]
pub fn transition_rates(
    set: &mut SpectrumSet,
    nuc: &NuclearModel,
    channels: &[MultipoleChannel],
    initial: (AngularKappa, u32),
    fin: (AngularKappa, u32),
    quad_points: usize,
    opts: SolveOptions,
) -> Result<Vec<RateResult>> {
    let kappas = required_kappas(channels, initial.0, fin.0)?;
    set.ensure(nuc, &kappas, opts)?;
    let i = set.get(initial.0)?.bound(initial.1)?.clone();
    let f = set.get(fin.0)?.bound(fin.1)?.clone();
    channels
        .iter()
        .map(|&ch| total_rate(ch, set, &i, &f, quad_points, nuc.z))
        .collect()
}

/// Incoherent sum of channel totals (length gauge where available).
pub fn channel_sum(results: &[RateResult]) -> Option<BigReal> {
    crate::specfun::sum(results.iter().map(|r| &r.reported().total))
}
