use super::gamma::{beta, gamma, rgamma};
use super::{BigReal, PrecisionCtx};
use crate::error::{domain, Error, Result};

/// Iteration cap for every non-terminating series.
pub const MAX_TERMS: usize = 100_000;
const GUARD: u32 = 4;

/// `Some(m)` when `a` is the nonpositive integer −m.
fn nonpositive_integer(a: &BigReal) -> Option<u64> {
    if a.is_integer() && !(a > &a.lift(0)) {
        Some((-a.to_f64()) as u64)
    } else {
        None
    }
}

/// Gauss series ₂F₁(a, b; c; x) for |x| ≤ 1.
///
/// A nonpositive-integer numerator parameter gives a finite polynomial which
/// is summed in full. Otherwise the series runs until the last term drops
/// below 10^(−digits−4) of the partial sum.
pub fn hyp2f1(
    a: &BigReal,
    b: &BigReal,
    c: &BigReal,
    x: &BigReal,
    ctx: PrecisionCtx,
) -> Result<BigReal> {
    if x.is_zero() {
        return Ok(ctx.one());
    }
    let w = ctx.widen(GUARD);
    let (a, b, c, x) = (a.to_ctx(w), b.to_ctx(w), c.to_ctx(w), x.to_ctx(w));
    let terminating = match (nonpositive_integer(&a), nonpositive_integer(&b)) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (Some(m), None) | (None, Some(m)) => Some(m),
        (None, None) => None,
    };
    if let Some(cm) = nonpositive_integer(&c) {
        if terminating.is_none_or(|m| m > cm) {
            return Err(Error::Pole {
                function: "hyp2f1",
                at: c.to_f64(),
            });
        }
    }
    if let Some(m) = terminating {
        let mut term = w.one();
        let mut acc = w.one();
        for s in 0..m {
            let si = s as i64;
            term = term * (&a + si) * (&b + si) * &x / ((&c + si) * (si + 1));
            acc += &term;
        }
        return Ok(acc.to_ctx(ctx));
    }
    let one = w.one();
    if x.abs() > one {
        return Err(domain("hyp2f1", "series requires |x| <= 1"));
    }
    if x == one {
        let excess = &c - &a - &b;
        if !(excess > w.zero()) {
            return Err(domain("hyp2f1", "divergent at x = 1 unless c - a - b > 0"));
        }
        let v = gamma(&c, w)? * gamma(&excess, w)? * rgamma(&(&c - &a), w) * rgamma(&(&c - &b), w);
        return Ok(v.to_ctx(ctx));
    }
    if x < w.ratio(-1, 2) {
        // Pfaff: ₂F₁(a,b;c;x) = (1−x)^(−a) ₂F₁(a, c−b; c; x/(x−1))
        let y = &x / (&x - 1);
        let inner = hyp2f1(&a, &(&c - &b), &c, &y, w)?;
        let scale = ((&one - &x).ln() * -&a).exp();
        return Ok((scale * inner).to_ctx(ctx));
    }
    let tol = w.tol(-(GUARD as i32));
    let mut term = w.one();
    let mut acc = w.one();
    for s in 0..MAX_TERMS {
        let si = s as i64;
        term = term * (&a + si) * (&b + si) * &x / ((&c + si) * (si + 1));
        acc += &term;
        if term.abs().to_f64() <= tol * acc.abs().to_f64() {
            return Ok(acc.to_ctx(ctx));
        }
    }
    Err(Error::Convergence {
        function: "hyp2f1",
        iterations: MAX_TERMS,
    })
}

/// Incomplete beta function B(x; h, k) = ∫₀ˣ t^(h−1) (1−t)^(k−1) dt.
pub fn inc_beta(x: &BigReal, h: &BigReal, k: &BigReal, ctx: PrecisionCtx) -> Result<BigReal> {
    let zero = ctx.zero();
    let one = ctx.one();
    if x.is_negative() || x > &one {
        return Err(domain("inc_beta", "x must lie in [0, 1]"));
    }
    if !(h > &zero) {
        return Err(domain("inc_beta", "h must be positive"));
    }
    if x.is_zero() {
        return Ok(zero);
    }
    let w = ctx.widen(GUARD);
    let (x, h, k) = (x.to_ctx(w), h.to_ctx(w), k.to_ctx(w));
    let one_minus_k = w.one() - &k;
    let polynomial = nonpositive_integer(&one_minus_k).is_some();
    if !polynomial && x > w.ratio(1, 2) {
        if !(k > w.zero()) {
            return Err(domain("inc_beta", "k must be positive when x > 1/2"));
        }
        let full = beta(&h, &k, w)?;
        if x == w.one() {
            return Ok(full.to_ctx(ctx));
        }
        let rest = inc_beta(&(w.one() - &x), &k, &h, w)?;
        return Ok((full - rest).to_ctx(ctx));
    }
    // B(x; h, k) = x^h / h · ₂F₁(h, 1−k; h+1; x)
    let f = hyp2f1(&h, &one_minus_k, &(&h + 1), &x, w)?;
    let v = (x.ln() * &h).exp() / &h * f;
    Ok(v.to_ctx(ctx))
}

/// Regularized ₂F̃₃(a₁, a₂; b₁, b₂, b₃; x).
///
/// Terms are formed with 1/Γ(b + s), so nonpositive-integer b are allowed.
/// For negative x the series alternates; when the largest partial term
/// exceeds the result by more than the guard digits the sum is redone at a
/// precision widened by the observed cancellation.
pub fn reg_hyp2f3(
    a1: &BigReal,
    a2: &BigReal,
    b: [&BigReal; 3],
    x: &BigReal,
    ctx: PrecisionCtx,
) -> Result<BigReal> {
    let mut extra = 8u32;
    loop {
        let w = ctx.widen(extra);
        let (sum, peak) = reg_hyp2f3_series(a1, a2, b, x, w)?;
        let lost = if sum.is_zero() {
            f64::INFINITY
        } else {
            (peak / sum.abs().to_f64()).log10().max(0.0)
        };
        if lost + 4.0 <= extra as f64 || extra > 4 * ctx.digits() + 200 {
            return Ok(sum.to_ctx(ctx));
        }
        extra = (lost.ceil() as u32 + 8).max(extra * 2);
    }
}

fn reg_hyp2f3_series(
    a1: &BigReal,
    a2: &BigReal,
    b: [&BigReal; 3],
    x: &BigReal,
    w: PrecisionCtx,
) -> Result<(BigReal, f64)> {
    let a1 = a1.to_ctx(w);
    let a2 = a2.to_ctx(w);
    let b = b.map(|v| v.to_ctx(w));
    let x = x.to_ctx(w);
    // First index at which every 1/Γ(b + s) is nonzero.
    let s0 = b
        .iter()
        .filter_map(|bi| nonpositive_integer(bi).map(|m| m + 1))
        .max()
        .unwrap_or(0);
    if x.is_zero() {
        let v = if s0 == 0 {
            b.iter().fold(w.one(), |acc, bi| acc * rgamma(bi, w))
        } else {
            w.zero()
        };
        let peak = v.abs().to_f64();
        return Ok((v, peak));
    }
    let s0i = s0 as i64;
    let mut term = super::combinatorics::pochhammer(&a1, s0 as u32)
        * super::combinatorics::pochhammer(&a2, s0 as u32)
        * x.powi(s0 as i32)
        / super::combinatorics::factorial(s0, w);
    for bi in &b {
        term *= rgamma(&(bi + s0i), w);
    }
    let mut acc = term.clone();
    let mut peak = term.abs().to_f64();
    let tol = w.tol(0);
    let mut small_run = 0;
    for s in s0i..s0i + MAX_TERMS as i64 {
        term = term * (&a1 + s) * (&a2 + s) * &x
            / ((&b[0] + s) * (&b[1] + s) * (&b[2] + s) * (s + 1));
        acc += &term;
        let t = term.abs().to_f64();
        peak = peak.max(t);
        if term.is_zero() {
            return Ok((acc, peak));
        }
        // Two consecutive small terms guard against a vanishing numerator
        // factor passing through zero only once.
        if t <= tol * acc.abs().to_f64() {
            small_run += 1;
            if small_run >= 2 {
                return Ok((acc, peak));
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Convergence {
        function: "reg_hyp2f3",
        iterations: MAX_TERMS,
    })
}
