use super::combinatorics::double_factorial_odd;
use super::{BigReal, PrecisionCtx};

const GUARD: u32 = 10;

fn ascending_series(l: u32, x: &BigReal, w: PrecisionCtx) -> BigReal {
    // j_L(x) = x^L/(2L+1)!! Σ_s (−x²/2)^s / (s! (2L+3)(2L+5)···(2L+2s+1))
    let y = -(x * x) / 2;
    let mut term = w.one();
    let mut acc = w.one();
    let tol = w.tol(0);
    for s in 1..10_000i64 {
        term = term * &y / (s * (2 * l as i64 + 2 * s + 1));
        acc += &term;
        if term.abs().to_f64() <= tol * acc.abs().to_f64() {
            break;
        }
    }
    x.powi(l as i32) / double_factorial_odd(l as u64, w) * acc
}

/// Spherical Bessel function of the first kind j_L(x), x ≥ 0.
///
/// The ascending series is used for x < max(L, 1) and upward recurrence from
/// the closed forms of j₀, j₁ otherwise, both with guard digits.
pub fn sph_bessel_j(l: u32, x: &BigReal, ctx: PrecisionCtx) -> BigReal {
    if x.is_zero() {
        return if l == 0 { ctx.one() } else { ctx.zero() };
    }
    let xf = x.to_f64();
    let w = ctx.widen(GUARD);
    let xw = x.to_ctx(w);
    if xf < l.max(1) as f64 {
        return ascending_series(l, &xw, w).to_ctx(ctx);
    }
    let s = xw.sin();
    let c = xw.cos();
    let j0 = &s / &xw;
    if l == 0 {
        return j0.to_ctx(ctx);
    }
    let mut prev = j0;
    let mut cur = (&prev - c) / &xw;
    for m in 1..l {
        let next = &cur * (2 * m as i64 + 1) / &xw - &prev;
        prev = cur;
        cur = next;
    }
    cur.to_ctx(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        let ctx = PrecisionCtx::QUAD;
        assert_eq!(sph_bessel_j(0, &ctx.zero(), ctx).to_f64(), 1.0);
        for l in 1..5 {
            assert!(sph_bessel_j(l, &ctx.zero(), ctx).is_zero());
        }
    }

    #[test]
    fn j1_closed_form() {
        let ctx = PrecisionCtx::QUAD;
        let one = ctx.one();
        let v = sph_bessel_j(1, &one, ctx);
        let oracle = one.sin() - one.cos();
        assert!(((v - &oracle) / oracle).abs().to_f64() < 1e-33);
        assert!((sph_bessel_j(1, &one, ctx).to_f64() - 0.301_168_678_939_756_8).abs() < 1e-16);
    }

    #[test]
    fn regimes_agree_at_switch() {
        // Just below and above x = L the two methods must produce a smooth curve.
        let ctx = PrecisionCtx::QUAD;
        for l in [2u32, 5, 9] {
            let below = ctx.int(l as i64) - ctx.ratio(1, 1_000_000);
            let at = ctx.int(l as i64);
            let a = sph_bessel_j(l, &below, ctx);
            let b = sph_bessel_j(l, &at, ctx);
            assert!(((a - &b) / &b).abs().to_f64() < 1e-5, "L = {l}");
            // Series evaluated directly at x = L as an oracle.
            let w = ctx.widen(GUARD);
            let series = ascending_series(l, &at.to_ctx(w), w);
            assert!(((series - &b) / &b).abs().to_f64() < 1e-32, "L = {l}");
        }
    }
}
