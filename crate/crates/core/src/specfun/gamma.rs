use std::cell::RefCell;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::combinatorics::{factorial, factorial_exact, rational_to_real};
use super::{BigReal, PrecisionCtx};
use crate::error::{Error, Result};

const GUARD: u32 = 10;

thread_local! {
    // B_0, B_2, B_4, ... (even-index Bernoulli numbers).
    static BERNOULLI_EVEN: RefCell<Vec<BigRational>> = const { RefCell::new(Vec::new()) };
}

/// Even Bernoulli number B_{2m}, via the Akiyama–Tanigawa table.
fn bernoulli_even(m: usize) -> BigRational {
    BERNOULLI_EVEN.with(|cache| {
        let mut cache = cache.borrow_mut();
        if cache.len() <= m {
            let top = 2 * m.max(16);
            let mut row: Vec<BigRational> = Vec::with_capacity(top + 1);
            let mut all = Vec::with_capacity(top + 1);
            for n in 0..=top {
                row.push(BigRational::new(BigInt::one(), BigInt::from(n + 1)));
                for j in (1..=n).rev() {
                    let diff = &row[j - 1] - &row[j];
                    row[j - 1] = diff * BigInt::from(j);
                }
                all.push(row[0].clone());
            }
            *cache = all.into_iter().step_by(2).collect();
        }
        cache[m].clone()
    })
}

fn half_integer_gamma(twice: i64, ctx: PrecisionCtx) -> BigReal {
    // x = twice/2 with `twice` odd.
    let sqrt_pi = ctx.pi().sqrt();
    if twice > 0 {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let n = ((twice - 1) / 2) as u64;
        let num = BigRational::new(
            BigInt::from(factorial_exact(2 * n)),
            BigInt::from(factorial_exact(n)) * BigInt::from(4u8).pow(n as u32),
        );
        rational_to_real(&num, ctx) * sqrt_pi
    } else {
        // Γ(1/2 − n) = (−4)^n n! √π / (2n)!
        let n = ((1 - twice) / 2) as u64;
        let num = BigRational::new(
            BigInt::from(-4).pow(n as u32) * BigInt::from(factorial_exact(n)),
            BigInt::from(factorial_exact(2 * n)),
        );
        rational_to_real(&num, ctx) * sqrt_pi
    }
}

/// ln Γ(x) for x large enough that the Stirling series reaches `ctx` precision.
fn ln_gamma_stirling(x: &BigReal, ctx: PrecisionCtx) -> BigReal {
    let two_pi = ctx.pi() * 2;
    let half = ctx.ratio(1, 2);
    let mut acc = (x - &half) * x.ln() - x + two_pi.ln() * &half;
    let x2 = x * x;
    let mut xpow = x.clone();
    let tol = ctx.tol(0);
    for m in 1..400usize {
        let b = rational_to_real(&bernoulli_even(m), ctx);
        let denom = &xpow * ((2 * m * (2 * m - 1)) as i64);
        let term = b / denom;
        acc += &term;
        if term.abs().to_f64() < tol * acc.abs().to_f64().max(1e-300) {
            break;
        }
        xpow = xpow * &x2;
    }
    acc
}

fn pole(x: &BigReal) -> Error {
    Error::Pole {
        function: "gamma",
        at: x.to_f64(),
    }
}

/// Γ(x). Integers and half-integers are exact up to the final rounding.
pub fn gamma(x: &BigReal, ctx: PrecisionCtx) -> Result<BigReal> {
    if x.is_integer() {
        if !(x > &x.lift(0)) {
            return Err(pole(x));
        }
        let n = x.to_f64();
        if n <= 3000.0 {
            return Ok(factorial(n as u64 - 1, ctx));
        }
    }
    let twice = x * 2;
    if twice.is_integer() && twice.to_f64().abs() <= 6000.0 {
        return Ok(half_integer_gamma(twice.to_f64() as i64, ctx));
    }
    let w = ctx.widen(GUARD);
    let xw = x.to_ctx(w);
    let half = w.ratio(1, 2);
    if xw < half {
        // Γ(x) Γ(1 − x) = π / sin(πx)
        let pi = w.pi();
        let s = (&pi * &xw).sin();
        if s.is_zero() {
            return Err(pole(x));
        }
        let g = gamma(&(w.one() - &xw), w)?;
        return Ok((pi / (s * g)).to_ctx(ctx));
    }
    let target = 0.4 * w.digits() as f64 + 4.0;
    let mut shifted = xw.clone();
    let mut product = w.one();
    while shifted.to_f64() < target {
        product *= &shifted;
        shifted += w.one();
    }
    let g = ln_gamma_stirling(&shifted, w).exp() / product;
    Ok(g.to_ctx(ctx))
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: &BigReal, ctx: PrecisionCtx) -> BigReal {
    if x.is_integer() && !(x > &x.lift(0)) {
        return ctx.zero();
    }
    match gamma(x, ctx) {
        Ok(g) => ctx.one() / g,
        Err(_) => ctx.zero(),
    }
}

/// Euler beta B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: &BigReal, b: &BigReal, ctx: PrecisionCtx) -> Result<BigReal> {
    let w = ctx.widen(4);
    let g = gamma(&a.to_ctx(w), w)? * gamma(&b.to_ctx(w), w)? * rgamma(&(a + b).to_ctx(w), w);
    Ok(g.to_ctx(ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &BigReal, b: &BigReal) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli_even(0), BigRational::one());
        assert_eq!(
            bernoulli_even(1),
            BigRational::new(BigInt::one(), BigInt::from(6))
        );
        assert_eq!(
            bernoulli_even(6),
            BigRational::new(BigInt::from(-691), BigInt::from(2730))
        );
        assert!(bernoulli_even(20) != BigRational::from_integer(BigInt::from(0)));
    }

    #[test]
    fn exact_points() {
        let ctx = PrecisionCtx::QUAD;
        assert_eq!(gamma(&ctx.int(1), ctx).unwrap().to_f64(), 1.0);
        assert_eq!(gamma(&ctx.int(5), ctx).unwrap().to_f64(), 24.0);
        let g = gamma(&ctx.ratio(1, 2), ctx).unwrap();
        assert!(rel(&g, &ctx.pi().sqrt()) < 1e-33);
        let g = gamma(&ctx.ratio(-3, 2), ctx).unwrap();
        assert!(rel(&g, &(ctx.pi().sqrt() * ctx.ratio(4, 3))) < 1e-33);
    }

    #[test]
    fn poles() {
        let ctx = PrecisionCtx::QUAD;
        for n in [0, -1, -7] {
            assert!(matches!(gamma(&ctx.int(n), ctx), Err(Error::Pole { .. })));
            assert!(rgamma(&ctx.int(n), ctx).is_zero());
        }
    }

    #[test]
    fn generic_argument_matches_recurrence_and_reflection() {
        let ctx = PrecisionCtx::QUAD;
        let x = ctx.ratio(13, 7);
        let g = gamma(&x, ctx).unwrap();
        let g1 = gamma(&(&x + 1), ctx).unwrap();
        assert!(rel(&g1, &(&g * &x)) < 1e-32);
        // Γ(x)Γ(1−x) = π/sin(πx)
        let y = ctx.ratio(1, 3);
        let lhs = gamma(&y, ctx).unwrap() * gamma(&(ctx.one() - &y), ctx).unwrap();
        let rhs = ctx.pi() / (ctx.pi() * &y).sin();
        assert!(rel(&lhs, &rhs) < 1e-32);
        // Γ(1/3) = 2.678938534707747633...
        let lit = ctx.parse("2.6789385347077476336556929409746776").unwrap();
        assert!(rel(&gamma(&y, ctx).unwrap(), &lit) < 1e-33);
    }

    #[test]
    fn double_context() {
        let ctx = PrecisionCtx::DOUBLE;
        let g = gamma(&ctx.real(2.5), ctx).unwrap().to_f64();
        assert!((g - 1.329_340_388_179_137).abs() < 1e-15);
        let g = gamma(&ctx.real(0.3), ctx).unwrap().to_f64();
        assert!((g - 2.991_568_987_687_591).abs() < 1e-14);
    }
}
