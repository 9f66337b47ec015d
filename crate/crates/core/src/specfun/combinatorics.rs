use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BigReal, PrecisionCtx};

/// n! as an exact integer.
pub fn factorial_exact(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for m in 2..=n {
        acc *= m;
    }
    acc
}

/// C(n, k) as an exact integer; zero outside 0 ≤ k ≤ n.
pub fn binomial_exact(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for m in 0..k {
        acc *= n - m;
        acc /= m + 1;
    }
    acc
}

pub fn biguint_to_real(v: &BigUint, ctx: PrecisionCtx) -> BigReal {
    match v.to_u128() {
        Some(small) => ctx.uint(small),
        None => ctx
            .parse(&v.to_str_radix(10))
            .expect("decimal integer always parses"),
    }
}

pub fn rational_to_real(q: &BigRational, ctx: PrecisionCtx) -> BigReal {
    let num = biguint_to_real(q.numer().magnitude(), ctx);
    let den = biguint_to_real(q.denom().magnitude(), ctx);
    let v = num / den;
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// Binomial coefficient n!/(k!(n−k)!); zero for k < 0 or k > n.
pub fn binomial(n: u64, k: i64, ctx: PrecisionCtx) -> BigReal {
    if k < 0 || k as u64 > n {
        return ctx.zero();
    }
    biguint_to_real(&binomial_exact(n, k), ctx)
}

pub fn factorial(n: u64, ctx: PrecisionCtx) -> BigReal {
    biguint_to_real(&factorial_exact(n), ctx)
}

/// (2n+1)!! = 1·3·5···(2n+1); `double_factorial_odd(0) = 1`.
pub fn double_factorial_odd(n: u64, ctx: PrecisionCtx) -> BigReal {
    let mut acc = BigUint::one();
    for m in 1..=n {
        acc *= 2 * m + 1;
    }
    biguint_to_real(&acc, ctx)
}

/// Rising factorial a(a+1)···(a+s−1).
pub fn pochhammer(a: &BigReal, s: u32) -> BigReal {
    let mut acc = a.lift(1);
    let mut t = a.clone();
    for _ in 0..s {
        acc *= &t;
        t += a.lift(1);
    }
    acc
}
