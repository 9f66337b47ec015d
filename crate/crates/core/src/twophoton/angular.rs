//! Wigner 3j and 6j symbols with exact rational arithmetic. Angular momenta
//! are passed doubled so half-integers stay integral.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dirac::AngularKappa;
use crate::specfun::{factorial_exact, rational_to_real, BigReal, PrecisionCtx};

fn fact(two_n: i64) -> Option<BigInt> {
    if two_n < 0 || two_n % 2 != 0 {
        return None;
    }
    Some(BigInt::from(factorial_exact((two_n / 2) as u64)))
}

/// Δ(abc)² as a rational, or None if the triangle rule fails.
fn triangle(a: i64, b: i64, c: i64) -> Option<BigRational> {
    let num = fact(a + b - c)? * fact(a - b + c)? * fact(-a + b + c)?;
    let den = fact(a + b + c + 2)?;
    Some(BigRational::new(num, den))
}

fn signed_sqrt(sign_negative: bool, square: BigRational, sum: BigRational, ctx: PrecisionCtx) -> BigReal {
    let root = rational_to_real(&square, ctx.widen(4)).sqrt();
    let v = (root * rational_to_real(&sum, ctx.widen(4))).to_ctx(ctx);
    if sign_negative {
        -v
    } else {
        v
    }
}

/// (j1 j2 j3; m1 m2 m3), all arguments doubled.
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64, ctx: PrecisionCtx) -> BigReal {
    if m1 + m2 + m3 != 0 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return ctx.zero();
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0 {
        return ctx.zero();
    }
    let Some(delta) = triangle(j1, j2, j3) else {
        return ctx.zero();
    };
    let mut square = delta;
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        square *= BigRational::from_integer(fact(j + m).unwrap() * fact(j - m).unwrap());
    }
    let mut sum = BigRational::zero();
    let mut k = 0i64;
    loop {
        let parts = [
            k,
            j3 - j2 + k + m1,
            j3 - j1 + k - m2,
            j1 + j2 - j3 - k,
            j1 - k - m1,
            j2 - k + m2,
        ];
        if parts[3] < 0 || parts[4] < 0 || parts[5] < 0 {
            break;
        }
        if parts.iter().all(|&p| p >= 0) {
            let den: BigInt = parts.iter().map(|&p| fact(p).unwrap()).product();
            let term = BigRational::new(BigInt::one(), den);
            if (k / 2) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        k += 2;
    }
    let phase = (j1 - j2 - m3) / 2;
    signed_sqrt(phase.rem_euclid(2) == 1, square, sum, ctx)
}

/// {j1 j2 j3; j4 j5 j6}, all arguments doubled.
pub fn wigner_6j(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64, ctx: PrecisionCtx) -> BigReal {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    let mut square = BigRational::one();
    for &(a, b, c) in &triads {
        match triangle(a, b, c) {
            Some(d) => square *= d,
            None => return ctx.zero(),
        }
    }
    let a = triads.map(|(x, y, z)| x + y + z);
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let lo = *a.iter().max().unwrap();
    let hi = *b.iter().min().unwrap();
    let mut sum = BigRational::zero();
    let mut t = lo;
    while t <= hi {
        let mut den = BigInt::one();
        for &ai in &a {
            den *= fact(t - ai).unwrap();
        }
        for &bi in &b {
            den *= fact(bi - t).unwrap();
        }
        let term = BigRational::new(fact(t + 2).unwrap(), den);
        if (t / 2) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        t += 2;
    }
    signed_sqrt(false, square, sum, ctx)
}

/// ⟨κ_b‖C_L‖κ_a⟩ for normalized spherical tensors C_L; the large-component
/// orbital momenta fix the parity rule.
pub fn reduced_c(kb: AngularKappa, ka: AngularKappa, l: u32, ctx: PrecisionCtx) -> BigReal {
    reduced_c_with(kb.l(), kb.two_j(), ka.l(), ka.two_j(), l, ctx)
}

pub(crate) fn reduced_c_with(lb: u32, two_jb: u32, la: u32, two_ja: u32, l: u32, ctx: PrecisionCtx) -> BigReal {
    if (lb + l + la) % 2 != 0 {
        return ctx.zero();
    }
    let (jb, ja) = (two_jb as i64, two_ja as i64);
    let three = wigner_3j(jb, 2 * l as i64, ja, 1, 0, -1, ctx);
    let mag = ctx.int((jb + 1) * (ja + 1)).sqrt() * three;
    // (−1)^(j_b + 1/2)
    if ((jb + 1) / 2) % 2 == 1 {
        -mag
    } else {
        mag
    }
}
