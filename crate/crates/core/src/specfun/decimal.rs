//! Correctly rounded conversion between binary floats and decimal strings.
//! astro-float's own conversions are accurate only to about the last digit,
//! which is not enough for dumps that must reload bit for bit.

use astro_float::{BigFloat, Sign, Word, WORD_BIT_SIZE};
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `(negative, m, k)` with `|b| = m · 2^k`, or None for zero, NaN and inf.
fn parts(b: &BigFloat) -> Option<(bool, BigUint, i64)> {
    let (words, _, sign, e, _) = b.as_raw_parts()?;
    let mut m = BigUint::zero();
    for &w in words.iter().rev() {
        m = (m << WORD_BIT_SIZE) + BigUint::from(w);
    }
    if m.is_zero() {
        return None;
    }
    Some((sign == Sign::Neg, m, e as i64 - (words.len() * WORD_BIT_SIZE) as i64))
}

fn pow10(n: u64) -> BigUint {
    BigUint::from(10u32).pow(n as u32)
}

/// Round-half-even quotient.
fn div_round(num: &BigUint, den: &BigUint) -> BigUint {
    let (q, r) = (num / den, num % den);
    let twice = r << 1;
    if twice > *den || (twice == *den && q.bit(0)) {
        q + 1u32
    } else {
        q
    }
}

/// `num / den` as numerator and denominator of `m·2^k·10^-s`, all integral.
fn scaled(m: &BigUint, k: i64, s: i64) -> (BigUint, BigUint) {
    let mut num = m.clone();
    let mut den = BigUint::one();
    if k >= 0 {
        num <<= k as u64;
    } else {
        den <<= (-k) as u64;
    }
    if s >= 0 {
        den *= pow10(s as u64);
    } else {
        num *= pow10((-s) as u64);
    }
    (num, den)
}

/// Sign, exactly rounded significant digits and decimal exponent of the
/// leading digit. None for zero and non-finite values.
pub(crate) fn digits(b: &BigFloat, sig: usize) -> Option<(bool, String, i64)> {
    let (neg, m, k) = parts(b)?;
    let bits = m.bits() as i64 + k;
    let mut e10 = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        let (num, den) = scaled(&m, k, e10 - sig as i64 + 1);
        let d = div_round(&num, &den);
        let lo = pow10(sig as u64 - 1);
        if d < lo {
            e10 -= 1;
            continue;
        }
        if d >= lo * 10u32 {
            // Either the exponent guess was low or rounding carried over.
            let (num, den) = scaled(&m, k, e10 + 1);
            if num >= den {
                e10 += 1;
                continue;
            }
            return Some((neg, format!("1{}", "0".repeat(sig - 1)), e10 + 1));
        }
        return Some((neg, d.to_str_radix(10), e10));
    }
}

/// Parses `[±]digits[.digits][e±exp]` to the nearest `p`-bit float.
pub(crate) fn parse(text: &str, p: usize) -> Option<BigFloat> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let m = BigUint::parse_bytes(all.as_bytes(), 10).unwrap_or_default();
    let sign = if neg { Sign::Neg } else { Sign::Pos };
    let words = p / WORD_BIT_SIZE;
    if m.is_zero() {
        let mut z = BigFloat::from_word(0, p);
        z.set_sign(sign);
        return Some(z);
    }
    let e10 = exp - frac_part.len() as i64;
    // value = m · 10^e10; find k with 2^(p−1) ≤ value / 2^k < 2^p
    let approx = m.bits() as f64 + e10 as f64 * std::f64::consts::LOG2_10;
    let mut k = approx.floor() as i64 - p as i64;
    let fraction = |k: i64| {
        let (mut num, mut den) = (m.clone(), BigUint::one());
        if e10 >= 0 {
            num *= pow10(e10 as u64);
        } else {
            den *= pow10((-e10) as u64);
        }
        if k >= 0 {
            den <<= k as u64;
        } else {
            num <<= (-k) as u64;
        }
        (num, den)
    };
    let q = loop {
        let (num, den) = fraction(k);
        let q = div_round(&num, &den);
        if q.bits() < p as u64 {
            k -= 1;
        } else if q.bits() > p as u64 {
            k += 1;
        } else {
            break q;
        }
    };
    let mut digits: Vec<Word> = q.to_u64_digits().into_iter().map(|d| d as Word).collect();
    digits.resize(words, 0);
    let e = k + p as i64;
    Some(BigFloat::from_raw_parts(&digits, p, sign, e as _, false))
}
