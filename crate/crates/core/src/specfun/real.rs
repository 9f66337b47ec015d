//! Extended-precision reals.
//!
//! [`BigReal`] is either a native `f64` (for contexts of 16 digits or fewer)
//! or an `astro-float` number carrying its own binary precision. Binary
//! operations run at the larger precision of their operands, so values built
//! from one [`PrecisionCtx`] stay at that precision throughout a computation.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Largest digit count served by native double arithmetic.
pub const NATIVE_DIGITS: u32 = 16;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision, in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrecisionCtx {
    digits: u32,
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        Self::QUAD
    }
}

impl TryFrom<u32> for PrecisionCtx {
    type Error = Error;
    fn try_from(digits: u32) -> Result<Self> {
        Self::new(digits)
    }
}

impl From<PrecisionCtx> for u32 {
    fn from(ctx: PrecisionCtx) -> u32 {
        ctx.digits
    }
}

impl PrecisionCtx {
    /// IEEE double.
    pub const DOUBLE: PrecisionCtx = PrecisionCtx { digits: 16 };
    /// Quadruple (binary128-like) precision.
    pub const QUAD: PrecisionCtx = PrecisionCtx { digits: 34 };

    pub fn new(digits: u32) -> Result<Self> {
        if digits < NATIVE_DIGITS {
            return Err(domain(
                "PrecisionCtx::new",
                format!("at least {NATIVE_DIGITS} digits required, got {digits}"),
            ));
        }
        Ok(Self { digits })
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn is_native(self) -> bool {
        self.digits <= NATIVE_DIGITS
    }

    /// Binary mantissa length used for multi-precision values.
    pub fn bits(self) -> usize {
        if self.is_native() {
            53
        } else {
            let raw = (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as usize;
            raw.div_ceil(WORD_BIT_SIZE) * WORD_BIT_SIZE
        }
    }

    /// Significant decimal digits that reproduce every value of this
    /// precision exactly when parsed back.
    pub fn round_trip_digits(self) -> usize {
        if self.is_native() {
            17
        } else {
            (self.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
        }
    }

    /// Context with `extra` guard digits.
    pub fn widen(self, extra: u32) -> Self {
        Self {
            digits: self.digits + extra,
        }
    }

    /// `10^(offset - digits)`, the tolerance unit used throughout the crate.
    pub fn tol(self, offset: i32) -> f64 {
        10f64.powi(offset - self.digits as i32)
    }

    pub fn zero(self) -> BigReal {
        self.int(0)
    }

    pub fn one(self) -> BigReal {
        self.int(1)
    }

    pub fn int(self, n: i64) -> BigReal {
        if self.is_native() {
            BigReal(Repr::Native(n as f64))
        } else {
            BigReal(Repr::Multi(BigFloat::from_i64(n, self.bits()), self.bits()))
        }
    }

    pub fn uint(self, n: u128) -> BigReal {
        if self.is_native() {
            BigReal(Repr::Native(n as f64))
        } else {
            BigReal(Repr::Multi(BigFloat::from_u128(n, self.bits()), self.bits()))
        }
    }

    /// Exact conversion of a double (binary fractions only; `0.1` is not 1/10).
    pub fn real(self, x: f64) -> BigReal {
        if self.is_native() {
            BigReal(Repr::Native(x))
        } else {
            BigReal(Repr::Multi(BigFloat::from_f64(x, self.bits()), self.bits()))
        }
    }

    pub fn ratio(self, num: i64, den: i64) -> BigReal {
        self.int(num) / self.int(den)
    }

    pub fn pi(self) -> BigReal {
        if self.is_native() {
            BigReal(Repr::Native(std::f64::consts::PI))
        } else {
            let p = self.bits();
            BigReal(Repr::Multi(with_consts(|cc| cc.pi(p, RM)), p))
        }
    }

    /// Parses a decimal literal such as `137.0359895` or `-2.5e-3`.
    pub fn parse(self, s: &str) -> Result<BigReal> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse(s.to_owned()));
        }
        if self.is_native() {
            t.parse::<f64>()
                .map(|x| BigReal(Repr::Native(x)))
                .map_err(|_| Error::Parse(s.to_owned()))
        } else {
            let p = self.bits();
            super::decimal::parse(t, p)
                .map(|v| BigReal(Repr::Multi(v, p)))
                .ok_or_else(|| Error::Parse(s.to_owned()))
        }
    }
}

#[derive(Clone)]
enum Repr {
    Native(f64),
    /// Value and its nominal precision in bits (astro-float reports 0 for zero).
    Multi(BigFloat, usize),
}

/// A real number at the precision of the context that created it.
#[derive(Clone)]
pub struct BigReal(Repr);

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

fn big_to_f64(b: &BigFloat) -> f64 {
    if b.is_nan() {
        return f64::NAN;
    }
    if b.is_inf_pos() {
        return f64::INFINITY;
    }
    if b.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if b.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = b.as_raw_parts() else {
        return f64::NAN;
    };
    let w = WORD_BIT_SIZE as i64;
    let mut frac = 0.0;
    let mut scale = -w;
    for word in words.iter().rev().take(128 / WORD_BIT_SIZE + 1) {
        frac += ldexp(*word as f64, scale);
        scale -= w;
    }
    let v = ldexp(frac, exp as i64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

impl BigReal {
    fn binop(
        &self,
        rhs: &BigReal,
        native: fn(f64, f64) -> f64,
        multi: fn(&BigFloat, &BigFloat, usize, RoundingMode) -> BigFloat,
    ) -> BigReal {
        use Repr::*;
        BigReal(match (&self.0, &rhs.0) {
            (Native(a), Native(b)) => Native(native(*a, *b)),
            (Multi(a, pa), Multi(b, pb)) => {
                let p = (*pa).max(*pb);
                Multi(multi(a, b, p, RM), p)
            }
            (Native(a), Multi(b, p)) => Multi(multi(&BigFloat::from_f64(*a, *p), b, *p, RM), *p),
            (Multi(a, p), Native(b)) => Multi(multi(a, &BigFloat::from_f64(*b, *p), *p, RM), *p),
        })
    }

    /// The context matching this value's precision.
    pub fn ctx(&self) -> PrecisionCtx {
        match &self.0 {
            Repr::Native(_) => PrecisionCtx::DOUBLE,
            Repr::Multi(_, p) => PrecisionCtx {
                digits: ((*p as f64) / std::f64::consts::LOG2_10).floor() as u32,
            },
        }
    }

    /// Integer constant at this value's precision.
    pub fn lift(&self, n: i64) -> BigReal {
        match &self.0 {
            Repr::Native(_) => BigReal(Repr::Native(n as f64)),
            Repr::Multi(_, p) => BigReal(Repr::Multi(BigFloat::from_i64(n, *p), *p)),
        }
    }

    /// A double, converted exactly at this value's precision.
    pub fn lift_f64(&self, x: f64) -> BigReal {
        match &self.0 {
            Repr::Native(_) => BigReal(Repr::Native(x)),
            Repr::Multi(_, p) => BigReal(Repr::Multi(BigFloat::from_f64(x, *p), *p)),
        }
    }

    /// Re-rounds to the precision of `ctx`.
    pub fn to_ctx(&self, ctx: PrecisionCtx) -> BigReal {
        match (&self.0, ctx.is_native()) {
            (Repr::Native(x), _) => ctx.real(*x),
            (Repr::Multi(b, _), true) => BigReal(Repr::Native(big_to_f64(b))),
            (Repr::Multi(b, _), false) => {
                let mut c = b.clone();
                // Precision is a word multiple, so this only fails for NaN/Inf.
                let _ = c.set_precision(ctx.bits(), RM);
                BigReal(Repr::Multi(c, ctx.bits()))
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Native(x) => *x,
            Repr::Multi(b, _) => big_to_f64(b),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Native(x) => *x == 0.0,
            Repr::Multi(b, _) => b.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Native(x) => *x < 0.0,
            Repr::Multi(b, _) => b.is_negative() && !b.is_zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.0 {
            Repr::Native(x) => x.is_finite(),
            Repr::Multi(b, _) => !(b.is_nan() || b.is_inf()),
        }
    }

    /// True when the value is an exact integer.
    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Native(x) => x.fract() == 0.0,
            Repr::Multi(b, _) => b.is_zero() || b.is_int(),
        }
    }

    pub fn abs(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.abs())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(b.abs(), *p)),
        }
    }

    pub fn sqrt(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.sqrt())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(b.sqrt(*p, RM), *p)),
        }
    }

    pub fn exp(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.exp())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(with_consts(|cc| b.exp(*p, RM, cc)), *p)),
        }
    }

    pub fn ln(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.ln())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(with_consts(|cc| b.ln(*p, RM, cc)), *p)),
        }
    }

    pub fn sin(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.sin())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(with_consts(|cc| b.sin(*p, RM, cc)), *p)),
        }
    }

    pub fn cos(&self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(x.cos())),
            Repr::Multi(b, p) => BigReal(Repr::Multi(with_consts(|cc| b.cos(*p, RM, cc)), *p)),
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i32) -> BigReal {
        let mut base = self.clone();
        let mut acc = self.lift(1);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            self.lift(1) / acc
        } else {
            acc
        }
    }

    pub fn max(self, other: BigReal) -> BigReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: BigReal) -> BigReal {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Decimal scientific notation with `sig` significant digits and an
    /// explicit signed exponent, e.g. `8.2290591586e+00`.
    pub fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        let (neg, digits, exp10) = match &self.0 {
            Repr::Native(x) => {
                if !x.is_finite() {
                    return format!("{x}");
                }
                if *x == 0.0 {
                    return zero_sci(sig);
                }
                let s = format!("{:.*e}", sig - 1, x.abs());
                let (m, e) = s.split_once('e').expect("exponent");
                let digits: String = m.chars().filter(|c| c.is_ascii_digit()).collect();
                (*x < 0.0, digits, e.parse::<i64>().expect("exponent"))
            }
            Repr::Multi(b, _) => {
                if b.is_nan() {
                    return "NaN".into();
                }
                if b.is_inf() {
                    return if b.is_inf_pos() { "inf".into() } else { "-inf".into() };
                }
                if b.is_zero() {
                    return zero_sci(sig);
                }
                match super::decimal::digits(b, sig) {
                    Some(parts) => parts,
                    None => return zero_sci(sig),
                }
            }
        };
        format_rounded(neg, &digits, exp10, sig)
    }
}

fn zero_sci(sig: usize) -> String {
    if sig == 1 {
        "0e+00".into()
    } else {
        format!("0.{}e+00", "0".repeat(sig - 1))
    }
}

fn format_rounded(neg: bool, digits: &str, mut exp10: i64, sig: usize) -> String {
    let mut d: Vec<u8> = digits.bytes().map(|c| c - b'0').collect();
    if d.len() > sig {
        let round_up = d[sig] >= 5;
        d.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    d.insert(0, 1);
                    d.truncate(sig);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if d[i] == 9 {
                    d[i] = 0;
                } else {
                    d[i] += 1;
                    break;
                }
            }
        }
    }
    d.resize(sig, 0);
    let mut out = String::with_capacity(sig + 8);
    if neg {
        out.push('-');
    }
    out.push((b'0' + d[0]) as char);
    if sig > 1 {
        out.push('.');
        out.extend(d[1..].iter().map(|x| (b'0' + x) as char));
    }
    let sign = if exp10 < 0 { '-' } else { '+' };
    out.push_str(&format!("e{sign}{:02}", exp10.abs()));
    out
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(self.ctx().digits() as usize))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.ctx().digits() as usize);
        f.write_str(&self.to_sci(sig))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Repr::*;
        let c = match (&self.0, &other.0) {
            (Native(a), Native(b)) => return a.partial_cmp(b),
            (Multi(a, _), Multi(b, _)) => a.cmp(b),
            (Native(a), Multi(b, p)) => BigFloat::from_f64(*a, *p).cmp(b),
            (Multi(a, p), Native(b)) => a.cmp(&BigFloat::from_f64(*b, *p)),
        }?;
        Some(c.cmp(&0))
    }
}

macro_rules! bin_ops {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $nat:expr, $big:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                self.binop(rhs, $nat, BigFloat::$big)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.binop(&rhs, $nat, BigFloat::$big)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                self.binop(rhs, $nat, BigFloat::$big)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.binop(&rhs, $nat, BigFloat::$big)
            }
        }
        impl $tr<i64> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: i64) -> BigReal {
                self.binop(&self.lift(rhs), $nat, BigFloat::$big)
            }
        }
        impl $tr<i64> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: i64) -> BigReal {
                self.binop(&self.lift(rhs), $nat, BigFloat::$big)
            }
        }
        impl $atr<&BigReal> for BigReal {
            fn $am(&mut self, rhs: &BigReal) {
                *self = self.binop(rhs, $nat, BigFloat::$big);
            }
        }
        impl $atr<BigReal> for BigReal {
            fn $am(&mut self, rhs: BigReal) {
                *self = self.binop(&rhs, $nat, BigFloat::$big);
            }
        }
    };
}

bin_ops!(Add, add, AddAssign, add_assign, |a, b| a + b, add);
bin_ops!(Sub, sub, SubAssign, sub_assign, |a, b| a - b, sub);
bin_ops!(Mul, mul, MulAssign, mul_assign, |a, b| a * b, mul);
bin_ops!(Div, div, DivAssign, div_assign, |a, b| a / b, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        match &self.0 {
            Repr::Native(x) => BigReal(Repr::Native(-x)),
            Repr::Multi(b, p) => BigReal(Repr::Multi(b.neg(), *p)),
        }
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

/// Sum of a non-empty sequence; `None` for an empty one.
pub fn sum<'a>(mut it: impl Iterator<Item = &'a BigReal>) -> Option<BigReal> {
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, x| acc + x))
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[BigReal], b: &[BigReal]) -> BigReal {
    debug_assert_eq!(a.len(), b.len());
    let mut it = a.iter().zip(b);
    let Some((x0, y0)) = it.next() else {
        return b.first().map_or(PrecisionCtx::DOUBLE.zero(), |v| v.lift(0));
    };
    it.fold(x0 * y0, |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_follow_digits() {
        assert_eq!(PrecisionCtx::DOUBLE.bits(), 53);
        assert!(PrecisionCtx::QUAD.bits() >= 113);
        assert!(PrecisionCtx::new(15).is_err());
    }

    #[test]
    fn third_is_accurate_to_context() {
        for digits in [16, 20, 34, 50] {
            let ctx = PrecisionCtx::new(digits).unwrap();
            let third = ctx.ratio(1, 3);
            let err = (&third * 3 - ctx.one()).abs().to_f64();
            assert!(err <= ctx.tol(1), "digits {digits}: {err:e}");
        }
    }

    #[test]
    fn sci_formatting() {
        let ctx = PrecisionCtx::QUAD;
        assert_eq!(ctx.ratio(1, 3).to_sci(5), "3.3333e-01");
        assert_eq!(ctx.ratio(2, 3).to_sci(3), "6.67e-01");
        assert_eq!(ctx.real(9.9999).to_sci(3), "1.00e+01");
        assert_eq!(ctx.int(-1234).to_sci(2), "-1.2e+03");
        assert_eq!(ctx.zero().to_sci(3), "0.00e+00");
        assert_eq!(PrecisionCtx::DOUBLE.real(0.015625).to_sci(4), "1.562e-02");
        assert_eq!(PrecisionCtx::DOUBLE.int(250).to_sci(2), "2.5e+02");
    }

    #[test]
    fn parse_and_print_round_trip() {
        let ctx = PrecisionCtx::QUAD;
        let c = ctx.parse("137.0359895").unwrap();
        assert_eq!(c.to_sci(10), "1.370359895e+02");
        let back = ctx.parse(&c.to_sci(ctx.digits() as usize + 4)).unwrap();
        assert!((back - &c).abs().to_f64() < 1e-33);
        assert!(ctx.parse("abc").is_err());
        assert!(ctx.parse("1.2.3").is_err());
        assert_eq!(ctx.parse("-0.5e1").unwrap().to_f64(), -5.0);
        assert_eq!(ctx.parse(".25").unwrap().to_f64(), 0.25);
    }

    #[test]
    fn long_expansions_are_exact() {
        // 2^-10 and 1/3 to 40 digits, beyond the mantissa's nominal digits
        let ctx = PrecisionCtx::QUAD;
        assert_eq!(ctx.ratio(1, 1024).to_sci(10), "9.765625000e-04");
        assert_eq!(ctx.ratio(1, 3).to_sci(12), "3.33333333333e-01");
        assert_eq!(ctx.real(0.1).to_sci(20), "1.0000000000000000555e-01");
        assert_eq!(ctx.int(999).to_sci(2), "1.0e+03");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for digits in [20, 34, 50] {
            let ctx = PrecisionCtx::new(digits).unwrap();
            for (n, d) in [(1, 3), (-22, 7), (355, 113), (1, 1_000_003)] {
                let x = { let r = ctx.ratio(n, d); if r.is_negative() { -r.abs().sqrt() } else { r.sqrt() } };
                let back = ctx.parse(&x.to_sci(ctx.round_trip_digits())).unwrap();
                assert!(back == x, "digits {digits}: {n}/{d}");
            }
        }
    }

    #[test]
    fn to_f64_matches() {
        let ctx = PrecisionCtx::QUAD;
        for x in [1.0, -2.5, 1e-300, 6.02e23, 0.1] {
            assert_eq!(ctx.real(x).to_f64(), x);
        }
        assert!((ctx.pi().to_f64() - std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn exact_zero_keeps_precision() {
        let ctx = PrecisionCtx::QUAD;
        let x = ctx.ratio(1, 3);
        let z = &x - &x;
        let third = (z + ctx.one()) / 3;
        assert!((third * 3 - ctx.one()).abs().to_f64() < 1e-34);
        assert!(!ctx.one().ln().exp().is_zero());
    }

    #[test]
    fn mixed_precision_promotes() {
        let q = PrecisionCtx::QUAD.ratio(1, 3);
        let d = PrecisionCtx::DOUBLE.int(3);
        let one = &q * &d;
        assert!((one - PrecisionCtx::QUAD.one()).abs().to_f64() < 1e-33);
    }

    #[test]
    fn transcendental_identities() {
        let ctx = PrecisionCtx::QUAD;
        let x = ctx.ratio(7, 5);
        let s = x.sin();
        let c = x.cos();
        let one = &s * &s + &c * &c;
        assert!((one - ctx.one()).abs().to_f64() < 1e-34);
        let e = x.exp().ln();
        assert!((e - &x).abs().to_f64() < 1e-34);
        assert_eq!(ctx.int(2).powi(-3).to_f64(), 0.125);
    }
}
