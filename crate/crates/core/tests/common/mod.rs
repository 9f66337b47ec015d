#![allow(dead_code)]

use bpdirac::{BigReal, PrecisionCtx};

/// Double-exponential (tanh-sinh) quadrature of a vector-valued integrand on
/// [a, b], refined by halving the step until every component settles.
pub fn tanh_sinh(f: &dyn Fn(&BigReal) -> Vec<BigReal>, a: &BigReal, b: &BigReal, ctx: PrecisionCtx) -> Vec<BigReal> {
    let half_pi = ctx.pi() / 2;
    let width = (b - a).to_ctx(ctx);
    let a = a.to_ctx(ctx);
    let t_max = (((ctx.digits() as f64 + 6.0) * std::f64::consts::LN_10 + 10.0) / std::f64::consts::PI).asinh();

    let contribution = |t: &BigReal| -> Option<(BigReal, BigReal)> {
        let u = &half_pi * ((t.exp() - (-t).exp()) / 2);
        let e2u = (&u * 2).exp();
        // (1 + x)/2 = e^{2u}/(1 + e^{2u}); dx/dt = (π/2) cosh t sech²u
        let lo = &e2u / (ctx.one() + &e2u);
        let r = &a + &width * &lo;
        if !(r > a) || !(r < &a + &width) {
            return None;
        }
        let cosh_t = (t.exp() + (-t).exp()) / 2;
        let cosh_u = (u.exp() + (-&u).exp()) / 2;
        let w = &half_pi * cosh_t / (&cosh_u * &cosh_u) * &width / 2;
        Some((r, w))
    };

    let add = |acc: &mut Option<Vec<BigReal>>, t: &BigReal| {
        if let Some((r, w)) = contribution(t) {
            let vals = f(&r);
            match acc {
                None => *acc = Some(vals.iter().map(|v| v * &w).collect()),
                Some(s) => {
                    for (si, v) in s.iter_mut().zip(&vals) {
                        *si += v * &w;
                    }
                }
            }
        }
    };

    let mut h = ctx.ratio(1, 2);
    let mut raw: Option<Vec<BigReal>> = None;
    let steps = (t_max / 0.5).ceil() as i64;
    for m in -steps..=steps {
        add(&mut raw, &(&h * m));
    }
    let mut prev: Vec<BigReal> = raw.clone().unwrap().iter().map(|v| v * &h).collect();
    for _level in 0..9 {
        // Odd multiples of the new step fill in between the old nodes.
        let new_h = &h / 2;
        let steps = (t_max / new_h.to_f64()).ceil() as i64;
        let mut m = -steps;
        if m % 2 == 0 {
            m += 1;
        }
        while m <= steps {
            add(&mut raw, &(&new_h * m));
            m += 2;
        }
        h = new_h;
        let cur: Vec<BigReal> = raw.clone().unwrap().iter().map(|v| v * &h).collect();
        let scale = cur.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max);
        let change = cur
            .iter()
            .zip(&prev)
            .map(|(x, y)| (x - y).abs().to_f64())
            .fold(0.0, f64::max);
        prev = cur;
        if change <= scale * ctx.tol(-3) {
            break;
        }
    }
    prev
}

pub fn rel_err(a: &BigReal, b: &BigReal) -> f64 {
    if b.is_zero() {
        a.abs().to_f64()
    } else {
        ((a - b) / b).abs().to_f64()
    }
}

/// Bernstein basis evaluated directly, kept apart from the library.
pub fn bernstein(k: usize, radius: &BigReal, r: &BigReal) -> Vec<BigReal> {
    let t = r / radius;
    let s = t.lift(1) - &t;
    let mut out = Vec::with_capacity(k + 1);
    let mut binom = t.lift(1);
    for i in 0..=k {
        if i > 0 {
            binom = binom * ((k - i + 1) as i64) / (i as i64);
        }
        out.push(&binom * t.powi(i as i32) * s.powi((k - i) as i32));
    }
    out
}
