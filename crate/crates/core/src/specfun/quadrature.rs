use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::{BigReal, PrecisionCtx};

const GUARD: u32 = 6;

type Rule = Rc<Vec<(BigReal, BigReal)>>;

thread_local! {
    static RULES: RefCell<HashMap<(usize, u32), Rule>> = RefCell::new(HashMap::new());
}

/// P_n(x) and P_n′(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: &BigReal) -> (BigReal, BigReal) {
    let mut p0 = x.lift(1);
    let mut p1 = x.clone();
    for m in 2..=n as i64 {
        let p2 = (x * &p1 * (2 * m - 1) - &p0 * (m - 1)) / m;
        p0 = p1;
        p1 = p2;
    }
    let one = x.lift(1);
    let dp = (x * &p1 - &p0) * (n as i64) / (x * x - one);
    (p1, dp)
}

fn compute_rule(n: usize, ctx: PrecisionCtx) -> Vec<(BigReal, BigReal)> {
    let w = ctx.widen(GUARD);
    let tol = w.tol(2);
    let mut half = Vec::with_capacity(n.div_ceil(2));
    for i in 0..n / 2 {
        // Positive roots, largest first, from the classical asymptotic guess.
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = w.real(guess);
        let mut dp = w.one();
        for _ in 0..200 {
            let (p, d) = legendre_with_derivative(n, &x);
            let step = &p / &d;
            x -= &step;
            dp = d;
            if step.abs().to_f64() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, &x);
        dp = if d.is_finite() { d } else { dp };
        let weight = w.int(2) / ((w.one() - &x * &x) * &dp * &dp);
        half.push((x, weight));
    }
    let mut rule = Vec::with_capacity(n);
    for (x, wt) in &half {
        rule.push((-x.to_ctx(ctx), wt.to_ctx(ctx)));
    }
    if n % 2 == 1 {
        // Central node; P_n′(0) follows from the derivative recurrence.
        let (_, d) = legendre_with_derivative(n, &w.zero());
        rule.push((ctx.zero(), (w.int(2) / (&d * &d)).to_ctx(ctx)));
    }
    for (x, wt) in half.iter().rev() {
        rule.push((x.to_ctx(ctx), wt.to_ctx(ctx)));
    }
    rule
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending by node.
pub fn gauss_legendre_nodes(n: usize, ctx: PrecisionCtx) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    RULES.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, ctx.digits()))
            .or_insert_with(|| Rc::new(compute_rule(n, ctx)))
            .clone()
    })
}

/// The n-point rule mapped onto [a, b].
pub fn gauss_legendre_on(a: &BigReal, b: &BigReal, n: usize, ctx: PrecisionCtx) -> Vec<(BigReal, BigReal)> {
    let half = (b - a) / 2;
    let mid = (a + b) / 2;
    gauss_legendre_nodes(n, ctx)
        .iter()
        .map(|(x, w)| (&mid + &half * x, &half * w))
        .collect()
}
