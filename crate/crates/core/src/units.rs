//! Physical constants in atomic units.

use crate::specfun::{BigReal, PrecisionCtx};

/// Speed of light in atomic units, as a decimal literal.
pub const SPEED_OF_LIGHT: &str = "137.0359895";

/// Atomic unit of time in seconds.
pub const AU_TIME_SECONDS: f64 = 2.418884326505e-17;

pub fn speed_of_light(ctx: PrecisionCtx) -> BigReal {
    ctx.parse(SPEED_OF_LIGHT).expect("literal parses")
}

/// Converts a rate in inverse atomic time units to s⁻¹.
pub fn per_second(rate_au: &BigReal) -> BigReal {
    rate_au / rate_au.ctx().parse("2.418884326505e-17").expect("literal parses")
}
