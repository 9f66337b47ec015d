//! Extended-precision arithmetic and special functions.

mod bessel;
mod combinatorics;
mod decimal;
mod gamma;
mod hypergeometric;
mod quadrature;
mod real;

pub use bessel::sph_bessel_j;
pub use combinatorics::{
    binomial, binomial_exact, biguint_to_real, double_factorial_odd, factorial, factorial_exact,
    pochhammer, rational_to_real,
};
pub use gamma::{beta, gamma, rgamma};
pub use hypergeometric::{hyp2f1, inc_beta, reg_hyp2f3, MAX_TERMS};
pub use quadrature::{gauss_legendre_nodes, gauss_legendre_on};
pub use real::{dot, sum, BigReal, PrecisionCtx, NATIVE_DIGITS};
