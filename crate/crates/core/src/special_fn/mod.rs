//! Bessel functions of real and imaginary order and the GL(2) kernels
//! J_g, K_g built from them.

mod bessel;
mod gamma;
mod kernel;

pub use bessel::{
    asymptotic as bessel_j_asymptotic, bessel_j, bessel_j_tol, bessel_k_imag,
    miller as bessel_j_miller, series as bessel_j_series, Estimate, Order, CROSSOVER,
};
pub use gamma::{gamma, ln_gamma};
pub use kernel::{
    asymptotic_kernel_expansion, bessel_coefficients, hankel_symbol, kernel_j_g, kernel_k_g,
    AsymptoticCoefficients, BesselKernel,
};
