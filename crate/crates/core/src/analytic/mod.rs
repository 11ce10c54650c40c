//! Closed-form moments, densities and group integrals for restricted shadows.

pub mod hypergeometric;
pub mod moments;
pub mod real_shadow;
pub mod unitary;

pub use hypergeometric::{hyp2f1, hypergeometric, pfq, pochhammer, HypergeometricKind};
pub use moments::{
    collins_sniady_coeffs, entangled_moments, full_complex_moments, restricted_moments, entangled_variance_2x2_diag, reduced_matrix_y, schmidt_second_moment,
    separable_moments, CollinsSniadyCoeffs, MatrixFunctionals, MomentReport,
};
pub use real_shadow::{
    complex_shadow_variance, fourier_matrix, g3_density, g3_moment, g3_moment_series, real_diag_moment,
    real_shadow_cdf, real_shadow_variance, sphere_monomial, sphere_monomial_integral, unistochastic_c, Eigenbasis,
    G3_AT_ONE,
};
pub use unitary::{bell_orbit_simplex_moment, entangled_second_moment_3x3, u3_monomial_integral, Gamma3x3};
