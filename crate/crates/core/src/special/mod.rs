//! Complex Γ, Riemann ζ and Hurwitz ζ in double precision.

mod gamma;
mod zeta;

pub use gamma::{gamma, gamma_pole_distance, log_gamma, sin_pi};
pub use zeta::{hurwitz_constant_term, hurwitz_zeta, hurwitz_zeta_with, riemann_zeta, PrecisionProfile};
