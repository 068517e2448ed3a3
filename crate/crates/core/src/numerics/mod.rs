//! Numerical kernels shared by the distribution, fitting and property modules:
//! special functions, adaptive Gauss-Kronrod quadrature (finite and
//! semi-infinite ranges), safeguarded Newton root finding, a Nelder-Mead
//! simplex minimizer and Wynn-epsilon series acceleration.

mod quadrature;
mod roots;
mod series;
mod simplex;
mod special;

pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_semi_infinite_with, integrate_with,
    QuadratureOptions, QuadratureResult,
};
pub use roots::{find_root, find_root_with, RootOptions, RootResult};
pub use series::wynn_epsilon;
pub use simplex::{nelder_mead, nelder_mead_with, SimplexOptions, SimplexResult};
pub use special::{beta_fn, ln_beta, log_gamma, reg_inc_gamma};
pub(crate) use special::ln_gamma_pos;
