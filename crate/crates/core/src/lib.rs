//! Tempered α-stable laws on the real line.
//!
//! * [`special_functions`]: Mittag-Leffler, incomplete gamma and `Γ*`.
//! * [`tempering`]: completely monotone tempering functions and their
//!   translation-ratio machinery.
//! * [`levy`]: the law itself: Lévy density and tail, the normalised big-jump
//!   law, characteristic exponent and cumulant.
//! * [`density`]: Fourier inversion for densities and survival functions.
//! * [`diagnostics`]: ratio curves checking tail-class membership,
//!   convolution equivalence and the density tail constant.
//! * [`cli`]: config parsing and the batch runner behind `tsdiag`.

pub mod error;
pub mod quadrature;
pub mod special_functions;
pub mod tempering;
pub mod levy;
pub mod density;
pub mod diagnostics;
pub mod cli;

pub use error::{Error, Result};
