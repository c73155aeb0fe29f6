//! Shared numerical substrate: adaptive quadrature over finite and
//! unbounded domains, the special functions used by the outage layer, and
//! the reproducible RNG-stream contract used by every sampler.

mod quadrature;
mod rng;
mod special;

pub use quadrature::{integrate, InfiniteDomainMap, QuadratureSpec};
pub use rng::RngStream;
pub use special::{alzer_constant, erf, gamma_upper_ratio, ln_gamma, reg_lower_gamma};
