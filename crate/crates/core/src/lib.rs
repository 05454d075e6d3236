pub mod beam;
pub mod criteria;
pub mod duffing;
pub mod elliptic;
pub mod error;
pub mod hill;
pub mod ode;
pub mod quadrature;
pub mod tongues;

pub use error::{Error, Result};

/// Library version, echoed into output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
