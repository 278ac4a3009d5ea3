pub mod airy;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod interp;
pub mod matrix;
pub mod ode;
pub mod painleve;
pub mod pde;
pub mod phase;
pub mod scattering;
pub mod soliton;
pub mod spectral;

pub use error::{Error, Result};
