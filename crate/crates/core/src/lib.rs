pub mod arith;
pub mod corpus;
pub mod error;
pub mod hnls;
pub mod incidence;
pub mod io;
pub mod lattice;
pub mod resonance;
pub mod spectral;
pub mod strichartz;
pub mod suite;
pub mod weighted;

pub use error::{Error, Result};
