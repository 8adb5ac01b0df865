//! Semi-streaming algorithms for feedback arc set and strong connectivity on
//! tournaments, with exact oracles and pass/space metering.

pub mod addapprox;
pub mod attribution;
pub mod error;
pub mod generate;
pub mod hamscc;
pub mod io;
pub mod moves;
pub mod oracle;
pub mod par;
pub mod permutation;
pub mod ptas;
pub mod stream;
pub mod tournament;

pub use error::{Error, Result};
pub use generate::{generate, GeneratorKind, GeneratorSpec};
pub use permutation::{cost, Permutation};
pub use stream::{EdgeStream, MeterReport, StreamOrder};
pub use tournament::Tournament;
