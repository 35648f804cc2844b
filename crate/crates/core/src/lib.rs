//! Learning answer set programs from partial interpretations.
//!
//! The crate covers the whole pipeline: a small ASP language ([`syntax`],
//! [`parse`]), grounding ([`ground`]), stable-model search ([`solve`]),
//! mode-bias hypothesis spaces ([`space`]), an exact cost-minimal learner
//! ([`learn`]), derivation graphs ([`explain`]) and a weather-forecasting
//! task generator ([`weather`]).

pub mod explain;
pub mod ground;
pub mod learn;
pub mod par;
pub mod parse;
pub mod solve;
pub mod space;
pub mod syntax;
pub mod task;
pub mod weather;
