//! Numerical laboratory for optimal stopping of uniform draws: exact
//! finite-horizon dynamic programs, their discrete and rank-penalised
//! variants, the closed-form Poisson limit objects, and a deterministic
//! seeded Monte Carlo engine tying them together.

pub mod discrete;
pub mod error;
pub mod limit;
pub mod lindley;
pub mod moser;
pub mod report;
pub mod sim;
pub mod verify;
