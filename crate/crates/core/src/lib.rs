//! Observable-logic toolchain: a proof kernel for a sixteen-rule sequent
//! calculus, a Horn-fragment forward-chaining engine with minimal traceback,
//! a sieve calculus for covering claims with proof translation in both
//! directions, and a synthetic dataset pipeline built on top of them.

pub mod dataset;
pub mod dsl;
pub mod dual;
pub mod engine;
pub mod kernel;
pub mod logic;
pub mod semantics;
