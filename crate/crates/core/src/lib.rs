//! Desk-scale laboratory for multiplayer nonlocal games.
//!
//! The crate is organized around the pipeline: build a finite game
//! ([`games`]), compute its classical value by exhaustive enumeration,
//! transform it (anchoring, parallel repetition), compute quantum XOR
//! values by semidefinite programming ([`xor_sdp`]), evaluate the
//! closed-form decay bounds ([`bounds`]), estimate conditional-closeness
//! quantities by seeded Monte Carlo ([`sim`]), and audit explicit quantum
//! strategies against the optimality residual inequalities ([`audit`]).
//! Quantum-state primitives live in [`linalg`]; entropy functionals and
//! the inequality fuzz harness in [`entropy`].

pub mod audit;
pub mod bounds;
pub mod entropy;
pub mod games;
pub mod linalg;
pub mod prob;
pub mod sim;
pub mod xor_sdp;
pub mod cli;
