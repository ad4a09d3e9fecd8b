//! Numerical checks for coherent-state quantization on symplectic phase
//! spaces carrying a choice of (almost) complex structure.

pub mod cli;
pub mod expr;
pub mod fock;
pub mod foliation;
pub mod linalg;
pub mod phase_space;
pub mod torus;
pub mod transform;
