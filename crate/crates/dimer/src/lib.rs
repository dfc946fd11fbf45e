//! Tunneling in the self-trapped regime of the two-well Bose-Einstein
//! condensate dimer, three independent ways: exact diagonalization of the
//! Bose-Hubbard Hamiltonian, Bohr-Sommerfeld quantization with
//! elliptic-integral actions, and closed-form large-N approximations.
//! A dissipative two-level reduction validated against the full master
//! equation sits on top.
//!
//! Unit convention: `J` and `U` are angular frequencies in rad/s throughout
//! (referred to as Hz in parameter names for brevity). Physical frequencies
//! reported to users are f = Delta E / (2 pi) with hbar = 1.

pub mod dissipative;
pub mod meanfield;
pub mod numerics;
pub mod quantum;
pub mod semiclassical;
pub mod specfun;
