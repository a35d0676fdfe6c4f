//! Simulation of the dynamical Casimir effect in a cavity containing a
//! two-level atom, on a truncated Fock space.
//!
//! The cavity frequency is modulated as ω(t) = ω₀(1 + ε sin ηt), which pumps
//! photon pairs out of the vacuum; a Jaynes–Cummings atom serves as the
//! detector. After moving to a rotating frame and dropping counter-rotating
//! terms, the dynamics is generated by a time-independent Hamiltonian
//! Ĥ = A + B, and the evolution operator is approximated by the split
//!
//! ```text
//! Û(t) = exp(-t²/2 [A,B]) · exp(-itB) · exp(-itA)
//! ```
//!
//! with every factor in closed form: exp(-itA) through an su(1,1)
//! disentangling, exp(-itB) through the Jaynes–Cummings block identity, and
//! the commutator factor through spectral functions of DD† and D†D.
//!
//! Everything closed-form is validated against dense matrix exponentials and
//! direct integration of the Schrödinger equation ([`oracle`]).

pub mod error;
mod linalg;
pub mod model;
pub mod observables;
pub mod ode;
pub mod operators;
pub mod oracle;
pub mod propagator;

pub use error::Error;
pub use model::{BlockOperators, Coupling, DerivedParams, ModelParams};
pub use observables::{fidelity, measure, ObservableRecord};
pub use operators::{AtomLevel, Operator, OperatorSet, Space, StateVector};
pub use oracle::{
    evolve_exact, evolve_static, expm, expm_hermitian, frame_convert, Frame, FrameDirection,
    Trajectory,
};
pub use propagator::{
    exp_a, exp_b, exp_comm, propagator, propagator_components, riccati_oracle, squeeze_coeffs,
    PropagatorComponents, PropagatorEngine, SqueezeCoeffs,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
