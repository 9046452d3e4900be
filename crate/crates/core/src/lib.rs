//! Stationary kink and anti-kink/kink solutions of the sine-Gordon equation on a
//! tricrystal Y-junction with δ′-type vertex coupling.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: the junction, truncated edge grids, fields on the graph, traces at the vertex;
//! * [`profiles`]: the two closed-form stationary families and their vertex shift equations;
//! * [`banded`]: symmetric banded storage, `LDLᵀ` with inertia, used by the eigensolver and
//!   the Newton solves;
//! * [`spectral`]: P1 assembly of the linearised operators, eigenpairs, Morse index and kernel;
//! * [`dynamics`]: a symplectic time integrator for the nonlinear system and growth-rate fits.
//!
//! Every numeric type is generic over [`Real`]; `f64` aliases are provided at the crate root.

pub mod banded;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod profiles;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub use graph::{EdgeGrid, GraphField, VertexTrace, YGraphSpec};
pub use profiles::{FamilyKind, ProfileFamily, Shape};
pub use spectral::{AssembledOperator, OperatorSpec, Potential, SpectrumReport};

/// Number of edges of the junction.
pub const EDGES: usize = 3;

pub type YGraphSpec64 = YGraphSpec<f64>;
pub type EdgeGrid64 = EdgeGrid<f64>;
pub type GraphField64 = GraphField<f64>;
pub type ProfileFamily64 = ProfileFamily<f64>;
pub type OperatorSpec64 = OperatorSpec<f64>;
pub type AssembledOperator64 = AssembledOperator<f64>;
pub type SpectrumReport64 = SpectrumReport<f64>;
pub type State64 = dynamics::State<f64>;
pub type EvolveConfig64 = dynamics::EvolveConfig<f64>;
