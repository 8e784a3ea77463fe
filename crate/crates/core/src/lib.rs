//! Haar-random fermionic linear optics (matchgate) circuits.
//!
//! Samplers for active (parity-preserving) and passive (number-preserving)
//! FLO circuits in optimal brick-wall form, random Clifford FLO circuits,
//! and the machinery used to check them: adjoint and spinor
//! representations, a Ginibre + Givens-compilation Haar oracle, turnover
//! compression, exact commutant dimensions and frame-potential estimation.
//!
//! Conventions used everywhere:
//!
//! * qubits and Majorana modes are 1-based, qubit 1 is the leftmost tensor
//!   factor and `c_{2q-1} = Z..Z X_q`, `c_{2q} = Z..Z Y_q`;
//! * gates use the half-angle convention, `GZ(q, θ) = exp(i θ/2 Z_q)`, so a
//!   gate angle is the rotation angle of its adjoint action;
//! * circuits store gates in application order;
//! * the adjoint matrix is defined by `U c_l U† = Σ_m O_lm c_m`, which makes
//!   the adjoint of a concatenation the product of adjoints in application
//!   order.

pub mod analysis;
pub mod angle_sampling;
pub mod circuit_model;
pub mod clifford_samplers;
pub mod commutant;
pub mod error;
pub mod haar_layouts;
pub mod hurwitz_oracle;
pub mod representations;
pub mod rng;
pub mod stats;
pub mod turnover;

pub use analysis::{Ensemble, FramePotentialReport};
pub use angle_sampling::AnglePdf;
pub use circuit_model::{Circuit, Gate, GateKind};
pub use commutant::Group;
pub use error::{Error, Result};
pub use haar_layouts::{Layout, LayoutSlot, LayoutTag};
pub use hurwitz_oracle::{AngleTable, UnitaryAngleTable};
pub use representations::{MatrixClass, OrthoMatrix, UnitaryMatrix};
pub use rng::Streams;
