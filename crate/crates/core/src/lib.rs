//! Structure factors, photon correlation functions and closure-phase
//! retrieval for point emitters on a pixelated detector.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this file pin the common choices.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closure;
pub mod correlations;
pub mod emitters;
pub mod error;
pub mod index;
pub mod oracle;
pub mod retrieval;
pub mod scalar;
pub mod spectrum;
pub mod verify;

pub use closure::{
    census_closed_form, census_enumerated, enumerate_equations, invert_g2_count,
    invert_g2_magnitude, invert_g3_cosine, unknown_count, ClosureEquation, ClosureMeasurement,
    EquationCensus, EquationClass,
};
pub use correlations::{g1_cdc, g2, g3, g4_assembled, g4_closed, CorrelationTuple};
pub use emitters::{structure_factor, EmitterConfig, QGrid, StructureFactorTable};
pub use error::{Error, Result};
pub use index::QIndex;
pub use oracle::{enumerate_permutations, CycleType, Permutation};
pub use retrieval::{
    candidate_set_for, gauge_align, gauge_fit, intersect, prune_with_g4, retrieve_1d, CandidateSet,
    ClosureData1d, G4Sample, GaugeFit, PhaseHypothesis, RetrievalOptions, RetrievalReport,
    RetrievalStatus, Sign,
};
pub use scalar::{wrap_phase, wrapped_distance, Scalar};
pub use spectrum::{PhaseModel, Spectrum};

pub type EmitterConfig64 = EmitterConfig<f64>;
pub type EmitterConfig32 = EmitterConfig<f32>;
pub type QGrid64 = QGrid<f64>;
pub type QGrid32 = QGrid<f32>;
pub type StructureFactorTable64 = StructureFactorTable<f64>;
pub type StructureFactorTable32 = StructureFactorTable<f32>;
pub type ClosureMeasurement64 = ClosureMeasurement<f64>;
pub type ClosureMeasurement32 = ClosureMeasurement<f32>;
pub type RetrievalReport64 = RetrievalReport<f64>;
pub type RetrievalReport32 = RetrievalReport<f32>;
pub type ClosureData1d64 = ClosureData1d<f64>;
pub type ClosureData1d32 = ClosureData1d<f32>;
