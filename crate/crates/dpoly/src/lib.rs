//! Distributive lattices from arc-parameterized digraphs.
//!
//! An arc `a = (i, j)` with parameter `lambda_a >= 0` contributes the row
//! `p_j - lambda_a * p_i <= c_a` to a polyhedron in potential space. Systems of
//! this shape are exactly the polyhedra closed under componentwise max and min,
//! so their points carry a distributive lattice structure. This crate works
//! with such systems in exact rational arithmetic: recognizing them, reducing
//! them to bond form, enumerating their integral lattices, classifying the
//! generalized cycles that govern flow space, and dualizing planar instances.

pub mod bonds;
pub mod dspace;
pub mod exact;
pub mod fixtures;
pub mod gencycle;
pub mod graph;
pub mod planar;
pub mod poly;
pub mod verify;

pub(crate) mod par;

pub use exact::{Rat, RatMatrix, RatVector};

/// Errors shared across the crate. Dimension misuse panics; everything that
/// depends on input data is reported here.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("arc {arc}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { arc: usize, vertex: usize, n: usize },
    #[error("arc {arc}: negative lambda {lambda}")]
    NegativeLambda { arc: usize, lambda: String },
    #[error("arc {arc}: lambda = 0 on a non-loop arc")]
    ZeroLambdaNonLoop { arc: usize },
    #[error("cannot invert: {what} is zero")]
    ZeroInversion { what: String },
    #[error("steps {prev} and {next} do not share a connecting vertex")]
    NotAWalk { prev: usize, next: usize },
    #[error("walk is not closed (starts at {start}, ends at {end})")]
    WalkNotClosed { start: usize, end: usize },
    #[error("walk repeats arc {arc}")]
    WalkRepeatsArc { arc: usize },
    #[error("walk index {index} out of range (m = {m})")]
    WalkArcOutOfRange { index: usize, m: usize },
    #[error("{what} exceeds cap: {requested} > {limit}")]
    CapacityExceeded { what: String, requested: usize, limit: usize },
    #[error("basis vector {index} is not nonnegative")]
    NotNonnegative { index: usize },
    #[error("basis vectors {first} and {second} have overlapping supports")]
    OverlappingSupports { first: usize, second: usize },
    #[error("basis vector {index} is zero")]
    ZeroBasisVector { index: usize },
    #[error("underlying digraph is not a disjoint union of trees and loops: {reason}")]
    NotForestAndLoops { reason: String },
    #[error("x is not a bond: {reason}")]
    NotABond { reason: String },
    #[error("input is not a feasible bond: {reason}")]
    InfeasibleBond { reason: String },
    #[error("point is not a member: row {row} violated")]
    NotAMember { row: usize },
    #[error("digraph is disconnected")]
    Disconnected,
    #[error("arc {arc} is not a non-tree arc of the given spanning tree")]
    NotANonTreeArc { arc: usize },
    #[error("supplied arc set is not a spanning tree: {reason}")]
    NotASpanningTree { reason: String },
    #[error("H is not in the combinatorial support: {reason}")]
    NotACircuit { reason: String },
    #[error("f is not a generalized flow: conservation fails at vertex {vertex}")]
    NotAFlow { vertex: usize },
    #[error("embedding invalid: {reason}")]
    EmbeddingInvalid { reason: String },
    #[error("digraph is not breakeven (witness cycle over arcs {arcs:?} has multiplier {multiplier})")]
    NotBreakeven { arcs: Vec<usize>, multiplier: String },
    #[error("vertex multiplier {index} is not positive")]
    NonPositiveMultiplier { index: usize },
    #[error("integer overflow during {what}")]
    Overflow { what: String },
    #[error("no distributivity witness found after exhaustive search (internal)")]
    WitnessSearchFailed,
    #[error("capacity vector marks loop arc {arc} infeasible (0 outside bounds)")]
    LoopCapInfeasible { arc: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
