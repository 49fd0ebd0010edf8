//! Exact solver for hybrid (boolean + continuous state, discrete or
//! continuous action) Markov decision processes by symbolic dynamic
//! programming over extended algebraic decision diagrams (XADDs).
//!
//! The pipeline: a model ([`hmdp::HmdpModel`]) holds transitions, CPFs and
//! reward as XADDs over exact-rational polynomials ([`expr`]); value
//! iteration ([`sdp::value_iteration`]) regresses the value function through
//! Dirac transitions and boolean CPFs, maximizes continuous action
//! parameters in closed form, and keeps diagrams small with linear
//! feasibility pruning ([`prune`]). Value functions and policies come back
//! as XADDs that can be evaluated, exported to DOT, or sampled onto grids
//! ([`grid`]).

pub mod expr;
pub mod grid;
pub mod hmdp;
pub mod prune;
pub mod sdp;
pub mod xadd;

pub use expr::{Poly, Rat, VarId, VarKind, VarRegistry};
pub use hmdp::HmdpModel;
pub use sdp::{SolveOptions, SolveResult};
pub use xadd::{NodeId, XaddStore};
