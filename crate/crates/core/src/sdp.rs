//! Symbolic value iteration (placeholder).
pub struct SolveOptions;
pub struct SolveResult;
