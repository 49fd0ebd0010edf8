//! Hybrid MDP models (placeholder).
pub struct HmdpModel;
