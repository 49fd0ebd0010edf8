//! Grid evaluation (placeholder).
