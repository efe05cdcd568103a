//! Headless MOBA arena hosting a behavior-tree support tutor, with a rule-based
//! tip engine, KDA analytics and an experiment harness.

pub mod analytics;
pub mod arena;
pub mod bt;
pub mod harness;
pub mod tips;
pub mod tutor;
