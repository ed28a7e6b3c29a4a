pub mod card;
pub mod explanation_checker;
pub mod harness;
pub mod judgments;
pub mod matcher;
pub mod metrics;
pub mod model_graph;
pub mod refset;
pub mod text;
