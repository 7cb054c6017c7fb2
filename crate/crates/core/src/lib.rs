pub mod cli;
pub mod clustering;
pub mod features;
pub mod matrix;
pub mod model;
pub mod pipeline;
pub mod reduction;
pub mod seqmine;
pub mod service;
pub mod synth;
pub mod trace;
pub mod trajectory;
pub mod validation;
