pub mod bijections;
pub mod cli;
pub mod closed_form;
pub mod enumerate;
pub mod error;
pub mod moments;
pub mod montecarlo;
pub mod rational;
pub mod report;
pub mod rng;
pub mod walk;

pub use error::{Error, Result};
pub use rational::ExactRational;
