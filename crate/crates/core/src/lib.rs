//! Aleatoric Description Logic (ADL).
//!
//! Concepts denote probabilities rather than truth values: a belief model
//! attaches to every individual a likelihood for each concept and a
//! probability distribution over successors for each role, and a formula
//! evaluates to the probability that an individual satisfies it.
//!
//! * [`syntax`], [`parser`] — formulas, sugar, ALC concepts, signatures.
//! * [`model`] — belief models and their file format.
//! * [`eval`] — exact memoised evaluation.
//! * [`kb`] — knowledge bases: parsing, simplification, acyclicity, satisfaction.
//! * [`consistency`] — polynomial constraint systems and a numeric solver.
//! * [`functional`] — ALC semantics, automata, tree measures and the ALC→ADL translation.
//! * [`learning`] — role and concept learning.

pub mod consistency;
pub mod error;
pub mod eval;
pub mod functional;
pub mod kb;
pub mod learning;
pub mod model;
pub mod parser;
pub mod rational;
pub mod syntax;
pub mod testgen;

pub use error::{Error, Result};
pub use eval::{evaluate, expectation, Evaluator};
pub use model::{BeliefModel, PointedModel};
pub use parser::{parse_concept, parse_formula};
pub use rational::Q;
pub use syntax::{Concept, Formula, Signature, Sugar};
