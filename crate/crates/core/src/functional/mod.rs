//! The expressivity bridge between ALC and ADL.
//!
//! A belief model induces a probability space of samplings (functional
//! interpretations over role paths). The probability that a sampling
//! satisfies an ALC concept is computed exactly from the accepted trees of
//! an alternating automaton for the concept, and it coincides with the ADL
//! evaluation of the concept's translation. A Monte-Carlo sampler gives an
//! independent statistical check.

pub mod alc;
pub mod automaton;
pub mod prop;
pub mod sampling;
pub mod translate;
pub mod trees;

pub use alc::{alc_eval, from_alc_interpretation, to_pnf, AlcInterpretation};
pub use automaton::{automaton_accepts, compile_automaton, AlternatingAutomaton, ExistsState, ForallState};
pub use prop::{prop_translate, tau, Prop, Word};
pub use sampling::{monte_carlo_measure, sample_interpretation, wilson, McEstimate, Sampling};
pub use translate::{adl_translate, adl_translate_with_cap};
pub use trees::{measure, measure_with_cap, recognized_trees, tree_cap, AcceptedTree, MeasureResult};
