//! Hidden Markov (sofic) measures on shifts of finite type.
//!
//! Exact rational cylinder evaluation, linear representations and reduced
//! stochastic modules, decision procedures for the `k`-step Markov property
//! of a factor measure, lifts of Markov measures through resolving codes,
//! and pressure of locally constant potentials.

pub mod cli;
pub mod error;
pub mod lift;
pub mod linalg;
pub mod linear_rep;
pub mod markov_decide;
pub mod markov_measure;
pub mod model;
pub mod perron;
pub mod rational;
pub mod shift_space;
pub mod stochastic_module;
pub mod thermo;

pub use error::{Error, Result};
pub use lift::{
    e_resolving_lift, finite_to_one_check, markovian_lift, resolving_status, wps, wps_lift_check,
    CodeStructure, ResolvingStatus,
};
pub use linalg::{Matrix, Poly, RowSpace, Vector};
pub use linear_rep::{LinearRepresentation, SoficPresentation, WeightedPresentation};
pub use markov_decide::{
    decide_kstep, decide_kstep_kernel, decide_markov, order_bound, rank_criterion, DecisionContext,
    KStepVerdict, MarkovStatus, MarkovVerdict,
};
pub use markov_measure::{
    empirical_k_markov_check, image_cylinder_measure, stationary_vector, MarkovMeasure,
    StochasticMatrix,
};
pub use model::Model;
pub use perron::{stochasticize, Stochasticized};
pub use rational::Rational;
pub use shift_space::{
    build_sft, preimage_count, recode_to_one_block, Alphabet, BlockCode, SftSpace, Symbol,
};
pub use stochastic_module::{
    core_quotient_check, equivalent, CoreInvariant, Equivalence, StochasticModule,
};
pub use thermo::{
    compensation_ratio_report, equilibrium_markov, pressure, relative_entropy_estimate,
    LocallyConstantPotential,
};
