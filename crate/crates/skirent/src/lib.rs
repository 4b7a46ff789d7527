//! Ski rental with distributional predictions.
//!
//! The classical rent-or-buy dilemma: rent skis for 1 per day or buy them
//! once for `b`, with the number of ski days unknown in advance. This crate
//! treats the forecast of that horizon as a full probability distribution
//! rather than a single number, and provides everything needed to study how
//! much such a forecast is worth:
//!
//! * [`dist`] — finite distributions over days, tails, hitting times.
//! * [`transport`] — Wasserstein-1 distance, explicit optimal transport
//!   plans, an independent min-cost-flow oracle, and the centroid bound.
//! * [`policy`] — threshold policies, exact expected costs, optimal-policy
//!   search, additive loss, and the hindsight benchmark.
//! * [`predictors`] — the prediction-driven buying rules, from the plain
//!   shifted-threshold rule to the truncated and λ-robustified variants.
//! * [`adversary`] — hard-instance generators with built-in self-checks.
//! * [`harness`] — experiment runner, seeded EMD sweeps, CSV/JSON reports,
//!   and the invariant verification suite.
//!
//! The `skirent` binary exposes the same functionality on the command line.

pub mod adversary;
pub mod dist;
pub mod harness;
mod numeric;
pub mod policy;
pub mod predictors;
pub mod transport;

pub use dist::{DistError, FiniteDistribution, TailProfile};
pub use policy::{
    additive_loss, hindsight_cost, optimal_policy, policy_cost, policy_cost_tail_form, BuyCost,
    CostBreakdown, Policy, PolicyError,
};
pub use predictors::{
    base_predictor, classical_predictor, lambda_robust_predictor, main_predictor,
    point_truth_predictor, AlgorithmTrace, Branch, PredictorError, PredictorSpec,
};
pub use transport::{
    centroid_gap, emd, emd_oracle, optimal_plan, plan_cost, TransportError, TransportPlan,
};
