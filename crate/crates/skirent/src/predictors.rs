//! Buying rules that consume a distributional prediction.
//!
//! Every rule maps a predicted distribution `p̂` (and the buy cost `b`) to a
//! deterministic [`Policy`], together with an [`AlgorithmTrace`] recording
//! the intermediate quantities:
//!
//! * [`base_predictor`] — follow the optimal threshold for `p̂`, delayed by
//!   `⌊√b⌋` days; rent forever if `p̂` says never buy.
//! * [`main_predictor`] — same, but additionally truncate at `U + ⌊√b⌋`,
//!   where `U` is the first day the predicted tail drops to `1/⌊√b⌋`. The
//!   truncation caps the worst case without hurting accurate predictions.
//! * [`lambda_robust_predictor`] — interpolates between the main rule
//!   (`λ = 0`) and the classical rent-`b-1`-then-buy rule (`λ = 1`).
//! * [`point_truth_predictor`] — variant tuned for point-mass truths,
//!   choosing among buy-now / rent-forever / follow-threshold from prefix
//!   masses of `p̂`.
//! * [`classical_predictor`] — ignores the prediction entirely.
//!
//! `⌊√b⌋` is used consistently wherever `√b` appears, including the tail
//! level `1/⌊√b⌋` defining `U`, and is recorded in the trace.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dist::FiniteDistribution;
use crate::numeric::ceil_snap;
use crate::policy::{optimal_policy, BuyCost, Policy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictorError {
    #[error("lambda must lie in [0, 1], got {0}")]
    LambdaOutOfRange(f64),
    #[error("unknown predictor {0:?} (expected base | main | lambda:<value> | point-truth | classical)")]
    UnknownPredictor(String),
}

/// Which branch of a rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Base rule, finite predicted threshold shifted by `⌊√b⌋`.
    BaseShift,
    /// Base rule, prediction says never buy.
    BaseRent,
    /// Main rule, predicted threshold binds (`K̂ <= U`).
    MainShift,
    /// Main rule, tail truncation binds (`U < K̂`, including `K̂ = inf`).
    MainTruncate,
    /// λ-rule delayed an early buy to day `⌈λb⌉`.
    LambdaDelay,
    /// λ-rule advanced a late buy to day `⌈b/λ⌉`.
    LambdaAdvance,
    /// λ-rule kept the main rule's threshold.
    LambdaKeep,
    /// Point-truth rule followed an optimal immediate buy.
    PointFollowBuy,
    /// Point-truth rule followed an optimal rent-forever.
    PointFollowRent,
    /// Point-truth rule, `K >= b` with at least a third of the mass by day
    /// `b`: rent forever.
    PointHeavyPrefixRent,
    /// Point-truth rule, `K >= b` with light prefix: buy immediately.
    PointLightPrefixBuy,
    /// Point-truth rule, `K < b` with enough early mass: rent forever.
    PointEarlyMassRent,
    /// Point-truth rule, `K < b` with light prefix: trust the threshold.
    PointTrustThreshold,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::BaseShift => "base-shift",
            Branch::BaseRent => "base-rent",
            Branch::MainShift => "main-shift",
            Branch::MainTruncate => "main-truncate",
            Branch::LambdaDelay => "lambda-delay",
            Branch::LambdaAdvance => "lambda-advance",
            Branch::LambdaKeep => "lambda-keep",
            Branch::PointFollowBuy => "point-follow-buy",
            Branch::PointFollowRent => "point-follow-rent",
            Branch::PointHeavyPrefixRent => "point-heavy-prefix-rent",
            Branch::PointLightPrefixBuy => "point-light-prefix-buy",
            Branch::PointEarlyMassRent => "point-early-mass-rent",
            Branch::PointTrustThreshold => "point-trust-threshold",
        };
        write!(f, "{s}")
    }
}

/// Intermediate quantities of a prediction-driven rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmTrace {
    /// Optimal threshold for the prediction (finite or rent-forever).
    pub k_hat: Policy,
    /// Truncation threshold: first day the predicted tail is `<= 1/⌊√b⌋`.
    pub u: usize,
    /// Final threshold the rule committed to.
    pub k_star: Policy,
    pub branch: Branch,
    pub sqrt_b: u32,
}

/// Threshold comparisons accept values within this slack of the cut.
const PREFIX_SLACK: f64 = 1e-12;

/// Follow the prediction's optimal threshold, delayed by `⌊√b⌋`; rent
/// forever when the prediction prefers renting forever.
pub fn base_predictor(phat: &FiniteDistribution, b: BuyCost) -> (Policy, AlgorithmTrace) {
    let s = b.sqrt_floor() as usize;
    let k_hat = optimal_policy(phat, b).policy;
    let u = phat.hit_time(1.0 / s as f64);
    let (policy, branch) = match k_hat {
        Policy::BuyAfter(k) => (Policy::BuyAfter(k + s), Branch::BaseShift),
        Policy::RentForever => (Policy::RentForever, Branch::BaseRent),
    };
    let trace = AlgorithmTrace {
        k_hat,
        u,
        k_star: policy,
        branch,
        sqrt_b: b.sqrt_floor(),
    };
    (policy, trace)
}

/// The truncated rule: `K* = min(K̂, U) + ⌊√b⌋`, with `min(inf, U) = U`.
/// Always returns a finite threshold because `U` is finite.
pub fn main_predictor(phat: &FiniteDistribution, b: BuyCost) -> (Policy, AlgorithmTrace) {
    let s = b.sqrt_floor() as usize;
    let k_hat = optimal_policy(phat, b).policy;
    let u = phat.hit_time(1.0 / s as f64);
    let (base, branch) = match k_hat {
        Policy::BuyAfter(k) if k <= u => (k, Branch::MainShift),
        _ => (u, Branch::MainTruncate),
    };
    let policy = Policy::BuyAfter(base + s);
    let trace = AlgorithmTrace {
        k_hat,
        u,
        k_star: policy,
        branch,
        sqrt_b: b.sqrt_floor(),
    };
    (policy, trace)
}

/// Robustified rule with trust parameter `λ ∈ [0, 1]`.
///
/// `λ = 0` returns the main rule's output unchanged. For `λ > 0`, buys
/// scheduled before day `⌈λb⌉` are delayed to it, and buys scheduled on or
/// after day `⌈b/λ⌉` are advanced to it ("buy at the beginning of day D"
/// is the policy `A_{D-1}`). `λ = 1` reproduces the classical rule whenever
/// the main rule would buy by day `b`.
pub fn lambda_robust_predictor(
    phat: &FiniteDistribution,
    b: BuyCost,
    lambda: f64,
) -> Result<(Policy, AlgorithmTrace), PredictorError> {
    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
        return Err(PredictorError::LambdaOutOfRange(lambda));
    }
    let (main_policy, main_trace) = main_predictor(phat, b);
    if lambda == 0.0 {
        return Ok((main_policy, main_trace));
    }
    let k_star = main_policy
        .threshold()
        .expect("main rule always returns a finite threshold");
    let bf = b.as_f64();
    let (policy, branch) = if k_star <= b.get() as usize {
        let early = ceil_snap(lambda * bf) as usize;
        if k_star < early {
            (Policy::BuyAfter(early - 1), Branch::LambdaDelay)
        } else {
            (main_policy, Branch::LambdaKeep)
        }
    } else {
        let late = ceil_snap(bf / lambda) as usize;
        if k_star >= late {
            (Policy::BuyAfter(late - 1), Branch::LambdaAdvance)
        } else {
            (main_policy, Branch::LambdaKeep)
        }
    };
    let trace = AlgorithmTrace {
        k_star: policy,
        branch,
        ..main_trace
    };
    Ok((policy, trace))
}

/// Rule for the point-truth setting: follow `p̂` when its optimum is an
/// extreme policy, otherwise decide from prefix masses.
pub fn point_truth_predictor(phat: &FiniteDistribution, b: BuyCost) -> (Policy, AlgorithmTrace) {
    let s = b.sqrt_floor() as usize;
    let k_hat = optimal_policy(phat, b).policy;
    let u = phat.hit_time(1.0 / s as f64);
    let profile = phat.tail_profile();
    let (policy, branch) = match k_hat {
        Policy::BuyAfter(0) => (Policy::BuyAfter(0), Branch::PointFollowBuy),
        Policy::RentForever => (Policy::RentForever, Branch::PointFollowRent),
        Policy::BuyAfter(k) if k >= b.get() as usize => {
            if profile.prefix_mass(b.get() as usize) >= 1.0 / 3.0 - PREFIX_SLACK {
                (Policy::RentForever, Branch::PointHeavyPrefixRent)
            } else {
                (Policy::BuyAfter(0), Branch::PointLightPrefixBuy)
            }
        }
        Policy::BuyAfter(k) => {
            if profile.prefix_mass(k) >= 0.025 - PREFIX_SLACK {
                (Policy::RentForever, Branch::PointEarlyMassRent)
            } else {
                (Policy::BuyAfter(k), Branch::PointTrustThreshold)
            }
        }
    };
    let trace = AlgorithmTrace {
        k_hat,
        u,
        k_star: policy,
        branch,
        sqrt_b: b.sqrt_floor(),
    };
    (policy, trace)
}

/// The prediction-free worst-case rule: rent until day `b - 1`, then buy.
pub fn classical_predictor(b: BuyCost) -> Policy {
    Policy::BuyAfter(b.get() as usize - 1)
}

/// Predictor selection by name: `base | main | lambda:<value> | point-truth
/// | classical`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictorSpec {
    Base,
    Main,
    Lambda(f64),
    PointTruth,
    Classical,
}

impl PredictorSpec {
    /// The policy this predictor commits to for prediction `phat`.
    pub fn policy(&self, phat: &FiniteDistribution, b: BuyCost) -> Policy {
        match self {
            PredictorSpec::Base => base_predictor(phat, b).0,
            PredictorSpec::Main => main_predictor(phat, b).0,
            PredictorSpec::Lambda(l) => {
                lambda_robust_predictor(phat, b, *l)
                    .expect("lambda validated at parse time")
                    .0
            }
            PredictorSpec::PointTruth => point_truth_predictor(phat, b).0,
            PredictorSpec::Classical => classical_predictor(b),
        }
    }
}

impl FromStr for PredictorSpec {
    type Err = PredictorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(PredictorSpec::Base),
            "main" => Ok(PredictorSpec::Main),
            "point-truth" => Ok(PredictorSpec::PointTruth),
            "classical" => Ok(PredictorSpec::Classical),
            other => {
                if let Some(v) = other.strip_prefix("lambda:") {
                    let lambda: f64 = v
                        .parse()
                        .map_err(|_| PredictorError::UnknownPredictor(other.to_string()))?;
                    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
                        return Err(PredictorError::LambdaOutOfRange(lambda));
                    }
                    Ok(PredictorSpec::Lambda(lambda))
                } else {
                    Err(PredictorError::UnknownPredictor(other.to_string()))
                }
            }
        }
    }
}

impl fmt::Display for PredictorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictorSpec::Base => write!(f, "base"),
            PredictorSpec::Main => write!(f, "main"),
            PredictorSpec::Lambda(l) => write!(f, "lambda:{l}"),
            PredictorSpec::PointTruth => write!(f, "point-truth"),
            PredictorSpec::Classical => write!(f, "classical"),
        }
    }
}
