//! Deterministic rent-or-buy policies and their exact expected costs.
//!
//! A policy `A_K` rents for `K` days and buys at the start of day `K + 1`;
//! `A_0` buys immediately and `A_inf` rents forever. Against a distribution
//! over day counts the expected costs are
//!
//! ```text
//! c(A_K)   = Σ_{t<=K} t·p_t + Σ_{t>K} (K + b)·p_t
//! c(A_inf) = Σ_t t·p_t
//! ```
//!
//! where `b` is the one-time buying cost. The same cost can be computed
//! purely from the tail profile, `c(A_K) = Σ_{i<K} Q_i + b·Q_K`, which is the
//! form the optimal-policy scan and most structural inequalities use.

use std::fmt;

use thiserror::Error;

use crate::dist::{FiniteDistribution, TailProfile, MASS_TOL};
use crate::numeric::{kahan_sum, KahanAcc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("buy cost must be an integer >= 4, got {0}")]
    InvalidBuyCost(u32),
}

/// One-time buying cost `b`. Rental is normalized to 1 per day.
///
/// The square-root offsets used by the prediction-driven rules degenerate
/// below `b = 4`, so that is the floor here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BuyCost(u32);

impl BuyCost {
    pub fn new(b: u32) -> Result<Self, PolicyError> {
        if b < 4 {
            return Err(PolicyError::InvalidBuyCost(b));
        }
        Ok(Self(b))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// `⌊√b⌋`, the offset used wherever √b appears in a buying rule.
    pub fn sqrt_floor(self) -> u32 {
        (self.0 as u64).isqrt() as u32
    }
}

impl fmt::Display for BuyCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A deterministic policy: buy after a finite number of rented days, or rent
/// forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// `A_K`: rent `K` days, buy at the start of day `K + 1`.
    BuyAfter(usize),
    /// `A_inf`: never buy.
    RentForever,
}

impl Policy {
    pub fn threshold(&self) -> Option<usize> {
        match self {
            Policy::BuyAfter(k) => Some(*k),
            Policy::RentForever => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Policy::BuyAfter(_))
    }

    /// `A_K` with `K >= N` never buys on support `1..=N`; collapse it to
    /// `A_inf`.
    pub fn normalized(self, support_bound: usize) -> Policy {
        match self {
            Policy::BuyAfter(k) if k >= support_bound => Policy::RentForever,
            other => other,
        }
    }

    /// Report field: the threshold as an integer, or `inf`.
    pub fn field(&self) -> String {
        match self {
            Policy::BuyAfter(k) => k.to_string(),
            Policy::RentForever => "inf".to_string(),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::BuyAfter(k) => write!(f, "A_{k}"),
            Policy::RentForever => write!(f, "A_inf"),
        }
    }
}

/// A policy together with its expected cost under some distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub policy: Policy,
    pub cost: f64,
    pub is_optimal: bool,
}

/// Exact expected cost of `pol` when the day count is drawn from `d`.
///
/// For finite `K >= N` the formula coincides with the rent-forever cost.
pub fn policy_cost(d: &FiniteDistribution, pol: Policy, b: BuyCost) -> f64 {
    match pol {
        Policy::RentForever => d.expectation(),
        Policy::BuyAfter(k) => {
            let buyout = k as f64 + b.as_f64();
            kahan_sum(d.masses().iter().enumerate().map(|(i, &m)| {
                let t = i + 1;
                if t <= k {
                    t as f64 * m
                } else {
                    buyout * m
                }
            }))
        }
    }
}

/// `c(A_K) = Σ_{i<K} Q_i + b·Q_K`, computed purely from a tail profile.
///
/// Rent-forever has no finite threshold here; use [`policy_cost`] for it.
pub fn policy_cost_tail_form(d: &FiniteDistribution, k: usize, b: BuyCost) -> f64 {
    tail_form_cost(&d.tail_profile(), k, b)
}

/// Tail-profile route of [`policy_cost_tail_form`], usable with an
/// externally supplied (possibly corrupted) profile.
pub fn tail_form_cost(profile: &TailProfile, k: usize, b: BuyCost) -> f64 {
    let mut acc = KahanAcc::default();
    for i in 0..k.min(profile.support_bound()) {
        acc.add(profile.q(i));
    }
    acc.value() + b.as_f64() * profile.q(k)
}

/// Scans every finite threshold and the rent-forever policy, returning the
/// cheapest.
///
/// Ties go to the smallest finite threshold; rent-forever wins only when it
/// is strictly better than every finite policy by more than the mass
/// tolerance. A winning threshold `K >= N` is normalized to rent-forever
/// (the costs coincide on the support).
pub fn optimal_policy(d: &FiniteDistribution, b: BuyCost) -> CostBreakdown {
    let profile = d.tail_profile();
    let n = d.support_bound();

    let mut costs = Vec::with_capacity(n + 1);
    let mut prefix = KahanAcc::default();
    for k in 0..=n {
        costs.push(prefix.value() + b.as_f64() * profile.q(k));
        if k < n {
            prefix.add(profile.q(k));
        }
    }

    let min_finite = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let k_best = costs
        .iter()
        .position(|&c| c <= min_finite + MASS_TOL)
        .expect("cost scan is nonempty");

    let inf_cost = d.expectation();
    if inf_cost < min_finite - MASS_TOL {
        return CostBreakdown {
            policy: Policy::RentForever,
            cost: inf_cost,
            is_optimal: true,
        };
    }

    let policy = Policy::BuyAfter(k_best).normalized(n);
    CostBreakdown {
        policy,
        cost: costs[k_best],
        is_optimal: true,
    }
}

/// Expected cost of `pol` minus the optimal expected cost under `d`.
pub fn additive_loss(d: &FiniteDistribution, pol: Policy, b: BuyCost) -> f64 {
    policy_cost(d, pol, b) - optimal_policy(d, b).cost
}

/// `E[min(T, b)]`: the per-realization best action in hindsight. No policy
/// can beat it.
pub fn hindsight_cost(d: &FiniteDistribution, b: BuyCost) -> f64 {
    kahan_sum(
        d.masses()
            .iter()
            .enumerate()
            .map(|(i, &m)| ((i + 1) as f64).min(b.as_f64()) * m),
    )
}
