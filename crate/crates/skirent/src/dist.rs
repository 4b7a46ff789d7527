//! Finite discrete distributions over ski days `1..=N`.
//!
//! A [`FiniteDistribution`] is a dense probability mass function over the
//! integer days `1..=N`: `mass[t]` is the probability of skiing exactly `t`
//! days. [`TailProfile`] caches the survival function `Q_K = Σ_{t>K} mass[t]`
//! for `K = 0..=N`, which nearly every policy computation is phrased in.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so instances can be shared freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::kahan_sum;

/// Absolute tolerance for mass normalization and cost comparisons.
pub const MASS_TOL: f64 = 1e-9;

/// Slack added to hitting-time comparisons so exact dyadic tail levels
/// (e.g. `1/4`, `1/8`) behave deterministically.
pub const HIT_SLACK: f64 = 1e-12;

/// Ways a distribution can violate its invariants.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("support bound must be at least 1")]
    EmptySupport,
    #[error("negative mass {mass} at day {day}")]
    NegativeMass { day: usize, mass: f64 },
    #[error("total mass {total} outside [1 - 1e-9, 1 + 1e-9]")]
    TotalMass { total: f64 },
    #[error("day {day} outside support 1..={bound}")]
    DayOutOfRange { day: usize, bound: usize },
    #[error("atom days must be strictly increasing (offending day {day})")]
    AtomOrder { day: usize },
    #[error("insufficient mass at day {day}: have {have}, need {need}")]
    InsufficientMass { day: usize, have: f64, need: f64 },
    #[error("mass quantity must be nonnegative, got {0}")]
    NegativeAmount(f64),
}

/// Probability mass function over days `1..=N`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistFile", into = "DistFile")]
pub struct FiniteDistribution {
    n: usize,
    mass: Vec<f64>, // mass[i] = P(T = i + 1)
}

/// On-disk JSON schema: `{"N": int, "atoms": [[day, mass], ...]}` with
/// strictly increasing days. The loader densifies and validates.
#[derive(Serialize, Deserialize)]
struct DistFile {
    #[serde(rename = "N")]
    n: usize,
    atoms: Vec<(usize, f64)>,
}

impl TryFrom<DistFile> for FiniteDistribution {
    type Error = DistError;

    fn try_from(f: DistFile) -> Result<Self, DistError> {
        FiniteDistribution::from_atoms(f.n, &f.atoms)
    }
}

impl From<FiniteDistribution> for DistFile {
    fn from(d: FiniteDistribution) -> DistFile {
        DistFile {
            n: d.n,
            atoms: d.atoms(),
        }
    }
}

impl FiniteDistribution {
    /// Builds from a dense mass vector (`mass[i]` is the probability of day
    /// `i + 1`) and validates all invariants.
    pub fn from_dense(mass: Vec<f64>) -> Result<Self, DistError> {
        let d = Self {
            n: mass.len(),
            mass,
        };
        d.validate()?;
        Ok(d)
    }

    /// Builds from a dense mass vector without validating. Intended for
    /// fault-injection tests that need a deliberately broken input.
    pub fn from_dense_unchecked(mass: Vec<f64>) -> Self {
        Self {
            n: mass.len(),
            mass,
        }
    }

    /// Densifies sparse `(day, mass)` atoms over support `1..=n`, then
    /// validates. Days must be strictly increasing.
    pub fn from_atoms(n: usize, atoms: &[(usize, f64)]) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::EmptySupport);
        }
        let mut mass = vec![0.0; n];
        let mut prev = 0usize;
        for &(day, m) in atoms {
            if day == 0 || day > n {
                return Err(DistError::DayOutOfRange { day, bound: n });
            }
            if day <= prev {
                return Err(DistError::AtomOrder { day });
            }
            prev = day;
            mass[day - 1] = m;
        }
        Self::from_dense(mass)
    }

    /// All mass on a single day `t`.
    pub fn point_mass(t: usize, n: usize) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::EmptySupport);
        }
        if t == 0 || t > n {
            return Err(DistError::DayOutOfRange { day: t, bound: n });
        }
        let mut mass = vec![0.0; n];
        mass[t - 1] = 1.0;
        Ok(Self { n, mass })
    }

    /// Checks every invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), DistError> {
        if self.n == 0 {
            return Err(DistError::EmptySupport);
        }
        for (i, &m) in self.mass.iter().enumerate() {
            if m < 0.0 {
                return Err(DistError::NegativeMass { day: i + 1, mass: m });
            }
        }
        let total = kahan_sum(self.mass.iter().copied());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(DistError::TotalMass { total });
        }
        Ok(())
    }

    pub fn support_bound(&self) -> usize {
        self.n
    }

    /// Mass at `day`; 0 outside the support.
    pub fn mass(&self, day: usize) -> f64 {
        if day == 0 || day > self.n {
            0.0
        } else {
            self.mass[day - 1]
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Nonzero atoms in increasing day order.
    pub fn atoms(&self) -> Vec<(usize, f64)> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, &m)| (i + 1, m))
            .collect()
    }

    /// `Q_K = Σ_{t>K} mass[t]`; 0 for `K >= N`.
    pub fn tail_mass(&self, k: usize) -> f64 {
        if k >= self.n {
            return 0.0;
        }
        kahan_sum(self.mass[k..].iter().copied())
    }

    /// Smallest `K` with `tail_mass(K) <= gamma + 1e-12`. Always `<= N`.
    pub fn hit_time(&self, gamma: f64) -> usize {
        self.tail_profile().hit_time(gamma)
    }

    /// `Σ_t t * mass[t]`.
    pub fn expectation(&self) -> f64 {
        kahan_sum(
            self.mass
                .iter()
                .enumerate()
                .map(|(i, &m)| (i + 1) as f64 * m),
        )
    }

    pub fn tail_profile(&self) -> TailProfile {
        TailProfile::new(self)
    }

    /// Moves `eps` mass from day `from` to day `to`. The Wasserstein-1
    /// distance to the original is at most `eps * |from - to|`.
    pub fn shift_perturb(&self, from: usize, to: usize, eps: f64) -> Result<Self, DistError> {
        if eps < 0.0 {
            return Err(DistError::NegativeAmount(eps));
        }
        if from == 0 || from > self.n {
            return Err(DistError::DayOutOfRange {
                day: from,
                bound: self.n,
            });
        }
        if to == 0 || to > self.n {
            return Err(DistError::DayOutOfRange {
                day: to,
                bound: self.n,
            });
        }
        let have = self.mass[from - 1];
        if have + HIT_SLACK < eps {
            return Err(DistError::InsufficientMass {
                day: from,
                have,
                need: eps,
            });
        }
        let mut out = self.clone();
        if from != to {
            out.mass[from - 1] = (have - eps).max(0.0);
            out.mass[to - 1] += eps;
        }
        Ok(out)
    }

    /// Zero-pads the support up to `n` days. `n` must not shrink the support.
    pub fn padded_to(&self, n: usize) -> Self {
        assert!(n >= self.n, "padding may not drop support");
        let mut mass = self.mass.clone();
        mass.resize(n, 0.0);
        Self { n, mass }
    }
}

/// Cached survival function of a distribution: `q[K] = Σ_{t>K} mass[t]`.
///
/// `q[0]` is the total mass, the sequence is nonincreasing, and `q[N] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProfile {
    q: Vec<f64>, // length n + 1
}

impl TailProfile {
    pub fn new(d: &FiniteDistribution) -> Self {
        let mut q = vec![0.0; d.n + 1];
        for k in (0..d.n).rev() {
            q[k] = q[k + 1] + d.mass[k];
        }
        Self { q }
    }

    /// Wraps a raw tail vector without checking consistency. Used by
    /// fault-injection tests and inspection tools.
    pub fn from_raw(q: Vec<f64>) -> Self {
        assert!(!q.is_empty());
        Self { q }
    }

    pub fn support_bound(&self) -> usize {
        self.q.len() - 1
    }

    /// `Q_K`; 0 beyond the support bound.
    pub fn q(&self, k: usize) -> f64 {
        self.q.get(k).copied().unwrap_or(0.0)
    }

    /// Smallest `K` with `Q_K <= gamma + 1e-12`.
    pub fn hit_time(&self, gamma: f64) -> usize {
        let cut = gamma + HIT_SLACK;
        let k = self.q.partition_point(|&x| x > cut);
        k.min(self.support_bound())
    }

    /// `Σ_{t<=K} mass[t] = Q_0 - Q_K`.
    pub fn prefix_mass(&self, k: usize) -> f64 {
        self.q[0] - self.q(k)
    }
}
