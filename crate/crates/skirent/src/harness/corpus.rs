//! The verification corpus: generated families plus seeded random instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    gen_bimodal_intro, gen_hindsight_example, gen_thm3_family, gen_thm4_pair, gen_thm5_pair,
    gen_thm7_prediction, uniform_mixture, InstanceFamily,
};
use crate::dist::{FiniteDistribution, TailProfile};
use crate::policy::BuyCost;

/// Seed of the built-in corpus; `SKIRENT_SEED` overrides it in the CLI.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

/// Number of random instances in the built-in corpus.
pub const RANDOM_INSTANCES: usize = 200;

/// One (prediction, truth, buy-cost) triple to verify against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusInstance {
    pub id: String,
    pub b: u32,
    pub phat: FiniteDistribution,
    pub truth: FiniteDistribution,
    /// Fault-injection hook: overrides the tail profile derived from `phat`
    /// in checks that compare the two cost routes. Never set in real runs.
    #[serde(skip)]
    pub tail_override: Option<Vec<f64>>,
}

impl CorpusInstance {
    pub fn new(id: impl Into<String>, b: u32, phat: FiniteDistribution, truth: FiniteDistribution) -> Self {
        Self {
            id: id.into(),
            b,
            phat,
            truth,
            tail_override: None,
        }
    }

    pub fn buy_cost(&self) -> BuyCost {
        BuyCost::new(self.b).expect("corpus instances carry valid buy costs")
    }

    /// The prediction's tail profile, or the injected override.
    pub fn phat_profile(&self) -> TailProfile {
        match &self.tail_override {
            Some(q) => TailProfile::from_raw(q.clone()),
            None => self.phat.tail_profile(),
        }
    }
}

/// Instances plus the generated families they came from.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub instances: Vec<CorpusInstance>,
    pub families: Vec<InstanceFamily>,
}

impl Corpus {
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty() && self.families.is_empty()
    }

    /// Every distribution in the corpus with a role-qualified id.
    pub fn distributions(&self) -> Vec<(String, &FiniteDistribution, BuyCost)> {
        let mut out = Vec::with_capacity(2 * self.instances.len());
        for inst in &self.instances {
            let b = inst.buy_cost();
            out.push((format!("{}/phat", inst.id), &inst.phat, b));
            out.push((format!("{}/truth", inst.id), &inst.truth, b));
        }
        out
    }
}

/// Builds the standard corpus: every generator at `b in {16, 64, 256}` plus
/// seeded random instances.
pub fn builtin_corpus(seed: u64) -> Corpus {
    let mut corpus = Corpus::default();
    for bv in [16u32, 64, 256] {
        let b = BuyCost::new(bv).expect("valid");
        add_family_instances(&mut corpus, b);
    }
    add_random_instances(&mut corpus, seed, RANDOM_INSTANCES);
    corpus
}

fn add_family_instances(corpus: &mut Corpus, b: BuyCost) {
    let bv = b.get();

    let thm7 = gen_thm7_prediction(b);
    let phat = thm7.prediction.clone().expect("thm7 ships a prediction");
    let hard = thm7.truths[0].clone();
    corpus.instances.push(CorpusInstance::new(
        format!("thm7-b{bv}-self"),
        bv,
        phat.clone(),
        phat.clone(),
    ));
    corpus.instances.push(CorpusInstance::new(
        format!("thm7-b{bv}-hard"),
        bv,
        phat,
        hard,
    ));
    corpus.families.push(thm7);

    let thm3 = gen_thm3_family(b, 0.5).expect("feasible at b >= 16");
    let mixture = uniform_mixture(&thm3.truths);
    for (j, truth) in thm3.truths.iter().enumerate() {
        corpus.instances.push(CorpusInstance::new(
            format!("thm3-b{bv}-j{:02}", j + 1),
            bv,
            mixture.clone(),
            truth.clone(),
        ));
    }
    corpus.families.push(thm3);

    let thm4 = gen_thm4_pair(b, 1e-3).expect("feasible");
    push_pair(corpus, "thm4", bv, &thm4.truths[0], &thm4.truths[1]);
    corpus.families.push(thm4);

    if b.sqrt_floor().pow(2) == bv && bv >= 16 {
        let thm5 = gen_thm5_pair(b).expect("perfect square");
        push_pair(corpus, "thm5", bv, &thm5.truths[0], &thm5.truths[1]);
        corpus.families.push(thm5);
    }

    let hindsight = gen_hindsight_example(b).expect("even b");
    let truth = hindsight.truths[0].clone();
    corpus.instances.push(CorpusInstance::new(
        format!("hindsight-b{bv}"),
        bv,
        truth.clone(),
        truth,
    ));
    corpus.families.push(hindsight);

    let bimodal = gen_bimodal_intro(b);
    let n = bimodal.support_bound();
    corpus.instances.push(CorpusInstance::new(
        format!("bimodal-b{bv}-self"),
        bv,
        bimodal.clone(),
        bimodal.clone(),
    ));
    corpus.instances.push(CorpusInstance::new(
        format!("bimodal-b{bv}-point"),
        bv,
        FiniteDistribution::point_mass(2, n).expect("in range"),
        bimodal,
    ));
}

fn push_pair(
    corpus: &mut Corpus,
    tag: &str,
    bv: u32,
    p1: &FiniteDistribution,
    p2: &FiniteDistribution,
) {
    let mixture = uniform_mixture(&[p1.clone(), p2.clone()]);
    corpus.instances.push(CorpusInstance::new(
        format!("{tag}-b{bv}-cross12"),
        bv,
        p1.clone(),
        p2.clone(),
    ));
    corpus.instances.push(CorpusInstance::new(
        format!("{tag}-b{bv}-cross21"),
        bv,
        p2.clone(),
        p1.clone(),
    ));
    corpus.instances.push(CorpusInstance::new(
        format!("{tag}-b{bv}-mix1"),
        bv,
        mixture.clone(),
        p1.clone(),
    ));
    corpus.instances.push(CorpusInstance::new(
        format!("{tag}-b{bv}-mix2"),
        bv,
        mixture,
        p2.clone(),
    ));
}

/// Seeded random instances mixing exact, perturbed, independent, and
/// point-mass predictions/truths.
pub fn add_random_instances(corpus: &mut Corpus, seed: u64, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs = [16u32, 64, 256];
    for i in 0..count {
        let bv = bs[i % bs.len()];
        let n = rng.random_range(4..=48);
        let truth = random_dist(&mut rng, n);
        let phat = match i % 5 {
            0 => truth.clone(),
            1 => perturbed(&mut rng, &truth),
            2 => random_dist(&mut rng, n),
            3 => {
                // Point prediction against a spread truth.
                let t = rng.random_range(1..=n);
                FiniteDistribution::point_mass(t, n).expect("in range")
            }
            _ => {
                // Spread prediction against a point truth.
                let spread = random_dist(&mut rng, n);
                let t = rng.random_range(1..=n);
                let point = FiniteDistribution::point_mass(t, n).expect("in range");
                corpus.instances.push(CorpusInstance::new(
                    format!("rand-{i:03}"),
                    bv,
                    spread,
                    point,
                ));
                continue;
            }
        };
        corpus
            .instances
            .push(CorpusInstance::new(format!("rand-{i:03}"), bv, phat, truth));
    }
}

/// Standalone seeded distributions (at most 12 atoms each), for test suites
/// that need raw material rather than instances.
pub fn random_distributions(seed: u64, count: usize, max_n: usize) -> Vec<FiniteDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(4..=max_n.max(4));
            random_dist(&mut rng, n)
        })
        .collect()
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> FiniteDistribution {
    let atom_count = rng.random_range(1..=n.min(12));
    let mut days: Vec<usize> = Vec::with_capacity(atom_count);
    while days.len() < atom_count {
        let d = rng.random_range(1..=n);
        if !days.contains(&d) {
            days.push(d);
        }
    }
    days.sort_unstable();
    let weights: Vec<f64> = (0..atom_count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let atoms: Vec<(usize, f64)> = days
        .into_iter()
        .zip(weights.iter().map(|w| w / total))
        .collect();
    FiniteDistribution::from_atoms(n, &atoms).expect("normalized atoms")
}

fn perturbed(rng: &mut ChaCha8Rng, base: &FiniteDistribution) -> FiniteDistribution {
    let n = base.support_bound();
    let mut out = base.clone();
    let moves = rng.random_range(1..=3);
    for _ in 0..moves {
        let atoms = out.atoms();
        let &(from, mass) = &atoms[rng.random_range(0..atoms.len())];
        let to = rng.random_range(1..=n);
        let eps = mass * rng.random_range(0.0..0.5);
        out = out.shift_perturb(from, to, eps).expect("mass available");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpus_is_deterministic_and_sized() {
        let a = builtin_corpus(DEFAULT_SEED);
        let b = builtin_corpus(DEFAULT_SEED);
        assert_eq!(a.instances.len(), b.instances.len());
        assert!(a.instances.len() > RANDOM_INSTANCES);
        assert_eq!(a.families.len(), b.families.len());
        for (x, y) in a.instances.iter().zip(&b.instances) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.phat, y.phat);
            assert_eq!(x.truth, y.truth);
        }
    }

    #[test]
    fn random_instances_are_valid() {
        let corpus = builtin_corpus(1);
        for inst in &corpus.instances {
            inst.phat.validate().unwrap();
            inst.truth.validate().unwrap();
        }
    }

    #[test]
    fn corpus_carries_every_family() {
        let corpus = builtin_corpus(DEFAULT_SEED);
        let names: Vec<&str> = corpus.families.iter().map(|f| f.name.as_str()).collect();
        for want in ["thm7-b16", "thm3-b64", "thm4-b256", "thm5-b16", "hindsight-b256"] {
            assert!(names.contains(&want), "missing {want}");
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let corpus = builtin_corpus(2);
        let inst = &corpus.instances[0];
        let text = serde_json::to_string(inst).unwrap();
        let back: CorpusInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back.id, inst.id);
        assert_eq!(back.phat, inst.phat);
    }
}
