//! One-shot calibration pass: prints the measured values behind the
//! constants recorded in `harness::calibration`.
//!
//! Run with `cargo run --example calibrate`.

use skirent::adversary::{
    gen_thm5_pair, gen_thm7_prediction, minimax_additive_loss, smallest_consistent_threshold,
};
use skirent::harness::corpus::{builtin_corpus, DEFAULT_SEED};
use skirent::harness::sweep::{sweep_emd, SweepSpec};
use skirent::policy::{additive_loss, optimal_policy, policy_cost, BuyCost, Policy};
use skirent::predictors::point_truth_predictor;
use skirent::transport::emd;
use skirent::FiniteDistribution;

fn main() {
    let corpus = builtin_corpus(DEFAULT_SEED);

    println!("== thm5 minimax / sqrt(b) ==");
    for bv in [16u32, 64, 256] {
        let b = BuyCost::new(bv).unwrap();
        let fam = gen_thm5_pair(b).unwrap();
        let (policy, value) = minimax_additive_loss(&fam.truths, b);
        println!(
            "b={bv}: minimax {value} at {policy}, ratio {}",
            value / (bv as f64).sqrt()
        );
    }

    println!("== thm7 consistency tradeoff ==");
    for bv in [16u32, 64, 256] {
        let b = BuyCost::new(bv).unwrap();
        let fam = gen_thm7_prediction(b);
        let pred = fam.prediction.as_ref().unwrap();
        let slack = 2.0 * f64::from(b.sqrt_floor());
        let b_min = smallest_consistent_threshold(pred, b, slack);
        let max_slack =
            policy_cost(pred, Policy::BuyAfter(0), b) - optimal_policy(pred, b).cost;
        let blogb = (bv as f64) * (bv as f64).ln();
        println!(
            "b={bv}: B_min {b_min}, max slack {max_slack}, threshold {slack}, ratio {}",
            b_min as f64 / blogb
        );
    }

    println!("== sweep envelope ==");
    let mut envelope: f64 = 0.0;
    for bv in [16u32, 64, 256] {
        let base = FiniteDistribution::from_atoms(
            2 * bv as usize,
            &[(bv as usize / 2, 0.5), (2 * bv as usize, 0.5)],
        )
        .unwrap();
        let spec = SweepSpec {
            base_truth: base,
            b: bv,
            emd_targets: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            seed: DEFAULT_SEED,
            predictor: "main".to_string(),
        };
        for r in sweep_emd(&spec).unwrap() {
            let cap = r.bound_sqrt.min(r.bound_blog);
            let ratio = r.diff / cap;
            if ratio > envelope {
                envelope = ratio;
                println!(
                    "  new max at b={bv} {}: diff {} / {cap} = {ratio}",
                    r.instance_id, r.diff
                );
            }
        }
    }
    println!("envelope = {envelope}");

    println!("== point-truth ratio ==");
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for inst in &corpus.instances {
        if inst.truth.atoms().len() != 1 {
            continue;
        }
        let b = inst.buy_cost();
        let (policy, _) = point_truth_predictor(&inst.phat, b);
        let loss = additive_loss(&inst.truth, policy, b);
        let eta = emd(&inst.phat, &inst.truth);
        if eta > 1e-9 && loss / eta > worst {
            worst = loss / eta;
            worst_at = inst.id.clone();
        }
    }
    println!("max diff/emd = {worst} at {worst_at}");
}
