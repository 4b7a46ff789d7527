//! Per-instance experiment records and their CSV/JSON emission.

use std::io::Write;

use serde_json::json;

use crate::dist::FiniteDistribution;
use crate::policy::{optimal_policy, policy_cost, BuyCost, Policy};
use crate::predictors::PredictorSpec;
use crate::transport::emd;

/// Exact column order of the CSV contract.
pub const CSV_HEADER: &str =
    "instance_id,b,predictor,emd,alg_policy,opt_policy,alg_cost,opt_cost,diff,ratio_sqrt,ratio_blog";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One evaluated (prediction, truth, predictor) triple.
///
/// `diff` is the additive loss of the predictor's policy against the optimal
/// policy for the truth; the two ratios normalize it by `⌊√b⌋·max(emd, 1)`
/// and by `b·ln b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub instance_id: String,
    pub b: u32,
    pub predictor: String,
    pub emd: f64,
    pub alg_policy: Policy,
    pub opt_policy: Policy,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub diff: f64,
    pub bound_sqrt: f64,
    pub bound_blog: f64,
    pub ratio_sqrt: f64,
    pub ratio_blog: f64,
}

/// Computes the predictor's policy from the prediction alone, then evaluates
/// it against the truth.
pub fn run_instance(
    instance_id: &str,
    phat: &FiniteDistribution,
    truth: &FiniteDistribution,
    b: BuyCost,
    predictor: &PredictorSpec,
) -> ExperimentReport {
    let alg_policy = predictor.policy(phat, b);
    let opt = optimal_policy(truth, b);
    let alg_cost = policy_cost(truth, alg_policy, b);
    let eta = emd(phat, truth);
    let diff = alg_cost - opt.cost;
    let bound_sqrt = f64::from(b.sqrt_floor()) * eta.max(1.0);
    let bound_blog = b.as_f64() * b.as_f64().ln();
    ExperimentReport {
        instance_id: instance_id.to_string(),
        b: b.get(),
        predictor: predictor.to_string(),
        emd: eta,
        alg_policy,
        opt_policy: opt.policy,
        alg_cost,
        opt_cost: opt.cost,
        diff,
        bound_sqrt,
        bound_blog,
        ratio_sqrt: diff / bound_sqrt,
        ratio_blog: diff / bound_blog,
    }
}

impl ExperimentReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.instance_id,
            self.b,
            self.predictor,
            fmt_g12(self.emd),
            self.alg_policy.field(),
            self.opt_policy.field(),
            fmt_g12(self.alg_cost),
            fmt_g12(self.opt_cost),
            fmt_g12(self.diff),
            fmt_g12(self.ratio_sqrt),
            fmt_g12(self.ratio_blog),
        )
    }

    pub fn json_value(&self) -> serde_json::Value {
        json!({
            "instance_id": self.instance_id,
            "b": self.b,
            "predictor": self.predictor,
            "emd": fmt_g12(self.emd),
            "alg_policy": self.alg_policy.field(),
            "opt_policy": self.opt_policy.field(),
            "alg_cost": fmt_g12(self.alg_cost),
            "opt_cost": fmt_g12(self.opt_cost),
            "diff": fmt_g12(self.diff),
            "ratio_sqrt": fmt_g12(self.ratio_sqrt),
            "ratio_blog": fmt_g12(self.ratio_blog),
        })
    }
}

/// Writes reports sorted by `(instance_id, predictor)` so concurrent
/// producers cannot change the bytes.
pub fn emit_reports(
    reports: &[ExperimentReport],
    format: ReportFormat,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let mut order: Vec<&ExperimentReport> = reports.iter().collect();
    order.sort_by(|a, b| {
        (a.instance_id.as_str(), a.predictor.as_str())
            .cmp(&(b.instance_id.as_str(), b.predictor.as_str()))
    });
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in order {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
        ReportFormat::Json => {
            let values: Vec<serde_json::Value> = order.iter().map(|r| r.json_value()).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&values)?)?;
        }
    }
    Ok(())
}

/// Formats with 12 significant digits, trimming trailing zeros, matching the
/// usual `%.12g` rendering for the magnitudes that occur in reports.
pub fn fmt_g12(x: f64) -> String {
    fmt_g(x, 12)
}

fn fmt_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..sig as i32).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{:.*e}", sig - 1, x);
        // "1.250000000000e-7" -> "1.25e-7"
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{e}", trim_zeros(mantissa)),
            None => s,
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::FiniteDistribution;

    fn b16() -> BuyCost {
        BuyCost::new(16).unwrap()
    }

    #[test]
    fn formats_significant_digits() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(16.0), "16");
        assert_eq!(fmt_g12(0.0645), "0.0645");
        assert_eq!(fmt_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g12(1.25e-7), "1.25e-7");
        assert_eq!(fmt_g12(-2.5), "-2.5");
    }

    #[test]
    fn consistent_point_prediction_has_no_loss() {
        let d = FiniteDistribution::point_mass(10, 20).unwrap();
        let r = run_instance("self", &d, &d, b16(), &PredictorSpec::Main);
        assert_eq!(r.alg_policy, Policy::BuyAfter(14));
        assert!(r.diff.abs() < 1e-12);
        assert!(r.diff <= f64::from(b16().sqrt_floor()) + 16.0 / 4.0);
        assert_eq!(r.emd, 0.0);
    }

    #[test]
    fn classical_report_ignores_the_prediction() {
        let truth = FiniteDistribution::point_mass(9, 40).unwrap();
        let p1 = FiniteDistribution::point_mass(3, 40).unwrap();
        let p2 = FiniteDistribution::point_mass(33, 40).unwrap();
        let a = run_instance("x", &p1, &truth, b16(), &PredictorSpec::Classical);
        let b = run_instance("x", &p2, &truth, b16(), &PredictorSpec::Classical);
        assert_eq!(a.alg_policy, b.alg_policy);
        assert_eq!(a.alg_cost, b.alg_cost);
        assert_eq!(a.diff, b.diff);
    }

    #[test]
    fn empty_emission_is_header_only() {
        let mut buf = Vec::new();
        emit_reports(&[], ReportFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trips_a_report() {
        let d = FiniteDistribution::point_mass(10, 20).unwrap();
        let r = run_instance("one", &d, &d, b16(), &PredictorSpec::Main);
        let mut buf = Vec::new();
        emit_reports(std::slice::from_ref(&r), ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 11);
        assert_eq!(fields[0], "one");
        assert_eq!(fields[1], "16");
        assert_eq!(fields[2], "main");
        assert_eq!(fields[4], "14");
        assert_eq!(fields[8].parse::<f64>().unwrap(), r.diff);
    }

    #[test]
    fn json_uses_the_same_field_names() {
        let d = FiniteDistribution::point_mass(10, 20).unwrap();
        let r = run_instance("one", &d, &d, b16(), &PredictorSpec::Main);
        let mut buf = Vec::new();
        emit_reports(&[r], ReportFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let obj = &v.as_array().unwrap()[0];
        for key in CSV_HEADER.split(',') {
            assert!(obj.get(key).is_some(), "missing {key}");
        }
        assert_eq!(obj["alg_policy"], "14");
    }

    #[test]
    fn rent_forever_policies_render_as_inf() {
        // Tails 0.9^t decay fast enough that renting forever is optimal.
        let n = 60;
        let mut mass = vec![0.0; n];
        let mut q: f64 = 1.0;
        for m in mass.iter_mut().take(n - 1) {
            let next = q * 0.9;
            *m = q - next;
            q = next;
        }
        mass[n - 1] = q;
        let slow = FiniteDistribution::from_dense(mass).unwrap();
        let r = run_instance("inf", &slow, &slow, b16(), &PredictorSpec::Base);
        assert_eq!(r.alg_policy, Policy::RentForever);
        assert!(r.csv_row().contains(",inf,"));
    }
}
