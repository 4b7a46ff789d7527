//! Python bindings for the main skirent types and operations.
//!
//! Policies cross the boundary as `Optional[int]`: a finite threshold `K`
//! means rent `K` days then buy, `None` means rent forever.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skirent::adversary;
use skirent::harness::report;
use skirent::policy::{self, BuyCost, Policy};
use skirent::predictors::{self, PredictorSpec};
use skirent::transport;
use skirent::FiniteDistribution;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn buy_cost(b: u32) -> PyResult<BuyCost> {
    BuyCost::new(b).map_err(value_err)
}

fn to_policy(k: Option<usize>) -> Policy {
    match k {
        Some(k) => Policy::BuyAfter(k),
        None => Policy::RentForever,
    }
}

/// Probability mass function over days 1..=N.
#[pyclass(name = "Distribution", from_py_object)]
#[derive(Clone)]
struct PyDistribution {
    inner: FiniteDistribution,
}

#[pymethods]
impl PyDistribution {
    /// Build from sparse (day, mass) atoms over support 1..=n.
    #[new]
    fn new(n: usize, atoms: Vec<(usize, f64)>) -> PyResult<Self> {
        FiniteDistribution::from_atoms(n, &atoms)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    /// All mass on day t.
    #[staticmethod]
    fn point_mass(t: usize, n: usize) -> PyResult<Self> {
        FiniteDistribution::point_mass(t, n)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn support_bound(&self) -> usize {
        self.inner.support_bound()
    }

    fn atoms(&self) -> Vec<(usize, f64)> {
        self.inner.atoms()
    }

    fn mass(&self, day: usize) -> f64 {
        self.inner.mass(day)
    }

    fn tail_mass(&self, k: usize) -> f64 {
        self.inner.tail_mass(k)
    }

    fn hit_time(&self, gamma: f64) -> usize {
        self.inner.hit_time(gamma)
    }

    fn expectation(&self) -> f64 {
        self.inner.expectation()
    }

    fn shift_perturb(&self, from: usize, to: usize, eps: f64) -> PyResult<Self> {
        self.inner
            .shift_perturb(from, to, eps)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Distribution(n={}, atoms={})",
            self.inner.support_bound(),
            self.inner.atoms().len()
        )
    }
}

/// Wasserstein-1 distance between two distributions.
#[pyfunction]
fn emd(a: &PyDistribution, b: &PyDistribution) -> f64 {
    transport::emd(&a.inner, &b.inner)
}

/// Exact distance from the min-cost-flow oracle (small instances only).
#[pyfunction]
fn emd_oracle(a: &PyDistribution, b: &PyDistribution) -> PyResult<f64> {
    transport::emd_oracle(&a.inner, &b.inner).map_err(value_err)
}

/// The monotone optimal transport plan as (from, to, mass) triples.
#[pyfunction]
fn optimal_plan(a: &PyDistribution, b: &PyDistribution) -> Vec<(usize, usize, f64)> {
    transport::optimal_plan(&a.inner, &b.inner)
        .entries()
        .iter()
        .map(|e| (e.from, e.to, e.mass))
        .collect()
}

/// Absolute difference of means; a lower bound on the transport distance.
#[pyfunction]
fn centroid_gap(a: &PyDistribution, b: &PyDistribution) -> f64 {
    transport::centroid_gap(&a.inner, &b.inner)
}

/// Expected cost of the policy that rents k days then buys (None: forever).
#[pyfunction]
fn policy_cost(d: &PyDistribution, k: Option<usize>, b: u32) -> PyResult<f64> {
    Ok(policy::policy_cost(&d.inner, to_policy(k), buy_cost(b)?))
}

/// Same cost computed purely from the tail profile; finite thresholds only.
#[pyfunction]
fn policy_cost_tail_form(d: &PyDistribution, k: usize, b: u32) -> PyResult<f64> {
    Ok(policy::policy_cost_tail_form(&d.inner, k, buy_cost(b)?))
}

/// (threshold, cost) of the cheapest policy; threshold None is rent-forever.
#[pyfunction]
fn optimal_policy(d: &PyDistribution, b: u32) -> PyResult<(Option<usize>, f64)> {
    let opt = policy::optimal_policy(&d.inner, buy_cost(b)?);
    Ok((opt.policy.threshold(), opt.cost))
}

/// Expected cost of a policy minus the optimal expected cost.
#[pyfunction]
fn additive_loss(d: &PyDistribution, k: Option<usize>, b: u32) -> PyResult<f64> {
    Ok(policy::additive_loss(&d.inner, to_policy(k), buy_cost(b)?))
}

/// E[min(T, b)], the unattainable per-realization benchmark.
#[pyfunction]
fn hindsight_cost(d: &PyDistribution, b: u32) -> PyResult<f64> {
    Ok(policy::hindsight_cost(&d.inner, buy_cost(b)?))
}

/// Run a named predictor (base | main | lambda:<v> | point-truth |
/// classical) and return its policy and trace.
#[pyfunction]
fn predict<'py>(
    py: Python<'py>,
    name: &str,
    phat: &PyDistribution,
    b: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let spec: PredictorSpec = name.parse().map_err(value_err)?;
    let b = buy_cost(b)?;
    let out = PyDict::new(py);
    out.set_item("predictor", spec.to_string())?;
    let traced = match spec {
        PredictorSpec::Base => Some(predictors::base_predictor(&phat.inner, b)),
        PredictorSpec::Main => Some(predictors::main_predictor(&phat.inner, b)),
        PredictorSpec::Lambda(l) => {
            Some(predictors::lambda_robust_predictor(&phat.inner, b, l).map_err(value_err)?)
        }
        PredictorSpec::PointTruth => Some(predictors::point_truth_predictor(&phat.inner, b)),
        PredictorSpec::Classical => None,
    };
    match traced {
        Some((policy, trace)) => {
            out.set_item("policy", policy.threshold())?;
            out.set_item("k_hat", trace.k_hat.threshold())?;
            out.set_item("u", trace.u)?;
            out.set_item("k_star", trace.k_star.threshold())?;
            out.set_item("branch", trace.branch.to_string())?;
            out.set_item("sqrt_b", trace.sqrt_b)?;
        }
        None => {
            let policy = predictors::classical_predictor(b);
            out.set_item("policy", policy.threshold())?;
        }
    }
    Ok(out)
}

/// The prediction-free rule: rent until day b - 1, then buy.
#[pyfunction]
fn classical_policy(b: u32) -> PyResult<usize> {
    Ok(predictors::classical_predictor(buy_cost(b)?)
        .threshold()
        .expect("classical rule is finite"))
}

/// Evaluate a predictor on a (prediction, truth, b) triple; returns the
/// report fields.
#[pyfunction]
fn run_instance<'py>(
    py: Python<'py>,
    instance_id: &str,
    phat: &PyDistribution,
    truth: &PyDistribution,
    b: u32,
    predictor: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let spec: PredictorSpec = predictor.parse().map_err(value_err)?;
    let r = report::run_instance(instance_id, &phat.inner, &truth.inner, buy_cost(b)?, &spec);
    let out = PyDict::new(py);
    out.set_item("instance_id", &r.instance_id)?;
    out.set_item("b", r.b)?;
    out.set_item("predictor", &r.predictor)?;
    out.set_item("emd", r.emd)?;
    out.set_item("alg_policy", r.alg_policy.threshold())?;
    out.set_item("opt_policy", r.opt_policy.threshold())?;
    out.set_item("alg_cost", r.alg_cost)?;
    out.set_item("opt_cost", r.opt_cost)?;
    out.set_item("diff", r.diff)?;
    out.set_item("ratio_sqrt", r.ratio_sqrt)?;
    out.set_item("ratio_blog", r.ratio_blog)?;
    Ok(out)
}

/// Generate a hard-instance family (thm3 | thm4 | thm5 | thm7 | hindsight)
/// and self-check it; distributions come back as atom lists.
#[pyfunction]
#[pyo3(signature = (name, b, eps=0.5, delta=1e-3))]
fn family<'py>(
    py: Python<'py>,
    name: &str,
    b: u32,
    eps: f64,
    delta: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = buy_cost(b)?;
    let fam = match name {
        "thm3" => adversary::gen_thm3_family(b, eps).map_err(value_err)?,
        "thm4" => adversary::gen_thm4_pair(b, delta).map_err(value_err)?,
        "thm5" => adversary::gen_thm5_pair(b).map_err(value_err)?,
        "thm7" => adversary::gen_thm7_prediction(b),
        "hindsight" => adversary::gen_hindsight_example(b).map_err(value_err)?,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    let out = PyDict::new(py);
    out.set_item("name", &fam.name)?;
    out.set_item("b", fam.b.get())?;
    out.set_item("prediction", fam.prediction.as_ref().map(|d| d.atoms()))?;
    out.set_item("predicted_opt", fam.predicted_opt.map(|p| p.threshold()))?;
    out.set_item(
        "truths",
        fam.truths.iter().map(|d| d.atoms()).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "claimed_opts",
        fam.claimed_opts
            .iter()
            .map(|p| p.threshold())
            .collect::<Vec<_>>(),
    )?;
    out.set_item("params", fam.params.clone())?;
    out.set_item("self_check_passed", fam.self_check().all_passed())?;
    Ok(out)
}

/// The bimodal example with modes at day 2 and day 2b.
#[pyfunction]
fn bimodal(b: u32) -> PyResult<PyDistribution> {
    Ok(PyDistribution {
        inner: adversary::gen_bimodal_intro(buy_cost(b)?),
    })
}

#[pymodule]
fn skirent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_function(wrap_pyfunction!(emd, m)?)?;
    m.add_function(wrap_pyfunction!(emd_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_plan, m)?)?;
    m.add_function(wrap_pyfunction!(centroid_gap, m)?)?;
    m.add_function(wrap_pyfunction!(policy_cost, m)?)?;
    m.add_function(wrap_pyfunction!(policy_cost_tail_form, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_policy, m)?)?;
    m.add_function(wrap_pyfunction!(additive_loss, m)?)?;
    m.add_function(wrap_pyfunction!(hindsight_cost, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(classical_policy, m)?)?;
    m.add_function(wrap_pyfunction!(run_instance, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(bimodal, m)?)?;
    Ok(())
}
