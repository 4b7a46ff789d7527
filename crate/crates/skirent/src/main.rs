//! Command-line surface: policy evaluation, transport distances, experiment
//! runs, seeded sweeps, hard-instance generation, and the verification
//! suite.
//!
//! Exit codes: 0 ok, 1 invariant failure, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skirent::adversary::{
    gen_bimodal_intro, gen_hindsight_example, gen_thm3_family, gen_thm4_pair, gen_thm5_pair,
    gen_thm7_prediction, InstanceFamily,
};
use skirent::harness::corpus::{builtin_corpus, Corpus, CorpusInstance, DEFAULT_SEED};
use skirent::harness::report::{emit_reports, run_instance, ReportFormat};
use skirent::harness::sweep::{sweep_emd, SweepSpec};
use skirent::harness::verify::verify_suite;
use skirent::policy::{hindsight_cost, optimal_policy, BuyCost};
use skirent::predictors::PredictorSpec;
use skirent::transport::{emd, optimal_plan};
use skirent::FiniteDistribution;

/// Environment variable overriding every seed baked into specs.
const SEED_ENV: &str = "SKIRENT_SEED";

#[derive(Parser)]
#[command(name = "skirent", version, about = "Ski rental with distributional predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal policy, its expected cost, and the hindsight benchmark.
    Opt {
        /// Distribution file: {"N": int, "atoms": [[day, mass], ...]}.
        dist: PathBuf,
        #[arg(long)]
        b: u32,
    },
    /// Wasserstein-1 distance between two distributions.
    Emd {
        a: PathBuf,
        b: PathBuf,
        /// Also write the optimal transport plan as CSV rows x,y,mass.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Evaluate one predictor on a (prediction, truth, b) triple.
    Run {
        /// base | main | lambda:<value> | point-truth | classical.
        #[arg(long)]
        pred: String,
        #[arg(long)]
        phat: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        b: u32,
        #[arg(long, default_value = "run")]
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a seeded EMD sweep described by a spec file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a hard-instance family and self-check its claims.
    Adversary {
        /// thm3 | thm4 | thm5 | thm7 | hindsight | bimodal.
        #[arg(long)]
        family: String,
        #[arg(long)]
        b: u32,
        /// Decay parameter for thm3.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Separation parameter for thm4.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Directory to write the distribution files into.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run every registered invariant check.
    Verify {
        /// Directory of instance files; defaults to the built-in corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// csv | json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn dispatch(command: Command) -> Result<ExitCode, AnyError> {
    match command {
        Command::Opt { dist, b } => {
            let d = load_dist(&dist)?;
            let b = BuyCost::new(b)?;
            let opt = optimal_policy(&d, b);
            println!("optimal policy: {}", opt.policy);
            println!("expected cost: {}", opt.cost);
            println!("hindsight cost: {}", hindsight_cost(&d, b));
            Ok(ExitCode::SUCCESS)
        }
        Command::Emd { a, b, plan } => {
            let da = load_dist(&a)?;
            let db = load_dist(&b)?;
            println!("emd: {}", emd(&da, &db));
            if let Some(path) = plan {
                let p = optimal_plan(&da, &db);
                fs::write(&path, p.to_csv())?;
                println!(
                    "plan: {} entries, cost {}, written to {}",
                    p.entries().len(),
                    p.cost(),
                    path.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            pred,
            phat,
            truth,
            b,
            id,
            output,
        } => {
            let predictor: PredictorSpec = pred.parse()?;
            let phat = load_dist(&phat)?;
            let truth = load_dist(&truth)?;
            let b = BuyCost::new(b)?;
            let report = run_instance(&id, &phat, &truth, b, &predictor);
            write_reports(&[report], &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { spec, output } => {
            let mut spec: SweepSpec = serde_json::from_str(&fs::read_to_string(&spec)?)?;
            if let Some(seed) = seed_override()? {
                spec.seed = seed;
            }
            let reports = sweep_emd(&spec)?;
            write_reports(&reports, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Adversary {
            family,
            b,
            eps,
            delta,
            out_dir,
        } => {
            let b = BuyCost::new(b)?;
            if family == "bimodal" {
                let d = gen_bimodal_intro(b);
                fs::create_dir_all(&out_dir)?;
                let path = out_dir.join(format!("bimodal-b{}.json", b.get()));
                fs::write(&path, serde_json::to_string_pretty(&d)?)?;
                println!("bimodal-b{}: atoms {:?}", b.get(), d.atoms());
                println!("written {}", path.display());
                return Ok(ExitCode::SUCCESS);
            }
            let fam = match family.as_str() {
                "thm3" => gen_thm3_family(b, eps)?,
                "thm4" => gen_thm4_pair(b, delta)?,
                "thm5" => gen_thm5_pair(b)?,
                "thm7" => gen_thm7_prediction(b),
                "hindsight" => gen_hindsight_example(b)?,
                other => return Err(format!("unknown family {other:?}").into()),
            };
            emit_family(&fam, &out_dir)?;
            let report = fam.self_check();
            let mut ok = true;
            for check in &report.checks {
                let tag = if check.passed { "ok  " } else { "FAIL" };
                println!("{tag} {}: {}", check.name, check.detail);
                ok &= check.passed;
            }
            if ok {
                println!("self-check passed for {}", fam.name);
                Ok(ExitCode::SUCCESS)
            } else {
                println!("self-check FAILED for {}", fam.name);
                Ok(ExitCode::from(1))
            }
        }
        Command::Verify { corpus } => {
            let seed = seed_override()?.unwrap_or(DEFAULT_SEED);
            let corpus = match corpus {
                Some(dir) => load_corpus_dir(&dir, seed)?,
                None => builtin_corpus(seed),
            };
            let summary = verify_suite(&corpus)?;
            print!("{summary}");
            if summary.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn seed_override() -> Result<Option<u64>, AnyError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => Ok(Some(
            v.parse()
                .map_err(|_| format!("{SEED_ENV} must be a u64, got {v:?}"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn load_dist(path: &Path) -> Result<FiniteDistribution, AnyError> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text)
        .map_err(|e| format!("invalid distribution {}: {e}", path.display()))?)
}

fn write_reports(
    reports: &[skirent::harness::report::ExperimentReport],
    output: &OutputArgs,
) -> Result<(), AnyError> {
    let format = match output.format.as_str() {
        "csv" => ReportFormat::Csv,
        "json" => ReportFormat::Json,
        other => return Err(format!("unknown format {other:?} (expected csv or json)").into()),
    };
    match &output.out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            emit_reports(reports, format, &mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            emit_reports(reports, format, &mut stdout.lock())?;
        }
    }
    Ok(())
}

fn emit_family(fam: &InstanceFamily, out_dir: &Path) -> Result<(), AnyError> {
    fs::create_dir_all(out_dir)?;
    if let Some(pred) = &fam.prediction {
        let path = out_dir.join(format!("{}-prediction.json", fam.name));
        fs::write(&path, serde_json::to_string_pretty(pred)?)?;
        println!("written {}", path.display());
    }
    for (i, truth) in fam.truths.iter().enumerate() {
        let path = out_dir.join(format!("{}-truth-{i:02}.json", fam.name));
        fs::write(&path, serde_json::to_string_pretty(truth)?)?;
        println!("written {}", path.display());
    }
    let meta = serde_json::json!({
        "name": fam.name,
        "b": fam.b.get(),
        "params": fam.params,
        "predicted_opt": fam.predicted_opt.map(|p| p.field()),
        "claimed_opts": fam.claimed_opts.iter().map(|p| p.field()).collect::<Vec<_>>(),
    });
    let path = out_dir.join(format!("{}-family.json", fam.name));
    fs::write(&path, serde_json::to_string_pretty(&meta)?)?;
    println!("written {}", path.display());
    Ok(())
}

/// Loads every `*.json` instance file in a directory. The generated families
/// are always checked alongside; they are construction self-tests rather
/// than data.
fn load_corpus_dir(dir: &Path, seed: u64) -> Result<Corpus, AnyError> {
    let mut corpus = Corpus {
        instances: Vec::new(),
        families: builtin_corpus(seed).families,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path)?;
        let inst: CorpusInstance = serde_json::from_str(&text)
            .map_err(|e| format!("invalid instance {}: {e}", path.display()))?;
        BuyCost::new(inst.b).map_err(|e| format!("{}: {e}", path.display()))?;
        corpus.instances.push(inst);
    }
    if corpus.instances.is_empty() {
        return Err(format!("no instance files found in {}", dir.display()).into());
    }
    Ok(corpus)
}
