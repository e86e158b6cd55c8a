//! Command-line front end. `run` returns the process exit status:
//! 0 on success, 2 on a usage error, 1 on a data or runtime error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::distributions::HeavyTailModel;
use crate::error::{Error, Result};
use crate::estimators::{estimate_report, p_hat, EstimatorId};
use crate::format::{sig6, sig6_opt};
use crate::harness::{default_k_grid, run_bias_rmse, McConfig};
use crate::sample::{
    derive_survival, read_csv, read_survival_csv, sort_with_concomitants, write_csv,
    SortedCensoredSample,
};
use crate::selection::{default_k_min, reiss_thomas_k, DEFAULT_THETA};
use crate::tail_process::{gof_pvalue, GofReport};

pub const ESTIMATE_HEADER: &str = "estimator,k,value,p_hat,std_err,ci_lo,ci_hi";
pub const SELECT_HEADER: &str = "k_star,theta,estimator";

#[derive(Debug, Parser)]
#[command(
    name = "censtail",
    version,
    about = "Tail index estimation for right-censored heavy-tailed data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo bias/RMSE study over a grid of k.
    Simulate(SimulateArgs),
    /// Point estimates, standard errors and intervals.
    Estimate(EstimateArgs),
    /// Reiss–Thomas choice of k.
    SelectK(SelectArgs),
    /// KS and CvM statistics with bootstrap p-values.
    Gof(GofArgs),
    /// Turn `start,end,status` records into a `z,delta` sample.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Lifetime model, e.g. `burr:1,2,1`.
    #[arg(long)]
    model: HeavyTailModel,
    /// Censoring model; omit together with `--complete-data`.
    #[arg(long, required_unless_present = "complete_data")]
    censor: Option<HeavyTailModel>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated thresholds; defaults to 5..n-5 with at most 100 points.
    #[arg(long, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', default_value = "hill,efg,ww1,ww2,new")]
    estimators: Vec<EstimatorId>,
    /// Uncensored samples from `--model`.
    #[arg(long)]
    complete_data: bool,
    /// Worker threads (output does not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KChoice {
    Fixed(usize),
    Auto,
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        s.parse()
            .map(KChoice::Fixed)
            .map_err(|_| format!("expected an integer or `auto`, got `{s}`"))
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Threshold, or `auto` for the Reiss–Thomas choice.
    #[arg(long, required_unless_present = "all_k", conflicts_with = "all_k")]
    k: Option<KChoice>,
    #[arg(long, value_delimiter = ',', default_value = "new")]
    estimator: Vec<EstimatorId>,
    /// Confidence level for the normal interval.
    #[arg(long)]
    ci: Option<f64>,
    /// One row for every admissible k.
    #[arg(long)]
    all_k: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "new")]
    estimator: EstimatorId,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    /// Smallest candidate; defaults to max(ceil(sqrt(n)), path start + 1).
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest candidate; defaults to n - 1.
    #[arg(long)]
    k_max: Option<usize>,
    /// Also write the `k,criterion` curve here.
    #[arg(long)]
    criterion_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GofArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Raw `start,end,status` CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `argv` (program name first) and executes the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::SelectK(a) => select_k(a),
        Command::Gof(a) => gof(a),
        Command::Convert(a) => convert(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn load(path: &Path) -> Result<SortedCensoredSample> {
    sort_with_concomitants(&read_csv(path)?)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    // with complete data the censoring model only fills the config slot
    let model_y = a.censor.unwrap_or(a.model);
    let cfg = McConfig {
        model_x: a.model,
        model_y,
        n: a.n,
        reps: a.reps,
        k_grid: a.k_grid.unwrap_or_else(|| default_k_grid(a.n)),
        estimators: a.estimators,
        seed: a.seed,
        complete_data: a.complete_data,
    };
    let res = run_bias_rmse(&cfg, a.workers)?;
    match a.out {
        Some(path) => res.write(&path).map(|_| ()),
        None => emit(None, &res.to_csv()),
    }
}

fn estimate_row(
    out: &mut String,
    s: &SortedCensoredSample,
    id: EstimatorId,
    k: usize,
    ci: Option<f64>,
) -> Result<()> {
    match estimate_report(s, id, k, ci) {
        Ok(r) => {
            let (lo, hi) = r.ci.unzip();
            let _ = writeln!(
                out,
                "{id},{k},{},{},{},{},{}",
                sig6(r.value),
                sig6(r.p_hat),
                sig6_opt(r.std_err),
                sig6_opt(lo),
                sig6_opt(hi)
            );
        }
        Err(Error::Undefined(_)) => {
            let _ = writeln!(out, "{id},{k},NA,{},NA,NA,NA", sig6(p_hat(s, k)?));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn estimate(a: EstimateArgs) -> Result<()> {
    if let Some(level) = a.ci {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::domain(format!(
                "--ci must lie in (0, 1), got {level}"
            )));
        }
    }
    let s = load(&a.input)?;
    let n = s.len();
    let mut out = String::from(ESTIMATE_HEADER);
    out.push('\n');
    for &id in &a.estimator {
        let ks: Vec<usize> = match a.k {
            _ if a.all_k => (id.min_k()..n).collect(),
            Some(KChoice::Fixed(k)) => vec![k],
            Some(KChoice::Auto) => {
                vec![reiss_thomas_k(&s, id, DEFAULT_THETA, default_k_min(n, id), n - 1)?.k_star]
            }
            None => unreachable!("clap requires --k or --all-k"),
        };
        for k in ks {
            estimate_row(&mut out, &s, id, k, a.ci)?;
        }
    }
    emit(a.out.as_deref(), &out)
}

fn select_k(a: SelectArgs) -> Result<()> {
    let s = load(&a.input)?;
    let n = s.len();
    let k_min = a.k_min.unwrap_or_else(|| default_k_min(n, a.estimator));
    let k_max = a.k_max.unwrap_or(n.saturating_sub(1));
    let sel = reiss_thomas_k(&s, a.estimator, a.theta, k_min, k_max)?;
    if let Some(path) = &a.criterion_out {
        emit(Some(path), &sel.criterion_csv())?;
    }
    let text = format!(
        "{SELECT_HEADER}\n{},{},{}\n",
        sel.k_star,
        sig6(sel.theta),
        sel.estimator
    );
    emit(a.out.as_deref(), &text)
}

fn gof(a: GofArgs) -> Result<()> {
    let s = load(&a.input)?;
    let report = gof_pvalue(&s, a.k, a.reps, a.seed)?;
    emit(
        a.out.as_deref(),
        &format!("{}\n{}\n", GofReport::CSV_HEADER, report.csv_row()),
    )
}

fn convert(a: ConvertArgs) -> Result<()> {
    let obs = derive_survival(&read_survival_csv(&a.input)?)?;
    match a.out {
        Some(path) => write_csv(path, &obs),
        None => {
            let mut buf = Vec::new();
            crate::sample::write_observations(&mut buf, &obs)?;
            emit(None, &String::from_utf8_lossy(&buf))
        }
    }
}
