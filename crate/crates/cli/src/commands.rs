use std::path::PathBuf;

use cel::fitting::fit_family;
use cel::gof::{model_comparison_with, Bootstrap, ComparisonEntry, ComparisonOptions};
use cel::properties::{self, EntropyOrder, OrderStatSpec};
use cel::sampling::{run_simulation_study_with, sample_cel, SeededStream, SimSummary};
use cel::{CelDistribution, Family, FitOptions, Theta};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dataset::{load_dataset, DatasetInfo};
use crate::error::CliError;
use crate::plot::write_plot_data;
use crate::report::ReportDocument;
use crate::tables::{write_comparison_csv, write_simulation_csv};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "cel", version, about = "Compounded exponential-Lindley distribution toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one family to a dataset by maximum likelihood.
    Fit(FitArgs),
    /// Fit several families and rank them by AIC, then KS distance.
    Compare(CompareArgs),
    /// Monte Carlo study of the CEL estimator (bias, MSE, variance).
    Simulate(SimulateArgs),
    /// Evaluate a distributional quantity for a given θ.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitOptionArgs {
    /// Confidence level is 1 − alpha.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Score tolerance (CEL) or simplex tolerance (competitors).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Newton steps (cel) or simplex iterations per start (competitors);
    /// defaults to 200 and 2000 respectively.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
}

impl FitOptionArgs {
    fn options(&self) -> Result<FitOptions, CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == Some(0) {
            return Err(CliError::Usage("--max-iter must be positive".into()));
        }
        Ok(FitOptions { tol: self.tol, alpha: self.alpha, max_iter: self.max_iter })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// cel, epl, ep, el, weibull or gamma.
    #[arg(long, default_value = "cel")]
    pub dist: Family,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitOptionArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Data file (one value per line) or builtin:<name>.
    pub dataset: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// `all` or a comma-separated list of families.
    #[arg(long, default_value = "all")]
    pub dist: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitOptionArgs,
    /// Also write the comparison table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Directory for fitted-curve, ecdf, P-P and Q-Q data files.
    #[arg(long = "plot-data")]
    pub plot_data: Option<PathBuf>,
    /// Parametric-bootstrap KS p-value with this many replicates.
    #[arg(long = "bootstrap-ks")]
    pub bootstrap_ks: Option<usize>,
    /// Seed for the bootstrap.
    #[arg(long, env = "CEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    pub dataset: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 2.0)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', default_value = "20,30,50,90,150,200")]
    pub sizes: Vec<usize>,
    /// Replications per sample size (at least 2).
    #[arg(long, default_value_t = 2500, value_parser = clap::value_parser!(u64).range(2..))]
    pub reps: u64,
    #[arg(long, env = "CEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitOptionArgs,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalFn {
    Pdf,
    Cdf,
    Survival,
    Hazard,
    CumHazard,
    Quantile,
    Median,
    Renyi,
    Tsallis,
    Moment,
    TruncatedMean,
    CharFn,
    Bowley,
    Moors,
    OrderStat,
    Sample,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: EvalFn,
    #[arg(long)]
    pub theta: f64,
    /// Evaluation points (pdf, cdf, survival, hazard, cum-hazard, order-stat),
    /// truncation points (truncated-mean) or arguments t (char-fn).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Probabilities for quantile.
    #[arg(long, value_delimiter = ',')]
    pub u: Vec<f64>,
    /// Entropy order.
    #[arg(long)]
    pub order: Option<f64>,
    /// Moment order, or the rank for order-stat.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Sample size (sample), or the number of observations for order-stat.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, env = "CEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A finished command: the document plus the exit code it implies (0, or 3
/// when a fit returned without converging).
pub struct Outcome {
    pub document: ReportDocument,
    pub exit_code: i32,
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Eval(a) => cmd_eval(a),
    }
}

#[derive(Serialize)]
struct Inputs<'a, A: Serialize> {
    flags: &'a A,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<DatasetInfo>,
}

pub fn cmd_fit(a: &FitArgs) -> Result<Outcome, CliError> {
    let opts = a.fit.options()?;
    let data = load_dataset(&a.dataset)?;
    let fit = fit_family(a.dist, &data.sample, &opts)?;
    let exit_code = if fit.converged { 0 } else { 3 };
    let document = ReportDocument::new("fit", Inputs { flags: a, dataset: Some(data.info()) }, &fit)?;
    Ok(Outcome { document, exit_code, out: a.out.clone() })
}

pub fn parse_families(list: &str) -> Result<Vec<Family>, CliError> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in list.split(',') {
        let f: Family = part.parse().map_err(|e: cel::Error| CliError::Usage(e.to_string()))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--dist lists no families".into()));
    }
    Ok(out)
}

pub fn cmd_compare(a: &CompareArgs) -> Result<Outcome, CliError> {
    let opts = a.fit.options()?;
    let families = parse_families(&a.dist)?;
    let bootstrap = match a.bootstrap_ks {
        Some(0) => return Err(CliError::Usage("--bootstrap-ks needs at least one replicate".into())),
        Some(replicates) => Some(Bootstrap { replicates, seed: a.seed }),
        None => None,
    };
    let data = load_dataset(&a.dataset)?;
    let copts = ComparisonOptions { fit: opts, bootstrap, ..Default::default() };
    let entries = model_comparison_with(&data.sample, &families, &copts);
    if let Some(path) = &a.csv {
        write_comparison_csv(path, &entries)?;
    }
    if let Some(dir) = &a.plot_data {
        let reports: Vec<_> = entries.iter().filter_map(ComparisonEntry::report).collect();
        write_plot_data(dir, &data.sample, &reports)?;
    }
    let document = ReportDocument::new("compare", Inputs { flags: a, dataset: Some(data.info()) }, &entries)?;
    Ok(Outcome { document, exit_code: 0, out: a.out.clone() })
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let opts = a.fit.options()?;
    let theta = Theta::new(a.theta).map_err(|e| CliError::Usage(format!("--theta: {e}")))?;
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes must list positive integers".into()));
    }
    let summaries: Vec<SimSummary> =
        run_simulation_study_with(theta, &a.sizes, a.reps as usize, a.seed, &opts)?;
    if let Some(path) = &a.csv {
        write_simulation_csv(path, &summaries)?;
    }
    let document = ReportDocument::new("simulate", Inputs { flags: a, dataset: None }, &summaries)?;
    Ok(Outcome { document, exit_code: 0, out: a.out.clone() })
}

fn need<T: Copy>(v: Option<T>, flag: &str, f: EvalFn) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--fn {} requires {flag}", name(f))))
}

fn need_list<'a>(v: &'a [f64], flag: &str, f: EvalFn) -> Result<&'a [f64], CliError> {
    if v.is_empty() {
        Err(CliError::Usage(format!("--fn {} requires {flag}", name(f))))
    } else {
        Ok(v)
    }
}

fn name(f: EvalFn) -> String {
    f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn pointwise(xs: &[f64], key: &str, f: impl Fn(f64) -> cel::Result<f64>) -> Result<Value, CliError> {
    let rows = xs
        .iter()
        .map(|&x| Ok(json!({ key: x, "value": f(x)? })))
        .collect::<Result<Vec<Value>, CliError>>()?;
    Ok(Value::Array(rows))
}

fn input_err(e: cel::Error) -> CliError {
    if e.is_numerical() {
        CliError::Numerical(e)
    } else {
        CliError::Input { context: "invalid argument".into(), source: e }
    }
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let d = CelDistribution::with_theta(a.theta).map_err(|e| CliError::Usage(format!("--theta: {e}")))?;
    let f = a.function;
    let order = || -> Result<EntropyOrder, CliError> {
        EntropyOrder::new(need(a.order, "--order", f)?).map_err(input_err)
    };
    let results = match f {
        EvalFn::Pdf => pointwise(need_list(&a.x, "--x", f)?, "x", |x| d.pdf(x)),
        EvalFn::Cdf => pointwise(need_list(&a.x, "--x", f)?, "x", |x| d.cdf(x)),
        EvalFn::Survival => pointwise(need_list(&a.x, "--x", f)?, "x", |x| d.survival(x)),
        EvalFn::Hazard => pointwise(need_list(&a.x, "--x", f)?, "x", |x| d.hazard(x)),
        EvalFn::CumHazard => pointwise(need_list(&a.x, "--x", f)?, "x", |x| d.cumulative_hazard(x)),
        EvalFn::Quantile => pointwise(need_list(&a.u, "--u", f)?, "u", |u| d.quantile(u)),
        EvalFn::TruncatedMean => {
            pointwise(need_list(&a.x, "--x", f)?, "m", |m| properties::truncated_mean(&d, m))
        }
        EvalFn::OrderStat => {
            let r = need(a.r, "--r", f)?;
            let m = need(a.n, "--n", f)?;
            if r.fract() != 0.0 || r < 1.0 {
                return Err(CliError::Usage(format!("--r must be a positive integer rank, got {r}")));
            }
            let spec = OrderStatSpec::new(r as usize, m).map_err(input_err)?;
            pointwise(need_list(&a.x, "--x", f)?, "x", |x| properties::order_stat_pdf(&d, spec, x))
        }
        EvalFn::CharFn => {
            let rows = need_list(&a.x, "--x", f)?
                .iter()
                .map(|&t| {
                    let c = properties::char_fn(&d, t)?;
                    Ok(json!({ "t": t, "re": c.re, "im": c.im }))
                })
                .collect::<Result<Vec<Value>, cel::Error>>();
            rows.map(Value::Array).map_err(CliError::from)
        }
        EvalFn::Median => Ok(json!({ "value": d.median() })),
        EvalFn::Renyi => Ok(json!({ "value": properties::renyi_entropy(&d, order()?)? })),
        EvalFn::Tsallis => Ok(json!({ "value": properties::tsallis_entropy(&d, order()?)? })),
        EvalFn::Moment => {
            let r = need(a.r, "--r", f)?;
            Ok(json!({ "value": properties::fractional_moment(&d, r).map_err(input_err)? }))
        }
        EvalFn::Bowley => Ok(json!({ "value": properties::bowley_skewness(&d) })),
        EvalFn::Moors => Ok(json!({ "value": properties::moors_kurtosis(&d) })),
        EvalFn::Sample => {
            let n = need(a.n, "--n", f)?;
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            Ok(json!({ "values": sample_cel(&d, n, SeededStream::new(a.seed, 0)) }))
        }
    }
    .map_err(|e| match e {
        CliError::Input { source, .. } => input_err(source),
        other => other,
    })?;
    let document = ReportDocument::new("eval", Inputs { flags: a, dataset: None }, results)?;
    Ok(Outcome { document, exit_code: 0, out: a.out.clone() })
}
