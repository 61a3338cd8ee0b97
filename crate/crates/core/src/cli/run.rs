//! Command orchestration: argument parsing, computation, atomic output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::csv;
use crate::error::Error;
use crate::gaussmodel::SeededRng;
use crate::llrdist::{
    histogram_vs_analytic, marginal_density, score_grid, simulate_scores, DensityGrid,
};
use crate::mcharness::{learning_curve, variance_study, CurveSummary};
use crate::rocauc::{empirical_auc, empirical_roc, normal_deviate_fit, RocCurve};
use crate::Class;

use super::config::{parse_config, Command, ConfigError, RunConfig};
use super::svg::{render_svg, PlotKind, PlotSpec, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const USAGE: &str = "usage: llr-lab <command> [--config FILE] [--seed N] [--out DIR] [--no-svg] [--key value]...
commands: density, roc, normal-deviate, learning-curve, variance-study, simulate";

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numerical(e) => write!(f, "error: {e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

fn usage_error(msg: impl Into<String>) -> CliError {
    CliError::Config(ConfigError {
        line: None,
        message: format!("{}\n{USAGE}", msg.into()),
    })
}

/// Parsed command line, before the config file is read.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Invocation {
    pub command: String,
    pub config_file: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
}

pub fn parse_args(args: &[String]) -> Result<Invocation, CliError> {
    let mut it = args.iter();
    let command = it
        .next()
        .ok_or_else(|| usage_error("missing command"))?
        .clone();
    let mut inv = Invocation {
        command,
        ..Default::default()
    };
    while let Some(flag) = it.next() {
        let Some(name) = flag.strip_prefix("--") else {
            return Err(usage_error(format!("unexpected argument `{flag}`")));
        };
        if name == "no-svg" {
            inv.overrides.push(("emit_svg".into(), "false".into()));
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| usage_error(format!("flag `{flag}` needs a value")))?
            .clone();
        match name {
            "config" => inv.config_file = Some(PathBuf::from(value)),
            "seed" => inv.overrides.push(("seed".into(), value)),
            "out" => inv.overrides.push(("output_dir".into(), value)),
            key => inv.overrides.push((key.to_string(), value)),
        }
    }
    Ok(inv)
}

/// File name and contents of one output.
pub type Output = (String, String);

fn density_plot(g1: &DensityGrid, g2: &DensityGrid, sim: &[Vec<(f64, f64)>; 2]) -> PlotSpec {
    // trim the far tail, where both densities are negligible, so the plot stays readable
    let peak = g1.density.iter().chain(&g2.density).cloned().fold(0.0, f64::max);
    let last = (0..g1.len())
        .rev()
        .find(|&i| g1.density[i].max(g2.density[i]) > 1e-3 * peak)
        .unwrap_or(g1.len() - 1);
    let upto = |g: &DensityGrid| -> Vec<(f64, f64)> {
        (0..=last).map(|i| (g.h_values[i], g.density[i])).collect()
    };
    let h_max = g1.h_values[last];
    let clip = |v: &Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        v.iter().cloned().filter(|p| p.0 <= h_max).collect()
    };
    PlotSpec {
        kind: PlotKind::DensityOverlay,
        title: "Score densities: analytic vs simulated".into(),
        x_label: "h".into(),
        y_label: "density".into(),
        series: vec![
            Series::new("f(h | class 1), analytic", upto(g1)),
            Series::new("f(h | class 2), analytic", upto(g2)),
            Series::new("class 1, simulated", clip(&sim[0])),
            Series::new("class 2, simulated", clip(&sim[1])),
        ],
    }
}

/// Histogram as a step outline.
fn step_outline(bins: &[crate::llrdist::HistogramBin]) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(2 * bins.len() + 2);
    if let Some(b) = bins.first() {
        pts.push((b.lo, 0.0));
    }
    for b in bins {
        pts.push((b.lo, b.empirical_density));
        pts.push((b.hi, b.empirical_density));
    }
    if let Some(b) = bins.last() {
        pts.push((b.hi, 0.0));
    }
    pts
}

fn run_density(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let p = &cfg.problem;
    let h = score_grid(p, cfg.grid_points, cfg.tail_sds)?;
    let g1 = marginal_density(&h, Class::One, p)?;
    let g2 = marginal_density(&h, Class::Two, p)?;
    let mut out = Vec::new();
    if cfg.emit_csv {
        out.push(("density_class1.csv".into(), g1.to_csv()));
        out.push(("density_class2.csv".into(), g2.to_csv()));
    }
    let mut rng = SeededRng::new(cfg.seed, 0).derive(&[0xd5]);
    let scores = simulate_scores(p, cfg.samples_per_class, cfg.samples_per_class, &mut rng)?;
    let c1 = histogram_vs_analytic(scores.class1(), &g1)?;
    let c2 = histogram_vs_analytic(scores.class2(), &g2)?;
    println!(
        "integrals: class 1 {:.6}, class 2 {:.6}; KS vs simulation: class 1 {:.4}, class 2 {:.4}",
        g1.integral(),
        g2.integral(),
        c1.ks_statistic,
        c2.ks_statistic
    );
    if cfg.emit_svg {
        let spec = density_plot(&g1, &g2, &[step_outline(&c1.bins), step_outline(&c2.bins)]);
        out.push(("density_overlay.svg".into(), render_svg(&spec)?));
    }
    Ok(out)
}

fn simulated_roc(cfg: &RunConfig, tag: u64) -> Result<(RocCurve, f64), CliError> {
    let mut rng = SeededRng::new(cfg.seed, 0).derive(&[tag]);
    let scores = simulate_scores(&cfg.problem, cfg.samples_per_class, cfg.samples_per_class, &mut rng)?;
    let curve = empirical_roc(&scores)?;
    let auc = empirical_auc(&scores)?;
    Ok((curve, auc))
}

fn run_roc(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let (curve, auc) = simulated_roc(cfg, 0x0c)?;
    println!("empirical AUC {auc:.6} from {} points", curve.len());
    let mut out = Vec::new();
    if cfg.emit_csv {
        out.push(("roc.csv".into(), curve.to_csv()));
    }
    if cfg.emit_svg {
        let spec = PlotSpec {
            kind: PlotKind::Roc,
            title: format!("Empirical ROC (AUC = {auc:.4})"),
            x_label: "FPF".into(),
            y_label: "TPF".into(),
            series: vec![
                Series::new("empirical ROC", curve.points().iter().map(|p| (p.fpf, p.tpf)).collect()),
                Series::new("chance", vec![(0.0, 0.0), (1.0, 1.0)]),
            ],
        };
        out.push(("roc.svg".into(), render_svg(&spec)?));
    }
    Ok(out)
}

fn run_normal_deviate(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let (curve, _) = simulated_roc(cfg, 0x0d)?;
    let pts = curve.deviate_points();
    let fit = normal_deviate_fit(&curve)?;
    println!(
        "binormal fit: a = {:.6}, b = {:.6}, rms residual = {:.3e}",
        fit.a, fit.b, fit.residual
    );
    let mut out = Vec::new();
    if cfg.emit_csv {
        out.push((
            "deviate_points.csv".into(),
            csv::render(
                &["z_fpf", "z_tpf"],
                pts.iter()
                    .map(|(x, y)| vec![csv::format_number(*x), csv::format_number(*y)]),
            ),
        ));
        out.push((
            "deviate_fit.csv".into(),
            csv::render(
                &["a", "b", "residual", "n_points"],
                [vec![
                    csv::format_number(fit.a),
                    csv::format_number(fit.b),
                    csv::format_number(fit.residual),
                    fit.n_points.to_string(),
                ]],
            ),
        ));
    }
    if cfg.emit_svg {
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let spec = PlotSpec {
            kind: PlotKind::DeviateLine,
            title: "Normal-deviate plot".into(),
            x_label: "normal deviate of FPF".into(),
            y_label: "normal deviate of TPF".into(),
            series: vec![
                Series::new("empirical ROC", pts.clone()),
                Series::new(
                    format!("fit a = {:.3}, b = {:.3}", fit.a, fit.b),
                    vec![(lo, fit.a + fit.b * lo), (hi, fit.a + fit.b * hi)],
                ),
            ],
        };
        out.push(("normal_deviate.svg".into(), render_svg(&spec)?));
    }
    Ok(out)
}

fn curve_plot(summary: &CurveSummary, variance: bool) -> PlotSpec {
    let mut dims: Vec<usize> = summary.rows.iter().map(|r| r.p).collect();
    dims.dedup();
    let mut series = Vec::new();
    for p in dims {
        let rows = summary.rows.iter().filter(|r| r.p == p);
        let inv_n = |r: &crate::mcharness::CurveRow| 1.0 / r.n as f64;
        if variance {
            let pts: Vec<(f64, f64)> = rows
                .filter_map(|r| r.var_auc_true.map(|v| (inv_n(r), v)))
                .collect();
            if !pts.is_empty() {
                series.push(Series::new(format!("var true AUC, p = {p}"), pts));
            }
        } else {
            let rows: Vec<_> = rows.collect();
            series.push(Series::new(
                format!("true, p = {p}"),
                rows.iter().map(|r| (inv_n(r), r.mean_auc_true)).collect(),
            ));
            series.push(Series::new(
                format!("apparent, p = {p}"),
                rows.iter().map(|r| (inv_n(r), r.mean_auc_apparent)).collect(),
            ));
        }
    }
    PlotSpec {
        kind: if variance { PlotKind::Variance } else { PlotKind::LearningCurve },
        title: if variance {
            "Variance of the true AUC".into()
        } else {
            "Mean AUC of the plug-in Bayes classifier".into()
        },
        x_label: "1 / n".into(),
        y_label: if variance { "variance".into() } else { "AUC".into() },
        series,
    }
}

fn run_curve(cfg: &RunConfig, variance: bool) -> Result<Vec<Output>, CliError> {
    let summary = if variance {
        variance_study(&cfg.experiment)?
    } else {
        learning_curve(&cfg.experiment)?
    };
    let stem = if variance { "variance_study" } else { "learning_curve" };
    let mut out = Vec::new();
    if cfg.emit_csv {
        out.push((format!("{stem}.csv"), summary.to_csv()));
    }
    if cfg.emit_svg {
        let spec = curve_plot(&summary, variance);
        // a single trial gives no variance series
        if !spec.series.is_empty() {
            out.push((format!("{stem}.svg"), render_svg(&spec)?));
        }
    }
    Ok(out)
}

fn run_simulate(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let mut rng = SeededRng::new(cfg.seed, 0).derive(&[0x51]);
    let scores = simulate_scores(&cfg.problem, cfg.samples_per_class, cfg.samples_per_class, &mut rng)?;
    let rows = scores
        .class1()
        .iter()
        .map(|s| (1, *s))
        .chain(scores.class2().iter().map(|s| (2, *s)))
        .map(|(l, s)| vec![l.to_string(), csv::format_number(s)]);
    Ok(vec![("scores.csv".into(), csv::render(&["label", "score"], rows))])
}

/// Computes every output of the configured command without touching disk.
pub fn compute_outputs(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    match cfg.command {
        Command::Density => run_density(cfg),
        Command::Roc => run_roc(cfg),
        Command::NormalDeviate => run_normal_deviate(cfg),
        Command::LearningCurve => run_curve(cfg, false),
        Command::VarianceStudy => run_curve(cfg, true),
        Command::Simulate => run_simulate(cfg),
    }
}

/// Writes all outputs or none: on the first failure, files already written
/// by this call are removed.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, contents) in outputs {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for w in &written {
                let _ = fs::remove_file(w);
            }
            let _ = fs::remove_file(&path);
            return Err(CliError::Io(format!("{}: {e}", path.display())));
        }
        written.push(path);
    }
    Ok(written)
}

pub fn run_command(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let outputs = compute_outputs(cfg)?;
    write_outputs(&cfg.output_dir, &outputs)
}

fn run(args: &[String]) -> Result<Vec<PathBuf>, CliError> {
    let inv = parse_args(args)?;
    if inv.command == "--help" || inv.command == "-h" || inv.command == "help" {
        println!("{USAGE}");
        return Ok(vec![]);
    }
    let command: Command = inv.command.parse()?;
    let text = match &inv.config_file {
        Some(path) => fs::read_to_string(path).map_err(|e| {
            CliError::Config(ConfigError {
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            })
        })?,
        None => String::new(),
    };
    let env_seed = std::env::var("LLR_LAB_SEED").ok();
    let cfg = parse_config(command, &text, &inv.overrides, env_seed.as_deref())?;
    run_command(&cfg)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    match run(args) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("llr-lab: {e}");
            e.exit_code()
        }
    }
}
