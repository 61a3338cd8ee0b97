//! Line-based configuration files and command-line overrides.
//!
//! ```text
//! # global keys
//! seed = 7
//! output_dir = out
//!
//! [problem]
//! mu1 = 2, 2
//! sigma1 = [[1, .2], [.2, 1]]
//!
//! [experiment]
//! dims = 3, 7, 11
//! delta_sq = 0.8
//! ```
//!
//! Key names are unique across sections, so a key may also appear before
//! any section header. Overrides use the dotted path (`experiment.dims`) or
//! the bare key.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::bayesllr::{CostMatrix, TwoClassProblem, ZERO_ONE_COSTS};
use crate::gaussmodel::GaussianParams;
use crate::mcharness::{AucEstimator, ExperimentConfig};
use crate::smallmat::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    Roc,
    NormalDeviate,
    LearningCurve,
    VarianceStudy,
    Simulate,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Density,
        Command::Roc,
        Command::NormalDeviate,
        Command::LearningCurve,
        Command::VarianceStudy,
        Command::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Roc => "roc",
            Command::NormalDeviate => "normal-deviate",
            Command::LearningCurve => "learning-curve",
            Command::VarianceStudy => "variance-study",
            Command::Simulate => "simulate",
        }
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::new(None, format!("unknown command `{s}`")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parse failure, with the offending line when it came from a file.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Everything a command needs, fully resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: TwoClassProblem,
    pub experiment: ExperimentConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub emit_csv: bool,
    /// Points in the analytic score grid.
    pub grid_points: usize,
    /// Half-width of the score grid in standard deviations of the score.
    pub tail_sds: f64,
    /// Simulated vectors per class for histograms, ROC curves and `simulate`.
    pub samples_per_class: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Global,
    Problem,
    Experiment,
    Analysis,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Global => "",
            Section::Problem => "problem",
            Section::Experiment => "experiment",
            Section::Analysis => "analysis",
        }
    }

    fn parse(s: &str) -> Option<Section> {
        [Section::Problem, Section::Experiment, Section::Analysis]
            .into_iter()
            .find(|x| x.name() == s)
    }
}

const KEYS: &[(&str, Section)] = &[
    ("seed", Section::Global),
    ("output_dir", Section::Global),
    ("emit_svg", Section::Global),
    ("emit_csv", Section::Global),
    ("mu1", Section::Problem),
    ("sigma1", Section::Problem),
    ("mu2", Section::Problem),
    ("sigma2", Section::Problem),
    ("prior1", Section::Problem),
    ("prior2", Section::Problem),
    ("costs", Section::Problem),
    ("dims", Section::Experiment),
    ("train_sizes", Section::Experiment),
    ("n_trials", Section::Experiment),
    ("test_size", Section::Experiment),
    ("delta_sq", Section::Experiment),
    ("estimator", Section::Experiment),
    ("grid_points", Section::Analysis),
    ("tail_sds", Section::Analysis),
    ("samples_per_class", Section::Analysis),
];

fn section_of(key: &str) -> Option<Section> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, s)| *s)
}

/// Raw settings before validation, with the line each came from.
#[derive(Default)]
struct Raw {
    values: Vec<(String, String, Option<usize>)>,
}

impl Raw {
    fn set(&mut self, key: &str, value: &str, line: Option<usize>) {
        self.values.retain(|(k, _, _)| k != key);
        self.values.push((key.to_string(), value.to_string(), line));
    }

    fn get(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.values
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }
}

fn parse_scalar<T: FromStr>(key: &str, v: &str, line: Option<usize>) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::new(line, format!("`{key}`: cannot parse `{}`", v.trim())))
}

fn parse_bool(key: &str, v: &str, line: Option<usize>) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::new(line, format!("`{key}`: expected true or false, got `{other}`"))),
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str, line: Option<usize>) -> Result<Vec<T>, ConfigError> {
    let inner = v.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Err(ConfigError::new(line, format!("`{key}`: empty list")));
    }
    inner.split(',').map(|s| parse_scalar(key, s, line)).collect()
}

/// `[[a, b], [c, d]]`: rows of equal length.
pub fn parse_matrix(v: &str) -> Result<Vec<Vec<f64>>, String> {
    let s: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let body = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("matrix must be enclosed in brackets: `{v}`"))?;
    let mut rows = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        let r = rest
            .strip_prefix('[')
            .ok_or_else(|| format!("expected `[` at `{rest}`"))?;
        let end = r.find(']').ok_or_else(|| format!("unclosed row in `{v}`"))?;
        let row: Vec<f64> = r[..end]
            .split(',')
            .map(|x| x.parse::<f64>().map_err(|_| format!("bad matrix entry `{x}`")))
            .collect::<Result<_, _>>()?;
        rows.push(row);
        rest = &r[end + 1..];
        rest = rest.strip_prefix(',').unwrap_or(rest);
    }
    if rows.is_empty() {
        return Err("matrix has no rows".to_string());
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(format!("matrix rows differ in length: `{v}`"));
    }
    Ok(rows)
}

fn matrix_value(raw: &Raw, key: &str, default: Vec<Vec<f64>>) -> Result<(Matrix, Option<usize>), ConfigError> {
    let (rows, line) = match raw.get(key) {
        Some((v, line)) => (
            parse_matrix(v).map_err(|e| ConfigError::new(line, format!("`{key}`: {e}")))?,
            line,
        ),
        None => (default, None),
    };
    let m = Matrix::from_rows(&rows).map_err(|e| ConfigError::new(line, format!("`{key}`: {e}")))?;
    Ok((m, line))
}

fn vector_value(raw: &Raw, key: &str, default: Vec<f64>) -> Result<(Vector, Option<usize>), ConfigError> {
    let (v, line) = match raw.get(key) {
        Some((v, line)) => (parse_list::<f64>(key, v, line)?, line),
        None => (default, None),
    };
    let v = Vector::new(v).map_err(|e| ConfigError::new(line, format!("`{key}`: {e}")))?;
    Ok((v, line))
}

fn class_params(raw: &Raw, which: u8, mu: Vec<f64>, sigma: Vec<Vec<f64>>) -> Result<GaussianParams, ConfigError> {
    let (mu, mu_line) = vector_value(raw, &format!("mu{which}"), mu)?;
    let (sigma, line) = matrix_value(raw, &format!("sigma{which}"), sigma)?;
    GaussianParams::new(mu, sigma).map_err(|e| {
        ConfigError::new(line.or(mu_line), format!("class {which} covariance: {e}"))
    })
}

fn problem_from(raw: &Raw) -> Result<TwoClassProblem, ConfigError> {
    let class1 = class_params(raw, 1, vec![2.0, 2.0], vec![vec![1.0, 0.2], vec![0.2, 1.0]])?;
    let class2 = class_params(raw, 2, vec![1.0, 1.0], vec![vec![0.3, 0.1], vec![0.1, 0.3]])?;
    let prior = |key: &str| -> Result<Option<(f64, Option<usize>)>, ConfigError> {
        raw.get(key)
            .map(|(v, l)| Ok((parse_scalar(key, v, l)?, l)))
            .transpose()
    };
    let (prior1, prior2, line) = match (prior("prior1")?, prior("prior2")?) {
        (None, None) => (0.5, 0.5, None),
        (Some((p, l)), None) => (p, 1.0 - p, l),
        (None, Some((p, l))) => (1.0 - p, p, l),
        (Some((p1, l)), Some((p2, _))) => (p1, p2, l),
    };
    let (costs, cost_line): (CostMatrix, Option<usize>) = match raw.get("costs") {
        None => (ZERO_ONE_COSTS, None),
        Some((v, l)) => {
            let m = parse_matrix(v).map_err(|e| ConfigError::new(l, format!("`costs`: {e}")))?;
            if m.len() != 2 || m[0].len() != 2 {
                return Err(ConfigError::new(l, "`costs` must be a 2×2 matrix"));
            }
            ([[m[0][0], m[0][1]], [m[1][0], m[1][1]]], l)
        }
    };
    TwoClassProblem::new(class1, class2, prior1, prior2, costs)
        .map_err(|e| ConfigError::new(line.or(cost_line), format!("problem: {e}")))
}

/// Resolves a config file plus overrides into a [`RunConfig`].
///
/// `overrides` are `(key, value)` pairs from the command line; they win over
/// the file. `env_seed` is consulted only when neither sets `seed`.
pub fn parse_config(
    command: Command,
    text: &str,
    overrides: &[(String, String)],
    env_seed: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    let mut raw = Raw::default();
    let mut section = Section::Global;
    for (idx, line) in text.lines().enumerate() {
        let lineno = Some(idx + 1);
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if !name.contains('[') {
                section = Section::parse(name.trim())
                    .ok_or_else(|| ConfigError::new(lineno, format!("unknown section `[{name}]`")))?;
                continue;
            }
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::new(lineno, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let home = section_of(key).ok_or_else(|| ConfigError::new(lineno, format!("unknown key `{key}`")))?;
        if section != Section::Global && home != section {
            return Err(ConfigError::new(
                lineno,
                format!("key `{key}` does not belong in section [{}]", section.name()),
            ));
        }
        raw.set(key, value.trim(), lineno);
    }
    for (path, value) in overrides {
        let (sec, key) = match path.split_once('.') {
            Some((s, k)) => (Some(s), k),
            None => (None, path.as_str()),
        };
        let home = section_of(key).ok_or_else(|| ConfigError::new(None, format!("unknown key `{path}`")))?;
        if let Some(s) = sec {
            if Section::parse(s) != Some(home) {
                return Err(ConfigError::new(None, format!("unknown key `{path}`")));
            }
        }
        raw.set(key, value, None);
    }

    let problem = problem_from(&raw)?;

    let seed = match raw.get("seed") {
        Some((v, l)) => parse_scalar("seed", v, l)?,
        None => match env_seed {
            Some(v) => parse_scalar("LLR_LAB_SEED", v, None)?,
            None => 0,
        },
    };

    let defaults = ExperimentConfig::default();
    let mut experiment = ExperimentConfig {
        base_seed: seed,
        ..defaults
    };
    if let Some((v, l)) = raw.get("dims") {
        experiment.dims = parse_list("dims", v, l)?;
    } else if command == Command::VarianceStudy {
        experiment.dims = vec![11];
    }
    if let Some((v, l)) = raw.get("train_sizes") {
        experiment.train_sizes = parse_list("train_sizes", v, l)?;
    }
    if let Some((v, l)) = raw.get("n_trials") {
        experiment.n_trials = parse_scalar("n_trials", v, l)?;
    }
    if let Some((v, l)) = raw.get("test_size") {
        experiment.test_size = parse_scalar("test_size", v, l)?;
    }
    if let Some((v, l)) = raw.get("delta_sq") {
        experiment.target_delta_sq = parse_scalar("delta_sq", v, l)?;
    }
    if let Some((v, l)) = raw.get("estimator") {
        experiment.estimator = match v.trim() {
            "raw" => AucEstimator::Raw,
            "control-variate" => AucEstimator::ControlVariate,
            other => {
                return Err(ConfigError::new(
                    l,
                    format!("`estimator`: expected raw or control-variate, got `{other}`"),
                ))
            }
        };
    }
    if matches!(command, Command::LearningCurve | Command::VarianceStudy) {
        let line = raw.get("dims").or(raw.get("train_sizes")).and_then(|(_, l)| l);
        experiment
            .validate()
            .map_err(|e| ConfigError::new(line, format!("experiment: {e}")))?;
        if command == Command::VarianceStudy && experiment.dims.len() != 1 {
            return Err(ConfigError::new(line, "variance-study takes exactly one value in `dims`"));
        }
    }

    let get_or = |key: &str, default: &str| -> (String, Option<usize>) {
        raw.get(key)
            .map(|(v, l)| (v.to_string(), l))
            .unwrap_or((default.to_string(), None))
    };
    let (v, l) = get_or("output_dir", "llr-lab-out");
    let output_dir = PathBuf::from(v.trim());
    if output_dir.as_os_str().is_empty() {
        return Err(ConfigError::new(l, "`output_dir` is empty"));
    }
    let (v, l) = get_or("emit_svg", "true");
    let emit_svg = parse_bool("emit_svg", &v, l)?;
    let (v, l) = get_or("emit_csv", "true");
    let emit_csv = parse_bool("emit_csv", &v, l)?;
    let (v, l) = get_or("grid_points", "2001");
    let grid_points: usize = parse_scalar("grid_points", &v, l)?;
    if grid_points < 3 {
        return Err(ConfigError::new(l, "`grid_points` must be at least 3"));
    }
    let (v, l) = get_or("tail_sds", "40");
    let tail_sds: f64 = parse_scalar("tail_sds", &v, l)?;
    if !(tail_sds > 0.0 && tail_sds.is_finite()) {
        return Err(ConfigError::new(l, "`tail_sds` must be positive"));
    }
    let (v, l) = get_or("samples_per_class", "10000");
    let samples_per_class: usize = parse_scalar("samples_per_class", &v, l)?;
    if samples_per_class == 0 {
        return Err(ConfigError::new(l, "`samples_per_class` must be at least 1"));
    }

    Ok(RunConfig {
        command,
        problem,
        experiment,
        seed,
        output_dir,
        emit_svg,
        emit_csv,
        grid_points,
        tail_sds,
        samples_per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(cmd: Command, text: &str) -> Result<RunConfig, ConfigError> {
        parse_config(cmd, text, &[], None)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse(Command::LearningCurve, "").unwrap();
        assert_eq!(c.experiment, ExperimentConfig::default());
        assert_eq!(c.problem, crate::reference_problem());
        assert!(c.emit_svg && c.emit_csv);
        assert_eq!(parse(Command::VarianceStudy, "").unwrap().experiment.dims, vec![11]);
    }

    #[test]
    fn direct_mapping() {
        let c = parse(Command::LearningCurve, "delta_sq = 0.8\ndims = 3,7,11\n").unwrap();
        assert_eq!(c.experiment.target_delta_sq, 0.8);
        assert_eq!(c.experiment.dims, vec![3, 7, 11]);
        let c = parse(Command::LearningCurve, "[experiment]\nestimator = raw").unwrap();
        assert_eq!(c.experiment.estimator, AucEstimator::Raw);
        assert!(parse(Command::LearningCurve, "estimator = fancy").is_err());
        let c = parse(
            Command::Density,
            "seed = 9 # comment\n[problem]\nmu1 = 0, 0\nsigma1 = [[2, 0.5], [0.5, 1]]\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.problem.class1.sigma()[(0, 1)], 0.5);
    }

    #[test]
    fn non_spd_covariance_cites_the_line() {
        let e = parse(Command::Density, "[problem]\n\nsigma1 = [[1,2],[2,1]]\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("positive definite"), "{e}");
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse(Command::Density, "foo = 1").unwrap_err().line, Some(1));
        assert_eq!(parse(Command::Density, "\n[nope]").unwrap_err().line, Some(2));
        assert_eq!(parse(Command::Density, "[experiment]\nmu1 = 1,1").unwrap_err().line, Some(2));
        assert_eq!(parse(Command::Density, "[problem]\nsigma2 = [[1,0],[0").unwrap_err().line, Some(2));
        assert_eq!(parse(Command::Density, "just text").unwrap_err().line, Some(1));
    }

    #[test]
    fn overrides_and_seed_precedence() {
        let ov = vec![
            ("experiment.n_trials".to_string(), "5".to_string()),
            ("seed".to_string(), "11".to_string()),
        ];
        let c = parse_config(Command::LearningCurve, "n_trials = 50\nseed = 3", &ov, Some("99")).unwrap();
        assert_eq!(c.experiment.n_trials, 5);
        assert_eq!(c.seed, 11);
        assert_eq!(c.experiment.base_seed, 11);
        assert_eq!(parse_config(Command::Simulate, "seed = 3", &[], Some("99")).unwrap().seed, 3);
        assert_eq!(parse_config(Command::Simulate, "", &[], Some("99")).unwrap().seed, 99);
        let bad = vec![("problem.dims".to_string(), "3".to_string())];
        assert!(parse_config(Command::Simulate, "", &bad, None).is_err());
    }

    #[test]
    fn matrix_syntax() {
        assert_eq!(parse_matrix("[[1,.2],[.2,1]]").unwrap(), vec![vec![1.0, 0.2], vec![0.2, 1.0]]);
        assert_eq!(parse_matrix("[ [3] ]").unwrap(), vec![vec![3.0]]);
        assert!(parse_matrix("[[1,2],[3]]").is_err());
        assert!(parse_matrix("1,2").is_err());
    }
}
