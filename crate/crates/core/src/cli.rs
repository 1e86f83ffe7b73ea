//! Command-line front end.
//!
//! stdout carries only JSON (sorted keys); diagnostics go to stderr. Exit
//! codes: 0 success, 1 a verified identity failed, 2 usage/parse/domain
//! error, 3 dimension mismatch, 4 operation unsupported by the generator,
//! 5 more clusters than points.

use std::ffi::OsString;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{CatalogEntry, CatalogKey};
use crate::centroid::{centroid, jensen_bound, kmeans, weighted_objective, ClusterConfig, Side};
use crate::convex_core::Point;
use crate::divergence::{g_bregman, g_bregman_sym, g_skew_jensen, SkewWeight, WeightVector};
use crate::identities::{run_suites, Suite, TrialConfig};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "gdiv",
    version,
    about = "g-Bregman and skew g-Jensen divergences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence row by row between two CSV files.
    Eval(EvalArgs),
    /// Weighted right or left centroid of the points in a CSV file.
    Centroid(CentroidArgs),
    /// Lloyd clustering under a g-Bregman divergence.
    Cluster(ClusterArgs),
    /// Randomized verification of identities and inequalities.
    Verify(VerifyArgs),
}

#[derive(Debug, clap::Args)]
pub struct DivergenceArgs {
    /// kl | reverse_kl | alpha | hellinger | pearson_chi2 | neyman_chi2
    #[arg(long)]
    pub divergence: String,
    /// Index of the alpha family (required for `alpha`).
    #[arg(long, allow_negative_numbers = true)]
    pub family_index: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Bregman,
    Sym,
    Jensen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub divergence: DivergenceArgs,
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
    /// Skew of the Jensen form, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub skew: f64,
    #[arg(long, value_enum, default_value_t = Form::Bregman)]
    pub form: Form,
}

#[derive(Debug, clap::Args)]
pub struct CentroidArgs {
    #[command(flatten)]
    pub divergence: DivergenceArgs,
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated weights summing to one; uniform when omitted.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
}

#[derive(Debug, clap::Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub divergence: DivergenceArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = ClusterConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = ClusterConfig::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// all | cosines | four-point | parallelogram | division | bj | pbj | oracle | limits | duality | generator
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// A catalog key, or `all` for every entry (alpha at indices -1, 0.5, 2).
    #[arg(long, default_value = "all")]
    pub divergence: String,
    #[arg(long, allow_negative_numbers = true)]
    pub family_index: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
}

/// A point cloud read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Point>,
    pub labels: Option<Vec<String>>,
    pub source_path: String,
}

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::DimensionMismatch { .. } | Error::LengthMismatch { .. } => 3,
            Error::Unsupported(_) => 4,
            Error::TooManyClusters { .. } => 5,
            _ => 2,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

/// Result of a CLI invocation, captured rather than printed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok()
}

impl Dataset {
    pub fn from_path(path: &Path) -> Result<Self, Failure> {
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// One point per row; an optional header is recognised by a non-numeric
    /// first cell on the first row, and a non-numeric first column on the
    /// data rows is taken as labels. Blank lines are skipped.
    pub fn parse(text: &str, source: &str) -> Result<Self, Failure> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Failure::usage(format!("{source}: {e}")))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let line = record.position().map_or(0, |p| p.line() as usize);
            rows.push((line, record.iter().map(str::to_string).collect()));
        }
        if rows
            .first()
            .is_some_and(|(_, cells)| parse_number(&cells[0]).is_none())
        {
            rows.remove(0);
        }
        if rows.is_empty() {
            return Err(Failure::usage(format!("{source}: no data rows")));
        }
        let labelled = parse_number(&rows[0].1[0]).is_none();

        let mut points = Vec::with_capacity(rows.len());
        let mut labels = Vec::new();
        for (line, cells) in rows {
            let (label, cells) = if labelled {
                (Some(cells[0].clone()), &cells[1..])
            } else {
                (None, &cells[..])
            };
            let coords = cells
                .iter()
                .enumerate()
                .map(|(col, c)| {
                    parse_number(c).ok_or_else(|| {
                        Failure::usage(format!(
                            "{source}:{line}: column {}: not a number: {c:?}",
                            col + 1
                        ))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let point = Point::new(coords).map_err(|e| Failure {
                code: 2,
                message: format!("{source}:{line}: {e}"),
            })?;
            if let Some(first) = points.first() {
                let first: &Point = first;
                if first.dim() != point.dim() {
                    return Err(Failure {
                        code: 3,
                        message: format!(
                            "{source}:{line}: dimension {} differs from {}",
                            point.dim(),
                            first.dim()
                        ),
                    });
                }
            }
            points.push(point);
            labels.extend(label);
        }
        Ok(Self {
            points,
            labels: labelled.then_some(labels),
            source_path: source.to_string(),
        })
    }
}

fn entry(args: &DivergenceArgs) -> Result<CatalogEntry, Failure> {
    Ok(CatalogKey::parse(&args.divergence, args.family_index)?.entry()?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    // serde_json's map is ordered, so keys come out sorted.
    serde_json::to_value(value)
        .and_then(|v| serde_json::to_string(&v))
        .expect("report types serialize")
}

fn cmd_eval(args: &EvalArgs) -> Result<String, Failure> {
    let entry = entry(&args.divergence)?;
    let p = Dataset::from_path(&args.p)?;
    let q = Dataset::from_path(&args.q)?;
    let (np, nq) = (p.points.len(), q.points.len());
    if np != nq && np != 1 && nq != 1 {
        return Err(Failure {
            code: 3,
            message: format!("row counts differ: {np} vs {nq}"),
        });
    }
    let skew = match args.form {
        Form::Jensen => Some(SkewWeight::new(args.skew)?),
        _ => None,
    };
    let form = match args.form {
        Form::Bregman => "bregman",
        Form::Sym => "sym",
        Form::Jensen => "jensen",
    };
    let mut out = String::new();
    for i in 0..np.max(nq) {
        let a = &p.points[i.min(np - 1)];
        let b = &q.points[i.min(nq - 1)];
        let value = match (args.form, skew) {
            (Form::Bregman, _) => g_bregman(&entry.spec, a, b)?,
            (Form::Sym, _) => g_bregman_sym(&entry.spec, a, b)?,
            (Form::Jensen, Some(s)) => g_skew_jensen(&entry.spec, a, b, s)?,
            (Form::Jensen, None) => unreachable!("skew parsed above"),
        };
        let mut row = json!({
            "divergence": entry.key.to_string(),
            "form": form,
            "value": value,
        });
        if let Some(s) = skew {
            row["skew"] = json!(s.value());
        }
        out.push_str(&to_json(&row));
        out.push('\n');
    }
    Ok(out)
}

fn parse_weights(raw: &str) -> Result<WeightVector, Failure> {
    let weights = raw
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("not a weight: {w:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightVector::new(weights)?)
}

fn cmd_centroid(args: &CentroidArgs) -> Result<String, Failure> {
    let entry = entry(&args.divergence)?;
    let data = Dataset::from_path(&args.input)?;
    let w = match &args.weights {
        Some(raw) => parse_weights(raw)?,
        None => WeightVector::uniform(data.points.len())?,
    };
    let side = Side::from(args.side);
    let c = centroid(&entry.spec, &data.points, &w, side)?;
    let objective = weighted_objective(&entry.spec, &data.points, &w, &c, side)?;
    let bound = jensen_bound(&entry.spec, &data.points, &w, side)?;
    Ok(to_json(&json!({
        "centroid": c,
        "objective": objective,
        "jensen_bound": bound,
        "residual": (objective - bound).abs() / (1.0 + bound.abs()),
    })) + "\n")
}

fn cmd_cluster(args: &ClusterArgs) -> Result<String, Failure> {
    let entry = entry(&args.divergence)?;
    let data = Dataset::from_path(&args.input)?;
    let cfg = ClusterConfig {
        k: args.k,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
        side: args.side.into(),
    };
    let result = kmeans(&entry.spec, &data.points, &cfg)?;
    Ok(to_json(&result) + "\n")
}

fn cmd_verify(args: &VerifyArgs) -> Result<(bool, String), Failure> {
    let suites = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>()?]
    };
    let keys = if args.divergence == "all" {
        CatalogKey::standard_set()
    } else {
        vec![CatalogKey::parse(&args.divergence, args.family_index)?]
    };
    let cfg = TrialConfig {
        trials: args.trials,
        dim: args.dim,
        seed: args.seed,
        ..TrialConfig::default()
    };
    cfg.validate()?;
    let reports = run_suites(&keys, &suites, &cfg);
    let ok = reports.iter().all(|r| r.pass);
    Ok((ok, to_json(&reports) + "\n"))
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let text = err.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a).map(|s| (0, s)),
        Command::Centroid(a) => cmd_centroid(a).map(|s| (0, s)),
        Command::Cluster(a) => cmd_cluster(a).map(|s| (0, s)),
        Command::Verify(a) => cmd_verify(a).map(|(ok, s)| (if ok { 0 } else { 1 }, s)),
    };
    match result {
        Ok((code, stdout)) => {
            let stderr = if code == 1 {
                "one or more identities failed\n".to_string()
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout,
                stderr,
            }
        }
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}
