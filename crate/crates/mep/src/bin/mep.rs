//! Command-line front end: bound tables, estimator evaluation, the
//! optimal-ratio search, family sweeps, and the coordinated-sampling
//! simulator, with JSON/CSV emission.
//!
//! Exit codes: 0 success, 1 usage or I/O failure, 2 numerical/bracket
//! failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mep::bounds::BoundsRow;
use mep::coord::{empirical_bias, KeyedDataset};
use mep::estimator::{
    alpha_l_estimator, alpha_l_truncated, ratio_value, EstimatorRef,
};
use mep::hull::opt_square;
use mep::search::{optimal_ratio, sweep_optimal};
use mep::{Family, InstanceFile, MepError, MepInstance};

#[derive(Parser)]
#[command(
    name = "mep",
    about = "Monotone estimation problems under threshold (PPS) sampling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance JSON file ({"values":[...],"f":[...]})
    #[arg(long, conflicts_with_all = ["family", "p", "n"])]
    instance: Option<PathBuf>,
    /// Parametric family
    #[arg(long, value_enum, requires = "p", requires = "n")]
    family: Option<CliFamily>,
    /// Family exponent(s), comma separated (a list is only meaningful for
    /// `sweep`)
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Grid size: values are {i/n}
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFamily {
    OneMinusPow,
    PowOneMinus,
}

impl From<CliFamily> for Family {
    fn from(f: CliFamily) -> Family {
        match f {
            CliFamily::OneMinusPow => Family::OneMinusPow,
            CliFamily::PowOneMinus => Family::PowOneMinus,
        }
    }
}

impl InstanceArgs {
    fn single_p(&self) -> Result<f64, MepError> {
        match self.p.as_slice() {
            [p] => Ok(*p),
            _ => Err(MepError::InvalidParameter(
                "this command takes exactly one --p value".into(),
            )),
        }
    }

    fn load(&self) -> Result<MepInstance, MepError> {
        match (&self.instance, self.family) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)?;
                let file: InstanceFile = serde_json::from_str(&text)?;
                file.into_instance()
            }
            (None, Some(family)) => MepInstance::family(
                family.into(),
                self.single_p()?,
                self.n.expect("clap enforces --n with --family"),
            ),
            _ => Err(MepError::InvalidParameter(
                "exactly one instance source required: --instance or --family/--p/--n".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form competitiveness bounds per alpha
    Bounds {
        /// Alpha values, comma separated
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        alpha: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-datum OPT, square expectations, and ratios of the αL* family
    Eval {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Alpha values, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1")]
        alpha: Vec<f64>,
        /// Refinement (cells per seed interval) for the truncated variant
        #[arg(long, default_value_t = 16)]
        refine: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimum competitive ratio achievable on the instance
    Optimal {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Bisection tolerance on the ratio
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal ratio across a family p-grid
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Bisection tolerance on the ratio
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coordinated-sampling simulation of the L_p^p aggregate
    Simulate {
        /// Dataset CSV with header key,v1,v2
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Number of repetitions (independent salts)
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Seed for the salt stream
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Serialize)]
struct EvalRow {
    v: f64,
    alpha: f64,
    opt: f64,
    square: f64,
    ratio: f64,
    square_truncated: f64,
    ratio_truncated: f64,
}

fn emit(output: &OutputArgs, json: String, csv: String) -> Result<(), MepError> {
    let text = match output.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn csv_table<T: Serialize>(header: &str, rows: &[T], cols: &[&str]) -> String {
    // serialize through JSON objects to keep one formatting path
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let obj = serde_json::to_value(row).expect("rows are plain structs");
        let line: Vec<String> = cols
            .iter()
            .map(|c| match &obj[c] {
                serde_json::Value::Null => String::new(),
                serde_json::Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<(), MepError> {
    match cli.command {
        Command::Bounds { alpha, output } => {
            let alphas: Vec<f64> = alpha
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| MepError::Parse(format!("--alpha {s}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let rows: Vec<BoundsRow> = alphas
                .iter()
                .map(|&a| BoundsRow::new(a))
                .collect::<Result<_, _>>()?;
            let json = serde_json::to_string_pretty(&serde_json::json!({ "rows": rows }))? + "\n";
            let csv = csv_table(
                "alpha,upper,worst_lower,convex",
                &rows,
                &["alpha", "upper", "worst_lower", "convex"],
            );
            emit(&output, json, csv)
        }
        Command::Eval {
            instance,
            alpha,
            refine,
            output,
        } => {
            let inst = instance.load()?;
            let mut rows = Vec::new();
            for j in 0..inst.len() {
                let opt = opt_square(&inst, j);
                for &a in &alpha {
                    let form = alpha_l_estimator(&inst, j, a)?;
                    let square = form.square_expectation();
                    let trunc = alpha_l_truncated(&inst, j, a, refine)?;
                    let square_truncated = mep::estimator::square_expectation(
                        &inst,
                        EstimatorRef::Step(&trunc),
                        j,
                    );
                    rows.push(EvalRow {
                        v: inst.values()[j],
                        alpha: a,
                        opt,
                        square,
                        ratio: ratio_value(opt, square),
                        square_truncated,
                        ratio_truncated: ratio_value(opt, square_truncated),
                    });
                }
            }
            let json = serde_json::to_string_pretty(&serde_json::json!({ "rows": rows }))? + "\n";
            let csv = csv_table(
                "v,alpha,opt,square,ratio,square_truncated,ratio_truncated",
                &rows,
                &[
                    "v",
                    "alpha",
                    "opt",
                    "square",
                    "ratio",
                    "square_truncated",
                    "ratio_truncated",
                ],
            );
            emit(&output, json, csv)
        }
        Command::Optimal {
            instance,
            tol,
            output,
        } => {
            let inst = instance.load()?;
            let res = optimal_ratio(&inst, tol)?;
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "c_star": res.c_star,
                "bracket": [res.bracket.0, res.bracket.1],
                "table": { "y": res.table.y, "z": res.table.z },
                "ratios": res.ratios,
            }))? + "\n";
            let mut csv = String::from("v,ratio,z\n");
            for j in 0..inst.len() {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    inst.values()[j],
                    res.ratios[j],
                    res.table.z[j]
                );
            }
            emit(&output, json, csv)
        }
        Command::Sweep {
            instance,
            tol,
            output,
        } => {
            let family = instance
                .family
                .ok_or_else(|| {
                    MepError::InvalidParameter("sweep requires --family/--p/--n".into())
                })?
                .into();
            let n = instance
                .n
                .ok_or_else(|| MepError::InvalidParameter("sweep requires --n".into()))?;
            if instance.p.is_empty() {
                return Err(MepError::InvalidParameter(
                    "sweep requires at least one --p value".into(),
                ));
            }
            let rows = sweep_optimal(family, &instance.p, n, tol)?;
            let best = rows
                .iter()
                .max_by(|a, b| a.c_star.partial_cmp(&b.c_star).unwrap())
                .expect("at least one row");
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "rows": rows,
                "max_c_star": best.c_star,
                "argmax_p": best.p,
            }))? + "\n";
            let csv = csv_table(
                "p,c_star,lstar_ratio",
                &rows,
                &["p", "c_star", "lstar_ratio"],
            );
            emit(&output, json, csv)
        }
        Command::Simulate {
            data,
            p,
            alpha,
            reps,
            rng_seed,
            output,
        } => {
            let ds = KeyedDataset::from_csv(&fs::read_to_string(data)?)?;
            let report = empirical_bias(&ds, p, alpha, reps, rng_seed)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            let csv = format!(
                "truth,mean,stderr,reps\n{},{},{},{}\n",
                report.truth, report.mean, report.stderr, report.reps
            );
            emit(&output, json, csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (MepError::BracketFailure(_) | MepError::InfeasibleExtension { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
