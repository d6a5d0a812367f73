//! The `coinflip` command-line tool.
//!
//! [`run`] parses arguments and executes one subcommand, returning what
//! would be printed and the exit status: 0 on success (or a feasible spec),
//! 1 on usage, parse or internal errors, 2 when a spec is infeasible.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coinflip_core::analyzer::{
    analyze, brute_force_analyze_with_limit, diff_results, DEFAULT_STRATEGY_LIMIT,
};
use coinflip_core::bounds::{feasible, Setting};
use coinflip_core::format::{tree_from_str, tree_to_string};
use coinflip_core::prob::{is_ratio_literal, report_value};
use coinflip_core::protocols::synthesize;
use coinflip_core::simulator::{
    binomial_sigma, estimate_honest, run_adversarial, EmpiricalDistribution,
};
use coinflip_core::sweep::{figure1, figure2, FIGURE1_PARAMS};
use coinflip_core::{
    AdversaryScript, CoinFlipSpec, Error, Exact, Mode, Outcome, ProtocolTree, Scalar,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

/// Trees up to this many positions get exact reference values in `simulate`.
const REFERENCE_SIZE_LIMIT: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "coinflip",
    version,
    about = "Generalized two-party coin flipping"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a spec is achievable.
    Check(SpecArgs),
    /// Build a protocol tree implementing a spec.
    Synthesize {
        #[command(flatten)]
        spec: SpecArgs,
        /// Where to write the cf-tree/1 file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute honest output probabilities and optimal forcing values.
    Analyze {
        tree: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Also enumerate all deterministic cheating strategies and compare.
        #[arg(long)]
        oracle: bool,
        /// Strategy limit for --oracle.
        #[arg(long, default_value_t = DEFAULT_STRATEGY_LIMIT)]
        limit: u128,
    },
    /// Emit trade-off curves as CSV.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cheat parameters p0*,p1*,p*0,p*1 for figure 1.
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<String>>,
    },
    /// Run a tree many times with honest players or a scripted cheater.
    Simulate {
        tree: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Adversary script (JSON).
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// p00,p11,p0*,p1*,p*0,p*1 as decimals or a/b.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub spec: Vec<String>,
    #[arg(long, value_enum)]
    pub setting: SettingArg,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SettingArg {
    Classical,
    Quantum,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Classical => Setting::Classical,
            SettingArg::Quantum => Setting::Quantum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rational,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rational => Mode::Rational,
            ModeArg::Float => Mode::Float,
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn error(err: &Error) -> Self {
        let code = match err {
            Error::InfeasibleSpec(_) => EXIT_INFEASIBLE,
            _ => EXIT_ERROR,
        };
        Output {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code,
        }
    }
}

/// Runs the tool on `args` (including the program name). `env_mode` is the
/// value of `CF_MODE`, if set.
pub fn run<I, S>(args: I, env_mode: Option<&str>) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_ERROR,
                }
            } else {
                Output::ok(text)
            };
        }
    };
    let env_mode = match env_mode.map(str::parse::<Mode>).transpose() {
        Ok(m) => m,
        Err(e) => return Output::error(&Error::Parse(format!("CF_MODE: {e}"))),
    };
    execute(cli.command, env_mode).unwrap_or_else(|e| Output::error(&e))
}

macro_rules! with_mode {
    ($mode:expr, $t:ident => $body:expr) => {
        match $mode {
            Mode::Rational => {
                type $t = Exact;
                $body
            }
            Mode::Float => {
                type $t = f64;
                $body
            }
        }
    };
}

fn execute(command: Command, env_mode: Option<Mode>) -> Result<Output, Error> {
    match command {
        Command::Check(args) => {
            let mode = spec_mode(&args, env_mode);
            with_mode!(mode, T => cmd_check::<T>(&args))
        }
        Command::Synthesize { spec, out } => {
            let mode = spec_mode(&spec, env_mode);
            with_mode!(mode, T => cmd_synthesize::<T>(&spec, &out))
        }
        Command::Analyze {
            tree,
            mode,
            oracle,
            limit,
        } => {
            let mode = mode.map(Mode::from).or(env_mode).unwrap_or(Mode::Rational);
            with_mode!(mode, T => cmd_analyze::<T>(&tree, oracle, limit))
        }
        Command::Sweep {
            figure,
            step,
            out,
            params,
        } => cmd_sweep(figure, step, out.as_deref(), params.as_deref()),
        Command::Simulate {
            tree,
            trials,
            seed,
            script,
            mode,
        } => {
            let mode = mode.map(Mode::from).or(env_mode).unwrap_or(Mode::Rational);
            with_mode!(mode, T => cmd_simulate::<T>(&tree, trials, seed, script.as_deref()))
        }
    }
}

/// Flag, then any `a/b` literal (exact), then `CF_MODE`, then float.
fn spec_mode(args: &SpecArgs, env_mode: Option<Mode>) -> Mode {
    if let Some(m) = args.mode {
        return m.into();
    }
    if args.spec.iter().any(|s| is_ratio_literal(s)) {
        return Mode::Rational;
    }
    env_mode.unwrap_or(Mode::Float)
}

fn parse_spec<T: Scalar>(args: &SpecArgs) -> Result<CoinFlipSpec<T>, Error> {
    let items: Vec<&str> = args.spec.iter().map(String::as_str).collect();
    CoinFlipSpec::parse_list(&items)
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn read_tree<T: Scalar>(path: &Path) -> Result<ProtocolTree<T>, Error> {
    tree_from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn cmd_check<T: Scalar>(args: &SpecArgs) -> Result<Output, Error> {
    let spec = parse_spec::<T>(args)?;
    let verdict = feasible(&spec, args.setting.into());
    let stdout = if args.json {
        let mut v = verdict.to_json();
        v["spec"] = spec.to_json();
        pretty(&v)
    } else {
        format!("{spec}\n{verdict}\n")
    };
    Ok(Output {
        stdout,
        stderr: String::new(),
        code: if verdict.feasible {
            EXIT_OK
        } else {
            EXIT_INFEASIBLE
        },
    })
}

fn cmd_synthesize<T: Scalar>(args: &SpecArgs, out: &Path) -> Result<Output, Error> {
    let spec = parse_spec::<T>(args)?;
    let tree = synthesize(&spec, args.setting.into())?;
    let result = analyze(&tree)?;
    write(out, &tree_to_string(&tree))?;
    let stdout = if args.json {
        pretty(&json!({
            "out": out.display().to_string(),
            "nodes": tree.size(),
            "wcf_nodes": tree.wcf_count(),
            "analysis": result.to_json(),
        }))
    } else {
        format!(
            "wrote {} ({} nodes, {} weak-coin-flip nodes)\n{result}\n",
            out.display(),
            tree.size(),
            tree.wcf_count()
        )
    };
    Ok(Output::ok(stdout))
}

fn cmd_analyze<T: Scalar>(path: &Path, oracle: bool, limit: u128) -> Result<Output, Error> {
    let tree = read_tree::<T>(path)?;
    let result = analyze(&tree)?;
    let mut stdout = pretty(&result.to_json());
    let mut code = EXIT_OK;
    if oracle {
        let reference = brute_force_analyze_with_limit(&tree, limit)?;
        let diffs = diff_results(&result, &reference);
        if diffs.is_empty() {
            stdout.push_str(if result == reference {
                "oracle: exact match\n"
            } else {
                "oracle: match within tolerance\n"
            });
        } else {
            code = EXIT_ERROR;
            for (name, a, b) in diffs {
                stdout.push_str(&format!(
                    "oracle: {name} differs: recursion {a}, enumeration {b}\n"
                ));
            }
        }
    }
    Ok(Output {
        stdout,
        stderr: String::new(),
        code,
    })
}

fn cmd_sweep(
    figure: u8,
    step: f64,
    out: Option<&Path>,
    params: Option<&[String]>,
) -> Result<Output, Error> {
    let table = if figure == 1 {
        let params = match params {
            None => FIGURE1_PARAMS,
            Some(items) => {
                if items.len() != 4 {
                    return Err(Error::Parse(format!(
                        "--params expects 4 comma-separated values, got {}",
                        items.len()
                    )));
                }
                let mut values = [0.0; 4];
                for (slot, item) in values.iter_mut().zip(items) {
                    *slot = f64::parse_literal(item)?;
                }
                values
            }
        };
        figure1(step, params)?
    } else {
        if params.is_some() {
            return Err(Error::Parse("--params applies to figure 1 only".into()));
        }
        figure2(step)?
    };
    let csv = table.to_csv();
    match out {
        Some(path) => {
            write(path, &csv)?;
            Ok(Output::ok(format!(
                "wrote {} ({} rows)\n",
                path.display(),
                table.rows.len()
            )))
        }
        None => Ok(Output::ok(csv)),
    }
}

fn reference_entry(freq: f64, exact: f64, trials: u64) -> Value {
    let sigma = binomial_sigma(exact, trials);
    json!({
        "frequency": freq,
        "exact": exact,
        "sigma": sigma,
        "within_3_sigma": (freq - exact).abs() <= 3.0 * sigma,
    })
}

fn cmd_simulate<T: Scalar>(
    path: &Path,
    trials: u64,
    seed: u64,
    script_path: Option<&Path>,
) -> Result<Output, Error> {
    let tree = read_tree::<T>(path)?;
    let script = match script_path {
        None => None,
        Some(p) => {
            let value: Value = serde_json::from_str(&read(p)?)?;
            Some(AdversaryScript::from_json(&value, &tree)?)
        }
    };
    let dist: EmpiricalDistribution = match &script {
        None => estimate_honest(&tree, trials, seed)?,
        Some(s) => run_adversarial(&tree, s, trials, seed)?,
    };
    let mut report = dist.to_json();
    if tree.size() <= REFERENCE_SIZE_LIMIT {
        let r = analyze(&tree)?;
        match &script {
            None => {
                report["reference"] = json!({
                    "zero": reference_entry(dist.frequency(Outcome::Zero), r.p00.to_f64(), trials),
                    "one": reference_entry(dist.frequency(Outcome::One), r.p11.to_f64(), trials),
                    "abort": reference_entry(dist.frequency(Outcome::Abort), r.abort.to_f64(), trials),
                });
            }
            Some(s) => {
                report["cheater"] = json!(s.party.as_str());
                report["optimal_forcing"] = json!({
                    "zero": report_value(r.force(s.party, 0).value()),
                    "one": report_value(r.force(s.party, 1).value()),
                });
            }
        }
    }
    Ok(Output::ok(pretty(&report)))
}
