use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pontryagin_triplets::colligation::{compress, exit_extension, generalized_resolvent, lift_triplet};
use pontryagin_triplets::error::Error;
use pontryagin_triplets::generate::random_instance;
use pontryagin_triplets::instance::{matrix_to_json, parse_instance, InstanceFile};
use pontryagin_triplets::linalg::{CMat, C64};
use pontryagin_triplets::par::Execution;
use pontryagin_triplets::resolvent::{direct_resolvent, krein_resolvent, point_class};
use pontryagin_triplets::suite::{run_suite, Suite, SuiteOptions};
use pontryagin_triplets::tolerance::{set_zero_tol, DEFAULT_ZERO_TOL};
use pontryagin_triplets::weyl::evaluate;

/// Boundary triplets for isometries in Pontryagin spaces: verification suites and point evaluations.
#[derive(Parser)]
#[command(name = "ptrip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for sampled parameters and negative-square resampling.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Zero tolerance; check thresholds scale with it.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_TOL)]
    tol: f64,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit plain text (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Record per-check wall time (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Run checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    Weyl,
    Resolvent,
    Gres,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Core => Suite::Core,
            SuiteArg::Weyl => Suite::Weyl,
            SuiteArg::Resolvent => Suite::Resolvent,
            SuiteArg::Gres => Suite::Gres,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the core suite (Green identity, kernels, parameter correspondence).
    Verify { path: PathBuf },
    /// Run the Weyl-function suite, or print γ-fields and Weyl functions at a point.
    Weyl {
        path: PathBuf,
        /// Evaluate at this point, e.g. `3`, `0.5+0.2i`.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<C64>,
    },
    /// Run the resolvent suite, or print the resolvent of every stored parameter at a point.
    Resolvent {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<C64>,
    },
    /// Run the generalized-resolvent suite, or print it at a point.
    Gres {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<C64>,
    },
    /// Write a seeded random instance file.
    RandomInstance {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        kappa: usize,
        #[arg(long)]
        dom: usize,
        #[arg(long)]
        degenerate: bool,
        /// Output file (stdout when absent).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a suite on an instance file or a directory of them.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

/// Bad input; exits with code 2.
enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn exec(common: &Common) -> Execution {
    if common.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn suite(path: &Path, suite: Suite, common: &Common) -> Result<bool, Failure> {
    let opts = SuiteOptions {
        suite,
        seed: common.seed,
        tol: common.tol,
        timing: common.timing,
        exec: exec(common),
    };
    let out = run_suite(path, &opts)?;
    if common.json {
        say(&(out.to_json() + "\n"));
    } else {
        say(&out.to_text());
    }
    Ok(out.pass())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn say(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn fmt_c(z: C64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn fmt_matrix(m: &CMat) -> String {
    (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Named matrices (or failures) at one point.
struct PointOutput {
    lambda: C64,
    entries: Vec<(String, Result<CMat, String>)>,
    extra: Vec<(String, String)>,
}

impl PointOutput {
    fn emit(&self, json_out: bool) -> bool {
        let ok = self.entries.iter().all(|e| e.1.is_ok());
        if json_out {
            let mut map = serde_json::Map::new();
            map.insert("lambda".into(), json!([self.lambda.re, self.lambda.im]));
            for (k, v) in &self.extra {
                map.insert(k.clone(), Value::String(v.clone()));
            }
            for (k, v) in &self.entries {
                let value = match v {
                    Ok(m) => json!(matrix_to_json(m)),
                    Err(e) => json!({ "error": e }),
                };
                map.insert(k.clone(), value);
            }
            say(&(serde_json::to_string_pretty(&Value::Object(map)).expect("plain data") + "\n"));
        } else {
            let mut text = format!("lambda = {}\n", fmt_c(self.lambda));
            for (k, v) in &self.extra {
                text += &format!("{k}: {v}\n");
            }
            for (k, v) in &self.entries {
                match v {
                    Ok(m) => text += &format!("{k} =\n{}\n", fmt_matrix(m)),
                    Err(e) => text += &format!("{k}: {e}\n"),
                }
            }
            say(&text);
        }
        ok
    }
}

fn load(path: &Path, common: &Common) -> Result<InstanceFile, Failure> {
    set_zero_tol(common.tol);
    Ok(parse_instance(path)?)
}

fn weyl_at(path: &Path, lambda: C64, common: &Common) -> Result<bool, Failure> {
    let t = load(path, common)?.triplet()?;
    let w = evaluate(&t, lambda);
    let missing = |m: Option<CMat>| m.ok_or_else(|| "not defined at this point".to_string());
    let out = PointOutput {
        lambda,
        extra: vec![
            ("in_d1".into(), w.in_d1.to_string()),
            ("in_d2".into(), w.in_d2.to_string()),
        ],
        entries: vec![
            ("gamma1".into(), missing(w.gamma1)),
            ("gamma2".into(), missing(w.gamma2)),
            ("m1".into(), missing(w.m1)),
            ("m2".into(), missing(w.m2)),
        ],
    };
    // a point outside both regions is still a valid query
    out.emit(common.json);
    Ok(w.in_d1 || w.in_d2)
}

fn resolvent_at(path: &Path, lambda: C64, common: &Common) -> Result<bool, Failure> {
    let file = load(path, common)?;
    let t = file.triplet()?;
    let taus = file.taus(&t)?;
    if taus.is_empty() {
        return Err(Failure::Input("the instance file stores no parameters".into()));
    }
    let mut entries = Vec::new();
    let mut extra = Vec::new();
    for (label, tau) in &taus {
        let class = point_class(&t, tau, lambda).map_or_else(|e| e.to_string(), |c| format!("{c:?}"));
        extra.push((format!("class[{label}]"), class));
        entries.push((format!("krein[{label}]"), krein_resolvent(&t, tau, lambda).map_err(|e| e.to_string())));
        entries.push((format!("direct[{label}]"), direct_resolvent(&t, tau, lambda).map_err(|e| e.to_string())));
    }
    Ok(PointOutput { lambda, entries, extra }.emit(common.json))
}

fn gres_at(path: &Path, lambda: C64, common: &Common) -> Result<bool, Failure> {
    let file = load(path, common)?;
    let t = file.triplet()?;
    let d = file
        .colligation(&t)
        .ok_or_else(|| Failure::Input("the instance file stores no colligation".into()))??;
    let l = lift_triplet(&t, &d.state)?;
    let oracle = exit_extension(&l, &d).and_then(|vt| compress(&vt, lambda, &l.exit));
    let entries = vec![
        ("generalized_resolvent".into(), generalized_resolvent(&t, &d, lambda).map_err(|e| e.to_string())),
        ("compressed_exit_resolvent".into(), oracle.map_err(|e| e.to_string())),
    ];
    Ok(PointOutput {
        lambda,
        entries,
        extra: Vec::new(),
    }
    .emit(common.json))
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let c = &cli.common;
    if !(c.tol.is_finite() && c.tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {}", c.tol)));
    }
    match &cli.command {
        Command::Verify { path } => suite(path, Suite::Core, c),
        Command::Weyl { path, at: None } => suite(path, Suite::Weyl, c),
        Command::Weyl { path, at: Some(z) } => weyl_at(path, *z, c),
        Command::Resolvent { path, at: None } => suite(path, Suite::Resolvent, c),
        Command::Resolvent { path, at: Some(z) } => resolvent_at(path, *z, c),
        Command::Gres { path, at: None } => suite(path, Suite::Gres, c),
        Command::Gres { path, at: Some(z) } => gres_at(path, *z, c),
        Command::Report { path, suite: s } => suite(path, (*s).into(), c),
        Command::RandomInstance {
            dim,
            kappa,
            dom,
            degenerate,
            out,
        } => {
            let inst = random_instance(*dim, *kappa, *dom, *degenerate, c.seed)?;
            let text = InstanceFile::from_instance(&inst, Some(c.seed)).to_json() + "\n";
            match out {
                Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                None => say(&text),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("ptrip: {msg}");
            ExitCode::from(2)
        }
    }
}
