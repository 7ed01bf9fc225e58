use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracdyn::scenario::{parse_config_as, run_scenario, ModuleKind, RunReport, ScenarioConfig};
use fracdyn::{mittag_leffler, Complex64, Error, FractionalOrder};

#[derive(Parser)]
#[command(name = "fracdyn", version, about = "Fractional-time quantum dynamics scenarios")]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir` in the scenario.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Mittag-Leffler functions.
    Mlf {
        #[command(subcommand)]
        action: Option<MlfAction>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time evolution of a scenario.
    Evolve {
        #[arg(value_enum)]
        method: EvolveMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Laplace-domain pole comparison for a Hamiltonian.
    Poles {
        /// Scenario file describing the Hamiltonian (alias of --config).
        #[arg(long, alias = "config")]
        hamiltonian: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-moment traces for the dilation Hamiltonian.
    Hyperbolic(HyperbolicArgs),
    /// Run the built-in acceptance suite.
    Verify {
        #[arg(long, default_value = "out/verify")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MlfAction {
    /// Print E_alpha(z) for one argument.
    Eval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvolveMethod {
    Spectral,
    Caputo,
    Comb,
    OperatorForm,
}

impl EvolveMethod {
    fn module(self) -> ModuleKind {
        match self {
            EvolveMethod::Spectral => ModuleKind::FseSpectral,
            EvolveMethod::Caputo => ModuleKind::FseCaputo,
            EvolveMethod::Comb => ModuleKind::Comb,
            EvolveMethod::OperatorForm => ModuleKind::FseOperatorForm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Semiclassical,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Gaussian,
}

#[derive(Args)]
struct HyperbolicArgs {
    /// Scenario file; the flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "semiclassical")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    profile: ProfileArg,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// `start:stop:count` or a comma-separated list.
    #[arg(long, default_value = "0:1:11")]
    t_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    kind: String,
    message: String,
    detail: String,
}

impl Failure {
    fn from_error(e: &Error, context: &str) -> Self {
        Failure {
            code: if e.is_config_error() { 2 } else { 3 },
            kind: e.kind().to_string(),
            message: e.to_string(),
            detail: context.to_string(),
        }
    }

    fn config(kind: &str, message: String, detail: &str) -> Self {
        Failure { code: 2, kind: kind.into(), message, detail: detail.into() }
    }
}

fn read_config(path: &Path, module: ModuleKind) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::config("io_error", format!("{}: {e}", path.display()), "could not read the scenario file")
    })?;
    parse_config_as(&text, module).map_err(|e| Failure::from_error(&e, &format!("in scenario file {}", path.display())))
}

fn run(cfg: &ScenarioConfig, out: Option<&Path>, quiet: bool) -> Result<(), Failure> {
    let report: RunReport = run_scenario(cfg, out)
        .map_err(|e| Failure::from_error(&e, &format!("while running scenario `{}`", cfg.name)))?;
    if !quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        println!(
            "{}: wrote {} files to {} in {:.2}s",
            cfg.name,
            report.files.len(),
            report.output_dir.display(),
            report.wall_time.as_secs_f64()
        );
    }
    Ok(())
}

fn parse_t_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| {
        Failure::config("validation_error", format!("--t-grid `{s}`: {why}"), "expected start:stop:count or a list")
    };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        if n < 2 {
            return Err(bad("count must be at least 2"));
        }
        return Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad("bad number"))).collect()
}

fn hyperbolic_config(args: &HyperbolicArgs) -> Result<ScenarioConfig, Failure> {
    if let Some(path) = &args.config {
        return read_config(path, ModuleKind::Hyperbolic);
    }
    let times = parse_t_grid(&args.t_grid)?;
    let mode = match args.mode {
        ModeArg::Standard => "standard",
        ModeArg::Semiclassical => "semiclassical",
    };
    let ProfileArg::Gaussian = args.profile;
    let times: Vec<String> = times.iter().map(|t| format!("{t:?}")).collect();
    let text = format!(
        "name = hyperbolic_{mode}\nmodule = hyperbolic\nhbar = {:?}\ntimes = {}\n\n[initial]\nprofile = gaussian\ncenter = 0\na = 1\n\n[hyperbolic]\nmode = {mode}\n",
        args.hbar,
        times.join(", ")
    );
    parse_config_as(&text, ModuleKind::Hyperbolic).map_err(|e| Failure::from_error(&e, "in --hbar/--t-grid arguments"))
}

fn mlf_eval(alpha: f64, re: f64, im: f64, tol: f64) -> Result<(), Failure> {
    let ctx = "in mlf eval arguments";
    let a = FractionalOrder::new(alpha).map_err(|e| Failure::config(e.kind(), e.to_string(), ctx))?;
    let r = mittag_leffler(a, Complex64::new(re, im), tol).map_err(|e| Failure::from_error(&e, ctx))?;
    println!("{:.16e} {:.16e} {} {:.3e}", r.value.re, r.value.im, r.method.as_str(), r.est_abs_error);
    Ok(())
}

fn verify(out: &Path, quiet: bool) -> Result<(), Failure> {
    let report = fracdyn::verify::run_all(out, |c| {
        if !quiet {
            println!("{}", c.summary());
        }
    })
    .map_err(|e| Failure::from_error(&e, "while running the acceptance suite"))?;
    let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed()).map(|c| c.id.to_string()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    Err(Failure {
        code: 3,
        kind: "acceptance_failed".into(),
        message: format!("criteria {} failed", failed.join(", ")),
        detail: format!("see {}", report.csv_path.display()),
    })
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Mlf { action: Some(MlfAction::Eval { alpha, re, im, tol }), .. } => mlf_eval(*alpha, *re, *im, *tol),
        Command::Mlf { action: None, config: Some(path), out } => {
            run(&read_config(path, ModuleKind::Mlf)?, out.as_deref(), cli.quiet)
        }
        Command::Mlf { action: None, config: None, .. } => Err(Failure::config(
            "validation_error",
            "mlf needs `eval` or --config".into(),
            "try `fracdyn mlf eval --alpha 0.5 --re 1`",
        )),
        Command::Evolve { method, run: args } => {
            run(&read_config(&args.config, method.module())?, args.out.as_deref(), cli.quiet)
        }
        Command::Poles { hamiltonian, out } => {
            run(&read_config(hamiltonian, ModuleKind::Poles)?, out.as_deref(), cli.quiet)
        }
        Command::Hyperbolic(args) => run(&hyperbolic_config(args)?, args.out.as_deref(), cli.quiet),
        Command::Verify { out } => verify(out, cli.quiet),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = serde_json::to_string(&f.message).unwrap_or_default();
            eprintln!("error kind={} exit={} message={msg}", f.kind, f.code);
            eprintln!("  {}: {}", f.detail, f.message);
            ExitCode::from(f.code)
        }
    }
}
