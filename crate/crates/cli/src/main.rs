use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nonlocal_signaling_cli::output::write_outputs;
use nonlocal_signaling_cli::spec::parse_config;
use nonlocal_signaling_cli::{
    run, CliError, ExperimentSpec, Scenario, EXIT_CHECK_FAILED, EXIT_OK, EXIT_VALIDATION,
};

/// Runs a named signaling experiment and writes `results.csv` and `summary.json`.
///
/// Settings are layered: scenario preset, then `--config`, then flags.
#[derive(Debug, Parser)]
#[command(name = "nlsig", version, allow_negative_numbers = true)]
struct Args {
    /// lightband-delta, lightband-extended, timelike, fig3, local-limit,
    /// timelike-suppression or degenerate-ratio.
    #[arg(long)]
    scenario: Option<String>,
    /// Flat `key = value` file with ExperimentSpec field names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    ell_min: Option<f64>,
    #[arg(long)]
    ell_max: Option<f64>,
    #[arg(long)]
    ell_count: Option<usize>,
    /// log or linear.
    #[arg(long)]
    ell_spacing: Option<String>,
    /// Cross-check every row against direct quadrature.
    #[arg(long, overrides_with = "no_oracle")]
    oracle: bool,
    #[arg(long, overrides_with = "oracle")]
    no_oracle: bool,
    /// Relative tolerance for the quadrature oracle.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Print the resolved spec in config format and exit.
    #[arg(long)]
    print_config: bool,
}

impl Args {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut num = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                out.push((key.to_string(), v.to_string()));
            }
        };
        num("ell_grid.min", self.ell_min);
        num("ell_grid.max", self.ell_max);
        num("tolerance", self.tolerance);
        num("omega", self.omega);
        num("R", self.r);
        num("T", self.t);
        num("tau", self.tau);
        num("a", self.a);
        num("b", self.b);
        num("kappa", self.kappa);
        num("alpha", self.alpha);
        if let Some(n) = self.ell_count {
            out.push(("ell_grid.count".into(), n.to_string()));
        }
        if let Some(s) = &self.ell_spacing {
            out.push(("ell_grid.spacing".into(), s.clone()));
        }
        if self.oracle {
            out.push(("oracle_check".into(), "true".into()));
        } else if self.no_oracle {
            out.push(("oracle_check".into(), "false".into()));
        }
        out
    }

    fn spec(&self) -> Result<ExperimentSpec, CliError> {
        let file = match &self.config {
            Some(path) => parse_config(&fs::read_to_string(path)?)?,
            None => Vec::new(),
        };
        let scenario = self
            .scenario
            .as_deref()
            .map(str::parse::<Scenario>)
            .transpose()?;
        let mut spec = ExperimentSpec::from_entries(scenario, &file)?;
        for (key, value) in self.overrides() {
            spec.set(&key, &value)?;
        }
        Ok(spec)
    }
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let spec = args.spec()?;
    let plan = spec.plan()?;
    if args.print_config {
        print!("{}", spec.to_config_string());
        return Ok(EXIT_OK);
    }
    let outcome = run(&plan, &spec.parameters)?;
    let (csv, json) = write_outputs(&args.out, &outcome)?;
    for c in &outcome.summary.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {}: expected {}, observed {}",
            c.name, c.expected, c.observed
        );
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(if outcome.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("nlsig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
