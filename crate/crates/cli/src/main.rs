mod commands;
mod config;
mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use covertlab::NoiseModel;

use config::{CommandName, Format, RunConfig, ScheduleArg};

#[derive(Parser, Debug)]
#[command(
    name = "covertlab",
    version,
    about = "Covert communication toolkit for additive-noise channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Square-root scaling constant L.
    Scaling,
    /// Tilted-noise diagnostics at a given tilt or covertness budget.
    Tilt,
    /// Tilt parameter from the converse and achievability budgets.
    SolveGamma,
    /// Input law whose sum with the noise has the tilted law.
    SynthInput,
    /// Monte Carlo threshold-decoding experiment at one blocklength.
    Simulate,
    /// The experiment over a ladder of blocklengths.
    Sweep,
    /// Sufficient secret-key length from the resolvability bound.
    Keylen,
    /// Integrability conditions of the noise density.
    CheckIntegrability,
}

impl From<Cmd> for CommandName {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Scaling => CommandName::Scaling,
            Cmd::Tilt => CommandName::Tilt,
            Cmd::SolveGamma => CommandName::SolveGamma,
            Cmd::SynthInput => CommandName::SynthInput,
            Cmd::Simulate => CommandName::Simulate,
            Cmd::Sweep => CommandName::Sweep,
            Cmd::Keylen => CommandName::Keylen,
            Cmd::CheckIntegrability => CommandName::CheckIntegrability,
        }
    }
}

#[derive(clap::Args, Debug)]
struct Args {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved run configuration instead of running.
    #[arg(long, global = true)]
    print_config: bool,

    /// gaussian | exponential | laplace | gg | ggamma | uniform
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    scale: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lo: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    hi: Option<f64>,

    /// Covertness budget Δ in nats.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Blocklength; repeat or separate with commas for several.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<u64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Exponent of the n^-chi slack in the achievability tilt, in (1, 3/2).
    #[arg(long, global = true, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Fix the resolvability parameter instead of searching the grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// ln|M| as a fraction of L sqrt(nΔ).
    #[arg(long, global = true, allow_negative_numbers = true)]
    rate_fraction: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    scan_window: Option<u64>,
    /// Target bound on the output divergence, in nats.
    #[arg(long, global = true, allow_negative_numbers = true)]
    target_leak: Option<f64>,
    #[arg(long, global = true, value_enum)]
    schedule: Option<ScheduleArg>,
    /// Exponent of the message slack ξ_n = n^x.
    #[arg(long, global = true, allow_negative_numbers = true)]
    xi_exponent: Option<f64>,
    /// Sample count for the KS check.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Human-readable output with information quantities in bits.
    #[arg(long, global = true)]
    bits: bool,
}

fn model_from_flags(a: &Args) -> Result<Option<NoiseModel>> {
    let given: BTreeMap<String, f64> = [
        ("sigma", a.sigma),
        ("lambda", a.lambda),
        ("scale", a.scale),
        ("p", a.p),
        ("r", a.r),
        ("beta", a.beta),
        ("lo", a.lo),
        ("hi", a.hi),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
    .collect();
    match &a.family {
        Some(family) => Ok(Some(NoiseModel::from_params(family, &given)?)),
        None if !given.is_empty() => bail!("family parameters given without --family"),
        None => Ok(None),
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let command = CommandName::from(cli.command);
    let a = &cli.args;
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let cfg =
                RunConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            if cfg.command != command {
                bail!("config is for command {:?}, not {:?}", cfg.command, command);
            }
            cfg
        }
        None => RunConfig::new(command),
    };
    if let Some(m) = model_from_flags(a)? {
        cfg.model = Some(m);
    }
    if !a.n.is_empty() {
        cfg.n = a.n.clone();
    }
    macro_rules! overlay {
        ($($f:ident),*) => { $( if a.$f.is_some() { cfg.$f = a.$f; } )* };
    }
    overlay!(
        delta,
        gamma,
        chi,
        rho,
        rate_fraction,
        trials,
        scan_window,
        target_leak,
        schedule,
        xi_exponent,
        samples,
        zeta
    );
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(format) = a.format {
        cfg.format = format;
    }
    Ok(cfg)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("COVERTLAB_THREADS") {
        let k: usize = v
            .trim()
            .parse()
            .with_context(|| format!("COVERTLAB_THREADS={v:?} is not a count"))?;
        if k == 0 {
            bail!("COVERTLAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    let text = if cli.args.print_config {
        cfg.to_json() + "\n"
    } else {
        configure_threads()?;
        let out = commands::execute(&cfg)?;
        if cli.args.bits {
            render::human_bits(&out.json)
        } else {
            match cfg.format {
                Format::Json => serde_json::to_string_pretty(&out.json)? + "\n",
                Format::Csv => out.csv,
            }
        }
    };
    match &cli.args.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
