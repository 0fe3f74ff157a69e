use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};
use covertlab::input::{
    charfn_factorization_residual, default_t_grid, ks_check_synthesized, synthesize_input,
    InputKind, InputLaw, KsReport,
};
use covertlab::key_length::{
    key_length_at_rho, sufficient_key_length, KeyLengthOptions, KeyLengthReport,
};
use covertlab::noise::{integrability_check, IntegrabilityReport, DEFAULT_ZETA};
use covertlab::scaling::{scaling_constant, ScalingResult};
use covertlab::simulator::{run_experiment, sweep, sweep_csv, ExperimentSpec, DEFAULT_SCAN_WINDOW};
use covertlab::tilt::{
    entropy_gap_taylor, kl_taylor, make_tilted, solve_gamma_converse, CovertBudget, DEFAULT_CHI,
};
use covertlab::NoiseModel;
use serde::Serialize;
use serde_json::Value;

use crate::config::{CommandName, RunConfig, ScheduleArg};

pub const DEFAULT_RATE_FRACTION: f64 = 0.7;
pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_TARGET_LEAK: f64 = 1e-3;
pub const DEFAULT_KS_SAMPLES: usize = 100_000;
pub const KS_SIGNIFICANCE: f64 = 1e-3;

pub const SCALING_CSV_HEADER: &str = "family,L_upper,L_exact,exactness_basis,log_pdf_variance";
pub const TILT_CSV_HEADER: &str =
    "gamma,n,delta,alpha,log_alpha,kl,kl_taylor,entropy_tilted,entropy_gap,entropy_gap_taylor";
pub const SOLVE_GAMMA_CSV_HEADER: &str = "n,delta,rule,gamma_n,chi,divergence";
pub const SYNTH_CSV_HEADER: &str =
    "gamma,kind,variance,mass_at_zero,rate,charfn_residual,ks_statistic,ks_critical,ks_samples,ks_passed";
pub const KEYLEN_CSV_HEADER: &str =
    "n,rho,key_nats,bound,psi,msg_nats,gamma,xi,target_leak,schedule";
pub const INTEGRABILITY_CSV_HEADER: &str =
    "zeta,integral_plain_log4,integral_zeta,integral_zeta_log4,all_finite,divergent";

pub struct Output {
    pub json: Value,
    pub csv: String,
}

fn model(cfg: &RunConfig) -> Result<NoiseModel> {
    cfg.model
        .ok_or_else(|| anyhow!("a noise model is required (--family and its parameters)"))
}

fn delta(cfg: &RunConfig) -> Result<f64> {
    cfg.delta.ok_or_else(|| anyhow!("--delta is required"))
}

fn blocklengths(cfg: &RunConfig) -> Result<&[u64]> {
    if cfg.n.is_empty() {
        bail!("at least one --n is required");
    }
    Ok(&cfg.n)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn execute(cfg: &RunConfig) -> Result<Output> {
    match cfg.command {
        CommandName::Scaling => scaling(cfg),
        CommandName::Tilt => tilt(cfg),
        CommandName::SolveGamma => solve_gamma(cfg),
        CommandName::SynthInput => synth_input(cfg),
        CommandName::Simulate => simulate(cfg),
        CommandName::Sweep => run_sweep(cfg),
        CommandName::Keylen => keylen(cfg),
        CommandName::CheckIntegrability => check_integrability(cfg),
    }
}

#[derive(Serialize)]
struct ScalingOutput {
    model: NoiseModel,
    #[serde(flatten)]
    result: ScalingResult,
}

fn scaling(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let result = scaling_constant(&model)?;
    let basis = json(&result.basis);
    let csv = format!(
        "{SCALING_CSV_HEADER}\n{},{},{},{},{}\n",
        model.family_name(),
        result.l_upper,
        opt(result.l_exact),
        basis.as_str().unwrap_or_default(),
        result.log_pdf_variance
    );
    Ok(Output {
        json: json(&ScalingOutput { model, result }),
        csv,
    })
}

#[derive(Serialize)]
struct TiltRow {
    model: NoiseModel,
    gamma: f64,
    n: Option<u64>,
    delta: Option<f64>,
    alpha: f64,
    log_alpha: f64,
    tilted: NoiseModel,
    kl: f64,
    kl_taylor: f64,
    entropy_tilted: f64,
    entropy_gap: f64,
    entropy_gap_taylor: f64,
}

fn tilt_row(model: &NoiseModel, gamma: f64, n: Option<u64>, delta: Option<f64>) -> Result<TiltRow> {
    let t = make_tilted(model, gamma)?;
    Ok(TiltRow {
        model: *model,
        gamma,
        n,
        delta,
        alpha: t.alpha,
        log_alpha: t.log_alpha,
        tilted: t.tilted,
        kl: t.kl_to_base(),
        kl_taylor: kl_taylor(model, gamma),
        entropy_tilted: t.entropy(),
        entropy_gap: t.entropy_gap(),
        entropy_gap_taylor: entropy_gap_taylor(model, gamma),
    })
}

fn tilt(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let rows = match cfg.gamma {
        Some(gamma) => vec![tilt_row(&model, gamma, None, None)?],
        None => {
            let delta = cfg
                .delta
                .ok_or_else(|| anyhow!("tilt needs --gamma or --delta with --n"))?;
            blocklengths(cfg)?
                .iter()
                .map(|&n| {
                    tilt_row(
                        &model,
                        solve_gamma_converse(&model, delta, n)?,
                        Some(n),
                        Some(delta),
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let mut csv = format!("{TILT_CSV_HEADER}\n");
    for r in &rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{n},{},{},{},{},{},{},{},{}",
            r.gamma,
            opt(r.delta),
            r.alpha,
            r.log_alpha,
            r.kl,
            r.kl_taylor,
            r.entropy_tilted,
            r.entropy_gap,
            r.entropy_gap_taylor
        )?;
    }
    Ok(Output {
        json: json(&rows),
        csv,
    })
}

fn solve_gamma(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let delta = delta(cfg)?;
    let chi = cfg.chi.unwrap_or(DEFAULT_CHI);
    let mut rows = Vec::new();
    for &n in blocklengths(cfg)? {
        rows.push(CovertBudget::converse(&model, delta, n)?);
        rows.push(CovertBudget::achievability(&model, delta, n, chi)?);
    }
    let mut csv = format!("{SOLVE_GAMMA_CSV_HEADER}\n");
    for b in &rows {
        let rule = json(&b.rule);
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            b.n,
            b.delta,
            rule.as_str().unwrap_or_default(),
            b.gamma_n,
            b.chi,
            b.divergence
        )?;
    }
    Ok(Output {
        json: json(&rows),
        csv,
    })
}

#[derive(Serialize)]
struct SynthOutput {
    model: NoiseModel,
    gamma: f64,
    input: InputLaw,
    charfn_residual: f64,
    ks: KsReport,
}

fn synth_input(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let gamma = match cfg.gamma {
        Some(g) => g,
        None => {
            let delta = cfg
                .delta
                .ok_or_else(|| anyhow!("synth-input needs --gamma or --delta with one --n"))?;
            match blocklengths(cfg)? {
                [n] => solve_gamma_converse(&model, delta, *n)?,
                _ => bail!("synth-input takes exactly one --n"),
            }
        }
    };
    let input = synthesize_input(&model, gamma)?;
    let charfn_residual = charfn_factorization_residual(&model, &input, gamma, &default_t_grid())?;
    let samples = cfg.samples.unwrap_or(DEFAULT_KS_SAMPLES);
    let ks = ks_check_synthesized(&model, gamma, samples, KS_SIGNIFICANCE, cfg.seed)?;
    let (variance, mass, rate) = match input.kind {
        InputKind::GaussianInput { variance } => (Some(variance), None, None),
        InputKind::MixturePointMassExponential { mass_at_zero, rate } => {
            (None, Some(mass_at_zero), Some(rate))
        }
    };
    let kind = json(&input);
    let csv = format!(
        "{SYNTH_CSV_HEADER}\n{gamma},{},{},{},{},{charfn_residual},{},{},{},{}\n",
        kind["kind"].as_str().unwrap_or_default(),
        opt(variance),
        opt(mass),
        opt(rate),
        ks.statistic,
        ks.critical,
        ks.samples,
        ks.passed
    );
    Ok(Output {
        json: json(&SynthOutput {
            model,
            gamma,
            input,
            charfn_residual,
            ks,
        }),
        csv,
    })
}

fn experiment(cfg: &RunConfig, n: u64) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(
        model(cfg)?,
        delta(cfg)?,
        usize::try_from(n)?,
        cfg.rate_fraction.unwrap_or(DEFAULT_RATE_FRACTION),
        cfg.trials.unwrap_or(DEFAULT_TRIALS),
        cfg.seed,
    );
    spec.chi = cfg.chi.unwrap_or(DEFAULT_CHI);
    spec.scan_window = cfg.scan_window.unwrap_or(DEFAULT_SCAN_WINDOW);
    Ok(spec)
}

fn simulate(cfg: &RunConfig) -> Result<Output> {
    let n = match blocklengths(cfg)? {
        [n] => *n,
        _ => bail!("simulate takes exactly one --n; use sweep for several"),
    };
    let report = run_experiment(&experiment(cfg, n)?)?;
    let csv = sweep_csv(std::slice::from_ref(&report));
    Ok(Output {
        json: json(&report),
        csv,
    })
}

fn run_sweep(cfg: &RunConfig) -> Result<Output> {
    let ns = blocklengths(cfg)?;
    let base = experiment(cfg, ns[0])?;
    let ns: Vec<usize> = ns
        .iter()
        .map(|&n| usize::try_from(n))
        .collect::<Result<_, _>>()?;
    let reports = sweep(&base, &ns)?;
    let csv = sweep_csv(&reports);
    Ok(Output {
        json: json(&reports),
        csv,
    })
}

fn keylen(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let delta = delta(cfg)?;
    let target = cfg.target_leak.unwrap_or(DEFAULT_TARGET_LEAK);
    let schedule = cfg.schedule.unwrap_or(ScheduleArg::SubSqrt).into();
    let mut options = KeyLengthOptions::default();
    if let Some(chi) = cfg.chi {
        options.chi = chi;
    }
    if let Some(x) = cfg.xi_exponent {
        options.xi_exponent = x;
    }
    let rows: Vec<KeyLengthReport> = blocklengths(cfg)?
        .iter()
        .map(|&n| match cfg.rho {
            Some(rho) => key_length_at_rho(&model, delta, n, target, schedule, rho, options),
            None => sufficient_key_length(&model, delta, n, target, schedule, options),
        })
        .collect::<Result<_, _>>()?;
    let mut csv = format!("{KEYLEN_CSV_HEADER}\n");
    for r in &rows {
        let schedule = json(&r.schedule);
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.rho,
            r.key_nats,
            r.resolvability_bound,
            r.psi_value,
            r.msg_nats,
            r.gamma,
            r.xi,
            r.target_leak,
            schedule.as_str().unwrap_or_default()
        )?;
    }
    Ok(Output {
        json: json(&rows),
        csv,
    })
}

#[derive(Serialize)]
struct IntegrabilityOutput {
    model: NoiseModel,
    #[serde(flatten)]
    report: IntegrabilityReport,
}

fn check_integrability(cfg: &RunConfig) -> Result<Output> {
    let model = model(cfg)?;
    let report = integrability_check(&model, cfg.zeta.unwrap_or(DEFAULT_ZETA))?;
    let csv = format!(
        "{INTEGRABILITY_CSV_HEADER}\n{},{},{},{},{},{}\n",
        report.zeta,
        report.integral_plain_log4,
        report.integral_zeta,
        report.integral_zeta_log4,
        report.all_finite,
        report.divergent.join(";")
    );
    Ok(Output {
        json: json(&IntegrabilityOutput { model, report }),
        csv,
    })
}
