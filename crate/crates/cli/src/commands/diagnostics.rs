//! `diagnostics`: closed-form stability and convergence parameters of
//! the block-diagonalization at one parameter point, reported next to
//! the exact defect cost of the winning configuration.

use crate::config::{parse_rat, RunConfig};
use crate::output::{write_json, Rat};
use crate::RunError;
use clap::Args;
use num::BigRational;
use sceff_core::models::Model;
use sceff_core::phase::{model_table, stability_diagnostics, DiagnosticsInput};
use sceff_core::scalar::format_rational;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct DiagArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Conjugation depth n of the table in use: 1 or 2.
    #[arg(long)]
    order: Option<u32>,
    /// Mobile-species hopping, exact.
    #[arg(long)]
    t: Option<String>,
    /// Frozen-species hopping (default 0).
    #[arg(long)]
    t_up: Option<String>,
    /// On-site repulsion, exact.
    #[arg(long = "U", alias = "u")]
    u: Option<String>,
    /// Field at which the winner and its defect cost are taken.
    #[arg(long)]
    h: Option<String>,
    /// Chemical potential (default U/2).
    #[arg(long)]
    mu0: Option<String>,
    /// Classical gap scale of the protection zones.
    #[arg(long)]
    delta: Option<String>,
    /// Inverse temperature for the thermal factor.
    #[arg(long)]
    beta: Option<f64>,
    /// Output directory (default `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct ParamEcho {
    t: Rat,
    t_up: Rat,
    u: Rat,
    h: Rat,
    mu0: Rat,
    delta: Rat,
    beta: f64,
}

#[derive(Serialize)]
struct EpsReport {
    ll: f64,
    hl: f64,
    lh: f64,
    hh: f64,
}

#[derive(Serialize)]
struct DiagnosticsReport {
    order: u32,
    params: ParamEcho,
    winner: String,
    kappa: Rat,
    kappa_estimate: Rat,
    inside_excluded_band: bool,
    d: Rat,
    eps: EpsReport,
    eta: Option<f64>,
    epsilon: Option<f64>,
}

pub fn run(args: &DiagArgs) -> Result<(), RunError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let order = args.order.or(cfg.order).unwrap_or(2);
    if order != 1 && order != 2 {
        return Err(RunError::Config(format!(
            "diagnostics cover orders 1 and 2, got {order}"
        )));
    }
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let pick = |flag: &Option<String>, key: &str| -> Result<Option<BigRational>, RunError> {
        match flag.clone().or_else(|| cfg.params.get(key).cloned()) {
            Some(s) => Ok(Some(parse_rat(key, &s)?)),
            None => Ok(None),
        }
    };
    let need = |v: Option<BigRational>, what: &str| -> Result<BigRational, RunError> {
        v.ok_or_else(|| RunError::Config(format!("diagnostics need {what}")))
    };
    let zero = BigRational::from_integer(0.into());
    let two = BigRational::from_integer(2.into());

    let t = need(pick(&args.t, "t")?, "--t")?;
    let t_up = pick(&args.t_up, "t_up")?.unwrap_or_else(|| zero.clone());
    let u = need(pick(&args.u, "U")?, "--u")?;
    let h = pick(&args.h, "h")?.unwrap_or_else(|| zero.clone());
    let mu0 = match pick(&args.mu0, "mu0")? {
        Some(v) => v,
        None => &u / &two,
    };
    let delta = need(pick(&args.delta, "delta")?, "--delta")?;
    let beta = args
        .beta
        .or(cfg.beta)
        .ok_or_else(|| RunError::Config("diagnostics need --beta".into()))?;

    if delta <= zero {
        return Err(RunError::Precondition(
            "the gap scale delta must be positive".into(),
        ));
    }
    if beta <= 0.0 {
        return Err(RunError::Precondition(
            "the inverse temperature beta must be positive".into(),
        ));
    }
    if mu0 <= zero || mu0 >= u {
        return Err(RunError::Precondition(
            "the chemical potential mu0 must sit strictly inside (0, U)".into(),
        ));
    }

    let tab = model_table(
        &Model::falicov_kimball(),
        2 * order,
        &[t.clone(), u.clone(), zero.clone(), zero],
    )?;
    let input = DiagnosticsInput {
        t: t.clone(),
        t_up: t_up.clone(),
        u: u.clone(),
        h: h.clone(),
        mu0: mu0.clone(),
        delta: delta.clone(),
        beta,
        order,
    };
    let diag = stability_diagnostics(&tab, &input)?;

    let report = DiagnosticsReport {
        order,
        params: ParamEcho {
            t: Rat::new(&t),
            t_up: Rat::new(&t_up),
            u: Rat::new(&u),
            h: Rat::new(&h),
            mu0: Rat::new(&mu0),
            delta: Rat::new(&delta),
            beta,
        },
        winner: diag.winner_label.clone(),
        kappa: Rat::new(&diag.kappa),
        kappa_estimate: Rat::new(&diag.kappa_estimate),
        inside_excluded_band: diag.inside_excluded_band,
        d: Rat::new(&diag.d),
        eps: EpsReport {
            ll: diag.eps_ll,
            hl: diag.eps_hl,
            lh: diag.eps_lh,
            hh: diag.eps_hh,
        },
        eta: diag.eta,
        epsilon: diag.epsilon,
    };
    write_json(&out_dir.join("diagnostics.json"), &report)?;

    println!(
        "winner at h = {}: {}",
        format_rational(&h),
        diag.winner_label
    );
    println!(
        "kappa = {} exact, estimate 4t^2/U - |h| = {}",
        format_rational(&diag.kappa),
        format_rational(&diag.kappa_estimate)
    );
    println!("D = {}", format_rational(&diag.d));
    println!(
        "eps_ll = {:e}, eps_hl = {:e}, eps_lh = {:e}, eps_hh = {:e}",
        diag.eps_ll, diag.eps_hl, diag.eps_lh, diag.eps_hh
    );
    match (diag.eta, diag.epsilon) {
        (Some(eta), Some(epsilon)) => println!("eta = {eta:e}, epsilon = {epsilon:e}"),
        _ => println!("inside excluded band: kappa <= 0, convergence ratios undefined"),
    }
    Ok(())
}
