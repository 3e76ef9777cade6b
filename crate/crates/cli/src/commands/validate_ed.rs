//! `validate-ed`: effective ground energies against exact
//! diagonalization over a hopping sweep, plus the unitarity witness of
//! the conjugation at every sample.

use crate::commands::one_band_model;
use crate::config::{parse_rat, RunConfig};
use crate::output::{write_json, write_text};
use crate::RunError;
use clap::Args;
use num::BigRational;
use sceff_core::engine::derive;
use sceff_core::lattice::Shape;
use sceff_core::validate::{scaling_study, unitarity_witness};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Both witness errors must stay below this on every sample.
const WITNESS_TOLERANCE: f64 = 1e-10;

/// Demanded log-log slope margin: degree `2n + 2` error from an order-n
/// table, minus measurement slack.
fn required_slope(order: u32) -> f64 {
    2.0 * order as f64 + 1.7
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// one-band-symmetric or falicov-kimball.
    #[arg(long)]
    model: Option<String>,
    /// Conjugation depth: 1 or 2 generator steps.
    #[arg(long)]
    order: Option<u32>,
    /// Cluster shape: bond, chain3, corner3, plaquette or chainN.
    #[arg(long)]
    shape: Option<String>,
    /// Exact hopping samples, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Vec<String>,
    /// On-site repulsion, exact (default 8).
    #[arg(long = "U", alias = "u")]
    u: Option<String>,
    /// Spin field, exact (default 0).
    #[arg(long)]
    h: Option<String>,
    /// On-site offset, exact (default 0).
    #[arg(long)]
    k: Option<String>,
    /// Output directory (default `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct WitnessRow {
    hopping: String,
    dim: usize,
    orthogonality_error: f64,
    spectrum_error: f64,
}

#[derive(Serialize)]
struct PointRow {
    hopping: String,
    exact_energy: f64,
    effective_energy: f64,
    band_error: f64,
}

#[derive(Serialize)]
struct ScalingReport {
    model: String,
    shape: String,
    order: u32,
    u: String,
    h: String,
    k: String,
    points: Vec<PointRow>,
    slope: f64,
    slope_required: f64,
    witness: Vec<WitnessRow>,
    witness_tolerance: f64,
    pass: bool,
}

pub fn run(args: &ValidateArgs) -> Result<(), RunError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let model_name = args
        .model
        .clone()
        .or_else(|| cfg.model.clone())
        .unwrap_or_else(|| "one-band-symmetric".to_string());
    if model_name == "one-band-general" {
        return Err(RunError::Config(
            "validate-ed sweeps a single hopping; use one-band-symmetric or falicov-kimball"
                .into(),
        ));
    }
    let Some(model) = one_band_model(&model_name) else {
        return Err(RunError::Config(format!("unknown model {model_name:?}")));
    };
    let order = args.order.or(cfg.order).unwrap_or(2);
    if order != 1 && order != 2 {
        return Err(RunError::Config(format!(
            "validate-ed covers orders 1 and 2, got {order}"
        )));
    }
    let shape_name = args
        .shape
        .clone()
        .or_else(|| cfg.shape.clone())
        .unwrap_or_else(|| "bond".to_string());
    let Some(shape) = Shape::parse(&shape_name) else {
        return Err(RunError::Config(format!("unknown shape {shape_name:?}")));
    };
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let samples: Vec<String> = if !args.t.is_empty() {
        args.t.clone()
    } else {
        cfg.samples.clone().unwrap_or_else(|| {
            ["2/5", "1/5", "1/10", "1/20", "1/40"]
                .map(str::to_string)
                .to_vec()
        })
    };
    let mut hoppings = Vec::with_capacity(samples.len());
    for s in &samples {
        let t = parse_rat("t", s)?;
        if t <= BigRational::from_integer(0.into()) {
            return Err(RunError::Precondition(format!(
                "hopping samples must be positive, got {s}"
            )));
        }
        hoppings.push(t);
    }
    if hoppings.len() < 2 {
        return Err(RunError::Precondition(
            "the scaling slope needs at least two hopping samples".into(),
        ));
    }

    let pick = |flag: &Option<String>, key: &str, default: &str| -> Result<BigRational, RunError> {
        let s = flag
            .clone()
            .or_else(|| cfg.params.get(key).cloned())
            .unwrap_or_else(|| default.to_string());
        parse_rat(key, &s)
    };
    let u = pick(&args.u, "U", "8")?;
    let h = pick(&args.h, "h", "0")?;
    let k = pick(&args.k, "k", "0")?;

    let values_at =
        |t: &BigRational| -> Vec<BigRational> { vec![t.clone(), u.clone(), h.clone(), k.clone()] };

    let study = scaling_study(&model, shape, order, &hoppings, values_at)?;

    let cluster = model.cluster(shape);
    let d = derive(&model, &cluster, order, 2 * order)?;
    let mut witness = Vec::with_capacity(hoppings.len());
    for t in &hoppings {
        let w = unitarity_witness(&d, &values_at(t))?;
        witness.push(WitnessRow {
            hopping: sceff_core::scalar::format_rational(t),
            dim: w.dim,
            orthogonality_error: w.orthogonality_error,
            spectrum_error: w.spectrum_error,
        });
    }

    let slope_required = required_slope(order);
    let slope_ok = study.slope >= slope_required;
    let worst_witness = witness
        .iter()
        .map(|w| w.orthogonality_error.max(w.spectrum_error))
        .fold(0.0, f64::max);
    let witness_ok = worst_witness <= WITNESS_TOLERANCE;
    let pass = slope_ok && witness_ok;

    let report = ScalingReport {
        model: model_name.clone(),
        shape: shape_name.clone(),
        order,
        u: sceff_core::scalar::format_rational(&u),
        h: sceff_core::scalar::format_rational(&h),
        k: sceff_core::scalar::format_rational(&k),
        points: study
            .points
            .iter()
            .zip(&witness)
            .map(|(p, w)| PointRow {
                hopping: w.hopping.clone(),
                exact_energy: p.exact_energy,
                effective_energy: p.effective_energy,
                band_error: p.band_error,
            })
            .collect(),
        slope: study.slope,
        slope_required,
        witness,
        witness_tolerance: WITNESS_TOLERANCE,
        pass,
    };

    let mut csv = String::from("hopping,exact_energy,effective_energy,band_error\n");
    for p in &report.points {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            p.hopping, p.exact_energy, p.effective_energy, p.band_error
        );
    }
    write_text(&out_dir.join("scaling.csv"), &csv)?;
    write_json(&out_dir.join("scaling.json"), &report)?;

    println!(
        "band-error slope over {} samples: {:.3} (required {:.2}): {}",
        report.points.len(),
        report.slope,
        slope_required,
        pass_fail(slope_ok)
    );
    println!(
        "unitarity witness worst error {:.3e} (tolerance {:.0e}): {}",
        worst_witness,
        WITNESS_TOLERANCE,
        pass_fail(witness_ok)
    );

    if pass {
        Ok(())
    } else {
        Err(RunError::Check(format!(
            "validate-ed failed: slope {:.3} (required {:.2}), worst witness error {:.3e}",
            report.slope, slope_required, worst_witness
        )))
    }
}

fn pass_fail(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}
