//! `identities`: the projector and ladder identities behind the
//! derivation, checked exactly on small clusters.

use crate::commands::one_band_model;
use crate::config::RunConfig;
use crate::RunError;
use clap::Args;
use sceff_core::engine::adjacent_bond_cross_terms_vanish;
use sceff_core::lattice::Shape;
use sceff_core::models::{identity_suite, Model};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct IdentArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// A one-band model name, or `all` (default).
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated cluster shapes (default bond,chain3).
    #[arg(long, value_delimiter = ',')]
    shapes: Vec<String>,
}

pub fn run(args: &IdentArgs) -> Result<(), RunError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let model_name = args
        .model
        .clone()
        .or_else(|| cfg.model.clone())
        .unwrap_or_else(|| "all".to_string());
    let models: Vec<(String, Model)> = if model_name == "all" {
        ["one-band-general", "one-band-symmetric", "falicov-kimball"]
            .iter()
            .map(|n| (n.to_string(), one_band_model(n).unwrap()))
            .collect()
    } else {
        match one_band_model(&model_name) {
            Some(m) => vec![(model_name, m)],
            None => {
                return Err(RunError::Config(format!(
                    "identity checks cover the one-band models, not {model_name:?}"
                )))
            }
        }
    };

    let shape_names: Vec<String> = if args.shapes.is_empty() {
        cfg.shape
            .clone()
            .map(|s| vec![s])
            .unwrap_or_else(|| vec!["bond".to_string(), "chain3".to_string()])
    } else {
        args.shapes.clone()
    };
    let mut shapes = Vec::with_capacity(shape_names.len());
    for name in &shape_names {
        match Shape::parse(name) {
            Some(Shape::Cuo2Bond) | Some(Shape::Cuo2TwoBonds) | None => {
                return Err(RunError::Config(format!("unknown one-band shape {name:?}")))
            }
            Some(s) => shapes.push((name.clone(), s)),
        }
    }

    let mut total = 0usize;
    let mut failed = 0usize;
    for (model_name, model) in &models {
        for (shape_name, shape) in &shapes {
            for check in identity_suite(model, *shape) {
                total += 1;
                if !check.holds {
                    failed += 1;
                }
                println!(
                    "{model_name:<20} {shape_name:<10} {:<40} {}",
                    check.name,
                    if check.holds { "pass" } else { "FAIL" }
                );
            }
            let cluster = model.cluster(*shape);
            let ok = adjacent_bond_cross_terms_vanish(model, &cluster)?;
            total += 1;
            if !ok {
                failed += 1;
            }
            println!(
                "{model_name:<20} {shape_name:<10} {:<40} {}",
                "adjacent_bond_cross_terms_vanish",
                if ok { "pass" } else { "FAIL" }
            );
        }
    }
    println!("{total} checks, {failed} failed");

    if failed == 0 {
        Ok(())
    } else {
        Err(RunError::Check(format!("{failed} identity checks failed")))
    }
}
