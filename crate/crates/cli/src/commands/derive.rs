//! `derive`: effective interaction tables on the small clusters, with
//! an exact comparison against the closed-form reference coefficients.

use crate::commands::one_band_model;
use crate::config::{parse_bindings, parse_rat, RunConfig};
use crate::output::{table_rows, write_json, write_text, CoefficientRow};
use crate::RunError;
use clap::Args;
use num::BigRational;
use sceff_core::extract::{
    bond_exchange_fourth_order, bond_exchange_second_order, copper_exchange,
    copper_exchange_reference, falicov_kimball_classical_reference, one_band_effective_terms,
    plaquette_fourth_order, regroup_classical, triple_fourth_order, OneBandTerms, SpinPolynomial,
};
use sceff_core::models::Model;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// one-band-symmetric, one-band-general, falicov-kimball or
    /// three-band.
    #[arg(long)]
    model: Option<String>,
    /// Conjugation depth: 1 or 2 generator steps.
    #[arg(long)]
    order: Option<u32>,
    /// Exact parameter binding `name=p/q` for the float columns;
    /// repeat per parameter.
    #[arg(short = 'p', long = "param", value_name = "NAME=P/Q")]
    param: Vec<String>,
    /// Output directory (default `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct Tables {
    onsite: Vec<CoefficientRow>,
    bond: Vec<CoefficientRow>,
    triple: Vec<CoefficientRow>,
    triple_bent: Vec<CoefficientRow>,
    plaquette: Vec<CoefficientRow>,
}

#[derive(Serialize)]
struct MatchFlags {
    bond: bool,
    triple: bool,
    triple_bent: bool,
    plaquette: bool,
}

impl MatchFlags {
    fn all(&self) -> bool {
        self.bond && self.triple && self.triple_bent && self.plaquette
    }
}

#[derive(Serialize)]
struct ClassicalReport {
    constant: String,
    field: String,
    nn: String,
    dist2: String,
    diag: String,
    ring: String,
    matches_reference: bool,
}

#[derive(Serialize)]
struct OneBandReport {
    model: String,
    order: u32,
    max_degree: u32,
    params: BTreeMap<String, String>,
    tables: Tables,
    reference_match: MatchFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical: Option<ClassicalReport>,
    verdict: String,
}

#[derive(Serialize)]
struct ExchangeReport {
    model: String,
    order: u32,
    max_degree: u32,
    params: BTreeMap<String, String>,
    exchange: CoefficientRow,
    reference_expr: String,
    constant_deg2: CoefficientRow,
    constant_deg4: CoefficientRow,
    table: Vec<CoefficientRow>,
    matches_reference: bool,
    verdict: String,
}

pub fn run(args: &DeriveArgs) -> Result<(), RunError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let overrides = parse_bindings(&args.param)?;
    let model_name = args
        .model
        .clone()
        .or_else(|| cfg.model.clone())
        .ok_or_else(|| RunError::Config("derive needs --model".into()))?;
    let order = args.order.or(cfg.order).unwrap_or(2);
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    if model_name == "three-band" {
        return three_band(order, &cfg, &overrides, &out_dir);
    }
    let Some(model) = one_band_model(&model_name) else {
        return Err(RunError::Config(format!("unknown model {model_name:?}")));
    };
    one_band(&model, &model_name, order, &cfg, &overrides, &out_dir)
}

/// The model's symbol values when every symbol is bound, else `None`.
fn full_binding(
    model: &Model,
    cfg: &RunConfig,
    overrides: &BTreeMap<String, String>,
) -> Result<Option<Vec<BigRational>>, RunError> {
    let sym = model.symbols();
    let mut vals = Vec::with_capacity(sym.len());
    for i in 0..sym.len() {
        match cfg.param(overrides, sym.name(i)) {
            Some(s) => vals.push(parse_rat(sym.name(i), &s)?),
            None => return Ok(None),
        }
    }
    Ok(Some(vals))
}

fn echo_params(
    model: &Model,
    cfg: &RunConfig,
    overrides: &BTreeMap<String, String>,
) -> BTreeMap<String, String> {
    let sym = model.symbols();
    let mut map = BTreeMap::new();
    for i in 0..sym.len() {
        if let Some(s) = cfg.param(overrides, sym.name(i)) {
            map.insert(sym.name(i).to_string(), s);
        }
    }
    map
}

fn one_band(
    model: &Model,
    model_name: &str,
    order: u32,
    cfg: &RunConfig,
    overrides: &BTreeMap<String, String>,
    out_dir: &PathBuf,
) -> Result<(), RunError> {
    if order != 1 && order != 2 {
        return Err(RunError::Config(format!(
            "derive covers orders 1 and 2, got {order}"
        )));
    }
    let max_degree = 2 * order;
    let values = full_binding(model, cfg, overrides)?;
    let terms = one_band_effective_terms(model, order, max_degree)?;

    let zero = SpinPolynomial::zero(model.symbols());
    let bond_ref = if order == 2 {
        bond_exchange_second_order(model).add(&bond_exchange_fourth_order(model))
    } else {
        bond_exchange_second_order(model)
    };
    let triple_ref = if order == 2 {
        triple_fourth_order(model)
    } else {
        zero.clone()
    };
    let plaquette_ref = if order == 2 {
        plaquette_fourth_order(model)
    } else {
        zero
    };
    // The bent triple lives on the same two-bond path graph as the
    // straight one, so it must reproduce the same table.
    let flags = MatchFlags {
        bond: terms.bond.is_same(&bond_ref),
        triple: terms.triple.is_same(&triple_ref),
        triple_bent: terms.triple_bent.is_same(&triple_ref),
        plaquette: terms.plaquette.is_same(&plaquette_ref),
    };

    let classical = if model_name == "falicov-kimball" && order == 2 {
        let got = regroup_classical(&terms);
        let want = falicov_kimball_classical_reference(model);
        // The printed pair-class set carries no global constant; the
        // comparison covers the field and the four pair coefficients.
        let ok = got.field.eq_value(&want.field)
            && got.nn.eq_value(&want.nn)
            && got.dist2.eq_value(&want.dist2)
            && got.diag.eq_value(&want.diag)
            && got.ring.eq_value(&want.ring);
        Some(ClassicalReport {
            constant: got.constant.to_string(),
            field: got.field.to_string(),
            nn: got.nn.to_string(),
            dist2: got.dist2.to_string(),
            diag: got.diag.to_string(),
            ring: got.ring.to_string(),
            matches_reference: ok,
        })
    } else {
        None
    };

    let all_match = flags.all() && classical.as_ref().map_or(true, |c| c.matches_reference);
    let verdict = if all_match { "match" } else { "mismatch" };

    let vals = values.as_deref();
    let report = OneBandReport {
        model: model_name.to_string(),
        order,
        max_degree,
        params: echo_params(model, cfg, overrides),
        tables: Tables {
            onsite: table_rows(&terms.onsite, vals)?,
            bond: table_rows(&terms.bond, vals)?,
            triple: table_rows(&terms.triple, vals)?,
            triple_bent: table_rows(&terms.triple_bent, vals)?,
            plaquette: table_rows(&terms.plaquette, vals)?,
        },
        reference_match: flags,
        classical,
        verdict: verdict.to_string(),
    };

    write_json(&out_dir.join("derive.json"), &report)?;
    write_text(&out_dir.join("derive.txt"), &one_band_text(&report, &terms))?;

    println!("model {model_name}, order {order} (table degree {max_degree})");
    println!(
        "reference match: bond {}, triple {}, bent {}, plaquette {}",
        yes_no(report.reference_match.bond),
        yes_no(report.reference_match.triple),
        yes_no(report.reference_match.triple_bent),
        yes_no(report.reference_match.plaquette),
    );
    if let Some(c) = &report.classical {
        println!(
            "classical regrouping: {}",
            if c.matches_reference {
                "matches the printed coefficients"
            } else {
                "DIFFERS from the printed coefficients"
            }
        );
    }
    println!("verdict: {verdict}");

    if all_match {
        Ok(())
    } else {
        Err(RunError::Check(format!(
            "derived {model_name} tables differ from the references"
        )))
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn one_band_text(report: &OneBandReport, terms: &OneBandTerms) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", report.model);
    let _ = writeln!(
        s,
        "order: {} (table degree {})",
        report.order, report.max_degree
    );
    for (name, table) in [
        ("onsite", &terms.onsite),
        ("bond", &terms.bond),
        ("triple", &terms.triple),
        ("triple (bent)", &terms.triple_bent),
        ("plaquette", &terms.plaquette),
    ] {
        let _ = writeln!(s, "\n{name}:");
        for line in table.to_string().lines() {
            let _ = writeln!(s, "  {line}");
        }
    }
    let _ = writeln!(s, "\nverdict: {}", report.verdict);
    s
}

fn three_band(
    order: u32,
    cfg: &RunConfig,
    overrides: &BTreeMap<String, String>,
    out_dir: &PathBuf,
) -> Result<(), RunError> {
    if order != 2 {
        return Err(RunError::Config(
            "the copper exchange is a depth-2 derivation; use --order 2".into(),
        ));
    }
    let model = Model::three_band();
    let values = full_binding(&model, cfg, overrides)?;
    let vals = values.as_deref();

    let ce = copper_exchange(order)?;
    let reference = copper_exchange_reference(&model);
    let ok = ce.exchange.eq_value(&reference);

    let row = |expr: &sceff_core::scalar::ScalarValue| -> Result<CoefficientRow, RunError> {
        Ok(CoefficientRow {
            monomial: "1".into(),
            expr: expr.to_string(),
            value: match vals {
                Some(v) => Some(expr.to_f64(v)?),
                None => None,
            },
        })
    };
    let mut exchange_row = row(&ce.exchange)?;
    exchange_row.monomial = "S[0] . S[1]".into();

    let report = ExchangeReport {
        model: "three-band".into(),
        order,
        max_degree: 2 * order,
        params: echo_params(&model, cfg, overrides),
        exchange: exchange_row,
        reference_expr: reference.to_string(),
        constant_deg2: row(&ce.constant_deg2)?,
        constant_deg4: row(&ce.constant_deg4)?,
        table: table_rows(&ce.table, vals)?,
        matches_reference: ok,
        verdict: if ok { "match" } else { "mismatch" }.into(),
    };

    write_json(&out_dir.join("derive.json"), &report)?;
    let mut txt = String::new();
    let _ = writeln!(txt, "model: three-band");
    let _ = writeln!(txt, "order: {} (table degree {})", order, 2 * order);
    let _ = writeln!(txt, "\ncopper-copper exchange:");
    let _ = writeln!(txt, "  {}", report.exchange.expr);
    if let Some(v) = report.exchange.value {
        let _ = writeln!(txt, "  = {v}");
    }
    let _ = writeln!(txt, "\nfull table:");
    for line in ce.table.to_string().lines() {
        let _ = writeln!(txt, "  {line}");
    }
    let _ = writeln!(txt, "\nverdict: {}", report.verdict);
    write_text(&out_dir.join("derive.txt"), &txt)?;

    println!("model three-band, order {order} (table degree {})", 2 * order);
    println!("exchange: {}", report.exchange.expr);
    if let Some(v) = report.exchange.value {
        println!("exchange value: {v}");
    }
    println!("verdict: {}", report.verdict);

    if ok {
        Ok(())
    } else {
        Err(RunError::Check(
            "derived copper exchange differs from the closed form".into(),
        ))
    }
}
