//! `scan-phase`: enumerate periodic ground states of the diagonal
//! interaction table and cut the zero-temperature phase diagram in the
//! field, emitting a CSV of intervals and plot-ready energy lines.

use crate::config::{parse_cells, parse_rat, RunConfig};
use crate::output::write_text;
use crate::RunError;
use clap::Args;
use num::BigRational;
use sceff_core::models::Model;
use sceff_core::phase::{ground_state_envelope, model_table, order_zero_envelope};
use sceff_core::scalar::{format_rational, rational_to_f64};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Table degree in the hopping: 0 (bare occupation lines), 2 or 4.
    #[arg(long)]
    order: Option<u32>,
    /// Mobile-species hopping, exact (orders 2 and 4).
    #[arg(long)]
    t: Option<String>,
    /// On-site repulsion, exact.
    #[arg(long = "U", alias = "u")]
    u: Option<String>,
    /// On-site offset, order 0 only.
    #[arg(long)]
    k: Option<String>,
    /// Periodic cell bound `WxH` (default 4x4).
    #[arg(long)]
    cells: Option<String>,
    /// Lower end of the field window, exact.
    #[arg(long)]
    h_min: Option<String>,
    /// Upper end of the field window, exact.
    #[arg(long)]
    h_max: Option<String>,
    /// Samples per plotted energy line (default 101).
    #[arg(long)]
    grid_points: Option<usize>,
    /// Output directory (default `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn run(args: &ScanArgs) -> Result<(), RunError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let order = args.order.or(cfg.order).unwrap_or(2);
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let grid_points = args.grid_points.or(cfg.grid_points).unwrap_or(101);
    if grid_points < 2 {
        return Err(RunError::Config("grid needs at least two points".into()));
    }

    let window = match (&args.h_min, &args.h_max) {
        (Some(lo), Some(hi)) => Some((parse_rat("h_min", lo)?, parse_rat("h_max", hi)?)),
        (None, None) => match &cfg.window {
            Some([lo, hi]) => Some((parse_rat("window[0]", lo)?, parse_rat("window[1]", hi)?)),
            None => None,
        },
        _ => {
            return Err(RunError::Config(
                "a field window needs both --h-min and --h-max".into(),
            ))
        }
    };
    if let Some((lo, hi)) = &window {
        if lo >= hi {
            return Err(RunError::Config("empty field window".into()));
        }
    }

    let pick = |flag: &Option<String>, key: &str| -> Result<Option<BigRational>, RunError> {
        match flag.clone().or_else(|| cfg.params.get(key).cloned()) {
            Some(s) => Ok(Some(parse_rat(key, &s)?)),
            None => Ok(None),
        }
    };
    let need = |v: Option<BigRational>, what: &str| -> Result<BigRational, RunError> {
        v.ok_or_else(|| RunError::Config(format!("scan-phase order {order} needs {what}")))
    };

    let mut head = String::new();
    let diagram = match order {
        0 => {
            let u = need(pick(&args.u, "U")?, "--u")?;
            let k = pick(&args.k, "k")?.unwrap_or_else(|| BigRational::from_integer(0.into()));
            let _ = writeln!(
                head,
                "occupation lines at U = {}, k = {}",
                format_rational(&u),
                format_rational(&k)
            );
            order_zero_envelope(&u, &k)
        }
        2 | 4 => {
            let t = need(pick(&args.t, "t")?, "--t")?;
            let u = need(pick(&args.u, "U")?, "--u")?;
            let cells = args
                .cells
                .clone()
                .or_else(|| cfg.cells.clone())
                .unwrap_or_else(|| "4x4".to_string());
            let (w, h) = parse_cells(&cells)?;
            let zero = BigRational::from_integer(0.into());
            let tab = model_table(
                &Model::falicov_kimball(),
                order,
                &[t.clone(), u.clone(), zero.clone(), zero],
            )?;
            let _ = writeln!(
                head,
                "table degree {order} at t = {}, U = {}, cells up to {w}x{h}",
                format_rational(&t),
                format_rational(&u)
            );
            let _ = writeln!(
                head,
                "  nn = {}, dist2 = {}, diag = {}, ring = {}",
                format_rational(&tab.nn),
                format_rational(&tab.dist2),
                format_rational(&tab.diag),
                format_rational(&tab.ring)
            );
            ground_state_envelope(&tab, w, h)?
        }
        other => {
            return Err(RunError::Config(format!(
                "scan-phase covers table degrees 0, 2 and 4, got {other}"
            )))
        }
    };

    let full_crossings = diagram.crossings();
    let diagram = match &window {
        Some((lo, hi)) => diagram.clip(lo, hi),
        None => diagram,
    };
    let crossings = diagram.crossings();

    // Plot window: the user's, or the crossing span padded by half.
    let (plot_lo, plot_hi) = match &window {
        Some((lo, hi)) => (lo.clone(), hi.clone()),
        None => {
            let one = BigRational::from_integer(1.into());
            match (full_crossings.first(), full_crossings.last()) {
                (Some(first), Some(last)) if last > first => {
                    let pad = (last - first) / BigRational::from_integer(2.into());
                    (first - &pad, last + &pad)
                }
                (Some(first), Some(last)) => (first - &one, last + &one),
                _ => (-one.clone(), one),
            }
        }
    };

    let mixed = diagram
        .intervals
        .iter()
        .any(|iv| iv.label.starts_with("mixed("));

    let mut csv = String::from("h_lo,h_hi,winner,cell,magnetization\n");
    for iv in &diagram.intervals {
        let lo = iv
            .lower
            .as_ref()
            .map_or_else(|| "-inf".to_string(), format_rational);
        let hi = iv
            .upper
            .as_ref()
            .map_or_else(|| "+inf".to_string(), format_rational);
        let cell = iv
            .winner
            .as_ref()
            .map_or_else(|| "-".to_string(), |c| format!("{}x{}", c.width(), c.height()));
        let _ = writeln!(
            csv,
            "{lo},{hi},{},{cell},{}",
            iv.label,
            format_rational(&iv.magnetization)
        );
    }
    write_text(&out_dir.join("phases.csv"), &csv)?;

    let mut plot = String::new();
    let _ = writeln!(plot, "# field energy-density, one block per envelope line");
    let _ = writeln!(
        plot,
        "# window {} .. {}, {grid_points} points",
        format_rational(&plot_lo),
        format_rational(&plot_hi)
    );
    if mixed {
        let _ = writeln!(
            plot,
            "# note: the envelope contains mixed-period winners; phases whose cell \
             exceeds the enumeration bound are not representable and boundaries \
             adjacent to them may be displaced"
        );
    }
    let step = (&plot_hi - &plot_lo) / BigRational::from_integer(((grid_points - 1) as i64).into());
    for iv in &diagram.intervals {
        let _ = writeln!(
            plot,
            "\n# {}  m = {}",
            iv.label,
            format_rational(&iv.magnetization)
        );
        for i in 0..grid_points {
            let h = &plot_lo + &step * BigRational::from_integer((i as i64).into());
            let e = &iv.intercept - &h * &iv.magnetization;
            let _ = writeln!(plot, "{} {}", rational_to_f64(&h), rational_to_f64(&e));
        }
    }
    write_text(&out_dir.join("plot.dat"), &plot)?;

    print!("{head}");
    if crossings.is_empty() {
        println!("crossings: none");
    } else {
        let list: Vec<String> = crossings.iter().map(format_rational).collect();
        println!("crossings: {}", list.join(", "));
    }
    println!("intervals:");
    for iv in &diagram.intervals {
        let lo = iv
            .lower
            .as_ref()
            .map_or_else(|| "-inf".to_string(), format_rational);
        let hi = iv
            .upper
            .as_ref()
            .map_or_else(|| "+inf".to_string(), format_rational);
        println!(
            "  {lo} .. {hi}  {}  m = {}",
            iv.label,
            format_rational(&iv.magnetization)
        );
    }
    if mixed {
        println!(
            "note: mixed-period winners present; phases with cells beyond the \
             enumeration bound are not representable and adjacent boundaries may \
             be displaced"
        );
    }
    Ok(())
}
