//! Acceptance gate: one test per shipped guarantee, each pinned to
//! exact expected values or explicit tolerances.  Everything a release
//! must honor lives here; run with `--nocapture` for the full reports.

use num::BigRational;
use sceff_core::engine::{adjacent_bond_cross_terms_vanish, derive};
use sceff_core::extract::{
    bond_exchange_fourth_order, bond_exchange_second_order, copper_exchange,
    copper_exchange_reference, falicov_kimball_bond_table, falicov_kimball_classical_reference,
    falicov_kimball_plaquette_constant_shift, falicov_kimball_plaquette_table,
    falicov_kimball_triple_table, one_band_effective_terms, plaquette_fourth_first_step,
    plaquette_fourth_order, plaquette_fourth_second_step, regroup_classical, symmetric_bond_table,
    symmetric_plaquette_table, symmetric_triple_table, triple_fourth_first_step,
    triple_fourth_order, triple_fourth_second_step, SpinMonomial, SpinPolynomial,
};
use sceff_core::lattice::Shape;
use sceff_core::models::{identity_suite, Model};
use sceff_core::phase::{
    energy_line, ground_state_envelope, model_table, single_flip_cost, PeriodicConfig,
};
use sceff_core::scalar::{big_rational, parse_rational, Poly, ScalarValue};
use sceff_core::validate::{scaling_study, unitarity_witness};
use std::path::Path;
use std::time::{Duration, Instant};

fn q(p: i64, d: i64) -> BigRational {
    big_rational(p, d)
}

fn over(num: Poly, den: &Poly) -> ScalarValue {
    ScalarValue::from_poly(num).div_classical(den).unwrap()
}

fn zz(sites: &[usize]) -> SpinMonomial {
    SpinMonomial::new(vec![], vec![], sites.to_vec())
}

/// Runs the command line in-process; `args` omit the program name.
fn cli(args: &[&str]) -> Result<(), sceff_cli::RunError> {
    let mut argv = vec!["sceff"];
    argv.extend_from_slice(args);
    sceff_cli::run(argv)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Interior interval boundaries of a phases.csv, in order.
fn csv_crossings(path: &Path) -> Vec<BigRational> {
    let mut out = Vec::new();
    for line in read(path).lines().skip(1) {
        let lo = line.split(',').next().unwrap();
        if lo != "-inf" {
            out.push(parse_rational(lo).unwrap());
        }
    }
    out
}

#[test]
fn criterion_01_symmetric_quartic_tables() {
    let start = Instant::now();
    let model = Model::one_band_symmetric();
    let sym = model.symbols();
    let terms = one_band_effective_terms(&model, 2, 4).unwrap();

    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let u3 = u.pow(3);

    // Exchange strength 4t^2/U - 16t^4/U^3 on the bond.
    let heisenberg = over(t.pow(2).scale(&q(4, 1)), &u)
        .add(&over(t.pow(4).scale(&q(-16, 1)), &u3));
    assert!(terms
        .bond
        .coefficient(&zz(&[0, 1]))
        .eq_value(&heisenberg));
    assert!(terms.bond.is_same(&symmetric_bond_table(&model)));

    // Distance-2 coupling +4t^4/U^3 through the middle site.
    let three_site = over(t.pow(4).scale(&q(4, 1)), &u3);
    assert!(terms
        .triple
        .coefficient(&zz(&[0, 2]))
        .eq_value(&three_site));
    assert!(terms.triple.is_same(&symmetric_triple_table(&model)));
    assert!(terms.triple_bent.is_same(&symmetric_triple_table(&model)));

    // Square term: -4t^4/U^3 on every pair, +80t^4/U^3 on the four-spin
    // ring combination.
    let pairwise = over(t.pow(4).scale(&q(-4, 1)), &u3);
    assert!(terms
        .plaquette
        .coefficient(&zz(&[0, 1]))
        .eq_value(&pairwise));
    assert!(terms
        .plaquette
        .coefficient(&zz(&[0, 2]))
        .eq_value(&pairwise));
    let ring = over(t.pow(4).scale(&q(80, 1)), &u3);
    assert!(terms
        .plaquette
        .coefficient(&zz(&[0, 1, 2, 3]))
        .eq_value(&ring));
    assert!(terms.plaquette.is_same(&symmetric_plaquette_table(&model)));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("derive");
    cli(&[
        "derive",
        "--model",
        "one-band-symmetric",
        "--order",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&read(&out.join("derive.json"))).unwrap();
    assert_eq!(report["verdict"], "match");

    assert!(start.elapsed() < Duration::from_secs(30), "over budget");
}

#[test]
fn criterion_02_frozen_species_tables_and_regrouping() {
    let start = Instant::now();
    let model = Model::falicov_kimball();
    let sym = model.symbols();
    let terms = one_band_effective_terms(&model, 2, 4).unwrap();

    assert!(terms.bond.is_same(&falicov_kimball_bond_table(&model)));
    assert!(terms.triple.is_same(&falicov_kimball_triple_table(&model)));

    // The printed square table sits a pure constant +t^4/(2U^3) away
    // from the derived one; the offset is pinned exactly.
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let u3 = u.pow(3);
    let shift = falicov_kimball_plaquette_constant_shift(&model);
    assert!(shift.eq_value(&over(t.pow(4).scale(&q(1, 2)), &u3)));
    let printed = falicov_kimball_plaquette_table(&model)
        .add(&SpinPolynomial::term(SpinMonomial::identity(), shift));
    assert!(terms.plaquette.is_same(&printed));

    // Projector-free regrouping into per-pair-class coefficients.
    let got = regroup_classical(&terms);
    let want = falicov_kimball_classical_reference(&model);
    assert!(got.field.eq_value(&want.field));
    assert!(got.nn.eq_value(&want.nn));
    assert!(got.dist2.eq_value(&want.dist2));
    assert!(got.diag.eq_value(&want.diag));
    assert!(got.ring.eq_value(&want.ring));
    let nn = over(t.pow(2).scale(&q(2, 1)), &u).add(&over(t.pow(4).scale(&q(-18, 1)), &u3));
    assert!(got.nn.eq_value(&nn));
    assert!(got.dist2.eq_value(&over(t.pow(4).scale(&q(4, 1)), &u3)));
    assert!(got.diag.eq_value(&over(t.pow(4).scale(&q(6, 1)), &u3)));
    assert!(got.ring.eq_value(&over(t.pow(4).scale(&q(40, 1)), &u3)));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("derive");
    cli(&[
        "derive",
        "--model",
        "falicov-kimball",
        "--order",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&read(&out.join("derive.json"))).unwrap();
    assert_eq!(report["verdict"], "match");
    assert_eq!(report["classical"]["matches_reference"], true);

    assert!(start.elapsed() < Duration::from_secs(30), "over budget");
}

#[test]
fn criterion_03_general_amplitudes_step_resolved_tables() {
    let model = Model::one_band_general();
    let zero = SpinPolynomial::zero(model.symbols());

    // Depth 1 at table degree 2: the bare exchange, nothing longer.
    let first = one_band_effective_terms(&model, 1, 2).unwrap();
    assert!(first.bond.is_same(&bond_exchange_second_order(&model)));
    assert!(first.triple.is_same(&zero));
    assert!(first.triple_bent.is_same(&zero));
    assert!(first.plaquette.is_same(&zero));

    // Depth 2 at degree 4, term by term against the reference tables.
    let full = one_band_effective_terms(&model, 2, 4).unwrap();
    let bond_ref =
        bond_exchange_second_order(&model).add(&bond_exchange_fourth_order(&model));
    assert!(full.bond.is_same(&bond_ref));
    assert!(full.triple.is_same(&triple_fourth_order(&model)));
    assert!(full.triple_bent.is_same(&triple_fourth_order(&model)));
    assert!(full.plaquette.is_same(&plaquette_fourth_order(&model)));

    // Step resolution: carrying only the first generator to degree 4
    // isolates the first-step quartic pieces; the depth-2 increment is
    // the second step.
    let step1 = one_band_effective_terms(&model, 1, 4).unwrap();
    assert!(step1.triple.is_same(&triple_fourth_first_step(&model)));
    assert!(full
        .triple
        .sub(&step1.triple)
        .is_same(&triple_fourth_second_step(&model)));
    assert!(step1
        .plaquette
        .is_same(&plaquette_fourth_first_step(&model)));
    assert!(full
        .plaquette
        .sub(&step1.plaquette)
        .is_same(&plaquette_fourth_second_step(&model)));
}

#[test]
fn criterion_04_copper_exchange_closed_form_and_value() {
    let start = Instant::now();
    let model = Model::three_band();
    let ce = copper_exchange(2).unwrap();
    let reference = copper_exchange_reference(&model);
    assert!(
        ce.exchange.eq_value(&reference),
        "exchange differs from the closed form"
    );

    // t_pd = 13/10, U_d = 21/2, U_p = 4, U_pd = 6/5, e_d = 0, e_p = 18/5.
    let values = [q(13, 10), q(21, 2), q(4, 1), q(6, 5), q(0, 1), q(18, 5)];
    let got = ce.exchange.to_f64(&values).unwrap();
    let (t, ud, up, upd, ed, ep) = (1.3f64, 10.5, 4.0, 1.2, 0.0, 3.6);
    let gap = upd + (ep - ed);
    let want = 4.0 * t.powi(4) / (gap * gap) * (1.0 / ud + 2.0 / (2.0 * (ep - ed) + up));
    assert!(
        (got - want).abs() <= 1e-12 * want.abs(),
        "exchange value {got} differs from {want}"
    );

    assert!(start.elapsed() < Duration::from_secs(120), "over budget");
}

#[test]
fn criterion_05_residual_grading_bound() {
    let model = Model::one_band_general();
    for order in [1u32, 2] {
        for shape in [Shape::Bond, Shape::Chain3, Shape::Plaquette] {
            let cluster = model.cluster(shape);
            let d = derive(&model, &cluster, order, 2 * order).unwrap();
            let report = d.grading_report();
            assert_eq!(report.required, order + 1);
            assert!(
                report.ok,
                "depth-{order} residual on {shape:?} keeps degree {:?}",
                report.min_residual_degree
            );
            if let Some(min) = report.min_residual_degree {
                assert!(min >= order + 1);
            }
        }
    }
}

#[test]
fn criterion_06_band_error_scaling_slope() {
    let start = Instant::now();
    let model = Model::one_band_symmetric();
    let hoppings: Vec<BigRational> = ["2/5", "1/5", "1/10", "1/20", "1/40"]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect();
    let u = q(8, 1);
    let study = scaling_study(&model, Shape::Bond, 2, &hoppings, |t| {
        vec![t.clone(), u.clone(), q(0, 1), q(0, 1)]
    })
    .unwrap();

    // The two-site ground energy is (U - sqrt(U^2 + 16 t^2))/2; the
    // depth-2 table must approach it with log-log slope at least 5.7.
    // The eigensolve error is absolute at machine scale (||H|| ~ U), so
    // the closed-form agreement is pinned absolutely, not relatively.
    for p in &study.points {
        let exact = (8.0 - (64.0 + 16.0 * p.hopping * p.hopping).sqrt()) / 2.0;
        assert!(
            (p.exact_energy - exact).abs() <= 1e-13,
            "diagonalized energy drifts from the closed form at t = {}",
            p.hopping
        );
    }
    assert!(
        study.slope >= 5.7,
        "band-error slope {:.3} below 5.7",
        study.slope
    );

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ed");
    cli(&["validate-ed", "--out-dir", out.to_str().unwrap()]).unwrap();

    assert!(start.elapsed() < Duration::from_secs(10), "over budget");
}

#[test]
fn criterion_07_quadratic_crossings_and_cell_stability() {
    for (t, u) in [("1/10", "7"), ("1/3", "5"), ("2/7", "9")] {
        let dir = tempfile::tempdir().unwrap();
        let big = dir.path().join("c44");
        let small = dir.path().join("c42");
        for (cells, out) in [("4x4", &big), ("4x2", &small)] {
            cli(&[
                "scan-phase",
                "--order",
                "2",
                "--t",
                t,
                "--u",
                u,
                "--cells",
                cells,
                "--out-dir",
                out.to_str().unwrap(),
            ])
            .unwrap();
        }
        // Growing the enumeration cell changes nothing, byte for byte.
        assert_eq!(
            read(&big.join("phases.csv")),
            read(&small.join("phases.csv"))
        );
        assert_eq!(read(&big.join("plot.dat")), read(&small.join("plot.dat")));

        let tq = parse_rational(t).unwrap();
        let uq = parse_rational(u).unwrap();
        let h_star = q(4, 1) * &tq * &tq / &uq;
        assert_eq!(
            csv_crossings(&big.join("phases.csv")),
            vec![-h_star.clone(), h_star]
        );

        // Identical configurations rerun to identical bytes.
        let again = dir.path().join("again");
        cli(&[
            "scan-phase",
            "--order",
            "2",
            "--t",
            t,
            "--u",
            u,
            "--cells",
            "4x4",
            "--out-dir",
            again.to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(
            read(&big.join("phases.csv")),
            read(&again.join("phases.csv"))
        );
        assert_eq!(read(&big.join("plot.dat")), read(&again.join("plot.dat")));
    }
}

#[test]
fn criterion_08_quartic_crossings_and_period_bound_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan");
    cli(&[
        "scan-phase",
        "--order",
        "4",
        "--t",
        "1/10",
        "--u",
        "7",
        "--cells",
        "4x4",
        "--out-dir",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let crossings = csv_crossings(&out.join("phases.csv"));

    // x = t^2/U, y = t^4/U^3 at t = 1/10, U = 7.
    let x = q(1, 700);
    let y = q(1, 3430000);
    let line = |c: i64| -> BigRational { -(q(4, 1) * &x) + q(c, 1) * &y };
    let h1 = line(-4);
    let h2 = line(16);
    let h3 = line(48);
    let h4 = line(84);
    let substitute = line(8);

    for h in [&h1, &h3, &h4] {
        assert!(crossings.contains(h), "missing crossing {h}");
        assert!(crossings.contains(&-h), "missing crossing {}", -h);
    }
    assert!(
        !crossings.contains(&h2) && !crossings.contains(&-h2.clone()),
        "the 16-site cell bound cannot realize the fifth-density phase, \
         yet its boundary appeared"
    );
    assert!(crossings.contains(&substitute));

    // The known limitation, reported explicitly rather than papered
    // over: the density-1/5 winner is a knight-move lattice with a
    // 25-site rectangular period, beyond the 16-site enumeration
    // bound, so the enumerated envelope substitutes the density-1/6
    // phase and displaces this one boundary.
    println!("boundary {h2} is not realized at the 4x4 cell bound");
    println!("enumerated substitute boundary: {substitute}");

    // Analytic recovery: the defect phase costs one flip per five
    // sites and does not interact at knight-move spacing, so its line
    // crosses the enumerated quarter-density winner exactly at the
    // missing value.
    let zero = q(0, 1);
    let tab = model_table(
        &Model::falicov_kimball(),
        4,
        &[q(1, 10), q(7, 1), zero.clone(), zero.clone()],
    )
    .unwrap();
    let envelope = ground_state_envelope(&tab, 4, 4).unwrap();
    let quarter = envelope
        .intervals
        .iter()
        .find(|iv| iv.magnetization == q(-1, 4))
        .expect("quarter-density interval");
    let minus = PeriodicConfig::new(1, 1, 0).unwrap();
    let minus_line = energy_line(&minus, &tab);
    let flip = single_flip_cost(&minus, &tab, &zero, 0, 0);
    let knight_intercept = &minus_line.intercept + flip / q(5, 1);
    let knight_m = q(-3, 10);
    let recovered =
        (&knight_intercept - &quarter.intercept) / (&knight_m - &quarter.magnetization);
    assert_eq!(recovered, h2, "defect-phase crossing must recover the boundary");
    println!("period-5 defect phase recovers it: {recovered}");

    // The scan itself must flag the bound.
    assert!(read(&out.join("phases.csv")).contains("mixed("));
    assert!(read(&out.join("plot.dat")).contains("mixed-period"));
}

#[test]
fn criterion_09_projector_identity_suite() {
    let models = [
        Model::one_band_general(),
        Model::one_band_symmetric(),
        Model::falicov_kimball(),
    ];
    for model in &models {
        for shape in [Shape::Bond, Shape::Chain3] {
            let suite = identity_suite(model, shape);
            assert_eq!(suite.len(), 9);
            for check in suite {
                assert!(check.holds, "{} fails on {shape:?}", check.name);
            }
            let cluster = model.cluster(shape);
            assert!(adjacent_bond_cross_terms_vanish(model, &cluster).unwrap());
        }
    }
    cli(&["identities"]).unwrap();
}

#[test]
fn criterion_10_spectrum_preserving_conjugation() {
    const TOL: f64 = 1e-10;
    let check = |model: &Model, shape: Shape, values: &[BigRational]| {
        let cluster = model.cluster(shape);
        let d = derive(model, &cluster, 1, 2).unwrap();
        let w = unitarity_witness(&d, values).unwrap();
        assert!(
            w.orthogonality_error <= TOL,
            "{shape:?}: orthogonality error {:.3e}",
            w.orthogonality_error
        );
        assert!(
            w.spectrum_error <= TOL,
            "{shape:?}: spectrum error {:.3e}",
            w.spectrum_error
        );
    };

    let one_band_shapes = [Shape::Bond, Shape::Chain3, Shape::Corner3, Shape::Plaquette];
    let single = [q(1, 5), q(8, 1), q(1, 10), q(1, 5)];
    for model in [Model::one_band_symmetric(), Model::falicov_kimball()] {
        for shape in one_band_shapes {
            check(&model, shape, &single);
        }
    }
    let general = Model::one_band_general();
    let asym = [q(3, 20), q(1, 5), q(8, 1), q(1, 10), q(1, 5)];
    for shape in one_band_shapes {
        check(&general, shape, &asym);
    }

    let three = Model::three_band();
    let charge_transfer = [q(13, 10), q(21, 2), q(4, 1), q(6, 5), q(0, 1), q(18, 5)];
    for shape in [Shape::Cuo2Bond, Shape::Cuo2TwoBonds] {
        check(&three, shape, &charge_transfer);
    }
}
