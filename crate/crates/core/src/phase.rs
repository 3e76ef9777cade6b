//! Zero-temperature phase diagrams of the diagonal effective
//! interaction: exact lower envelopes of per-configuration energy
//! densities over periodic Ising configurations, plus closed-form
//! stability diagnostics.
//!
//! Energy densities are linear in the field, `e(h) = a - h m`, with
//! exact rational intercept and magnetization, so the ground-state
//! diagram is the lower envelope of finitely many lines and every
//! crossing field is an exact rational.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

use crate::engine::EngineError;
use crate::extract::{one_band_effective_terms, regroup_classical, ClassicalCoefficients};
use crate::models::Model;
use crate::par;
use crate::scalar::{format_rational, ScalarError, ScalarValue};

#[derive(Debug, thiserror::Error)]
pub enum PhaseError {
    #[error("cell {0}x{1} exceeds the 16-site enumeration bound")]
    CellTooLarge(usize, usize),
    #[error("configuration bits 0x{0:x} do not fit a {1}x{2} cell")]
    BitsOutOfRange(u32, usize, usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Ising configuration on a periodic cell; bit `j * width + i` set
/// means spin up at column `i`, row `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicConfig {
    width: usize,
    height: usize,
    bits: u32,
}

impl PeriodicConfig {
    pub fn new(width: usize, height: usize, bits: u32) -> Result<PeriodicConfig, PhaseError> {
        if width == 0 || height == 0 || width * height > 16 {
            return Err(PhaseError::CellTooLarge(width, height));
        }
        if u64::from(bits) >= 1u64 << (width * height) {
            return Err(PhaseError::BitsOutOfRange(bits, width, height));
        }
        Ok(PeriodicConfig {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }

    /// Spin value +-1 at wrapped coordinates.
    pub fn spin(&self, i: i64, j: i64) -> i64 {
        let w = self.width as i64;
        let h = self.height as i64;
        let x = i.rem_euclid(w) as usize;
        let y = j.rem_euclid(h) as usize;
        if self.bits >> (y * self.width + x) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn magnetization(&self) -> BigRational {
        let mut sum = 0i64;
        for j in 0..self.height as i64 {
            for i in 0..self.width as i64 {
                sum += self.spin(i, j);
            }
        }
        BigRational::new(BigInt::from(sum), BigInt::from(2 * self.n_sites() as i64))
    }

    /// Smallest bit pattern reachable by cell translations.
    pub fn canonical(&self) -> PeriodicConfig {
        let mut best = self.bits;
        for dj in 0..self.height as i64 {
            for di in 0..self.width as i64 {
                let mut bits = 0u32;
                for j in 0..self.height as i64 {
                    for i in 0..self.width as i64 {
                        if self.spin(i + di, j + dj) == 1 {
                            bits |= 1 << (j as usize * self.width + i as usize);
                        }
                    }
                }
                best = best.min(bits);
            }
        }
        PeriodicConfig {
            width: self.width,
            height: self.height,
            bits: best,
        }
    }

    pub fn flipped(&self) -> PeriodicConfig {
        let full = ((1u64 << self.n_sites()) - 1) as u32;
        PeriodicConfig {
            width: self.width,
            height: self.height,
            bits: self.bits ^ full,
        }
    }

    pub fn label(&self) -> String {
        let n = self.n_sites() as u32;
        if self.bits.count_ones() == n {
            return "all-plus".to_string();
        }
        if self.bits == 0 {
            return "all-minus".to_string();
        }
        let checker = (0..self.height as i64).all(|j| {
            (0..self.width as i64)
                .all(|i| self.spin(i, j) == self.spin(0, 0) * (-1i64).pow(((i + j) & 1) as u32))
        });
        // A true checkerboard needs even periods in both directions.
        if checker && self.width % 2 == 0 && self.height % 2 == 0 {
            return "checkerboard".to_string();
        }
        format!(
            "mixed(m={}, {}x{})",
            format_rational(&self.magnetization()),
            self.width,
            self.height
        )
    }
}

impl fmt::Display for PeriodicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.height as i64 {
            if j > 0 {
                write!(f, "/")?;
            }
            for i in 0..self.width as i64 {
                write!(f, "{}", if self.spin(i, j) == 1 { '+' } else { '-' })?;
            }
        }
        Ok(())
    }
}

/// Diagonal interaction coefficients per pair class, evaluated to exact
/// rationals.  The field enters the energy lines as `-h m` separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTable {
    pub nn: BigRational,
    pub dist2: BigRational,
    pub diag: BigRational,
    pub ring: BigRational,
}

impl ClassicalTable {
    pub fn zero() -> ClassicalTable {
        ClassicalTable {
            nn: BigRational::zero(),
            dist2: BigRational::zero(),
            diag: BigRational::zero(),
            ring: BigRational::zero(),
        }
    }
}

/// Evaluates regrouped coefficients at explicit parameters.
pub fn table_at(
    coeffs: &ClassicalCoefficients,
    values: &[BigRational],
) -> Result<ClassicalTable, ScalarError> {
    Ok(ClassicalTable {
        nn: coeffs.nn.eval(values)?,
        dist2: coeffs.dist2.eval(values)?,
        diag: coeffs.diag.eval(values)?,
        ring: coeffs.ring.eval(values)?,
    })
}

/// Derives a model's diagonal pair-class coefficients at table degree
/// 2 or 4 and evaluates them.  `values` follows the model's symbol
/// order; the field and offset entries do not enter the coefficients.
pub fn model_table(
    model: &Model,
    degree: u32,
    values: &[BigRational],
) -> Result<ClassicalTable, PhaseError> {
    assert!(degree == 2 || degree == 4, "table degree must be 2 or 4");
    let order = if degree == 2 { 1 } else { 2 };
    let terms = one_band_effective_terms(model, order, degree)?;
    let coeffs = regroup_classical(&terms);
    let minus_h = ScalarValue::named(model.symbols(), "h").neg();
    assert!(
        coeffs.field.eq_value(&minus_h),
        "field coefficient is not the bare -h"
    );
    Ok(table_at(&coeffs, values)?)
}

/// Energy density line `e(h) = intercept - h * magnetization`.
///
/// The intercept counts the nearest-neighbor term in the
/// `S^3 S^3 - 1/4` convention and the longer-range terms bare; global
/// constants and the `k` offset are dropped, matching the usual printed
/// regrouping.
#[derive(Debug, Clone)]
pub struct EnergyLine {
    pub config: PeriodicConfig,
    pub intercept: BigRational,
    pub magnetization: BigRational,
}

impl EnergyLine {
    pub fn energy_at(&self, h: &BigRational) -> BigRational {
        &self.intercept - h * &self.magnetization
    }
}

/// Integer pair statistics of a periodic configuration, one value per
/// interaction class, summed once per cell site.
#[derive(Debug, Clone, Copy)]
struct CellStats {
    n: i64,
    m_sum: i64,
    c_nn: i64,
    c_d2: i64,
    c_diag: i64,
    c_ring: i64,
}

fn cell_stats(cfg: &PeriodicConfig) -> CellStats {
    let mut s = CellStats {
        n: cfg.n_sites() as i64,
        m_sum: 0,
        c_nn: 0,
        c_d2: 0,
        c_diag: 0,
        c_ring: 0,
    };
    for j in 0..cfg.height as i64 {
        for i in 0..cfg.width as i64 {
            let v = cfg.spin(i, j);
            s.m_sum += v;
            s.c_nn += v * (cfg.spin(i + 1, j) + cfg.spin(i, j + 1));
            s.c_d2 += v * (cfg.spin(i + 2, j) + cfg.spin(i, j + 2));
            s.c_diag += v * (cfg.spin(i + 1, j + 1) + cfg.spin(i + 1, j - 1));
            s.c_ring += v * cfg.spin(i + 1, j) * cfg.spin(i + 1, j + 1) * cfg.spin(i, j + 1);
        }
    }
    s
}

/// Normalized per-site weights multiplying (nn, dist2, diag, ring) in
/// the intercept, plus the magnetization; two configurations with equal
/// weights produce the same line for every table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct LineKey {
    m: BigRational,
    w_nn: BigRational,
    w_d2: BigRational,
    w_diag: BigRational,
    w_ring: BigRational,
}

fn line_key(stats: &CellStats) -> LineKey {
    let n = stats.n;
    LineKey {
        m: BigRational::new(BigInt::from(stats.m_sum), BigInt::from(2 * n)),
        w_nn: BigRational::new(BigInt::from(stats.c_nn - 2 * n), BigInt::from(4 * n)),
        w_d2: BigRational::new(BigInt::from(stats.c_d2), BigInt::from(4 * n)),
        w_diag: BigRational::new(BigInt::from(stats.c_diag), BigInt::from(4 * n)),
        w_ring: BigRational::new(BigInt::from(stats.c_ring), BigInt::from(16 * n)),
    }
}

fn intercept_of(key: &LineKey, tab: &ClassicalTable) -> BigRational {
    &tab.nn * &key.w_nn
        + &tab.dist2 * &key.w_d2
        + &tab.diag * &key.w_diag
        + &tab.ring * &key.w_ring
}

pub fn energy_line(cfg: &PeriodicConfig, tab: &ClassicalTable) -> EnergyLine {
    let key = line_key(&cell_stats(cfg));
    EnergyLine {
        config: cfg.clone(),
        intercept: intercept_of(&key, tab),
        magnetization: key.m,
    }
}

/// Deterministic representative order: smallest cell, then flattest
/// cell, then smallest canonical pattern.
fn prefer(a: &PeriodicConfig, b: &PeriodicConfig) -> bool {
    let ka = (a.n_sites(), a.height, a.canonical().bits);
    let kb = (b.n_sites(), b.height, b.canonical().bits);
    ka < kb
}

fn keep_better(map: &mut BTreeMap<LineKey, PeriodicConfig>, key: LineKey, cfg: PeriodicConfig) {
    match map.entry(key) {
        Entry::Occupied(mut e) => {
            if prefer(&cfg, e.get()) {
                e.insert(cfg);
            }
        }
        Entry::Vacant(e) => {
            e.insert(cfg);
        }
    }
}

/// Enumerates every periodic configuration with cell sizes up to
/// `wmax x hmax` and collapses them to distinct energy lines, keeping a
/// canonical representative per line.
pub fn enumerate_lines(
    tab: &ClassicalTable,
    wmax: usize,
    hmax: usize,
) -> Result<Vec<EnergyLine>, PhaseError> {
    if wmax == 0 || hmax == 0 || wmax * hmax > 16 {
        return Err(PhaseError::CellTooLarge(wmax, hmax));
    }
    let cells: Vec<(usize, usize)> = (1..=wmax)
        .flat_map(|w| (1..=hmax).map(move |h| (w, h)))
        .collect();
    let blocks = par::map_collect(cells, |(w, h)| {
        let mut block: BTreeMap<LineKey, PeriodicConfig> = BTreeMap::new();
        for bits in 0..(1u64 << (w * h)) {
            let cfg = PeriodicConfig {
                width: w,
                height: h,
                bits: bits as u32,
            };
            let key = line_key(&cell_stats(&cfg));
            keep_better(&mut block, key, cfg);
        }
        block
    });
    let mut merged: BTreeMap<LineKey, PeriodicConfig> = BTreeMap::new();
    for block in blocks {
        for (key, cfg) in block {
            keep_better(&mut merged, key, cfg);
        }
    }
    Ok(merged
        .into_iter()
        .map(|(key, config)| EnergyLine {
            intercept: intercept_of(&key, tab),
            magnetization: key.m,
            config,
        })
        .collect())
}

/// One interval of the ground-state diagram; `lower`/`upper` are
/// crossing fields, `None` at the unbounded ends.
#[derive(Debug, Clone)]
pub struct PhaseInterval {
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
    pub winner: Option<PeriodicConfig>,
    pub label: String,
    pub magnetization: BigRational,
    pub intercept: BigRational,
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub intervals: Vec<PhaseInterval>,
}

impl PhaseDiagram {
    pub fn crossings(&self) -> Vec<BigRational> {
        self.intervals
            .iter()
            .filter_map(|iv| iv.upper.clone())
            .collect()
    }

    /// Winning interval at a given field; boundary fields resolve to
    /// the interval on their lower side.
    pub fn winner_at(&self, h: &BigRational) -> &PhaseInterval {
        for iv in &self.intervals {
            let above = iv.lower.as_ref().map_or(true, |lo| h > lo);
            let below = iv.upper.as_ref().map_or(true, |hi| h <= hi);
            if above && below {
                return iv;
            }
        }
        self.intervals.last().expect("diagram has no intervals")
    }

    /// Restricts the diagram to a field window.
    pub fn clip(&self, lo: &BigRational, hi: &BigRational) -> PhaseDiagram {
        assert!(lo < hi, "empty field window");
        let mut intervals = Vec::new();
        for iv in &self.intervals {
            let a = iv.lower.clone().map_or(lo.clone(), |v| v.max(lo.clone()));
            let b = iv.upper.clone().map_or(hi.clone(), |v| v.min(hi.clone()));
            if a < b {
                let mut cut = iv.clone();
                cut.lower = Some(a);
                cut.upper = Some(b);
                intervals.push(cut);
            }
        }
        PhaseDiagram { intervals }
    }
}

/// Lower envelope of energy lines; intervals ordered by increasing
/// field, winners with strictly increasing magnetization.
pub fn lower_envelope(lines: &[EnergyLine]) -> PhaseDiagram {
    assert!(!lines.is_empty(), "no energy lines to compare");
    // Keep the lowest line per magnetization.
    let mut best: BTreeMap<BigRational, &EnergyLine> = BTreeMap::new();
    for line in lines {
        match best.entry(line.magnetization.clone()) {
            Entry::Occupied(mut e) => {
                let cur = *e.get();
                let better = line.intercept < cur.intercept
                    || (line.intercept == cur.intercept && prefer(&line.config, &cur.config));
                if better {
                    e.insert(line);
                }
            }
            Entry::Vacant(e) => {
                e.insert(line);
            }
        }
    }
    // At h -> -inf the smallest magnetization wins; scan upward in m,
    // popping lines whose winning interval closes before it opens.
    let ordered: Vec<&EnergyLine> = best.values().copied().collect();
    let mut hull: Vec<(&EnergyLine, Option<BigRational>)> = Vec::new();
    for line in ordered {
        loop {
            match hull.last() {
                None => {
                    hull.push((line, None));
                    break;
                }
                Some((top, start)) => {
                    let cross = (&line.intercept - &top.intercept)
                        / (&line.magnetization - &top.magnetization);
                    let dominated = matches!(start, Some(s) if cross <= *s);
                    if dominated {
                        hull.pop();
                    } else {
                        hull.push((line, Some(cross)));
                        break;
                    }
                }
            }
        }
    }
    let mut intervals = Vec::with_capacity(hull.len());
    for (idx, (line, start)) in hull.iter().enumerate() {
        let upper = hull.get(idx + 1).and_then(|(_, s)| s.clone());
        intervals.push(PhaseInterval {
            lower: start.clone(),
            upper,
            winner: Some(line.config.clone()),
            label: line.config.label(),
            magnetization: line.magnetization.clone(),
            intercept: line.intercept.clone(),
        });
    }
    PhaseDiagram { intervals }
}

/// Enumerates configurations and takes the envelope in one call.
pub fn ground_state_envelope(
    tab: &ClassicalTable,
    wmax: usize,
    hmax: usize,
) -> Result<PhaseDiagram, PhaseError> {
    Ok(lower_envelope(&enumerate_lines(tab, wmax, hmax)?))
}

/// Occupation-level diagram with only the classical on-site energies:
/// per site the choices are empty, single up, single down, or double,
/// with energies 0, -(h + k)/2, (h - k)/2 and U - k.
pub fn order_zero_envelope(u: &BigRational, k: &BigRational) -> PhaseDiagram {
    let half = ratio(1, 2);
    // (label, intercept, magnetization) with e(h) = a - h m.
    let lines = [
        ("empty", BigRational::zero(), BigRational::zero()),
        ("single-up", -(k * &half), half.clone()),
        ("single-down", -(k * &half), -half.clone()),
        ("double", u - k, BigRational::zero()),
    ];
    let mut best: BTreeMap<BigRational, (BigRational, &str)> = BTreeMap::new();
    for (label, a, m) in &lines {
        match best.entry(m.clone()) {
            Entry::Occupied(mut e) => {
                if *a < e.get().0 {
                    e.insert((a.clone(), label));
                }
            }
            Entry::Vacant(e) => {
                e.insert((a.clone(), label));
            }
        }
    }
    let mut hull: Vec<(BigRational, BigRational, &str, Option<BigRational>)> = Vec::new();
    for (m, (a, label)) in best {
        loop {
            match hull.last() {
                None => {
                    hull.push((m.clone(), a.clone(), label, None));
                    break;
                }
                Some((tm, ta, _, start)) => {
                    let cross = (&a - ta) / (&m - tm);
                    let dominated = matches!(start, Some(s) if cross <= *s);
                    if dominated {
                        hull.pop();
                    } else {
                        hull.push((m.clone(), a.clone(), label, Some(cross)));
                        break;
                    }
                }
            }
        }
    }
    let mut intervals = Vec::with_capacity(hull.len());
    for (idx, (m, a, label, start)) in hull.iter().enumerate() {
        let upper = hull.get(idx + 1).and_then(|(_, _, _, s)| s.clone());
        intervals.push(PhaseInterval {
            lower: start.clone(),
            upper,
            winner: None,
            label: label.to_string(),
            magnetization: m.clone(),
            intercept: a.clone(),
        });
    }
    PhaseDiagram { intervals }
}

/// Exact energy cost of flipping one spin of the periodic configuration
/// on the infinite lattice.
pub fn single_flip_cost(
    cfg: &PeriodicConfig,
    tab: &ClassicalTable,
    h: &BigRational,
    i: i64,
    j: i64,
) -> BigRational {
    let s = rat_int(cfg.spin(i, j));
    let nn_sum = rat_int(
        cfg.spin(i + 1, j) + cfg.spin(i - 1, j) + cfg.spin(i, j + 1) + cfg.spin(i, j - 1),
    );
    let d2_sum = rat_int(
        cfg.spin(i + 2, j) + cfg.spin(i - 2, j) + cfg.spin(i, j + 2) + cfg.spin(i, j - 2),
    );
    let diag_sum = rat_int(
        cfg.spin(i + 1, j + 1)
            + cfg.spin(i + 1, j - 1)
            + cfg.spin(i - 1, j + 1)
            + cfg.spin(i - 1, j - 1),
    );
    // Products over the four plaquettes containing the site, with the
    // site's own spin included.
    let mut ring_sum = 0i64;
    for (di, dj) in [(0, 0), (-1, 0), (0, -1), (-1, -1)] {
        let (x, y) = (i + di, j + dj);
        ring_sum +=
            cfg.spin(x, y) * cfg.spin(x + 1, y) * cfg.spin(x + 1, y + 1) * cfg.spin(x, y + 1);
    }
    let half = ratio(1, 2);
    let pair = |coeff: &BigRational, partners: &BigRational| -(coeff * &s * partners * &half);
    pair(&tab.nn, &nn_sum)
        + pair(&tab.dist2, &d2_sum)
        + pair(&tab.diag, &diag_sum)
        - &tab.ring * rat_int(ring_sum) * ratio(1, 8)
        + h * &s
}

/// Smallest single-flip cost over the cell.
pub fn peierls_constant(
    cfg: &PeriodicConfig,
    tab: &ClassicalTable,
    h: &BigRational,
) -> BigRational {
    let mut min: Option<BigRational> = None;
    for j in 0..cfg.height as i64 {
        for i in 0..cfg.width as i64 {
            let cost = single_flip_cost(cfg, tab, h, i, j);
            min = Some(match min {
                None => cost,
                Some(cur) => cur.min(cost),
            });
        }
    }
    min.expect("empty cell")
}

/// Inputs for the stability estimates; `order` is the conjugation
/// order n of the table in use.
#[derive(Debug, Clone)]
pub struct DiagnosticsInput {
    pub t: BigRational,
    pub t_up: BigRational,
    pub u: BigRational,
    pub h: BigRational,
    pub mu0: BigRational,
    pub delta: BigRational,
    pub beta: f64,
    pub order: u32,
}

/// Closed-form stability parameters with every order-of-magnitude
/// constant set to one.
#[derive(Debug, Clone)]
pub struct StabilityDiagnostics {
    /// Exact minimal single-defect cost of the winning configuration.
    pub kappa: BigRational,
    /// The quadratic estimate `4t^2/U - |h|` reported alongside.
    pub kappa_estimate: BigRational,
    /// Set when kappa is nonpositive: the field sits inside an excluded
    /// band and the convergence ratios are undefined.
    pub inside_excluded_band: bool,
    pub winner_label: String,
    pub d: BigRational,
    pub eps_ll: f64,
    pub eps_hl: f64,
    pub eps_lh: f64,
    pub eps_hh: f64,
    /// Largest of the five convergence ratios; `None` inside an
    /// excluded band.
    pub eta: Option<f64>,
    /// `max(exp(-beta kappa), eta)`.
    pub epsilon: Option<f64>,
}

fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("rational out of f64 range")
}

/// Assembles the convergence diagnostics for the diagonal table at the
/// given field.
pub fn stability_diagnostics(
    tab: &ClassicalTable,
    input: &DiagnosticsInput,
) -> Result<StabilityDiagnostics, PhaseError> {
    assert!(
        input.order == 1 || input.order == 2,
        "diagnostics cover orders 1 and 2"
    );
    let diagram = ground_state_envelope(tab, 4, 4)?;
    let interval = diagram.winner_at(&input.h);
    let winner = interval
        .winner
        .clone()
        .expect("interaction envelope carries explicit winners");
    let kappa = peierls_constant(&winner, tab, &input.h);
    let kappa_estimate = ratio(4, 1) * &input.t * &input.t / &input.u - input.h.abs();

    let d = (&input.u - &input.mu0).max(input.mu0.clone());

    let n = input.order as i32;
    let t = to_f64(&input.t);
    let t_up = to_f64(&input.t_up);
    let u = to_f64(&input.u);
    let delta = to_f64(&input.delta);
    let d_f = to_f64(&d);
    let eps_ll = if t_up == 0.0 {
        0.0
    } else if n == 1 {
        (t_up / t) * t * t / (u * delta)
    } else {
        (t_up / t) * t.powi(4) / (u.powi(3) * delta.powi(4))
    };
    let eps_hl = t.powi(n + 1) / (d_f.powi(n) * delta.powi(n + 1));
    let eps_lh = eps_hl;
    let eps_hh = t / delta;

    let inside = kappa <= BigRational::zero();
    let (eta, epsilon) = if inside {
        (None, None)
    } else {
        let kappa_f = to_f64(&kappa);
        let eta = [
            eps_ll * delta / kappa_f,
            delta * (eps_hl * eps_lh / (kappa_f * (kappa_f + d_f))).sqrt(),
            eps_hh * delta / (kappa_f + d_f),
            eps_lh * delta / (kappa_f + d_f),
            eps_hl * delta / (kappa_f + d_f),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let epsilon = ((-input.beta * kappa_f).exp()).max(eta);
        (Some(eta), Some(epsilon))
    };

    Ok(StabilityDiagnostics {
        kappa,
        kappa_estimate,
        inside_excluded_band: inside,
        winner_label: interval.label.clone(),
        d,
        eps_ll,
        eps_hl,
        eps_lh,
        eps_hh,
        eta,
        epsilon,
    })
}
