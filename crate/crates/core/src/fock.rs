//! Occupation-number bases and sparse second-quantized operators.
//!
//! All particle-number observables commute with every operator we build, so
//! work happens inside fixed sectors: either fixed total number `N` or fixed
//! per-spin numbers `(N_up, N_down)`.  A sector basis is the sorted list of
//! occupation bitmasks satisfying the constraint; sorting makes every matrix
//! in the crate deterministic.
//!
//! Fermionic signs follow from the total order on spin-orbitals
//! `(site rank, spin)` with the site rank given by the spiral order of the
//! cluster; a ladder operator acting on orbital `o` picks up the parity of
//! the occupied orbitals preceding `o`.

use crate::lattice::{Cluster, SiteId};
use crate::scalar::{Poly, ScalarValue, Symbols};
use num::{BigRational, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn idx(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Up => write!(f, "+"),
            Spin::Down => write!(f, "-"),
        }
    }
}

/// Spin-orbital index of `(site, spin)` in the global order.
pub fn orbital(site: SiteId, spin: Spin) -> usize {
    2 * site + spin.idx()
}

/// Occupation bitmask over spin-orbitals.
pub type Mask = u64;

pub fn occupied(mask: Mask, site: SiteId, spin: Spin) -> bool {
    mask >> orbital(site, spin) & 1 == 1
}

pub fn site_occupation(mask: Mask, site: SiteId) -> u32 {
    (mask >> orbital(site, Spin::Up) & 1) as u32 + (mask >> orbital(site, Spin::Down) & 1) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorRule {
    /// Fixed total particle number.
    Total(u32),
    /// Fixed number of each spin species.
    PerSpin { up: u32, down: u32 },
}

#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n_sites: usize,
    pub rule: SectorRule,
    states: Vec<Mask>,
    index: HashMap<Mask, u32>,
}

/// All `n`-bit masks with exactly `k` bits set, ascending.
fn combinations(n: usize, k: u32) -> Vec<u32> {
    let mut out = Vec::new();
    if k as usize > n {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack.
    let mut v: u32 = (1 << k) - 1;
    let limit: u32 = 1 << n;
    while v < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Spreads site-mask bit `i` to orbital bit `2i + offset`.
fn spread(site_mask: u32, offset: usize) -> Mask {
    let mut out: Mask = 0;
    let mut m = site_mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << (2 * i + offset);
        m &= m - 1;
    }
    out
}

impl SectorBasis {
    pub fn new(cluster: &Cluster, rule: SectorRule) -> SectorBasis {
        let n = cluster.n_sites();
        assert!(n <= 24, "cluster too large for bitmask representation");
        let mut states: Vec<Mask> = Vec::new();
        match rule {
            SectorRule::PerSpin { up, down } => {
                for um in combinations(n, up) {
                    for dm in combinations(n, down) {
                        states.push(spread(um, 0) | spread(dm, 1));
                    }
                }
            }
            SectorRule::Total(total) => {
                for up in 0..=total {
                    let down = total - up;
                    for um in combinations(n, up) {
                        for dm in combinations(n, down) {
                            states.push(spread(um, 0) | spread(dm, 1));
                        }
                    }
                }
            }
        }
        states.sort_unstable();
        states.dedup();
        let index = states
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32))
            .collect();
        SectorBasis {
            n_sites: n,
            rule,
            states,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn mask(&self, i: u32) -> Mask {
        self.states[i as usize]
    }

    pub fn states(&self) -> &[Mask] {
        &self.states
    }

    pub fn index_of(&self, mask: Mask) -> Option<u32> {
        self.index.get(&mask).copied()
    }

    /// Sector reached from this one by a single ladder operator.
    pub fn shifted(&self, cluster: &Cluster, spin: Spin, delta: i32) -> SectorBasis {
        let bump = |v: u32| -> u32 {
            let w = v as i32 + delta;
            assert!(w >= 0, "ladder below the vacuum sector");
            w as u32
        };
        let rule = match self.rule {
            SectorRule::Total(n) => SectorRule::Total(bump(n)),
            SectorRule::PerSpin { up, down } => match spin {
                Spin::Up => SectorRule::PerSpin {
                    up: bump(up),
                    down,
                },
                Spin::Down => SectorRule::PerSpin {
                    up,
                    down: bump(down),
                },
            },
        };
        SectorBasis::new(cluster, rule)
    }
}

/// One ladder factor; a word is a product read left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub orb: usize,
    pub dagger: bool,
}

pub fn create(site: SiteId, spin: Spin) -> Ladder {
    Ladder {
        orb: orbital(site, spin),
        dagger: true,
    }
}

pub fn annihilate(site: SiteId, spin: Spin) -> Ladder {
    Ladder {
        orb: orbital(site, spin),
        dagger: false,
    }
}

/// Applies one ladder factor; `None` when the state is annihilated.
fn apply_ladder(mask: Mask, l: Ladder) -> Option<(Mask, i8)> {
    let bit = 1u64 << l.orb;
    let below = mask & (bit - 1);
    let sign = if below.count_ones() % 2 == 0 { 1 } else { -1 };
    if l.dagger {
        if mask & bit != 0 {
            None
        } else {
            Some((mask | bit, sign))
        }
    } else if mask & bit == 0 {
        None
    } else {
        Some((mask & !bit, sign))
    }
}

/// Applies a word (rightmost factor first).
pub fn apply_word(mask: Mask, word: &[Ladder]) -> Option<(Mask, i8)> {
    let mut m = mask;
    let mut sign = 1i8;
    for l in word.iter().rev() {
        let (next, s) = apply_ladder(m, *l)?;
        m = next;
        sign *= s;
    }
    Some((m, sign))
}

/// A sparse matrix over the exact coefficient field, mapping the `domain`
/// sector into the `codomain` sector.  Zero entries are never stored.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    sym: Symbols,
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(u32, u32), ScalarValue>,
}

impl SparseOperator {
    pub fn zero(sym: &Symbols, rows: usize, cols: usize) -> SparseOperator {
        SparseOperator {
            sym: sym.clone(),
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(sym: &Symbols, dim: usize) -> SparseOperator {
        let mut op = SparseOperator::zero(sym, dim, dim);
        for i in 0..dim as u32 {
            op.entries.insert((i, i), ScalarValue::one(sym));
        }
        op
    }

    pub fn from_diagonal(sym: &Symbols, diag: &[Poly]) -> SparseOperator {
        let mut op = SparseOperator::zero(sym, diag.len(), diag.len());
        for (i, p) in diag.iter().enumerate() {
            if !p.is_zero() {
                op.entries
                    .insert((i as u32, i as u32), ScalarValue::from_poly(p.clone()));
            }
        }
        op
    }

    /// Indicator diagonal: 1 where `pred` holds.
    pub fn projector(sym: &Symbols, basis: &SectorBasis, pred: impl Fn(Mask) -> bool) -> SparseOperator {
        let mut op = SparseOperator::zero(sym, basis.dim(), basis.dim());
        for (i, &m) in basis.states().iter().enumerate() {
            if pred(m) {
                op.entries
                    .insert((i as u32, i as u32), ScalarValue::one(sym));
            }
        }
        op
    }

    pub fn symbols(&self) -> &Symbols {
        &self.sym
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &ScalarValue)> {
        self.entries.iter()
    }

    pub fn n_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: u32, c: u32) -> ScalarValue {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| ScalarValue::zero(&self.sym))
    }

    pub fn set(&mut self, r: u32, c: u32, v: ScalarValue) {
        assert!((r as usize) < self.rows && (c as usize) < self.cols);
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: u32, c: u32, v: &ScalarValue) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur.add(v));
    }

    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &SparseOperator) -> SparseOperator {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparseOperator {
        self.map(|v| v.neg())
    }

    pub fn scale(&self, c: &BigRational) -> SparseOperator {
        if c.is_zero() {
            return SparseOperator::zero(&self.sym, self.rows, self.cols);
        }
        self.map(|v| v.scale(c))
    }

    pub fn scale_value(&self, c: &ScalarValue) -> SparseOperator {
        if c.is_zero() {
            return SparseOperator::zero(&self.sym, self.rows, self.cols);
        }
        self.map(|v| v.mul(c))
    }

    fn map(&self, f: impl Fn(&ScalarValue) -> ScalarValue) -> SparseOperator {
        let mut out = SparseOperator::zero(&self.sym, self.rows, self.cols);
        for (&k, v) in &self.entries {
            let w = f(v);
            if !w.is_zero() {
                out.entries.insert(k, w);
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        // Row-indexed view of `other` for cache-friendly accumulation.
        let mut rows_of: Vec<Vec<(u32, &ScalarValue)>> = vec![Vec::new(); other.rows];
        for (&(r, c), v) in &other.entries {
            rows_of[r as usize].push((c, v));
        }
        let mut out = SparseOperator::zero(&self.sym, self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &rows_of[k as usize] {
                out.add_to(r, c, &a.mul(b));
            }
        }
        out
    }

    /// Transpose; the coefficient field is real, so this is the adjoint.
    pub fn adjoint(&self) -> SparseOperator {
        let mut out = SparseOperator::zero(&self.sym, self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            out.entries.insert((c, r), v.clone());
        }
        out
    }

    pub fn commutator(&self, other: &SparseOperator) -> SparseOperator {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &SparseOperator) -> SparseOperator {
        self.mul(other).add(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_same(&self, other: &SparseOperator) -> bool {
        self.sub(other).is_zero()
    }

    pub fn truncate_hopping(&self, deg: u32) -> SparseOperator {
        self.map(|v| v.truncate_hopping(deg))
    }

    /// Keeps entry parts of hopping degree exactly `deg`.
    pub fn hopping_component(&self, deg: u32) -> SparseOperator {
        self.map(|v| v.hopping_component(deg))
    }

    pub fn min_hopping_degree(&self) -> Option<u32> {
        self.entries
            .values()
            .filter_map(|v| v.min_hopping_degree())
            .min()
    }

    pub fn max_hopping_degree(&self) -> Option<u32> {
        self.entries
            .values()
            .filter_map(|v| v.hopping_degree())
            .max()
    }
}

/// Builds the matrix of a sum of ladder words between explicit sectors.
///
/// Panics if a word maps a domain state onto a mask missing from the
/// codomain: that indicates a mismatched sector pair, not physics.
pub fn operator_from_words(
    sym: &Symbols,
    domain: &SectorBasis,
    codomain: &SectorBasis,
    words: &[(Vec<Ladder>, ScalarValue)],
) -> SparseOperator {
    let mut op = SparseOperator::zero(sym, codomain.dim(), domain.dim());
    for (col, &mask) in domain.states().iter().enumerate() {
        for (word, coeff) in words {
            if coeff.is_zero() {
                continue;
            }
            if let Some((target, sign)) = apply_word(mask, word) {
                let row = codomain
                    .index_of(target)
                    .unwrap_or_else(|| panic!("word leaves the declared codomain sector"));
                let signed = if sign < 0 { coeff.neg() } else { coeff.clone() };
                op.add_to(row, col as u32, &signed);
            }
        }
    }
    op
}

/// Single ladder operator `c` or `c^dagger`; returns the matrix and the
/// codomain sector it maps into.
pub fn ladder_matrix(
    sym: &Symbols,
    cluster: &Cluster,
    basis: &SectorBasis,
    site: SiteId,
    spin: Spin,
    dagger: bool,
) -> (SparseOperator, SectorBasis) {
    let codomain = basis.shifted(cluster, spin, if dagger { 1 } else { -1 });
    let word = vec![Ladder {
        orb: orbital(site, spin),
        dagger,
    }];
    let op = operator_from_words(sym, basis, &codomain, &[(word, ScalarValue::one(sym))]);
    (op, codomain)
}

/// `c^dagger_{x sigma} c_{y sigma}` within one sector.
pub fn hop(sym: &Symbols, basis: &SectorBasis, x: SiteId, y: SiteId, spin: Spin) -> SparseOperator {
    operator_from_words(
        sym,
        basis,
        basis,
        &[(
            vec![create(x, spin), annihilate(y, spin)],
            ScalarValue::one(sym),
        )],
    )
}

/// Occupation `n_{x sigma}`.
pub fn number(sym: &Symbols, basis: &SectorBasis, x: SiteId, spin: Spin) -> SparseOperator {
    let mut op = SparseOperator::zero(sym, basis.dim(), basis.dim());
    for (i, &m) in basis.states().iter().enumerate() {
        if occupied(m, x, spin) {
            op.set(i as u32, i as u32, ScalarValue::one(sym));
        }
    }
    op
}

/// `S^3_x = (n_up - n_down)/2`.
pub fn sz(sym: &Symbols, basis: &SectorBasis, x: SiteId) -> SparseOperator {
    let mut op = SparseOperator::zero(sym, basis.dim(), basis.dim());
    let half = BigRational::new(1.into(), 2.into());
    for (i, &m) in basis.states().iter().enumerate() {
        let up = occupied(m, x, Spin::Up) as i64;
        let dn = occupied(m, x, Spin::Down) as i64;
        if up != dn {
            let v = ScalarValue::constant(sym, &half * BigRational::from_integer((up - dn).into()));
            op.set(i as u32, i as u32, v);
        }
    }
    op
}

/// `S^+_x = c^dagger_{x up} c_{x down}` as a word (sector-crossing in a
/// per-spin basis, sector-preserving in a total-number basis).
pub fn splus_word(x: SiteId) -> Vec<Ladder> {
    vec![create(x, Spin::Up), annihilate(x, Spin::Down)]
}

pub fn sminus_word(x: SiteId) -> Vec<Ladder> {
    vec![create(x, Spin::Down), annihilate(x, Spin::Up)]
}

/// `S^perp_x S^perp_y = (S^+_x S^-_y + S^-_x S^+_y)/2`, sector-preserving.
pub fn sperp_pair(sym: &Symbols, basis: &SectorBasis, x: SiteId, y: SiteId) -> SparseOperator {
    let half = ScalarValue::constant(sym, BigRational::new(1.into(), 2.into()));
    let mut w1 = splus_word(x);
    w1.extend(sminus_word(y));
    let mut w2 = sminus_word(x);
    w2.extend(splus_word(y));
    operator_from_words(
        sym,
        basis,
        basis,
        &[(w1, half.clone()), (w2, half)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Shape;
    use crate::scalar::SymbolSet;

    fn sym() -> Symbols {
        SymbolSet::new(&["t", "U"], &["t"])
    }

    fn binomial(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut acc = 1u64;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn sector_dimensions_match_binomials() {
        let bond = Cluster::build(Shape::Bond);
        let b = SectorBasis::new(&bond, SectorRule::Total(2));
        assert_eq!(b.dim() as u64, binomial(4, 2));
        assert_eq!(b.dim(), 6);

        let plaq = Cluster::build(Shape::Plaquette);
        let p = SectorBasis::new(&plaq, SectorRule::Total(4));
        assert_eq!(p.dim() as u64, binomial(8, 4));
        assert_eq!(p.dim(), 70);

        let half = SectorBasis::new(&plaq, SectorRule::PerSpin { up: 2, down: 2 });
        assert_eq!(half.dim() as u64, binomial(4, 2) * binomial(4, 2));

        // A total-number sector is the union of its per-spin splits.
        let total3 = SectorBasis::new(&plaq, SectorRule::Total(3));
        let split: usize = (0..=3)
            .map(|u| {
                SectorBasis::new(
                    &plaq,
                    SectorRule::PerSpin {
                        up: u,
                        down: 3 - u,
                    },
                )
                .dim()
            })
            .sum();
        assert_eq!(total3.dim(), split);
    }

    #[test]
    fn canonical_anticommutation_relations() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Chain3);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(3));
        let orbs: Vec<(SiteId, Spin)> = (0..3)
            .flat_map(|s| Spin::BOTH.iter().map(move |&sp| (s, sp)))
            .collect();
        for &(xa, sa) in &orbs {
            for &(xb, sb) in &orbs {
                // {c_a, c^dagger_b} = delta_ab on the sector.
                let (cb_dag, up_basis) = ladder_matrix(&sy, &cluster, &basis, xb, sb, true);
                let (ca_from_up, _) = ladder_matrix(&sy, &cluster, &up_basis, xa, sa, false);
                let (ca, down_basis) = ladder_matrix(&sy, &cluster, &basis, xa, sa, false);
                let (cb_dag_from_down, _) =
                    ladder_matrix(&sy, &cluster, &down_basis, xb, sb, true);
                let anti = ca_from_up.mul(&cb_dag).add(&cb_dag_from_down.mul(&ca));
                let expected = if (xa, sa) == (xb, sb) {
                    SparseOperator::identity(&sy, basis.dim())
                } else {
                    SparseOperator::zero(&sy, basis.dim(), basis.dim())
                };
                assert!(anti.is_same(&expected), "CAR failed at {xa}{sa} {xb}{sb}");

                // {c_a, c_b} = 0.
                let (ca_mid, mid) = ladder_matrix(&sy, &cluster, &basis, xa, sa, false);
                let (cb_low, _) = ladder_matrix(&sy, &cluster, &mid, xb, sb, false);
                let (cb_mid, mid2) = ladder_matrix(&sy, &cluster, &basis, xb, sb, false);
                let (ca_low, _) = ladder_matrix(&sy, &cluster, &mid2, xa, sa, false);
                let anti2 = cb_low.mul(&ca_mid).add(&ca_low.mul(&cb_mid));
                assert!(anti2.is_zero(), "c c anticommutator at {xa}{sa} {xb}{sb}");
            }
        }
    }

    #[test]
    fn creation_operators_anticommute() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Bond);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(0));
        let (c0, mid) = ladder_matrix(&sy, &cluster, &basis, 0, Spin::Up, true);
        let (c1_up, _) = ladder_matrix(&sy, &cluster, &mid, 1, Spin::Down, true);
        let (c1, mid2) = ladder_matrix(&sy, &cluster, &basis, 1, Spin::Down, true);
        let (c0_up, _) = ladder_matrix(&sy, &cluster, &mid2, 0, Spin::Up, true);
        let lhs = c1_up.mul(&c0);
        let rhs = c0_up.mul(&c1).neg();
        assert!(lhs.is_same(&rhs));
        assert!(!lhs.is_zero());
    }

    #[test]
    fn hop_adjoint_reverses_direction() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Chain3);
        for rule in [
            SectorRule::Total(2),
            SectorRule::PerSpin { up: 1, down: 1 },
        ] {
            let basis = SectorBasis::new(&cluster, rule);
            for spin in Spin::BOTH {
                let fwd = hop(&sy, &basis, 0, 1, spin);
                let bwd = hop(&sy, &basis, 1, 0, spin);
                assert!(fwd.adjoint().is_same(&bwd));
                assert!(!fwd.is_zero());
            }
        }
    }

    #[test]
    fn hop_matches_ladder_composition() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Chain3);
        let basis = SectorBasis::new(&cluster, SectorRule::PerSpin { up: 2, down: 1 });
        for (x, y) in [(0usize, 1usize), (1, 2), (0, 2), (2, 0)] {
            for spin in Spin::BOTH {
                let direct = hop(&sy, &basis, x, y, spin);
                let (ann, mid) = ladder_matrix(&sy, &cluster, &basis, y, spin, false);
                let (cre, _) = ladder_matrix(&sy, &cluster, &mid, x, spin, true);
                assert!(direct.is_same(&cre.mul(&ann)), "hop {x}<-{y} {spin}");
            }
        }
    }

    #[test]
    fn disjoint_supports_commute() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Chain3);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(2));
        // Gauge-invariant operators on disjoint sites commute despite the
        // fermionic representation.
        let h01 = hop(&sy, &basis, 0, 1, Spin::Up).add(&hop(&sy, &basis, 1, 0, Spin::Up));
        let n2 = number(&sy, &basis, 2, Spin::Up);
        let s2 = sz(&sy, &basis, 2);
        assert!(h01.commutator(&n2).is_zero());
        assert!(h01.commutator(&s2).is_zero());
        let sp02 = sperp_pair(&sy, &basis, 0, 2);
        assert!(!sp02.is_zero());
        assert!(number(&sy, &basis, 1, Spin::Down).commutator(&sp02).is_zero());
    }

    #[test]
    fn double_creation_on_same_orbital_vanishes() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Bond);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(0));
        let (c, mid) = ladder_matrix(&sy, &cluster, &basis, 0, Spin::Up, true);
        let (c_again, _) = ladder_matrix(&sy, &cluster, &mid, 0, Spin::Up, true);
        assert!(c_again.mul(&c).is_zero());
    }

    #[test]
    fn sperp_is_self_adjoint_and_flips_pairs() {
        let sy = sym();
        let cluster = Cluster::build(Shape::Bond);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(2));
        let sp = sperp_pair(&sy, &basis, 0, 1);
        assert!(sp.is_same(&sp.adjoint()));
        // On the singly occupied pair states it acts as half a swap.
        let up_dn = basis
            .index_of(1 << orbital(0, Spin::Up) | 1 << orbital(1, Spin::Down))
            .unwrap();
        let dn_up = basis
            .index_of(1 << orbital(0, Spin::Down) | 1 << orbital(1, Spin::Up))
            .unwrap();
        assert!(!sp.get(dn_up, up_dn).is_zero());
        assert!(sp.get(up_dn, up_dn).is_zero());
    }
}
