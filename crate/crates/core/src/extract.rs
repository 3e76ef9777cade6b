//! Spin-operator form of ground-block interactions and their split into
//! pure per-support terms.
//!
//! The ground sector of a cluster with one carrier per band site is a
//! product of local doublets, so every ground-block matrix has a unique
//! expansion in products of `S^+`, `S^-`, `S^3` over distinct sites.
//! Entries are grouped by spin-flip pattern; the remaining diagonal
//! dependence is projected onto `S^3` products with a parity transform,
//! exact over the rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, BigRational};

use crate::engine::{derive, Derivation, EngineError};
use crate::fock::{occupied, SectorBasis, SparseOperator};
use crate::lattice::{Cluster, Shape, SiteId};
use crate::models::Model;
use crate::scalar::{Poly, ScalarValue, Symbols};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Product of spin operators on pairwise distinct sites, in the normal
/// order `S^+ S^- S^3`.  Operators on distinct sites commute, so the
/// sorted site lists are a canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpinMonomial {
    raise: Vec<SiteId>,
    lower: Vec<SiteId>,
    z: Vec<SiteId>,
}

impl SpinMonomial {
    pub fn new(mut raise: Vec<SiteId>, mut lower: Vec<SiteId>, mut z: Vec<SiteId>) -> SpinMonomial {
        raise.sort_unstable();
        lower.sort_unstable();
        z.sort_unstable();
        let m = SpinMonomial { raise, lower, z };
        let support = m.support();
        assert!(
            support.windows(2).all(|w| w[0] != w[1]),
            "spin monomial reuses a site"
        );
        m
    }

    pub fn identity() -> SpinMonomial {
        SpinMonomial {
            raise: Vec::new(),
            lower: Vec::new(),
            z: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.raise.is_empty() && self.lower.is_empty() && self.z.is_empty()
    }

    pub fn raise(&self) -> &[SiteId] {
        &self.raise
    }

    pub fn lower(&self) -> &[SiteId] {
        &self.lower
    }

    pub fn z(&self) -> &[SiteId] {
        &self.z
    }

    pub fn is_diagonal(&self) -> bool {
        self.raise.is_empty() && self.lower.is_empty()
    }

    pub fn support(&self) -> Vec<SiteId> {
        let mut all: Vec<SiteId> = Vec::with_capacity(self.raise.len() + self.lower.len() + self.z.len());
        all.extend_from_slice(&self.raise);
        all.extend_from_slice(&self.lower);
        all.extend_from_slice(&self.z);
        all.sort_unstable();
        all
    }

    /// Renames site `i` to `image[i]`.
    pub fn relabel(&self, image: &[SiteId]) -> SpinMonomial {
        let map = |v: &[SiteId]| v.iter().map(|&s| image[s]).collect();
        SpinMonomial::new(map(&self.raise), map(&self.lower), map(&self.z))
    }
}

impl fmt::Display for SpinMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut put = |f: &mut fmt::Formatter<'_>, tag: &str, sites: &[SiteId]| -> fmt::Result {
            for &s in sites {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{tag}[{s}]")?;
            }
            Ok(())
        };
        put(f, "S+", &self.raise)?;
        put(f, "S-", &self.lower)?;
        put(f, "Sz", &self.z)
    }
}

/// Linear combination of spin monomials with exact coefficients.
#[derive(Debug, Clone)]
pub struct SpinPolynomial {
    sym: Symbols,
    terms: BTreeMap<SpinMonomial, ScalarValue>,
}

impl SpinPolynomial {
    pub fn zero(sym: &Symbols) -> SpinPolynomial {
        SpinPolynomial {
            sym: sym.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn term(mono: SpinMonomial, coeff: ScalarValue) -> SpinPolynomial {
        let mut p = SpinPolynomial::zero(coeff.symbols());
        p.add_term(mono, &coeff);
        p
    }

    pub fn unit(sym: &Symbols) -> SpinPolynomial {
        SpinPolynomial::term(SpinMonomial::identity(), ScalarValue::one(sym))
    }

    pub fn sz(sym: &Symbols, x: SiteId) -> SpinPolynomial {
        SpinPolynomial::term(
            SpinMonomial::new(vec![], vec![], vec![x]),
            ScalarValue::one(sym),
        )
    }

    pub fn szsz(sym: &Symbols, x: SiteId, y: SiteId) -> SpinPolynomial {
        SpinPolynomial::term(
            SpinMonomial::new(vec![], vec![], vec![x, y]),
            ScalarValue::one(sym),
        )
    }

    /// `(S^+_x S^-_y + S^-_x S^+_y) / 2`.
    pub fn sperp(sym: &Symbols, x: SiteId, y: SiteId) -> SpinPolynomial {
        let half = ScalarValue::constant(sym, rat(1, 2));
        let mut p = SpinPolynomial::zero(sym);
        p.add_term(SpinMonomial::new(vec![x], vec![y], vec![]), &half);
        p.add_term(SpinMonomial::new(vec![y], vec![x], vec![]), &half);
        p
    }

    /// Full exchange `S_x . S_y`.
    pub fn sdot(sym: &Symbols, x: SiteId, y: SiteId) -> SpinPolynomial {
        SpinPolynomial::szsz(sym, x, y).add(&SpinPolynomial::sperp(sym, x, y))
    }

    /// Bare flip product `prod S^+ prod S^-`.
    pub fn pm(sym: &Symbols, raise: &[SiteId], lower: &[SiteId]) -> SpinPolynomial {
        SpinPolynomial::term(
            SpinMonomial::new(raise.to_vec(), lower.to_vec(), vec![]),
            ScalarValue::one(sym),
        )
    }

    pub fn symbols(&self) -> &Symbols {
        &self.sym
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SpinMonomial, &ScalarValue)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &SpinMonomial) -> ScalarValue {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| ScalarValue::zero(&self.sym))
    }

    pub fn add_term(&mut self, mono: SpinMonomial, coeff: &ScalarValue) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(mono)
            .or_insert_with(|| ScalarValue::zero(&self.sym));
        *entry = entry.add(coeff);
        if entry.is_zero() {
            let dead: Vec<SpinMonomial> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &SpinPolynomial) -> SpinPolynomial {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v);
        }
        out
    }

    pub fn neg(&self) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.neg());
        }
        out
    }

    pub fn sub(&self, other: &SpinPolynomial) -> SpinPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.scale(c));
        }
        out
    }

    pub fn scale_value(&self, c: &ScalarValue) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.mul(c));
        }
        out
    }

    /// Product of polynomials with disjoint site supports.
    pub fn mul(&self, other: &SpinPolynomial) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let mut raise = ma.raise.clone();
                raise.extend_from_slice(&mb.raise);
                let mut lower = ma.lower.clone();
                lower.extend_from_slice(&mb.lower);
                let mut z = ma.z.clone();
                z.extend_from_slice(&mb.z);
                out.add_term(SpinMonomial::new(raise, lower, z), &va.mul(vb));
            }
        }
        out
    }

    pub fn relabel(&self, image: &[SiteId]) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.relabel(image), v);
        }
        out
    }

    pub fn hopping_component(&self, deg: u32) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.hopping_component(deg));
        }
        out
    }

    pub fn truncate_hopping(&self, deg: u32) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.truncate_hopping(deg));
        }
        out
    }

    /// Diagonal part: monomials built from `S^3` alone.
    pub fn diagonal_part(&self) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero(&self.sym);
        for (m, v) in &self.terms {
            if m.is_diagonal() {
                out.add_term(m.clone(), v);
            }
        }
        out
    }

    pub fn support(&self) -> Vec<SiteId> {
        let mut all: Vec<SiteId> = self.terms.keys().flat_map(|m| m.support()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn is_same(&self, other: &SpinPolynomial) -> bool {
        let mut keys: Vec<&SpinMonomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .all(|m| self.coefficient(m).eq_value(&other.coefficient(m)))
    }
}

impl fmt::Display for SpinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "({v}) * {m}")?;
        }
        Ok(())
    }
}

/// Expands a ground-block operator in spin monomials.
///
/// Every entry must connect states where each band site holds exactly one
/// carrier and every other site sits at its ground occupation.  Ladder
/// words that move a carrier within one site pick up no net fermionic
/// sign on such states, so matrix elements map one-to-one onto spin
/// monomial matrix elements.
pub fn spin_form(
    model: &Model,
    cluster: &Cluster,
    basis: &SectorBasis,
    block: &SparseOperator,
) -> SpinPolynomial {
    let sym = block.symbols().clone();
    let band = cluster.band_sites();
    let m = band.len();
    assert!(m <= 16, "spin expansion limited to 16 band sites");
    let all_sites: Vec<SiteId> = (0..cluster.n_sites()).collect();

    // Basis index -> up/down pattern over band sites, ground states only.
    let mut config_of: HashMap<u32, u32> = HashMap::new();
    for (i, &mask) in basis.states().iter().enumerate() {
        if model.all_ground(cluster, mask, &all_sites) {
            let mut bits = 0u32;
            for (j, &site) in band.iter().enumerate() {
                if occupied(mask, site, crate::fock::Spin::Up) {
                    bits |= 1 << j;
                }
            }
            config_of.insert(i as u32, bits);
        }
    }

    // Group entries by flip pattern; key is (raised bits, lowered bits),
    // payload maps the spectator configuration to the entry value.
    let mut groups: BTreeMap<(u32, u32), Vec<(u32, ScalarValue)>> = BTreeMap::new();
    for (&(r, c), v) in block.entries() {
        let rc = *config_of
            .get(&r)
            .expect("block entry leaves the ground sector");
        let cc = *config_of
            .get(&c)
            .expect("block entry leaves the ground sector");
        let raise = rc & !cc;
        let lower = cc & !rc;
        let rest = cc & !(raise | lower);
        groups
            .entry((raise, lower))
            .or_default()
            .push((rest, v.clone()));
    }

    let full: u32 = (1 << m) - 1;
    let sites_of = |bits: u32| -> Vec<SiteId> {
        (0..m).filter(|j| bits >> j & 1 == 1).map(|j| band[j]).collect()
    };

    let mut out = SpinPolynomial::zero(&sym);
    for ((raise, lower), entries) in groups {
        let rest_mask = full & !(raise | lower);
        let m_rest = rest_mask.count_ones();
        // Parity transform: the value on spectators s expands as
        // sum_Z c_Z prod_{k in Z} S^3_k with
        // c_Z = 2^|Z| 2^{-m_rest} sum_s chi_Z(s) g(s).
        let mut zmask = rest_mask;
        loop {
            let mut acc = ScalarValue::zero(&sym);
            for (s, v) in &entries {
                if (zmask & !s).count_ones() % 2 == 0 {
                    acc = acc.add(v);
                } else {
                    acc = acc.sub(v);
                }
            }
            if !acc.is_zero() {
                let norm = rat(2, 1).pow(zmask.count_ones() as i32)
                    * rat(1, 2).pow(m_rest as i32);
                out.add_term(
                    SpinMonomial::new(sites_of(raise), sites_of(lower), sites_of(zmask)),
                    &acc.scale(&norm),
                );
            }
            if zmask == 0 {
                break;
            }
            zmask = (zmask - 1) & rest_mask;
        }
    }
    out
}

/// Spin form of a derivation's ground block at the derived order.
pub fn express_in_spin_basis(d: &Derivation) -> SpinPolynomial {
    spin_form(&d.model, &d.cluster, &d.basis, &d.ground_block())
}

fn express_to_degree(d: &Derivation, degree: u32) -> SpinPolynomial {
    spin_form(&d.model, &d.cluster, &d.basis, &d.ground_block_to(degree))
}

/// Pure interaction terms of a one-band model, one polynomial per support
/// shape, with smaller supports already subtracted.  Site labels follow
/// the cluster conventions: bond `0-1`, three-site supports with middle
/// site `1`, plaquette cyclic `0-1-2-3`.
#[derive(Debug, Clone)]
pub struct OneBandTerms {
    pub onsite: SpinPolynomial,
    pub bond: SpinPolynomial,
    pub triple: SpinPolynomial,
    pub triple_bent: SpinPolynomial,
    pub plaquette: SpinPolynomial,
}

/// Derives the effective interaction on each support shape and strips
/// embedded sub-support terms.  `order` counts conjugation steps and
/// `max_degree` sets the table depth; the usual pairs are `(1, 2)`,
/// `(2, 4)`, and `(1, 4)` for the first-step part of the quartic terms.
pub fn one_band_effective_terms(
    model: &Model,
    order: u32,
    max_degree: u32,
) -> Result<OneBandTerms, EngineError> {
    let table = |shape: Shape| -> Result<SpinPolynomial, EngineError> {
        let cluster = model.cluster(shape);
        let d = derive(model, &cluster, order, max_degree)?;
        Ok(express_to_degree(&d, max_degree))
    };

    let onsite = onsite_field_term(model);

    let bond_total = table(Shape::Bond)?;
    let bond = bond_total
        .sub(&onsite.relabel(&[0]))
        .sub(&onsite.relabel(&[1]));
    assert!(
        bond.is_same(&bond.relabel(&[1, 0])),
        "bond term is not symmetric under swapping its ends"
    );

    let strip_triple = |total: &SpinPolynomial| -> SpinPolynomial {
        total
            .sub(&onsite.relabel(&[0]))
            .sub(&onsite.relabel(&[1]))
            .sub(&onsite.relabel(&[2]))
            .sub(&bond.relabel(&[0, 1]))
            .sub(&bond.relabel(&[1, 2]))
    };
    let triple = strip_triple(&table(Shape::Chain3)?);
    let triple_bent = strip_triple(&table(Shape::Corner3)?);
    assert!(
        triple.is_same(&triple.relabel(&[2, 1, 0])),
        "three-site term is not symmetric under swapping its ends"
    );

    let plaquette_total = table(Shape::Plaquette)?;
    let mut plaquette = plaquette_total;
    for s in 0..4usize {
        plaquette = plaquette.sub(&onsite.relabel(&[s]));
    }
    for edge in [[0usize, 1], [1, 2], [2, 3], [0, 3]] {
        plaquette = plaquette.sub(&bond.relabel(&edge));
    }
    // Bent triples around the square: middle site and its two neighbors.
    for mid in 0..4usize {
        let a = (mid + 3) % 4;
        let b = (mid + 1) % 4;
        plaquette = plaquette.sub(&triple_bent.relabel(&place3(a, mid, b)));
    }

    Ok(OneBandTerms {
        onsite,
        bond,
        triple,
        triple_bent,
        plaquette,
    })
}

fn place3(end_a: usize, mid: usize, end_b: usize) -> [SiteId; 3] {
    [end_a, mid, end_b]
}

fn amplitudes(model: &Model) -> (Poly, Poly, Poly) {
    let a = model.amplitude(crate::fock::Spin::Up);
    let b = model.amplitude(crate::fock::Spin::Down);
    let u = Poly::named(model.symbols(), "U");
    (a, b, u)
}

fn over(num: Poly, den: &Poly) -> ScalarValue {
    ScalarValue::from_poly(num)
        .div_classical(den)
        .expect("denominator vanished while building a reference table")
}

/// Classical single-site energy in spin language: `-h S^3 - k/2`.
pub fn onsite_field_term(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let h = ScalarValue::named(sym, "h");
    let k = ScalarValue::named(sym, "k");
    let mut p = SpinPolynomial::zero(sym);
    p.add_term(SpinMonomial::new(vec![], vec![], vec![0]), &h.neg());
    p.add_term(SpinMonomial::identity(), &k.scale(&rat(-1, 2)));
    p
}

/// Second-order exchange on a bond with per-spin hopping amplitudes
/// `a`, `b`:
/// `2(a^2+b^2)/U (S^3 S^3 - 1/4) + (4ab/U) Sperp Sperp`.
pub fn bond_exchange_second_order(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let czz = over(a.pow(2).add(&b.pow(2)).scale(&rat(2, 1)), &u);
    let cperp = over(a.mul(&b).scale(&rat(4, 1)), &u);
    SpinPolynomial::szsz(sym, 0, 1)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&czz)
        .add(&SpinPolynomial::sperp(sym, 0, 1).scale_value(&cperp))
}

/// Fourth-order correction on a bond:
/// `-2(a^4+b^4+6a^2b^2)/U^3 (S^3 S^3 - 1/4) - 8(a^3 b + a b^3)/U^3 Sperp Sperp`.
pub fn bond_exchange_fourth_order(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let u3 = u.pow(3);
    let s4 = a.pow(4).add(&b.pow(4));
    let c22 = a.pow(2).mul(&b.pow(2));
    let c31 = a.pow(3).mul(&b).add(&a.mul(&b.pow(3)));
    let czz = over(s4.add(&c22.scale(&rat(6, 1))).scale(&rat(-2, 1)), &u3);
    let cperp = over(c31.scale(&rat(-8, 1)), &u3);
    SpinPolynomial::szsz(sym, 0, 1)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&czz)
        .add(&SpinPolynomial::sperp(sym, 0, 1).scale_value(&cperp))
}

/// Fourth-order three-site term produced by the first conjugation step
/// alone, ends `0`, `2`, middle `1`.
pub fn triple_fourth_first_step(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let u3 = u.pow(3);
    let s4 = a.pow(4).add(&b.pow(4));
    let c22 = a.pow(2).mul(&b.pow(2));
    let c31 = a.pow(3).mul(&b).add(&a.mul(&b.pow(3)));

    let ca = over(s4.scale(&rat(2, 1)).add(&c22.scale(&rat(4, 1))), &u3);
    let cb = over(c31.scale(&rat(4, 1)), &u3);
    let cc = over(c22.scale(&rat(8, 1)), &u3);

    let zz = SpinPolynomial::szsz(sym, 0, 1)
        .add(&SpinPolynomial::szsz(sym, 1, 2))
        .sub(&SpinPolynomial::szsz(sym, 0, 2))
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)));
    let perp_adj = SpinPolynomial::sperp(sym, 0, 1).add(&SpinPolynomial::sperp(sym, 1, 2));
    let perp_far = SpinPolynomial::sperp(sym, 0, 2);

    zz.scale_value(&ca)
        .add(&perp_adj.scale_value(&cb))
        .sub(&perp_far.scale_value(&cc))
        .neg()
}

/// Additional fourth-order three-site term contributed by the second
/// conjugation step.
pub fn triple_fourth_second_step(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let u3 = u.pow(3);
    let s4 = a.pow(4).add(&b.pow(4));
    let c22 = a.pow(2).mul(&b.pow(2));
    let c31 = a.pow(3).mul(&b).add(&a.mul(&b.pow(3)));

    let far = SpinPolynomial::szsz(sym, 0, 2)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&over(s4.scale(&rat(2, 1)), &u3));
    let zz_mix = SpinPolynomial::szsz(sym, 0, 1)
        .add(&SpinPolynomial::szsz(sym, 1, 2))
        .sub(&SpinPolynomial::szsz(sym, 0, 2))
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&over(c22.scale(&rat(8, 1)), &u3));
    let perp_far = SpinPolynomial::sperp(sym, 0, 2)
        .scale_value(&over(c22.scale(&rat(-4, 1)), &u3));
    let perp_adj = SpinPolynomial::sperp(sym, 0, 1)
        .add(&SpinPolynomial::sperp(sym, 1, 2))
        .scale_value(&over(c31.scale(&rat(4, 1)), &u3));

    far.add(&zz_mix).add(&perp_far).add(&perp_adj)
}

pub fn triple_fourth_order(model: &Model) -> SpinPolynomial {
    triple_fourth_first_step(model).add(&triple_fourth_second_step(model))
}

/// Fourth-order plaquette term from the first conjugation step, sites
/// cyclic `0-1-2-3`.
pub fn plaquette_fourth_first_step(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let u3 = u.pow(3);
    let s4 = a.pow(4).add(&b.pow(4));
    let c22 = a.pow(2).mul(&b.pow(2));
    let c31 = a.pow(3).mul(&b).add(&a.mul(&b.pow(3)));

    let zzzz = SpinPolynomial::szsz(sym, 0, 1).mul(&SpinPolynomial::szsz(sym, 2, 3));
    let ring4 = zzzz.scale_value(&over(s4.scale(&rat(8, 1)), &u3));

    let zz_comb = SpinPolynomial::szsz(sym, 0, 1)
        .add(&SpinPolynomial::szsz(sym, 1, 2))
        .add(&SpinPolynomial::szsz(sym, 2, 3))
        .add(&SpinPolynomial::szsz(sym, 0, 3))
        .sub(&SpinPolynomial::szsz(sym, 0, 2))
        .sub(&SpinPolynomial::szsz(sym, 1, 3))
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&over(s4.scale(&rat(-2, 1)), &u3));

    let perp_edge = |x: SiteId, y: SiteId, ox: SiteId, oy: SiteId| {
        SpinPolynomial::sperp(sym, x, y).mul(&SpinPolynomial::szsz(sym, ox, oy))
    };
    let mixed = perp_edge(1, 2, 0, 3)
        .add(&perp_edge(0, 3, 1, 2))
        .add(&perp_edge(0, 1, 2, 3))
        .add(&perp_edge(2, 3, 0, 1))
        .sub(
            &SpinPolynomial::sperp(sym, 0, 1)
                .add(&SpinPolynomial::sperp(sym, 1, 2))
                .add(&SpinPolynomial::sperp(sym, 2, 3))
                .add(&SpinPolynomial::sperp(sym, 0, 3))
                .scale(&rat(1, 4)),
        )
        .scale_value(&over(c31.scale(&rat(8, 1)), &u3));

    let flips = SpinPolynomial::pm(sym, &[0, 2], &[1, 3])
        .add(&SpinPolynomial::pm(sym, &[1, 3], &[0, 2]))
        .scale_value(&over(c22.scale(&rat(8, 1)), &u3));

    let diag_mixed = perp_edge(0, 2, 1, 3)
        .scale(&rat(4, 1))
        .add(&perp_edge(1, 3, 0, 2).scale(&rat(4, 1)))
        .sub(&SpinPolynomial::sperp(sym, 0, 2))
        .sub(&SpinPolynomial::sperp(sym, 1, 3))
        .scale_value(&over(c22.scale(&rat(-4, 1)), &u3));

    ring4.add(&zz_comb).add(&mixed).add(&flips).add(&diag_mixed)
}

/// Additional fourth-order plaquette term from the second conjugation
/// step.
pub fn plaquette_fourth_second_step(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let (a, b, u) = amplitudes(model);
    let u3 = u.pow(3);
    let s4 = a.pow(4).add(&b.pow(4));
    let c22 = a.pow(2).mul(&b.pow(2));
    let c31 = a.pow(3).mul(&b).add(&a.mul(&b.pow(3)));

    let zzzz = SpinPolynomial::szsz(sym, 0, 1).mul(&SpinPolynomial::szsz(sym, 2, 3));
    let zz_part = zzzz
        .scale(&rat(8, 1))
        .sub(&SpinPolynomial::szsz(sym, 0, 2))
        .sub(&SpinPolynomial::szsz(sym, 1, 3))
        .scale_value(&over(s4.scale(&rat(4, 1)), &u3));

    let perp_edge = |x: SiteId, y: SiteId, ox: SiteId, oy: SiteId| {
        SpinPolynomial::sperp(sym, x, y).mul(&SpinPolynomial::szsz(sym, ox, oy))
    };
    let mixed = perp_edge(2, 3, 0, 1)
        .add(&perp_edge(0, 1, 2, 3))
        .add(&perp_edge(1, 2, 0, 3))
        .add(&perp_edge(0, 3, 1, 2))
        .scale_value(&over(c31.scale(&rat(32, 1)), &u3));

    let flips = SpinPolynomial::pm(sym, &[0, 2], &[1, 3])
        .add(&SpinPolynomial::pm(sym, &[1, 3], &[0, 2]))
        .scale_value(&over(c22.scale(&rat(32, 1)), &u3));

    let diag_mixed = perp_edge(0, 2, 1, 3)
        .scale(&rat(8, 1))
        .add(&perp_edge(1, 3, 0, 2).scale(&rat(8, 1)))
        .add(&SpinPolynomial::sperp(sym, 0, 2))
        .add(&SpinPolynomial::sperp(sym, 1, 3))
        .scale_value(&over(c22.scale(&rat(-8, 1)), &u3));

    zz_part.add(&mixed).add(&flips).add(&diag_mixed)
}

pub fn plaquette_fourth_order(model: &Model) -> SpinPolynomial {
    plaquette_fourth_first_step(model).add(&plaquette_fourth_second_step(model))
}

/// Spin-symmetric hopping: bond table `(4t^2/U - 16t^4/U^3)(S_0.S_1 - 1/4)`.
pub fn symmetric_bond_table(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(2).scale(&rat(4, 1)), &u)
        .add(&over(t.pow(4).scale(&rat(-16, 1)), &u.pow(3)));
    SpinPolynomial::sdot(sym, 0, 1)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&c)
}

/// Spin-symmetric hopping: three-site table `(4t^4/U^3)(S_0.S_2 - 1/4)`.
pub fn symmetric_triple_table(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(4).scale(&rat(4, 1)), &u.pow(3));
    SpinPolynomial::sdot(sym, 0, 2)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&c)
}

/// Spin-symmetric hopping: pairwise plaquette part
/// `-(4t^4/U^3)(sum of the six S.S pairs - 1/4)`.
pub fn symmetric_plaquette_pairwise(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(4).scale(&rat(-4, 1)), &u.pow(3));
    let mut dots = SpinPolynomial::zero(sym);
    for [x, y] in [[0usize, 1], [1, 2], [2, 3], [0, 3], [0, 2], [1, 3]] {
        dots = dots.add(&SpinPolynomial::sdot(sym, x, y));
    }
    dots.sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&c)
}

/// Spin-symmetric hopping: four-spin plaquette part
/// `(80t^4/U^3)[(S_0.S_1)(S_2.S_3) + (S_0.S_3)(S_1.S_2) - (S_0.S_2)(S_1.S_3)]`.
pub fn symmetric_plaquette_ring(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(4).scale(&rat(80, 1)), &u.pow(3));
    let dd = |a: SiteId, b: SiteId, x: SiteId, y: SiteId| {
        SpinPolynomial::sdot(sym, a, b).mul(&SpinPolynomial::sdot(sym, x, y))
    };
    dd(0, 1, 2, 3)
        .add(&dd(0, 3, 1, 2))
        .sub(&dd(0, 2, 1, 3))
        .scale_value(&c)
}

pub fn symmetric_plaquette_table(model: &Model) -> SpinPolynomial {
    symmetric_plaquette_pairwise(model).add(&symmetric_plaquette_ring(model))
}

/// One mobile species: bond table `(2t^2/U - 2t^4/U^3)(S^3 S^3 - 1/4)`.
pub fn falicov_kimball_bond_table(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(2).scale(&rat(2, 1)), &u)
        .add(&over(t.pow(4).scale(&rat(-2, 1)), &u.pow(3)));
    SpinPolynomial::szsz(sym, 0, 1)
        .sub(&SpinPolynomial::unit(sym).scale(&rat(1, 4)))
        .scale_value(&c)
}

/// One mobile species: three-site table
/// `-(2t^4/U^3)(S^3_0 S^3_1 + S^3_1 S^3_2 - 2 S^3_0 S^3_2)`.
pub fn falicov_kimball_triple_table(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let c = over(t.pow(4).scale(&rat(-2, 1)), &u.pow(3));
    SpinPolynomial::szsz(sym, 0, 1)
        .add(&SpinPolynomial::szsz(sym, 1, 2))
        .sub(&SpinPolynomial::szsz(sym, 0, 2).scale(&rat(2, 1)))
        .scale_value(&c)
}

/// One mobile species: plaquette table as printed in the standard
/// regrouping, `-(2t^4/U^3) sum of the six S^3 S^3 pairs
/// + (40t^4/U^3) S^3 S^3 S^3 S^3`, carrying no constant.
pub fn falicov_kimball_plaquette_table(model: &Model) -> SpinPolynomial {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let cpair = over(t.pow(4).scale(&rat(-2, 1)), &u.pow(3));
    let cring = over(t.pow(4).scale(&rat(40, 1)), &u.pow(3));
    let mut pairs = SpinPolynomial::zero(sym);
    for [x, y] in [[0usize, 1], [1, 2], [2, 3], [0, 3], [0, 2], [1, 3]] {
        pairs = pairs.add(&SpinPolynomial::szsz(sym, x, y));
    }
    let ring = SpinPolynomial::szsz(sym, 0, 1).mul(&SpinPolynomial::szsz(sym, 2, 3));
    pairs
        .scale_value(&cpair)
        .add(&ring.scale_value(&cring))
}

/// Constant by which the derived plaquette term exceeds
/// `falicov_kimball_plaquette_table`: `t^4 / (2U^3)`.
pub fn falicov_kimball_plaquette_constant_shift(model: &Model) -> ScalarValue {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    over(t.pow(4).scale(&rat(1, 2)), &u.pow(3))
}

/// Coefficients of the diagonal interaction regrouped per lattice pair
/// class instead of per support.
#[derive(Debug, Clone)]
pub struct ClassicalCoefficients {
    /// Constant energy per site.
    pub constant: ScalarValue,
    /// Coefficient of `S^3` per site.
    pub field: ScalarValue,
    /// Coefficient of `S^3 S^3` per nearest-neighbor pair.
    pub nn: ScalarValue,
    /// Per straight distance-2 pair.
    pub dist2: ScalarValue,
    /// Per diagonal pair.
    pub diag: ScalarValue,
    /// Coefficient of `S^3 S^3 S^3 S^3` per plaquette.
    pub ring: ScalarValue,
}

/// Regroups the diagonal parts of per-support terms by pair class.
/// Multiplicities are square-lattice counts of supports containing a
/// fixed pair: a nearest-neighbor pair lies in 2 straight triples,
/// 4 bent triples and 2 plaquettes; a distance-2 pair in 1 straight
/// triple; a diagonal pair in 2 bent triples and 1 plaquette.  Per site
/// there are 2 bonds, 2 straight triples, 4 bent triples, 1 plaquette.
pub fn regroup_classical(terms: &OneBandTerms) -> ClassicalCoefficients {
    let onsite = terms.onsite.diagonal_part();
    let bond = terms.bond.diagonal_part();
    let triple = terms.triple.diagonal_part();
    let bent = terms.triple_bent.diagonal_part();
    let plaq = terms.plaquette.diagonal_part();

    let pair = |p: &SpinPolynomial, x: SiteId, y: SiteId| {
        p.coefficient(&SpinMonomial::new(vec![], vec![], vec![x, y]))
    };
    let konst = |p: &SpinPolynomial| p.coefficient(&SpinMonomial::identity());

    let triple_adj = pair(&triple, 0, 1);
    assert!(triple_adj.eq_value(&pair(&triple, 1, 2)));
    let bent_adj = pair(&bent, 0, 1);
    assert!(bent_adj.eq_value(&pair(&bent, 1, 2)));
    let plaq_adj = pair(&plaq, 0, 1);
    for [x, y] in [[1usize, 2], [2, 3], [0, 3]] {
        assert!(plaq_adj.eq_value(&pair(&plaq, x, y)));
    }
    let plaq_diag = pair(&plaq, 0, 2);
    assert!(plaq_diag.eq_value(&pair(&plaq, 1, 3)));

    let two = rat(2, 1);
    let four = rat(4, 1);

    let nn = pair(&bond, 0, 1)
        .add(&triple_adj.scale(&two))
        .add(&bent_adj.scale(&four))
        .add(&plaq_adj.scale(&two));
    let dist2 = pair(&triple, 0, 2);
    let diag = pair(&bent, 0, 2).scale(&two).add(&plaq_diag);
    let ring = plaq.coefficient(&SpinMonomial::new(vec![], vec![], vec![0, 1, 2, 3]));

    let constant = konst(&onsite)
        .add(&konst(&bond).scale(&two))
        .add(&konst(&triple).scale(&two))
        .add(&konst(&bent).scale(&four))
        .add(&konst(&plaq));
    let field = onsite.coefficient(&SpinMonomial::new(vec![], vec![], vec![0]));

    // Supports contribute no single-site S^3 beyond the on-site term.
    for p in [&bond, &triple, &bent, &plaq] {
        for (m, v) in p.terms() {
            if m.is_diagonal() && m.z().len() == 1 {
                assert!(v.is_zero(), "unexpected single-site term in {p}");
            }
        }
    }

    ClassicalCoefficients {
        constant,
        field,
        nn,
        dist2,
        diag,
        ring,
    }
}

/// Printed pair-class coefficients for the one-mobile-species model:
/// nn `2t^2/U - 18t^4/U^3`, distance-2 `4t^4/U^3`, diagonal `6t^4/U^3`,
/// four-spin `40t^4/U^3`, field `-h`.  The per-site constant differs
/// between regroupings and is not part of the comparison.
pub fn falicov_kimball_classical_reference(model: &Model) -> ClassicalCoefficients {
    let sym = model.symbols();
    let t = Poly::named(sym, "t");
    let u = Poly::named(sym, "U");
    let u3 = u.pow(3);
    ClassicalCoefficients {
        constant: ScalarValue::zero(sym),
        field: ScalarValue::named(sym, "h").neg(),
        nn: over(t.pow(2).scale(&rat(2, 1)), &u)
            .add(&over(t.pow(4).scale(&rat(-18, 1)), &u3)),
        dist2: over(t.pow(4).scale(&rat(4, 1)), &u3),
        diag: over(t.pow(4).scale(&rat(6, 1)), &u3),
        ring: over(t.pow(4).scale(&rat(40, 1)), &u3),
    }
}

/// Exchange between the two coppers of a shared-oxygen bond pair,
/// extracted from the charge-transfer model.
#[derive(Debug, Clone)]
pub struct CopperExchange {
    /// Coefficient of `S_x . S_z` between the copper sites.
    pub exchange: ScalarValue,
    /// Constant at hopping degree 2, a cluster total: edge oxygens miss
    /// their second copper and contribute with the bare charge-transfer
    /// gap.
    pub constant_deg2: ScalarValue,
    /// Constant at hopping degree 4, a cluster total.
    pub constant_deg4: ScalarValue,
    /// Full table for reporting.
    pub table: SpinPolynomial,
}

/// Derives the copper-copper exchange on the two-bond cluster.  The spin
/// coupling must be isotropic and free of single-site terms; both are
/// asserted.
pub fn copper_exchange(order: u32) -> Result<CopperExchange, EngineError> {
    let model = Model::three_band();
    let cluster = model.cluster(Shape::Cuo2TwoBonds);
    let d = derive(&model, &cluster, order, 2 * order)?;
    let table = express_in_spin_basis(&d);

    let band = cluster.band_sites();
    assert_eq!(band.len(), 2);
    let (x, z) = (band[0], band[1]);

    let zz = table.coefficient(&SpinMonomial::new(vec![], vec![], vec![x, z]));
    let up = table.coefficient(&SpinMonomial::new(vec![x], vec![z], vec![]));
    let dn = table.coefficient(&SpinMonomial::new(vec![z], vec![x], vec![]));
    let half_zz = zz.scale(&rat(1, 2));
    assert!(
        up.eq_value(&half_zz) && dn.eq_value(&half_zz),
        "copper exchange is not isotropic"
    );
    for s in [x, z] {
        assert!(
            table
                .coefficient(&SpinMonomial::new(vec![], vec![], vec![s]))
                .is_zero(),
            "unexpected single-site term on a copper"
        );
    }

    let constant = table.coefficient(&SpinMonomial::identity());
    Ok(CopperExchange {
        exchange: zz,
        constant_deg2: constant.hopping_component(2),
        constant_deg4: constant.hopping_component(4),
        table,
    })
}

/// Closed form of the copper-copper exchange constant:
/// `4 t_pd^4 / (U_pd + D)^2 * (1/U_d + 2/(2D + U_p))` with
/// `D = e_p - e_d`.
pub fn copper_exchange_reference(model: &Model) -> ScalarValue {
    let sym = model.symbols();
    let t = Poly::named(sym, "t_pd");
    let gap = Poly::named(sym, "U_pd")
        .add(&Poly::named(sym, "e_p"))
        .sub(&Poly::named(sym, "e_d"));
    let charge = Poly::named(sym, "e_p")
        .sub(&Poly::named(sym, "e_d"))
        .scale(&rat(2, 1))
        .add(&Poly::named(sym, "U_p"));
    let ud = Poly::named(sym, "U_d");

    let front = over(t.pow(4).scale(&rat(4, 1)), &gap)
        .div_classical(&gap)
        .expect("charge-transfer gap vanished");
    let via_copper = front.div_classical(&ud).expect("U_d vanished");
    let via_oxygen = front
        .scale(&rat(2, 1))
        .div_classical(&charge)
        .expect("oxygen charge gap vanished");
    via_copper.add(&via_oxygen)
}
