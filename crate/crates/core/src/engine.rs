//! Iterative block diagonalization of cluster Hamiltonians.
//!
//! The Hamiltonian is a classical diagonal plus a hopping perturbation.  Each
//! step conjugates by `exp(S_n)` where `S_n` kills the part of the current
//! degree-`n` interaction that connects reference states to excited ones; the
//! generator is obtained by dividing matrix elements by their classical
//! energy differences, which is well defined exactly because protection
//! zones make those differences nonzero on the rotated block.
//!
//! The first step resolves levels per bond through the bond's own projector
//! family, so excited spectators elsewhere in the cluster ride along; this is
//! what produces ring-exchange processes with two simultaneous excitations.
//! Later steps split against the global ground block; for the ground-block
//! interactions up to degree `2*order` the two splittings agree.
//!
//! Everything is graded by total hopping degree and truncated exactly, so
//! the output is a polynomial family with no remainder terms.

use crate::fock::{Mask, SectorBasis, SectorRule, SparseOperator};
use crate::lattice::Cluster;
use crate::models::Model;
use crate::scalar::{Poly, ScalarError, ScalarValue};
use num::BigRational;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(
        "degenerate classical energies between configurations {row:#b} and {col:#b}; \
         no generator exists for this matrix element"
    )]
    ZeroDenominator { row: Mask, col: Mask },
}

/// Splits an operator against a diagonal 0/1 projector into its
/// block-diagonal and block-off-diagonal parts.  The two parts sum back to
/// the operator exactly.
pub fn block_split(op: &SparseOperator, p: &SparseOperator) -> (SparseOperator, SparseOperator) {
    let members: HashSet<u32> = p
        .entries()
        .map(|(&(r, c), v)| {
            debug_assert_eq!(r, c, "projector must be diagonal");
            debug_assert!(v.eq_value(&ScalarValue::one(op.symbols())));
            r
        })
        .collect();
    let sym = op.symbols().clone();
    let mut diag = SparseOperator::zero(&sym, op.rows, op.cols);
    let mut off = SparseOperator::zero(&sym, op.rows, op.cols);
    for (&(r, c), v) in op.entries() {
        if members.contains(&r) == members.contains(&c) {
            diag.set(r, c, v.clone());
        } else {
            off.set(r, c, v.clone());
        }
    }
    debug_assert!(diag.add(&off).is_same(op));
    (diag, off)
}

/// Entrywise division by classical energy differences: the unique `S` with
/// `[S, H0] = -op` when `op` has no entries inside a degenerate level.
///
/// With `unit_gap` set, every divisor must be a nonzero constant multiple of
/// that polynomial (the one-band models only ever divide by multiples of the
/// on-site repulsion).
pub fn ad_inverse(
    h0: &[Poly],
    basis: &SectorBasis,
    op: &SparseOperator,
    unit_gap: Option<&Poly>,
) -> Result<SparseOperator, EngineError> {
    let sym = op.symbols().clone();
    let mut out = SparseOperator::zero(&sym, op.rows, op.cols);
    for (&(r, c), v) in op.entries() {
        let gap = h0[r as usize].sub(&h0[c as usize]);
        debug_assert!(gap.is_hopping_free());
        if let Some(unit) = unit_gap {
            let q = gap.exact_div(unit);
            assert!(
                q.as_ref().is_some_and(|q| q.is_constant() && !q.is_zero()),
                "classical gap {gap} is not a multiple of {unit}"
            );
        }
        let s = v.div_classical(&gap).map_err(|e| match e {
            ScalarError::DivisionByZero => EngineError::ZeroDenominator {
                row: basis.mask(r),
                col: basis.mask(c),
            },
            other => panic!("classical energies must stay classical: {other}"),
        })?;
        out.set(r, c, s);
    }
    Ok(out)
}

/// Truncated conjugation `exp(S) H exp(-S)`, graded by hopping degree.
///
/// Terminates because each commutator with `S` raises the minimum degree.
pub fn lie_schwinger(h: &SparseOperator, s: &SparseOperator, max_degree: u32) -> SparseOperator {
    assert!(
        s.min_hopping_degree().map_or(true, |d| d >= 1),
        "generator must be perturbative"
    );
    let mut acc = h.truncate_hopping(max_degree);
    let mut term = acc.clone();
    let mut k: u64 = 1;
    loop {
        term = s
            .commutator(&term)
            .truncate_hopping(max_degree)
            .scale(&BigRational::new(1.into(), k.into()));
        if term.is_zero() {
            return acc;
        }
        acc = acc.add(&term);
        k += 1;
    }
}

/// Result of running the diagonalization to a fixed order on one cluster.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub model: Model,
    pub cluster: Cluster,
    pub basis: SectorBasis,
    pub order: u32,
    pub max_degree: u32,
    pub h0: Vec<Poly>,
    /// Global ground projector of the sector (may be zero away from the
    /// reference sector).
    pub p0: SparseOperator,
    /// One generator per step.
    pub generators: Vec<SparseOperator>,
    /// The conjugated Hamiltonian, truncated to `max_degree`.
    pub conjugated: SparseOperator,
}

/// The off-diagonal part of a single bond's hopping with respect to the
/// bond's own projector family.  A hop changes occupations only on the bond,
/// so it never couples to excitations of the zone's halo; this is asserted.
fn bond_level_mixing(
    model: &Model,
    cluster: &Cluster,
    basis: &SectorBasis,
    bond: &crate::lattice::Bond,
) -> SparseOperator {
    let support = [bond.a, bond.b];
    let q = model.bond_hopping(basis, bond);
    let p0 = model.projector_for(cluster, basis, &support, 0);
    let p1 = model.projector_for(cluster, basis, &support, 1);
    let p2 = model.projector_for(cluster, basis, &support, 2);
    debug_assert!(p2.mul(&q).mul(&p0).is_zero() && p0.mul(&q).mul(&p2).is_zero());
    p0.mul(&q).mul(&p1).add(&p1.mul(&q).mul(&p0))
}

pub fn derive_in_sector(
    model: &Model,
    cluster: &Cluster,
    basis: SectorBasis,
    order: u32,
    max_degree: u32,
) -> Result<Derivation, EngineError> {
    assert!((1..=2).contains(&order), "orders beyond two are not derived");
    assert!(max_degree >= 2 * order);
    let sym = model.symbols().clone();
    let h0 = model.classical_diagonal(cluster, &basis);
    let unit = match model.lattice() {
        crate::lattice::LatticeKind::OneBand => Some(Poly::named(&sym, "U")),
        crate::lattice::LatticeKind::CuO2 => None,
    };
    let h = SparseOperator::from_diagonal(&sym, &h0)
        .add(&model.hopping_operator(cluster, &basis));
    let p0 = model.global_ground(cluster, &basis);

    let mut s1 = SparseOperator::zero(&sym, basis.dim(), basis.dim());
    for bond in cluster.bonds() {
        let mixing = bond_level_mixing(model, cluster, &basis, bond);
        s1 = s1.add(&ad_inverse(&h0, &basis, &mixing, unit.as_ref())?);
    }
    let mut conjugated = lie_schwinger(&h, &s1, max_degree);
    let mut generators = vec![s1];

    if order >= 2 {
        let w2 = conjugated.hopping_component(2);
        let (_, off) = block_split(&w2, &p0);
        let s2 = ad_inverse(&h0, &basis, &off, unit.as_ref())?;
        conjugated = lie_schwinger(&conjugated, &s2, max_degree);
        generators.push(s2);
    }

    Ok(Derivation {
        model: model.clone(),
        cluster: cluster.clone(),
        basis,
        order,
        max_degree,
        h0,
        p0,
        generators,
        conjugated,
    })
}

/// Runs the diagonalization in the reference particle-number sector.
pub fn derive(
    model: &Model,
    cluster: &Cluster,
    order: u32,
    max_degree: u32,
) -> Result<Derivation, EngineError> {
    let basis = SectorBasis::new(
        cluster,
        SectorRule::Total(model.ground_particle_number(cluster)),
    );
    derive_in_sector(model, cluster, basis, order, max_degree)
}

pub fn first_order(model: &Model, cluster: &Cluster) -> Result<Derivation, EngineError> {
    derive(model, cluster, 1, 4)
}

pub fn second_order(model: &Model, cluster: &Cluster) -> Result<Derivation, EngineError> {
    derive(model, cluster, 2, 6)
}

impl Derivation {
    /// Effective interaction on the ground block, truncated to the derived
    /// order.
    pub fn ground_block(&self) -> SparseOperator {
        self.ground_block_to(2 * self.order)
    }

    /// Ground block truncated at an explicit hopping degree.  Degrees above
    /// `2 * order` pick up contributions the next conjugation step would
    /// still reshuffle.
    pub fn ground_block_to(&self, degree: u32) -> SparseOperator {
        self.p0
            .mul(&self.conjugated)
            .mul(&self.p0)
            .truncate_hopping(degree)
    }

    /// Part of the conjugated Hamiltonian still connecting the ground block
    /// to excited states.
    pub fn residual(&self) -> SparseOperator {
        block_split(&self.conjugated, &self.p0).1
    }

    pub fn grading_report(&self) -> GradingReport {
        let residual = self.residual();
        let min_degree = residual.min_hopping_degree();
        let required = self.order + 1;
        GradingReport {
            order: self.order,
            max_degree: self.max_degree,
            min_residual_degree: min_degree,
            required,
            ok: min_degree.map_or(true, |d| d >= required),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GradingReport {
    pub order: u32,
    pub max_degree: u32,
    /// `None` when the residual vanishes identically.
    pub min_residual_degree: Option<u32>,
    pub required: u32,
    pub ok: bool,
}

/// After the first step, cross terms between a bond's generator and the
/// level mixing of a distinct adjacent bond do not touch the ground block;
/// first-order interactions are therefore single-bond sums.
pub fn adjacent_bond_cross_terms_vanish(
    model: &Model,
    cluster: &Cluster,
) -> Result<bool, EngineError> {
    let basis = SectorBasis::new(
        cluster,
        SectorRule::Total(model.ground_particle_number(cluster)),
    );
    let h0 = model.classical_diagonal(cluster, &basis);
    let unit = match model.lattice() {
        crate::lattice::LatticeKind::OneBand => Some(Poly::named(model.symbols(), "U")),
        crate::lattice::LatticeKind::CuO2 => None,
    };
    let p0 = model.global_ground(cluster, &basis);
    for x in cluster.bonds() {
        for y in cluster.bonds() {
            if x == y || (x.a != y.a && x.a != y.b && x.b != y.a && x.b != y.b) {
                continue;
            }
            let s_x = ad_inverse(
                &h0,
                &basis,
                &bond_level_mixing(model, cluster, &basis, x),
                unit.as_ref(),
            )?;
            let q_y = bond_level_mixing(model, cluster, &basis, y);
            let cross = p0.mul(&s_x.commutator(&q_y)).mul(&p0);
            if !cross.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Shape;

    #[test]
    fn ad_inverse_divides_by_gaps() {
        let model = Model::one_band_symmetric();
        let cluster = model.cluster(Shape::Bond);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(2));
        let h0 = model.classical_diagonal(&cluster, &basis);
        let q = model.hopping_operator(&cluster, &basis);
        let u = Poly::named(model.symbols(), "U");
        // The full bond hopping only connects singles to double+hole pairs,
        // so it is entirely off-diagonal and invertible.
        let s = ad_inverse(&h0, &basis, &q, Some(&u)).unwrap();
        // [S, H0] = -Q.
        let h0_op = SparseOperator::from_diagonal(model.symbols(), &h0);
        assert!(s.commutator(&h0_op).is_same(&q.neg()));
        // Antisymmetric generator.
        assert!(s.add(&s.adjoint()).is_zero());
    }

    #[test]
    fn ad_inverse_rejects_degenerate_pairs() {
        let model = Model::one_band_symmetric();
        let cluster = model.cluster(Shape::Chain3);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(3));
        let h0 = model.classical_diagonal(&cluster, &basis);
        // Two hops move a double occupation between sites 0 and 2 at zero
        // classical cost; dividing by that gap must fail loudly.
        let q = model.hopping_operator(&cluster, &basis);
        let two_hop = q.mul(&q);
        let err = ad_inverse(&h0, &basis, &two_hop, None);
        assert!(matches!(err, Err(EngineError::ZeroDenominator { .. })));
    }

    #[test]
    fn first_step_removes_ground_level_mixing() {
        for model in [
            Model::one_band_general(),
            Model::one_band_symmetric(),
            Model::falicov_kimball(),
        ] {
            for shape in [Shape::Bond, Shape::Chain3] {
                let cluster = model.cluster(shape);
                let d = first_order(&model, &cluster).unwrap();
                let report = d.grading_report();
                assert!(report.ok, "grading failed: {report:?}");
                assert!(report.min_residual_degree.unwrap() >= 2);
            }
        }
    }

    #[test]
    fn second_step_grading_on_small_clusters() {
        let model = Model::one_band_symmetric();
        for shape in [Shape::Bond, Shape::Chain3] {
            let cluster = model.cluster(shape);
            let d = second_order(&model, &cluster).unwrap();
            let report = d.grading_report();
            assert!(report.ok, "grading failed: {report:?}");
            assert!(report.min_residual_degree.unwrap() >= 3);
        }
    }

    #[test]
    fn generators_are_antisymmetric() {
        let model = Model::one_band_symmetric();
        let cluster = model.cluster(Shape::Chain3);
        let d = second_order(&model, &cluster).unwrap();
        for s in &d.generators {
            assert!(s.add(&s.adjoint()).is_zero());
        }
    }

    #[test]
    fn odd_degrees_vanish_on_the_ground_block() {
        let model = Model::one_band_general();
        let cluster = model.cluster(Shape::Chain3);
        let d = second_order(&model, &cluster).unwrap();
        for deg in [1, 3, 5] {
            let part = d.p0.mul(&d.conjugated.hopping_component(deg)).mul(&d.p0);
            assert!(part.is_zero(), "degree {deg} survives on the ground block");
        }
    }

    #[test]
    fn cross_terms_between_adjacent_bonds_vanish() {
        for model in [Model::one_band_general(), Model::falicov_kimball()] {
            for shape in [Shape::Chain3, Shape::Plaquette] {
                let cluster = model.cluster(shape);
                assert!(adjacent_bond_cross_terms_vanish(&model, &cluster).unwrap());
            }
        }
        let three = Model::three_band();
        let cluster = three.cluster(Shape::Cuo2Bond);
        assert!(adjacent_bond_cross_terms_vanish(&three, &cluster).unwrap());
    }

    #[test]
    fn three_band_generator_divides_by_the_constant_gap() {
        let model = Model::three_band();
        let cluster = model.cluster(Shape::Cuo2Bond);
        let basis = SectorBasis::new(&cluster, SectorRule::Total(2));
        let h0 = model.classical_diagonal(&cluster, &basis);
        let sym = model.symbols();
        let e1 = Poly::named(sym, "U_pd")
            .add(&Poly::named(sym, "e_p"))
            .sub(&Poly::named(sym, "e_d"));
        // On the central bond, the generator is exactly the level mixing
        // divided by the protection gap.
        let central = cluster
            .bonds()
            .iter()
            .find(|b| {
                let (ca, cb) = (cluster.coord(b.a), cluster.coord(b.b));
                (ca == (0, 0) && cb == (1, 0)) || (ca == (1, 0) && cb == (0, 0))
            })
            .unwrap();
        let mixing = bond_level_mixing(&model, &cluster, &basis, central);
        let s = ad_inverse(&h0, &basis, &mixing, None).unwrap();
        let mut expected = SparseOperator::zero(sym, basis.dim(), basis.dim());
        let p0 = model.projector_for(&cluster, &basis, &[central.a, central.b], 0);
        let p1 = model.projector_for(&cluster, &basis, &[central.a, central.b], 1);
        let up = p1.mul(&mixing).mul(&p0);
        let down = p0.mul(&mixing).mul(&p1);
        for (&(r, c), v) in up.entries() {
            expected.set(r, c, v.div_classical(&e1).unwrap());
        }
        for (&(r, c), v) in down.entries() {
            expected.set(r, c, v.div_classical(&e1).unwrap().neg());
        }
        assert!(s.is_same(&expected));
    }
}
