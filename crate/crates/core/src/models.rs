//! Lattice models and their graded projector families.
//!
//! Two families are implemented: the one-band model with spin-dependent
//! hopping amplitudes (whose symmetric point is the Hubbard model and whose
//! frozen-spin point is the Falicov-Kimball model), and the three-band
//! copper-oxide hole model with on-site and copper-oxygen repulsion.
//!
//! For each the strongly coupled reference state is a classical occupation
//! pattern: one particle per site in the one-band case, one hole per copper
//! and empty oxygens in the three-band case.  Ground projectors are products
//! of single-site indicators; each local support carries a protection zone
//! large enough that a single hop out of the ground pattern costs an energy
//! determined entirely inside the zone.

use crate::fock::{
    number, Mask, SectorBasis, SparseOperator, Spin, annihilate, create, operator_from_words,
    site_occupation,
};
use crate::lattice::{Bond, Cluster, LatticeKind, Shape, SiteId, Sublattice};
use crate::scalar::{Poly, ScalarValue, SymbolSet, Symbols};
use num::BigRational;

#[derive(Debug, Clone)]
enum Detail {
    /// Per-spin uniform hopping amplitudes.
    OneBand { amp: [Poly; 2] },
    /// Copper-oxygen hopping, same amplitude for both spins.
    ThreeBand,
}

#[derive(Debug, Clone)]
pub struct Model {
    sym: Symbols,
    lattice: LatticeKind,
    detail: Detail,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl Model {
    /// One-band model with independent amplitudes for the two spin species.
    pub fn one_band_general() -> Model {
        let sym = SymbolSet::new(&["t_up", "t_dn", "U", "h", "k"], &["t_up", "t_dn"]);
        let amp = [Poly::named(&sym, "t_up"), Poly::named(&sym, "t_dn")];
        Model {
            sym,
            lattice: LatticeKind::OneBand,
            detail: Detail::OneBand { amp },
        }
    }

    /// Hubbard point: both species hop with the same amplitude.
    pub fn one_band_symmetric() -> Model {
        let sym = SymbolSet::new(&["t", "U", "h", "k"], &["t"]);
        let t = Poly::named(&sym, "t");
        Model {
            sym,
            lattice: LatticeKind::OneBand,
            detail: Detail::OneBand {
                amp: [t.clone(), t],
            },
        }
    }

    /// Falicov-Kimball point: the up species is frozen.
    pub fn falicov_kimball() -> Model {
        let sym = SymbolSet::new(&["t", "U", "h", "k"], &["t"]);
        Model {
            sym: sym.clone(),
            lattice: LatticeKind::OneBand,
            detail: Detail::OneBand {
                amp: [Poly::zero(&sym), Poly::named(&sym, "t")],
            },
        }
    }

    /// Three-band copper-oxide hole model.
    pub fn three_band() -> Model {
        let sym = SymbolSet::new(
            &["t_pd", "U_d", "U_p", "U_pd", "e_d", "e_p"],
            &["t_pd"],
        );
        Model {
            sym,
            lattice: LatticeKind::CuO2,
            detail: Detail::ThreeBand,
        }
    }

    pub fn symbols(&self) -> &Symbols {
        &self.sym
    }

    pub fn lattice(&self) -> LatticeKind {
        self.lattice
    }

    pub fn cluster(&self, shape: Shape) -> Cluster {
        let c = Cluster::build(shape);
        assert_eq!(c.kind, self.lattice, "cluster geometry does not match model");
        c
    }

    /// Hopping amplitude for one spin species, as a polynomial.
    pub fn amplitude(&self, spin: Spin) -> Poly {
        match &self.detail {
            Detail::OneBand { amp } => amp[spin.idx()].clone(),
            Detail::ThreeBand => Poly::named(&self.sym, "t_pd"),
        }
    }

    /// Particle number of the reference pattern at one site.
    pub fn ground_occupation(&self, sub: Sublattice) -> u32 {
        match self.lattice {
            LatticeKind::OneBand => 1,
            LatticeKind::CuO2 => match sub {
                Sublattice::A => 1,
                Sublattice::B => 0,
            },
        }
    }

    pub fn site_is_ground(&self, cluster: &Cluster, mask: Mask, site: SiteId) -> bool {
        site_occupation(mask, site) == self.ground_occupation(cluster.sublattice(site))
    }

    pub fn all_ground(&self, cluster: &Cluster, mask: Mask, sites: &[SiteId]) -> bool {
        sites.iter().all(|&s| self.site_is_ground(cluster, mask, s))
    }

    /// Reference-sector particle number for a cluster.
    pub fn ground_particle_number(&self, cluster: &Cluster) -> u32 {
        (0..cluster.n_sites())
            .map(|s| self.ground_occupation(cluster.sublattice(s)))
            .sum()
    }

    /// Classical energy of one occupation pattern.
    pub fn classical_energy(&self, cluster: &Cluster, mask: Mask) -> Poly {
        let sym = &self.sym;
        let mut e = Poly::zero(sym);
        match &self.detail {
            Detail::OneBand { .. } => {
                let u = Poly::named(sym, "U");
                let h = Poly::named(sym, "h");
                let k = Poly::named(sym, "k");
                for s in 0..cluster.n_sites() {
                    let up = crate::fock::occupied(mask, s, Spin::Up);
                    let dn = crate::fock::occupied(mask, s, Spin::Down);
                    if up && dn {
                        e = e.add(&u);
                    }
                    if up {
                        e = e.sub(&h.add(&k).scale(&half()));
                    }
                    if dn {
                        e = e.sub(&k.sub(&h).scale(&half()));
                    }
                }
            }
            Detail::ThreeBand => {
                let ud = Poly::named(sym, "U_d");
                let upp = Poly::named(sym, "U_p");
                let updr = Poly::named(sym, "U_pd");
                let ed = Poly::named(sym, "e_d");
                let ep = Poly::named(sym, "e_p");
                for s in 0..cluster.n_sites() {
                    let n = site_occupation(mask, s) as i64;
                    let double = n == 2;
                    match cluster.sublattice(s) {
                        Sublattice::A => {
                            if double {
                                e = e.add(&ud);
                            }
                            e = e.add(&ed.scale(&BigRational::from_integer((n - 1).into())));
                        }
                        Sublattice::B => {
                            if double {
                                e = e.add(&upp);
                            }
                            e = e.add(&ep.scale(&BigRational::from_integer(n.into())));
                        }
                    }
                }
                for b in cluster.bonds() {
                    let prod = site_occupation(mask, b.a) as i64 * site_occupation(mask, b.b) as i64;
                    if prod != 0 {
                        e = e.add(&updr.scale(&BigRational::from_integer(prod.into())));
                    }
                }
            }
        }
        e
    }

    pub fn classical_diagonal(&self, cluster: &Cluster, basis: &SectorBasis) -> Vec<Poly> {
        basis
            .states()
            .iter()
            .map(|&m| self.classical_energy(cluster, m))
            .collect()
    }

    /// Hopping on a single bond: both directions, both spins.
    pub fn bond_hopping(&self, basis: &SectorBasis, bond: &Bond) -> SparseOperator {
        let mut words = Vec::new();
        for spin in Spin::BOTH {
            let amp = ScalarValue::from_poly(self.amplitude(spin));
            if amp.is_zero() {
                continue;
            }
            words.push((
                vec![create(bond.a, spin), annihilate(bond.b, spin)],
                amp.clone(),
            ));
            words.push((vec![create(bond.b, spin), annihilate(bond.a, spin)], amp));
        }
        operator_from_words(&self.sym, basis, basis, &words)
    }

    /// Total hopping operator of the cluster.
    pub fn hopping_operator(&self, cluster: &Cluster, basis: &SectorBasis) -> SparseOperator {
        let mut q = SparseOperator::zero(&self.sym, basis.dim(), basis.dim());
        for b in cluster.bonds() {
            q = q.add(&self.bond_hopping(basis, b));
        }
        q
    }

    pub fn hamiltonian(&self, cluster: &Cluster, basis: &SectorBasis) -> SparseOperator {
        SparseOperator::from_diagonal(&self.sym, &self.classical_diagonal(cluster, basis))
            .add(&self.hopping_operator(cluster, basis))
    }

    /// Sites whose occupation can change the classical cost of an excitation
    /// supported on `support`: the support plus, for the three-band model,
    /// its lattice neighbors.
    pub fn protection_zone(&self, cluster: &Cluster, support: &[SiteId]) -> Vec<SiteId> {
        let mut zone: Vec<SiteId> = support.to_vec();
        if self.lattice == LatticeKind::CuO2 {
            for &s in support {
                for n in cluster.neighbors(s) {
                    zone.push(n);
                }
            }
        }
        zone.sort_unstable();
        zone.dedup();
        zone
    }

    /// Product of single-site ground indicators over `sites`.
    pub fn ground_projector(
        &self,
        cluster: &Cluster,
        basis: &SectorBasis,
        sites: &[SiteId],
    ) -> SparseOperator {
        SparseOperator::projector(&self.sym, basis, |m| self.all_ground(cluster, m, sites))
    }

    /// Graded projector attached to a support through its protection zone:
    /// level 0 keeps the zone in the reference pattern, level 1 confines the
    /// excitation to the support, level 2 lets it touch the rest of the zone.
    pub fn projector_for(
        &self,
        cluster: &Cluster,
        basis: &SectorBasis,
        support: &[SiteId],
        level: u8,
    ) -> SparseOperator {
        let zone = self.protection_zone(cluster, support);
        let halo: Vec<SiteId> = zone
            .iter()
            .copied()
            .filter(|s| !support.contains(s))
            .collect();
        match level {
            0 => self.ground_projector(cluster, basis, &zone),
            1 => self
                .ground_projector(cluster, basis, &halo)
                .sub(&self.ground_projector(cluster, basis, &zone)),
            2 => SparseOperator::identity(&self.sym, basis.dim())
                .sub(&self.ground_projector(cluster, basis, &halo)),
            _ => panic!("projector level out of range"),
        }
    }

    /// Ground projector of the whole cluster.
    pub fn global_ground(&self, cluster: &Cluster, basis: &SectorBasis) -> SparseOperator {
        let all: Vec<SiteId> = (0..cluster.n_sites()).collect();
        self.ground_projector(cluster, basis, &all)
    }
}

/// Outcome of one exact operator identity check.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub shape: Shape,
    pub holds: bool,
}

/// Runs the exact identity suite for the one-band model on one cluster.
///
/// Every check is an operator equality over the exact coefficient field; a
/// single mismatched entry fails it.
pub fn identity_suite(model: &Model, shape: Shape) -> Vec<IdentityCheck> {
    let sym = model.symbols().clone();
    let cluster = model.cluster(shape);
    let n = cluster.n_sites();
    let mut out = Vec::new();
    let mut record = |name: &'static str, holds: bool| {
        out.push(IdentityCheck {
            name,
            shape,
            holds,
        });
    };

    let sector = |total: u32| SectorBasis::new(&cluster, crate::fock::SectorRule::Total(total));

    // Family orthogonality: the three graded projectors of any support are
    // idempotent, mutually orthogonal, and resolve the identity.
    {
        let basis = sector(model.ground_particle_number(&cluster));
        let mut holds = true;
        let supports: Vec<Vec<SiteId>> = vec![vec![0], (0..n.min(2)).collect()];
        for support in &supports {
            let ps: Vec<SparseOperator> = (0..3)
                .map(|l| model.projector_for(&cluster, &basis, support, l))
                .collect();
            let mut sum = SparseOperator::zero(&sym, basis.dim(), basis.dim());
            for (i, pi) in ps.iter().enumerate() {
                sum = sum.add(pi);
                for (j, pj) in ps.iter().enumerate() {
                    let prod = pi.mul(pj);
                    let expect = if i == j {
                        pj.clone()
                    } else {
                        SparseOperator::zero(&sym, basis.dim(), basis.dim())
                    };
                    holds &= prod.is_same(&expect);
                }
            }
            holds &= sum.is_same(&SparseOperator::identity(&sym, basis.dim()));
        }
        record("graded_projectors_resolve_identity", holds);
    }

    // Nested supports: the bigger ground projector absorbs the smaller; the
    // smaller excitation projector absorbs the bigger.
    {
        let basis = sector(model.ground_particle_number(&cluster));
        let small: Vec<SiteId> = vec![0];
        let big: Vec<SiteId> = (0..n.min(2)).collect();
        let p0s = model.projector_for(&cluster, &basis, &small, 0);
        let p0b = model.projector_for(&cluster, &basis, &big, 0);
        let p1s = model.projector_for(&cluster, &basis, &small, 1);
        let p1b = model.projector_for(&cluster, &basis, &big, 1);
        let holds = p0s.mul(&p0b).is_same(&p0b) && p1s.mul(&p1b).is_same(&p1s);
        record("nested_supports_absorb", holds);
    }

    // Excitation projector of a support is the complement of the product of
    // its single-site ground projectors.
    {
        let basis = sector(model.ground_particle_number(&cluster));
        let support: Vec<SiteId> = (0..n).collect();
        let p1 = model.projector_for(&cluster, &basis, &support, 1);
        let mut prod = SparseOperator::identity(&sym, basis.dim());
        for s in 0..n {
            prod = prod.mul(&model.ground_projector(&cluster, &basis, &[s]));
        }
        let complement = SparseOperator::identity(&sym, basis.dim()).sub(&prod);
        record("excitation_is_complement_of_ground", p1.is_same(&complement));
    }

    // Ladder operators swap the ground and excited levels of their site:
    // c P0 = P1 c, c P1 = P0 c, and the adjoint pair.
    {
        let mut holds = true;
        for total in 1..=(2 * n as u32) {
            let basis = sector(total);
            let lower = sector(total - 1);
            for x in 0..n {
                let p0_hi = model.projector_for(&cluster, &basis, &[x], 0);
                let p1_hi = model.projector_for(&cluster, &basis, &[x], 1);
                let p0_lo = model.projector_for(&cluster, &lower, &[x], 0);
                let p1_lo = model.projector_for(&cluster, &lower, &[x], 1);
                for spin in Spin::BOTH {
                    let c = operator_from_words(
                        &sym,
                        &basis,
                        &lower,
                        &[(vec![annihilate(x, spin)], ScalarValue::one(&sym))],
                    );
                    holds &= c.mul(&p0_hi).is_same(&p1_lo.mul(&c));
                    holds &= c.mul(&p1_hi).is_same(&p0_lo.mul(&c));
                    let cd = c.adjoint();
                    holds &= cd.mul(&p0_lo).is_same(&p1_hi.mul(&cd));
                    holds &= cd.mul(&p1_lo).is_same(&p0_hi.mul(&cd));
                }
            }
        }
        record("ladders_swap_projector_levels", holds);
    }

    // On a singly occupied site the two spin occupations are complementary.
    {
        let basis = sector(model.ground_particle_number(&cluster));
        let mut holds = true;
        for x in 0..n.min(2) {
            let p0 = model.projector_for(&cluster, &basis, &[x], 0);
            for spin in Spin::BOTH {
                let nn = number(&sym, &basis, x, spin);
                let comp = SparseOperator::identity(&sym, basis.dim())
                    .sub(&number(&sym, &basis, x, spin.flip()));
                holds &= p0.mul(&nn).mul(&p0).is_same(&p0.mul(&comp).mul(&p0));
                // The sandwich is redundant on the right factor.
                holds &= nn.mul(&p0).is_same(&comp.mul(&p0));
            }
            let total = number(&sym, &basis, x, Spin::Up).add(&number(&sym, &basis, x, Spin::Down));
            holds &= p0.mul(&total).mul(&p0).is_same(&p0);
        }
        record("single_occupancy_balances_spins", holds);
    }

    // On the excited level of a site, each spin occupation is half the total.
    {
        let mut holds = true;
        for total in 0..=(2 * n as u32) {
            let basis = sector(total);
            for x in 0..n.min(2) {
                let p1 = model.projector_for(&cluster, &basis, &[x], 1);
                let tot = number(&sym, &basis, x, Spin::Up)
                    .add(&number(&sym, &basis, x, Spin::Down));
                for spin in Spin::BOTH {
                    let lhs = number(&sym, &basis, x, spin).mul(&p1);
                    let rhs = tot.scale(&half()).mul(&p1);
                    holds &= lhs.is_same(&rhs);
                }
            }
        }
        record("excited_site_is_spin_symmetric", holds);
    }

    // Double creation on a singly occupied site and spin flips on an excited
    // site are annihilated exactly.
    {
        let mut holds = true;
        let basis = sector(model.ground_particle_number(&cluster));
        for x in 0..n.min(2) {
            let p0 = model.projector_for(&cluster, &basis, &[x], 0);
            let p1 = model.projector_for(&cluster, &basis, &[x], 1);
            for spin in Spin::BOTH {
                let double = operator_from_words(
                    &sym,
                    &basis,
                    &sector(model.ground_particle_number(&cluster) + 2),
                    &[(
                        vec![create(x, spin), create(x, spin.flip())],
                        ScalarValue::one(&sym),
                    )],
                );
                holds &= double.mul(&p0).is_zero();
                let flip = operator_from_words(
                    &sym,
                    &basis,
                    &basis,
                    &[(
                        vec![create(x, spin), annihilate(x, spin.flip())],
                        ScalarValue::one(&sym),
                    )],
                );
                holds &= flip.mul(&p1).is_zero();
            }
        }
        record("blocked_moves_vanish", holds);
    }

    // Exchange bookkeeping on a ground bond: "sigma here, not sigma there"
    // equals "opposite spin there, opposite spin not here".
    if n >= 2 {
        let basis = sector(model.ground_particle_number(&cluster));
        let p0 = model.projector_for(&cluster, &basis, &[0, 1], 0);
        let id = SparseOperator::identity(&sym, basis.dim());
        let mut holds = true;
        for spin in Spin::BOTH {
            let lhs = number(&sym, &basis, 1, spin)
                .mul(&id.sub(&number(&sym, &basis, 0, spin)));
            let rhs = id
                .sub(&number(&sym, &basis, 1, spin.flip()))
                .mul(&number(&sym, &basis, 0, spin.flip()));
            holds &= p0.mul(&lhs).mul(&p0).is_same(&p0.mul(&rhs).mul(&p0));
        }
        record("exchange_counts_match", holds);
    }

    // Antiparallel pair counting in spin language on a ground bond.
    if n >= 2 {
        let basis = sector(model.ground_particle_number(&cluster));
        let p0 = model.projector_for(&cluster, &basis, &[0, 1], 0);
        let anti = number(&sym, &basis, 0, Spin::Up)
            .mul(&number(&sym, &basis, 1, Spin::Down))
            .add(&number(&sym, &basis, 0, Spin::Down).mul(&number(&sym, &basis, 1, Spin::Up)));
        let szsz = crate::fock::sz(&sym, &basis, 0).mul(&crate::fock::sz(&sym, &basis, 1));
        let rhs = szsz
            .scale(&BigRational::from_integer((-2).into()))
            .add(&SparseOperator::identity(&sym, basis.dim()).scale(&half()));
        let holds = p0.mul(&anti).mul(&p0).is_same(&p0.mul(&rhs).mul(&p0));
        record("antiparallel_pairs_in_spin_language", holds);
    }

    out
}
