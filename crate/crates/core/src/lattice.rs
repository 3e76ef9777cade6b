//! Finite clusters of the square lattice.
//!
//! Effective interactions are derived per support on the smallest cluster
//! containing the support's protection zone, so all computations here run on
//! clusters of a handful of sites.  Sites carry integer coordinates; the
//! one-band clusters live on the full square lattice, while the copper-oxide
//! clusters place copper at even-even coordinates and oxygen on the bond
//! midpoints (odd coordinate sum).
//!
//! Fermionic signs require a total order on sites.  We use the rank along the
//! counterclockwise square spiral anchored at the origin, so any two clusters
//! embedded in the lattice order their shared sites consistently.  Physical
//! results cannot depend on this choice; tests permute the order and compare.

use std::fmt;

pub type Coord = (i32, i32);
pub type SiteId = usize;

/// Sublattice label: `A` hosts the low-energy spins (copper in the three-band
/// model, every site in the one-band model on the even checkerboard), `B` is
/// the complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// One orbital per site, every integer point may be occupied.
    OneBand,
    /// Copper-oxide plane: copper at even-even points, oxygen at odd-sum
    /// points, no site at odd-odd points.
    CuO2,
}

/// Nearest-neighbor pair, stored once with `a < b` in site order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: SiteId,
    pub b: SiteId,
    /// Lattice vector from `a` to `b`, one of (±1,0), (0,±1).
    pub delta: (i32, i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Bond,
    Chain3,
    /// Three sites around a corner; the ends are diagonal neighbors.
    Corner3,
    Plaquette,
    ChainN(usize),
    Cuo2Bond,
    Cuo2TwoBonds,
}

impl Shape {
    pub fn parse(s: &str) -> Option<Shape> {
        match s {
            "bond" => Some(Shape::Bond),
            "chain3" => Some(Shape::Chain3),
            "corner3" => Some(Shape::Corner3),
            "plaquette" => Some(Shape::Plaquette),
            "cuo2-bond" => Some(Shape::Cuo2Bond),
            "cuo2-two-bonds" => Some(Shape::Cuo2TwoBonds),
            _ => {
                let n = s.strip_prefix("chain")?.parse::<usize>().ok()?;
                if n >= 2 {
                    Some(Shape::ChainN(n))
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Bond => write!(f, "bond"),
            Shape::Chain3 => write!(f, "chain3"),
            Shape::Corner3 => write!(f, "corner3"),
            Shape::Plaquette => write!(f, "plaquette"),
            Shape::ChainN(n) => write!(f, "chain{n}"),
            Shape::Cuo2Bond => write!(f, "cuo2-bond"),
            Shape::Cuo2TwoBonds => write!(f, "cuo2-two-bonds"),
        }
    }
}

/// Rank along the counterclockwise square spiral: (0,0), (1,0), (1,1), (0,1),
/// (-1,1), (-1,0), (-1,-1), (0,-1), (1,-1), (2,-1), ...
pub fn spiral_rank(c: Coord) -> u64 {
    let (x, y) = (i64::from(c.0), i64::from(c.1));
    let r = x.abs().max(y.abs());
    if r == 0 {
        return 0;
    }
    let base = (2 * r - 1).pow(2) as u64;
    let off = if x == r && y > -r {
        // Right edge, going up from (r, -r+1).
        y + r - 1
    } else if y == r {
        // Top edge, going left.
        2 * r + (r - 1 - x)
    } else if x == -r {
        // Left edge, going down.
        4 * r + (r - 1 - y)
    } else {
        // Bottom edge, going right, ending at (r, -r).
        debug_assert_eq!(y, -r);
        6 * r + (x + r - 1)
    };
    base + off as u64
}

#[derive(Debug, Clone)]
pub struct Cluster {
    pub shape: Shape,
    pub kind: LatticeKind,
    /// Coordinates sorted ascending by `spiral_rank`; `SiteId` indexes this.
    sites: Vec<Coord>,
    sublattice: Vec<Sublattice>,
    bonds: Vec<Bond>,
}

impl Cluster {
    pub fn build(shape: Shape) -> Cluster {
        let (kind, coords): (LatticeKind, Vec<Coord>) = match shape {
            Shape::Bond => (LatticeKind::OneBand, vec![(0, 0), (1, 0)]),
            Shape::Chain3 => (LatticeKind::OneBand, vec![(0, 0), (1, 0), (2, 0)]),
            Shape::Corner3 => (LatticeKind::OneBand, vec![(0, 0), (1, 0), (1, 1)]),
            Shape::Plaquette => (
                LatticeKind::OneBand,
                vec![(0, 0), (1, 0), (1, 1), (0, 1)],
            ),
            Shape::ChainN(n) => {
                assert!(n >= 2, "chain needs at least two sites");
                (LatticeKind::OneBand, (0..n as i32).map(|x| (x, 0)).collect())
            }
            // Protection zone of one copper-oxygen bond: the two copper sites
            // adjacent to the bond's oxygen, plus the remaining three oxygen
            // neighbors of the bond's copper.  These are exactly the sites
            // whose occupation the moved hole interacts with.
            Shape::Cuo2Bond => (
                LatticeKind::CuO2,
                vec![(0, 0), (2, 0), (1, 0), (-1, 0), (0, 1), (0, -1)],
            ),
            // Union of the protection zones of the two bonds of a
            // copper-oxygen-copper chain (Cu at (0,0) and (2,0), shared O at
            // (1,0)): two copper and seven oxygen sites.
            Shape::Cuo2TwoBonds => (
                LatticeKind::CuO2,
                vec![
                    (0, 0),
                    (2, 0),
                    (1, 0),
                    (-1, 0),
                    (0, 1),
                    (0, -1),
                    (3, 0),
                    (2, 1),
                    (2, -1),
                ],
            ),
        };
        Cluster::from_coords(shape, kind, coords)
    }

    /// Builds a cluster from explicit coordinates (used internally for
    /// auxiliary supports such as the bent three-site corner).
    pub fn from_coords(shape: Shape, kind: LatticeKind, mut coords: Vec<Coord>) -> Cluster {
        coords.sort_by_key(|&c| spiral_rank(c));
        for w in coords.windows(2) {
            assert!(w[0] != w[1], "duplicate site {:?}", w[0]);
        }
        if kind == LatticeKind::CuO2 {
            for &(x, y) in &coords {
                assert!(
                    (x % 2 == 0 && y % 2 == 0) || (x + y).rem_euclid(2) == 1,
                    "({x},{y}) is not a copper-oxide lattice site"
                );
            }
        }
        let sublattice = coords
            .iter()
            .map(|&(x, y)| match kind {
                LatticeKind::OneBand => {
                    if (x + y).rem_euclid(2) == 0 {
                        Sublattice::A
                    } else {
                        Sublattice::B
                    }
                }
                LatticeKind::CuO2 => {
                    if x % 2 == 0 && y % 2 == 0 {
                        Sublattice::A
                    } else {
                        Sublattice::B
                    }
                }
            })
            .collect();
        let mut bonds = Vec::new();
        for i in 0..coords.len() {
            for j in (i + 1)..coords.len() {
                let d = (coords[j].0 - coords[i].0, coords[j].1 - coords[i].1);
                if d.0.abs() + d.1.abs() == 1 {
                    bonds.push(Bond {
                        a: i,
                        b: j,
                        delta: d,
                    });
                }
            }
        }
        Cluster {
            shape,
            kind,
            sites: coords,
            sublattice,
            bonds,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn coord(&self, i: SiteId) -> Coord {
        self.sites[i]
    }

    pub fn site_at(&self, c: Coord) -> Option<SiteId> {
        self.sites.iter().position(|&s| s == c)
    }

    pub fn sublattice(&self, i: SiteId) -> Sublattice {
        self.sublattice[i]
    }

    /// Copper sites for copper-oxide clusters.
    pub fn copper_sites(&self) -> Vec<SiteId> {
        assert_eq!(self.kind, LatticeKind::CuO2);
        (0..self.n_sites())
            .filter(|&i| self.sublattice[i] == Sublattice::A)
            .collect()
    }

    /// Sites hosting a spin in the low-energy band: every site for the
    /// one-band model, the copper sites for the three-band model.
    pub fn band_sites(&self) -> Vec<SiteId> {
        match self.kind {
            LatticeKind::OneBand => (0..self.n_sites()).collect(),
            LatticeKind::CuO2 => self.copper_sites(),
        }
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond_between(&self, a: SiteId, b: SiteId) -> Option<&Bond> {
        self.bonds
            .iter()
            .find(|bd| (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
    }

    pub fn neighbors(&self, i: SiteId) -> Vec<SiteId> {
        self.bonds
            .iter()
            .filter_map(|b| {
                if b.a == i {
                    Some(b.b)
                } else if b.b == i {
                    Some(b.a)
                } else {
                    None
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_matches_reference_walk() {
        // First labels of the counterclockwise spiral around the origin.
        let expected = [
            (0, 0),
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
            (2, -1),
            (2, 0),
            (2, 1),
            (2, 2),
            (1, 2),
        ];
        for (rank, &c) in expected.iter().enumerate() {
            assert_eq!(spiral_rank(c), rank as u64, "at {c:?}");
        }
    }

    #[test]
    fn spiral_is_a_bijection_on_a_window() {
        let mut ranks = Vec::new();
        for x in -6..=6 {
            for y in -6..=6 {
                ranks.push(spiral_rank((x, y)));
            }
        }
        ranks.sort_unstable();
        ranks.dedup();
        assert_eq!(ranks.len(), 13 * 13);
        // An 11x11 block is a contiguous rank range.
        let max_inner = (-5..=5)
            .flat_map(|x| (-5..=5).map(move |y| spiral_rank((x, y))))
            .max()
            .unwrap();
        assert_eq!(max_inner, 11 * 11 - 1);
    }

    #[test]
    fn shapes_have_expected_sizes_and_bonds() {
        let bond = Cluster::build(Shape::Bond);
        assert_eq!(bond.n_sites(), 2);
        assert_eq!(bond.bonds().len(), 1);

        let chain = Cluster::build(Shape::Chain3);
        assert_eq!(chain.n_sites(), 3);
        assert_eq!(chain.bonds().len(), 2);

        let plaq = Cluster::build(Shape::Plaquette);
        assert_eq!(plaq.n_sites(), 4);
        assert_eq!(plaq.bonds().len(), 4);

        let chain5 = Cluster::build(Shape::ChainN(5));
        assert_eq!(chain5.n_sites(), 5);
        assert_eq!(chain5.bonds().len(), 4);

        let cu_bond = Cluster::build(Shape::Cuo2Bond);
        assert_eq!(cu_bond.n_sites(), 6);
        assert_eq!(cu_bond.copper_sites().len(), 2);
        // Every bond joins copper to oxygen.
        for b in cu_bond.bonds() {
            assert_ne!(cu_bond.sublattice(b.a), cu_bond.sublattice(b.b));
        }
        // Cu(0,0) has all four oxygen neighbors present, Cu(2,0) only the
        // shared one.
        let cu0 = cu_bond.site_at((0, 0)).unwrap();
        let cu2 = cu_bond.site_at((2, 0)).unwrap();
        assert_eq!(cu_bond.neighbors(cu0).len(), 4);
        assert_eq!(cu_bond.neighbors(cu2).len(), 1);

        let cu2b = Cluster::build(Shape::Cuo2TwoBonds);
        assert_eq!(cu2b.n_sites(), 9);
        assert_eq!(cu2b.copper_sites().len(), 2);
        let cu0 = cu2b.site_at((0, 0)).unwrap();
        let cu2 = cu2b.site_at((2, 0)).unwrap();
        assert_eq!(cu2b.neighbors(cu0).len(), 4);
        assert_eq!(cu2b.neighbors(cu2).len(), 4);
    }

    #[test]
    fn shape_parsing() {
        assert_eq!(Shape::parse("bond"), Some(Shape::Bond));
        assert_eq!(Shape::parse("chain7"), Some(Shape::ChainN(7)));
        assert_eq!(Shape::parse("chain1"), None);
        assert_eq!(Shape::parse("cuo2-two-bonds"), Some(Shape::Cuo2TwoBonds));
        assert_eq!(Shape::parse("hexagon"), None);
    }
}
