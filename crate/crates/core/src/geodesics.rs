//! Pseudo-geodesics: straight edge paths between singular vertices, their
//! lengths and exact intersection numbers.
//!
//! The closed form is bilinear: every pair of passes through a hexagonal
//! vertex along different lines contributes 1, and every pair of ends at a
//! singular vertex contributes a value depending only on the degree and the
//! angle between the two end darts. The oracle is the pairing of the lifted
//! degree vectors in `H (x) Q`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::surface::Triangulation;
use crate::typeiii::{h_pair_rat, sigma_lift, TowerError, TypeIIITower};
use crate::zlattice::{int, rank, Int, IntMat, Rat, RowSolver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeodesicError {
    #[error("only {0} singular vertices, need at least 3")]
    TooFewSingular(usize),
    #[error("straight path from dart {0} does not terminate")]
    NoEnd(usize),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("geodesic check failed: {0}")]
    Mismatch(String),
}

/// `a + b sqrt 3` over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q3 {
    pub a: Rat,
    pub b: Rat,
}

impl Q3 {
    pub fn new(a: Rat, b: Rat) -> Self {
        Q3 { a, b }
    }

    pub fn rational(a: Rat) -> Self {
        Q3 { a, b: Rat::zero() }
    }

    pub fn sqrt3() -> Self {
        Q3 { a: Rat::zero(), b: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn inv(&self) -> Option<Q3> {
        let n = &self.a * &self.a - Rat::from_integer(int(3)) * &self.b * &self.b;
        if n.is_zero() {
            return None;
        }
        Some(Q3 { a: &self.a / &n, b: -&self.b / &n })
    }

    pub fn to_rational(&self) -> Option<Rat> {
        self.b.is_zero().then(|| self.a.clone())
    }

    /// `cos(m pi / 6)`.
    pub fn cos_sixth(m: i64) -> Q3 {
        // (rational part, sqrt 3 part) in halves
        const TABLE: [(i64, i64); 12] =
            [(2, 0), (0, 1), (1, 0), (0, 0), (-1, 0), (0, -1), (-2, 0), (0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)];
        let (a, b) = TABLE[m.rem_euclid(12) as usize];
        Q3::new(Rat::new(int(a), int(2)), Rat::new(int(b), int(2)))
    }

    /// `sin(m pi / 6)`.
    pub fn sin_sixth(m: i64) -> Q3 {
        Q3::cos_sixth(3 - m)
    }
}

impl Add for Q3 {
    type Output = Q3;
    fn add(self, o: Q3) -> Q3 {
        Q3 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for Q3 {
    type Output = Q3;
    fn sub(self, o: Q3) -> Q3 {
        Q3 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for Q3 {
    type Output = Q3;
    fn neg(self) -> Q3 {
        Q3 { a: -self.a, b: -self.b }
    }
}

impl Mul for Q3 {
    type Output = Q3;
    fn mul(self, o: Q3) -> Q3 {
        let three = Rat::from_integer(int(3));
        Q3 { a: &self.a * &o.a + three * &self.b * &o.b, b: &self.a * &o.b + &self.b * &o.a }
    }
}

/// Contribution of a pair of ends at a vertex of degree `6 - k` meeting at
/// angle `a pi / 3`: `-(1/sqrt 3) cos(a pi/3 + k pi/6) / sin(k pi/6)`.
pub fn end_contribution(k: usize, a: usize) -> Rat {
    let k = k as i64;
    let num = Q3::cos_sixth(2 * a as i64 + k);
    let den = Q3::sin_sixth(k) * Q3::sqrt3();
    let v = (num * den.inv().expect("k in 1..=5")).neg();
    v.to_rational().expect("end contributions are rational")
}

/// The self-intersection end contributions for degrees 5, 4, 3, 2, 1 and the
/// angle table, rows indexed by degree 5..1 and columns by angle 0..2.
pub fn endpoint_table() -> (Vec<Rat>, Vec<Vec<Rat>>) {
    let selfs = (1..=5).map(|k| end_contribution(k, 0)).collect();
    let table = (1..=5).map(|k| (0..3).map(|a| end_contribution(k, a)).collect()).collect();
    (selfs, table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoGeodesic {
    /// Darts in order, each leaving the head of its predecessor.
    pub darts: Vec<usize>,
    pub ends: [usize; 2],
}

impl PseudoGeodesic {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Edge multiplicities, the element of `C_1`.
    pub fn chain(&self, tri: &Triangulation) -> Vec<Int> {
        let mut c = vec![Int::zero(); tri.num_edges()];
        for &x in &self.darts {
            c[tri.edge(x)] += 1;
        }
        c
    }

    /// End darts leaving the two endpoints.
    pub fn end_darts(&self, tri: &Triangulation) -> [usize; 2] {
        [self.darts[0], tri.alpha(*self.darts.last().unwrap())]
    }

    /// Passes through hexagonal vertices as `(vertex, line)`, the line being
    /// the rotation position of the entering dart modulo 3.
    pub fn passes(&self, tri: &Triangulation) -> Vec<(usize, usize)> {
        self.darts[1..].iter().map(|&x| (tri.tail(x), tri.pos(x) % 3)).collect()
    }
}

/// Follows the straight path leaving along dart `x` until a singular vertex.
pub fn straight_path(tri: &Triangulation, x: usize) -> Result<Vec<usize>, GeodesicError> {
    let mut darts = vec![x];
    let mut y = x;
    loop {
        let w = tri.head(y);
        if tri.degree(w) != 6 {
            return Ok(darts);
        }
        if darts.len() > tri.num_darts() {
            return Err(GeodesicError::NoEnd(x));
        }
        let p = tri.pos(tri.alpha(y));
        y = tri.rotation(w)[(p + 3) % 6];
        darts.push(y);
    }
}

/// All pseudo-geodesics, one per unordered pair of end darts, sorted by
/// their first dart.
pub fn trace(tri: &Triangulation) -> Result<Vec<PseudoGeodesic>, GeodesicError> {
    let sing: Vec<usize> = (0..tri.num_vertices()).filter(|&v| tri.degree(v) != 6).collect();
    if sing.len() < 3 {
        return Err(GeodesicError::TooFewSingular(sing.len()));
    }
    let mut out = Vec::new();
    for &v in &sing {
        for &x in tri.rotation(v) {
            let darts = straight_path(tri, x)?;
            let back = tri.alpha(*darts.last().unwrap());
            if x <= back {
                out.push(PseudoGeodesic { ends: [v, tri.head(*darts.last().unwrap())], darts });
            }
        }
    }
    out.sort_by_key(|g| g.darts[0]);
    let l = sing.len();
    if out.len() != 3 * l - 6 {
        return Err(GeodesicError::Mismatch(format!("{} geodesics, expected {}", out.len(), 3 * l - 6)));
    }
    Ok(out)
}

/// Angle index in `{0, 1, 2}` between two darts leaving the same vertex.
pub fn angle(tri: &Triangulation, x: usize, y: usize) -> usize {
    let d = tri.degree(tri.tail(x));
    let gap = (tri.pos(x) + d - tri.pos(y)) % d;
    gap.min(d - gap)
}

/// Closed-form intersection number.
pub fn intersection(tri: &Triangulation, g1: &PseudoGeodesic, g2: &PseudoGeodesic) -> Rat {
    let mut n_h = 0i64;
    let (p1, p2) = (g1.passes(tri), g2.passes(tri));
    for &(v, a) in &p1 {
        for &(w, b) in &p2 {
            if v == w && a != b {
                n_h += 1;
            }
        }
    }
    let mut s = Rat::from_integer(int(n_h));
    for &x in &g1.end_darts(tri) {
        for &y in &g2.end_darts(tri) {
            if tri.tail(x) == tri.tail(y) {
                let k = 6 - tri.degree(tri.tail(x));
                s += end_contribution(k, angle(tri, x, y));
            }
        }
    }
    s
}

/// Geodesics with their lifts, lengths and the verified Gram matrix.
#[derive(Debug, Clone)]
pub struct GeodesicSystem {
    pub geodesics: Vec<PseudoGeodesic>,
    pub chains: IntMat,
    pub lifts: Vec<Vec<Rat>>,
    pub gram: Vec<Vec<Rat>>,
    /// Rank of the span of the geodesic classes together with `R`.
    pub span_rank: usize,
    /// Whether that span is all of `Lbar (x) Q`. It can fall short when
    /// geodesics cross at flat vertices.
    pub spans: bool,
}

impl GeodesicSystem {
    pub fn lengths(&self) -> Vec<usize> {
        self.geodesics.iter().map(|g| g.len()).collect()
    }

    /// Sorted multiset of lengths.
    pub fn length_spectrum(&self) -> Vec<usize> {
        let mut l = self.lengths();
        l.sort_unstable();
        l
    }
}

/// Traces the geodesics and checks the closed form against the lift
/// pairing and `gamma . h = 2 length`, and records whether the geodesics
/// together with `R` span `Lbar (x) Q`.
pub fn geodesic_system(tw: &TypeIIITower) -> Result<GeodesicSystem, GeodesicError> {
    let tri = &tw.tri;
    let geodesics = trace(tri)?;
    let chains = IntMat::from_rows(geodesics.iter().map(|g| g.chain(tri)).collect(), tri.num_edges());
    let lifts = sigma_lift(tw, &chains)?;
    let hq: Vec<Rat> = tw.h_vec.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let m = geodesics.len();
    let mut gram = vec![vec![Rat::zero(); m]; m];
    for i in 0..m {
        let hp = h_pair_rat(tw, &lifts[i], &hq);
        if hp != Rat::from_integer(int(2 * geodesics[i].len() as i64)) {
            return Err(GeodesicError::Mismatch(format!("geodesic {i}: h pairing {hp}")));
        }
        for j in i..m {
            let oracle = h_pair_rat(tw, &lifts[i], &lifts[j]);
            let closed = intersection(tri, &geodesics[i], &geodesics[j]);
            if oracle != closed {
                return Err(GeodesicError::Mismatch(format!("pair ({i}, {j}): formula {closed}, lift {oracle}")));
            }
            gram[i][j] = closed.clone();
            gram[j][i] = closed;
        }
    }
    // span of Lbar (x) Q by geodesics and R
    let solver = RowSolver::new(&tw.l_adapted);
    let s = tw.sat_k_rank;
    let six = Rat::from_integer(int(6));
    let mut rows = Vec::new();
    for lift in &lifts {
        let c = solver.solve(lift).ok_or_else(|| GeodesicError::Mismatch(String::from("lift outside L (x) Q")))?;
        let scaled: Vec<Int> = c[s..].iter().map(|x| x * &six).map(|x| x.to_integer()).collect();
        if c[s..].iter().any(|x| !(x * &six).is_integer()) {
            return Err(GeodesicError::Mismatch(String::from("6 gamma is not integral")));
        }
        rows.push(scaled);
    }
    rows.extend(tw.r_basis.rows.iter().cloned());
    let span_rank = rank(&IntMat::from_rows(rows, tw.lbar.rank()));
    let spans = span_rank == tw.lbar.rank();
    Ok(GeodesicSystem { geodesics, chains, lifts, gram, span_rank, spans })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::polyhedra;
    use crate::typeiii::build_tower;
    use crate::zlattice::rat;

    #[test]
    fn endpoint_values() {
        let (selfs, table) = endpoint_table();
        assert_eq!(selfs, vec![rat(-1, 1), rat(-1, 3), rat(0, 1), rat(1, 3), rat(1, 1)]);
        assert_eq!(table[0][1..], [rat(0, 1), rat(1, 1)]);
        assert_eq!(table[1][1..], [rat(1, 3), rat(2, 3)]);
        assert_eq!(table[2][1], rat(1, 2));
        assert_eq!(table[3][1], rat(2, 3));
    }

    #[test]
    fn counts_and_lengths() {
        assert_eq!(trace(&polyhedra::icosahedron()).unwrap().len(), 30);
        assert_eq!(trace(&polyhedra::tetrahedron()).unwrap().len(), 6);
        let g = trace(&polyhedra::tetrahedron().subdivide(3)).unwrap();
        assert_eq!(g.iter().map(|g| g.len()).collect::<Vec<_>>(), vec![3; 6]);
    }

    #[test]
    fn formula_matches_lift() {
        for t in [
            polyhedra::tetrahedron(),
            polyhedra::t1(),
            polyhedra::t2(),
            polyhedra::octahedron(),
            polyhedra::icosahedron(),
            polyhedra::tetrahedron().subdivide(2),
            polyhedra::octahedron().subdivide(2),
        ] {
            let tw = build_tower(&t).unwrap();
            let gs = geodesic_system(&tw).unwrap();
            assert_eq!(gs.geodesics.len(), 3 * tw.singular_count() - 6);
        }
        let tw = build_tower(&polyhedra::icosahedron()).unwrap();
        let gs = geodesic_system(&tw).unwrap();
        assert!(gs.gram.iter().enumerate().all(|(i, r)| r[i] == rat(-2, 1)));
    }
}
