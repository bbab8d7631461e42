//! The eigencycle side: Thurston's space of flat structures as side vectors
//! over `Q(w)`, pseudo-geodesics as linear functionals on it, and the
//! hermitian form dual to the area form.
//!
//! Every face carries its standard frame, in which its three sides point
//! along `1, w, w^2`. A deformation assigns to each dart a vector in the
//! frame of its face; the two darts of an edge are opposite once moved
//! into a common frame, and each face closes up. The triangulation itself
//! is the point `v` with all sides of unit length.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::eisenstein::{eisenstein_basis, eisenstein_coords, EisError, EisInt, EisRat};
use crate::geodesics::{geodesic_system, GeodesicError, GeodesicSystem, PseudoGeodesic};
use crate::rho::Descent;
use crate::surface::{phi_inv, Triangulation};
use crate::typeiii::TypeIIITower;
use crate::zlattice::{common_denom, int, rat_vec_mul, reduce, Int, IntMat, Rat, RowSolver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThurstonError {
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Eis(#[from] EisError),
    #[error("inconsistent: {check}: {detail}")]
    Inconsistent { check: &'static str, detail: String },
}

fn fail(check: &'static str, detail: String) -> ThurstonError {
    ThurstonError::Inconsistent { check, detail }
}

type Qw = EisRat;

fn qw(a: i64) -> Qw {
    Qw::from_ints(a, 0, 1)
}

fn qw_int(x: &EisInt) -> Qw {
    x.to_rat()
}

/// Real part.
pub fn re(x: &Qw) -> Rat {
    x.re2() / Rat::from_integer(int(2))
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<Qw>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Qw::one().div(&m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if m[r][j].is_zero() {
                        continue;
                    }
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &d;
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    piv
}

/// Basis of `{z : m z = 0}`.
fn null_space(m: &[Vec<Qw>], cols: usize) -> Vec<Vec<Qw>> {
    let mut a = m.to_vec();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut z = vec![Qw::zero(); cols];
            z[f] = Qw::one();
            for (r, &p) in piv.iter().enumerate() {
                z[p] = -a[r][f].clone();
            }
            z
        })
        .collect()
}

fn qw_rank(m: &[Vec<Qw>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Solves `m x = b` (columns), returning one solution if consistent.
fn solve_cols(m: &[Vec<Qw>], b: &[Qw]) -> Option<Vec<Qw>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Qw>> = m.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    let piv = rref(&mut a);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Qw::zero(); cols];
    for (r, &p) in piv.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}

fn dot(x: &[Qw], y: &[Qw]) -> Qw {
    x.iter().zip(y).fold(Qw::zero(), |s, (a, b)| s + a * b)
}

/// Frame change across the edge of dart `x`: a vector with coordinate `u`
/// in the frame of the face of `x` has coordinate `u * transition(x)` in the
/// frame of the face of `alpha x`.
pub fn transition(tri: &Triangulation, x: usize) -> EisInt {
    let y = tri.alpha(x);
    -EisInt::omega_pow(y as i64 % 3 - x as i64 % 3)
}

/// Unit side vector of dart `x` in the frame of its face.
pub fn side(x: usize) -> EisInt {
    EisInt::omega_pow(x as i64 % 3)
}

/// Product of the frame changes met when circling `v` counterclockwise.
pub fn holonomy(tri: &Triangulation, v: usize) -> EisInt {
    let mut h = EisInt::one();
    for &a in tri.rotation(v) {
        h = &h * &transition(tri, phi_inv(a));
    }
    h
}

/// Frame change from the face of `x` to the face of `y`, both leaving `w`,
/// turning counterclockwise around `w`.
fn turn(tri: &Triangulation, x: usize, y: usize) -> EisInt {
    let mut f = EisInt::one();
    let mut a = x;
    while a != y {
        f = &f * &transition(tri, phi_inv(a));
        a = tri.sigma(a);
    }
    f
}

/// Per dart the frame change from the first face of the geodesic to the
/// face of that dart.
pub fn transport(tri: &Triangulation, g: &PseudoGeodesic) -> Vec<EisInt> {
    let mut out = Vec::with_capacity(g.len());
    let mut t = EisInt::one();
    out.push(t.clone());
    for w in g.darts.windows(2) {
        let cross = transition(tri, w[0]);
        t = &(&t * &cross) * &turn(tri, tri.alpha(w[0]), w[1]);
        out.push(t.clone());
    }
    out
}

/// Thurston's deformation space with its area form.
#[derive(Debug, Clone)]
pub struct DeformationSpace {
    /// `z_x = coef[x] * var[edge x]`.
    pub coef: Vec<EisInt>,
    /// Basis of the solutions, in edge variables.
    pub basis: Vec<Vec<Qw>>,
    /// Area form on `basis`, normalised to 1 per unit triangle.
    pub area: Vec<Vec<Qw>>,
    /// The triangulation as coordinates on `basis`.
    pub point: Vec<Qw>,
}

impl DeformationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Phase of every dart against the variable of its edge: `z_x = phase[x] *
/// var[edge x]`. The first dart of an edge carries phase 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftTable {
    pub phase: Vec<EisInt>,
}

pub fn lift_table(tri: &Triangulation) -> LiftTable {
    let mut phase = vec![EisInt::zero(); tri.num_darts()];
    for e in 0..tri.num_edges() {
        let [x, y] = tri.edge_darts(e);
        phase[x] = EisInt::one();
        phase[y] = -transition(tri, x);
    }
    LiftTable { phase }
}

/// Faces whose unit sides disagree with the table and vertices around
/// which the induced frame changes do not close up to the cone angle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Consistency {
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl Consistency {
    pub fn passes(&self) -> bool {
        self.faces.is_empty() && self.vertices.is_empty()
    }
}

pub fn consistency(tri: &Triangulation, lt: &LiftTable) -> Consistency {
    let mut out = Consistency::default();
    if lt.phase.len() != tri.num_darts() || lt.phase.iter().any(|p| !p.is_unit()) {
        out.faces = (0..tri.num_faces()).collect();
        return out;
    }
    let var: Vec<Qw> = (0..tri.num_edges())
        .map(|e| {
            let x = tri.edge_darts(e)[0];
            qw_int(&side(x)).div(&qw_int(&lt.phase[x])).expect("unit")
        })
        .collect();
    for f in 0..tri.num_faces() {
        let mut sum = Qw::zero();
        let mut ok = true;
        for x in 3 * f..3 * f + 3 {
            let z = &qw_int(&lt.phase[x]) * &var[tri.edge(x)];
            ok &= z == qw_int(&side(x));
            sum = sum + z;
        }
        if !ok || !sum.is_zero() {
            out.faces.push(f);
        }
    }
    // frame change read off the table: the two darts of an edge are opposite
    let change = |x: usize| -> EisInt {
        let q = lt.phase[tri.alpha(x)].div_exact(&lt.phase[x]).expect("unit");
        -q
    };
    for v in 0..tri.num_vertices() {
        let mut h = EisInt::one();
        for &a in tri.rotation(v) {
            h = &h * &change(phi_inv(a));
        }
        if h != EisInt::zeta_pow(-(tri.degree(v) as i64)) {
            out.vertices.push(v);
        }
    }
    out
}

pub fn deformation_space(tri: &Triangulation) -> Result<DeformationSpace, ThurstonError> {
    deformation_space_with(tri, &lift_table(tri))
}

pub fn deformation_space_with(tri: &Triangulation, lt: &LiftTable) -> Result<DeformationSpace, ThurstonError> {
    let report = consistency(tri, lt);
    if !report.passes() {
        return Err(fail("lift table consistency", format!("faces {:?}, vertices {:?}", report.faces, report.vertices)));
    }
    let ne = tri.num_edges();
    let coef = lt.phase.clone();
    let mut rows = Vec::with_capacity(tri.num_faces());
    for f in 0..tri.num_faces() {
        let mut r = vec![Qw::zero(); ne];
        for s in 0..3 {
            let x = 3 * f + s;
            r[tri.edge(x)] = &r[tri.edge(x)] + &qw_int(&coef[x]);
        }
        rows.push(r);
    }
    // Per face the area pairing of sides z against w is
    // (z1 conj(w0) - z0 conj(w1)) / theta, which is 1 on the unit triangle.
    // The basis is scaled to Z[w] entries so that the sums are integral.
    let basis: Vec<Vec<Qw>> = null_space(&rows, ne)
        .into_iter()
        .map(|b| {
            let den = Rat::from_integer(common_denom(b.iter().flat_map(|z| [&z.a, &z.b])));
            b.iter().map(|z| z.scale(&den)).collect()
        })
        .collect();
    let zint: Vec<Vec<EisInt>> =
        basis.iter().map(|b| (0..tri.num_darts()).map(|x| &coef[x] * &b[tri.edge(x)].to_int().expect("integral")).collect()).collect();
    let k = basis.len();
    let mut area = vec![vec![Qw::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut s = EisInt::zero();
            for f in 0..tri.num_faces() {
                let (z0, z1) = (&zint[i][3 * f], &zint[i][3 * f + 1]);
                let (w0, w1) = (&zint[j][3 * f], &zint[j][3 * f + 1]);
                if (z0.is_zero() && z1.is_zero()) || (w0.is_zero() && w1.is_zero()) {
                    continue;
                }
                s = s + (&(z1 * &w0.conj()) - &(z0 * &w1.conj()));
            }
            area[i][j] = s.to_rat().div(&Qw::theta()).expect("theta invertible");
        }
    }
    // the unit structure
    let mut var = vec![Qw::zero(); ne];
    for e in 0..ne {
        let [x, _] = tri.edge_darts(e);
        var[e] = qw_int(&side(x));
    }
    for x in 0..tri.num_darts() {
        if qw_int(&side(x)) != &qw_int(&coef[x]) * &var[tri.edge(x)] {
            return Err(fail("unit structure matches across edges", format!("dart {x}")));
        }
    }
    let cols: Vec<Vec<Qw>> = (0..ne).map(|e| basis.iter().map(|b| b[e].clone()).collect()).collect();
    let point = solve_cols(&cols, &var).ok_or_else(|| fail("unit structure is a deformation", String::new()))?;
    Ok(DeformationSpace { coef, basis, area, point })
}

/// The eigenhomology presented by lifted pseudo-geodesics.
#[derive(Debug, Clone)]
pub struct EigenHomology {
    pub tri: Triangulation,
    pub space: DeformationSpace,
    pub geodesics: GeodesicSystem,
    /// Normalised lift of each geodesic as a functional on the basis.
    pub lifts: Vec<Vec<Qw>>,
    /// `h(lift_i, lift_j)`, scaled so that its real part is the lattice
    /// pairing.
    pub gram: Vec<Vec<Qw>>,
    pub rank: usize,
    /// Columns of the area form spanning its row space.
    pivots: Vec<usize>,
    area_inv: Vec<Vec<Qw>>,
}

/// The hermitian form on functionals is this multiple of the dual of the
/// area form; it makes the real part agree with the lattice pairing.
pub fn form_scale() -> Rat {
    Rat::new(int(4), int(3))
}

/// Value of the normalised lift of `g` on a deformation, given in edge
/// variables: the developed vector along `g` divided by its unit direction.
fn lift_value(tri: &Triangulation, coef: &[EisInt], g: &PseudoGeodesic, var: &[Qw]) -> Qw {
    let tr = transport(tri, g);
    let dir = qw_int(&side(g.darts[0]));
    let mut s = Qw::zero();
    for (x, t) in g.darts.iter().zip(&tr) {
        let z = &qw_int(&coef[*x]) * &var[tri.edge(*x)];
        s = s + z.div(&qw_int(t)).expect("unit");
    }
    s.div(&dir).expect("unit")
}

impl EigenHomology {
    /// `h(f, g)` for functionals vanishing on the radical of the area form.
    pub fn pair(&self, f: &[Qw], g: &[Qw]) -> Qw {
        let fi: Vec<Qw> = self.pivots.iter().map(|&i| f[i].clone()).collect();
        let gi: Vec<Qw> = self.pivots.iter().map(|&i| g[i].conj()).collect();
        let af: Vec<Qw> = self.area_inv.iter().map(|r| dot(r, &fi)).collect();
        dot(&gi, &af).scale(&form_scale())
    }

    /// The functional `z -> area(z, v)`, dual to the triangulation.
    pub fn dual_point(&self) -> Vec<Qw> {
        let p = &self.space.point;
        self.space.area.iter().map(|row| row.iter().zip(p).fold(Qw::zero(), |s, (a, b)| s + a * &b.conj())).collect()
    }
}

pub fn eigen_homology(tw: &TypeIIITower) -> Result<EigenHomology, ThurstonError> {
    let tri = &tw.tri;
    let geodesics = geodesic_system(tw)?;
    let space = deformation_space(tri)?;
    let l = tw.singular_count();
    if space.dim() != tri.num_vertices() - 2 {
        return Err(fail("dim of the deformation space is n - 2", format!("{}", space.dim())));
    }
    for v in 0..tri.num_vertices() {
        let d = tri.degree(v) as i64;
        if holonomy(tri, v) != EisInt::zeta_pow(-d) {
            return Err(fail("vertex holonomy is the cone angle", format!("vertex {v}: {}", holonomy(tri, v))));
        }
    }
    let unit: Vec<Qw> = (0..tri.num_edges()).map(|e| qw_int(&side(tri.edge_darts(e)[0]))).collect();
    for (i, g) in geodesics.geodesics.iter().enumerate() {
        let tr = transport(tri, g);
        let dir = side(g.darts[0]);
        for (x, t) in g.darts.iter().zip(&tr) {
            if qw_int(&side(*x)).div(&qw_int(t)).unwrap() != qw_int(&dir) {
                return Err(fail("pseudo-geodesics develop straight", format!("geodesic {i}")));
            }
        }
        if lift_value(tri, &space.coef, g, &unit) != qw(g.len() as i64) {
            return Err(fail("lift measures length", format!("geodesic {i}")));
        }
    }
    let lifts: Vec<Vec<Qw>> = geodesics
        .geodesics
        .iter()
        .map(|g| space.basis.iter().map(|b| lift_value(tri, &space.coef, g, b)).collect())
        .collect();

    let mut a = space.area.clone();
    let pivots = rref(&mut a);
    if pivots.len() != l - 2 {
        return Err(fail("rank of the area form is l - 2", format!("{} vs {}", pivots.len(), l - 2)));
    }
    let sub: Vec<Vec<Qw>> = pivots.iter().map(|&i| pivots.iter().map(|&j| space.area[i][j].clone()).collect()).collect();
    let area_inv = qw_inverse(&sub).ok_or_else(|| fail("area form nondegenerate on pivots", String::new()))?;
    // lifts vanish on the radical
    // r is in the radical when r^T A = 0, i.e. conj(r) is in the null space
    let rad: Vec<Vec<Qw>> = null_space(&space.area, space.dim()).iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect();
    for (i, f) in lifts.iter().enumerate() {
        if rad.iter().any(|r| !dot(f, r).is_zero()) {
            return Err(fail("lifts vanish on flat translations", format!("geodesic {i}")));
        }
    }
    let mut eh = EigenHomology { tri: tri.clone(), space, geodesics, lifts, gram: Vec::new(), rank: 0, pivots, area_inv };
    let m = eh.lifts.len();
    let gram: Vec<Vec<Qw>> = (0..m).map(|i| (0..m).map(|j| eh.pair(&eh.lifts[i], &eh.lifts[j])).collect()).collect();
    eh.gram = gram;
    eh.rank = qw_rank(&eh.lifts);
    if eh.rank != l - 2 {
        return Err(fail("eigenhomology rank l - 2", format!("{} vs {}", eh.rank, l - 2)));
    }
    if qw_rank(&eh.gram) != eh.rank {
        return Err(fail("radical of the Gram is the relation span", String::new()));
    }
    Ok(eh)
}

fn qw_inverse(m: &[Vec<Qw>]) -> Option<Vec<Vec<Qw>>> {
    let n = m.len();
    let mut a: Vec<Vec<Qw>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Qw::one() } else { Qw::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Entrywise comparison of `Re h` with the closed-form geodesic pairing.
pub fn compare_real(eh: &EigenHomology) -> Vec<(usize, usize)> {
    let m = eh.lifts.len();
    let mut bad = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if re(&eh.gram[i][j]) != eh.geodesics.gram[i][j] {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// `h` of two unit lifts leaving a vertex of deficit `k` whose rotation
/// positions differ by `a`: `(1/sqrt 3) e^{i(pi - k pi/6 - a pi/3)} / sin(k pi/6)`.
pub fn corner_value(k: usize, a: usize) -> Option<Qw> {
    if !(1..=5).contains(&k) || a == 0 || a >= 6 - k {
        return None;
    }
    let m = 6 - k as i64 - 2 * a as i64;
    Some(if k % 2 == 1 {
        // i / sqrt 3 = theta / 3, and 1 / sin(k pi/6) is 2 or 1
        let inv_sin = if k == 3 { 1 } else { 2 };
        (&Qw::theta() * &EisInt::zeta_pow((m - 3) / 2).to_rat()).scale(&Rat::new(int(inv_sin), int(3)))
    } else {
        EisInt::zeta_pow(m / 2).to_rat().scale(&Rat::new(int(2), int(3)))
    })
}

/// `(1/sqrt 3) cot(k pi/6)`, the end term of a self-pairing.
pub fn end_value(k: usize) -> Option<Rat> {
    let v = match k {
        1 => (1, 1),
        2 => (1, 3),
        3 => (0, 1),
        4 => (-1, 3),
        5 => (-1, 1),
        _ => return None,
    };
    Some(Rat::new(int(v.0), int(v.1)))
}

/// Pairs of unit geodesics whose Gram entry differs from the local value:
/// a self-pairing `-(end(k_i) + end(k_j))`, or a single shared endpoint.
pub fn local_violations(eh: &EigenHomology) -> Vec<(usize, usize)> {
    let tri = &eh.tri;
    let gs = &eh.geodesics.geodesics;
    let mut bad = Vec::new();
    let deficit = |x: usize| 6 - tri.degree(tri.tail(x));
    for i in 0..gs.len() {
        if gs[i].len() != 1 {
            continue;
        }
        let ei = gs[i].end_darts(tri);
        for j in 0..gs.len() {
            if gs[j].len() != 1 {
                continue;
            }
            let expected = if i == j {
                if tri.tail(ei[0]) == tri.tail(ei[1]) {
                    continue;
                }
                let s = end_value(deficit(ei[0])).unwrap() + end_value(deficit(ei[1])).unwrap();
                Qw::from_base(-s)
            } else {
                let ej = gs[j].end_darts(tri);
                let shared: Vec<(usize, usize)> =
                    ei.iter().flat_map(|&x| ej.iter().map(move |&y| (x, y))).filter(|&(x, y)| tri.tail(x) == tri.tail(y)).collect();
                if shared.len() != 1 {
                    continue;
                }
                let (x, y) = shared[0];
                let d = tri.degree(tri.tail(x));
                match corner_value(6 - d, (tri.pos(x) + d - tri.pos(y)) % d) {
                    Some(v) => v,
                    None => {
                        bad.push((i, j));
                        continue;
                    }
                }
            };
            if eh.gram[i][j] != expected {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// Classes of the geodesics in `Lbar (x) Q`.
fn geodesic_classes(tw: &TypeIIITower, gs: &GeodesicSystem) -> Result<Vec<Vec<Rat>>, ThurstonError> {
    let solver = RowSolver::new(&tw.l_adapted);
    gs.lifts
        .iter()
        .map(|l| {
            solver
                .solve(l)
                .map(|c| c[tw.sat_k_rank..].to_vec())
                .ok_or_else(|| fail("geodesic class in L (x) Q", String::new()))
        })
        .collect()
}

/// Appends to `rows` those `cand` independent of what is already there;
/// returns their indices. `rows` must start independent.
fn extend_independent(rows: &mut Vec<Vec<Rat>>, cand: &[Vec<Rat>]) -> Vec<usize> {
    // echelon copy: (pivot column, normalised row)
    let mut ech: Vec<(usize, Vec<Rat>)> = Vec::new();
    let reduce_row = |v: &[Rat], ech: &mut Vec<(usize, Vec<Rat>)>| -> bool {
        let mut v = v.to_vec();
        for (p, r) in ech.iter() {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= &f * y;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let inv = v[p].recip();
                let v: Vec<Rat> = v.iter().map(|x| x * &inv).collect();
                ech.push((p, v));
                true
            }
            None => false,
        }
    };
    for r in rows.iter() {
        reduce_row(r, &mut ech);
    }
    let mut picked = Vec::new();
    for (i, c) in cand.iter().enumerate() {
        if reduce_row(c, &mut ech) {
            rows.push(c.clone());
            picked.push(i);
        }
    }
    picked
}

fn combine(coeffs: &[Rat], vecs: &[Vec<Qw>]) -> Vec<Qw> {
    let mut out = vec![Qw::zero(); vecs.first().map_or(0, |v| v.len())];
    for (c, v) in coeffs.iter().zip(vecs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o = &*o + &x.scale(c);
        }
    }
    out
}

/// Outcome of the check that `rho_Q` acts on lifts as a scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaAction {
    /// `None` when `Q = 0`.
    pub unit: Option<EisInt>,
    pub checked: usize,
    /// Combinations whose image under `rho_Q` leaves the geodesic span.
    pub skipped: usize,
}

/// The unit `u` with `s(rho_Q q) = u s(q)` on every length-zero combination
/// of geodesics, `q` its component in `Q` and `s` the lift.
pub fn omega_action(tw: &TypeIIITower, eh: &EigenHomology, descent: &Descent) -> Result<OmegaAction, ThurstonError> {
    if tw.q_basis.nrows() == 0 {
        return Ok(OmegaAction { unit: None, checked: 0, skipped: 0 });
    }
    let (mut checked, mut skipped) = (0, 0);
    let classes = geodesic_classes(tw, &eh.geodesics)?;
    let lens = eh.geodesics.lengths();
    let m = classes.len();
    let qr = RowSolver::new(&tw.q_basis.stack(&tw.r_basis));
    let nq = tw.q_basis.nrows();
    let mut back_rows = tw.r_basis.to_rat();
    let nr = back_rows.len();
    let picked = extend_independent(&mut back_rows, &classes);
    let back = RowSolver::new_rat(&back_rows);
    let rho = descent.rho_q.to_rat();
    let q_rat = tw.q_basis.to_rat();
    let mut unit: Option<EisInt> = None;
    for j in 1..m {
        let mut a = vec![Rat::zero(); m];
        a[0] = Rat::from_integer(int(-(lens[j] as i64)));
        a[j] = Rat::from_integer(int(lens[0] as i64));
        let c = rat_vec_mul(&a, &classes);
        let x = qr.solve(&c).ok_or_else(|| fail("length-zero combination lies in P", format!("combination {j}")))?;
        let rq = rat_vec_mul(&rat_vec_mul(&x[..nq], &rho), &q_rat);
        let Some(b) = back.solve(&rq) else {
            skipped += 1;
            continue;
        };
        let fa = combine(&a, &eh.lifts);
        let mut bm = vec![Rat::zero(); m];
        for (c, &g) in b[nr..].iter().zip(&picked) {
            bm[g] = c.clone();
        }
        let fb = combine(&bm, &eh.lifts);
        let Some(k) = fa.iter().position(|z| !z.is_zero()) else {
            if fb.iter().any(|z| !z.is_zero()) {
                return Err(fail("lift kills rho_Q of a vanishing class", format!("combination {j}")));
            }
            continue;
        };
        let u = fb[k].div(&fa[k]).unwrap();
        if fa.iter().zip(&fb).any(|(p, q)| &(p * &u) != q) {
            return Err(fail("lift intertwines rho_Q with a scalar", format!("combination {j}")));
        }
        let u = u.to_int().filter(|u| u.is_unit()).ok_or_else(|| fail("rho_Q acts by a unit", format!("{u}")))?;
        checked += 1;
        match &unit {
            None => unit = Some(u),
            Some(w) if *w != u => return Err(fail("rho_Q acts by one unit", format!("{w} and {u}"))),
            _ => {}
        }
    }
    if unit.is_none() && skipped == 0 {
        return Err(fail("length-zero combinations exist", String::new()));
    }
    Ok(OmegaAction { unit, checked, skipped })
}

/// Thurston's point: the functional `lambda` in the span of the lifts with
/// `h(lift, lambda) = (2/3) theta len` for every geodesic.
#[derive(Debug, Clone)]
pub struct DeltaE {
    pub functional: Vec<Qw>,
    /// `h(lambda, lambda)`; `(3/2)` of it is the norm in `M^E`.
    pub norm: Rat,
    /// `lambda` over the dual point `z -> area(z, v)`.
    pub dual_ratio: Qw,
    /// Coordinates on an Eisenstein basis of the lift lattice, normalised
    /// to the lexicographically least unit multiple; `None` off the lattice.
    pub coords: Option<Vec<EisInt>>,
}

fn realify(f: &[Qw]) -> Vec<Rat> {
    f.iter().flat_map(|z| [z.a.clone(), z.b.clone()]).collect()
}

fn lex_key(c: &[EisInt]) -> Vec<(Int, Int)> {
    c.iter().map(|z| (z.a.clone(), z.b.clone())).collect()
}

pub fn solve_delta(eh: &EigenHomology) -> Result<DeltaE, ThurstonError> {
    let m = eh.lifts.len();
    let lens = eh.geodesics.lengths();
    // independent generators: greedy by index
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m {
        let mut trial: Vec<Vec<Qw>> = chosen.iter().map(|&j| eh.lifts[j].clone()).collect();
        trial.push(eh.lifts[i].clone());
        if qw_rank(&trial) == trial.len() {
            chosen.push(i);
        }
    }
    let target: Vec<Qw> =
        lens.iter().map(|&l| Qw::theta().scale(&Rat::new(int(2 * l as i64), int(3)))).collect();
    let rows: Vec<Vec<Qw>> = (0..m).map(|i| chosen.iter().map(|&j| eh.gram[i][j].clone()).collect()).collect();
    let y = solve_cols(&rows, &target).ok_or_else(|| fail("length system is solvable", String::new()))?;
    let mut functional = vec![Qw::zero(); eh.space.dim()];
    for (c, &j) in y.iter().zip(&chosen) {
        let c = c.conj();
        for (o, x) in functional.iter_mut().zip(&eh.lifts[j]) {
            *o = &*o + &(&c * x);
        }
    }
    let nz = eh.pair(&functional, &functional);
    if !nz.is_real() {
        return Err(fail("hermitian norm is real", format!("{nz}")));
    }
    let norm = re(&nz);
    let dual = eh.dual_point();
    let k = dual.iter().position(|z| !z.is_zero()).ok_or_else(|| fail("dual point is nonzero", String::new()))?;
    let dual_ratio = functional[k].div(&dual[k]).unwrap();
    if dual.iter().zip(&functional).any(|(d, f)| &(d * &dual_ratio) != f) {
        return Err(fail("lambda is a multiple of the dual point", String::new()));
    }
    Ok(DeltaE { coords: lattice_coords(eh, &functional), functional, norm, dual_ratio })
}

/// Coordinates of `f` in the `Z[w]`-span of the lifts, if it lies there.
fn lattice_coords(eh: &EigenHomology, f: &[Qw]) -> Option<Vec<EisInt>> {
    let w = Qw::omega();
    let mut gens: Vec<Vec<Rat>> = Vec::new();
    for l in &eh.lifts {
        gens.push(realify(l));
        gens.push(realify(&l.iter().map(|z| &w * z).collect::<Vec<_>>()));
    }
    let den = common_denom(gens.iter().flatten());
    let scale = Rat::from_integer(den.clone());
    let int_rows: Vec<Vec<Int>> = gens.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
    let cols = int_rows[0].len();
    let basis = reduce(&IntMat::from_rows(int_rows, cols));
    let solver = RowSolver::new(&basis);
    // multiplication by w on the basis
    let mut rho_rows = Vec::with_capacity(basis.nrows());
    for b in &basis.rows {
        let z: Vec<Qw> = b.chunks(2).map(|p| Qw::new(Rat::from_integer(p[0].clone()), Rat::from_integer(p[1].clone()))).collect();
        let wz = realify(&z.iter().map(|x| &w * x).collect::<Vec<_>>());
        rho_rows.push(solver.solve(&wz)?.iter().map(|x| x.to_integer()).collect());
    }
    let rho = IntMat::from_rows(rho_rows, basis.nrows());
    let target: Vec<Rat> = realify(f).iter().map(|x| x * &scale).collect();
    let c = solver.solve(&target)?;
    if c.iter().any(|x| !x.is_integer()) {
        return None;
    }
    let c: Vec<Int> = c.iter().map(|x| x.to_integer()).collect();
    let eb = eisenstein_basis(&rho).ok()?;
    let coords = eisenstein_coords(&eb, &rho, &c)?;
    (0..6)
        .map(|j| {
            let u = EisInt::zeta_pow(j);
            coords.iter().map(|z| &u * z).collect::<Vec<EisInt>>()
        })
        .min_by_key(|c| lex_key(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rho::run_rho;
    use crate::surface::polyhedra::*;
    use crate::typeiii::build_tower;
    use crate::zlattice::rat;

    fn eh_of(tri: &Triangulation) -> (TypeIIITower, EigenHomology) {
        let tw = build_tower(tri).unwrap();
        let eh = eigen_homology(&tw).unwrap();
        (tw, eh)
    }

    #[test]
    fn corner_values() {
        // deficit 1 at angle pi/3: (2/sqrt 3) e^{i pi/2}
        assert_eq!(corner_value(1, 1).unwrap(), Qw::theta().scale(&rat(2, 3)));
        assert_eq!(corner_value(2, 2).unwrap(), qw(1).scale(&rat(2, 3)));
        assert!(corner_value(1, 0).is_none() && corner_value(3, 3).is_none());
        assert_eq!(end_value(1).unwrap() + end_value(1).unwrap(), rat(2, 1));
        // hermitian symmetry of the table
        for k in 1..=5 {
            for a in 1..6 - k {
                assert_eq!(corner_value(k, a).unwrap().conj(), corner_value(k, 6 - k - a).unwrap());
            }
        }
    }

    #[test]
    fn lift_table_checks() {
        let tri = octahedron();
        let lt = lift_table(&tri);
        assert!(lt.phase.iter().enumerate().all(|(x, p)| x != tri.edge_darts(tri.edge(x))[0] || *p == EisInt::one()));
        assert!(consistency(&tri, &lt).passes());
        let ico = icosahedron();
        // circling a degree-5 vertex turns by the cone angle: zeta^-5 zeta = 1
        let hol = holonomy(&ico, 0);
        assert_eq!(&hol * &EisInt::zeta_pow(5), EisInt::one());
        let mut bad = lift_table(&tri);
        let x = tri.edge_darts(3)[1];
        bad.phase[x] = &bad.phase[x] * &EisInt::omega();
        let rep = consistency(&tri, &bad);
        assert_eq!(rep.faces, vec![x / 3]);
        assert!(!rep.vertices.is_empty());
        assert!(deformation_space_with(&tri, &bad).is_err());
    }

    #[test]
    fn ranks_and_real_parts() {
        for (tri, rank) in [(tetrahedron(), 2), (octahedron(), 4), (icosahedron(), 10), (t2(), 1), (tetrahedron().subdivide(2), 2)] {
            let (tw, eh) = eh_of(&tri);
            assert_eq!(eh.rank, rank);
            assert_eq!(eh.rank, tw.singular_count() - 2);
            assert!(compare_real(&eh).is_empty());
            assert!(local_violations(&eh).is_empty());
        }
    }

    #[test]
    fn roots_on_the_icosahedron() {
        let (_, eh) = eh_of(&icosahedron());
        let three_halves = rat(3, 2);
        for i in 0..eh.lifts.len() {
            assert_eq!(eh.gram[i][i].scale(&three_halves), qw(-3));
        }
        assert_eq!(eh.lifts.len(), 30);
    }

    #[test]
    fn omega_acts_on_q() {
        for tri in [octahedron(), icosahedron(), tetrahedron().subdivide(2)] {
            let (tw, eh) = eh_of(&tri);
            let st = run_rho(&tw).unwrap();
            let om = omega_action(&tw, &eh, &st.descent).unwrap();
            assert_eq!(om.unit, Some(EisInt::omega()));
            assert!(om.checked > 0 && om.skipped == 0);
        }
        let (tw, eh) = eh_of(&t2());
        let st = run_rho(&tw).unwrap();
        assert_eq!(omega_action(&tw, &eh, &st.descent).unwrap().unit, None);
    }

    #[test]
    fn delta_has_norm_t() {
        for tri in [tetrahedron(), octahedron(), icosahedron(), t2(), tetrahedron().subdivide(2)] {
            let (tw, eh) = eh_of(&tri);
            let de = solve_delta(&eh).unwrap();
            assert_eq!(de.norm, rat(tw.t() as i64, 1));
            assert!(de.coords.is_some());
            // orthogonal to every length-zero combination
            let lens = eh.geodesics.lengths();
            for j in 1..lens.len() {
                let mut a = vec![Rat::zero(); lens.len()];
                a[0] = rat(-(lens[j] as i64), 1);
                a[j] = rat(lens[0] as i64, 1);
                assert!(eh.pair(&combine(&a, &eh.lifts), &de.functional).is_zero());
            }
        }
        // icosahedron: 30 in the M^E scale
        let (_, eh) = eh_of(&icosahedron());
        assert_eq!(solve_delta(&eh).unwrap().norm * rat(3, 2), rat(30, 1));
        // rank one: a single coordinate of norm 3
        let (_, eh) = eh_of(&t2());
        let c = solve_delta(&eh).unwrap().coords.unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].norm(), int(3));
    }

    #[test]
    fn delta_is_unit_normalised() {
        let (_, eh) = eh_of(&octahedron());
        let a = solve_delta(&eh).unwrap().coords.unwrap();
        let key = lex_key(&a);
        for j in 1..6 {
            let u = EisInt::zeta_pow(j);
            let b: Vec<EisInt> = a.iter().map(|z| &u * z).collect();
            assert!(lex_key(&b) >= key);
        }
    }
}
