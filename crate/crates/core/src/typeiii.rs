//! The combinatorial Type III K3 surface of a triangulation and its
//! cohomology tower `H > L > Sat K`, `Lbar = L / Sat K`, `P = h^perp`.
//!
//! Each vertex of degree `d` becomes a blown-up plane of degree `d` whose
//! anticanonical cycle is read off the rotation at that vertex: the dart at
//! rotation position `p` carries the `p`-th cycle class.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::surface::{phi, Triangulation};
use crate::zlattice::{
    index_in, int, kernel, quotient_by_isotropic, rank, reduce, root_type, snf, vec_mul, Int,
    IntLattice, IntMat, Rat, RootType, RowSolver,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("no del Pezzo model of degree {0}")]
    DegreeOutOfRange(usize),
    #[error("vertex {vertex}: {reason}")]
    Model { vertex: usize, reason: String },
    #[error("invariant breach: {check}: {detail}")]
    Breach { check: &'static str, detail: String },
}

fn breach(check: &'static str, detail: String) -> TowerError {
    TowerError::Breach { check, detail }
}

/// A blown-up plane in the basis `(L, E_1, ..., E_{9-d})` with its
/// anticanonical cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelPezzoModel {
    pub degree: usize,
    pub lattice: IntLattice,
    pub cycle: Vec<Vec<Int>>,
    /// Basis of the orthogonal complement of the cycle.
    pub residual: IntMat,
    pub residual_type: RootType,
}

impl DelPezzoModel {
    pub fn rank(&self) -> usize {
        10 - self.degree
    }

    /// `-K = 3L - sum E_i`.
    pub fn anticanonical(&self) -> Vec<Int> {
        let mut v = vec![int(-1); self.rank()];
        v[0] = int(3);
        v
    }

    /// Required intersection of the cycle classes `i` and `j`.
    pub fn cycle_pairing(d: usize, i: usize, j: usize) -> i64 {
        if i == j {
            return if d == 1 { 1 } else { -1 };
        }
        if d == 2 {
            return 2;
        }
        let gap = (i + d - j) % d;
        if gap == 1 || gap == d - 1 {
            1
        } else {
            0
        }
    }
}

fn minkowski(x: &[i64], y: &[i64]) -> i64 {
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<i64>()
}

/// Classes `x0 L + sum x_i E_i` with `0 <= x0 <= 3`, `-3 <= x_i <= 1`,
/// square `norm` and anticanonical degree 1.
fn candidate_classes(m: usize, norm: i64) -> Vec<Vec<i64>> {
    fn rec(x: &mut Vec<i64>, m: usize, left: i64, out: &mut Vec<Vec<i64>>) {
        if x.len() == m {
            let deg = 3 * x[0] + x[1..].iter().sum::<i64>();
            if left == 0 && deg == 1 {
                out.push(x.clone());
            }
            return;
        }
        for v in -3..=1i64 {
            if v * v <= left {
                x.push(v);
                rec(x, m, left - v * v, out);
                x.pop();
            }
        }
    }
    let mut out = Vec::new();
    for x0 in 0..=3i64 {
        let left = x0 * x0 - norm;
        if left < 0 {
            continue;
        }
        rec(&mut vec![x0], m, left, &mut out);
    }
    let key = |x: &Vec<i64>| {
        let mass: i64 = x[1..].iter().map(|v| v.abs()).sum();
        let support: Vec<usize> = (1..m).filter(|&i| x[i] != 0).collect();
        (x[0], mass, support, x.clone())
    };
    out.sort_by_key(key);
    out
}

/// The anticanonical cycle of the degree `d` model together with its
/// residual root lattice. The cycle is the first solution of an ordered
/// exhaustive search, so the tables are reproducible.
pub fn del_pezzo_model(d: usize) -> Result<DelPezzoModel, TowerError> {
    if !(1..=6).contains(&d) {
        return Err(TowerError::DegreeOutOfRange(d));
    }
    let m = 10 - d;
    let norm = if d == 1 { 1 } else { -1 };
    let cands = candidate_classes(m, norm);
    let mut anti = vec![-1i64; m];
    anti[0] = 3;

    fn dfs(d: usize, cands: &[Vec<i64>], anti: &[i64], chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == d {
            let m = anti.len();
            return (0..m).all(|c| chosen.iter().map(|&k| cands[k][c]).sum::<i64>() == anti[c]);
        }
        for (k, x) in cands.iter().enumerate() {
            if chosen.contains(&k) {
                continue;
            }
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(j, &c)| minkowski(x, &cands[c]) == DelPezzoModel::cycle_pairing(d, i, j));
            if ok {
                chosen.push(k);
                if dfs(d, cands, anti, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    let mut chosen = Vec::new();
    if !dfs(d, &cands, &anti, &mut chosen) {
        return Err(TowerError::Model { vertex: usize::MAX, reason: format!("no cycle of degree {d}") });
    }
    let mut g = IntMat::zeros(m, m);
    g.rows[0][0] = int(1);
    for i in 1..m {
        g.rows[i][i] = int(-1);
    }
    let lattice = IntLattice::new(g);
    let cycle: Vec<Vec<Int>> = chosen.iter().map(|&k| cands[k].iter().map(|&v| int(v)).collect()).collect();
    let residual = lattice.orth_complement(&IntMat::from_rows(cycle.clone(), m));
    let residual_type = root_type(&lattice.sublattice(&residual))
        .map_err(|e| TowerError::Model { vertex: usize::MAX, reason: format!("residual lattice: {e:?}") })?;
    Ok(DelPezzoModel { degree: d, lattice, cycle, residual, residual_type })
}

/// All six models, indexed by `degree - 1`.
pub fn del_pezzo_models() -> Vec<DelPezzoModel> {
    (1..=6).map(|d| del_pezzo_model(d).expect("models exist for 1..=6")).collect()
}

/// The cohomology tower of a triangulation. Subspaces are stored as row
/// bases; `h_basis` rows are in `H` coordinates, `lbar` coordinates are
/// coefficients on the transversal rows of `l_adapted`.
#[derive(Debug, Clone)]
pub struct TypeIIITower {
    pub tri: Triangulation,
    pub models: Vec<DelPezzoModel>,
    /// Start of each vertex block in `H`.
    pub offsets: Vec<usize>,
    pub h: IntLattice,
    /// Class of every dart in `H` coordinates.
    pub dart_class: Vec<Vec<Int>>,
    /// One generator `class(x) - class(alpha x)` per edge, `x` the first dart.
    pub d_gens: IntMat,
    pub xi: IntMat,
    /// Basis of `L` whose first `sat_k_rank` rows span `Sat K`.
    pub l_adapted: IntMat,
    pub sat_k_rank: usize,
    pub lbar: IntLattice,
    /// Sum of all dart classes, in `H` and in `Lbar` coordinates.
    pub h_vec: Vec<Int>,
    pub h_bar: Vec<Int>,
    /// `P = h^perp` in `Lbar` coordinates.
    pub p_basis: IntMat,
    /// Image of the residual lattices, in `Lbar` and in `H` coordinates.
    pub r_basis: IntMat,
    pub r_ambient: IntMat,
    pub r_type: RootType,
    /// `Q = R^perp` inside `P`, in `Lbar` coordinates.
    pub q_basis: IntMat,
    l_solver: RowSolver,
}

impl TypeIIITower {
    pub fn model(&self, v: usize) -> &DelPezzoModel {
        &self.models[self.tri.degree(v) - 1]
    }

    pub fn n(&self) -> usize {
        self.tri.num_vertices()
    }

    pub fn t(&self) -> usize {
        self.tri.num_faces()
    }

    /// Block embedding of a component vector.
    pub fn embed(&self, v: usize, x: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.h.rank()];
        for (i, c) in x.iter().enumerate() {
            out[self.offsets[v] + i] = c.clone();
        }
        out
    }

    pub fn h_pair(&self, x: &[Int], y: &[Int]) -> Int {
        // H is diagonal
        let mut s = Int::zero();
        for i in 0..x.len() {
            if !x[i].is_zero() && !y[i].is_zero() {
                s += &x[i] * &y[i] * &self.h.gram.rows[i][i];
            }
        }
        s
    }

    /// Coordinates of `x in L` on the adapted basis, `None` outside `L`.
    pub fn l_coords(&self, x: &[Int]) -> Option<Vec<Int>> {
        self.l_solver.solve_int(x)
    }

    /// Image in `Lbar` of a vector of `L`.
    pub fn to_lbar(&self, x: &[Int]) -> Option<Vec<Int>> {
        Some(self.l_coords(x)?[self.sat_k_rank..].to_vec())
    }

    /// The transversal lift in `H` of an `Lbar` vector.
    pub fn lift(&self, y: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.h.rank()];
        for (c, row) in y.iter().zip(&self.l_adapted.rows[self.sat_k_rank..]) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        out
    }

    /// Pairing of `x` against the class of dart `y`: the degree of `x` on
    /// the corresponding double curve.
    pub fn degree_on(&self, x: &[Int], y: usize) -> Int {
        self.h_pair(x, &self.dart_class[y])
    }

    /// `|disc(Lbar)|`.
    pub fn disc(&self) -> Int {
        self.lbar.det().abs()
    }

    pub fn disc_group(&self) -> Vec<Int> {
        self.lbar.disc_group()
    }

    pub fn p_lattice(&self) -> IntLattice {
        self.lbar.sublattice(&self.p_basis)
    }

    pub fn r_lattice(&self) -> IntLattice {
        self.lbar.sublattice(&self.r_basis)
    }

    pub fn q_lattice(&self) -> IntLattice {
        self.lbar.sublattice(&self.q_basis)
    }

    /// Number of vertices of degree other than 6.
    pub fn singular_count(&self) -> usize {
        (0..self.n()).filter(|&v| self.tri.degree(v) != 6).count()
    }
}

/// Builds the tower and asserts its structural invariants.
pub fn build_tower(tri: &Triangulation) -> Result<TypeIIITower, TowerError> {
    build_tower_with(tri, del_pezzo_models())
}

pub fn build_tower_with(tri: &Triangulation, models: Vec<DelPezzoModel>) -> Result<TypeIIITower, TowerError> {
    let n = tri.num_vertices();
    let ne = tri.num_edges();
    let mut offsets = Vec::with_capacity(n);
    let mut size = 0;
    for v in 0..n {
        let d = tri.degree(v);
        if !(1..=6).contains(&d) {
            return Err(TowerError::Model { vertex: v, reason: format!("degree {d} has no model") });
        }
        offsets.push(size);
        size += 10 - d;
    }
    let mut g = IntMat::zeros(size, size);
    for v in 0..n {
        let m = &models[tri.degree(v) - 1];
        for i in 0..m.rank() {
            g.rows[offsets[v] + i][offsets[v] + i] = m.lattice.gram.rows[i][i].clone();
        }
    }
    let h = IntLattice::new(g);
    let embed = |v: usize, x: &[Int]| {
        let mut out = vec![Int::zero(); size];
        for (i, c) in x.iter().enumerate() {
            out[offsets[v] + i] = c.clone();
        }
        out
    };
    let dart_class: Vec<Vec<Int>> = (0..tri.num_darts())
        .map(|x| {
            let v = tri.tail(x);
            embed(v, &models[tri.degree(v) - 1].cycle[tri.pos(x)])
        })
        .collect();
    let sub = |a: &[Int], b: &[Int]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<Int>>();

    let d_rows: Vec<Vec<Int>> = (0..ne)
        .map(|e| {
            let [x, y] = tri.edge_darts(e);
            sub(&dart_class[x], &dart_class[y])
        })
        .collect();
    let d_gens = IntMat::from_rows(d_rows, size);
    let xi_rows: Vec<Vec<Int>> = (0..n)
        .map(|v| {
            let mut s = vec![Int::zero(); size];
            for &x in tri.rotation(v) {
                let y = tri.alpha(x);
                for i in 0..size {
                    s[i] += &dart_class[x][i] - &dart_class[y][i];
                }
            }
            s
        })
        .collect();
    let xi = IntMat::from_rows(xi_rows, size);

    let l_basis = h.orth_complement(&d_gens);
    if l_basis.nrows() != 18 + n {
        return Err(breach("rank L", format!("{} != 18 + n = {}", l_basis.nrows(), 18 + n)));
    }
    let l_lat = h.sublattice(&l_basis);
    let solver = RowSolver::new(&l_basis);
    let mut k_coords = Vec::new();
    for r in &xi.rows {
        k_coords.push(solver.solve_int(r).ok_or_else(|| breach("K in L", String::from("xi not in L")))?);
    }
    let k_coords = IntMat::from_rows(k_coords, l_basis.nrows());
    let (lbar, b, sat_k_rank) =
        quotient_by_isotropic(&l_lat, &k_coords).map_err(|e| breach("K isotropic", format!("{e:?}")))?;
    let l_adapted = b.mul(&l_basis);
    let l_solver = RowSolver::new(&l_adapted);

    let mut h_vec = vec![Int::zero(); size];
    for c in &dart_class {
        for i in 0..size {
            h_vec[i] += &c[i];
        }
    }
    let h_bar = l_solver.solve_int(&h_vec).ok_or_else(|| breach("h in L", String::new()))?[sat_k_rank..].to_vec();
    let p_basis = lbar.orth_complement(&IntMat::from_rows(vec![h_bar.clone()], lbar.rank()));

    let mut r_rows = Vec::new();
    let mut r_parts = Vec::new();
    for v in 0..n {
        let m = &models[tri.degree(v) - 1];
        for r in &m.residual.rows {
            r_rows.push(embed(v, r));
        }
        r_parts.extend(m.residual_type.0.iter().copied());
    }
    r_parts.sort();
    let r_type = RootType(r_parts);
    let r_ambient = IntMat::from_rows(r_rows, size);
    let mut r_bar = Vec::new();
    for r in &r_ambient.rows {
        let c = l_solver.solve_int(r).ok_or_else(|| breach("R in L", String::new()))?;
        r_bar.push(c[sat_k_rank..].to_vec());
    }
    let r_basis = IntMat::from_rows(r_bar, lbar.rank());
    let mut hr = r_basis.clone();
    hr.rows.push(h_bar.clone());
    let q_basis = lbar.orth_complement(&hr);

    let tower = TypeIIITower {
        tri: tri.clone(),
        models,
        offsets,
        h,
        dart_class,
        d_gens,
        xi,
        l_adapted,
        sat_k_rank,
        lbar,
        h_vec,
        h_bar,
        p_basis,
        r_basis,
        r_ambient,
        r_type,
        q_basis,
        l_solver,
    };
    check_tower(&tower)?;
    Ok(tower)
}

/// The invariants every tower must satisfy.
pub fn check_tower(tw: &TypeIIITower) -> Result<(), TowerError> {
    let n = tw.n();
    let t = tw.t();
    let tri = &tw.tri;
    check_models(&tw.models)?;

    let (p, q, z) = tw.h.inertia();
    if (p, q, z) != (n, 3 * n + 12, 0) || tw.h.det().abs() != Int::one() || tw.h.is_even() {
        return Err(breach("H odd unimodular (n, 3n+12)", format!("inertia ({p}, {q}, {z})")));
    }
    for e in 0..tri.num_edges() {
        let [x, y] = tri.edge_darts(e);
        let s = tw.h_pair(&tw.dart_class[x], &tw.dart_class[x]) + tw.h_pair(&tw.dart_class[y], &tw.dart_class[y]);
        let nodal = tri.degree(tri.tail(x)) == 1 || tri.degree(tri.tail(y)) == 1;
        let want = if nodal { 0 } else { -2 };
        if s != int(want) {
            return Err(breach("triple point formula", format!("edge {e}: {s}")));
        }
    }
    for x in 0..tri.num_darts() {
        if tw.degree_on(&tw.h_vec, x) != Int::one() {
            return Err(breach("h has degree 1 on double curves", format!("dart {x}")));
        }
    }
    let mut sum = vec![Int::zero(); tw.h.rank()];
    for r in &tw.xi.rows {
        for i in 0..sum.len() {
            sum[i] += &r[i];
        }
    }
    if sum.iter().any(|x| !x.is_zero()) {
        return Err(breach("sum of xi vanishes", String::new()));
    }

    check_d_over_k(tw)?;

    let lb = &tw.lbar;
    if lb.rank() != 19 || !lb.is_even() {
        return Err(breach("Lbar even of rank 19", format!("rank {}, even {}", lb.rank(), lb.is_even())));
    }
    if lb.inertia() != (1, 18, 0) {
        return Err(breach("Lbar signature (1,18)", format!("{:?}", lb.inertia())));
    }
    let h2 = crate::zlattice::bilinear(&tw.h_bar, &lb.gram, &tw.h_bar);
    if h2 != int(3 * t as i64) {
        return Err(breach("h^2 = 3t", format!("{h2}")));
    }
    let hl = vec_mul(&tw.h_bar, &lb.gram);
    if hl.iter().any(|x| !(x % int(2)).is_zero()) {
        return Err(breach("h pairs evenly with Lbar", String::new()));
    }
    if tw.p_basis.nrows() != 18 || tw.p_lattice().inertia() != (0, 18, 0) {
        return Err(breach("P negative definite of rank 18", String::new()));
    }
    let rank_r = tw.r_ambient.nrows();
    if rank(&tw.r_basis) != rank_r || tw.r_lattice().gram != tw.h.sublattice(&tw.r_ambient).gram {
        return Err(breach("R maps isometrically into Lbar", String::new()));
    }
    if vec_mul(&tw.h_bar, &lb.gram.mul(&tw.r_basis.transpose())).iter().any(|x| !x.is_zero()) {
        return Err(breach("R inside P", String::new()));
    }
    let l = tw.singular_count();
    if tw.q_basis.nrows() + 6 != 2 * l {
        return Err(breach("rank Q = 2l - 6", format!("rank {} with l = {l}", tw.q_basis.nrows())));
    }
    Ok(())
}

fn check_models(models: &[DelPezzoModel]) -> Result<(), TowerError> {
    for m in models {
        let d = m.degree;
        let fail = |what: &str| breach("del Pezzo model", format!("degree {d}: {what}"));
        if m.cycle.len() != d {
            return Err(fail("cycle length"));
        }
        for i in 0..d {
            for j in 0..d {
                let v = crate::zlattice::bilinear(&m.cycle[i], &m.lattice.gram, &m.cycle[j]);
                if v != int(DelPezzoModel::cycle_pairing(d, i, j)) {
                    return Err(fail("cycle intersections"));
                }
            }
        }
        let mut s = vec![Int::zero(); m.rank()];
        for c in &m.cycle {
            for i in 0..s.len() {
                s[i] += &c[i];
            }
        }
        if s != m.anticanonical() {
            return Err(fail("cycle does not sum to -K"));
        }
    }
    Ok(())
}

/// `D cap L = K`, `K` primitive in `D`, and the explicit isometry
/// `D / K -> A_{t-1}` sending an edge generator to the difference of the
/// faces on its two sides.
fn check_d_over_k(tw: &TypeIIITower) -> Result<(), TowerError> {
    let tri = &tw.tri;
    let t = tw.t();
    let d = reduce(&tw.d_gens);
    let gd = tw.h.sublattice(&d);
    let rad = kernel(&gd.gram).mul(&d);
    let k = reduce(&tw.xi);
    if index_in(&k, &rad) != Some(Int::one()) || index_in(&rad, &k) != Some(Int::one()) {
        return Err(breach("D cap L = K", format!("rank rad {}, rank K {}", rad.nrows(), k.nrows())));
    }
    if d.nrows() != k.nrows() + t - 1 {
        return Err(breach("D/K has rank t-1", format!("{} - {}", d.nrows(), k.nrows())));
    }
    let ne = tri.num_edges();
    let image: Vec<Vec<i64>> = (0..ne)
        .map(|e| {
            let [x, y] = tri.edge_darts(e);
            let mut v = vec![0i64; t];
            v[x / 3] += 1;
            v[y / 3] -= 1;
            v
        })
        .collect();
    let gall = tw.d_gens.gram_under(&tw.h.gram);
    for a in 0..ne {
        for b in 0..ne {
            let want = -image[a].iter().zip(&image[b]).map(|(p, q)| p * q).sum::<i64>();
            if gall.rows[a][b] != int(want) {
                return Err(breach("D/K isometric to A_{t-1}", format!("edges {a}, {b}")));
            }
        }
    }
    Ok(())
}

/// `k` with `|disc Lbar| = t / k^2`; checks `2 k^2 | t`.
pub fn primitivity_index(tw: &TypeIIITower) -> Result<usize, TowerError> {
    let t = tw.t();
    let disc = tw.disc().to_usize().unwrap_or(0);
    if disc == 0 || !t.is_multiple_of(disc) {
        return Err(breach("primitivity index", format!("|disc| = {disc} does not divide t = {t}")));
    }
    let k2 = t / disc;
    let k = (1..=k2).find(|k| k * k >= k2).unwrap_or(1);
    if k * k != k2 {
        return Err(breach("primitivity index", format!("t / |disc| = {k2} is not a square")));
    }
    if !t.is_multiple_of(2 * k * k) {
        return Err(breach("2k^2 | t", format!("k = {k}, t = {t}")));
    }
    Ok(k)
}

/// Degree data of the tower on `C_1 = Z^edges`.
#[derive(Debug, Clone)]
pub struct HexRelations {
    /// Kernel of the hexagonal relations, rows in edge coordinates.
    pub c_basis: IntMat,
    /// `deg(xi_i)` per vertex.
    pub zeta: IntMat,
    /// `deg` applied to the adapted basis of `L`.
    pub deg_l: IntMat,
    /// Section `sigma` on the rows of `c_basis`, in `H` coordinates.
    pub sigma: Vec<Vec<Rat>>,
    /// Elements of `C` whose section is integral, in edge coordinates.
    pub c_prime: IntMat,
    /// Invariant factors of `C / C'`.
    pub quotient: Vec<Int>,
    /// Whether `C / C'` exhausts the discriminant group of `R`. This fails
    /// as soon as two special components are linked by edge constraints.
    pub glue_is_full: bool,
}

/// Invariant factors of the subgroup of `R*/R` generated by the orthogonal
/// projections of `L`.
pub fn glue_image(tw: &TypeIIITower) -> Vec<Int> {
    let r = &tw.r_ambient;
    let nr = r.nrows();
    if nr == 0 {
        return Vec::new();
    }
    let gr = tw.h.sublattice(r).gram;
    let inv = crate::zlattice::inverse(&gr.to_rat()).expect("R nondegenerate");
    let pair = tw.h.gram.mul(&r.transpose());
    let mut proj: Vec<Vec<Rat>> = Vec::new();
    for l in &tw.l_adapted.rows {
        let p = vec_mul(l, &pair);
        let c: Vec<Rat> = (0..nr)
            .map(|j| (0..nr).map(|i| Rat::from_integer(p[i].clone()) * &inv[i][j]).sum())
            .collect();
        proj.push(c);
    }
    let mut den = Int::one();
    for x in proj.iter().flatten() {
        den = num_integer::lcm(den, x.denom().clone());
    }
    let mut rows: Vec<Vec<Int>> =
        proj.iter().map(|c| c.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect()).collect();
    for j in 0..nr {
        let mut e = vec![Int::zero(); nr];
        e[j] = den.clone();
        rows.push(e);
    }
    // (projections + R) / R, scaled by den
    let span = reduce(&IntMat::from_rows(rows, nr));
    let (d, _, _) = snf(&span);
    let mut orders: Vec<Int> = d.iter().map(|x| &den / num_integer::gcd(den.clone(), x.clone())).collect();
    orders.retain(|x| !x.is_one());
    if orders.is_empty() { Vec::new() } else { invariant_factors(&orders) }
}

/// Combinatorial degree vector of `xi_v`: `+1` on each dart leaving `v`,
/// `-1` on the edge opposite each corner at `v`.
pub fn zeta_formula(tri: &Triangulation, v: usize) -> Vec<Int> {
    let mut z = vec![Int::zero(); tri.num_edges()];
    for &x in tri.rotation(v) {
        z[tri.edge(x)] += 1;
        z[tri.edge(phi(x))] -= 1;
    }
    z
}

/// Hexagonal relation functionals `d0 - d3 = d2 - d5 = d4 - d1`, two per
/// degree-6 vertex, as columns over the edges.
pub fn hex_functionals(tri: &Triangulation) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for v in 0..tri.num_vertices() {
        if tri.degree(v) != 6 {
            continue;
        }
        let e: Vec<usize> = tri.rotation(v).iter().map(|&x| tri.edge(x)).collect();
        for (a, b, c, d) in [(0, 3, 2, 5), (2, 5, 4, 1)] {
            let mut f = vec![0i64; tri.num_edges()];
            f[e[a]] += 1;
            f[e[b]] -= 1;
            f[e[c]] -= 1;
            f[e[d]] += 1;
            out.push(f);
        }
    }
    out
}

pub fn hex_relations(tw: &TypeIIITower) -> Result<HexRelations, TowerError> {
    let tri = &tw.tri;
    let ne = tri.num_edges();
    let funcs = hex_functionals(tri);
    let c_basis = if funcs.is_empty() {
        IntMat::identity(ne)
    } else {
        let mut m = IntMat::zeros(ne, funcs.len());
        for (j, f) in funcs.iter().enumerate() {
            for i in 0..ne {
                m.rows[i][j] = int(f[i]);
            }
        }
        kernel(&m)
    };

    let first: Vec<usize> = (0..ne).map(|e| tri.edge_darts(e)[0]).collect();
    let deg = |x: &[Int]| first.iter().map(|&y| tw.degree_on(x, y)).collect::<Vec<Int>>();
    for e in 0..ne {
        let [x, y] = tri.edge_darts(e);
        for row in &tw.l_adapted.rows {
            if tw.degree_on(row, x) != tw.degree_on(row, y) {
                return Err(breach("degrees agree across double curves", format!("edge {e}")));
            }
        }
    }
    let deg_l = IntMat::from_rows(tw.l_adapted.rows.iter().map(|r| deg(r)).collect(), ne);

    let zeta = IntMat::from_rows(tw.xi.rows.iter().map(|r| deg(r)).collect(), ne);
    for v in 0..tw.n() {
        if zeta.rows[v] != zeta_formula(tri, v) {
            return Err(breach("zeta matches the combinatorial formula", format!("vertex {v}")));
        }
    }
    let c_solver = RowSolver::new(&c_basis);
    for v in 0..tw.n() {
        if c_solver.solve_int(&zeta.rows[v]).is_none() {
            return Err(breach("zeta in C", format!("vertex {v}")));
        }
    }
    // Im(L -> C_1) = C and ker = R
    if reduce(&deg_l) != reduce(&c_basis) {
        return Err(breach("Im(L -> C_1) = C", format!("rank {} vs {}", rank(&deg_l), c_basis.nrows())));
    }
    let ker = kernel(&deg_l).mul(&tw.l_adapted);
    if reduce(&ker) != reduce(&tw.r_ambient) {
        return Err(breach("ker(L -> C_1) = R", format!("rank {} vs {}", ker.nrows(), tw.r_ambient.nrows())));
    }

    let (sigma, coef) = section(tw, &c_basis)?;
    for s in &sigma {
        for r in &tw.r_ambient.rows {
            let mut acc = Rat::zero();
            for i in 0..s.len() {
                if !r[i].is_zero() && !s[i].is_zero() {
                    acc += &s[i] * Rat::from_integer(&r[i] * &tw.h.gram.rows[i][i]);
                }
            }
            if !acc.is_zero() {
                return Err(breach("sigma(C) orthogonal to R", String::new()));
            }
        }
        for x in s {
            let mut den = x.denom().clone();
            for p in [2, 3] {
                while (&den % int(p)).is_zero() {
                    den /= int(p);
                }
            }
            if !den.is_one() {
                return Err(breach("sigma denominators are 2 and 3", format!("{x}")));
            }
        }
    }

    // C' = {c : sigma(c) an integral combination of double curves}
    let rc = c_basis.nrows();
    let mut den = Int::one();
    for x in coef.iter().flatten() {
        den = num_integer::lcm(den, x.denom().clone());
    }
    let nw = coef.first().map_or(0, |r| r.len());
    let mut stacked = IntMat::zeros(rc + nw, nw);
    for i in 0..rc {
        for j in 0..nw {
            stacked.rows[i][j] = (&coef[i][j] * Rat::from_integer(den.clone())).to_integer();
        }
    }
    for j in 0..nw {
        stacked.rows[rc + j][j] = den.clone();
    }
    let kk = kernel(&stacked);
    let cp_coords = reduce(&IntMat::from_rows(kk.rows.iter().map(|r| r[..rc].to_vec()).collect(), rc));
    let (q, _, _) = snf(&cp_coords);
    let quotient: Vec<Int> = q.into_iter().filter(|x| !x.is_one()).collect();
    let c_prime = cp_coords.mul(&c_basis);

    let mut ar = Vec::new();
    for v in 0..tw.n() {
        ar.extend(tw.h.sublattice(&IntMat::from_rows(
            tw.model(v).residual.rows.iter().map(|r| tw.embed(v, r)).collect(),
            tw.h.rank(),
        )).disc_group());
    }
    let expected = if ar.is_empty() { Vec::new() } else { invariant_factors(&ar) };
    // independent oracle: the image of L in R*/R under orthogonal projection
    let image = glue_image(tw);
    if image != quotient {
        return Err(breach("C/C' equals the glue of L along R", format!("{:?} vs {:?}", quotient, image)));
    }
    let glue_is_full = expected == quotient;
    Ok(HexRelations { c_basis, zeta, deg_l, sigma, c_prime, quotient, glue_is_full })
}

/// `sigma` of each row of `c` (edge coordinates) in `H` coordinates.
pub fn sigma_lift(tw: &TypeIIITower, c: &IntMat) -> Result<Vec<Vec<Rat>>, TowerError> {
    Ok(section(tw, c)?.0)
}

/// Exact pairing in `H (x) Q`.
pub fn h_pair_rat(tw: &TypeIIITower, x: &[Rat], y: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for i in 0..x.len() {
        if !x[i].is_zero() && !y[i].is_zero() {
            s += &x[i] * &y[i] * Rat::from_integer(tw.h.gram.rows[i][i].clone());
        }
    }
    s
}

/// Invariant factors (units dropped) of a direct sum of cyclic groups.
pub fn invariant_factors(orders: &[Int]) -> Vec<Int> {
    let k = orders.len();
    let mut m = IntMat::zeros(k, k);
    for (i, o) in orders.iter().enumerate() {
        m.rows[i][i] = o.abs();
    }
    let (d, _, _) = snf(&m);
    d.into_iter().filter(|x| !x.is_one()).collect()
}

type RatRows = Vec<Vec<Rat>>;

/// Per vertex, the unique combination of cycle classes whose pairings with
/// the cycle reproduce the prescribed degrees; summed over vertices. Rows of
/// `c` must satisfy the hexagonal relations. Also returns the coefficients
/// on the bases of the per-vertex spans of the cycle classes.
fn section(tw: &TypeIIITower, c: &IntMat) -> Result<(RatRows, RatRows), TowerError> {
    let tri = &tw.tri;
    let nh = tw.h.rank();
    let mut out = vec![vec![Rat::zero(); nh]; c.nrows()];
    let mut coefs = vec![Vec::new(); c.nrows()];
    for v in 0..tw.n() {
        let m = tw.model(v);
        let span = reduce(&IntMat::from_rows(m.cycle.clone(), m.rank()));
        // pairing of each span vector with each cycle class
        let pm = IntMat::from_rows(
            span.rows.iter().map(|s| m.cycle.iter().map(|cl| crate::zlattice::bilinear(s, &m.lattice.gram, cl)).collect()).collect(),
            m.cycle.len(),
        );
        let solver = RowSolver::new(&pm);
        for ((row, o), cs) in c.rows.iter().zip(out.iter_mut()).zip(coefs.iter_mut()) {
            let target: Vec<Rat> = tri.rotation(v).iter().map(|&x| Rat::from_integer(row[tri.edge(x)].clone())).collect();
            let coef = solver
                .solve(&target)
                .ok_or_else(|| breach("hexagonal relations", format!("inconsistent degrees at vertex {v}")))?;
            for (cf, s) in coef.iter().zip(&span.rows) {
                for (i, si) in s.iter().enumerate() {
                    if !si.is_zero() {
                        o[tw.offsets[v] + i] += cf * Rat::from_integer(si.clone());
                    }
                }
            }
            cs.extend(coef);
        }
    }
    Ok((out, coefs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt_class(x: &[Int]) -> String {
        use alloc::string::ToString;
        let v: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        v.join(",")
    }

    use crate::surface::polyhedra;

    fn summary(t: &Triangulation) -> (usize, usize, usize, String, Vec<Int>, String) {
        let tw = build_tower(t).unwrap();
        let h2 = crate::zlattice::bilinear(&tw.h_bar, &tw.lbar.gram, &tw.h_bar);
        (
            tw.h.rank(),
            tw.l_adapted.nrows(),
            h2.to_usize().unwrap(),
            format!("{}", tw.r_type),
            tw.disc_group(),
            format!("{}", root_type(&tw.p_lattice()).unwrap()),
        )
    }

    #[test]
    fn tetrahedron_tower() {
        let (h, l, h2, r, disc, _) = summary(&polyhedra::tetrahedron());
        assert_eq!((h, l, h2), (28, 22, 12));
        assert_eq!(r, "D4^4");
        assert_eq!(disc, vec![int(4)]);
    }

    #[test]
    fn two_triangle_towers() {
        let (_, _, h2, r, disc, p) = summary(&polyhedra::t1());
        assert_eq!((h2, r.as_str(), p.as_str()), (6, "A2+E8^2", "A2+E8^2"));
        assert_eq!(disc, vec![int(2)]);
        let (_, _, _, r, disc, p) = summary(&polyhedra::t2());
        assert_eq!((r.as_str(), p.as_str()), ("E6^3", "E6^3"));
        assert_eq!(disc, vec![int(2)]);
        let tw = build_tower(&polyhedra::t2()).unwrap();
        assert_eq!(index_in(&tw.r_basis, &tw.p_basis), Some(int(3)));
    }

    #[test]
    fn hex_relations_small() {
        for t in [polyhedra::tetrahedron(), polyhedra::t1(), polyhedra::t2(), polyhedra::octahedron()] {
            let tw = build_tower(&t).unwrap();
            let hr = hex_relations(&tw).unwrap();
            assert_eq!(hr.c_basis.nrows(), t.num_edges());
        }
        let t = polyhedra::tetrahedron().subdivide(2);
        let tw = build_tower(&t).unwrap();
        let hr = hex_relations(&tw).unwrap();
        assert_eq!(hr.c_basis.nrows(), t.num_edges() - 2 * 6);
    }

    #[test]
    fn model_cycles() {
        let m6 = del_pezzo_model(6).unwrap();
        let got: Vec<String> = m6.cycle.iter().map(|c| fmt_class(c)).collect();
        assert_eq!(got, ["0,1,0,0", "1,-1,-1,0", "0,0,1,0", "1,0,-1,-1", "0,0,0,1", "1,-1,0,-1"]);
        let m2 = del_pezzo_model(2).unwrap();
        assert_eq!(fmt_class(&m2.cycle[1]), "3,-2,-1,-1,-1,-1,-1,-1");
        let types: Vec<String> = (1..=6).map(|d| format!("{}", del_pezzo_model(d).unwrap().residual_type)).collect();
        assert_eq!(types, ["E8", "E6", "D4", "A2", "0", "0"]);
        assert!(del_pezzo_model(7).is_err());
    }
}
