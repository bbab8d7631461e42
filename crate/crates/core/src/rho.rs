//! The order-3 automorphism induced by rotating the sides of every
//! triangle: its descent from the side module to `Q`, the extension across
//! the residual root lattices to `P`, and the rank-2 block `Delta` that
//! completes `P` to an even unimodular lattice of signature `(2, 18)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::eisenstein::{
    check_rho, eisenstein_coords, hermitian_from_symmetric, root_chain, symmetric_from_hermitian, EisError, EisInt, HermLattice,
    ZwithRho,
};
use crate::surface::{phi, Triangulation};
use crate::typeiii::{hex_functionals, sigma_lift, zeta_formula, TowerError, TypeIIITower};
use crate::zlattice::{
    common_denom, dynkin_adjacency, hnf, int, inverse, kernel, rat_mul, rat_to_int,
    rat_vec_mul, reduce, roots, saturation, simple_roots, snf, to_rat_vec, vec_mul, Family, Int, IntLattice,
    IntMat, Rat, RatMat, RowSolver,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RhoError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Eis(#[from] EisError),
    #[error("invariant breach: {check}: {detail}")]
    Breach { check: &'static str, detail: String },
}

fn breach(check: &'static str, detail: String) -> RhoError {
    RhoError::Breach { check, detail }
}

/// `Z^{3t}` with one generator per triangle side (slot = dart), rotated by
/// `phi`, and its anti-invariant part `A` spanned by in-triangle side
/// differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleModule {
    pub t: usize,
    /// `e_{3f} - e_{3f+1}`, `e_{3f+1} - e_{3f+2}` for each face, in slot
    /// coordinates.
    pub a_basis: IntMat,
}

impl TriangleModule {
    pub fn rank(&self) -> usize {
        3 * self.t
    }

    /// Slot `s` goes to `phi(s)`.
    pub fn rotate<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (s, x) in v.iter().enumerate() {
            out[phi(s)] = x.clone();
        }
        out
    }

    /// Negative-definite `A_2^t` form on `A` coordinates.
    pub fn a_gram(&self) -> IntMat {
        let n = 2 * self.t;
        let mut g = IntMat::zeros(n, n);
        for f in 0..self.t {
            let (i, j) = (2 * f, 2 * f + 1);
            g.rows[i][i] = int(-2);
            g.rows[j][j] = int(-2);
            g.rows[i][j] = int(1);
            g.rows[j][i] = int(1);
        }
        g
    }

    /// The rotation on `A` coordinates.
    pub fn rho_a(&self) -> IntMat {
        let n = 2 * self.t;
        let mut r = IntMat::zeros(n, n);
        for f in 0..self.t {
            let (i, j) = (2 * f, 2 * f + 1);
            r.rows[i][j] = int(1);
            r.rows[j][i] = int(-1);
            r.rows[j][j] = int(-1);
        }
        r
    }

    /// `A` coordinates of a slot vector with zero sum on every face.
    pub fn a_coords(&self, x: &[Int]) -> Option<Vec<Int>> {
        let mut out = Vec::with_capacity(2 * self.t);
        for f in 0..self.t {
            let s = &x[3 * f] + &x[3 * f + 1] + &x[3 * f + 2];
            if !s.is_zero() {
                return None;
            }
            out.push(x[3 * f].clone());
            out.push(-&x[3 * f + 2]);
        }
        Some(out)
    }
}

pub fn build_rho(tri: &Triangulation) -> Result<TriangleModule, RhoError> {
    let t = tri.num_faces();
    let mut rows = Vec::with_capacity(2 * t);
    for f in 0..t {
        for s in 0..2 {
            let mut r = vec![Int::zero(); 3 * t];
            r[3 * f + s] = int(1);
            r[3 * f + s + 1] = int(-1);
            rows.push(r);
        }
    }
    let tm = TriangleModule { t, a_basis: IntMat::from_rows(rows, 3 * t) };
    for r in &tm.a_basis.rows {
        let r1 = tm.rotate(r);
        let r2 = tm.rotate(&r1);
        if tm.rotate(&r2) != *r {
            return Err(breach("rho^3 = id on H'", String::new()));
        }
        if r.iter().zip(&r1).zip(&r2).any(|((a, b), c)| !(a + b + c).is_zero()) {
            return Err(breach("1 + rho + rho^2 kills A", String::new()));
        }
        let ac = tm.a_coords(&r1).ok_or_else(|| breach("rho preserves A", String::new()))?;
        let idx = tm.a_basis.rows.iter().position(|x| x == r).unwrap_or(0);
        if ac != tm.rho_a().rows[idx] {
            return Err(breach("rho on A coordinates", String::new()));
        }
    }
    check_rho(&tm.a_gram(), &tm.rho_a())?;
    Ok(tm)
}

/// Gluing `g: H' -> C_1` restricted to `A`, one row per `A` generator.
pub fn glue_on_a(tri: &Triangulation, tm: &TriangleModule) -> IntMat {
    let ne = tri.num_edges();
    let rows = tm
        .a_basis
        .rows
        .iter()
        .map(|r| {
            let mut out = vec![Int::zero(); ne];
            for (s, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    out[tri.edge(s)] += c;
                }
            }
            out
        })
        .collect();
    IntMat::from_rows(rows, ne)
}

/// The descended action on `Q`.
#[derive(Debug, Clone)]
pub struct Descent {
    /// `k_v = sum over darts x at v of e_{phi^-1 x} - e_x`, `A` coordinates.
    pub k1: IntMat,
    /// `ker(A -> C_1 / K_C)`, saturated, `A` coordinates.
    pub k_tilde: IntMat,
    /// `rho_Q` on the coordinates of `q_basis`.
    pub rho_q: IntMat,
    /// `A`-lifts of the `q_basis` degree vectors, orthogonal to `k_tilde`.
    pub q_lifts: RatMat,
    /// The form inherited from `A` on `q_basis`.
    pub a_form: RatMat,
    /// `c` with `<x,y>_P = c <x,y>_A` on `Q`, if one exists.
    pub scale: Option<Rat>,
}

/// The two solvers of `a * gA = c`.
struct ALift {
    solver: RowSolver,
    u: Vec<Vec<Rat>>,
}

impl ALift {
    fn new(ga: &IntMat) -> Self {
        let (h, u, piv) = hnf(ga);
        let r = piv.len();
        ALift { solver: RowSolver::new(&h.select_rows(0..r)), u: u.rows[..r].iter().map(|x| to_rat_vec(x)).collect() }
    }

    fn lift(&self, c: &[Rat]) -> Option<Vec<Rat>> {
        let y = self.solver.solve(c)?;
        Some(rat_vec_mul(&y, &self.u))
    }
}

fn rat_bilinear(x: &[Rat], g: &IntMat, y: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            let gij = &g.rows[i][j];
            if !gij.is_zero() && !yj.is_zero() {
                s += xi * yj * Rat::from_integer(gij.clone());
            }
        }
    }
    s
}

/// `sigma` followed by the projection to `Lbar`, for rational degree vectors
/// satisfying the hexagonal relations.
fn sigma_to_lbar(tw: &TypeIIITower, c: &[Rat]) -> Result<Vec<Rat>, RhoError> {
    let den = common_denom(c);
    let ci: Vec<Int> = c.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
    let s = sigma_lift(tw, &IntMat::from_rows(vec![ci], c.len()))?.remove(0);
    let den2 = common_denom(&s);
    let si: Vec<Int> = s.iter().map(|x| (x * Rat::from_integer(den2.clone())).to_integer()).collect();
    let y = tw.to_lbar(&si).ok_or_else(|| breach("sigma lands in L", String::new()))?;
    let total = Rat::from_integer(&den * &den2);
    Ok(y.iter().map(|x| Rat::from_integer(x.clone()) / &total).collect())
}

pub fn descend_to_q(tw: &TypeIIITower, tm: &TriangleModule) -> Result<Descent, RhoError> {
    let tri = &tw.tri;
    let n = tw.n();
    let na = 2 * tm.t;
    let ne = tri.num_edges();
    let ga = glue_on_a(tri, tm);
    let rho_a = tm.rho_a();

    // K_1 and K_2 = rho(K_1)
    let mut k1_rows = Vec::with_capacity(n);
    for v in 0..n {
        let mut x = vec![Int::zero(); 3 * tm.t];
        for &d in tri.rotation(v) {
            x[crate::surface::phi_inv(d)] += 1;
            x[d] -= 1;
        }
        k1_rows.push(tm.a_coords(&x).ok_or_else(|| breach("k_v in A", format!("vertex {v}")))?);
    }
    let k1 = IntMat::from_rows(k1_rows, na);
    let ker_g = kernel(&ga);
    if reduce(&ker_g) != reduce(&saturation(&reduce(&k1))) || ker_g.nrows() != n - 1 {
        return Err(breach("ker(g|A) = K_1", format!("rank {} vs n - 1 = {}", ker_g.nrows(), n - 1)));
    }
    let k2 = k1.mul(&rho_a);
    let gk2 = k2.mul(&ga);
    for v in 0..n {
        if gk2.rows[v] != zeta_formula(tri, v) {
            return Err(breach("g(rho k_v) = zeta_v", format!("vertex {v}")));
        }
    }

    // K~ = g^{-1}(K_C)
    let mut st = ga.clone();
    st.rows.extend(gk2.rows.iter().cloned());
    let kk = kernel(&st);
    let kt_gen = IntMat::from_rows(kk.rows.iter().map(|r| r[..na].to_vec()).collect(), na);
    let k_tilde = saturation(&reduce(&kt_gen));
    if k_tilde.nrows() != 2 * (n - 1) {
        return Err(breach("rank K~ = 2(n-1)", format!("{} vs {}", k_tilde.nrows(), 2 * (n - 1))));
    }
    if reduce(&k_tilde.mul(&rho_a)) != reduce(&k_tilde) {
        return Err(breach("K~ is rho-invariant", String::new()));
    }

    // projection off K~ under the A-form
    let ag = tm.a_gram();
    let kg = k_tilde.mul(&ag);
    let kgk = inverse(&kg.mul(&k_tilde.transpose()).to_rat()).ok_or_else(|| breach("K~ nondegenerate", String::new()))?;
    let kt_rat = k_tilde.to_rat();
    let kg_rat = kg.to_rat();
    let project = |a: &[Rat]| -> Vec<Rat> {
        let p: Vec<Rat> = kg_rat.iter().map(|row| row.iter().zip(a).map(|(x, y)| x * y).sum()).collect();
        let c = rat_vec_mul(&p, &kgk);
        let sub = rat_vec_mul(&c, &kt_rat);
        a.iter().zip(&sub).map(|(x, y)| x - y).collect()
    };

    let lifter = ALift::new(&ga);
    let ga_rat = ga.to_rat();
    let funcs = hex_functionals(tri);
    let first: Vec<usize> = (0..ne).map(|e| tri.edge_darts(e)[0]).collect();
    let q_solver = RowSolver::new(&tw.q_basis);
    let nq = tw.q_basis.nrows();
    let mut q_lifts = Vec::with_capacity(nq);
    let mut rho_rows = Vec::with_capacity(nq);
    for q in &tw.q_basis.rows {
        let lifted = tw.lift(q);
        let c: Vec<Rat> = first.iter().map(|&y| Rat::from_integer(tw.degree_on(&lifted, y))).collect();
        let a = lifter.lift(&c).ok_or_else(|| breach("deg(Q) lies in g(A)", String::new()))?;
        let a = project(&a);
        let ra = rat_vec_mul(&a, &rho_a.to_rat());
        let c2 = rat_vec_mul(&ra, &ga_rat);
        for f in &funcs {
            let s: Rat = f.iter().zip(&c2).map(|(x, y)| Rat::from_integer(int(*x)) * y).sum();
            if !s.is_zero() {
                return Err(breach("rho preserves the hexagonal relations", String::new()));
            }
        }
        let y = sigma_to_lbar(tw, &c2)?;
        let coords = q_solver.solve(&y).ok_or_else(|| breach("rho_V(Q) lies in Q", String::new()))?;
        rho_rows.push(coords);
        q_lifts.push(a);
    }
    let rho_q = rat_to_int(&rho_rows).ok_or_else(|| breach("rho_Q integral", String::new()))?;
    if nq > 0 {
        check_rho(&tw.q_lattice().gram, &rho_q).map_err(|e| breach("rho_Q", format!("{e}")))?;
    }

    // the two forms on Q
    let gq = tw.q_lattice().gram;
    let a_form: RatMat = q_lifts.iter().map(|x| q_lifts.iter().map(|y| rat_bilinear(x, &ag, y)).collect()).collect();
    let scale = proportionality(&gq, &a_form);
    Ok(Descent { k1, k_tilde, rho_q, q_lifts, a_form, scale })
}

/// The constant `c` with `p = c a` entrywise, if any.
fn proportionality(p: &IntMat, a: &[Vec<Rat>]) -> Option<Rat> {
    let mut scale: Option<Rat> = None;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let y = Rat::from_integer(p.rows[i][j].clone());
            if x.is_zero() {
                if !y.is_zero() {
                    return None;
                }
                continue;
            }
            let r = y / x;
            match &scale {
                None => scale = Some(r),
                Some(s) if *s != r => return None,
                _ => {}
            }
        }
    }
    scale
}

/// A fixed-point-free order-3 isometry of a residual root lattice, as a
/// matrix on the residual basis of the del Pezzo model.
pub fn component_rho(lat: &IntLattice, family: Family, rank: usize) -> Result<IntMat, RhoError> {
    let chain_len = match (family, rank) {
        (Family::A, 2) => 1,
        (Family::D, 4) => 2,
        (Family::E, 6) => 3,
        (Family::E, 8) => 4,
        _ => return Err(breach("residual component carries an Eisenstein structure", format!("{family:?}{rank}"))),
    };
    let model = symmetric_from_hermitian(&root_chain(chain_len))?;
    let sm = simple_roots(&roots(lat).map_err(|e| breach("residual definite", format!("{e:?}")))?);
    let sc = simple_roots(&roots(&model.lattice).map_err(|e| breach("chain definite", format!("{e:?}")))?);
    if sm.len() != rank || sc.len() != rank {
        return Err(breach("simple root counts", format!("{} / {} vs {rank}", sm.len(), sc.len())));
    }
    let adj_m = dynkin_adjacency(&sm, &lat.gram);
    let adj_c = dynkin_adjacency(&sc, &model.lattice.gram);
    let perm = diagram_isomorphism(&adj_c, &adj_m).ok_or_else(|| breach("Dynkin diagrams match", String::new()))?;
    let s_c = IntMat::from_rows(sc, rank).to_rat();
    let s_m = IntMat::from_rows(perm.iter().map(|&i| sm[i].clone()).collect(), rank).to_rat();
    let s_m_inv = inverse(&s_m).ok_or_else(|| breach("simple roots independent", String::new()))?;
    let s_c_inv = inverse(&s_c).ok_or_else(|| breach("simple roots independent", String::new()))?;
    let r = rat_mul(&rat_mul(&rat_mul(&rat_mul(&s_m_inv, &s_c), &model.rho.to_rat()), &s_c_inv), &s_m);
    let r = rat_to_int(&r).ok_or_else(|| breach("component rho integral", String::new()))?;
    check_rho(&lat.gram, &r)?;
    Ok(r)
}

/// A bijection `p` with `adj_a[i] ~ adj_b[p[i]]`, by backtracking.
fn diagram_isomorphism(adj_a: &[Vec<usize>], adj_b: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj_a.len();
    if adj_b.len() != n {
        return None;
    }
    fn go(i: usize, a: &[Vec<usize>], b: &[Vec<usize>], p: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if i == a.len() {
            return true;
        }
        for c in 0..a.len() {
            if used[c] || a[i].len() != b[c].len() {
                continue;
            }
            let ok = (0..i).all(|j| a[i].contains(&j) == b[c].contains(&p[j]));
            if !ok {
                continue;
            }
            used[c] = true;
            p.push(c);
            if go(i + 1, a, b, p, used) {
                return true;
            }
            p.pop();
            used[c] = false;
        }
        false
    }
    let mut p = Vec::with_capacity(n);
    let mut used = vec![false; n];
    go(0, adj_a, adj_b, &mut p, &mut used).then_some(p)
}

fn block_diag(parts: &[IntMat]) -> IntMat {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut m = IntMat::zeros(n, n);
    let mut o = 0;
    for p in parts {
        for i in 0..p.nrows() {
            for j in 0..p.nrows() {
                m.rows[o + i][o + j] = p.rows[i][j].clone();
            }
        }
        o += p.nrows();
    }
    m
}

/// `T * M * T^-1` for a change of basis `T` (rows of the new basis in the
/// old coordinates), asserted integral.
fn conjugate_rat(t: &[Vec<Rat>], t_inv: &[Vec<Rat>], m: &IntMat) -> Option<IntMat> {
    rat_to_int(&rat_mul(&rat_mul(t, &m.to_rat()), t_inv))
}

/// `rho~` on `P` with its Eisenstein structure.
#[derive(Debug, Clone)]
pub struct Extension {
    /// `rho~` on `p_basis` coordinates for every choice of the `D_4`
    /// components that preserves `P`, in mask order. The first is used.
    pub candidates: Vec<(Vec<bool>, IntMat)>,
    pub rho_tilde: IntMat,
    pub pe: HermLattice,
    /// Eisenstein basis, `p_basis` coordinates.
    pub pe_basis: IntMat,
}

/// Per-vertex component isometries in residual coordinates, and whether
/// each is a `D_4`.
fn residual_rhos(tw: &TypeIIITower) -> Result<Vec<(IntMat, bool)>, RhoError> {
    let mut out = Vec::new();
    for v in 0..tw.n() {
        let m = tw.model(v);
        if m.residual.nrows() == 0 {
            continue;
        }
        let lat = m.lattice.sublattice(&m.residual);
        let &[(fam, r)] = m.residual_type.0.as_slice() else {
            return Err(breach("residual lattice is irreducible", format!("vertex {v}")));
        };
        out.push((component_rho(&lat, fam, r)?, fam == Family::D));
    }
    Ok(out)
}

pub fn extend_to_p(tw: &TypeIIITower, desc: &Descent) -> Result<Extension, RhoError> {
    let comps = residual_rhos(tw)?;
    let d4: Vec<usize> = (0..comps.len()).filter(|&i| comps[i].1).collect();
    let mut w = tw.q_basis.clone();
    w.rows.extend(tw.r_basis.rows.iter().cloned());
    let w_solver = RowSolver::new(&w);
    let t: RatMat = tw
        .p_basis
        .rows
        .iter()
        .map(|p| w_solver.solve(&to_rat_vec(p)).ok_or_else(|| breach("P = Q + R over Q", String::new())))
        .collect::<Result<_, _>>()?;
    let t_inv = inverse(&t).ok_or_else(|| breach("P = Q + R over Q", String::new()))?;
    let p_gram = tw.p_lattice().gram;

    let mut candidates = Vec::new();
    for mask in 0u32..(1 << d4.len()) {
        let flips: Vec<bool> = (0..d4.len()).map(|b| mask >> b & 1 == 1).collect();
        let mut parts = vec![desc.rho_q.clone()];
        for (i, (r, _)) in comps.iter().enumerate() {
            let flip = d4.iter().position(|&j| j == i).is_some_and(|b| flips[b]);
            parts.push(if flip { r.mul(r) } else { r.clone() });
        }
        if let Some(rt) = conjugate_rat(&t, &t_inv, &block_diag(&parts)) {
            check_rho(&p_gram, &rt).map_err(|e| breach("rho~ on P", format!("{e}")))?;
            candidates.push((flips, rt));
        }
    }
    let Some((_, rho_tilde)) = candidates.first().cloned() else {
        return Err(breach("some choice of rho_R preserves P", format!("{} D4 components", d4.len())));
    };
    let (pe, pe_basis) = hermitian_from_symmetric(&ZwithRho { lattice: tw.p_lattice(), rho: rho_tilde.clone() })?;
    if !pe.integral_theta {
        return Err(breach("P^E is theta-integral", String::new()));
    }
    Ok(Extension { candidates, rho_tilde, pe, pe_basis })
}

/// `Delta` together with the unimodular lattice `M` obtained by gluing
/// `Lbar` with a vector `delta_0` of norm `|disc Lbar|`. Coordinates on
/// `Lbar (+) Z delta_0` are called extended.
#[derive(Debug, Clone)]
pub struct DeltaBlock {
    pub t: usize,
    pub k: usize,
    /// Basis of `M` in extended coordinates.
    pub m_basis: RatMat,
    pub m_lattice: IntLattice,
    /// `delta = k delta_0` and `delta' = (h - delta) / 2`, in `M` coordinates.
    pub delta: Vec<Int>,
    /// `None` when `h - delta` is not 2-divisible in `M`.
    pub delta_prime: Option<Vec<Int>>,
    /// Gram of `(delta, delta')`.
    pub gram: IntMat,
    /// `rho~ (+) rho_Delta` on `M` coordinates, when it is integral.
    pub rho_m: Option<IntMat>,
    /// `M^E` and its Eisenstein basis (in `M` coordinates), when `rho_m`
    /// exists.
    pub me: Option<(HermLattice, IntMat)>,
    /// `delta` and `h` over `Z[w]` on that basis.
    pub delta_e: Option<Vec<EisInt>>,
    pub h_e: Option<Vec<EisInt>>,
}

impl DeltaBlock {
    /// `h = delta + 2 delta'` in `M`.
    pub fn h_decomposes(&self) -> bool {
        self.delta_prime.is_some()
    }
}

/// Gram `[[t, -t/2], [-t/2, t]]` of `Delta`.
pub fn delta_gram(t: usize) -> Result<IntMat, RhoError> {
    if t % 2 == 1 {
        return Err(breach("t is even", format!("t = {t}")));
    }
    let (a, b) = (int(t as i64), int(-(t as i64) / 2));
    Ok(IntMat::from_rows(vec![vec![a.clone(), b.clone()], vec![b, a]], 2))
}

pub fn build_delta(tw: &TypeIIITower, ext: &Extension) -> Result<DeltaBlock, RhoError> {
    let t = tw.t();
    let gram = delta_gram(t)?;
    let k = crate::typeiii::primitivity_index(tw)?;
    let m = tw.disc();
    let nl = tw.lbar.rank();
    let g = &tw.lbar.gram;

    // generator of disc(Lbar) from the Smith form
    let (d, u, _) = snf(g);
    let nontrivial: Vec<&Int> = d.iter().filter(|x| !x.is_one()).collect();
    if nontrivial.len() > 1 {
        return Err(breach("disc(Lbar) is cyclic", format!("{:?}", d)));
    }
    let m_rat = Rat::from_integer(m.clone());
    let gen: Vec<Rat> = u.rows[nl - 1].iter().map(|x| Rat::from_integer(x.clone()) / &m_rat).collect();
    let gg: Vec<Rat> = (0..nl).map(|j| (0..nl).map(|i| &gen[i] * Rat::from_integer(g.rows[i][j].clone())).sum()).collect();
    if gg.iter().any(|x| !x.is_integer()) {
        return Err(breach("glue generator lies in the dual", String::new()));
    }
    let qg: Rat = gen.iter().zip(&gg).map(|(a, b)| a * b).sum();
    let two = Rat::from_integer(int(2));
    let inv_m = Rat::one() / &m_rat;
    // every admissible glue; for some discriminants more than one
    // overlattice exists and only some of them carry the rotation
    let mut glues = Vec::new();
    let mut a = Int::one();
    while a <= m {
        if a.gcd(&m).is_one() && &a + &a <= m.clone() + int(1) {
            let norm = &qg * Rat::from_integer(&a * &a) + &inv_m;
            if (&norm / &two).is_integer() {
                glues.push(a.clone());
            }
        }
        a += 1;
    }
    let mut first = None;
    for a in &glues {
        let block = glue_delta(tw, ext, &gen, a, k, &gram)?;
        if block.rho_m.is_some() {
            return Ok(block);
        }
        first.get_or_insert(block);
    }
    first.ok_or_else(|| breach("discriminant forms of Lbar and <delta_0> glue", String::new()))
}

/// `M = Lbar + Z delta_0 + Z (a gen + delta_0 / m)` with `delta`, `delta'`
/// and, when `rho~` extends, the Eisenstein structure.
fn glue_delta(
    tw: &TypeIIITower,
    ext: &Extension,
    gen: &[Rat],
    a: &Int,
    k: usize,
    gram: &IntMat,
) -> Result<DeltaBlock, RhoError> {
    let t = tw.t();
    let m = tw.disc();
    let nl = tw.lbar.rank();
    let g = &tw.lbar.gram;
    let two = Rat::from_integer(int(2));
    let m_rat = Rat::from_integer(m.clone());
    let gram = gram.clone();
    // M = Lbar + Z delta_0 + Z (a gen + delta_0 / m)
    let ne = nl + 1;
    let mut gens: Vec<Vec<Int>> = Vec::new();
    for i in 0..ne {
        let mut e = vec![Int::zero(); ne];
        e[i] = m.clone();
        gens.push(e);
    }
    let mut glue: Vec<Int> = gen.iter().map(|x| (x * Rat::from_integer(a * &m)).to_integer()).collect();
    glue.push(int(1));
    gens.push(glue);
    let mb = reduce(&IntMat::from_rows(gens, ne));
    let m_basis: RatMat = mb.rows.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone()) / &m_rat).collect()).collect();
    let mut ext_gram = IntMat::zeros(ne, ne);
    for i in 0..nl {
        for j in 0..nl {
            ext_gram.rows[i][j] = g.rows[i][j].clone();
        }
    }
    ext_gram.rows[nl][nl] = m.clone();
    let mg: RatMat = m_basis
        .iter()
        .map(|x| m_basis.iter().map(|y| rat_bilinear(x, &ext_gram, y)).collect())
        .collect();
    let m_lattice = IntLattice::new(rat_to_int(&mg).ok_or_else(|| breach("M is integral", String::new()))?);
    if !m_lattice.is_even() || !m_lattice.det().abs().is_one() || m_lattice.inertia() != (2, 18, 0) {
        return Err(breach(
            "M is even unimodular of signature (2,18)",
            format!("det {} inertia {:?}", m_lattice.det(), m_lattice.inertia()),
        ));
    }
    let m_solver = RowSolver::new_rat(&m_basis);
    let in_m = |x: &[Rat]| -> Option<Vec<Int>> {
        let c = m_solver.solve(x)?;
        c.iter().all(|v| v.is_integer()).then(|| c.iter().map(|v| v.to_integer()).collect())
    };
    let mut delta_ext = vec![Rat::zero(); ne];
    delta_ext[nl] = Rat::from_integer(int(k as i64));
    let delta = in_m(&delta_ext).ok_or_else(|| breach("delta lies in M", String::new()))?;
    let mut h_ext = to_rat_vec(&tw.h_bar);
    h_ext.push(Rat::zero());
    let dp_ext: Vec<Rat> = h_ext.iter().zip(&delta_ext).map(|(h, d)| (h - d) / &two).collect();
    let delta_prime = in_m(&dp_ext);

    let mut rho_m = None;
    let mut me = None;
    let mut delta_e = None;
    let mut h_e = None;
    if let Some(dp) = &delta_prime {
        let got = IntMat::from_rows(vec![delta.clone(), dp.clone()], ne).gram_under(&m_lattice.gram);
        if got != gram {
            return Err(breach("Gram of (delta, delta')", format!("{:?}", got.to_i64())));
        }
        // W' = P (+) Delta in extended coordinates
        let mut w: RatMat = tw
            .p_basis
            .rows
            .iter()
            .map(|p| {
                let mut r = to_rat_vec(p);
                r.push(Rat::zero());
                r
            })
            .collect();
        w.push(delta_ext.clone());
        w.push(dp_ext.clone());
        let w_solver = RowSolver::new_rat(&w);
        let tmat: RatMat = m_basis.iter().map(|b| w_solver.solve(b).expect("P + Delta spans M over Q")).collect();
        let t_inv = inverse(&tmat).expect("change of basis");
        let rd = IntMat::from_i64(&[&[0, 1], &[-1, -1]]);
        'search: for (_, rt) in &ext.candidates {
            for rdelta in [rd.clone(), rd.mul(&rd)] {
                if let Some(r) = conjugate_rat(&tmat, &t_inv, &block_diag(&[rt.clone(), rdelta.clone()])) {
                    // normalise so that delta goes to delta'
                    let r = if rdelta == rd { r } else { r.mul(&r) };
                    check_rho(&m_lattice.gram, &r).map_err(|e| breach("rho on M", format!("{e}")))?;
                    if vec_mul(&delta, &r) != *dp {
                        return Err(breach("rho(delta) = delta'", String::new()));
                    }
                    rho_m = Some(r);
                    break 'search;
                }
            }
        }
        if let Some(r) = &rho_m {
            let (herm, basis) = hermitian_from_symmetric(&ZwithRho { lattice: m_lattice.clone(), rho: r.clone() })?;
            let de = eisenstein_coords(&basis, r, &delta).ok_or_else(|| breach("delta over Z[w]", String::new()))?;
            let hm = in_m(&h_ext).ok_or_else(|| breach("h lies in M", String::new()))?;
            let he = eisenstein_coords(&basis, r, &hm).ok_or_else(|| breach("h over Z[w]", String::new()))?;
            let th = EisInt::theta();
            if de.iter().map(|x| &th * x).collect::<Vec<_>>() != he {
                return Err(breach("h = theta delta^E", String::new()));
            }
            if herm.h(&de, &de) != EisInt::from_i64(3 * t as i64 / 2, 0) {
                return Err(breach("h(delta^E, delta^E) = 3t/2", format!("{}", herm.h(&de, &de))));
            }
            me = Some((herm, basis));
            delta_e = Some(de);
            h_e = Some(he);
        }
    }
    Ok(DeltaBlock { t, k, m_basis, m_lattice, delta, delta_prime, gram, rho_m, me, delta_e, h_e })
}

/// Every stage of the `rho` construction for one tower.
#[derive(Debug, Clone)]
pub struct RhoStages {
    pub module: TriangleModule,
    pub descent: Descent,
    pub extension: Extension,
    pub delta: DeltaBlock,
}

pub fn run_rho(tw: &TypeIIITower) -> Result<RhoStages, RhoError> {
    let module = build_rho(&tw.tri)?;
    let descent = descend_to_q(tw, &module)?;
    let extension = extend_to_p(tw, &descent)?;
    let delta = build_delta(tw, &extension)?;
    Ok(RhoStages { module, descent, extension, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::polyhedra::*;
    use crate::surface::{enumerate, Orientation};
    use crate::typeiii::build_tower;
    use crate::zlattice::{rat, root_type};
    use alloc::string::ToString;

    fn stages(tri: &Triangulation) -> (TypeIIITower, RhoStages) {
        let tw = build_tower(tri).unwrap();
        let st = run_rho(&tw).unwrap();
        (tw, st)
    }

    #[test]
    fn single_triangle() {
        let tm = build_rho(&t1()).unwrap();
        let g = tm.a_gram().to_i64();
        assert_eq!(g[0][..2], [-2, 1]);
        assert_eq!(g[1][..2], [1, -2]);
        // (x, y, z) -> (z, x, y) on slot values
        assert_eq!(tm.rotate(&[1, 2, 3, 0, 0, 0]), [3, 1, 2, 0, 0, 0]);
    }

    #[test]
    fn delta_gram_t2() {
        assert_eq!(delta_gram(2).unwrap().to_i64(), [[2, -1], [-1, 2]]);
        assert!(delta_gram(3).is_err());
    }

    #[test]
    fn descent_ranks() {
        let (tw, st) = stages(&tetrahedron());
        assert_eq!(st.descent.k_tilde.nrows(), 6);
        assert_eq!(st.descent.rho_q.nrows(), tw.q_basis.nrows());
        let (_, st) = stages(&tetrahedron().subdivide(2));
        assert_eq!(st.descent.k_tilde.nrows(), 2 * (10 - 1));
    }

    #[test]
    fn extension_cases() {
        let (_, st) = stages(&icosahedron());
        assert_eq!(st.extension.pe.rank(), 9);
        let (tw, st) = stages(&t1());
        assert_eq!(root_type(&tw.p_lattice()).unwrap().to_string(), "A2+E8^2");
        assert_eq!(st.extension.pe.rank(), 9);
        let (_, st) = stages(&tetrahedron());
        assert!(st.extension.pe.integral_theta);
    }

    #[test]
    fn scale_ratio_is_not_global() {
        // proportional on these, with different constants
        assert_eq!(stages(&tetrahedron()).1.descent.scale, Some(rat(2, 1)));
        assert_eq!(stages(&octahedron()).1.descent.scale, Some(rat(8, 3)));
        assert_eq!(stages(&icosahedron()).1.descent.scale, None);
    }

    #[test]
    fn delta_block_small_corpus() {
        for tri in enumerate(8, Orientation::Preserving) {
            let (tw, st) = stages(&tri);
            let d = &st.delta;
            assert!(d.h_decomposes(), "{:?}", tri.degrees());
            assert!(d.rho_m.is_some(), "{:?}", tri.degrees());
            assert_eq!(d.t, tw.t());
            let (me, _) = d.me.as_ref().unwrap();
            assert_eq!(me.rank(), 10);
        }
    }
}
