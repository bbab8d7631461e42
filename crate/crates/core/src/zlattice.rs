//! Exact integer linear algebra and integral quadratic forms.
//!
//! Vectors are rows throughout: a sublattice is the row span of an integer
//! matrix in ambient coordinates, and maps act by `x -> x * M`.
//! Definite lattices follow the negative convention, so roots have norm -2.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    pub rows: Vec<Vec<Int>>,
    pub cols: usize,
}

impl IntMat {
    pub fn zeros(r: usize, c: usize) -> Self {
        IntMat { rows: vec![vec![Int::zero(); c]; r], cols: c }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        IntMat { rows, cols }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMat { rows: rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(), cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                t.rows[j][i] = x.clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMat) -> IntMat {
        assert_eq!(self.cols, o.nrows(), "shape mismatch");
        let rows = self.rows.iter().map(|r| vec_mul(r, o)).collect();
        IntMat { rows, cols: o.cols }
    }

    /// `self * G * self^T`, the Gram matrix of the rows under `g`.
    pub fn gram_under(&self, g: &IntMat) -> IntMat {
        let sg = self.mul(g);
        let n = self.nrows();
        let mut out = IntMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(&sg.rows[i], &self.rows[j]);
                out.rows[j][i] = v.clone();
                out.rows[i][j] = v;
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.cols && (0..self.cols).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn select_rows(&self, idx: impl IntoIterator<Item = usize>) -> IntMat {
        IntMat { rows: idx.into_iter().map(|i| self.rows[i].clone()).collect(), cols: self.cols }
    }

    pub fn stack(&self, o: &IntMat) -> IntMat {
        assert_eq!(self.cols, o.cols);
        let mut rows = self.rows.clone();
        rows.extend(o.rows.iter().cloned());
        IntMat { rows, cols: self.cols }
    }

    pub fn neg(&self) -> IntMat {
        IntMat { rows: self.rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect(), cols: self.cols }
    }

    pub fn to_rat(&self) -> Vec<Vec<Rat>> {
        self.rows.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect()
    }

    pub fn to_i64(&self) -> Vec<Vec<i64>> {
        self.rows.iter().map(|r| r.iter().map(|x| x.to_i64().expect("entry fits i64")).collect()).collect()
    }

    pub fn det(&self) -> Int {
        det(self)
    }
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    let mut s = Int::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn vec_mul(v: &[Int], m: &IntMat) -> Vec<Int> {
    let mut out = vec![Int::zero(); m.cols];
    for (x, row) in v.iter().zip(&m.rows) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            if !y.is_zero() {
                *o += x * y;
            }
        }
    }
    out
}

pub fn bilinear(x: &[Int], g: &IntMat, y: &[Int]) -> Int {
    dot(&vec_mul(x, g), y)
}

pub fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

fn axpy(y: &mut [Int], a: &Int, x: &[Int]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

/// Nearest integer to `a / b`.
fn round_div(a: &Int, b: &Int) -> Int {
    let two = Int::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Replaces rows `(r, s)` by `(x r + y s, -b r + a s)`.
fn combine(m: &mut [Vec<Int>], r: usize, s: usize, x: &Int, y: &Int, a: &Int, b: &Int) {
    let (lo, hi) = m.split_at_mut(s.max(r));
    let (pr, ps) = if r < s { (&mut lo[r], &mut hi[0]) } else { (&mut hi[0], &mut lo[s]) };
    for (u, v) in pr.iter_mut().zip(ps.iter_mut()) {
        if u.is_zero() && v.is_zero() {
            continue;
        }
        let nu = x * &*u + y * &*v;
        let nv = a * &*v - b * &*u;
        *u = nu;
        *v = nv;
    }
}

/// Row Hermite normal form `H = U * M` with `U` unimodular. Pivots are
/// positive and entries above a pivot lie in `[0, pivot)`. Returns
/// `(H, U, pivot columns)`; rows past the pivot count are zero.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat, Vec<usize>) {
    let n = m.nrows();
    let mut h = m.rows.clone();
    let mut u = IntMat::identity(n).rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == n {
            break;
        }
        // Euclid across all remaining rows, smallest entry as pivot, which
        // keeps intermediate growth far below pairwise gcd steps
        loop {
            let best = (r..n).filter(|&i| !h[i][c].is_zero()).min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(b) = best else { break };
            h.swap(r, b);
            u.swap(r, b);
            let mut done = true;
            for i in r + 1..n {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = round_div(&h[i][c], &h[r][c]);
                if !q.is_zero() {
                    let q = -q;
                    let (hr, ur) = (h[r].clone(), u[r].clone());
                    axpy(&mut h[i], &q, &hr);
                    axpy(&mut u[i], &q, &ur);
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut().chain(u[r].iter_mut()) {
                *x = -&*x;
            }
        }
        let p = h[r][c].clone();
        for k in 0..r {
            let q = h[k][c].div_floor(&p);
            if !q.is_zero() {
                let q = -q;
                let (hr, ur) = (h[r].clone(), u[r].clone());
                axpy(&mut h[k], &q, &hr);
                axpy(&mut u[k], &q, &ur);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (IntMat { rows: h, cols: m.cols }, IntMat { rows: u, cols: n }, pivots)
}

/// Smith normal form `U * M * V = D` with `d1 | d2 | ...`, all `d_i >= 0`.
/// Returns `(diagonal, U, V)`.
pub fn snf(m: &IntMat) -> (Vec<Int>, IntMat, IntMat) {
    let (nr, nc) = (m.nrows(), m.cols);
    let mut d = m.clone();
    let mut u = IntMat::identity(nr);
    let mut v = IntMat::identity(nc);
    loop {
        let (h, uu, _) = hnf(&d);
        u = uu.mul(&u);
        let (h2, vv, _) = hnf(&h.transpose());
        v = v.mul(&vv.transpose());
        d = h2.transpose();
        let diagonal = (0..nr).all(|i| (0..nc).all(|j| i == j || d.rows[i][j].is_zero()));
        if diagonal {
            break;
        }
    }
    let k = nr.min(nc);
    // make the diagonal a divisor chain
    loop {
        let mut changed = false;
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (d.rows[i][i].clone(), d.rows[j][j].clone());
                if a.is_zero() && b.is_zero() || (!a.is_zero() && (&b % &a).is_zero()) {
                    continue;
                }
                if a.is_zero() {
                    d.rows.swap(i, j);
                    u.rows.swap(i, j);
                    for row in d.rows.iter_mut().chain(v.rows.iter_mut()) {
                        row.swap(i, j);
                    }
                    changed = true;
                    continue;
                }
                let e = a.extended_gcd(&b);
                let (ag, bg) = (&a / &e.gcd, &b / &e.gcd);
                combine(&mut u.rows, i, j, &e.x, &e.y, &ag, &bg);
                // V <- V * [[1, -y b/g], [1, x a/g]]
                let c1 = -(&e.y * &bg);
                let c2 = &e.x * &ag;
                for row in v.rows.iter_mut() {
                    let (vi, vj) = (row[i].clone(), row[j].clone());
                    row[i] = &vi + &vj;
                    row[j] = &vi * &c1 + &vj * &c2;
                }
                d.rows[i][i] = e.gcd.clone();
                d.rows[j][j] = &ag * &b;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..k {
        if d.rows[i][i].is_negative() {
            d.rows[i][i] = -&d.rows[i][i];
            for x in u.rows[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
    ((0..k).map(|i| d.rows[i][i].clone()).collect(), u, v)
}

/// Basis of `{x : x * M = 0}`; always saturated.
pub fn kernel(m: &IntMat) -> IntMat {
    let (_, u, piv) = hnf(m);
    let rows = u.rows[piv.len()..].to_vec();
    let k = IntMat { rows, cols: m.nrows() };
    reduce(&k)
}

/// Canonical basis (nonzero rows of the HNF) of the row span.
pub fn reduce(m: &IntMat) -> IntMat {
    let (h, _, piv) = hnf(m);
    IntMat { rows: h.rows[..piv.len()].to_vec(), cols: m.cols }
}

pub fn rank(m: &IntMat) -> usize {
    reduce(m).nrows()
}

/// Smallest primitive sublattice containing the row span.
pub fn saturation(m: &IntMat) -> IntMat {
    if m.nrows() == 0 {
        return IntMat::zeros(0, m.cols);
    }
    // vectors dot-orthogonal to the span, then their orthogonal again
    let w = kernel(&m.transpose());
    if w.nrows() == 0 {
        return IntMat::identity(m.cols);
    }
    kernel(&w.transpose())
}

pub fn is_primitive(m: &IntMat) -> bool {
    let r = reduce(m);
    r == reduce(&saturation(&r))
}

/// Index of the row span of `sub` inside the row span of `sup`
/// (same rank required); `None` if `sub` is not contained in `sup`.
pub fn index_in(sub: &IntMat, sup: &IntMat) -> Option<Int> {
    let sup = reduce(sup);
    let solver = RowSolver::new(&sup);
    let mut coords = Vec::new();
    for r in &sub.rows {
        coords.push(solver.solve_int(r)?);
    }
    let c = reduce(&IntMat { rows: coords, cols: sup.nrows() });
    if c.nrows() != sup.nrows() {
        return None;
    }
    Some(c.det().abs())
}

/// Unimodular matrix whose first rows are those of the primitive `s`.
pub fn complete_basis(s: &IntMat) -> IntMat {
    let n = s.cols;
    let r = s.nrows();
    let (h, u, _) = hnf(&s.transpose());
    // s * u^T = h^T, so s = h^T * (u^T)^-1 and the rows of (u^T)^-1 extend s
    let top = IntMat { rows: h.rows[..r].to_vec(), cols: r };
    assert_eq!(top.det().abs(), Int::one(), "sublattice is not primitive");
    let inv = inverse(&u.transpose().to_rat()).expect("unimodular");
    let mut rows = s.rows.clone();
    for row in &inv[r..] {
        rows.push(row.iter().map(|x| x.to_integer()).collect());
    }
    let b = IntMat { rows, cols: n };
    debug_assert_eq!(b.det().abs(), Int::one());
    b
}

/// Determinant by fraction-free elimination.
pub fn det(m: &IntMat) -> Int {
    let n = m.nrows();
    assert_eq!(n, m.cols, "square matrix required");
    if n == 0 {
        return Int::one();
    }
    let mut a = m.rows.clone();
    let mut sign = false;
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = !sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Inverse of a square rational matrix.
///
/// Rows are cleared of denominators and the integer matrix is inverted by
/// fraction-free Gauss-Jordan elimination, which keeps every entry a minor.
pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let scales: Vec<Int> = m.iter().map(common_denom).collect();
    let mut a: Vec<Vec<Int>> = m
        .iter()
        .zip(&scales)
        .enumerate()
        .map(|(i, (r, d))| {
            let d = Rat::from_integer(d.clone());
            let mut row: Vec<Int> = r.iter().map(|x| (x * &d).to_integer()).collect();
            row.extend((0..n).map(|j| if i == j { Int::one() } else { Int::zero() }));
            row
        })
        .collect();
    let mut prev = Int::one();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let pivot_row = a[c].clone();
        let piv = pivot_row[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == c {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                let v = &piv * &*x - &f * y;
                *x = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = piv;
    }
    // now a = [det I | det A'^-1] up to the row swaps already applied
    let det = Rat::from_integer(prev);
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| Rat::from_integer(a[i][n + j].clone()) * Rat::from_integer(scales[j].clone()) / &det).collect())
            .collect(),
    )
}

pub type RatMat = Vec<Vec<Rat>>;

pub fn rat_vec_mul(v: &[Rat], m: &[Vec<Rat>]) -> Vec<Rat> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![Rat::zero(); cols];
    for (x, row) in v.iter().zip(m) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            if !y.is_zero() {
                *o += x * y;
            }
        }
    }
    out
}

pub fn rat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> RatMat {
    a.iter().map(|r| rat_vec_mul(r, b)).collect()
}

pub fn rat_identity(n: usize) -> RatMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
}

/// Integer matrix if every entry is integral.
pub fn rat_to_int(m: &[Vec<Rat>]) -> Option<IntMat> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rows = Vec::with_capacity(m.len());
    for r in m {
        let mut row = Vec::with_capacity(cols);
        for x in r {
            if !x.is_integer() {
                return None;
            }
            row.push(x.to_integer());
        }
        rows.push(row);
    }
    Some(IntMat { rows, cols })
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Least common multiple of the denominators.
pub fn common_denom<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Int {
    let mut d = Int::one();
    for x in xs {
        d = d.lcm(x.denom());
    }
    d
}

/// Solves `c * B = v` for a fixed basis `B` with independent rows.
#[derive(Clone, Debug)]
pub struct RowSolver {
    pivots: Vec<usize>,
    inv: Vec<Vec<Rat>>,
    basis: Vec<Vec<Rat>>,
}

impl RowSolver {
    pub fn new(b: &IntMat) -> Self {
        Self::new_rat(&b.to_rat())
    }

    pub fn new_rat(b: &[Vec<Rat>]) -> Self {
        let r = b.len();
        let cols = b.first().map_or(0, |x| x.len());
        // greedy choice of independent columns via elimination on a copy
        let mut a: Vec<Vec<Rat>> = b.to_vec();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..cols {
            if row == r {
                break;
            }
            let Some(p) = (row..r).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(row, p);
            let inv = a[row][c].recip();
            for i in row + 1..r {
                if !a[i][c].is_zero() {
                    let f = &a[i][c] * &inv;
                    let src = a[row].clone();
                    for (x, y) in a[i].iter_mut().zip(&src) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(c);
            row += 1;
        }
        assert_eq!(pivots.len(), r, "basis rows are dependent");
        let sq: Vec<Vec<Rat>> = b.iter().map(|x| pivots.iter().map(|&c| x[c].clone()).collect()).collect();
        let inv = inverse(&sq).expect("pivot block invertible");
        RowSolver { pivots, inv, basis: b.to_vec() }
    }

    pub fn solve(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let r = self.pivots.len();
        let mut c = vec![Rat::zero(); r];
        for (k, &p) in self.pivots.iter().enumerate() {
            if v[p].is_zero() {
                continue;
            }
            for j in 0..r {
                c[j] += &v[p] * &self.inv[k][j];
            }
        }
        // verify on all coordinates
        for col in 0..v.len() {
            let mut s = Rat::zero();
            for j in 0..r {
                if !c[j].is_zero() {
                    s += &c[j] * &self.basis[j][col];
                }
            }
            if s != v[col] {
                return None;
            }
        }
        Some(c)
    }

    pub fn solve_int(&self, v: &[Int]) -> Option<Vec<Int>> {
        let vr: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let c = self.solve(&vr)?;
        c.into_iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
    }
}

/// Symmetric integral bilinear form on `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    pub gram: IntMat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    NotOrthogonal,
    Degenerate,
    Indefinite,
}

impl IntLattice {
    pub fn new(gram: IntMat) -> Self {
        assert!(gram.is_symmetric(), "gram must be symmetric");
        IntLattice { gram }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(IntMat::from_i64(rows))
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.rows[i][i].is_even())
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    /// Counts of positive, negative and zero squares.
    pub fn inertia(&self) -> (usize, usize, usize) {
        inertia(&self.gram.to_rat())
    }

    pub fn signature(&self) -> Result<(usize, usize), LatticeError> {
        match self.inertia() {
            (p, q, 0) => Ok((p, q)),
            _ => Err(LatticeError::Degenerate),
        }
    }

    /// Invariant factors of the discriminant group, units dropped.
    pub fn disc_group(&self) -> Vec<Int> {
        let (d, _, _) = snf(&self.gram);
        d.into_iter().filter(|x| !x.is_one()).collect()
    }

    pub fn sublattice(&self, basis: &IntMat) -> IntLattice {
        IntLattice::new(basis.gram_under(&self.gram))
    }

    /// Vectors of the lattice pairing to zero with every row of `s`.
    pub fn orth_complement(&self, s: &IntMat) -> IntMat {
        if s.nrows() == 0 {
            return IntMat::identity(self.rank());
        }
        kernel(&self.gram.mul(&s.transpose()))
    }

    pub fn direct_sum(parts: &[IntLattice]) -> IntLattice {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut g = IntMat::zeros(n, n);
        let mut o = 0;
        for p in parts {
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    g.rows[o + i][o + j] = p.gram.rows[i][j].clone();
                }
            }
            o += p.rank();
        }
        IntLattice::new(g)
    }

    pub fn scaled(&self, c: i64) -> IntLattice {
        let c = int(c);
        IntLattice::new(IntMat {
            rows: self.gram.rows.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect(),
            cols: self.gram.cols,
        })
    }
}

fn inertia(g: &[Vec<Rat>]) -> (usize, usize, usize) {
    let mut a = g.to_vec();
    let mut n = a.len();
    let (mut p, mut q) = (0, 0);
    let mut idx: Vec<usize> = (0..n).collect();
    while n > 0 {
        // pick a nonzero diagonal, or create one by a congruence
        let mut piv = idx.iter().copied().find(|&i| !a[i][i].is_zero());
        if piv.is_none() {
            let pair = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
            let Some((i, j)) = pair else { break };
            // row/col i += row/col j
            let m = a.len();
            for k in 0..m {
                let v = a[j][k].clone();
                a[i][k] += v;
            }
            for k in 0..m {
                let v = a[k][j].clone();
                a[k][i] += v;
            }
            piv = Some(i);
        }
        let k = piv.unwrap();
        let pk = a[k][k].clone();
        if pk.is_positive() {
            p += 1;
        } else {
            q += 1;
        }
        idx.retain(|&i| i != k);
        for &i in &idx {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pk;
            for &j in &idx {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for &i in &idx {
            a[i][k] = Rat::zero();
            a[k][i] = Rat::zero();
        }
        n -= 1;
    }
    let z = g.len() - p - q;
    (p, q, z)
}

/// Quotient of `gram` by the saturation of an isotropic sublattice `k` lying
/// in the radical. Returns the quotient lattice and the full unimodular basis
/// whose first `rank(Sat k)` rows span `Sat k`; the remaining rows are the
/// transversal carrying the quotient form.
pub fn quotient_by_isotropic(l: &IntLattice, k: &IntMat) -> Result<(IntLattice, IntMat, usize), LatticeError> {
    let kg = k.mul(&l.gram);
    if kg.rows.iter().flatten().any(|x| !x.is_zero()) {
        return Err(LatticeError::NotOrthogonal);
    }
    let sat = saturation(&reduce(k));
    let r = sat.nrows();
    let b = if r == 0 { IntMat::identity(l.rank()) } else { complete_basis(&sat) };
    let trans = b.select_rows(r..l.rank());
    let q = l.sublattice(&trans);
    Ok((q, b, r))
}

/// Lattice vectors `x != 0` with `-bound <= x.x < 0` of a negative-definite
/// lattice, one per sign pair, with their norms.
pub fn short_vectors(l: &IntLattice, bound: i64) -> Result<Vec<(Vec<Int>, Int)>, LatticeError> {
    let n = l.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (p, _, z) = l.inertia();
    if p != 0 || z != 0 {
        return Err(LatticeError::Indefinite);
    }
    let (q, t) = pair_reduce(&l.gram.neg());
    let qr = q.to_rat();
    // Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2
    let mut d = vec![Rat::zero(); n];
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut a = qr.clone();
    for i in 0..n {
        d[i] = a[i][i].clone();
        for j in i + 1..n {
            mu[i][j] = &a[i][j] / &d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let v = &mu[i][j] * &a[i][k];
                a[j][k] -= v;
            }
        }
    }
    let bound = Rat::from_integer(int(bound));
    let mut out = Vec::new();
    let mut x = vec![Int::zero(); n];
    enumerate_level(n - 1, &bound, &d, &mu, &mut x, &mut out);
    let mut res = Vec::new();
    for v in out {
        if v.iter().all(|c| c.is_zero()) {
            continue;
        }
        // one per sign pair: first nonzero coordinate positive
        let lead = v.iter().find(|c| !c.is_zero()).unwrap();
        if lead.is_negative() {
            continue;
        }
        let w = vec_mul(&v, &t);
        let norm = bilinear(&w, &l.gram, &w);
        res.push((w, norm));
    }
    res.sort();
    Ok(res)
}

fn enumerate_level(i: usize, rem: &Rat, d: &[Rat], mu: &[Vec<Rat>], x: &mut Vec<Int>, out: &mut Vec<Vec<Int>>) {
    let n = d.len();
    let mut c = Rat::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            c += &mu[i][j] * Rat::from_integer(x[j].clone());
        }
    }
    let fits = |xi: &Int| {
        let s = Rat::from_integer(xi.clone()) + &c;
        &d[i] * &s * &s <= *rem
    };
    let x0 = (-&c).round().to_integer();
    if !fits(&x0) {
        return;
    }
    let mut lo = x0.clone();
    while fits(&(&lo - 1)) {
        lo -= 1;
    }
    let mut hi = x0;
    while fits(&(&hi + 1)) {
        hi += 1;
    }
    let mut xi = lo;
    while xi <= hi {
        let s = Rat::from_integer(xi.clone()) + &c;
        let left = rem - &d[i] * &s * &s;
        x[i] = xi.clone();
        if i == 0 {
            out.push(x.clone());
        } else {
            enumerate_level(i - 1, &left, d, mu, x, out);
        }
        xi += 1;
    }
    x[i] = Int::zero();
}

/// Pairwise size reduction of a positive-definite Gram. Returns the reduced
/// Gram and the transform whose rows are the new basis in old coordinates.
fn pair_reduce(q: &IntMat) -> (IntMat, IntMat) {
    let n = q.nrows();
    let mut g = q.clone();
    let mut t = IntMat::identity(n);
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let gij = g.rows[i][j].clone();
                let gjj = g.rows[j][j].clone();
                if (&gij * int(2)).abs() <= gjj {
                    continue;
                }
                let m = Rat::new(gij, gjj).round().to_integer();
                // b_i -= m b_j
                let rj = t.rows[j].clone();
                axpy(&mut t.rows[i], &(-&m), &rj);
                let gj: Vec<Int> = g.rows[j].clone();
                axpy(&mut g.rows[i], &(-&m), &gj);
                for k in 0..n {
                    let v = g.rows[k][j].clone();
                    g.rows[k][i] -= &m * v;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // order by norm so the enumeration starts from long vectors
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| g.rows[a][a].cmp(&g.rows[b][b]));
    let t2 = t.select_rows(idx.iter().copied());
    let g2 = {
        let mut m = IntMat::zeros(n, n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.rows[a][b] = g.rows[i][j].clone();
            }
        }
        m
    };
    (g2, t2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A,
    D,
    E,
}

/// Multiset of irreducible ADE components, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootType(pub Vec<(Family, usize)>);

impl RootType {
    pub fn rank(&self) -> usize {
        self.0.iter().map(|c| c.1).sum()
    }

    pub fn root_count(&self) -> usize {
        self.0
            .iter()
            .map(|&(f, n)| match (f, n) {
                (Family::A, n) => n * (n + 1),
                (Family::D, n) => 2 * n * (n - 1),
                (Family::E, 6) => 72,
                (Family::E, 7) => 126,
                (Family::E, _) => 240,
            })
            .sum()
    }

    pub fn parse(s: &str) -> Option<RootType> {
        let mut out = Vec::new();
        if s == "0" {
            return Some(RootType(out));
        }
        for part in s.split('+') {
            let (base, mult) = match part.split_once('^') {
                Some((b, m)) => (b, m.parse().ok()?),
                None => (part, 1usize),
            };
            let f = match base.chars().next()? {
                'A' => Family::A,
                'D' => Family::D,
                'E' => Family::E,
                _ => return None,
            };
            let r: usize = base[1..].parse().ok()?;
            for _ in 0..mult {
                out.push((f, r));
            }
        }
        out.sort();
        Some(RootType(out))
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut counts: BTreeMap<(Family, usize), usize> = BTreeMap::new();
        for c in &self.0 {
            *counts.entry(*c).or_default() += 1;
        }
        let mut first = true;
        for ((fam, r), m) in counts {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "{:?}{}", fam, r)?;
            if m > 1 {
                write!(f, "^{}", m)?;
            }
        }
        Ok(())
    }
}

/// Roots of a negative-definite lattice, both signs.
pub fn roots(l: &IntLattice) -> Result<Vec<Vec<Int>>, LatticeError> {
    let mut out = Vec::new();
    for (v, n) in short_vectors(l, 2)? {
        if n == int(-2) {
            out.push(v.iter().map(|x| -x).collect());
            out.push(v);
        }
    }
    Ok(out)
}

/// Simple roots of the root system in `roots`, for a generic positivity.
pub fn simple_roots(roots: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = roots.first().map_or(0, |r| r.len());
    // weights grow fast enough that no root is orthogonal to them in practice;
    // a collision is detected and retried with a different seed
    for seed in 1u64.. {
        let w: Vec<Int> = (0..n).map(|i| int(((i as u64 + 1) * 7919 + seed * 104729) as i64 * (1 << (i % 13)))).collect();
        let f = |r: &[Int]| dot(r, &w);
        if roots.iter().any(|r| f(r).is_zero()) {
            continue;
        }
        let pos: Vec<&Vec<Int>> = roots.iter().filter(|r| f(r).is_positive()).collect();
        let set: BTreeSet<&Vec<Int>> = pos.iter().copied().collect();
        let mut simple = Vec::new();
        for a in &pos {
            let fa = f(a);
            let decomposable = pos.iter().any(|b| {
                if f(b) >= fa {
                    return false;
                }
                let d: Vec<Int> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                set.contains(&d)
            });
            if !decomposable {
                simple.push((*a).clone());
            }
        }
        simple.sort();
        return simple;
    }
    unreachable!()
}

/// Classifies a simply-laced Dynkin diagram given by its adjacency lists.
pub fn classify_dynkin(adj: &[Vec<usize>]) -> RootType {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            for &y in &adj[comp[k]] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
            k += 1;
        }
        let r = comp.len();
        let branch: Vec<usize> = comp.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
        let edges: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
        assert_eq!(edges + 1, r, "Dynkin diagram must be a tree");
        if branch.is_empty() {
            out.push((Family::A, r));
            continue;
        }
        assert!(branch.len() == 1 && adj[branch[0]].len() == 3, "not a simply-laced Dynkin diagram");
        let b = branch[0];
        let mut arms: Vec<usize> = adj[b]
            .iter()
            .map(|&start| {
                let (mut prev, mut cur, mut len) = (b, start, 1);
                loop {
                    let next: Vec<usize> = adj[cur].iter().copied().filter(|&y| y != prev).collect();
                    match next.len() {
                        0 => break len,
                        1 => {
                            prev = cur;
                            cur = next[0];
                            len += 1;
                        }
                        _ => panic!("not a simply-laced Dynkin diagram"),
                    }
                }
            })
            .collect();
        arms.sort();
        match arms.as_slice() {
            [1, 1, _] => out.push((Family::D, r)),
            [1, 2, 2] => out.push((Family::E, 6)),
            [1, 2, 3] => out.push((Family::E, 7)),
            [1, 2, 4] => out.push((Family::E, 8)),
            _ => panic!("not a simply-laced Dynkin diagram"),
        }
    }
    out.sort();
    RootType(out)
}

/// Dynkin adjacency of simple roots under `gram`.
pub fn dynkin_adjacency(simple: &[Vec<Int>], gram: &IntMat) -> Vec<Vec<usize>> {
    let n = simple.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && !bilinear(&simple[i], gram, &simple[j]).is_zero() {
                adj[i].push(j);
            }
        }
    }
    adj
}

/// ADE type of the sublattice generated by the roots.
pub fn root_type(l: &IntLattice) -> Result<RootType, LatticeError> {
    let rs = roots(l)?;
    if rs.is_empty() {
        return Ok(RootType::default());
    }
    let simple = simple_roots(&rs);
    let rt = classify_dynkin(&dynkin_adjacency(&simple, &l.gram));
    debug_assert_eq!(rt.root_count(), rs.len());
    Ok(rt)
}

/// Isometry invariants; equal for isometric lattices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    pub rank: usize,
    pub inertia: (usize, usize, usize),
    pub disc_group: Vec<Int>,
    pub even: bool,
    /// Counts of vectors by norm magnitude `1..=bound`, one per sign pair;
    /// definite lattices only.
    pub norm_counts: Option<Vec<usize>>,
    pub root_type: Option<RootType>,
}

pub fn fingerprint(l: &IntLattice, bound: i64) -> Fingerprint {
    let inertia = l.inertia();
    let (p, q, z) = inertia;
    let definite = z == 0 && (p == 0 || q == 0) && l.rank() > 0;
    let (norm_counts, root_type) = if definite {
        let neg = if q == 0 { IntLattice::new(l.gram.neg()) } else { l.clone() };
        let sv = short_vectors(&neg, bound).expect("definite");
        let mut counts = vec![0usize; bound as usize];
        for (_, n) in &sv {
            let k = (-n).to_usize().unwrap();
            counts[k - 1] += 1;
        }
        (Some(counts), Some(root_type(&neg).expect("definite")))
    } else {
        (None, None)
    };
    Fingerprint { rank: l.rank(), inertia, disc_group: l.disc_group(), even: l.is_even(), norm_counts, root_type }
}

pub fn fmt_ints(v: &[Int]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&alloc::format!("{}", x));
    }
    s
}

/// Standard negative-definite Cartan-type Grams.
pub mod standard {
    use super::*;

    /// Gram of a simply-laced root lattice from its Dynkin edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> IntLattice {
        let mut g = IntMat::zeros(n, n);
        for i in 0..n {
            g.rows[i][i] = int(-2);
        }
        for &(a, b) in edges {
            g.rows[a][b] = int(1);
            g.rows[b][a] = int(1);
        }
        IntLattice::new(g)
    }

    pub fn a(n: usize) -> IntLattice {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        from_edges(n, &e)
    }

    pub fn d(n: usize) -> IntLattice {
        let mut e: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
        e.push((n - 3, n - 1));
        from_edges(n, &e)
    }

    pub fn e(n: usize) -> IntLattice {
        // chain 0..n-2 with node n-1 attached to node 2
        let mut ed: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
        ed.push((2, n - 1));
        from_edges(n, &ed)
    }

    pub fn u() -> IntLattice {
        IntLattice::from_i64(&[&[0, 1], &[1, 0]])
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn hnf_is_canonical_and_exact() {
        let m = IntMat::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (h, u, piv) = hnf(&m);
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().abs(), int(1));
        assert_eq!(piv.len(), 3);
        let (h2, _, _) = hnf(&IntMat::from_rows(vec![m.rows[2].clone(), m.rows[0].clone(), m.rows[1].clone()], 3));
        assert_eq!(h, h2);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&IntMat::identity(3)).0, ivec(&[1, 1, 1]));
        let m = IntMat::from_i64(&[&[2, 4], &[6, 8]]);
        let (d, u, v) = snf(&m);
        assert_eq!(d, ivec(&[2, 4]));
        assert_eq!(u.mul(&m).mul(&v), IntMat::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(snf(&a(2).gram).0, ivec(&[1, 3]));
    }

    #[test]
    fn e8_basics() {
        let e8 = e(8);
        assert_eq!(e8.det(), int(1));
        assert_eq!(e8.signature(), Ok((0, 8)));
        assert!(e8.is_even());
        assert_eq!(roots(&e8).unwrap().len(), 240);
        assert_eq!(root_type(&e8).unwrap().to_string(), "E8");
        assert_eq!(a(2).disc_group(), ivec(&[3]));
    }

    #[test]
    fn short_vectors_small() {
        assert_eq!(short_vectors(&a(2), 2).unwrap().len(), 3);
        assert!(short_vectors(&IntLattice::from_i64(&[&[-4]]), 2).unwrap().is_empty());
    }

    #[test]
    fn root_types() {
        for (l, s) in [(d(4), "D4"), (d(5), "D5"), (e(6), "E6"), (e(7), "E7"), (a(5), "A5")] {
            assert_eq!(root_type(&l).unwrap().to_string(), s);
        }
        let sum = IntLattice::direct_sum(&[e(8), a(2), e(8)]);
        let rt = root_type(&sum).unwrap();
        assert_eq!(rt.to_string(), "A2+E8^2");
        assert_eq!(rt.root_count(), 486);
        assert_eq!(RootType::parse("A2+E8^2"), Some(rt));
    }

    #[test]
    fn complements_and_quotients() {
        let l = IntLattice::from_i64(&[&[1, 0], &[0, -1]]);
        let c = l.orth_complement(&IntMat::from_i64(&[&[1, 0]]));
        assert_eq!(c, IntMat::from_i64(&[&[0, 1]]));
        let s = saturation(&IntMat::from_i64(&[&[2, 0]]));
        assert_eq!(s, IntMat::from_i64(&[&[1, 0]]));
        assert!(matches!(
            quotient_by_isotropic(&u(), &IntMat::from_i64(&[&[1, 0]])),
            Err(LatticeError::NotOrthogonal)
        ));
        let deg = IntLattice::from_i64(&[&[0, 0, 0], &[0, -2, 1], &[0, 1, -2]]);
        let (q, _, r) = quotient_by_isotropic(&deg, &IntMat::from_i64(&[&[3, 0, 0]])).unwrap();
        assert_eq!(r, 1);
        assert_eq!(q.det(), int(3));
    }
}
