//! Eisenstein integers and the dictionary between lattices with a
//! fixed-point-free isometry of order 3 and hermitian lattices over `Z[w]`.
//!
//! Hermitian forms here are linear in the first argument and conjugate-linear
//! in the second, so `h(w x, y) = w h(x, y)` with `w` acting as `rho`, and a
//! Gram matrix `G[k][l] = h(z_k, z_l)` pairs coordinates as `a^T G conj(b)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::zlattice::{bilinear, complete_basis, int, inverse, saturation, vec_mul, Int, IntLattice, IntMat, Rat, RowSolver};

/// `a + b w` with `w = exp(2 pi i / 3)`, so `w^2 = -1 - w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Eis<T> {
    pub a: T,
    pub b: T,
}

pub type EisInt = Eis<Int>;
/// Elements of the field `Q(w)`.
pub type EisRat = Eis<Rat>;

pub trait Coeff:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}
impl<T> Coeff for T where
    T: Clone + PartialEq + Zero + One + Neg<Output = T> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>
{
}

impl<T: Coeff> Eis<T> {
    pub fn new(a: T, b: T) -> Self {
        Eis { a, b }
    }
    pub fn zero() -> Self {
        Eis::new(T::zero(), T::zero())
    }
    pub fn one() -> Self {
        Eis::new(T::one(), T::zero())
    }
    pub fn omega() -> Self {
        Eis::new(T::zero(), T::one())
    }
    /// `theta = w - w^2 = 1 + 2w`, a square root of -3.
    pub fn theta() -> Self {
        Eis::new(T::one(), T::one() + T::one())
    }
    pub fn from_base(a: T) -> Self {
        Eis::new(a, T::zero())
    }
    pub fn conj(&self) -> Self {
        Eis::new(self.a.clone() - self.b.clone(), -self.b.clone())
    }
    pub fn norm(&self) -> T {
        let (a, b) = (self.a.clone(), self.b.clone());
        a.clone() * a.clone() - a * b.clone() + b.clone() * b
    }
    /// Twice the real part.
    pub fn re2(&self) -> T {
        self.a.clone() + self.a.clone() - self.b.clone()
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    /// Real numbers are the elements with vanishing `w` coefficient.
    pub fn is_real(&self) -> bool {
        self.b.is_zero()
    }
    pub fn scale(&self, c: &T) -> Self {
        Eis::new(self.a.clone() * c.clone(), self.b.clone() * c.clone())
    }
    /// `w^k` for any integer `k`.
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::omega(),
            _ => Eis::new(-T::one(), -T::one()),
        }
    }
    /// Powers of `zeta = exp(i pi / 3) = -w^2`, the six units.
    pub fn zeta_pow(k: i64) -> Self {
        let w = Self::omega_pow(2 * k.rem_euclid(6));
        if k.rem_euclid(2) == 1 {
            -w
        } else {
            w
        }
    }
}

impl<T: Coeff> Add for Eis<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Eis::new(self.a + o.a, self.b + o.b)
    }
}
impl<T: Coeff> Sub for Eis<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Eis::new(self.a - o.a, self.b - o.b)
    }
}
impl<T: Coeff> Neg for Eis<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Eis::new(-self.a, -self.b)
    }
}
impl<T: Coeff> Mul for Eis<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let bd = self.b.clone() * o.b.clone();
        Eis::new(self.a.clone() * o.a.clone() - bd.clone(), self.a * o.b + self.b * o.a - bd)
    }
}
impl<T: Coeff> Add for &Eis<T> {
    type Output = Eis<T>;
    fn add(self, o: Self) -> Eis<T> {
        self.clone() + o.clone()
    }
}
impl<T: Coeff> Sub for &Eis<T> {
    type Output = Eis<T>;
    fn sub(self, o: Self) -> Eis<T> {
        self.clone() - o.clone()
    }
}
impl<T: Coeff> Mul for &Eis<T> {
    type Output = Eis<T>;
    fn mul(self, o: Self) -> Eis<T> {
        self.clone() * o.clone()
    }
}

impl<T: fmt::Display + Coeff + PartialOrd> fmt::Display for Eis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})w", self.a, self.b)
    }
}

impl EisInt {
    pub fn from_i64(a: i64, b: i64) -> Self {
        Eis::new(int(a), int(b))
    }
    pub fn to_rat(&self) -> EisRat {
        Eis::new(Rat::from_integer(self.a.clone()), Rat::from_integer(self.b.clone()))
    }
    /// Divisibility by `theta`: the residue field `Z[w]/(theta)` is `F_3`
    /// with `w = 1`.
    pub fn theta_divides(&self) -> bool {
        (&self.a + &self.b).mod_floor(&int(3)).is_zero()
    }
    pub fn div_exact(&self, d: &EisInt) -> Option<EisInt> {
        self.to_rat().div(&d.to_rat())?.to_int()
    }
    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }
}

impl EisRat {
    pub fn from_ints(a: i64, b: i64, den: i64) -> Self {
        Eis::new(Rat::new(int(a), int(den)), Rat::new(int(b), int(den)))
    }
    pub fn div(&self, d: &EisRat) -> Option<EisRat> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let p = self * &d.conj();
        Some(Eis::new(p.a / n.clone(), p.b / n))
    }
    pub fn to_int(&self) -> Option<EisInt> {
        if self.a.is_integer() && self.b.is_integer() {
            Some(Eis::new(self.a.to_integer(), self.b.to_integer()))
        } else {
            None
        }
    }
    /// `(a, b, den)` with `(a + b w) / den` in lowest terms, `den > 0`.
    pub fn triple(&self) -> (Int, Int, Int) {
        let den = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * Rat::from_integer(den.clone())).to_integer();
        let b = (&self.b * Rat::from_integer(den.clone())).to_integer();
        (a, b, den)
    }
}

pub type HermMat = Vec<Vec<EisInt>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermLattice {
    pub gram: HermMat,
    /// `h(x, y)` lies in `theta Z[w]` for all lattice vectors.
    pub integral_theta: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EisError {
    #[error("rho is not an isometry")]
    NotIsometry,
    #[error("rho does not have order 3")]
    NotOrder3,
    #[error("rho has a fixed vector")]
    FixedPoints,
    #[error("hermitian value not integral at ({0}, {1})")]
    NotIntegral(usize, usize),
    #[error("gram is not conjugate-symmetric")]
    NotHermitian,
    #[error("lattice is not theta-integral")]
    NotThetaIntegral,
    #[error("vector is not a root")]
    NotRoot,
    #[error("no Eisenstein basis exists")]
    NoBasis,
}

impl HermLattice {
    pub fn new(gram: HermMat) -> Result<Self, EisError> {
        let n = gram.len();
        for k in 0..n {
            for l in 0..n {
                if gram[l][k] != gram[k][l].conj() {
                    return Err(EisError::NotHermitian);
                }
            }
        }
        let integral_theta = gram.iter().flatten().all(|x| x.theta_divides());
        Ok(HermLattice { gram, integral_theta })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// `h(x, y) = x^T G conj(y)` on coordinate vectors.
    pub fn h(&self, x: &[EisInt], y: &[EisInt]) -> EisInt {
        let mut s = EisInt::zero();
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (l, yl) in y.iter().enumerate() {
                if yl.is_zero() {
                    continue;
                }
                s = s + &(xk * &self.gram[k][l]) * &yl.conj();
            }
        }
        s
    }

    pub fn det(&self) -> EisInt {
        herm_det(&self.gram)
    }

    /// Complex reflection of order 3 in a root `z`:
    /// `s_z(x) = x - (1 - w) h(x, z) / h(z, z) z`.
    pub fn reflect(&self, z: &[EisInt], x: &[EisInt]) -> Result<Vec<EisInt>, EisError> {
        let hz = self.h(z, z);
        if hz != EisInt::from_i64(-3, 0) {
            return Err(EisError::NotRoot);
        }
        let one_minus_w = EisInt::from_i64(1, -1);
        let c = (&one_minus_w * &self.h(x, z)).div_exact(&hz).ok_or(EisError::NotThetaIntegral)?;
        Ok(x.iter().zip(z).map(|(xi, zi)| xi - &(&c * zi)).collect())
    }
}

/// Determinant over `Z[w]` by elimination in `Q(w)`.
pub fn herm_det(g: &HermMat) -> EisInt {
    let n = g.len();
    let mut a: Vec<Vec<EisRat>> = g.iter().map(|r| r.iter().map(|x| x.to_rat()).collect()).collect();
    let mut det = EisRat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return EisInt::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].div(&a[c][c]).unwrap();
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] = &a[i][j] - &v;
            }
        }
    }
    det.to_int().expect("determinant of an integral matrix")
}

/// An integral lattice with an isometry `rho` acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZwithRho {
    pub lattice: IntLattice,
    pub rho: IntMat,
}

impl ZwithRho {
    pub fn validate(&self) -> Result<(), EisError> {
        check_rho(&self.lattice.gram, &self.rho)
    }
}

/// Checks that `rho` is an isometry of order 3 with `1 + rho + rho^2 = 0`.
pub fn check_rho(gram: &IntMat, rho: &IntMat) -> Result<(), EisError> {
    let n = gram.nrows();
    if rho.gram_under(gram) != *gram {
        return Err(EisError::NotIsometry);
    }
    let r2 = rho.mul(rho);
    if r2.mul(rho) != IntMat::identity(n) || (n > 0 && *rho == IntMat::identity(n)) {
        return Err(EisError::NotOrder3);
    }
    // order 3 without fixed vectors is equivalent to 1 + rho + rho^2 = 0
    for i in 0..n {
        for j in 0..n {
            let mut s = &rho.rows[i][j] + &r2.rows[i][j];
            if i == j {
                s += 1;
            }
            if !s.is_zero() {
                return Err(EisError::FixedPoints);
            }
        }
    }
    Ok(())
}

/// `h(x,y) = (3 <x,y> + theta <x, rho y - rho^2 y>) / 2`, asserted integral.
fn herm_value(gram: &IntMat, rho: &IntMat, x: &[Int], y: &[Int]) -> Option<EisInt> {
    let ry = vec_mul(y, rho);
    let rry = vec_mul(&ry, rho);
    let b = bilinear(x, gram, y);
    let diff: Vec<Int> = ry.iter().zip(&rry).map(|(p, q)| p - q).collect();
    let c = bilinear(x, gram, &diff);
    // (3b + c(1 + 2w)) / 2 = ((3b + c) + 2c w) / 2
    let re = &b * int(3) + &c;
    if re.is_odd() {
        return None;
    }
    Some(Eis::new(re / int(2), c))
}

/// Rows `v_1..v_r` such that `v_1, rho v_1, ..., v_r, rho v_r` is a basis.
///
/// Each step saturates the span so far together with some `u, rho u`; the
/// quotient is free of rank one over `Z[w]`, and a generator is a minimum of
/// its norm form `det(g, rho g)`, which has discriminant -3.
pub fn eisenstein_basis(rho: &IntMat) -> Result<IntMat, EisError> {
    let n = rho.nrows();
    if n % 2 == 1 || rho.cols != n {
        return Err(EisError::NoBasis);
    }
    let r2 = rho.mul(rho);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { Int::one() } else { Int::zero() };
            if !(&r2.rows[i][j] + &rho.rows[i][j] + id).is_zero() {
                return Err(EisError::NoBasis);
            }
        }
    }
    let mut span: Vec<Vec<Int>> = Vec::new();
    let mut chosen = Vec::new();
    while span.len() < n {
        let k = span.len();
        let u = if k == 0 { IntMat::identity(n).rows[0].clone() } else { complete_basis(&IntMat::from_rows(span.clone(), n)).rows[k].clone() };
        let mut gens = span.clone();
        gens.push(vec_mul(&u, rho));
        gens.push(u);
        let sat = saturation(&IntMat::from_rows(gens, n));
        let solver = RowSolver::new(&sat);
        let s_coords: Vec<Vec<Int>> = span.iter().map(|r| solver.solve_int(r).ok_or(EisError::NoBasis)).collect::<Result<_, _>>()?;
        let full = if k == 0 { IntMat::identity(2) } else { complete_basis(&IntMat::from_rows(s_coords, k + 2)) };
        let b: Vec<Vec<Int>> = full.rows[k..].iter().map(|c| vec_mul(c, &sat)).collect();
        let mut adapted = span.clone();
        adapted.extend(b.iter().cloned());
        let asolve = RowSolver::new(&IntMat::from_rows(adapted, n));
        let mut r = Vec::with_capacity(2);
        for x in &b {
            r.push(asolve.solve_int(&vec_mul(x, rho)).ok_or(EisError::NoBasis)?[k..].to_vec());
        }
        let g = norm_form_minimum(&r);
        let v: Vec<Int> = (0..n).map(|i| &g[0] * &b[0][i] + &g[1] * &b[1][i]).collect();
        span.push(v.clone());
        span.push(vec_mul(&v, rho));
        chosen.push(v);
    }
    Ok(IntMat::from_rows(chosen, n))
}

/// A vector `g` with `det(g, g r) = +-1` for an order-3 action `r` on `Z^2`,
/// by Lagrange reduction of the norm form.
fn norm_form_minimum(r: &[Vec<Int>]) -> [Int; 2] {
    let q = |x: &Int, y: &Int| -> Int {
        let g0 = x * &r[0][0] + y * &r[1][0];
        let g1 = x * &r[0][1] + y * &r[1][1];
        x * g1 - y * g0
    };
    let (one, zero) = (Int::one(), Int::zero());
    let mut a = q(&one, &zero);
    let mut c = q(&zero, &one);
    let mut b = q(&one, &one) - &a - &c;
    if a.is_negative() {
        a = -a;
        b = -b;
        c = -c;
    }
    let form = |v: &[Int; 2]| &a * &v[0] * &v[0] + &b * &v[0] * &v[1] + &c * &v[1] * &v[1];
    let polar = |u: &[Int; 2], v: &[Int; 2]| int(2) * &a * &u[0] * &v[0] + &b * (&u[0] * &v[1] + &u[1] * &v[0]) + int(2) * &c * &u[1] * &v[1];
    let mut v1 = [one.clone(), zero.clone()];
    let mut v2 = [zero, one];
    loop {
        if form(&v2) < form(&v1) {
            core::mem::swap(&mut v1, &mut v2);
        }
        let num = polar(&v1, &v2);
        let den = int(2) * form(&v1);
        let mu = (int(2) * &num + &den).div_floor(&(int(2) * &den));
        if mu.is_zero() {
            break;
        }
        v2 = [&v2[0] - &mu * &v1[0], &v2[1] - &mu * &v1[1]];
        if form(&v2) >= form(&v1) {
            break;
        }
    }
    debug_assert_eq!(form(&v1), Int::one());
    v1
}

/// Hermitian lattice of `z` on an Eisenstein basis, plus that basis.
pub fn hermitian_from_symmetric(z: &ZwithRho) -> Result<(HermLattice, IntMat), EisError> {
    z.validate()?;
    let basis = eisenstein_basis(&z.rho)?;
    let r = basis.nrows();
    let mut g = vec![vec![EisInt::zero(); r]; r];
    for k in 0..r {
        for l in 0..r {
            g[k][l] = herm_value(&z.lattice.gram, &z.rho, &basis.rows[k], &basis.rows[l])
                .ok_or(EisError::NotIntegral(k, l))?;
        }
    }
    Ok((HermLattice::new(g)?, basis))
}

/// Coordinates over `Z[w]` of `x` on an Eisenstein basis `z_k` for `rho`:
/// `x = sum (a_k + b_k w) z_k` with `w z = rho(z)`.
pub fn eisenstein_coords(basis: &IntMat, rho: &IntMat, x: &[Int]) -> Option<Vec<EisInt>> {
    let mut rows = Vec::with_capacity(2 * basis.nrows());
    for z in &basis.rows {
        rows.push(z.clone());
        rows.push(vec_mul(z, rho));
    }
    let full = IntMat::from_rows(rows, rho.nrows());
    let c = RowSolver::new(&full).solve_int(x)?;
    Some(c.chunks(2).map(|p| Eis::new(p[0].clone(), p[1].clone())).collect())
}

/// Underlying lattice on the basis `z_1, w z_1, z_2, w z_2, ...` with
/// `<x,y> = (2/3) Re h(x,y)` and `rho` multiplication by `w`.
pub fn symmetric_from_hermitian(h: &HermLattice) -> Result<ZwithRho, EisError> {
    if !h.integral_theta {
        return Err(EisError::NotThetaIntegral);
    }
    let r = h.rank();
    let n = 2 * r;
    let mut g = IntMat::zeros(n, n);
    let w = EisInt::omega();
    let wbar = w.conj();
    for k in 0..r {
        for l in 0..r {
            let gkl = &h.gram[k][l];
            let vals = [(0, 0, gkl.clone()), (1, 0, &w * gkl), (0, 1, &wbar * gkl), (1, 1, gkl.clone())];
            for (dk, dl, v) in vals {
                // (2/3) Re v = (2a - b) / 3
                let num = v.re2();
                if !(&num % int(3)).is_zero() {
                    return Err(EisError::NotIntegral(k, l));
                }
                g.rows[2 * k + dk][2 * l + dl] = num / int(3);
            }
        }
    }
    let mut rho = IntMat::zeros(n, n);
    for k in 0..r {
        rho.rows[2 * k][2 * k + 1] = int(1);
        rho.rows[2 * k + 1][2 * k] = int(-1);
        rho.rows[2 * k + 1][2 * k + 1] = int(-1);
    }
    let z = ZwithRho { lattice: IntLattice::new(g), rho };
    z.validate()?;
    Ok(z)
}

/// Gram of a chain of `n` roots with `h(z_k, z_{k+1}) = conj(theta)`.
pub fn root_chain(n: usize) -> HermLattice {
    let mut g = vec![vec![EisInt::zero(); n]; n];
    let th = EisInt::theta();
    for k in 0..n {
        g[k][k] = EisInt::from_i64(-3, 0);
        if k + 1 < n {
            g[k][k + 1] = th.conj();
            g[k + 1][k] = th.clone();
        }
    }
    HermLattice::new(g).expect("hermitian by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Standard {
    A2,
    D4,
    E6,
    E8,
    H,
    M,
}

/// The standard Eisenstein lattices; `A2, D4, E6, E8` are the root chains
/// of length 1 to 4 and `M` the chain of 10 roots.
pub fn standard_lattice(name: Standard) -> HermLattice {
    match name {
        Standard::A2 => root_chain(1),
        Standard::D4 => root_chain(2),
        Standard::E6 => root_chain(3),
        Standard::E8 => root_chain(4),
        Standard::M => root_chain(10),
        Standard::H => {
            let th = EisInt::theta();
            HermLattice::new(vec![vec![EisInt::zero(), th.clone()], vec![th.conj(), EisInt::zero()]]).unwrap()
        }
    }
}

/// An isometry of order 3 without fixed vectors, computed as a power of
/// the Coxeter element `s_1 ... s_n` of a root lattice given by a Gram on
/// simple roots. `None` when that power has fixed vectors.
pub fn coxeter_rho(gram: &IntMat) -> Option<IntMat> {
    let n = gram.nrows();
    let mut c = IntMat::identity(n);
    for i in 0..n {
        // s_i(x) = x - 2 <x, a_i>/<a_i, a_i> a_i, with <a_i, a_i> = -2
        let mut s = IntMat::identity(n);
        for x in 0..n {
            let coef = &gram.rows[x][i];
            s.rows[x][i] += coef;
        }
        c = c.mul(&s);
    }
    let mut p = c.clone();
    let mut h = 1;
    while p != IntMat::identity(n) {
        p = p.mul(&c);
        h += 1;
        if h > 64 {
            return None;
        }
    }
    if h % 3 != 0 {
        return None;
    }
    let mut rho = IntMat::identity(n);
    for _ in 0..h / 3 {
        rho = rho.mul(&c);
    }
    check_rho(gram, &rho).ok().map(|_| rho)
}

/// Conjugates an isometry through a change of basis `b` (rows are new basis
/// vectors in old coordinates): returns `b rho b^-1`.
pub fn conjugate(rho: &IntMat, b: &IntMat) -> Option<IntMat> {
    let inv = inverse(&b.to_rat())?;
    let br = b.mul(rho).to_rat();
    let n = rho.nrows();
    let mut out = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = Rat::zero();
            for k in 0..n {
                s += &br[i][k] * &inv[k][j];
            }
            if !s.is_integer() {
                return None;
            }
            out.rows[i][j] = s.to_integer();
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::{fingerprint, root_type, standard};
    use alloc::string::ToString;

    #[test]
    fn ring_laws() {
        let w = EisInt::omega();
        assert_eq!(&(&w * &w) * &w, EisInt::one());
        assert_eq!(&w * &w, EisInt::from_i64(-1, -1));
        let th = EisInt::theta();
        assert_eq!(&th * &th, EisInt::from_i64(-3, 0));
        assert_eq!(th, &w - &(&w * &w));
        assert_eq!(EisInt::from_i64(2, 3).conj(), EisInt::from_i64(-1, -3));
        assert_eq!(EisInt::from_i64(2, 3).norm(), int(7));
        for k in 0..6 {
            let z = EisInt::zeta_pow(k);
            assert!(z.is_unit());
            assert_eq!(&z * &EisInt::zeta_pow(1), EisInt::zeta_pow(k + 1));
        }
        // zeta^2 = w
        assert_eq!(EisInt::zeta_pow(2), w);
    }

    #[test]
    fn a2_root() {
        let a2 = standard::a(2);
        let rho = coxeter_rho(&a2.gram).unwrap();
        let (h, _) = hermitian_from_symmetric(&ZwithRho { lattice: a2, rho }).unwrap();
        assert_eq!(h.gram, vec![vec![EisInt::from_i64(-3, 0)]]);
        assert!(h.integral_theta);
    }

    #[test]
    fn chains_have_expected_root_types() {
        for (s, name) in [(Standard::A2, "A2"), (Standard::D4, "D4"), (Standard::E6, "E6"), (Standard::E8, "E8")] {
            let z = symmetric_from_hermitian(&standard_lattice(s)).unwrap();
            assert_eq!(root_type(&z.lattice).unwrap().to_string(), name);
            assert!(z.lattice.det().abs() <= int(4));
        }
    }

    #[test]
    fn hyperbolic() {
        let z = symmetric_from_hermitian(&standard_lattice(Standard::H)).unwrap();
        let f = fingerprint(&z.lattice, 2);
        assert_eq!(f, fingerprint(&IntLattice::direct_sum(&[standard::u(), standard::u()]), 2));
        let (h, _) = hermitian_from_symmetric(&z).unwrap();
        assert_eq!(h, standard_lattice(Standard::H));
    }

    #[test]
    fn m_lattice() {
        let m = standard_lattice(Standard::M);
        assert_eq!(m.det().norm(), int(3).pow(10));
        let z = symmetric_from_hermitian(&m).unwrap();
        let f = fingerprint(&z.lattice, 2);
        assert_eq!(f.inertia, (2, 18, 0));
        assert!(f.even && f.disc_group.is_empty());
    }

    #[test]
    fn reflection_basics() {
        let m = standard_lattice(Standard::M);
        let mut z = vec![EisInt::zero(); 10];
        z[3] = EisInt::one();
        let sz = m.reflect(&z, &z).unwrap();
        let wz: Vec<EisInt> = z.iter().map(|c| c * &EisInt::omega()).collect();
        assert_eq!(sz, wz);
        let mut x = vec![EisInt::zero(); 10];
        x[7] = EisInt::from_i64(2, -1);
        assert_eq!(m.reflect(&z, &x).unwrap(), x);
    }

    #[test]
    fn coxeter_powers() {
        assert!(coxeter_rho(&standard::e(6).gram).is_some());
        assert!(coxeter_rho(&standard::e(8).gram).is_some());
        // the Coxeter number of D4 is 6 and the exponent 3 gives fixed vectors
        assert!(coxeter_rho(&standard::d(4).gram).is_none());
    }
}
