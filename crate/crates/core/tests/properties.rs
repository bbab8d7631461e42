use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use trilat_core::eisenstein::{standard_lattice, EisInt, Standard};
use trilat_core::record::invariant_record;
use trilat_core::surface::{enumerate, polyhedra, Orientation, Triangulation};
use trilat_core::zlattice::{index_in, int, saturation, short_vectors, Int, IntLattice, IntMat};

fn corpus() -> &'static [Triangulation] {
    static C: OnceLock<Vec<Triangulation>> = OnceLock::new();
    C.get_or_init(|| enumerate(8, Orientation::Preserving))
}

/// A corpus member together with a random relabeling of its darts.
fn relabeled() -> impl Strategy<Value = (Triangulation, Triangulation)> {
    (0..corpus().len()).prop_flat_map(|i| {
        let tri = corpus()[i].clone();
        let t = tri.num_faces();
        (Just((0..t).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(0..3usize, t))
            .prop_map(move |(perm, shifts)| (tri.clone(), tri.relabeled(&perm, &shifts)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_code_ignores_labels((tri, rel) in relabeled()) {
        for o in [Orientation::Preserving, Orientation::Unoriented] {
            prop_assert_eq!(tri.canonical_code(o), rel.canonical_code(o));
        }
        prop_assert_eq!(tri.degree_type(), rel.degree_type());
    }

    #[test]
    fn subdivision_composes(i in 0..8usize, a in 1..=2usize, b in 1..=2usize) {
        let tri = &corpus()[i];
        let lhs = tri.subdivide(a).subdivide(b);
        let rhs = tri.subdivide(a * b);
        prop_assert_eq!(lhs.num_faces(), a * a * b * b * tri.num_faces());
        prop_assert_eq!(lhs.canonical_code(Orientation::Preserving), rhs.canonical_code(Orientation::Preserving));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn record_ignores_labels((tri, rel) in relabeled()) {
        prop_assert_eq!(invariant_record(&tri), invariant_record(&rel));
    }
}

/// Nonsingular 3x3 matrices with small entries.
fn small_basis() -> impl Strategy<Value = [[i64; 3]; 3]> {
    prop::array::uniform3(prop::array::uniform3(-2i64..=2)).prop_filter("singular", |b| det3(b) != 0)
}

fn det3(b: &[[i64; 3]; 3]) -> i64 {
    b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
}

/// Sign-normalised vectors `x` with `-bound <= -|x B|^2 < 0`, by scanning a
/// box that contains every such `x`.
fn brute_short(b: &[[i64; 3]; 3], bound: i64) -> BTreeSet<Vec<i64>> {
    // |x_i| <= |row i of B^-1| sqrt(bound), and adjugate entries are at most 8
    let r = ((bound * 3 * 64) as f64).sqrt() as i64 + 1;
    let mut out = BTreeSet::new();
    for x0 in -r..=r {
        for x1 in -r..=r {
            for x2 in -r..=r {
                let x = [x0, x1, x2];
                let y: Vec<i64> = (0..3).map(|j| (0..3).map(|i| x[i] * b[i][j]).sum()).collect();
                let n: i64 = y.iter().map(|v| v * v).sum();
                if n > 0 && n <= bound {
                    out.insert(sign_normal(&x));
                }
            }
        }
    }
    out
}

fn sign_normal(x: &[i64]) -> Vec<i64> {
    let s = x.iter().find(|&&v| v != 0).map_or(1, |v| v.signum());
    x.iter().map(|v| v * s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn short_vectors_match_brute_force(b in small_basis(), bound in 1i64..=4) {
        let gram: Vec<Vec<i64>> =
            (0..3).map(|i| (0..3).map(|j| -(0..3).map(|k| b[i][k] * b[j][k]).sum::<i64>()).collect()).collect();
        let rows: Vec<&[i64]> = gram.iter().map(|r| r.as_slice()).collect();
        let l = IntLattice::from_i64(&rows);
        let fast: BTreeSet<Vec<i64>> = short_vectors(&l, bound)
            .unwrap()
            .into_iter()
            .map(|(v, _)| sign_normal(&v.iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(fast, brute_short(&b, bound));
    }

    #[test]
    fn saturation_is_idempotent(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 1..=3)) {
        let m = IntMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(), 4);
        let s = saturation(&m);
        let s2 = saturation(&s);
        prop_assert_eq!(index_in(&s, &s2), Some(Int::from(1)));
        prop_assert_eq!(index_in(&s2, &s), Some(Int::from(1)));
        // the span of m sits inside with finite index when m has full rank
        if trilat_core::zlattice::rank(&m) == m.nrows() {
            prop_assert!(index_in(&m, &s).is_some());
        }
    }
}

fn eis_vec() -> impl Strategy<Value = Vec<EisInt>> {
    prop::collection::vec((-5i64..=5, -5i64..=5).prop_map(|(a, b)| EisInt::from_i64(a, b)), 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// `s_z` has order 3, sends `z` to `w z`, fixes `z^perp` and preserves `h`.
    #[test]
    fn reflections_in_roots(k in 0..10usize, u in 0..6i64, x in eis_vec(), y in eis_vec()) {
        let m = standard_lattice(Standard::M);
        let mut z = vec![EisInt::zero(); 10];
        z[k] = EisInt::zeta_pow(u);
        let s = |v: &[EisInt]| m.reflect(&z, v).unwrap();
        prop_assert_eq!(s(&s(&s(&x))), x.clone());
        prop_assert_eq!(s(&z), z.iter().map(|c| c * &EisInt::omega()).collect::<Vec<_>>());
        prop_assert_eq!(m.h(&s(&x), &s(&y)), m.h(&x, &y));
        if m.h(&x, &z).is_zero() {
            prop_assert_eq!(s(&x), x);
        }
    }
}

#[test]
fn platonic_codes_are_distinct() {
    let codes: BTreeSet<Vec<u8>> = [polyhedra::tetrahedron(), polyhedra::octahedron(), polyhedra::icosahedron()]
        .iter()
        .map(|t| t.canonical_code(Orientation::Preserving))
        .collect();
    assert_eq!(codes.len(), 3);
}
