//! Parallel runs over many triangulations with output in canonical-code
//! order, independent of the number of workers.

use rayon::prelude::*;

use trilat_core::surface::{enumerate, polyhedra, Orientation, Triangulation};

pub const WORKERS_VAR: &str = "TRILAT_WORKERS";

/// Worker count from `TRILAT_WORKERS`, else the available parallelism.
pub fn workers() -> usize {
    std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Applies `f` to every triangulation on a pool of `workers()` threads and
/// returns `(canonical code, result)` sorted by code.
pub fn run<T, F>(tris: &[Triangulation], f: F) -> Vec<(Vec<u8>, T)>
where
    T: Send,
    F: Fn(&Triangulation) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers()).build().expect("thread pool");
    let mut out: Vec<(Vec<u8>, T)> =
        pool.install(|| tris.par_iter().map(|t| (t.canonical_code(Orientation::Preserving), f(t))).collect());
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Every triangulation with `t <= t_max` up to orientation-preserving
/// isomorphism.
pub fn enumerated(t_max: usize) -> Vec<Triangulation> {
    enumerate(t_max, Orientation::Preserving)
}

/// The three platonic solids and their 2- and 3-fold subdivisions, named.
pub fn platonic_family() -> Vec<(String, Triangulation)> {
    let base = [
        ("tetrahedron", polyhedra::tetrahedron()),
        ("octahedron", polyhedra::octahedron()),
        ("icosahedron", polyhedra::icosahedron()),
    ];
    let mut out = Vec::new();
    for (name, tri) in base {
        for k in 1..=3 {
            let label = if k == 1 { name.to_string() } else { format!("{name}/{k}") };
            out.push((label, tri.subdivide(k)));
        }
    }
    out
}

/// Hex string of a canonical code, for reports.
pub fn code_hex(code: &[u8]) -> String {
    code.iter().map(|b| format!("{b:02x}")).collect()
}
