//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use trilat::audit::{audit, audit_json, compare, Verdict};
use trilat::corpus::{self, code_hex};
use trilat::json;
use trilat::verify::{check_lift_table, verify, Level, Outcome, Report};
use trilat_core::eisenstein::{
    hermitian_from_symmetric, root_chain, standard_lattice, symmetric_from_hermitian, EisInt, HermLattice, Standard,
    ZwithRho,
};
use trilat_core::geodesics::endpoint_table;
use trilat_core::record::{invariant_record, InvariantRecord};
use trilat_core::surface::{enumerate, polyhedra, Orientation, Triangulation};
use trilat_core::thurston::{end_value, lift_table};
use trilat_core::typeiii::{build_tower, check_tower, primitivity_index};
use trilat_core::zlattice::{fingerprint, index_in, int, roots, standard, IntLattice, Rat};

const CORPUS_T_MAX: usize = 16;
const AUDIT_RELABELINGS: usize = 2;

struct Outcomes {
    lines: Vec<(bool, String)>,
}

impl Outcomes {
    fn report(&mut self, n: usize, title: &str, ok: bool, detail: String) {
        let line = format!("criterion {n} [{}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

/// Reports of the named checks: (triangulations where all passed, failure
/// descriptions).
fn tally(reports: &[(String, Report)], names: &[&str]) -> (usize, Vec<String>) {
    let mut good = 0;
    let mut bad = Vec::new();
    for (label, r) in reports {
        let mut all = true;
        for name in names {
            match r.get(name) {
                Some(Outcome::Pass) | None => {}
                Some(Outcome::Breach(d)) | Some(Outcome::Limit(d)) => {
                    all = false;
                    bad.push(format!("{label}: {name}: {d}"));
                }
            }
        }
        good += all as usize;
    }
    (good, bad)
}

/// Names that must be present (not skipped by an earlier failure).
fn missing(reports: &[(String, Report)], names: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for (label, r) in reports {
        for name in names {
            if r.get(name).is_none() {
                out.push(format!("{label}: {name} not run"));
            }
        }
    }
    out
}

fn summarise(bad: &[String]) -> String {
    let shown: Vec<&str> = bad.iter().take(6).map(|s| s.as_str()).collect();
    let more = if bad.len() > shown.len() { format!(" (+{} more)", bad.len() - shown.len()) } else { String::new() };
    format!("{}{more}", shown.join("; "))
}

fn main() {
    let start = Instant::now();
    let mut out = Outcomes { lines: Vec::new() };

    let tris = corpus::enumerated(CORPUS_T_MAX);
    let family = corpus::platonic_family();
    eprintln!("corpus: {} triangulations with t <= {CORPUS_T_MAX}, plus {} platonic", tris.len(), family.len());

    let corpus_reports: Vec<(String, Report)> = corpus::run(&tris, |t| verify(t, Level::Deep))
        .into_iter()
        .enumerate()
        .map(|(i, (_, r))| (format!("t={} #{i}", r.t), r))
        .collect();
    let family_tris: Vec<Triangulation> = family.iter().map(|(_, t)| t.clone()).collect();
    let mut family_reports: Vec<(String, Report)> = Vec::new();
    for (name, tri) in &family {
        family_reports.push((name.clone(), verify(tri, Level::Deep)));
    }
    let all: Vec<(String, Report)> = corpus_reports.iter().chain(&family_reports).cloned().collect();
    eprintln!("deep verification done after {:.1?}", start.elapsed());

    criterion_1(&mut out, &all, &family);
    criterion_2(&mut out);
    criterion_3(&mut out, &all);
    criterion_4(&mut out, &all);
    criterion_5(&mut out, &all);
    criterion_6(&mut out, &family_tris);
    criterion_7(&mut out);
    criterion_8(&mut out, &tris);

    let failed = out.lines.iter().filter(|(ok, _)| !ok).count();
    println!("acceptance: {} of {} criteria pass ({:.1?})", out.lines.len() - failed, out.lines.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn criterion_1(out: &mut Outcomes, all: &[(String, Report)], family: &[(String, Triangulation)]) {
    let names = [
        "euler characteristic",
        "total curvature 12",
        "tower",
        "tower identities",
        "rank L = 18 + n",
        "primitivity index",
    ];
    let (good, mut bad) = tally(all, &names);
    bad.extend(missing(all, &names));
    // time of the structural stage alone, on the largest inputs with t <= 40
    let mut slowest = (0.0f64, String::new());
    for (name, tri) in family.iter().filter(|(_, t)| t.num_faces() <= 40) {
        let t0 = Instant::now();
        let ok = build_tower(tri).and_then(|tw| check_tower(&tw).and_then(|_| primitivity_index(&tw))).is_ok();
        let dt = t0.elapsed().as_secs_f64();
        if !ok {
            bad.push(format!("{name}: structural stage fails when timed"));
        }
        if dt > slowest.0 {
            slowest = (dt, name.clone());
        }
    }
    let fast = slowest.0 < 5.0;
    if !fast {
        bad.push(format!("{} took {:.2} s", slowest.1, slowest.0));
    }
    let detail = if bad.is_empty() {
        format!(
            "{good}/{} triangulations satisfy n-e+t=2, sum(6-d)=12, Lbar even (1,18), rank L=18+n, h^2=3t, D/K=A_(t-1), h.Lbar even; slowest t<=40 is {} at {:.2} s",
            all.len(),
            slowest.1,
            slowest.0
        )
    } else {
        summarise(&bad)
    };
    out.report(1, "structural identities", bad.is_empty(), detail);
}

fn criterion_2(out: &mut Outcomes) {
    let mut bad = Vec::new();
    for o in [Orientation::Preserving, Orientation::Unoriented] {
        let n = enumerate(2, o).len();
        if n != 2 {
            bad.push(format!("{n} classes at t=2 ({o:?})"));
        }
    }
    let (t1, t2) = (build_tower(&polyhedra::t1()).unwrap(), build_tower(&polyhedra::t2()).unwrap());
    let (f1, f2) = (fingerprint(&t1.lbar, 2), fingerprint(&t2.lbar, 2));
    if f1 != f2 || f1.disc_group != vec![int(2)] {
        bad.push(format!("Lbar disc groups {:?} / {:?}", f1.disc_group, f2.disc_group));
    }
    let r1 = roots(&t1.p_lattice()).map(|r| r.len()).unwrap_or(0);
    let r2 = roots(&t2.p_lattice()).map(|r| r.len()).unwrap_or(0);
    if (r1, r2) != (486, 216) {
        bad.push(format!("P root counts {r1} / {r2}"));
    }
    let idx = index_in(&t2.r_basis, &t2.p_basis);
    if idx != Some(int(3)) {
        bad.push(format!("[P2 : R2] = {idx:?}"));
    }
    let detail = if bad.is_empty() {
        format!("2 classes; Lbar fingerprints equal with disc Z/2; P roots {r1} vs {r2}; [P2 : R2] = 3")
    } else {
        summarise(&bad)
    };
    out.report(2, "two triangles", bad.is_empty(), detail);
}

fn criterion_3(out: &mut Outcomes, all: &[(String, Report)]) {
    let names = ["geodesic closed form"];
    let (good, mut bad) = tally(all, &names);
    bad.extend(missing(all, &names));
    let (selfs, _) = endpoint_table();
    let want: Vec<Rat> = [(-1, 1), (-1, 3), (0, 1), (1, 3), (1, 1)].iter().map(|&(a, b)| Rat::new(int(a), int(b))).collect();
    if selfs != want {
        bad.push(format!("endpoint table {selfs:?}"));
    }
    // the trigonometric end term of the hermitian side is the same table, negated
    for (k, s) in selfs.iter().enumerate() {
        if end_value(k + 1).map(|v| -v) != Some(s.clone()) {
            bad.push(format!("end term at deficit {} disagrees", k + 1));
        }
    }
    let detail = if bad.is_empty() {
        format!("closed form equals the lift pairing for every geodesic pair on {good} triangulations; endpoint table (-1, -1/3, 0, 1/3, 1)")
    } else {
        summarise(&bad)
    };
    out.report(3, "geodesic intersections", bad.is_empty(), detail);
}

fn criterion_4(out: &mut Outcomes, all: &[(String, Report)]) {
    let names = [
        "rho pipeline",
        "rho~ order 3 without fixed points",
        "rank K~ = 2(n-1)",
        "Delta Gram",
        "h = delta + 2 delta'",
        "h = theta delta^E",
    ];
    let (good, mut bad) = tally(all, &names);
    bad.extend(missing(all, &names));
    // rho_Q is only checked where Q is nonzero
    let (_, q_bad) = tally(all, &["rho_Q order 3 without fixed points"]);
    bad.extend(q_bad);
    let exact_ok = bad.is_empty();
    let (proportional, scale_bad) = tally(all, &["Q form scale"]);
    let ok = exact_ok && scale_bad.is_empty();
    let mut detail = if exact_ok {
        format!("rho_Q and rho~ order 3 fixed-point free, rank K~ = 2(n-1), Delta Gram, h = delta + 2 delta', h = theta delta^E on {good}/{} triangulations", all.len())
    } else {
        summarise(&bad)
    };
    detail += &format!(
        "; Q form scale constant on {proportional}/{} (not proportional on {})",
        all.len(),
        scale_bad.len()
    );
    out.report(4, "rotation pipeline", ok, detail);
}

fn criterion_5(out: &mut Outcomes, all: &[(String, Report)]) {
    let names = [
        "lift table",
        "eigenhomology",
        "Re h equals the geodesic Gram",
        "local corner table",
        "degree-5 unit geodesics are roots",
        "omega action",
        "solve delta",
        "delta^E has norm t",
    ];
    let (good, mut bad) = tally(all, &names);
    bad.extend(missing(all, &names[..4]));
    // the check must also see a corrupted table
    let tri = polyhedra::icosahedron();
    let mut lt = lift_table(&tri);
    let x = tri.edge_darts(7)[1];
    lt.phase[x] = &lt.phase[x] * &EisInt::omega();
    if check_lift_table(&tri, &lt).outcome == Outcome::Pass {
        bad.push("a corrupted lift table passes".into());
    }
    let (_, int_bad) = tally(all, &["delta^E integral"]);
    let primitive = all.iter().filter(|(_, r)| r.get("delta^E integral").is_some()).count();
    let integral = primitive - int_bad.len();
    let ok = bad.is_empty() && int_bad.is_empty();
    let mut detail = if bad.is_empty() {
        format!("triangle and vertex relations, rank l-2, Re h exact, local table, degree-5 roots of norm -3, norm (3/2)t on {good}/{} triangulations", all.len())
    } else {
        summarise(&bad)
    };
    detail += &format!("; delta^E integral on {integral}/{primitive} with k=1");
    if !int_bad.is_empty() {
        detail += &format!(" [{}]", summarise(&int_bad));
    }
    out.report(5, "eigenchain pipeline", ok, detail);
}

fn herm_sum(parts: &[HermLattice]) -> HermLattice {
    let n: usize = parts.iter().map(|p| p.rank()).sum();
    let mut g = vec![vec![EisInt::zero(); n]; n];
    let mut o = 0;
    for p in parts {
        for i in 0..p.rank() {
            for j in 0..p.rank() {
                g[o + i][o + j] = p.gram[i][j].clone();
            }
        }
        o += p.rank();
    }
    HermLattice::new(g).unwrap()
}

fn round_trip(h: &HermLattice) -> bool {
    let Ok(z) = symmetric_from_hermitian(h) else { return false };
    let Ok((h2, _)) = hermitian_from_symmetric(&z) else { return false };
    let Ok(z2) = symmetric_from_hermitian(&h2) else { return false };
    fingerprint(&z.lattice, 2) == fingerprint(&z2.lattice, 2) && h.det().norm() == h2.det().norm()
}

fn criterion_6(out: &mut Outcomes, family: &[Triangulation]) {
    let mut bad = Vec::new();
    let m = standard_lattice(Standard::M);
    let (th, thb, m3) = (EisInt::theta(), EisInt::theta().conj(), EisInt::from_i64(-3, 0));
    for k in 0..10 {
        for l in 0..10 {
            let want = match l as i64 - k as i64 {
                0 => m3.clone(),
                1 => thb.clone(),
                -1 => th.clone(),
                _ => EisInt::zero(),
            };
            if m.gram[k][l] != want {
                bad.push(format!("M^E Gram entry ({k}, {l})"));
            }
        }
    }
    let three10 = int(3).pow(10);
    let blocks = herm_sum(&[root_chain(4), root_chain(4), standard_lattice(Standard::H)]);
    for (name, h) in [("root chain", &m), ("E8+E8+H", &blocks)] {
        if h.det().norm() != three10 {
            bad.push(format!("{name}: det norm {}", h.det().norm()));
        }
    }
    let classical = IntLattice::direct_sum(&[standard::e(8), standard::e(8), standard::u(), standard::u()]);
    let fc = fingerprint(&classical, 2);
    for (name, h) in [("root chain", &m), ("E8+E8+H", &blocks)] {
        match symmetric_from_hermitian(h) {
            Ok(z) if fingerprint(&z.lattice, 2) == fc => {}
            _ => bad.push(format!("{name}: underlying lattice is not E8+E8+U+U")),
        }
    }
    // round trips: the standard lattices, and P^E of corpus members
    let mut trips = 0;
    for s in [Standard::A2, Standard::D4, Standard::E6, Standard::E8, Standard::H, Standard::M] {
        trips += 1;
        if !round_trip(&standard_lattice(s)) {
            bad.push(format!("round trip {s:?}"));
        }
    }
    let small: Vec<Triangulation> = enumerate(8, Orientation::Preserving).into_iter().chain(family.iter().take(4).cloned()).collect();
    for tri in &small {
        let Ok(tw) = build_tower(tri) else { continue };
        let Ok(st) = trilat_core::rho::run_rho(&tw) else { continue };
        trips += 1;
        let z = ZwithRho { lattice: tw.p_lattice(), rho: st.extension.rho_tilde.clone() };
        let ok = hermitian_from_symmetric(&z)
            .map(|(h, _)| symmetric_from_hermitian(&h).is_ok_and(|z2| fingerprint(&z2.lattice, 2) == fingerprint(&z.lattice, 2)))
            .unwrap_or(false);
        if !ok || !round_trip(&st.extension.pe) {
            bad.push(format!("round trip P^E at t={}", tri.num_faces()));
        }
    }
    // complex reflections on random vectors
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    let coords = || prop::collection::vec((-9i64..=9, -9i64..=9).prop_map(|(a, b)| EisInt::from_i64(a, b)), 10);
    let strategy = (0..10usize, 0..6i64, coords(), coords());
    let result = runner.run(&strategy, |(k, u, x, y)| {
        let mut z = vec![EisInt::zero(); 10];
        z[k] = EisInt::zeta_pow(u);
        let s = |v: &[EisInt]| m.reflect(&z, v).unwrap();
        prop_assert_eq!(s(&s(&s(&x))), x.clone());
        prop_assert_eq!(s(&z), z.iter().map(|c| c * &EisInt::omega()).collect::<Vec<_>>());
        prop_assert_eq!(m.h(&s(&x), &s(&y)), m.h(&x, &y));
        Ok(())
    });
    if let Err(e) = result {
        bad.push(format!("s_z relations: {e}"));
    }
    let detail = if bad.is_empty() {
        format!("M^E Gram is the root chain; det norm 3^10 for it and for E8+E8+H; underlying E8+E8+U+U; {trips} round trips keep fingerprints; s_z order 3 and s_z(z) = w z on 1000 random vectors")
    } else {
        summarise(&bad)
    };
    out.report(6, "Eisenstein core", bad.is_empty(), detail);
}

fn criterion_7(out: &mut Outcomes) {
    let mut bad = Vec::new();
    let mut done = 0;
    let scaled = |r: &InvariantRecord, k: usize| -> Vec<usize> { r.length_spectrum.iter().map(|l| l * k).collect() };
    for (name, base) in [
        ("tetrahedron", polyhedra::tetrahedron()),
        ("octahedron", polyhedra::octahedron()),
        ("icosahedron", polyhedra::icosahedron()),
    ] {
        let Ok(r0) = invariant_record(&base) else {
            bad.push(format!("{name}: record fails"));
            continue;
        };
        for k in [2, 3] {
            match invariant_record(&base.subdivide(k)) {
                Ok(r) => {
                    done += 1;
                    let mut probs = Vec::new();
                    if r.t != k * k * r0.t {
                        probs.push(format!("t = {}", r.t));
                    }
                    if r.k != k * r0.k {
                        probs.push(format!("k = {}", r.k));
                    }
                    if r.length_spectrum != scaled(&r0, k) {
                        probs.push("lengths".to_string());
                    }
                    if r.t % (2 * r.k * r.k) != 0 {
                        probs.push("2k^2 does not divide t".into());
                    }
                    if !probs.is_empty() {
                        bad.push(format!("{name}/{k}: {}", probs.join(", ")));
                    }
                }
                Err(e) => bad.push(format!("{name}/{k}: {e}")),
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("t' = k^2 t, k' = k k_T, lengths times k, 2k'^2 | t' on {done} subdivisions")
    } else {
        summarise(&bad)
    };
    out.report(7, "subdivision law", bad.is_empty(), detail);
}

fn criterion_8(out: &mut Outcomes, tris: &[Triangulation]) {
    let a = audit(tris, AUDIT_RELABELINGS);
    let report = audit_json(&a);
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("audit-report.json");
    let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, json::to_canonical(&report)));
    let mut bad: Vec<String> = a.failures().map(|e| format!("{}: unstable or failing", code_hex(&e.code))).collect();
    if let Err(e) = &written {
        bad.push(format!("could not write {}: {e}", path.display()));
    }
    // each collision is reported by compare as it is by the audit
    let by_code: std::collections::BTreeMap<Vec<u8>, &Triangulation> =
        tris.iter().map(|t| (t.canonical_code(Orientation::Preserving), t)).collect();
    let mut pairs = 0;
    for g in &a.collisions {
        pairs += g.len() * (g.len() - 1) / 2;
        let verdict = compare(by_code[&g[0]], by_code[&g[1]]);
        if verdict != Ok(Verdict::IndistinguishableByFingerprint) {
            bad.push(format!("collision {} reported as {verdict:?}", code_hex(&g[0])));
        }
    }
    let distinct: BTreeSet<&Vec<u8>> = a.entries.iter().map(|e| &e.code).collect();
    if distinct.len() != tris.len() {
        bad.push("corpus has repeated classes".into());
    }
    let detail = if bad.is_empty() {
        format!(
            "{} triangulations x {AUDIT_RELABELINGS} relabelings give identical records; {} non-isomorphic pairs in {} groups reported indistinguishable-by-fingerprint; report at {}",
            a.entries.len(),
            pairs,
            a.collisions.len(),
            path.display()
        )
    } else {
        summarise(&bad)
    };
    out.report(8, "separation audit", bad.is_empty(), detail);
}

