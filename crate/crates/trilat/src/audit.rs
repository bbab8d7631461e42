//! Comparison of two triangulations and the separation audit over a
//! corpus.
//!
//! A record is computed from the canonical form, so equal codes force
//! equal records. Which non-isomorphic pairs the lattice data separates is
//! an empirical question, which the audit answers on `COMPARED_FIELDS`.

use std::collections::BTreeMap;

use serde_json::Value;

use trilat_core::record::{invariant_record, RecordError};
use trilat_core::surface::{Orientation, Triangulation};

use crate::corpus::{self, code_hex};
use crate::json::{self, COMPARED_FIELDS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Isomorphic,
    /// Non-isomorphic, told apart by these record fields.
    Distinguished(Vec<&'static str>),
    /// Non-isomorphic, but every compared field agrees.
    IndistinguishableByFingerprint,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Isomorphic => "isomorphic",
            Verdict::Distinguished(_) => "distinguished",
            Verdict::IndistinguishableByFingerprint => "indistinguishable-by-fingerprint",
        }
    }
}

pub fn compare(a: &Triangulation, b: &Triangulation) -> Result<Verdict, RecordError> {
    if a.canonical_code(Orientation::Preserving) == b.canonical_code(Orientation::Preserving) {
        return Ok(Verdict::Isomorphic);
    }
    if a.num_faces() != b.num_faces() {
        // records would differ in t already; skip the pipeline
        return Ok(Verdict::Distinguished(vec!["t"]));
    }
    let ra = json::record(&invariant_record(a)?);
    let rb = json::record(&invariant_record(b)?);
    let diff = json::differing_fields(&ra, &rb);
    Ok(if diff.is_empty() { Verdict::IndistinguishableByFingerprint } else { Verdict::Distinguished(diff) })
}

/// `j`-th deterministic relabeling: faces by an affine map modulo `t`,
/// sides by per-face shifts.
pub fn relabeling(tri: &Triangulation, j: usize) -> Triangulation {
    let t = tri.num_faces();
    let a = (1..=t).cycle().skip(j * 2).find(|&a| num_integer::gcd(a, t) == 1).unwrap_or(1);
    let perm: Vec<usize> = (0..t).map(|f| (a * f + j + 1) % t).collect();
    let shifts: Vec<usize> = (0..t).map(|f| (f * (j + 1) + j / 3) % 3).collect();
    tri.relabeled(&perm, &shifts)
}

#[derive(Debug, Clone)]
pub struct AuditEntry {
    pub code: Vec<u8>,
    pub t: usize,
    pub record: Result<Value, String>,
    /// Relabelings whose record differed from the original.
    pub unstable: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Audit {
    pub entries: Vec<AuditEntry>,
    pub relabelings: usize,
    /// Groups of non-isomorphic triangulations sharing all compared fields.
    pub collisions: Vec<Vec<Vec<u8>>>,
}

impl Audit {
    /// Isomorphic inputs gave identical records everywhere.
    pub fn necessary_direction_holds(&self) -> bool {
        self.entries.iter().all(|e| e.record.is_ok() && e.unstable.is_empty())
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| e.record.is_err() || !e.unstable.is_empty())
    }
}

fn record_value(tri: &Triangulation) -> Result<Value, String> {
    invariant_record(tri).map(|r| json::record(&r)).map_err(|e| e.to_string())
}

pub fn audit(tris: &[Triangulation], relabelings: usize) -> Audit {
    let results = corpus::run(tris, |tri| {
        let record = record_value(tri);
        let unstable = (0..relabelings).filter(|&j| record_value(&relabeling(tri, j)) != record).collect();
        (tri.num_faces(), record, unstable)
    });
    let entries: Vec<AuditEntry> =
        results.into_iter().map(|(code, (t, record, unstable))| AuditEntry { code, t, record, unstable }).collect();
    let mut groups: BTreeMap<String, Vec<Vec<u8>>> = BTreeMap::new();
    for e in &entries {
        if let Ok(r) = &e.record {
            let key: Vec<Option<&Value>> = COMPARED_FIELDS.iter().map(|k| r.get(k)).collect();
            groups.entry(serde_json::to_string(&key).unwrap()).or_default().push(e.code.clone());
        }
    }
    let collisions = groups.into_values().filter(|g| g.len() > 1).collect();
    Audit { entries, relabelings, collisions }
}

pub fn audit_json(a: &Audit) -> Value {
    let failures: Vec<Value> = a
        .failures()
        .map(|e| {
            serde_json::json!({
                "code": code_hex(&e.code),
                "error": e.record.as_ref().err(),
                "unstable_relabelings": e.unstable.iter().map(|j| json::size(*j)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let collisions: Vec<Value> = a
        .collisions
        .iter()
        .map(|g| {
            serde_json::json!({
                "verdict": Verdict::IndistinguishableByFingerprint.label(),
                "codes": g.iter().map(|c| code_hex(c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut by_t: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &a.entries {
        *by_t.entry(e.t).or_default() += 1;
    }
    serde_json::json!({
        "schema": "trilat-audit/1",
        "compared_fields": COMPARED_FIELDS,
        "triangulations": json::size(a.entries.len()),
        "by_t": by_t.iter().map(|(t, c)| (t.to_string(), json::size(*c))).collect::<serde_json::Map<_, _>>(),
        "relabelings_per_triangulation": json::size(a.relabelings),
        "necessary_direction_holds": a.necessary_direction_holds(),
        "failures": failures,
        "collisions": collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use trilat_core::surface::polyhedra::*;

    #[test]
    fn verdicts() {
        let oct = octahedron();
        assert_eq!(compare(&oct, &relabeling(&oct, 3)).unwrap(), Verdict::Isomorphic);
        match compare(&t1(), &t2()).unwrap() {
            Verdict::Distinguished(f) => assert!(f.contains(&"p_fingerprint"), "{f:?}"),
            v => panic!("{v:?}"),
        }
        assert_eq!(compare(&oct, &oct.subdivide(2)).unwrap(), Verdict::Distinguished(vec!["t"]));
    }

    #[test]
    fn relabelings_are_isomorphic() {
        let ico = icosahedron();
        for j in 0..4 {
            let r = relabeling(&ico, j);
            assert_eq!(r.canonical_code(Orientation::Preserving), ico.canonical_code(Orientation::Preserving));
        }
    }
}
