//! Canonical JSON for records and reports. Keys are sorted, integers and
//! rationals are decimal strings (`"-3"`, `"9/2"`), and an element of
//! `Q(w)` is the triple `[a, b, den]` for `(a + b w) / den`. The schema is
//! described in `docs/record-schema.md`.

use serde_json::{Map, Value};

use trilat_core::eisenstein::{EisInt, EisRat};
use trilat_core::record::{InvariantRecord, RecordFlags};
use trilat_core::surface::DegreeType;
use trilat_core::zlattice::{Fingerprint, Int, IntMat, Rat, RootType};

pub const RECORD_SCHEMA: &str = "trilat-record/1";

/// Fields that are invariants of the lattice data rather than of a chosen
/// basis. Records that agree on all of them are indistinguishable.
pub const COMPARED_FIELDS: [&str; 9] =
    ["t", "k", "degree_type", "r_type", "p_fingerprint", "delta_gram", "h_decomposes", "length_spectrum", "delta_e_norm"];

pub fn int(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn size(x: usize) -> Value {
    Value::String(x.to_string())
}

pub fn rat(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn eis_int(z: &EisInt) -> Value {
    Value::Array(vec![int(&z.a), int(&z.b), Value::String("1".into())])
}

pub fn eis_rat(z: &EisRat) -> Value {
    let (a, b, d) = z.triple();
    Value::Array(vec![int(&a), int(&b), int(&d)])
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn list<T>(xs: &[T], f: impl Fn(&T) -> Value) -> Value {
    Value::Array(xs.iter().map(f).collect())
}

fn matrix(m: &IntMat) -> Value {
    list(&m.rows, |r| list(r, int))
}

fn root_type(r: &RootType) -> Value {
    obj(vec![
        ("components", list(&r.0, |(f, n)| Value::Array(vec![Value::String(format!("{f:?}")), size(*n)]))),
        ("name", Value::String(r.to_string())),
        ("roots", size(r.root_count())),
    ])
}

fn degree_type(d: &DegreeType) -> Value {
    obj(vec![("curvatures", list(&d.parts, |p| size(*p as usize))), ("hexagonal", size(d.hexagonal))])
}

fn fingerprint(f: &Fingerprint) -> Value {
    let (p, q, z) = f.inertia;
    obj(vec![
        ("disc_group", list(&f.disc_group, int)),
        ("even", Value::Bool(f.even)),
        ("inertia", Value::Array(vec![size(p), size(q), size(z)])),
        ("norm_counts", f.norm_counts.as_ref().map_or(Value::Null, |c| list(c, |x| size(*x)))),
        ("rank", size(f.rank)),
        ("root_type", f.root_type.as_ref().map_or(Value::Null, root_type)),
    ])
}

fn flags(f: &RecordFlags) -> Value {
    obj(vec![
        ("geodesics_span", Value::Bool(f.geodesics_span)),
        ("glue_is_full", Value::Bool(f.glue_is_full)),
        ("nonprimitive", Value::Bool(f.nonprimitive)),
        ("q_scale", f.q_scale.as_ref().map_or(Value::Null, rat)),
    ])
}

pub fn record(r: &InvariantRecord) -> Value {
    obj(vec![
        ("schema", Value::String(RECORD_SCHEMA.into())),
        ("t", size(r.t)),
        ("k", size(r.k)),
        ("degree_type", degree_type(&r.degree_type)),
        ("r_type", root_type(&r.r_type)),
        ("p_fingerprint", fingerprint(&r.p_fingerprint)),
        ("pe_gram", list(&r.pe_gram, |row| list(row, eis_int))),
        ("delta_gram", matrix(&r.delta_gram)),
        ("h_decomposes", Value::Bool(r.h_decomposes)),
        ("h_is_theta_delta", Value::Bool(r.h_is_theta_delta)),
        ("length_spectrum", list(&r.length_spectrum, |x| size(*x))),
        ("delta_e", r.delta_e.as_ref().map_or(Value::Null, |c| list(c, eis_int))),
        ("delta_e_norm", rat(&r.delta_e_norm)),
        ("omega", r.omega.as_ref().map_or(Value::Null, eis_int)),
        ("flags", flags(&r.flags)),
    ])
}

/// Compared fields on which two record values differ, in `COMPARED_FIELDS`
/// order.
pub fn differing_fields(a: &Value, b: &Value) -> Vec<&'static str> {
    COMPARED_FIELDS.iter().copied().filter(|k| a.get(k) != b.get(k)).collect()
}

/// Pretty-printed with a trailing newline. `serde_json` keeps object keys
/// sorted, so equal values give equal bytes.
pub fn to_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use trilat_core::record::invariant_record;
    use trilat_core::surface::polyhedra::tetrahedron;

    #[test]
    fn values_are_strings() {
        assert_eq!(rat(&Rat::new(Int::from(9), Int::from(2))), Value::String("9/2".into()));
        assert_eq!(eis_rat(&EisRat::from_ints(1, -2, 3)), serde_json::json!(["1", "-2", "3"]));
    }

    #[test]
    fn tetrahedron_record_is_stable() {
        let a = to_canonical(&record(&invariant_record(&tetrahedron()).unwrap()));
        let b = to_canonical(&record(&invariant_record(&tetrahedron()).unwrap()));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["t"], "4");
        assert_eq!(v["r_type"]["name"], "D4^4");
        // sorted keys
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
