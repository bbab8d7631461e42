//! The `tri v1` text format.
//!
//! ```text
//! tri v1
//! faces:
//! 0 1 2
//! 0 2 3
//! # comments run to the end of the line
//! rotation:
//! 0: 0 3 8
//! ```
//!
//! Faces are counterclockwise vertex triples. Face `f` owns darts
//! `3f, 3f+1, 3f+2`, dart `3f+s` leaving the `s`-th vertex of the line.
//! The optional `rotation:` section lists, per vertex, its outgoing darts
//! in counterclockwise order; it is needed when two sides could pair
//! with the same opposite side.

use std::fmt::Write as _;

use trilat_core::surface::{SurfaceError, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: face {face} has {count} vertices, expected 3")]
    NotTriangle { line: usize, face: usize, count: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl FormatError {
    pub fn is_curvature(&self) -> bool {
        matches!(self, FormatError::Surface(e) if e.is_curvature())
    }
}

#[derive(PartialEq)]
enum Section {
    Header,
    Top,
    Faces,
    Rotation,
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>, FormatError> {
    s.split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|_| syntax(line, format!("`{w}` is not a vertex or dart id"))))
        .collect()
}

pub fn parse(text: &str) -> Result<Triangulation, FormatError> {
    let mut section = Section::Header;
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut rotation: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut saw_faces = false;
    let mut saw_rotation = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if section == Section::Header {
            if s != "tri v1" {
                return Err(syntax(line, "expected header `tri v1`"));
            }
            section = Section::Top;
            continue;
        }
        match s {
            "faces:" if !saw_faces => {
                saw_faces = true;
                section = Section::Faces;
                continue;
            }
            "rotation:" if !saw_rotation => {
                saw_rotation = true;
                section = Section::Rotation;
                continue;
            }
            "faces:" | "rotation:" => return Err(syntax(line, format!("repeated section `{s}`"))),
            _ => {}
        }
        match section {
            Section::Faces => {
                let v = numbers(line, s)?;
                if v.len() != 3 {
                    return Err(FormatError::NotTriangle { line, face: faces.len(), count: v.len() });
                }
                faces.push([v[0], v[1], v[2]]);
            }
            Section::Rotation => {
                let (head, rest) = s.split_once(':').ok_or_else(|| syntax(line, "expected `v: d0 d1 ...`"))?;
                let v = head.trim().parse::<usize>().map_err(|_| syntax(line, format!("`{}` is not a vertex id", head.trim())))?;
                if rotation.iter().any(|(u, _)| *u == v) {
                    return Err(syntax(line, format!("vertex {v} listed twice")));
                }
                rotation.push((v, numbers(line, rest)?));
            }
            _ => return Err(syntax(line, format!("unexpected `{s}` outside a section"))),
        }
    }
    if section == Section::Header {
        return Err(syntax(1, "expected header `tri v1`"));
    }
    if !saw_faces {
        return Err(syntax(text.lines().count().max(1), "missing `faces:` section"));
    }
    let tri = if saw_rotation {
        Triangulation::from_faces_and_rotation(&faces, &rotation)?
    } else {
        Triangulation::from_faces(&faces)?
    };
    Ok(tri)
}

/// Writes `tri` so that parsing returns the same darts. The rotation is
/// included only when the faces alone do not determine the gluing.
pub fn write(tri: &Triangulation) -> String {
    let faces = tri.faces();
    let mut out = String::from("tri v1\nfaces:\n");
    for f in &faces {
        let _ = writeln!(out, "{} {} {}", f[0], f[1], f[2]);
    }
    let plain = Triangulation::from_faces(&faces).map(|t| t.alphas() == tri.alphas()).unwrap_or(false);
    if !plain {
        out.push_str("rotation:\n");
        for v in 0..tri.num_vertices() {
            let darts: Vec<String> = tri.rotation(v).iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "{v}: {}", darts.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use trilat_core::surface::polyhedra::*;

    #[test]
    fn round_trip() {
        for tri in [tetrahedron(), octahedron(), icosahedron(), t1(), t2(), octahedron().subdivide(2)] {
            let text = write(&tri);
            assert_eq!(parse(&text).unwrap().alphas(), tri.alphas(), "{text}");
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# tetrahedron\n\ntri v1\nfaces:   # ccw\n0 1 2\n0 2 3\n0 3 1\n1 3 2\n";
        assert_eq!(parse(text).unwrap().num_vertices(), 4);
    }

    #[test]
    fn errors_are_located() {
        assert!(matches!(parse("tri v2\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(parse("tri v1\nfaces:\n0 1\n"), Err(FormatError::NotTriangle { line: 3, face: 0, count: 2 })));
        assert!(matches!(parse("tri v1\nfaces:\n0 1 x\n"), Err(FormatError::Syntax { line: 3, .. })));
        assert!(matches!(parse("tri v1\n"), Err(FormatError::Syntax { .. })));
        // open disk: sides on the boundary have no partner
        assert!(matches!(parse("tri v1\nfaces:\n0 1 2\n"), Err(FormatError::Surface(_))));
    }

    #[test]
    fn degree_seven_names_the_vertex() {
        // a cone over a heptagon, closed off by a fan from a second apex
        let mut text = String::from("tri v1\nfaces:\n");
        for i in 0..7 {
            let (a, b) = (1 + i, 1 + (i + 1) % 7);
            text += &format!("0 {a} {b}\n8 {b} {a}\n");
        }
        let err = parse(&text).unwrap_err();
        assert!(err.is_curvature());
        assert!(matches!(err, FormatError::Surface(SurfaceError::DegreeTooLarge { vertex: 0, degree: 7 })));
    }
}
