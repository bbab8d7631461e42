//! Oriented triangulations of the sphere as combinatorial maps.
//!
//! A dart is a directed side of a triangle: face `f` owns darts `3f`,
//! `3f+1`, `3f+2`, traversed counterclockwise, so the face permutation
//! `phi` is fixed by the labeling and only the edge involution `alpha` is
//! stored. The counterclockwise vertex rotation is `sigma = alpha . phi^-1`;
//! its orbits are the vertices and a dart belongs to the vertex at its tail.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

const UNSET: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("complex has no faces")]
    Empty,
    #[error("dart {dart}: edge involution is not an involution")]
    NotInvolution { dart: usize },
    #[error("dart {dart}: side glued to itself")]
    SelfGlued { dart: usize },
    #[error("face {face}: complex is not connected")]
    Disconnected { face: usize },
    #[error("Euler characteristic {euler}, expected 2")]
    NotSphere { euler: i64 },
    #[error("face {face}: side {from} -> {to} has no opposite side")]
    UnpairedSide { face: usize, from: usize, to: usize },
    #[error("face {face}: side {from} -> {to} pairs ambiguously, give a rotation section")]
    AmbiguousSide { face: usize, from: usize, to: usize },
    #[error("face {face}: vertex id {vertex} out of range")]
    BadVertex { face: usize, vertex: usize },
    #[error("vertex {vertex}: neighbourhood is not a single disk")]
    PinchedVertex { vertex: usize },
    #[error("vertex {vertex}: rotation is inconsistent with the faces")]
    BadRotation { vertex: usize },
    #[error("vertex {vertex}: degree {degree} exceeds 6")]
    DegreeTooLarge { vertex: usize, degree: usize },
}

impl SurfaceError {
    /// True for violations of the curvature bound, false for topology errors.
    pub fn is_curvature(&self) -> bool {
        matches!(self, SurfaceError::DegreeTooLarge { .. })
    }
}

/// Whether isomorphism classes are taken up to orientation reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Preserving,
    Unoriented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeType {
    /// Curvatures `6 - deg` of the singular vertices, sorted descending.
    pub parts: Vec<u8>,
    pub hexagonal: usize,
}

impl DegreeType {
    pub fn singular(&self) -> usize {
        self.parts.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    alpha: Vec<usize>,
    vert: Vec<usize>,
    rot: Vec<Vec<usize>>,
    pos: Vec<usize>,
    edge: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

#[inline]
pub fn phi(x: usize) -> usize {
    if x % 3 == 2 {
        x - 2
    } else {
        x + 1
    }
}

#[inline]
pub fn phi_inv(x: usize) -> usize {
    if x.is_multiple_of(3) {
        x + 2
    } else {
        x - 1
    }
}

impl Triangulation {
    /// Builds and validates a triangulation from its edge involution.
    pub fn from_alpha(alpha: Vec<usize>) -> Result<Self, SurfaceError> {
        let nd = alpha.len();
        if nd == 0 || !nd.is_multiple_of(3) {
            return Err(SurfaceError::Empty);
        }
        for (x, &y) in alpha.iter().enumerate() {
            if y >= nd || alpha[y] != x {
                return Err(SurfaceError::NotInvolution { dart: x });
            }
            if y == x {
                return Err(SurfaceError::SelfGlued { dart: x });
            }
        }
        let t = nd / 3;
        // connectivity over faces
        let mut seen = vec![false; t];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for s in 0..3 {
                let g = alpha[3 * f + s] / 3;
                if !seen[g] {
                    seen[g] = true;
                    stack.push(g);
                }
            }
        }
        if let Some(f) = seen.iter().position(|&s| !s) {
            return Err(SurfaceError::Disconnected { face: f });
        }

        let mut vert = vec![UNSET; nd];
        let mut pos = vec![0; nd];
        let mut rot = Vec::new();
        for x0 in 0..nd {
            if vert[x0] != UNSET {
                continue;
            }
            let v = rot.len();
            let mut cyc = Vec::new();
            let mut x = x0;
            loop {
                vert[x] = v;
                pos[x] = cyc.len();
                cyc.push(x);
                x = alpha[phi_inv(x)];
                if x == x0 {
                    break;
                }
            }
            rot.push(cyc);
        }
        let mut edge = vec![UNSET; nd];
        let mut edges = Vec::new();
        for x in 0..nd {
            if edge[x] == UNSET {
                edge[x] = edges.len();
                edge[alpha[x]] = edges.len();
                edges.push([x, alpha[x]]);
            }
        }
        let euler = rot.len() as i64 - edges.len() as i64 + t as i64;
        if euler != 2 {
            return Err(SurfaceError::NotSphere { euler });
        }
        for (v, cyc) in rot.iter().enumerate() {
            if cyc.len() > 6 {
                return Err(SurfaceError::DegreeTooLarge { vertex: v, degree: cyc.len() });
            }
        }
        Ok(Triangulation { alpha, vert, rot, pos, edge, edges })
    }

    /// Builds a triangulation from counterclockwise vertex triples, pairing
    /// each side `a -> b` with the unique side `b -> a` elsewhere.
    ///
    /// Vertex ids in errors refer to the ids used in `faces`.
    pub fn from_faces(faces: &[[usize; 3]]) -> Result<Self, SurfaceError> {
        let (tails, n) = Self::face_tails(faces)?;
        let nd = tails.len();
        let head = |x: usize| tails[phi(x)];
        let mut alpha = vec![UNSET; nd];
        for x in 0..nd {
            if alpha[x] != UNSET {
                continue;
            }
            let cands: Vec<usize> = (0..nd)
                .filter(|&y| y != x && alpha[y] == UNSET && tails[y] == head(x) && head(y) == tails[x])
                .collect();
            let (f, a, b) = (x / 3, tails[x], head(x));
            match cands.len() {
                0 => return Err(SurfaceError::UnpairedSide { face: f, from: a, to: b }),
                1 => {
                    alpha[x] = cands[0];
                    alpha[cands[0]] = x;
                }
                _ => {
                    // parallel sides are only unambiguous when all candidates
                    // are interchangeable, which we do not try to detect
                    return Err(SurfaceError::AmbiguousSide { face: f, from: a, to: b });
                }
            }
        }
        Self::finish_labeled(alpha, &tails, n)
    }

    /// Builds a triangulation from faces plus an explicit rotation: for each
    /// vertex id, the darts `3f+s` leaving it in counterclockwise order.
    pub fn from_faces_and_rotation(
        faces: &[[usize; 3]],
        rotation: &[(usize, Vec<usize>)],
    ) -> Result<Self, SurfaceError> {
        let (tails, n) = Self::face_tails(faces)?;
        let nd = tails.len();
        let mut sigma = vec![UNSET; nd];
        for (v, cyc) in rotation {
            if cyc.is_empty() {
                return Err(SurfaceError::BadRotation { vertex: *v });
            }
            for (i, &x) in cyc.iter().enumerate() {
                if x >= nd || tails[x] != *v || sigma[x] != UNSET {
                    return Err(SurfaceError::BadRotation { vertex: *v });
                }
                sigma[x] = cyc[(i + 1) % cyc.len()];
            }
        }
        if let Some(x) = sigma.iter().position(|&s| s == UNSET) {
            return Err(SurfaceError::BadRotation { vertex: tails[x] });
        }
        // sigma = alpha . phi^-1, hence alpha = sigma . phi
        let alpha: Vec<usize> = (0..nd).map(|x| sigma[phi(x)]).collect();
        for x in 0..nd {
            if alpha[alpha[x]] != x || alpha[x] == x || tails[alpha[x]] != tails[phi(x)] {
                return Err(SurfaceError::BadRotation { vertex: tails[x] });
            }
        }
        Self::finish_labeled(alpha, &tails, n)
    }

    fn face_tails(faces: &[[usize; 3]]) -> Result<(Vec<usize>, usize), SurfaceError> {
        if faces.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let n = faces.iter().flatten().copied().max().unwrap_or(0) + 1;
        let mut used = vec![false; n];
        for f in faces {
            for &v in f {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            let face = 0;
            return Err(SurfaceError::BadVertex { face, vertex: v });
        }
        Ok((faces.iter().flatten().copied().collect(), n))
    }

    /// Validates that the dart-level vertices match the file's vertex ids.
    fn finish_labeled(alpha: Vec<usize>, tails: &[usize], n: usize) -> Result<Self, SurfaceError> {
        let nd = alpha.len();
        // degree check first so the error names the file's vertex
        let mut label_deg = vec![0usize; n];
        for &v in tails {
            label_deg[v] += 1;
        }
        if let Some(v) = (0..n).find(|&v| label_deg[v] > 6) {
            return Err(SurfaceError::DegreeTooLarge { vertex: v, degree: label_deg[v] });
        }
        let tri = Self::from_alpha(alpha)?;
        let mut owner = vec![UNSET; n];
        for (v, cyc) in tri.rot.iter().enumerate() {
            let lab = tails[cyc[0]];
            if cyc.iter().any(|&x| tails[x] != lab) || owner[lab] != UNSET {
                return Err(SurfaceError::PinchedVertex { vertex: lab });
            }
            owner[lab] = v;
        }
        debug_assert_eq!(nd, tri.num_darts());
        Ok(tri)
    }

    pub fn num_darts(&self) -> usize {
        self.alpha.len()
    }
    pub fn num_faces(&self) -> usize {
        self.alpha.len() / 3
    }
    pub fn num_vertices(&self) -> usize {
        self.rot.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn alpha(&self, x: usize) -> usize {
        self.alpha[x]
    }
    pub fn alphas(&self) -> &[usize] {
        &self.alpha
    }
    pub fn sigma(&self, x: usize) -> usize {
        self.alpha[phi_inv(x)]
    }
    /// Vertex at the tail of a dart.
    pub fn tail(&self, x: usize) -> usize {
        self.vert[x]
    }
    pub fn head(&self, x: usize) -> usize {
        self.vert[self.alpha[x]]
    }
    /// Darts leaving `v` in counterclockwise order, starting at the smallest.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }
    /// Position of a dart in the rotation at its tail.
    pub fn pos(&self, x: usize) -> usize {
        self.pos[x]
    }
    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }
    pub fn degrees(&self) -> Vec<usize> {
        self.rot.iter().map(|c| c.len()).collect()
    }
    pub fn edge(&self, x: usize) -> usize {
        self.edge[x]
    }
    pub fn edge_darts(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    pub fn faces(&self) -> Vec<[usize; 3]> {
        (0..self.num_faces())
            .map(|f| [self.vert[3 * f], self.vert[3 * f + 1], self.vert[3 * f + 2]])
            .collect()
    }
    pub fn is_singular(&self, v: usize) -> bool {
        self.degree(v) < 6
    }

    pub fn degree_type(&self) -> DegreeType {
        let mut parts: Vec<u8> =
            self.rot.iter().filter(|c| c.len() < 6).map(|c| (6 - c.len()) as u8).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let hexagonal = self.rot.len() - parts.len();
        DegreeType { parts, hexagonal }
    }

    /// Relabeling of darts by breadth-first search from `root`, walking the
    /// faces forwards (or backwards for the mirror image). Returns the new
    /// involution.
    fn bfs_alpha(&self, root: usize, mirror: bool, best: Option<&[usize]>) -> Option<Vec<usize>> {
        let nd = self.alpha.len();
        let step = |x: usize| if mirror { phi_inv(x) } else { phi(x) };
        let mut lab = vec![UNSET; nd];
        let mut inv = Vec::with_capacity(nd);
        let open = |x: usize, lab: &mut Vec<usize>, inv: &mut Vec<usize>| {
            let mut y = x;
            for _ in 0..3 {
                lab[y] = inv.len();
                inv.push(y);
                y = step(y);
            }
        };
        open(root, &mut lab, &mut inv);
        let mut out = Vec::with_capacity(nd);
        let mut less = false;
        for i in 0..nd {
            let y = self.alpha[inv[i]];
            if lab[y] == UNSET {
                open(y, &mut lab, &mut inv);
            }
            let a = lab[y];
            if let (Some(b), false) = (best, less) {
                if a > b[i] {
                    return None;
                }
                less = a < b[i];
            }
            out.push(a);
        }
        Some(out)
    }

    fn canonical_alpha(&self, orient: Orientation) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let mirrors: &[bool] = match orient {
            Orientation::Preserving => &[false],
            Orientation::Unoriented => &[false, true],
        };
        for &m in mirrors {
            for root in 0..self.alpha.len() {
                if let Some(a) = self.bfs_alpha(root, m, best.as_deref()) {
                    if best.as_ref().is_none_or(|b| a < *b) {
                        best = Some(a);
                    }
                }
            }
        }
        best.unwrap()
    }

    /// Bytes identifying the isomorphism class of the oriented map.
    pub fn canonical_code(&self, orient: Orientation) -> Vec<u8> {
        encode(&self.canonical_alpha(orient))
    }

    /// Isomorphic copy whose labeling is the canonical one.
    pub fn canonical_form(&self, orient: Orientation) -> Triangulation {
        Triangulation::from_alpha(self.canonical_alpha(orient)).expect("relabeling preserves validity")
    }

    /// Copy with darts renamed by a permutation of the faces and a cyclic
    /// shift inside each face.
    pub fn relabeled(&self, face_perm: &[usize], shifts: &[usize]) -> Triangulation {
        let t = self.num_faces();
        let map = |x: usize| 3 * face_perm[x / 3] + (x % 3 + shifts[x / 3]) % 3;
        let mut alpha = vec![0; 3 * t];
        for x in 0..3 * t {
            alpha[map(x)] = map(self.alpha[x]);
        }
        Triangulation::from_alpha(alpha).expect("relabeling preserves validity")
    }

    /// Replaces each triangle by `k^2` triangles of a regular grid.
    pub fn subdivide(&self, k: usize) -> Triangulation {
        assert!(k >= 1);
        let t = self.num_faces();
        // local small triangles as corner triples in grid coordinates
        let mut small: Vec<[(usize, usize); 3]> = Vec::new();
        for j in 0..k {
            for i in 0..k - j {
                small.push([(i, j), (i + 1, j), (i, j + 1)]);
                if i + j + 2 <= k {
                    small.push([(i + 1, j), (i + 1, j + 1), (i, j + 1)]);
                }
            }
        }
        let per = small.len();
        debug_assert_eq!(per, k * k);
        let mut local = vec![UNSET; 3 * per];
        let mut boundary = vec![UNSET; 3 * k];
        let mut sides = alloc::collections::BTreeMap::new();
        for (s, tri) in small.iter().enumerate() {
            for c in 0..3 {
                sides.insert((tri[c], tri[(c + 1) % 3]), 3 * s + c);
            }
        }
        for (&(p, q), &x) in &sides {
            if let Some(&y) = sides.get(&(q, p)) {
                local[x] = y;
            } else {
                let (side, at) = if p.1 == 0 && q.1 == 0 {
                    (0, p.0)
                } else if p.0 + p.1 == k && q.0 + q.1 == k {
                    (1, p.1)
                } else {
                    (2, k - p.1)
                };
                boundary[side * k + at] = x;
            }
        }
        let mut alpha = vec![UNSET; 3 * per * t];
        for f in 0..t {
            let base = 3 * per * f;
            for x in 0..3 * per {
                if local[x] != UNSET {
                    alpha[base + x] = base + local[x];
                }
            }
            for s in 0..3 {
                let y = self.alpha[3 * f + s];
                let (g, r) = (y / 3, y % 3);
                for p in 0..k {
                    let a = base + boundary[s * k + p];
                    let b = 3 * per * g + boundary[r * k + (k - 1 - p)];
                    alpha[a] = b;
                }
            }
        }
        Triangulation::from_alpha(alpha).expect("subdivision of a valid triangulation")
    }
}

fn encode(alpha: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * (alpha.len() + 1));
    out.extend_from_slice(&(alpha.len() as u32 / 3).to_be_bytes());
    for &a in alpha {
        out.extend_from_slice(&(a as u32).to_be_bytes());
    }
    out
}

/// Partial gluing state shared by the generators: vertex fans are chains
/// of darts linked by the rotation, closed once a fan wraps around.
struct Fans {
    start: Vec<usize>,
    end: Vec<usize>,
    len: Vec<usize>,
    closed_curv: usize,
}

enum Link {
    Merged { s: usize, e: usize, old: [usize; 4] },
    Closed { deg: usize },
}

impl Fans {
    fn new() -> Self {
        Fans { start: Vec::new(), end: Vec::new(), len: Vec::new(), closed_curv: 0 }
    }
    fn push(&mut self, x: usize) {
        debug_assert_eq!(self.start.len(), x);
        self.start.push(x);
        self.end.push(x);
        self.len.push(1);
    }
    fn pop(&mut self) {
        self.start.pop();
        self.end.pop();
        self.len.pop();
    }
    /// Records `sigma(x) = y`; `x` ends a fan and `y` starts one.
    fn link(&mut self, x: usize, y: usize) -> Option<Link> {
        let s = self.start[x];
        let e = self.end[y];
        if s == y {
            let deg = self.len[s];
            if 6 - deg + self.closed_curv > 12 {
                return None;
            }
            self.closed_curv += 6 - deg;
            return Some(Link::Closed { deg });
        }
        let l = self.len[x] + self.len[y];
        if l > 6 {
            return None;
        }
        let old = [self.end[s], self.start[e], self.len[s], self.len[e]];
        self.end[s] = e;
        self.start[e] = s;
        self.len[s] = l;
        self.len[e] = l;
        Some(Link::Merged { s, e, old })
    }
    fn unlink(&mut self, l: Link) {
        match l {
            Link::Closed { deg, .. } => self.closed_curv -= 6 - deg,
            Link::Merged { s, e, old } => {
                self.len[e] = old[3];
                self.len[s] = old[2];
                self.start[e] = old[1];
                self.end[s] = old[0];
            }
        }
    }
}

struct Grower<'a, F: FnMut(Triangulation)> {
    t: usize,
    alpha: Vec<usize>,
    fans: Fans,
    emit: &'a mut F,
}

impl<F: FnMut(Triangulation)> Grower<'_, F> {
    fn faces(&self) -> usize {
        self.alpha.len() / 3
    }

    fn open_face(&mut self) {
        for _ in 0..3 {
            let x = self.alpha.len();
            self.alpha.push(UNSET);
            self.fans.push(x);
        }
    }

    fn close_face(&mut self) {
        for _ in 0..3 {
            self.alpha.pop();
            self.fans.pop();
        }
    }

    fn glue(&mut self, u: usize, v: usize) -> Option<(Link, Link)> {
        self.alpha[u] = v;
        self.alpha[v] = u;
        // sigma(phi(u)) = v and sigma(phi(v)) = u
        if let Some(a) = self.fans.link(phi(u), v) {
            if let Some(b) = self.fans.link(phi(v), u) {
                return Some((a, b));
            }
            self.fans.unlink(a);
        }
        self.alpha[u] = UNSET;
        self.alpha[v] = UNSET;
        None
    }

    fn unglue(&mut self, u: usize, v: usize, links: (Link, Link)) {
        self.fans.unlink(links.1);
        self.fans.unlink(links.0);
        self.alpha[u] = UNSET;
        self.alpha[v] = UNSET;
    }

    fn grow(&mut self, mut d: usize) {
        while d < self.alpha.len() && self.alpha[d] != UNSET {
            d += 1;
        }
        if d == self.alpha.len() {
            if self.faces() == self.t && self.fans.closed_curv == 12 {
                self.leaf();
            }
            return;
        }
        for y in d + 1..self.alpha.len() {
            if self.alpha[y] != UNSET {
                continue;
            }
            if let Some(l) = self.glue(d, y) {
                self.grow(d + 1);
                self.unglue(d, y, l);
            }
        }
        if self.faces() < self.t {
            let y = self.alpha.len();
            self.open_face();
            if let Some(l) = self.glue(d, y) {
                self.grow(d + 1);
                self.unglue(d, y, l);
            }
            self.close_face();
        }
    }

    fn leaf(&mut self) {
        let tri = match Triangulation::from_alpha(self.alpha.clone()) {
            Ok(t) => t,
            Err(_) => return,
        };
        // the generated labeling is the search labeling from dart 0; keep it
        // only when no other root gives a smaller one
        let nd = self.alpha.len();
        for root in 1..nd {
            if let Some(a) = tri.bfs_alpha(root, false, Some(&self.alpha)) {
                if a < self.alpha {
                    return;
                }
            }
        }
        (self.emit)(tri);
    }
}

/// Calls `emit` once per oriented isomorphism class of non-negatively
/// curved triangulations with exactly `t` triangles, in canonical labeling.
pub fn enumerate_exact(t: usize, mut emit: impl FnMut(Triangulation)) {
    assert!(t >= 2 && t.is_multiple_of(2), "triangle count must be even and positive");
    let mut g = Grower { t, alpha: Vec::new(), fans: Fans::new(), emit: &mut emit };
    g.open_face();
    g.grow(0);
}

/// All classes with `t <= t_max`, ordered by size then canonical code.
pub fn enumerate(t_max: usize, orient: Orientation) -> Vec<Triangulation> {
    let mut out = Vec::new();
    for t in (2..=t_max).step_by(2) {
        let mut batch = Vec::new();
        enumerate_exact(t, |tri| batch.push(tri));
        if orient == Orientation::Unoriented {
            let mut seen = BTreeSet::new();
            batch.retain(|tri| seen.insert(tri.canonical_code(Orientation::Unoriented)));
            for tri in batch.iter_mut() {
                *tri = tri.canonical_form(Orientation::Unoriented);
            }
        }
        batch.sort_by_key(|tri| tri.canonical_code(orient));
        out.extend(batch);
    }
    out
}

/// Independent generator: fixes vertex rotations from a degree sequence and
/// tries every edge pairing whose faces are triangles. Exponential; meant
/// for cross-checking `enumerate` at small sizes.
pub fn brute_force_codes(t: usize, orient: Orientation) -> BTreeSet<Vec<u8>> {
    let n = t / 2 + 2;
    let total = 3 * t;
    let mut codes = BTreeSet::new();
    let mut degs = Vec::new();
    degree_sequences(n, total, 6, &mut degs, &mut |ds| {
        let mut sigma = vec![0; total];
        let mut sigma_inv = vec![0; total];
        let mut base = 0;
        for &d in ds {
            for i in 0..d {
                sigma[base + i] = base + (i + 1) % d;
                sigma_inv[base + (i + 1) % d] = base + i;
            }
            base += d;
        }
        let mut alpha = vec![UNSET; total];
        pair_darts(&sigma, &sigma_inv, &mut alpha, &mut |alpha| {
            if let Some(tri) = from_rotation_system(&sigma_inv, alpha) {
                codes.insert(tri.canonical_code(orient));
            }
        });
    });
    codes
}

fn degree_sequences(left: usize, sum: usize, max: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if left == 0 {
        if sum == 0 {
            f(cur);
        }
        return;
    }
    for d in (1..=max.min(sum)).rev() {
        if d * left < sum {
            break;
        }
        cur.push(d);
        degree_sequences(left - 1, sum - d, d, cur, f);
        cur.pop();
    }
}

fn walk_ok(sigma_inv: &[usize], alpha: &[usize], x: usize) -> bool {
    // face permutation is sigma^-1 . alpha in this description
    let mut y = x;
    for step in 1..=3 {
        if alpha[y] == UNSET {
            return true;
        }
        y = sigma_inv[alpha[y]];
        if (y == x) != (step == 3) {
            return false;
        }
    }
    true
}

/// Checks the face walks through a newly glued pair.
fn faces_ok(sigma: &[usize], sigma_inv: &[usize], alpha: &[usize], u: usize, v: usize) -> bool {
    for start in [u, v] {
        let mut x = start;
        for _ in 0..3 {
            if !walk_ok(sigma_inv, alpha, x) {
                return false;
            }
            // predecessor under the face permutation is alpha . sigma
            let p = alpha[sigma[x]];
            if p == UNSET {
                break;
            }
            x = p;
        }
    }
    true
}

fn pair_darts(sigma: &[usize], sigma_inv: &[usize], alpha: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let Some(x) = alpha.iter().position(|&a| a == UNSET) else {
        f(alpha);
        return;
    };
    for y in x + 1..alpha.len() {
        if alpha[y] != UNSET {
            continue;
        }
        alpha[x] = y;
        alpha[y] = x;
        if faces_ok(sigma, sigma_inv, alpha, x, y) {
            pair_darts(sigma, sigma_inv, alpha, f);
        }
        alpha[x] = UNSET;
        alpha[y] = UNSET;
    }
}

/// Converts a vertex-rotation description into the face-side labeling.
fn from_rotation_system(sigma_inv: &[usize], alpha: &[usize]) -> Option<Triangulation> {
    let nd = alpha.len();
    let mut side = vec![UNSET; nd];
    let mut next = 0;
    for x in 0..nd {
        if side[x] != UNSET {
            continue;
        }
        let mut y = x;
        for _ in 0..3 {
            side[y] = next;
            next += 1;
            y = sigma_inv[alpha[y]];
        }
    }
    let mut a = vec![0; nd];
    for x in 0..nd {
        a[side[x]] = side[alpha[x]];
    }
    Triangulation::from_alpha(a).ok()
}

/// Small named triangulations.
pub mod polyhedra {
    use super::Triangulation;
    use alloc::vec::Vec;

    pub fn tetrahedron() -> Triangulation {
        Triangulation::from_faces(&[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]).unwrap()
    }

    pub fn octahedron() -> Triangulation {
        let mut f = Vec::new();
        for i in 0..4 {
            let (a, b) = (1 + i, 1 + (i + 1) % 4);
            f.push([0, a, b]);
            f.push([5, b, a]);
        }
        Triangulation::from_faces(&f).unwrap()
    }

    pub fn icosahedron() -> Triangulation {
        let mut f = Vec::new();
        for i in 0..5 {
            let (u0, u1) = (1 + i, 1 + (i + 1) % 5);
            let (l0, l1) = (6 + i, 6 + (i + 1) % 5);
            f.push([0, u0, u1]);
            f.push([u0, l0, u1]);
            f.push([u1, l0, l1]);
            f.push([11, l1, l0]);
        }
        Triangulation::from_faces(&f).unwrap()
    }

    /// Two triangles glued with degrees (1, 1, 4).
    pub fn t1() -> Triangulation {
        Triangulation::from_faces(&[[0, 2, 2], [1, 2, 2]]).unwrap()
    }

    /// Two triangles glued along their boundaries, degrees (2, 2, 2).
    pub fn t2() -> Triangulation {
        Triangulation::from_faces(&[[0, 1, 2], [0, 2, 1]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use super::polyhedra::tetrahedron;

    #[test]
    fn tetrahedron_counts() {
        let t = tetrahedron();
        assert_eq!((t.num_vertices(), t.num_edges(), t.num_faces()), (4, 6, 4));
        assert_eq!(t.degree_type().parts, vec![3, 3, 3, 3]);
    }

    #[test]
    fn degenerate_two_triangles() {
        let t = Triangulation::from_faces(&[[0, 2, 2], [1, 2, 2]]).unwrap();
        assert_eq!((t.num_vertices(), t.num_edges(), t.num_faces()), (3, 3, 2));
        assert_eq!(t.degree_type().parts, vec![5, 5, 2]);
    }

    #[test]
    fn subdivision_counts() {
        let t = tetrahedron().subdivide(2);
        assert_eq!(t.num_faces(), 16);
        assert_eq!(t.degree_type().parts, vec![3, 3, 3, 3]);
        assert_eq!(t.degree_type().hexagonal, 6);
        assert_eq!(
            tetrahedron().subdivide(1).canonical_code(Orientation::Preserving),
            tetrahedron().canonical_code(Orientation::Preserving)
        );
    }

    #[test]
    fn small_enumeration() {
        assert_eq!(enumerate(2, Orientation::Preserving).len(), 2);
        let four = enumerate(4, Orientation::Preserving);
        let tet = tetrahedron().canonical_code(Orientation::Preserving);
        assert!(four.iter().any(|t| t.canonical_code(Orientation::Preserving) == tet));
    }

    #[test]
    fn brute_force_agrees_small() {
        for t in [2, 4, 6] {
            let a: BTreeSet<_> = {
                let mut v = BTreeSet::new();
                enumerate_exact(t, |tri| {
                    v.insert(tri.canonical_code(Orientation::Preserving));
                });
                v
            };
            assert_eq!(a, brute_force_codes(t, Orientation::Preserving), "t={t}");
        }
    }
}
