//! The comparable output: everything computed for a triangulation, taken on
//! its canonical form so that isomorphic inputs give equal records.

use alloc::string::String;
use alloc::vec::Vec;

use crate::eisenstein::{EisInt, HermMat};
use crate::geodesics::GeodesicError;
use crate::rho::{run_rho, RhoError};
use crate::surface::{DegreeType, Orientation, Triangulation};
use crate::thurston::{eigen_homology, omega_action, solve_delta, ThurstonError};
use crate::typeiii::{build_tower, hex_relations, primitivity_index, TowerError};
use crate::zlattice::{fingerprint, int, Fingerprint, IntMat, Rat, RootType};

/// Norm bound for the fingerprint of `P`.
pub const P_NORM_BOUND: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Rho(#[from] RhoError),
    #[error(transparent)]
    Thurston(#[from] ThurstonError),
}

/// Conditions under which a stage returned a weaker result than the ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordFlags {
    /// `C / C'` is all of `A_R`.
    pub glue_is_full: bool,
    /// `<,>_P / <,>_A` on `Q` when it is one constant.
    pub q_scale: Option<Rat>,
    /// `k > 1`: the 2-divisibility of `h - delta` rests on the abstract Gram.
    pub nonprimitive: bool,
    /// Geodesics and `R` span `Lbar (x) Q`.
    pub geodesics_span: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantRecord {
    pub t: usize,
    pub k: usize,
    pub degree_type: DegreeType,
    pub r_type: RootType,
    pub p_fingerprint: Fingerprint,
    /// Hermitian Gram of `P^E` on its Eisenstein basis.
    pub pe_gram: HermMat,
    pub delta_gram: IntMat,
    /// `h = delta + 2 delta'` in `M`.
    pub h_decomposes: bool,
    /// `h = theta delta` over `Z[w]` in `M^E`.
    pub h_is_theta_delta: bool,
    pub length_spectrum: Vec<usize>,
    /// Thurston's point on an Eisenstein basis of the lift lattice, up to
    /// units; `None` when it is not integral there.
    pub delta_e: Option<Vec<EisInt>>,
    /// Its norm in the `M^E` scale.
    pub delta_e_norm: Rat,
    /// The unit by which `rho_Q` acts on lifts, `None` when `Q = 0`.
    pub omega: Option<EisInt>,
    pub flags: RecordFlags,
}

pub fn invariant_record(tri: &Triangulation) -> Result<InvariantRecord, RecordError> {
    let canon = tri.canonical_form(Orientation::Preserving);
    let tw = build_tower(&canon)?;
    let k = primitivity_index(&tw)?;
    let glue_is_full = hex_relations(&tw)?.glue_is_full;
    let stages = run_rho(&tw)?;
    let eh = eigen_homology(&tw)?;
    let omega = omega_action(&tw, &eh, &stages.descent)?.unit;
    let de = solve_delta(&eh)?;
    let d = &stages.delta;
    let h_is_theta_delta = match (&d.delta_e, &d.h_e) {
        (Some(de), Some(he)) => de.iter().map(|z| &EisInt::theta() * z).eq(he.iter().cloned()),
        _ => false,
    };
    Ok(InvariantRecord {
        t: tw.t(),
        k,
        degree_type: canon.degree_type(),
        r_type: tw.r_type.clone(),
        p_fingerprint: fingerprint(&tw.p_lattice(), P_NORM_BOUND),
        pe_gram: stages.extension.pe.gram.clone(),
        delta_gram: d.gram.clone(),
        h_decomposes: d.h_decomposes(),
        h_is_theta_delta,
        length_spectrum: eh.geodesics.length_spectrum(),
        delta_e: de.coords,
        delta_e_norm: de.norm * Rat::new(int(3), int(2)),
        omega,
        flags: RecordFlags {
            glue_is_full,
            q_scale: stages.descent.scale.clone(),
            nonprimitive: k > 1,
            geodesics_span: eh.geodesics.spans,
        },
    })
}

/// Short human-readable summary line.
pub fn summary(r: &InvariantRecord) -> String {
    alloc::format!("t={} k={} R={} spectrum={:?}", r.t, r.k, r.r_type, r.length_spectrum)
}
