use std::collections::BTreeSet;

use itertools::Itertools;
use num::Zero;

use crate::error::{Error, Result};
use crate::linalg::{rref, solve};
use crate::rat::{to_f64, QVec, Rat};

use super::ConvexBody;

/// Hausdorff distance with an exact certificate: `certified_sq` is the exact
/// squared distance, `approx` its floating square root.
#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffDistance {
    pub approx: f64,
    pub certified_sq: Rat,
}

/// Orthogonal projection of `x` onto the affine hull of `pts`.
fn project_affine(x: &QVec, pts: &[&QVec]) -> QVec {
    let n = x.dim();
    let q0 = pts[0];
    let diffs: Vec<Vec<Rat>> = pts[1..].iter().map(|p| (*p - q0).0).collect();
    let (basis, _) = rref(&diffs, n);
    if basis.is_empty() {
        return q0.clone();
    }
    let rel = x - q0;
    let gram: Vec<Vec<Rat>> = basis
        .iter()
        .map(|bi| basis.iter().map(|bj| QVec(bi.clone()).dot(bj)).collect())
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|bi| rel.dot(bi)).collect();
    let lambda = solve(&gram, &rhs).expect("rref rows are independent");
    let mut y = q0.clone();
    for (l, b) in lambda.iter().zip(&basis) {
        y = &y + &QVec(b.clone()).scaled(l);
    }
    y
}

/// Exact squared Euclidean distance from `x` to the body.
///
/// The nearest point lies in the relative interior of some face, so it is the
/// projection of `x` onto that face's affine hull. Every face is visited and
/// the smallest projection that lands in the body is kept.
pub fn point_sq_distance(x: &QVec, body: &ConvexBody) -> Result<Rat> {
    if body.contains(x)? {
        return Ok(Rat::zero());
    }
    let verts = body.vertices();
    let rows = body.halfspaces();
    let tight: Vec<Vec<bool>> = rows
        .iter()
        .map(|h| verts.iter().map(|v| h.is_tight(v)).collect())
        .collect();
    let mut faces: BTreeSet<Vec<bool>> = BTreeSet::new();
    faces.insert(vec![true; verts.len()]);
    for i in 0..verts.len() {
        let mut f = vec![false; verts.len()];
        f[i] = true;
        faces.insert(f);
    }
    for size in 1..body.dim() {
        for subset in (0..rows.len()).combinations(size) {
            let mut mask = vec![true; verts.len()];
            for &r in &subset {
                for (m, t) in mask.iter_mut().zip(&tight[r]) {
                    *m &= *t;
                }
            }
            if mask.iter().any(|&m| m) {
                faces.insert(mask);
            }
        }
    }
    let mut best: Option<Rat> = None;
    for mask in faces {
        let pts: Vec<&QVec> = verts
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
            .collect();
        let y = project_affine(x, &pts);
        if body.contains(&y)? {
            let d = (x - &y).norm_sq();
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    Ok(best.expect("some vertex projection always lies in the body"))
}

/// Hausdorff distance `max(max_{v in K} d(v, L), max_{w in L} d(w, K))`; the
/// maximum of a convex function over a polytope is attained at a vertex.
pub fn hausdorff_distance(k: &ConvexBody, l: &ConvexBody) -> Result<HausdorffDistance> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    let mut sq = Rat::zero();
    for (a, b) in [(k, l), (l, k)] {
        for v in a.vertices() {
            let d = point_sq_distance(v, b)?;
            if d > sq {
                sq = d;
            }
        }
    }
    Ok(HausdorffDistance {
        approx: to_f64(&sq).sqrt(),
        certified_sq: sq,
    })
}
