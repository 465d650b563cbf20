//! H-representations and vertex enumeration by exhaustive enumeration of
//! inequality subsets. Adequate for the desk-scale systems used here (a few
//! dozen rows in dimension <= 4).

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use num::bigint::BigInt;

use crate::linalg::{clear_denominators, cofactor_vector, nullspace, rank, solve_int};
use crate::rat::{QVec, Rat};

use super::hull::canonical_normal;
use super::{ConvexBody, Halfspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfspaceSystem {
    pub dim: usize,
    pub rows: Vec<Halfspace>,
}

enum Normalized {
    Infeasible,
    Rows(Vec<Halfspace>),
}

impl HalfspaceSystem {
    pub fn new(dim: usize, rows: Vec<Halfspace>) -> Result<Self> {
        for r in &rows {
            if r.normal.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.normal.dim(),
                });
            }
        }
        Ok(HalfspaceSystem { dim, rows })
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.rows.iter().all(|h| h.contains(x))
    }

    /// Primitive integer normals; parallel rows collapsed to the tightest one.
    fn normalized(&self) -> Normalized {
        let mut best: BTreeMap<QVec, Rat> = BTreeMap::new();
        for r in &self.rows {
            if r.normal.iter().all(|x| x.is_zero()) {
                if r.offset.is_negative() {
                    return Normalized::Infeasible;
                }
                continue;
            }
            let normal = canonical_normal(&r.normal);
            // the scale factor is positive, recover it from any nonzero entry
            let (i, _) = r.normal.iter().find_position(|x| !x.is_zero()).unwrap();
            let factor = &normal[i] / &r.normal[i];
            let offset = &r.offset * factor;
            best.entry(normal)
                .and_modify(|b| {
                    if offset < *b {
                        *b = offset.clone()
                    }
                })
                .or_insert(offset);
        }
        Normalized::Rows(
            best.into_iter()
                .map(|(n, b)| Halfspace::new(n, b))
                .collect(),
        )
    }

    fn enumerate_vertices(dim: usize, rows: &[Halfspace]) -> BTreeSet<QVec> {
        let int_rows: Vec<(Vec<BigInt>, BigInt)> = rows.iter().map(|h| clear_denominators(&h.normal, &h.offset)).collect();
        let mut out = BTreeSet::new();
        for subset in (0..rows.len()).combinations(dim) {
            let a: Vec<Vec<BigInt>> = subset.iter().map(|&i| int_rows[i].0.clone()).collect();
            let c: Vec<BigInt> = subset.iter().map(|&i| int_rows[i].1.clone()).collect();
            let Some((y, d)) = solve_int(&a, &c) else { continue };
            // x = y / d with d > 0, so <n, x> <= c  iff  <n, y> <= c d
            let inside = int_rows.iter().all(|(n, c)| {
                let lhs: BigInt = n.iter().zip(&y).map(|(a, b)| a * b).sum();
                lhs <= c * &d
            });
            if inside {
                out.insert(QVec(y.into_iter().map(|v| Rat::new(v, d.clone())).collect()));
            }
        }
        out
    }

    /// Looks for a ray `d` with `<n_i, d> <= 0` for all rows among the lines
    /// cut out by `dim - 1` of the normals (given full rank, an extreme ray
    /// of the recession cone is such a line).
    fn has_recession_ray(dim: usize, rows: &[Halfspace]) -> bool {
        let normals: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|h| clear_denominators(&h.normal, &Rat::zero()).0)
            .collect();
        for subset in (0..rows.len()).combinations(dim - 1) {
            let a: Vec<&Vec<BigInt>> = subset.iter().map(|&i| &normals[i]).collect();
            let d = cofactor_vector(&a, dim);
            if d.iter().all(|x| x.is_zero()) {
                continue;
            }
            let signs: Vec<BigInt> = normals
                .iter()
                .map(|n| n.iter().zip(&d).map(|(a, b)| a * b).sum())
                .collect();
            if signs.iter().all(|s| !s.is_positive()) || signs.iter().all(|s| !s.is_negative()) {
                return true;
            }
        }
        false
    }

    /// Vertices of the feasible region, `Ok(None)` if it is empty, and
    /// `Err(Unbounded)` if it is a nonempty unbounded polyhedron.
    pub fn vertices(&self) -> Result<Option<Vec<QVec>>> {
        let n = self.dim;
        let rows = match self.normalized() {
            Normalized::Infeasible => return Ok(None),
            Normalized::Rows(r) => r,
        };
        if n == 0 {
            return Ok(Some(vec![QVec(Vec::new())]));
        }
        let normals: Vec<Vec<Rat>> = rows.iter().map(|h| h.normal.0.clone()).collect();
        if rank(&normals, n) < n {
            // nonempty => contains a line; decide emptiness on a complement
            let mut pinned = rows.clone();
            for l in nullspace(&normals, n) {
                let l = QVec(l);
                pinned.push(Halfspace::new(l.clone(), Rat::zero()));
                pinned.push(Halfspace::new(-&l, Rat::zero()));
            }
            return if Self::enumerate_vertices(n, &pinned).is_empty() {
                Ok(None)
            } else {
                Err(Error::Unbounded)
            };
        }
        let verts = Self::enumerate_vertices(n, &rows);
        if verts.is_empty() {
            return Ok(None);
        }
        if Self::has_recession_ray(n, &rows) {
            return Err(Error::Unbounded);
        }
        Ok(Some(verts.into_iter().collect()))
    }

    pub fn to_body(&self) -> Result<Option<ConvexBody>> {
        Ok(self
            .vertices()?
            .map(|v| ConvexBody::from_vertices_unchecked(self.dim, v)))
    }
}
