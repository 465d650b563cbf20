//! Exact rational convex geometry: polytopes in V-representation with a lazily
//! derived H-representation, plus the operations the Okounkov-body pipelines
//! need (hulls, volumes, Minkowski sums, mixed volumes, Hausdorff distance,
//! lattice points, inner parallel bodies).

mod distance;
mod halfspace;
mod hull;
mod lattice;

use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::rat::{factorial, sqrt_upper, QVec, Rat};

pub use distance::{hausdorff_distance, point_sq_distance, HausdorffDistance};
pub use halfspace::HalfspaceSystem;
pub use lattice::{integer_points, lattice_points};

use hull::HullData;

/// Closed halfspace `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: QVec, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - <normal, x>`; non-negative exactly on the halfspace.
    pub fn slack(&self, x: &[Rat]) -> Rat {
        &self.offset - self.normal.dot(x)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight(&self, x: &[Rat]) -> bool {
        self.slack(x).is_zero()
    }
}

/// A nonempty polytope in `Q^n`, stored by its extreme points in
/// lexicographic order.
#[derive(Clone)]
pub struct ConvexBody {
    dim: usize,
    vertices: Vec<QVec>,
    hull: OnceLock<Arc<HullData>>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for ConvexBody {}

impl fmt::Debug for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexBody(dim={}, [", self.dim)?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "])")
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Convex hull of a finite point set.
pub fn hull(points: &[QVec]) -> Result<ConvexBody> {
    let first = points.first().ok_or(Error::EmptyHull)?;
    let n = first.dim();
    for p in points {
        check_dim(n, p.dim())?;
    }
    Ok(ConvexBody::from_vertices_unchecked(n, hull::extreme_points(points)))
}

impl ConvexBody {
    /// Caller guarantees `vertices` are exactly the extreme points, sorted.
    pub(crate) fn from_vertices_unchecked(dim: usize, vertices: Vec<QVec>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        ConvexBody {
            dim,
            vertices,
            hull: OnceLock::new(),
        }
    }

    pub fn point(p: QVec) -> Self {
        let n = p.dim();
        Self::from_vertices_unchecked(n, vec![p])
    }

    /// Axis-parallel box `prod [lo_i, hi_i]`.
    pub fn cuboid(bounds: &[(Rat, Rat)]) -> Result<Self> {
        let pts: Vec<QVec> = bounds
            .iter()
            .map(|(lo, hi)| [lo.clone(), hi.clone()])
            .multi_cartesian_product()
            .map(QVec)
            .collect();
        hull(&pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    fn hull_data(&self) -> &HullData {
        self.hull
            .get_or_init(|| Arc::new(HullData::of_vertices(&self.vertices)))
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.hull_data().frame.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim
    }

    /// Irredundant inequality description: one row per facet plus both
    /// directions of every equation of the affine hull. Normals are primitive
    /// integer vectors.
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let h = self.hull_data();
        let mut rows = h.facets.clone();
        for eq in &h.frame.equalities {
            rows.push(eq.clone());
            rows.push(Halfspace::new(-&eq.normal, -eq.offset.clone()));
        }
        rows
    }

    /// Facet inequalities only (empty for a point; no equations).
    pub fn facets(&self) -> &[Halfspace] {
        &self.hull_data().facets
    }

    pub fn contains(&self, x: &QVec) -> Result<bool> {
        check_dim(self.dim, x.dim())?;
        Ok(self.halfspaces().iter().all(|h| h.contains(x)))
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &ConvexBody) -> Result<bool> {
        check_dim(other.dim, self.dim)?;
        let rows = other.halfspaces();
        Ok(self
            .vertices
            .iter()
            .all(|v| rows.iter().all(|h| h.contains(v))))
    }

    /// Support function `max <u, v>` over the vertices.
    pub fn support(&self, u: &QVec) -> Result<Rat> {
        check_dim(self.dim, u.dim())?;
        Ok(self.vertices.iter().map(|v| u.dot(v)).max().unwrap())
    }

    /// Exact Lebesgue volume; zero for lower-dimensional bodies.
    pub fn volume(&self) -> Rat {
        if !self.is_full_dimensional() {
            return Rat::zero();
        }
        let total = self
            .triangulation_indices()
            .iter()
            .map(|s| self.simplex_det(s).abs())
            .fold(Rat::zero(), |a, b| a + b);
        total / factorial(self.dim)
    }

    fn simplex_det(&self, s: &[usize]) -> Rat {
        let v0 = &self.vertices[s[0]];
        let rows: Vec<Vec<Rat>> = s[1..].iter().map(|&i| (&self.vertices[i] - v0).0).collect();
        det(&rows)
    }

    /// Simplices (as `n+1` vertex indices) coning vertex 0 over the boundary.
    fn triangulation_indices(&self) -> Vec<Vec<usize>> {
        let h = self.hull_data();
        h.simplices
            .iter()
            .filter(|f| !f.contains(&0))
            .map(|f| {
                let mut s = vec![0];
                s.extend(f.iter().copied());
                s
            })
            .filter(|s| !self.simplex_det(s).is_zero())
            .collect()
    }

    /// Triangulation of a full-dimensional body into `n`-simplices.
    pub fn triangulate(&self) -> Vec<Vec<QVec>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        if self.dim == 0 {
            return vec![vec![self.vertices[0].clone()]];
        }
        self.triangulation_indices()
            .into_iter()
            .map(|s| s.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// `{t x : x in K}`; `t = 0` gives the origin.
    pub fn scale(&self, t: &Rat) -> Result<ConvexBody> {
        if t.is_negative() {
            return Err(Error::InvalidScale);
        }
        if t.is_zero() {
            return Ok(ConvexBody::point(QVec::zeros(self.dim)));
        }
        Ok(ConvexBody::from_vertices_unchecked(
            self.dim,
            self.vertices.iter().map(|v| v.scaled(t)).collect(),
        ))
    }

    pub fn translate(&self, t: &QVec) -> Result<ConvexBody> {
        check_dim(self.dim, t.dim())?;
        Ok(ConvexBody::from_vertices_unchecked(
            self.dim,
            self.vertices.iter().map(|v| v + t).collect(),
        ))
    }

    /// Image under an integer linear map given by its rows.
    pub fn map_linear(&self, rows: &[Vec<i64>]) -> Result<ConvexBody> {
        for r in rows {
            check_dim(self.dim, r.len())?;
        }
        let pts: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| QVec(rows.iter().map(|r| QVec::from_ints(r).dot(v)).collect()))
            .collect();
        hull(&pts)
    }

    /// Intersection with a halfspace system; `None` when empty.
    pub fn intersect(&self, system: &HalfspaceSystem) -> Result<Option<ConvexBody>> {
        check_dim(self.dim, system.dim)?;
        let mut rows = self.halfspaces();
        rows.extend(system.rows.iter().cloned());
        HalfspaceSystem::new(self.dim, rows)?.to_body()
    }

    pub fn intersect_body(&self, other: &ConvexBody) -> Result<Option<ConvexBody>> {
        self.intersect(&HalfspaceSystem::new(other.dim, other.halfspaces())?)
    }

    /// Centroid of the vertex list (an interior point in the relative sense).
    pub fn vertex_centroid(&self) -> QVec {
        let mut c = QVec::zeros(self.dim);
        for v in &self.vertices {
            c = &c + v;
        }
        c.scaled(&(Rat::from_integer(1.into()) / Rat::from_integer((self.vertices.len() as i64).into())))
    }

    /// Inner parallel body `{x : d(x, boundary) >= delta}`, with each facet
    /// normal length replaced by a rational upper bound (so the result is
    /// contained in the exact inner body).
    pub fn inner_body(&self, delta: &Rat) -> Result<Option<ConvexBody>> {
        if !self.is_full_dimensional() {
            return Err(Error::DegenerateBody);
        }
        let rows: Vec<Halfspace> = self
            .facets()
            .iter()
            .map(|h| {
                let len = sqrt_upper(&h.normal.norm_sq());
                Halfspace::new(h.normal.clone(), &h.offset - delta * len)
            })
            .collect();
        HalfspaceSystem::new(self.dim, rows)?.to_body()
    }
}

pub fn minkowski_sum(k: &ConvexBody, l: &ConvexBody) -> Result<ConvexBody> {
    check_dim(k.dim, l.dim)?;
    let pts: Vec<QVec> = k
        .vertices
        .iter()
        .cartesian_product(&l.vertices)
        .map(|(a, b)| a + b)
        .collect();
    hull(&pts)
}

pub fn minkowski_sum_all(bodies: &[&ConvexBody]) -> Result<ConvexBody> {
    let mut acc = bodies[0].clone();
    for b in &bodies[1..] {
        acc = minkowski_sum(&acc, b)?;
    }
    Ok(acc)
}

/// Mixed volume by polarization, normalised so that `MV(K,...,K) = vol K`:
/// `MV = (1/n!) sum_{S} (-1)^{n-|S|} vol(sum_{i in S} K_i)`.
pub fn mixed_volume(bodies: &[ConvexBody]) -> Result<Rat> {
    let n = bodies.first().map(|b| b.dim).unwrap_or(0);
    if bodies.len() != n || n == 0 {
        return Err(Error::ArityMismatch {
            expected: n,
            got: bodies.len(),
        });
    }
    for b in bodies {
        check_dim(n, b.dim)?;
    }
    let mut total = Rat::zero();
    for size in 1..=n {
        for subset in (0..n).combinations(size) {
            let parts: Vec<&ConvexBody> = subset.iter().map(|&i| &bodies[i]).collect();
            let vol = minkowski_sum_all(&parts)?.volume();
            if (n - size) % 2 == 0 {
                total += vol;
            } else {
                total -= vol;
            }
        }
    }
    Ok(total / factorial(n))
}

#[cfg(test)]
mod tests;
