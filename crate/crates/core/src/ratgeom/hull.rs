//! Exact beneath-beyond convex hull in the affine hull of the input.
//!
//! Points are first projected onto a coordinate subspace on which their affine
//! hull is a graph, so the incremental construction always runs in full
//! dimension `d`. Boundary facets are kept as `d`-point simplices; coplanar
//! simplices are merged afterwards by comparing their canonical hyperplanes.

use std::collections::{BTreeSet, HashMap};

use num::bigint::BigInt;
use num::{Integer, One, Zero};

use crate::linalg::{cofactor_vector, rank, rref};
use crate::rat::{primitive_direction, QVec, Rat};

use super::Halfspace;

/// Affine frame of a point set: its affine dimension, the coordinates used as
/// local chart, and the equations cutting out the affine hull.
#[derive(Clone, Debug)]
pub(crate) struct AffineFrame {
    pub dim: usize,
    pub pivots: Vec<usize>,
    pub equalities: Vec<Halfspace>,
}

impl AffineFrame {
    pub fn of(points: &[QVec]) -> AffineFrame {
        let n = points[0].dim();
        let p0 = &points[0];
        let diffs: Vec<Vec<Rat>> = points[1..].iter().map(|p| (p - p0).0).collect();
        let (r, pivots) = rref(&diffs, n);
        let mut equalities = Vec::new();
        for j in (0..n).filter(|j| !pivots.contains(j)) {
            let mut normal = vec![Rat::zero(); n];
            normal[j] = Rat::one();
            for (row, &s) in r.iter().zip(&pivots) {
                normal[s] = -row[j].clone();
            }
            let normal = canonical_normal(&normal);
            let offset = normal.dot(p0);
            equalities.push(Halfspace::new(normal, offset));
        }
        AffineFrame {
            dim: pivots.len(),
            pivots,
            equalities,
        }
    }

    pub fn project(&self, p: &QVec) -> Vec<Rat> {
        self.pivots.iter().map(|&i| p[i].clone()).collect()
    }

    pub fn lift_normal(&self, normal: &[Rat], n: usize) -> QVec {
        let mut out = QVec::zeros(n);
        for (x, &i) in normal.iter().zip(&self.pivots) {
            out.0[i] = x.clone();
        }
        out
    }
}

/// Scales a nonzero vector to the primitive integer vector on its ray.
pub(crate) fn canonical_normal(v: &[Rat]) -> QVec {
    QVec(
        primitive_direction(v)
            .into_iter()
            .map(Rat::from_integer)
            .collect(),
    )
}

#[derive(Clone, Debug)]
pub(crate) struct SimplexFacet {
    pub verts: Vec<usize>,
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facet in integer coordinates: `<normal, x> <= offset` with a primitive
/// normal.
struct IntFacet {
    verts: Vec<usize>,
    normal: Vec<BigInt>,
    offset: BigInt,
}

/// `interior` is `m` times an interior point, for the given `m`.
fn facet_through(pts: &[Vec<BigInt>], verts: Vec<usize>, interior: &[BigInt], m: &BigInt) -> IntFacet {
    let d = interior.len();
    let p0 = &pts[verts[0]];
    let rows: Vec<Vec<BigInt>> = verts[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(p0).map(|(x, y)| x - y).collect())
        .collect();
    let refs: Vec<&Vec<BigInt>> = rows.iter().collect();
    let mut normal = cofactor_vector(&refs, d);
    let g = normal.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    debug_assert!(!g.is_zero(), "facet points must be affinely independent");
    normal.iter_mut().for_each(|x| *x = &*x / &g);
    let mut offset = idot(&normal, p0);
    if idot(&normal, interior) > &offset * m {
        normal.iter_mut().for_each(|x| *x = -&*x);
        offset = -offset;
    }
    IntFacet {
        verts,
        normal,
        offset,
    }
}

/// Boundary simplices of the hull of `pts` (all of dimension `d >= 1`, with
/// affinely spanning input). The construction runs on the integer points
/// `L pts`, `L` the common denominator.
pub(crate) fn beneath_beyond(pts: &[Vec<Rat>]) -> Vec<SimplexFacet> {
    let d = pts[0].len();
    if d == 1 {
        let lo = (0..pts.len()).min_by(|&a, &b| pts[a][0].cmp(&pts[b][0])).unwrap();
        let hi = (0..pts.len()).max_by(|&a, &b| pts[a][0].cmp(&pts[b][0])).unwrap();
        return vec![
            SimplexFacet {
                verts: vec![lo],
                normal: vec![-Rat::one()],
                offset: -pts[lo][0].clone(),
            },
            SimplexFacet {
                verts: vec![hi],
                normal: vec![Rat::one()],
                offset: pts[hi][0].clone(),
            },
        ];
    }
    let l = pts.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ipts: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| p.iter().map(|x| x.numer() * (&l / x.denom())).collect())
        .collect();

    // initial simplex
    let mut simplex = vec![0usize];
    let mut diffs: Vec<Vec<Rat>> = Vec::new();
    for i in 1..pts.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let mut trial = diffs.clone();
        trial.push(sub(&pts[i], &pts[0]));
        if rank(&trial, d) == trial.len() {
            diffs = trial;
            simplex.push(i);
        }
    }
    assert_eq!(simplex.len(), d + 1, "points do not span the frame");
    let mut interior = vec![BigInt::zero(); d];
    for &i in &simplex {
        for (c, x) in interior.iter_mut().zip(&ipts[i]) {
            *c += x;
        }
    }
    let m = BigInt::from(d + 1);

    let mut facets: Vec<IntFacet> = (0..=d)
        .map(|skip| {
            let mut verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            verts.sort_unstable();
            facet_through(&ipts, verts, &interior, &m)
        })
        .collect();

    let in_simplex: BTreeSet<usize> = simplex.iter().copied().collect();
    for p in 0..pts.len() {
        if in_simplex.contains(&p) {
            continue;
        }
        let (visible, hidden): (Vec<IntFacet>, Vec<IntFacet>) = facets
            .into_iter()
            .partition(|f| idot(&f.normal, &ipts[p]) > f.offset);
        facets = hidden;
        if visible.is_empty() {
            continue;
        }
        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in &visible {
            for skip in 0..f.verts.len() {
                let ridge: Vec<usize> = f
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *ridge_count.entry(ridge).or_default() += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridge_count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort();
        for mut ridge in horizon {
            ridge.push(p);
            ridge.sort_unstable();
            facets.push(facet_through(&ipts, ridge, &interior, &m));
        }
    }
    facets
        .into_iter()
        .map(|f| SimplexFacet {
            verts: f.verts,
            normal: f.normal.into_iter().map(Rat::from_integer).collect(),
            offset: Rat::new(f.offset, l.clone()),
        })
        .collect()
}

/// Indices of extreme points among `pts` (which must span dimension `d`).
pub(crate) fn extreme_indices(pts: &[Vec<Rat>], facets: &[SimplexFacet]) -> Vec<usize> {
    let d = pts[0].len();
    let planes: BTreeSet<(Vec<Rat>, Rat)> = facets
        .iter()
        .map(|f| (f.normal.clone(), f.offset.clone()))
        .collect();
    let candidates: BTreeSet<usize> = facets.iter().flat_map(|f| f.verts.iter().copied()).collect();
    candidates
        .into_iter()
        .filter(|&i| {
            let tight: Vec<Vec<Rat>> = planes
                .iter()
                .filter(|(n, b)| &dot(n, &pts[i]) == b)
                .map(|(n, _)| n.clone())
                .collect();
            rank(&tight, d) == d
        })
        .collect()
}

/// Boundary structure of a body, derived from its vertex list.
#[derive(Clone, Debug)]
pub(crate) struct HullData {
    pub frame: AffineFrame,
    /// Boundary simplices as vertex indices (empty for a point).
    pub simplices: Vec<Vec<usize>>,
    /// Distinct facet hyperplanes lifted to the ambient space.
    pub facets: Vec<Halfspace>,
}

impl HullData {
    pub fn of_vertices(vertices: &[QVec]) -> HullData {
        let n = vertices[0].dim();
        let frame = AffineFrame::of(vertices);
        if frame.dim == 0 {
            return HullData {
                frame,
                simplices: Vec::new(),
                facets: Vec::new(),
            };
        }
        let pts: Vec<Vec<Rat>> = vertices.iter().map(|v| frame.project(v)).collect();
        let simplices = beneath_beyond(&pts);
        let planes: BTreeSet<(Vec<Rat>, Rat)> = simplices
            .iter()
            .map(|f| (f.normal.clone(), f.offset.clone()))
            .collect();
        let facets = planes
            .into_iter()
            .map(|(nrm, b)| Halfspace::new(frame.lift_normal(&nrm, n), b))
            .collect();
        HullData {
            simplices: simplices.into_iter().map(|f| f.verts).collect(),
            frame,
            facets,
        }
    }
}

/// Sorted, deduplicated extreme points of a nonempty point set.
pub(crate) fn extreme_points(points: &[QVec]) -> Vec<QVec> {
    let uniq: Vec<QVec> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if uniq.len() == 1 {
        return uniq;
    }
    let frame = AffineFrame::of(&uniq);
    let pts: Vec<Vec<Rat>> = uniq.iter().map(|v| frame.project(v)).collect();
    let facets = beneath_beyond(&pts);
    let keep = extreme_indices(&pts, &facets);
    let mut out: Vec<QVec> = keep.into_iter().map(|i| uniq[i].clone()).collect();
    out.sort();
    out
}
