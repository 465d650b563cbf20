//! Piecewise-linear functions `min_j (<a_j, x> + b_j)` on polytopes and
//! their exact integrals.

use std::collections::BTreeSet;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::rat::{factorial, int, QVec, Rat};
use crate::ratgeom::{ConvexBody, Halfspace, HalfspaceSystem};

/// `x -> <a, x> + b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub a: QVec,
    pub b: Rat,
}

impl Affine {
    pub fn new(a: QVec, b: Rat) -> Self {
        Affine { a, b }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.a.dot(x) + &self.b
    }

    pub fn neg(&self) -> Affine {
        Affine::new(-&self.a, -&self.b)
    }
}

pub fn min_eval(pieces: &[Affine], x: &[Rat]) -> Rat {
    pieces.iter().map(|p| p.eval(x)).min().expect("nonempty pieces")
}

pub fn max_eval(pieces: &[Affine], x: &[Rat]) -> Rat {
    pieces.iter().map(|p| p.eval(x)).max().expect("nonempty pieces")
}

/// Distinct pieces, in sorted order.
pub fn dedup(pieces: &[Affine]) -> Vec<Affine> {
    pieces.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Regions of `domain` on which a single piece attains the minimum, each
/// paired with that piece. Lower-dimensional regions are kept only when
/// `keep_thin` is set.
pub fn min_cells(domain: &ConvexBody, pieces: &[Affine], keep_thin: bool) -> Result<Vec<(ConvexBody, Affine)>> {
    let pieces = dedup(pieces);
    let n = domain.dim();
    let mut out = Vec::new();
    for (j, pj) in pieces.iter().enumerate() {
        let rows: Vec<Halfspace> = pieces
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, pi)| Halfspace::new(&pj.a - &pi.a, &pi.b - &pj.b))
            .collect();
        let Some(cell) = domain.intersect(&HalfspaceSystem::new(n, rows)?)? else {
            continue;
        };
        if keep_thin || cell.is_full_dimensional() {
            out.push((cell, pj.clone()));
        }
    }
    Ok(out)
}

fn simplex_volume(s: &[QVec]) -> Rat {
    let rows: Vec<Vec<Rat>> = s[1..].iter().map(|v| (v - &s[0]).0).collect();
    det(&rows).abs() / factorial(s.len() - 1)
}

/// `int_K f` for affine `f`: on each simplex, volume times the value at the
/// barycenter.
pub fn integrate_affine(body: &ConvexBody, f: &Affine) -> Rat {
    let mut total = Rat::zero();
    for s in body.triangulate() {
        let m = int(s.len() as i64);
        let mut c = QVec::zeros(body.dim());
        for v in &s {
            c = &c + v;
        }
        let c = QVec(c.iter().map(|x| x / &m).collect());
        total += simplex_volume(&s) * f.eval(&c);
    }
    total
}

/// `int_domain min_j f_j`.
pub fn integrate_min_affine(domain: &ConvexBody, pieces: &[Affine]) -> Result<Rat> {
    if pieces.is_empty() {
        return Err(Error::InvalidTestFunction("no pieces".into()));
    }
    if !domain.is_full_dimensional() {
        return Ok(Rat::zero());
    }
    Ok(min_cells(domain, pieces, false)?
        .iter()
        .map(|(cell, f)| integrate_affine(cell, f))
        .fold(Rat::zero(), |a, b| a + b))
}

/// `int_domain max_j f_j`.
pub fn integrate_max_affine(domain: &ConvexBody, pieces: &[Affine]) -> Result<Rat> {
    let neg: Vec<Affine> = pieces.iter().map(Affine::neg).collect();
    Ok(-integrate_min_affine(domain, &neg)?)
}

/// Maximum of `min_j f_j` over the domain (attained at a cell vertex).
pub fn max_of_min(domain: &ConvexBody, pieces: &[Affine]) -> Result<Rat> {
    let cells = min_cells(domain, pieces, true)?;
    Ok(cells
        .iter()
        .flat_map(|(c, f)| c.vertices().iter().map(move |v| f.eval(v)))
        .max()
        .expect("cells cover the domain"))
}
