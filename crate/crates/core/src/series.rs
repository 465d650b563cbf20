//! Graded linear subspaces `W = (W_k)` of a section ring, their valuation
//! semigroups `Gamma_k`, finite-level bodies `Delta_k`, and the pseudometric
//! `d(W, W') = limsup k^{-n} (2 dim(W_k + W'_k) - dim W_k - dim W'_k)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, rref};
use crate::poly::Poly;
use crate::rat::{fmt_rat, int, pow, to_f64, QVec, Rat};
use crate::ratgeom::{hausdorff_distance, hull, integer_points, ConvexBody};
use crate::toric::{Fan, ToricModel};
use crate::valuations::{
    toric_flag_iso, valuation_image_with, LexValue, SurfaceFlag, ToricFlag, Valuator, VarietyKind,
};

/// Flag used to value a series.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesFlag {
    Toric(ToricFlag),
    Surface(SurfaceFlag),
}

/// How a polynomial-backed series produces its degree-`k` piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyRule {
    /// All sections of `O(k * multidegree)`.
    Complete,
    /// Span of the `k`-fold products of the given degree-one sections.
    Generated(Vec<Poly>),
}

#[derive(Clone, Debug, PartialEq)]
enum Backend {
    Toric { model: ToricModel, filtered: bool },
    Polynomial { variety: VarietyKind, multidegree: Vec<u32>, rule: PolyRule },
    Sum(Box<GradedSeries>, Box<GradedSeries>),
    Intersection(Box<GradedSeries>, Box<GradedSeries>),
}

/// The bundle a series lives in; sums and intersections need equal ambients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    Toric { fan: Arc<Fan>, divisor: Vec<Rat> },
    Surface { variety: VarietyKind, multidegree: Vec<u32> },
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Toric { fan, .. } => fan.dim(),
            Ambient::Surface { .. } => 2,
        }
    }

    /// The ambient bundle at level `k` as a toric model.
    fn model_at(&self, k: u32) -> Result<ToricModel> {
        match self {
            Ambient::Toric { fan, divisor } => {
                let kk = int(k as i64);
                ToricModel::new(fan.clone(), divisor.iter().map(|a| a * &kk).collect(), None)
            }
            Ambient::Surface { variety, multidegree } => {
                let degs: Vec<i64> = multidegree.iter().map(|&d| d as i64 * k as i64).collect();
                ToricModel::line_bundle(variety.name(), &degs)
            }
        }
    }
}

/// Sections of one level: exponent sets for toric backends, a basis of
/// chart polynomials for polynomial backends.
#[derive(Clone, Debug, PartialEq)]
pub enum Level {
    Monomials(BTreeSet<Vec<i64>>),
    Span(Vec<Poly>),
}

impl Level {
    pub fn dim(&self) -> usize {
        match self {
            Level::Monomials(s) => s.len(),
            Level::Span(b) => b.len(),
        }
    }

    fn sum(self, other: Level) -> Result<Level> {
        match (self, other) {
            (Level::Monomials(a), Level::Monomials(b)) => Ok(Level::Monomials(a.union(&b).cloned().collect())),
            (Level::Span(a), Level::Span(b)) => Ok(Level::Span(span_basis(a.into_iter().chain(b).collect()))),
            _ => Err(Error::BackendMismatch("monomial and polynomial levels".into())),
        }
    }

    fn intersect(self, other: Level) -> Result<Level> {
        match (self, other) {
            (Level::Monomials(a), Level::Monomials(b)) => {
                Ok(Level::Monomials(a.intersection(&b).cloned().collect()))
            }
            (Level::Span(a), Level::Span(b)) => Ok(Level::Span(span_intersection(&a, &b))),
            _ => Err(Error::BackendMismatch("monomial and polynomial levels".into())),
        }
    }
}

fn monomial_index(polys: &[Poly]) -> BTreeMap<Vec<i64>, usize> {
    let exps: BTreeSet<Vec<i64>> = polys.iter().flat_map(|p| p.terms().map(|(e, _)| e.clone())).collect();
    exps.into_iter().enumerate().map(|(i, e)| (e, i)).collect()
}

fn from_coords(coords: &[Rat], index: &BTreeMap<Vec<i64>, usize>, nvars: usize) -> Poly {
    Poly::from_terms(
        nvars,
        index.iter().map(|(e, &i)| (e.clone(), coords[i].clone())),
    )
}

/// Echelon basis of the span.
fn span_basis(polys: Vec<Poly>) -> Vec<Poly> {
    let Some(nvars) = polys.first().map(Poly::nvars) else {
        return Vec::new();
    };
    let index = monomial_index(&polys);
    let rows: Vec<Vec<Rat>> = polys.iter().map(|p| p.coords(&index)).collect();
    let (basis, _) = rref(&rows, index.len());
    basis.iter().map(|r| from_coords(r, &index, nvars)).collect()
}

fn span_intersection(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let nvars = a[0].nvars();
    let all: Vec<Poly> = a.iter().chain(b).cloned().collect();
    let index = monomial_index(&all);
    let (p, q) = (a.len(), b.len());
    let cols: Vec<Vec<Rat>> = a
        .iter()
        .map(|x| x.coords(&index))
        .chain(b.iter().map(|x| x.coords(&index).into_iter().map(|c| -c).collect()))
        .collect();
    // rows of the system sum x_i a_i - sum y_j b_j = 0
    let rows: Vec<Vec<Rat>> = (0..index.len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let kernel = nullspace(&rows, p + q);
    let elems: Vec<Poly> = kernel
        .iter()
        .map(|x| {
            a.iter()
                .zip(&x[..p])
                .fold(Poly::zero(nvars), |acc, (ai, xi)| acc.add(&ai.scale(xi)))
        })
        .collect();
    span_basis(elems)
}

/// A graded linear subspace with a deterministic level provider.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSeries {
    backend: Backend,
}

impl GradedSeries {
    /// Monomial series of a toric bundle; `filtered` keeps only the sections
    /// bounded with respect to the model's metric (`alpha` in `kQ`).
    pub fn toric(model: ToricModel, filtered: bool) -> Result<Self> {
        if !model.is_integral() {
            return Err(Error::NonIntegralDivisor);
        }
        if filtered {
            model.metric_polytope()?;
        }
        Ok(GradedSeries {
            backend: Backend::Toric { model, filtered },
        })
    }

    pub fn polynomial(variety: VarietyKind, multidegree: Vec<u32>, rule: PolyRule) -> Result<Self> {
        if multidegree.len() != variety.degree_len() {
            return Err(Error::DegreeBound(format!(
                "{} needs {} degree entries",
                variety.name(),
                variety.degree_len()
            )));
        }
        if let PolyRule::Generated(gens) = &rule {
            for g in gens {
                if g.nvars() != 2 || !variety.fits(&multidegree, g) {
                    return Err(Error::DegreeBound(g.to_string()));
                }
            }
        }
        Ok(GradedSeries {
            backend: Backend::Polynomial {
                variety,
                multidegree,
                rule,
            },
        })
    }

    pub fn ambient(&self) -> Ambient {
        match &self.backend {
            Backend::Toric { model, .. } => Ambient::Toric {
                fan: model.fan.clone(),
                divisor: model.divisor.clone(),
            },
            Backend::Polynomial { variety, multidegree, .. } => Ambient::Surface {
                variety: *variety,
                multidegree: multidegree.clone(),
            },
            Backend::Sum(a, _) | Backend::Intersection(a, _) => a.ambient(),
        }
    }

    pub fn dim(&self) -> usize {
        self.ambient().dim()
    }

    fn check_compatible(&self, other: &GradedSeries) -> Result<()> {
        let (a, b) = (self.ambient(), other.ambient());
        if a != b {
            return Err(Error::BackendMismatch(format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }

    /// Sections of degree `k`.
    pub fn level(&self, k: u32) -> Result<Level> {
        match &self.backend {
            Backend::Toric { model, filtered } => {
                let kk = int(k as i64);
                let body = if *filtered {
                    model.metric_polytope()?
                } else {
                    match model.polytope() {
                        Ok(p) => p,
                        Err(Error::EmptyLinearSystem) => return Ok(Level::Monomials(BTreeSet::new())),
                        Err(e) => return Err(e),
                    }
                };
                Ok(Level::Monomials(integer_points(&body.scale(&kk)?).into_iter().collect()))
            }
            Backend::Polynomial {
                variety,
                multidegree,
                rule,
            } => match rule {
                PolyRule::Complete => {
                    let deg: Vec<u32> = multidegree.iter().map(|d| d * k).collect();
                    Ok(Level::Span(
                        variety
                            .monomials(&deg)
                            .into_iter()
                            .map(|e| Poly::monomial(e, Rat::one()))
                            .collect(),
                    ))
                }
                PolyRule::Generated(gens) => {
                    if k == 0 {
                        return Ok(Level::Span(vec![Poly::constant(2, Rat::one())]));
                    }
                    let basis = span_basis(gens.clone());
                    let prods = (0..k as usize)
                        .map(|_| 0..basis.len())
                        .multi_cartesian_product()
                        .filter(|ix| ix.windows(2).all(|w| w[0] <= w[1]))
                        .map(|ix| ix.iter().fold(Poly::constant(2, Rat::one()), |acc, &i| acc.mul(&basis[i])))
                        .collect();
                    Ok(Level::Span(span_basis(prods)))
                }
            },
            Backend::Sum(a, b) => a.level(k)?.sum(b.level(k)?),
            Backend::Intersection(a, b) => a.level(k)?.intersect(b.level(k)?),
        }
    }

    pub fn dim_k(&self, k: u32) -> Result<usize> {
        Ok(self.level(k)?.dim())
    }
}

/// `(W + W')_k = W_k + W'_k`.
pub fn sum_series(w: &GradedSeries, w2: &GradedSeries) -> Result<GradedSeries> {
    w.check_compatible(w2)?;
    Ok(GradedSeries {
        backend: Backend::Sum(Box::new(w.clone()), Box::new(w2.clone())),
    })
}

/// `(W ∩ W')_k = W_k ∩ W'_k`.
pub fn intersect_series(w: &GradedSeries, w2: &GradedSeries) -> Result<GradedSeries> {
    w.check_compatible(w2)?;
    Ok(GradedSeries {
        backend: Backend::Intersection(Box::new(w.clone()), Box::new(w2.clone())),
    })
}

/// Valuation of the normalized level-`k` bundle: `Phi (alpha + t_k)` where
/// `t_k` moves the level-`k` polytope so that the flag divisors have
/// coefficient zero.
fn toric_valuator(ambient: &Ambient, flag: &ToricFlag, k: u32) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let model = ambient.model_at(k)?;
    let phi = toric_flag_iso(&model.fan, flag)?;
    let t = model
        .normalize_to_flag(flag)?
        .twist
        .to_i64()
        .ok_or(Error::NonIntegralDivisor)?;
    let shift = crate::linalg::mat_vec_i64(&phi, &t);
    Ok((phi, shift))
}

/// `Gamma_k = nu(W_k \ 0)`, stored unscaled.
pub fn gamma_k(w: &GradedSeries, flag: &SeriesFlag, k: u32) -> Result<BTreeSet<LexValue>> {
    let ambient = w.ambient();
    let level = w.level(k)?;
    match (&level, flag) {
        (Level::Monomials(exps), SeriesFlag::Toric(f)) => {
            let (phi, shift) = toric_valuator(&ambient, f, k)?;
            Ok(exps
                .iter()
                .map(|a| {
                    let v = crate::linalg::mat_vec_i64(&phi, a);
                    LexValue(v.iter().zip(&shift).map(|(x, s)| x + s).collect())
                })
                .collect())
        }
        (Level::Monomials(exps), SeriesFlag::Surface(sf)) => {
            // chart 0 of P^2 and P^1 x P^1 is the cone of the first two rays
            let Ambient::Toric { fan, .. } = &ambient else { unreachable!() };
            if **fan != Fan::named(sf.variety.name())? {
                return Err(Error::InvalidFlag("surface flag does not match the fan".into()));
            }
            let (_, shift) = toric_valuator(&ambient, &ToricFlag::new(vec![0, 1]), k)?;
            let polys: Vec<Poly> = exps
                .iter()
                .map(|a| Poly::monomial(a.iter().zip(&shift).map(|(x, s)| x + s).collect(), Rat::one()))
                .collect();
            valuation_image_with(&Valuator::Surface(sf.clone()), &polys)
        }
        (Level::Span(basis), SeriesFlag::Toric(f)) => {
            let (phi, shift) = toric_valuator(&ambient, f, k)?;
            valuation_image_with(&Valuator::Toric { phi, shift }, basis)
        }
        (Level::Span(basis), SeriesFlag::Surface(sf)) => {
            let Ambient::Surface { variety, .. } = &ambient else { unreachable!() };
            if *variety != sf.variety {
                return Err(Error::InvalidFlag("surface flag does not match the series".into()));
            }
            valuation_image_with(&Valuator::Surface(sf.clone()), basis)
        }
    }
}

/// `Delta_k = conv(Gamma_k / k)`, `None` when `W_k = 0`.
pub fn delta_k(w: &GradedSeries, flag: &SeriesFlag, k: u32) -> Result<Option<ConvexBody>> {
    let g = gamma_k(w, flag, k)?;
    scaled_hull(&g, k)
}

fn scaled_hull(g: &BTreeSet<LexValue>, k: u32) -> Result<Option<ConvexBody>> {
    if g.is_empty() {
        return Ok(None);
    }
    let inv = Rat::one() / int(k as i64);
    let pts: Vec<QVec> = g.iter().map(|v| QVec::from_ints(&v.0).scaled(&inv)).collect();
    hull(&pts).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyMode {
    Union,
    Stabilized,
}

/// Diagnostics of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub k: u32,
    pub dim: usize,
    pub gamma_count: usize,
    pub delta: Option<ConvexBody>,
    pub volume: Option<Rat>,
    /// `vol(Delta_k) - dim W_k / k^n`.
    pub volume_gap: Option<Rat>,
    pub hausdorff_to_ref: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub records: Vec<LevelRecord>,
    pub reference: ConvexBody,
    /// Whether the reference is an exact limit body supplied by the caller.
    pub reference_exact: bool,
    /// Smallest `k0` with `Delta_k = Delta_{k_max}` for all `k0 <= k <= k_max`.
    pub stabilized_from: Option<u32>,
    pub matches_reference: bool,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,dim,vol_num,vol_den,hausdorff_to_ref\n");
        for r in &self.records {
            let (num, den) = match &r.volume {
                Some(v) => (v.numer().to_string(), v.denom().to_string()),
                None => (String::new(), String::new()),
            };
            let h = r.hausdorff_to_ref.map(|h| format!("{h:.12}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{}", r.k, r.dim, num, den, h);
        }
        out
    }
}

fn map_levels<T: Send>(k_max: u32, f: impl Fn(u32) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (1..=k_max).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (1..=k_max).map(f).collect()
    }
}

/// Finite-level approximation of `Delta(W)`: the hull of all `Delta_k` with
/// `k <= k_max`, plus per-level diagnostics against `reference` (or against
/// the returned body when no exact limit is known).
pub fn okounkov_body(
    w: &GradedSeries,
    flag: &SeriesFlag,
    k_max: u32,
    mode: BodyMode,
    reference: Option<ConvexBody>,
) -> Result<(ConvexBody, ConvergenceReport)> {
    let n = w.dim();
    let levels = map_levels(k_max, |k| -> Result<(usize, BTreeSet<LexValue>)> {
        Ok((w.dim_k(k)?, gamma_k(w, flag, k)?))
    });
    let mut records = Vec::with_capacity(k_max as usize);
    for (k, lvl) in (1..=k_max).zip(levels) {
        let (dim, gamma) = lvl?;
        let delta = scaled_hull(&gamma, k)?;
        let volume = delta.as_ref().map(ConvexBody::volume);
        let volume_gap = volume
            .as_ref()
            .map(|v| v - Rat::from_integer(dim.into()) / pow(&int(k as i64), n));
        records.push(LevelRecord {
            k,
            dim,
            gamma_count: gamma.len(),
            delta,
            volume,
            volume_gap,
            hausdorff_to_ref: None,
        });
    }
    let pts: Vec<QVec> = records
        .iter()
        .filter_map(|r| r.delta.as_ref())
        .flat_map(|d| d.vertices().iter().cloned())
        .collect();
    if pts.is_empty() {
        return Err(Error::NoSections(k_max));
    }
    let body = hull(&pts)?;
    let reference_exact = reference.is_some();
    let reference = reference.unwrap_or_else(|| body.clone());
    for r in &mut records {
        if let Some(d) = &r.delta {
            r.hausdorff_to_ref = Some(hausdorff_distance(d, &reference)?.approx);
        }
    }
    let stabilized_from = match mode {
        BodyMode::Union => None,
        BodyMode::Stabilized => {
            let last = records.last().and_then(|r| r.delta.clone());
            last.map(|top| {
                let mut k0 = k_max;
                for r in records.iter().rev().skip(1) {
                    if r.delta.as_ref() == Some(&top) {
                        k0 = r.k;
                    } else {
                        break;
                    }
                }
                k0
            })
        }
    };
    let matches_reference = body == reference;
    Ok((
        body,
        ConvergenceReport {
            records,
            reference,
            reference_exact,
            stabilized_from,
            matches_reference,
        },
    ))
}

/// Raw per-level values of the series distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceSequence {
    pub values: Vec<(u32, Rat)>,
    /// Maximum over the last half of the computed levels.
    pub trailing_max: Rat,
}

impl DistanceSequence {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,distance_num,distance_den\n");
        for (k, d) in &self.values {
            let _ = writeln!(out, "{},{},{}", k, d.numer(), d.denom());
        }
        out
    }
}

/// `d_k(W, W') = k^{-n} (2 dim(W_k + W'_k) - dim W_k - dim W'_k)`.
pub fn distance_k(w: &GradedSeries, w2: &GradedSeries, k: u32) -> Result<Rat> {
    w.check_compatible(w2)?;
    let (a, b) = (w.level(k)?, w2.level(k)?);
    let (da, db) = (a.dim() as i64, b.dim() as i64);
    let ds = a.sum(b)?.dim() as i64;
    Ok(int(2 * ds - da - db) / pow(&int(k as i64), w.dim()))
}

pub fn series_distance_seq(w: &GradedSeries, w2: &GradedSeries, k_max: u32) -> Result<DistanceSequence> {
    w.check_compatible(w2)?;
    let vals = map_levels(k_max, |k| distance_k(w, w2, k));
    let values: Vec<(u32, Rat)> = (1..=k_max).zip(vals).map(|(k, v)| v.map(|v| (k, v))).try_collect()?;
    let start = values.len() / 2;
    let trailing_max = values[start..].iter().map(|(_, v)| v.clone()).max().unwrap_or_else(Rat::zero);
    Ok(DistanceSequence { values, trailing_max })
}

impl std::fmt::Display for DistanceSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "k={k}: {}", fmt_rat(v))?;
        }
        write!(f, "trailing max: {} (~{:.6})", fmt_rat(&self.trailing_max), to_f64(&self.trailing_max))
    }
}
