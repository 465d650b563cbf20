//! Rank-`n` lexicographic valuations coming from admissible flags.
//!
//! Two backends are provided:
//! * torus-invariant flags on a smooth toric variety, where a section written
//!   in the chart of the flag cone is valued by its lex-minimal exponent;
//! * curve-and-point flags on a surface (the projective plane or the quadric
//!   `P^1 x P^1`), where `nu_1` is the vanishing order along the curve and
//!   `nu_2` the order at the point of the restriction.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det, det_i64, mat_vec_i64};
use crate::poly::{Poly, Series};
use crate::rat::{fmt_rat, Rat};
use crate::toric::Fan;

/// Valuation vector, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexValue(pub Vec<i64>);

impl LexValue {
    pub fn add(&self, other: &LexValue) -> LexValue {
        LexValue(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Torus-invariant flag `Y_i = D_{r_1} ∩ ... ∩ D_{r_i}` given by ordered ray
/// indices of a maximal cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToricFlag {
    pub rays: Vec<usize>,
}

impl ToricFlag {
    pub fn new(rays: Vec<usize>) -> Self {
        ToricFlag { rays }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarietyKind {
    ProjectivePlane,
    QuadricP1xP1,
}

impl VarietyKind {
    pub fn name(&self) -> &'static str {
        match self {
            VarietyKind::ProjectivePlane => "p2",
            VarietyKind::QuadricP1xP1 => "p1xp1",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "p2" => Ok(VarietyKind::ProjectivePlane),
            "p1xp1" => Ok(VarietyKind::QuadricP1xP1),
            other => Err(Error::Schema(format!("unknown surface {other:?}"))),
        }
    }

    /// Number of degree entries: `(a)` on the plane, `(a, b)` on the quadric.
    pub fn degree_len(&self) -> usize {
        match self {
            VarietyKind::ProjectivePlane => 1,
            VarietyKind::QuadricP1xP1 => 2,
        }
    }

    pub fn fits(&self, multidegree: &[u32], p: &Poly) -> bool {
        if !p.is_polynomial() {
            return false;
        }
        match self {
            VarietyKind::ProjectivePlane => p.total_degree() <= multidegree[0] as i64,
            VarietyKind::QuadricP1xP1 => {
                p.degree_in(0) <= multidegree[0] as i64 && p.degree_in(1) <= multidegree[1] as i64
            }
        }
    }

    /// Chart monomials `u^i v^j` spanning the sections of the given degree.
    pub fn monomials(&self, multidegree: &[u32]) -> Vec<Vec<i64>> {
        match self {
            VarietyKind::ProjectivePlane => {
                let a = multidegree[0] as i64;
                (0..=a)
                    .flat_map(|i| (0..=a - i).map(move |j| vec![i, j]))
                    .collect()
            }
            VarietyKind::QuadricP1xP1 => {
                let (a, b) = (multidegree[0] as i64, multidegree[1] as i64);
                (0..=a).flat_map(|i| (0..=b).map(move |j| vec![i, j])).collect()
            }
        }
    }
}

pub const CHART_VARS: [&str; 2] = ["u", "v"];

/// A global section written in the affine chart coordinates `(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySection {
    pub variety: VarietyKind,
    pub multidegree: Vec<u32>,
    pub form: Poly,
}

impl PolySection {
    pub fn new(variety: VarietyKind, multidegree: Vec<u32>, form: Poly) -> Result<Self> {
        if multidegree.len() != variety.degree_len() || form.nvars() != 2 {
            return Err(Error::DegreeBound(format!(
                "{} needs {} degree entries in two chart variables",
                variety.name(),
                variety.degree_len()
            )));
        }
        if !variety.fits(&multidegree, &form) {
            return Err(Error::DegreeBound(form.display_with(&CHART_VARS)));
        }
        Ok(PolySection {
            variety,
            multidegree,
            form,
        })
    }
}

type ParamCache = Arc<Mutex<Option<(Series, Series)>>>;

/// Flag `X ⊇ C ⊇ {p}` with `C` an irreducible curve smooth at `p`.
#[derive(Clone, Debug)]
pub struct SurfaceFlag {
    pub variety: VarietyKind,
    pub curve: Poly,
    pub point: [Rat; 2],
    pub chart: u8,
    /// Chart variable used as local parameter along the curve.
    param_var: usize,
    cache: ParamCache,
}

impl PartialEq for SurfaceFlag {
    fn eq(&self, o: &Self) -> bool {
        self.variety == o.variety && self.curve == o.curve && self.point == o.point && self.chart == o.chart
    }
}

impl SurfaceFlag {
    pub fn new(variety: VarietyKind, curve: Poly, point: [Rat; 2], chart: u8) -> Result<Self> {
        let max_chart = match variety {
            VarietyKind::ProjectivePlane => 2,
            VarietyKind::QuadricP1xP1 => 3,
        };
        if chart > max_chart {
            return Err(Error::InvalidFlag(format!("chart {chart} out of range")));
        }
        if curve.nvars() != 2 || !curve.is_polynomial() {
            return Err(Error::InvalidFlag("curve must be a polynomial in u, v".into()));
        }
        check_irreducible(variety, &curve)?;
        if !curve.eval(&point).is_zero() {
            return Err(Error::InvalidFlag(format!(
                "point ({}, {}) is not on the curve",
                fmt_rat(&point[0]),
                fmt_rat(&point[1])
            )));
        }
        let du = curve.partial(0).eval(&point);
        let dv = curve.partial(1).eval(&point);
        let param_var = if !dv.is_zero() {
            0
        } else if !du.is_zero() {
            1
        } else {
            return Err(Error::InvalidFlag("curve is singular at the point".into()));
        };
        Ok(SurfaceFlag {
            variety,
            curve,
            point,
            chart,
            param_var,
            cache: Arc::new(Mutex::new(None)),
        })
    }

    /// The diagonal `u = v` through the origin on `P^1 x P^1`.
    pub fn p1xp1_diagonal() -> Self {
        let curve = Poly::parse("u - v", &CHART_VARS).unwrap();
        SurfaceFlag::new(VarietyKind::QuadricP1xP1, curve, [Rat::zero(), Rat::zero()], 0).unwrap()
    }

    /// Local analytic parametrization `t -> (u(t), v(t))` of the curve at the
    /// point, modulo `t^order`: the parameter variable moves as `p + t`, the
    /// other is solved by fixed-point iteration of the implicit equation.
    fn parametrization(&self, order: usize) -> (Series, Series) {
        let mut guard = self.cache.lock().unwrap();
        if let Some((u, v)) = guard.as_ref() {
            if u.order() >= order {
                let cut = |s: &Series| Series::from_coeffs(s.coeffs()[..order].to_vec(), order);
                return (cut(u), cut(v));
            }
        }
        let order_c = order.max(8);
        let p = self.param_var;
        let q = 1 - p;
        let slope = self.curve.partial(q).eval(&self.point);
        let inv = Rat::from_integer(1.into()) / slope;
        let mut series = [Series::zero(order_c), Series::zero(order_c)];
        series[p] = Series::linear(order_c, self.point[p].clone());
        series[q] = Series::constant(order_c, self.point[q].clone());
        for _ in 0..=order_c {
            let g = self.curve.compose_series(&series);
            if g.valuation().is_none() {
                break;
            }
            series[q] = series[q].sub(&g.scale(&inv));
        }
        let [u, v] = series;
        *guard = Some((u.clone(), v.clone()));
        drop(guard);
        self.parametrization(order)
    }

    /// `(nu, leading coefficient)` of a nonzero chart polynomial.
    pub fn leading(&self, f: &Poly) -> Result<(LexValue, Rat)> {
        if f.is_zero() {
            return Err(Error::ZeroSection);
        }
        let mut h = f.clone();
        let mut m = 0i64;
        while let Some(q) = h.div_exact(&self.curve) {
            h = q;
            m += 1;
        }
        let order = (h.total_degree() * self.curve.total_degree()) as usize + 1;
        let (u, v) = self.parametrization(order);
        let restricted = h.compose_series(&[u, v]);
        let (b, c) = restricted.valuation().ok_or(Error::FlagDegeneracy)?;
        Ok((LexValue(vec![m, b as i64]), c.clone()))
    }
}

fn check_irreducible(variety: VarietyKind, g: &Poly) -> Result<()> {
    let unsupported = || Error::InvalidFlag(format!("unsupported flag curve {}", g.display_with(&CHART_VARS)));
    if g.total_degree() == 1 {
        return Ok(());
    }
    match variety {
        VarietyKind::ProjectivePlane if g.total_degree() == 2 => {
            let c = |e: [i64; 2]| g.coeff(&e);
            let half = Rat::new(1.into(), 2.into());
            let m = vec![
                vec![c([2, 0]), c([1, 1]) * &half, c([1, 0]) * &half],
                vec![c([1, 1]) * &half, c([0, 2]), c([0, 1]) * &half],
                vec![c([1, 0]) * &half, c([0, 1]) * &half, c([0, 0])],
            ];
            if det(&m).is_zero() {
                return Err(Error::InvalidFlag("conic is degenerate (reducible)".into()));
            }
            Ok(())
        }
        VarietyKind::QuadricP1xP1 if g.degree_in(0) == 1 && g.degree_in(1) == 1 && g.total_degree() == 2 => {
            let (a, b, c, d) = (g.coeff(&[1, 1]), g.coeff(&[1, 0]), g.coeff(&[0, 1]), g.coeff(&[0, 0]));
            if (a * d - b * c).is_zero() {
                return Err(Error::InvalidFlag("(1,1) curve is reducible".into()));
            }
            Ok(())
        }
        _ => Err(unsupported()),
    }
}

/// The isomorphism `M -> Z^n, u -> (<u, v_i>)_i` induced by the flag rays.
pub fn toric_flag_iso(fan: &Fan, flag: &ToricFlag) -> Result<Vec<Vec<i64>>> {
    let n = fan.dim();
    if flag.rays.len() != n || flag.rays.iter().any(|&r| r >= fan.rays().len()) {
        return Err(Error::InvalidFlag(format!("need {n} valid ray indices")));
    }
    let mut sorted = flag.rays.clone();
    sorted.sort_unstable();
    if !fan
        .max_cones()
        .iter()
        .any(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c == sorted
        })
    {
        return Err(Error::InvalidFlag(format!("rays {:?} do not span a maximal cone", flag.rays)));
    }
    let phi: Vec<Vec<i64>> = flag.rays.iter().map(|&i| fan.rays()[i].clone()).collect();
    let d = det_i64(&phi);
    if d.abs() != Rat::from_integer(1.into()) {
        return Err(Error::NotUnimodular(fmt_rat(&d)));
    }
    Ok(phi)
}

pub fn valuate_monomial(phi: &[Vec<i64>], alpha: &[i64]) -> LexValue {
    LexValue(mat_vec_i64(phi, alpha))
}

pub fn valuate_surface(flag: &SurfaceFlag, s: &PolySection) -> Result<LexValue> {
    if s.variety != flag.variety {
        return Err(Error::InvalidFlag("section and flag live on different surfaces".into()));
    }
    Ok(flag.leading(&s.form)?.0)
}

/// A valuation ready to be applied to the sections of one graded piece.
#[derive(Clone, Debug)]
pub enum Valuator {
    /// Lex-minimal `phi * e + shift` over the exponents `e` of the section.
    Toric { phi: Vec<Vec<i64>>, shift: Vec<i64> },
    Surface(SurfaceFlag),
}

impl Valuator {
    pub fn rank(&self) -> usize {
        match self {
            Valuator::Toric { phi, .. } => phi.len(),
            Valuator::Surface(_) => 2,
        }
    }

    pub fn leading(&self, f: &Poly) -> Result<(LexValue, Rat)> {
        match self {
            Valuator::Toric { phi, shift } => f
                .terms()
                .map(|(e, c)| {
                    let mut v = mat_vec_i64(phi, e);
                    for (x, s) in v.iter_mut().zip(shift) {
                        *x += s;
                    }
                    (LexValue(v), c.clone())
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .ok_or(Error::ZeroSection),
            Valuator::Surface(flag) => flag.leading(f),
        }
    }
}

/// All values `nu(s)` for nonzero `s` in the span of `sections`.
///
/// Greedy adapted-basis reduction: the working section of lex-smallest value
/// becomes a pivot (ties go to input order) and is cancelled out of every other
/// section sharing its value. Values of one-dimensional leaves make each
/// cancellation raise the value strictly, so pivots come out distinct and their
/// number equals the dimension of the span.
pub fn valuation_image_with(valuator: &Valuator, sections: &[Poly]) -> Result<BTreeSet<LexValue>> {
    let mut work: Vec<(Poly, LexValue, Rat)> = Vec::new();
    for s in sections {
        if s.is_zero() {
            continue;
        }
        let (v, c) = valuator.leading(s)?;
        work.push((s.clone(), v, c));
    }
    let mut out = BTreeSet::new();
    while !work.is_empty() {
        let (idx, _) = work
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.cmp(&b.1 .1))
            .unwrap();
        let (pivot, value, lc) = work.remove(idx);
        let mut next = Vec::with_capacity(work.len());
        for (f, v, c) in work {
            if v == value {
                let g = f.sub(&pivot.scale(&(&c / &lc)));
                if g.is_zero() {
                    continue;
                }
                let (v2, c2) = valuator.leading(&g)?;
                debug_assert!(v2 > value);
                next.push((g, v2, c2));
            } else {
                next.push((f, v, c));
            }
        }
        work = next;
        out.insert(value);
    }
    Ok(out)
}

/// Valuation image of the span of surface sections under a surface flag.
pub fn valuation_image(sections: &[PolySection], flag: &SurfaceFlag) -> Result<BTreeSet<LexValue>> {
    for s in sections {
        if s.variety != flag.variety {
            return Err(Error::InvalidFlag("section and flag live on different surfaces".into()));
        }
    }
    let polys: Vec<Poly> = sections.iter().map(|s| s.form.clone()).collect();
    valuation_image_with(&Valuator::Surface(flag.clone()), &polys)
}
