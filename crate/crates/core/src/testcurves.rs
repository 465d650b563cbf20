//! Test functions, Okounkov test curves and their Duistermaat–Heckman
//! measures, plus the jumping-number measures of toric filtrations.
//!
//! A test function is a concave piecewise-linear `F = min_j (<a_j, x> + b_j)`
//! on a polytope `Delta`. Its test curve is the family of superlevel bodies
//! `Delta_tau = {F >= tau}`, stored as one parametric H-representation
//! `<n_r, x> + e_r tau <= c_r`; the Legendre transform `G` recovers `F` from
//! the rows alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::pl::{dedup, integrate_min_affine, max_of_min, min_cells, min_eval, Affine};
use crate::poly::UPoly;
use crate::rat::{factorial, int, pow, primitive_direction, ExtRat, QVec, Rat};
use crate::ratgeom::{integer_points, ConvexBody, Halfspace, HalfspaceSystem};
use crate::toric::ToricModel;

/// Concave PL function on a polytope, `-inf` off the polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    domain: ConvexBody,
    pieces: Vec<Affine>,
    tau_plus: Rat,
}

impl TestFunction {
    pub fn new(domain: ConvexBody, pieces: Vec<Affine>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidTestFunction("no affine pieces".into()));
        }
        if let Some(p) = pieces.iter().find(|p| p.a.dim() != domain.dim()) {
            return Err(Error::InvalidTestFunction(format!(
                "piece of dimension {} on a body of dimension {}",
                p.a.dim(),
                domain.dim()
            )));
        }
        let tau_plus = max_of_min(&domain, &pieces)?;
        Ok(TestFunction {
            domain,
            pieces,
            tau_plus,
        })
    }

    pub fn constant(domain: ConvexBody, c: Rat) -> Result<Self> {
        let n = domain.dim();
        TestFunction::new(domain, vec![Affine::new(QVec::zeros(n), c)])
    }

    pub fn domain(&self) -> &ConvexBody {
        &self.domain
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `max_Delta F`.
    pub fn tau_plus(&self) -> &Rat {
        &self.tau_plus
    }

    /// `min_Delta F`, attained at a vertex of `Delta` by concavity.
    pub fn tau_min(&self) -> Rat {
        self.domain
            .vertices()
            .iter()
            .map(|v| min_eval(&self.pieces, v))
            .min()
            .unwrap()
    }

    pub fn eval(&self, x: &QVec) -> Result<ExtRat> {
        if !self.domain.contains(x)? {
            return Ok(ExtRat::NegInf);
        }
        Ok(ExtRat::Finite(self.eval_unchecked(x)))
    }

    /// `F(x)` without the membership test.
    pub fn eval_unchecked(&self, x: &[Rat]) -> Rat {
        min_eval(&self.pieces, x)
    }

    /// `{F >= tau}`.
    pub fn level_set(&self, tau: &Rat) -> Result<Option<ConvexBody>> {
        let rows = self
            .pieces
            .iter()
            .map(|p| Halfspace::new(-&p.a, &p.b - tau))
            .collect();
        self.domain.intersect(&HalfspaceSystem::new(self.dim(), rows)?)
    }

    /// `E(F) = n! int_Delta F`, by integrating over the cells where one
    /// piece is active.
    pub fn energy(&self) -> Result<Rat> {
        Ok(factorial(self.dim()) * integrate_min_affine(&self.domain, &self.pieces)?)
    }

    /// The vertices of the subdivision of `Delta` into linearity cells.
    pub fn subdivision_vertices(&self) -> Result<Vec<QVec>> {
        let pts: BTreeSet<QVec> = min_cells(&self.domain, &self.pieces, true)?
            .into_iter()
            .flat_map(|(c, _)| c.vertices().to_vec())
            .collect();
        Ok(pts.into_iter().collect())
    }

    pub fn to_curve(&self) -> OkounkovTestCurve {
        OkounkovTestCurve::from_test_function(self)
    }
}

pub fn level_set(f: &TestFunction, tau: &Rat) -> Result<Option<ConvexBody>> {
    f.level_set(tau)
}

pub fn energy_f(f: &TestFunction) -> Result<Rat> {
    f.energy()
}

/// Row `<normal, x> + e tau <= c` of a parametric H-representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRow {
    pub normal: QVec,
    pub e: Rat,
    pub c: Rat,
}

impl CurveRow {
    /// Scaled to a primitive integer vector `(normal, e)`.
    fn primitive(normal: QVec, e: Rat, c: Rat) -> CurveRow {
        let mut full: Vec<Rat> = normal.0.clone();
        full.push(e.clone());
        let prim = primitive_direction(&full);
        let (i, _) = full.iter().find_position(|x| !x.is_zero()).expect("nonzero row");
        let factor = Rat::from_integer(prim[i].clone()) / &full[i];
        let n = normal.len();
        CurveRow {
            normal: QVec(prim[..n].iter().map(|x| Rat::from_integer(x.clone())).collect()),
            e: Rat::from_integer(prim[n].clone()),
            c: c * factor,
        }
    }
}

/// Decreasing concave family of bodies `tau -> Delta_tau` for `tau <= tau_plus`,
/// empty above `tau_plus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OkounkovTestCurve {
    dim: usize,
    rows: Vec<CurveRow>,
    tau_plus: Rat,
}

impl OkounkovTestCurve {
    pub fn new(dim: usize, rows: Vec<CurveRow>, tau_plus: Rat) -> Result<Self> {
        if rows.iter().any(|r| r.normal.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rows.iter().map(|r| r.normal.dim()).find(|&d| d != dim).unwrap(),
            });
        }
        if rows.iter().any(|r| r.e.is_negative()) {
            return Err(Error::InvalidTestFunction("curve rows must be monotone in tau".into()));
        }
        Ok(OkounkovTestCurve { dim, rows, tau_plus })
    }

    /// `Delta[F]_tau = Delta ∩ {<a_j, x> + b_j >= tau}`.
    pub fn from_test_function(f: &TestFunction) -> Self {
        let mut rows: Vec<CurveRow> = f
            .domain
            .halfspaces()
            .into_iter()
            .map(|h| CurveRow::primitive(h.normal, Rat::zero(), h.offset))
            .collect();
        for p in dedup(&f.pieces) {
            rows.push(CurveRow::primitive(-&p.a, Rat::one(), p.b.clone()));
        }
        OkounkovTestCurve {
            dim: f.dim(),
            rows,
            tau_plus: f.tau_plus.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    pub fn tau_plus(&self) -> &Rat {
        &self.tau_plus
    }

    fn system_at(&self, tau: &Rat) -> Result<HalfspaceSystem> {
        let rows = self
            .rows
            .iter()
            .map(|r| Halfspace::new(r.normal.clone(), &r.c - &r.e * tau))
            .collect();
        HalfspaceSystem::new(self.dim, rows)
    }

    /// `Delta_tau`; `None` above `tau_plus` or when the system is infeasible.
    pub fn at(&self, tau: &Rat) -> Result<Option<ConvexBody>> {
        if *tau > self.tau_plus {
            return Ok(None);
        }
        self.system_at(tau)?.to_body()
    }

    /// The body `Delta_tau` for `tau` below every threshold.
    pub fn base(&self) -> Result<Option<ConvexBody>> {
        let rows = self
            .rows
            .iter()
            .filter(|r| r.e.is_zero())
            .map(|r| Halfspace::new(r.normal.clone(), r.c.clone()))
            .collect();
        HalfspaceSystem::new(self.dim, rows)?.to_body()
    }

    /// `G(a) = sup {tau < tau_plus : a in Delta_tau}`.
    pub fn legendre_g(&self, a: &QVec) -> ExtRat {
        let mut g = self.tau_plus.clone();
        for r in &self.rows {
            let slack = &r.c - r.normal.dot(a);
            if r.e.is_zero() {
                if slack.is_negative() {
                    return ExtRat::NegInf;
                }
            } else {
                let t = slack / &r.e;
                if t < g {
                    g = t;
                }
            }
        }
        ExtRat::Finite(g)
    }

    /// `G[Delta]` as a test function on the base body.
    pub fn to_test_function(&self) -> Result<TestFunction> {
        let base = self
            .base()?
            .ok_or_else(|| Error::InvalidTestFunction("curve has an empty base".into()))?;
        let mut pieces: Vec<Affine> = self
            .rows
            .iter()
            .filter(|r| r.e.is_positive())
            .map(|r| Affine::new(r.normal.scaled(&(-Rat::one() / &r.e)), &r.c / &r.e))
            .collect();
        pieces.push(Affine::new(QVec::zeros(self.dim), self.tau_plus.clone()));
        TestFunction::new(base, pieces)
    }

    /// Lowest threshold: `Delta_tau` equals the base body for `tau <= tau_min`.
    pub fn tau_min(&self) -> Result<Rat> {
        let base = self
            .base()?
            .ok_or_else(|| Error::InvalidTestFunction("curve has an empty base".into()))?;
        Ok(base
            .vertices()
            .iter()
            .map(|v| self.legendre_g(v).finite().cloned().expect("base vertex"))
            .min()
            .unwrap())
    }

    /// Thresholds where the combinatorics of `Delta_tau` may change: the
    /// `tau`-coordinates of the vertices of `{(x, tau) : x in Delta_tau}`,
    /// clipped to `[tau_min, tau_plus]`.
    pub fn breakpoints(&self) -> Result<Vec<Rat>> {
        let lo = self.tau_min()?;
        let hi = self.tau_plus.clone();
        let n = self.dim;
        let mut ts: BTreeSet<Rat> = [lo.clone(), hi.clone()].into_iter().collect();
        for subset in (0..self.rows.len()).combinations(n + 1) {
            let a: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&i| {
                    let mut r = self.rows[i].normal.0.clone();
                    r.push(self.rows[i].e.clone());
                    r
                })
                .collect();
            let b: Vec<Rat> = subset.iter().map(|&i| self.rows[i].c.clone()).collect();
            let Some(sol) = solve(&a, &b) else { continue };
            let tau = sol[n].clone();
            if tau <= lo || tau >= hi {
                continue;
            }
            let feasible = self
                .rows
                .iter()
                .all(|r| r.normal.dot(&sol[..n]) + &r.e * &tau <= r.c);
            if feasible {
                ts.insert(tau);
            }
        }
        Ok(ts.into_iter().collect())
    }

    /// `tau -> vol Delta_tau` as a polynomial on each breakpoint interval.
    pub fn volume_pieces(&self) -> Result<Vec<(Rat, Rat, UPoly)>> {
        let bps = self.breakpoints()?;
        let n = self.dim;
        let mut out = Vec::new();
        for w in bps.windows(2) {
            let (l, r) = (&w[0], &w[1]);
            let step = (r - l) / int(n as i64 + 2);
            let xs: Vec<Rat> = (1..=n as i64 + 1).map(|j| l + &step * int(j)).collect();
            let ys: Vec<Rat> = xs
                .iter()
                .map(|t| Ok(self.at(t)?.map(|b| b.volume()).unwrap_or_else(Rat::zero)))
                .collect::<Result<_>>()?;
            out.push((l.clone(), r.clone(), UPoly::interpolate(&xs, &ys)));
        }
        Ok(out)
    }

    /// `E(Delta) = V tau_min + n! int_{tau_min}^{tau_plus} vol Delta_tau`,
    /// with `V = n! vol Delta`.
    pub fn energy(&self) -> Result<Rat> {
        let nf = factorial(self.dim);
        let base = self.base()?.map(|b| b.volume()).unwrap_or_else(Rat::zero);
        let mut total = &nf * base * self.tau_min()?;
        for (l, r, p) in self.volume_pieces()? {
            total += &nf * p.integral(&l, &r);
        }
        Ok(total)
    }
}

pub fn legendre_g(curve: &OkounkovTestCurve, a: &QVec) -> ExtRat {
    curve.legendre_g(a)
}

pub fn energy_curve(curve: &OkounkovTestCurve) -> Result<Rat> {
    curve.energy()
}

fn random_point(body: &ConvexBody, rng: &mut ChaCha8Rng) -> QVec {
    let ws: Vec<i64> = body.vertices().iter().map(|_| rng.gen_range(0..=16)).collect();
    let total: i64 = ws.iter().sum::<i64>().max(1);
    let mut p = QVec::zeros(body.dim());
    for (v, w) in body.vertices().iter().zip(&ws) {
        p = &p + &v.scaled(&int(*w));
    }
    if ws.iter().all(|&w| w == 0) {
        return body.vertices()[0].clone();
    }
    p.scaled(&(Rat::one() / int(total)))
}

/// Checks `G[Delta[F]] = F` and `Delta[G[Delta[F]]] = Delta[F]` exactly at
/// the subdivision vertices, 100 random points and 20 thresholds.
pub fn roundtrip_check(f: &TestFunction, seed: u64) -> Result<bool> {
    let curve = f.to_curve();
    let g = curve.to_test_function()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = f.subdivision_vertices()?;
    pts.extend((0..100).map(|_| random_point(f.domain(), &mut rng)));
    for p in &pts {
        let want = f.eval(p)?;
        if curve.legendre_g(p) != want || g.eval(p)? != want {
            return Ok(false);
        }
    }
    // points off the domain map to -inf
    let far = QVec(f.domain().vertices()[0].iter().map(|x| x + int(1000)).collect());
    if curve.legendre_g(&far) != ExtRat::NegInf {
        return Ok(false);
    }
    let (lo, hi) = (f.tau_min() - int(1), f.tau_plus() + int(1));
    let regen = g.to_curve();
    for j in 0..20 {
        let tau = &lo + (&hi - &lo) * Rat::new(j.into(), 19.into());
        let a = f.level_set(&tau)?;
        if tau > *f.tau_plus() {
            if a.is_some() || curve.at(&tau)?.is_some() {
                return Ok(false);
            }
            continue;
        }
        if curve.at(&tau)? != a || regen.at(&tau)? != a || g.level_set(&tau)? != a {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Polynomial density on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityPiece {
    pub lo: Rat,
    pub hi: Rat,
    pub density: UPoly,
}

/// Finite measure on the line: atoms plus piecewise-polynomial density.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PPMeasure {
    atoms: Vec<(Rat, Rat)>,
    pieces: Vec<DensityPiece>,
}

impl PPMeasure {
    pub fn new(atoms: Vec<(Rat, Rat)>, pieces: Vec<DensityPiece>) -> Result<Self> {
        let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (x, m) in atoms {
            if m.is_negative() {
                return Err(Error::InvalidMeasure(format!("negative atom at {x}")));
            }
            if !m.is_zero() {
                *merged.entry(x).or_insert_with(Rat::zero) += m;
            }
        }
        for p in &pieces {
            if p.hi < p.lo {
                return Err(Error::InvalidMeasure("interval with hi < lo".into()));
            }
            let mut probes = vec![p.lo.clone(), p.hi.clone(), (&p.lo + &p.hi) / int(2)];
            let d = p.density.derivative();
            if d.degree() == Some(1) {
                let root = -&d.0[0] / &d.0[1];
                if root > p.lo && root < p.hi {
                    probes.push(root);
                }
            }
            if probes.iter().any(|x| p.density.eval(x).is_negative()) {
                return Err(Error::InvalidMeasure("negative density".into()));
            }
        }
        Ok(PPMeasure {
            atoms: merged.into_iter().collect(),
            pieces,
        })
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn mass(&self) -> Rat {
        self.moment(0)
    }

    /// `int x^p dmu`.
    pub fn moment(&self, p: u32) -> Rat {
        let mut total = Rat::zero();
        for (x, m) in &self.atoms {
            total += pow(x, p as usize) * m;
        }
        for piece in &self.pieces {
            let mut f = piece.density.clone();
            for _ in 0..p {
                f = f.shift();
            }
            total += f.integral(&piece.lo, &piece.hi);
        }
        total
    }

    /// `mu((-inf, x])`.
    pub fn cdf(&self, x: &Rat) -> Rat {
        let mut total: Rat = self
            .atoms
            .iter()
            .filter(|(a, _)| a <= x)
            .map(|(_, m)| m.clone())
            .fold(Rat::zero(), |a, b| a + b);
        for p in &self.pieces {
            if *x > p.lo {
                let top = if *x < p.hi { x } else { &p.hi };
                total += p.density.integral(&p.lo, top);
            }
        }
        total
    }
}

/// `max_{x in grid} |mu(-inf, x] - nu(-inf, x]|`.
pub fn cdf_distance(mu: &PPMeasure, nu: &PPMeasure, grid: &[Rat]) -> Rat {
    grid.iter()
        .map(|x| (mu.cdf(x) - nu.cdf(x)).abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// `lo + j (hi - lo) / steps` for `j = 0..=steps`.
pub fn uniform_grid(lo: &Rat, hi: &Rat, steps: u32) -> Vec<Rat> {
    (0..=steps)
        .map(|j| lo + (hi - lo) * Rat::new(j.into(), steps.max(1).into()))
        .collect()
}

/// `F_*(d lambda|_Delta)`: density `-h'` for the tail `h(tau) = vol{F >= tau}`,
/// and an atom `vol{F = tau_plus}` at `tau_plus`.
pub fn dh_measure(f: &TestFunction) -> Result<PPMeasure> {
    let curve = f.to_curve();
    let pieces = curve
        .volume_pieces()?
        .into_iter()
        .map(|(lo, hi, h)| DensityPiece {
            lo,
            hi,
            density: h.derivative().scale(&-Rat::one()),
        })
        .collect();
    let top = f.level_set(f.tau_plus())?.map(|b| b.volume()).unwrap_or_else(Rat::zero);
    PPMeasure::new(vec![(f.tau_plus().clone(), top)], pieces)
}

/// Filtration of the section ring by a concave PL weight on the polytope:
/// `z^alpha` in degree `k` has jumping number `g(alpha / k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricFiltration {
    pub model: ToricModel,
    pub weight: TestFunction,
}

impl ToricFiltration {
    pub fn new(model: ToricModel, weight: TestFunction) -> Result<Self> {
        if !model.is_integral() {
            return Err(Error::NonIntegralDivisor);
        }
        if model.polytope()? != *weight.domain() {
            return Err(Error::InvalidWeight("weight must be defined on the polytope of the divisor".into()));
        }
        Ok(ToricFiltration { model, weight })
    }

    /// Jumping numbers in degree `k`, in decreasing order.
    pub fn jumping_numbers(&self, k: u32) -> Result<Vec<Rat>> {
        let kk = int(k as i64);
        let inv = Rat::one() / &kk;
        let pts = integer_points(&self.weight.domain().scale(&kk)?);
        let mut out: Vec<Rat> = pts
            .iter()
            .map(|a| self.weight.eval_unchecked(&QVec::from_ints(a).scaled(&inv)))
            .collect();
        out.sort_by(|a, b| b.cmp(a));
        Ok(out)
    }

    /// `mu_k = k^{-n} sum_j delta_{e_j}`.
    pub fn mu_k(&self, k: u32) -> Result<PPMeasure> {
        let w = Rat::one() / pow(&int(k as i64), self.weight.dim());
        PPMeasure::new(
            self.jumping_numbers(k)?.into_iter().map(|e| (e, w.clone())).collect(),
            Vec::new(),
        )
    }
}

pub fn jumping_numbers(filt: &ToricFiltration, k: u32) -> Result<Vec<Rat>> {
    filt.jumping_numbers(k)
}

pub fn mu_k(filt: &ToricFiltration, k: u32) -> Result<PPMeasure> {
    filt.mu_k(k)
}

/// Distances `cdf_distance(mu_k, DH(g))` over the requested levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcReport {
    pub rows: Vec<(u32, Rat)>,
    /// Whether the reported distances never increase along the levels.
    pub nonincreasing: bool,
}

impl BcReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,distance_num,distance_den\n");
        for (k, d) in &self.rows {
            let _ = writeln!(out, "{},{},{}", k, d.numer(), d.denom());
        }
        out
    }
}

pub fn bc_convergence_report(filt: &ToricFiltration, ks: &[u32], grid: &[Rat]) -> Result<BcReport> {
    let dh = dh_measure(&filt.weight)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        rows.push((k, cdf_distance(&filt.mu_k(k)?, &dh, grid)));
    }
    let nonincreasing = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(BcReport { rows, nonincreasing })
}
