//! Toric Chebyshev transforms. A convex PL weight `v = max_j (<c_j, x> + d_j)`
//! has Legendre dual `v*(a) = sup_x (<a, x> - v(x))`, finite exactly on
//! `conv(c_j)`; in the toric dictionary the normalized sup-norm of `z^{ka}`
//! at level `k` is `k v*(a)`, and `c[v] = v*`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rref, solve};
use crate::pl::{dedup, integrate_max_affine, max_eval, Affine};
use crate::rat::{factorial, fmt_rat, int, pow, to_f64, ExtRat, QVec, Rat};
use crate::ratgeom::{hull, integer_points, ConvexBody};
use crate::toric::ToricModel;

/// Convex PL weight `max_j (<c_j, x> + d_j)` on `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLConvexWeight {
    pieces: Vec<Affine>,
}

impl PLConvexWeight {
    pub fn new(pieces: Vec<Affine>) -> Result<Self> {
        let n = pieces
            .first()
            .map(|p| p.a.dim())
            .ok_or_else(|| Error::InvalidWeight("no pieces".into()))?;
        if pieces.iter().any(|p| p.a.dim() != n) {
            return Err(Error::InvalidWeight("pieces of mixed dimension".into()));
        }
        Ok(PLConvexWeight { pieces: dedup(&pieces) })
    }

    /// `h_P(x) = max_{p vertex of P} <p, x>`, the weight of the canonical metric.
    pub fn support_of(body: &ConvexBody) -> Self {
        PLConvexWeight {
            pieces: dedup(
                &body
                    .vertices()
                    .iter()
                    .map(|p| Affine::new(p.clone(), Rat::zero()))
                    .collect::<Vec<_>>(),
            ),
        }
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].a.dim()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        max_eval(&self.pieces, x)
    }

    /// `v + c`.
    pub fn shifted(&self, c: &Rat) -> Self {
        PLConvexWeight {
            pieces: self.pieces.iter().map(|p| Affine::new(p.a.clone(), &p.b + c)).collect(),
        }
    }

    /// `conv(c_j)`, the closure of the gradient image.
    pub fn gradient_body(&self) -> ConvexBody {
        hull(&self.pieces.iter().map(|p| p.a.clone()).collect::<Vec<_>>()).expect("nonempty pieces")
    }

    /// `v*(a)`: the minimum of `-sum lambda_j d_j` over convex combinations
    /// `sum lambda_j c_j = a`, found among affinely independent supports
    /// (Carathéodory).
    pub fn legendre_dual(&self, a: &QVec) -> ExtRat {
        let n = self.dim();
        let mut best: Option<Rat> = None;
        for size in 1..=(n + 1).min(self.pieces.len()) {
            for subset in (0..self.pieces.len()).combinations(size) {
                let pts: Vec<&QVec> = subset.iter().map(|&i| &self.pieces[i].a).collect();
                let Some(lambda) = barycentric(&pts, a) else { continue };
                if lambda.iter().any(Signed::is_negative) {
                    continue;
                }
                let val = subset
                    .iter()
                    .zip(&lambda)
                    .map(|(&i, l)| -(l * &self.pieces[i].b))
                    .fold(Rat::zero(), |x, y| x + y);
                if best.as_ref().map_or(true, |b| val < *b) {
                    best = Some(val);
                }
            }
        }
        best.map_or(ExtRat::PosInf, ExtRat::Finite)
    }

    /// Affine pieces of `v*` on the gradient body: interpolants through
    /// `n + 1` lifted points `(c_j, -d_j)` lying below all the others.
    pub fn dual_pieces(&self) -> Vec<Affine> {
        let n = self.dim();
        let lifted = |j: usize| -> Rat { -&self.pieces[j].b };
        let mut out = Vec::new();
        for subset in (0..self.pieces.len()).combinations(n + 1) {
            let a: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&j| {
                    let mut r = self.pieces[j].a.0.clone();
                    r.push(Rat::one());
                    r
                })
                .collect();
            let rhs: Vec<Rat> = subset.iter().map(|&j| lifted(j)).collect();
            let Some(sol) = solve(&a, &rhs) else { continue };
            let l = Affine::new(QVec(sol[..n].to_vec()), sol[n].clone());
            if (0..self.pieces.len()).all(|i| l.eval(&self.pieces[i].a) <= lifted(i)) {
                out.push(l);
            }
        }
        dedup(&out)
    }
}

/// Barycentric coordinates of `a` with respect to affinely independent points,
/// or `None` when `a` is off their affine hull or the points are dependent.
fn barycentric(pts: &[&QVec], a: &QVec) -> Option<Vec<Rat>> {
    let s = pts.len();
    let n = a.dim();
    // rows: coordinate equations plus sum lambda = 1; last column the target
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rat> = pts.iter().map(|p| p[i].clone()).collect();
            r.push(a[i].clone());
            r
        })
        .collect();
    let mut ones = vec![Rat::one(); s];
    ones.push(Rat::one());
    rows.push(ones);
    let (red, pivots) = rref(&rows, s + 1);
    if pivots.contains(&s) || pivots.len() != s {
        return None;
    }
    Some((0..s).map(|i| red[i][s].clone()).collect())
}

pub fn legendre_dual(v: &PLConvexWeight, a: &QVec) -> ExtRat {
    v.legendre_dual(a)
}

/// Integration domain for a model: `Q_{D,phi}` with a metric, else `P_D`.
fn domain(model: &ToricModel) -> Result<ConvexBody> {
    if model.metric.is_some() {
        model.metric_polytope()
    } else {
        model.polytope()
    }
}

/// `gradient_body(v) ⊆ P_D` (boundedness of `v - h_P`) and the integration
/// domain inside `gradient_body(v)` (finiteness of `v*` there).
fn check_pair(model: &ToricModel, v: &PLConvexWeight) -> Result<ConvexBody> {
    if v.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: v.dim(),
        });
    }
    let p = model.polytope()?;
    let g = v.gradient_body();
    if !g.is_subset_of(&p)? {
        return Err(Error::InvalidWeight("gradient body leaves P_D".into()));
    }
    let d = domain(model)?;
    if !d.is_subset_of(&g)? {
        return Err(Error::InvalidWeight("gradient body does not cover the partial body".into()));
    }
    Ok(d)
}

/// `F[v](ka, k) = k v*(a)` for `a` in `P_D`.
pub fn toric_f_v(model: &ToricModel, v: &PLConvexWeight, a: &QVec, k: u32) -> Result<Rat> {
    if !model.polytope()?.contains(a)? {
        return Err(Error::OutOfPolytope);
    }
    match v.legendre_dual(a) {
        ExtRat::Finite(x) => Ok(int(k as i64) * x),
        _ => Err(Error::InvalidWeight(format!("v* is infinite at {a}"))),
    }
}

/// Values `F(alpha, k)` recorded on lattice points of a cone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubadditiveTable {
    entries: BTreeMap<(Vec<i64>, u32), Rat>,
}

impl SubadditiveTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alpha: Vec<i64>, k: u32, value: Rat) {
        self.entries.insert((alpha, k), value);
    }

    pub fn get(&self, alpha: &[i64], k: u32) -> Option<&Rat> {
        self.entries.get(&(alpha.to_vec(), k))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `F[v](alpha, k) = k v*(alpha / k)` for all `alpha` in `kD ∩ M`, `k <= k_max`.
    pub fn from_toric(model: &ToricModel, v: &PLConvexWeight, k_max: u32) -> Result<Self> {
        let d = check_pair(model, v)?;
        let mut t = SubadditiveTable::new();
        for k in 1..=k_max {
            let kk = int(k as i64);
            let inv = Rat::one() / &kk;
            for alpha in integer_points(&d.scale(&kk)?) {
                let a = QVec::from_ints(&alpha).scaled(&inv);
                let val = v.legendre_dual(&a).finite().cloned().expect("domain inside gradient body");
                t.insert(alpha, k, &kk * val);
            }
        }
        Ok(t)
    }

    /// Recorded triples with `F(x + y) > F(x) + F(y)`.
    pub fn violations(&self) -> Vec<((Vec<i64>, u32), (Vec<i64>, u32))> {
        let keys: Vec<&(Vec<i64>, u32)> = self.entries.keys().collect();
        let mut out = Vec::new();
        for (i, x) in keys.iter().enumerate() {
            for y in &keys[i..] {
                let sum: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
                if let Some(fs) = self.get(&sum, x.1 + y.1) {
                    if *fs > &self.entries[*x] + &self.entries[*y] {
                        out.push(((*x).clone(), (*y).clone()));
                    }
                }
            }
        }
        out
    }
}

/// `F(ka, k) / k` along the doubling chain `k = 1, 2, 4, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevLimit {
    pub sequence: Vec<(u32, Rat)>,
    pub running_inf: Vec<Rat>,
    pub estimate: Rat,
    /// `F(2ka, 2k) <= 2 F(ka, k)` at every step of the chain.
    pub fekete_ok: bool,
}

pub fn chebyshev_limit(table: &SubadditiveTable, a: &[i64], k_max: u32) -> Result<ChebyshevLimit> {
    let mut sequence = Vec::new();
    let mut k = 1u32;
    while k <= k_max {
        let alpha: Vec<i64> = a.iter().map(|x| x * k as i64).collect();
        let f = table
            .get(&alpha, k)
            .ok_or_else(|| Error::IncompleteTable(format!("({alpha:?}, {k})")))?;
        sequence.push((k, f / int(k as i64)));
        k *= 2;
    }
    if sequence.is_empty() {
        return Err(Error::IncompleteTable("k_max < 1".into()));
    }
    let mut running_inf = Vec::with_capacity(sequence.len());
    for (_, x) in &sequence {
        let next = match running_inf.last() {
            Some(m) if m < x => Rat::clone(m),
            _ => x.clone(),
        };
        running_inf.push(next);
    }
    // F(2ka, 2k) / 2k <= F(ka, k) / k
    let fekete_ok = sequence.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(ChebyshevLimit {
        estimate: running_inf.last().unwrap().clone(),
        sequence,
        running_inf,
        fekete_ok,
    })
}

/// `n! int_D (v* - v'*)` over the partial body `D`.
pub fn chebyshev_integral_diff(model: &ToricModel, v: &PLConvexWeight, v2: &PLConvexWeight) -> Result<Rat> {
    let d = check_pair(model, v)?;
    check_pair(model, v2)?;
    let n = model.dim();
    if !d.is_full_dimensional() {
        return Ok(Rat::zero());
    }
    let (p1, p2) = (v.dual_pieces(), v2.dual_pieces());
    if p1.is_empty() || p2.is_empty() {
        return Err(Error::InvalidWeight("gradient body is not full-dimensional".into()));
    }
    Ok(factorial(n) * (integrate_max_affine(&d, &p1)? - integrate_max_affine(&d, &p2)?))
}

/// `(n! / k^{n+1}) sum_{alpha in kD ∩ M} k (v*(alpha/k) - v'*(alpha/k))`; the
/// determinant of sup-norms on the monomial basis factors into monomial norms.
pub fn relvol_riemann(model: &ToricModel, v: &PLConvexWeight, v2: &PLConvexWeight, k: u32) -> Result<Rat> {
    let d = check_pair(model, v)?;
    check_pair(model, v2)?;
    let n = model.dim();
    let kk = int(k as i64);
    let inv = Rat::one() / &kk;
    let pts = integer_points(&d.scale(&kk)?);
    let mut total = Rat::zero();
    for alpha in pts {
        let a = QVec::from_ints(&alpha).scaled(&inv);
        let (x, y) = (v.legendre_dual(&a), v2.legendre_dual(&a));
        total += x.finite().expect("checked") - y.finite().expect("checked");
    }
    Ok(factorial(n) * total / pow(&kk, n))
}

/// Riemann sums against the exact integral over a list of levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevReport {
    pub exact: Rat,
    pub rows: Vec<(u32, Rat)>,
    /// `max_k k |riemann(k) - exact|`.
    pub measured_c: Rat,
}

impl ChebyshevReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,riemann_num,riemann_den,exact_num,exact_den,gap\n");
        for (k, r) in &self.rows {
            let gap = to_f64(&(r - &self.exact)).abs();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.12}",
                k,
                r.numer(),
                r.denom(),
                self.exact.numer(),
                self.exact.denom(),
                gap
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "exact = {}, measured C = {} (~{:.6})",
            fmt_rat(&self.exact),
            fmt_rat(&self.measured_c),
            to_f64(&self.measured_c)
        )
    }
}

pub fn chebyshev_report(model: &ToricModel, v: &PLConvexWeight, v2: &PLConvexWeight, ks: &[u32]) -> Result<ChebyshevReport> {
    let exact = chebyshev_integral_diff(model, v, v2)?;
    let rows: Vec<(u32, Rat)> = ks
        .iter()
        .map(|&k| relvol_riemann(model, v, v2, k).map(|r| (k, r)))
        .try_collect()?;
    let measured_c = rows
        .iter()
        .map(|(k, r)| int(*k as i64) * (r - &exact).abs())
        .max()
        .unwrap_or_else(Rat::zero);
    Ok(ChebyshevReport {
        exact,
        rows,
        measured_c,
    })
}
