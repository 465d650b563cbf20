//! Seeded randomized property suites. Each iteration draws its inputs from a
//! ChaCha stream keyed by `(seed, iteration)`, so a failure is reproducible
//! from the pair alone.

use std::time::Instant;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::pl::Affine;
use crate::poly::Poly;
use crate::rat::{int, rat, to_f64, QVec, Rat};
use crate::ratgeom::{hausdorff_distance, hull, integer_points, minkowski_sum, mixed_volume, ConvexBody};
use crate::series::{distance_k, gamma_k, intersect_series, sum_series, GradedSeries, PolyRule, SeriesFlag};
use crate::testcurves::{dh_measure, TestFunction};
use crate::toric::{ToricMetric, ToricModel};
use crate::valuations::{valuation_image_with, SurfaceFlag, ToricFlag, Valuator, VarietyKind, CHART_VARS};

pub const SUITES: [&str; 7] = [
    "brunn-minkowski",
    "hausdorff",
    "series-distance",
    "valuation",
    "mixed-volume",
    "test-curves",
    "self-test-violation",
];

const MAX_REPORTED: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub seed: u64,
    pub iterations: u32,
    pub failed_iterations: u32,
    /// The first few failure descriptions, `iteration: message`.
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failed_iterations == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{} seed={} iterations={} failed={} time={:.2}s {}",
            self.name,
            self.seed,
            self.iterations,
            self.failed_iterations,
            self.seconds,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn iteration_rng(seed: u64, it: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(it as u64 + 1);
    rng
}

/// Runs the named suite. `tolerance` is used only by float comparisons.
pub fn run_suite(name: &str, seed: u64, iterations: u32, tolerance: f64) -> Result<SuiteOutcome> {
    let check: fn(&mut ChaCha8Rng, u32, f64) -> Result<Vec<String>> = match name {
        "brunn-minkowski" => brunn_minkowski,
        "hausdorff" => hausdorff,
        "series-distance" => series_distance,
        "valuation" => valuation,
        "mixed-volume" => mixed_volume_props,
        "test-curves" => test_curves,
        "self-test-violation" => self_test_violation,
        _ => return Err(Error::Schema(format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))),
    };
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut failed = 0;
    for it in 0..iterations {
        let mut rng = iteration_rng(seed, it);
        let msgs = check(&mut rng, it, tolerance)?;
        if !msgs.is_empty() {
            failed += 1;
        }
        for m in msgs {
            if failures.len() < MAX_REPORTED {
                failures.push(format!("{it}: {m}"));
            }
        }
    }
    Ok(SuiteOutcome {
        name: name.to_string(),
        seed,
        iterations,
        failed_iterations: failed,
        failures,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn small_rat(rng: &mut ChaCha8Rng, range: i64, den: i64) -> Rat {
    rat(rng.gen_range(-range * den..=range * den), den)
}

/// Full-dimensional hull of `npts` random points with coordinates in
/// `[-range, range]` and denominators dividing `den`.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize, npts: usize, range: i64, den: i64) -> ConvexBody {
    loop {
        let pts: Vec<QVec> = (0..npts.max(n + 1))
            .map(|_| {
                QVec((0..n)
                    .map(|_| {
                        let d = rng.gen_range(1..=den);
                        small_rat(rng, range, d)
                    })
                    .collect())
            })
            .collect();
        let b = hull(&pts).expect("nonempty point set");
        if b.is_full_dimensional() {
            return b;
        }
    }
}

/// Concave PL function: `pieces` random affine functions on a random domain.
pub fn random_test_function(rng: &mut ChaCha8Rng, n: usize, pieces: usize) -> TestFunction {
    let domain = random_polytope(rng, n, n + 3, 2, 2);
    let ps = (0..pieces.max(1))
        .map(|_| {
            Affine::new(
                QVec((0..n).map(|_| small_rat(rng, 2, 2)).collect()),
                small_rat(rng, 3, 1),
            )
        })
        .collect();
    TestFunction::new(domain, ps).expect("pieces match the domain")
}

/// Metric whose exponents are random lattice points of the moment polytope
/// spanning a full-dimensional gradient polytope.
pub fn random_metric(rng: &mut ChaCha8Rng, model: &ToricModel) -> Result<ToricMetric> {
    let p = model.polytope()?;
    let pts = integer_points(&p);
    let n = model.dim();
    for _ in 0..1000 {
        let m = rng.gen_range(n + 1..=(n + 3).min(pts.len()).max(n + 1));
        let chosen: Vec<Vec<i64>> = pts.choose_multiple(rng, m.min(pts.len())).cloned().collect();
        let q = hull(&chosen.iter().map(|e| QVec::from_ints(e)).collect::<Vec<_>>())?;
        if q.is_full_dimensional() {
            return ToricMetric::new(chosen);
        }
    }
    Err(Error::InvalidMetric("no full-dimensional choice of exponents".into()))
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: i64, terms: usize) -> Poly {
    loop {
        let t = (0..terms).map(|_| {
            let i = rng.gen_range(0..=max_deg);
            let j = rng.gen_range(0..=max_deg - i);
            (vec![i, j], int(rng.gen_range(-3..=3)))
        });
        let p = Poly::from_terms(2, t);
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_t(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(1..=7), 8)
}

fn brunn_minkowski(rng: &mut ChaCha8Rng, it: u32, tol: f64) -> Result<Vec<String>> {
    let n = if it % 3 == 2 { 3 } else { 2 };
    let k = random_polytope(rng, n, n + 2, 3, 2);
    let l = random_polytope(rng, n, n + 2, 3, 2);
    let t = random_t(rng);
    let mix = minkowski_sum(&k.scale(&(Rat::one() - &t))?, &l.scale(&t)?)?;
    let root = |x: &Rat| to_f64(x).powf(1.0 / n as f64);
    let (tf, lhs) = (to_f64(&t), root(&mix.volume()));
    let rhs = (1.0 - tf) * root(&k.volume()) + tf * root(&l.volume());
    let mut out = Vec::new();
    if lhs < rhs - tol * rhs.max(1.0) {
        out.push(format!("vol^(1/{n}) of the combination {lhs} < {rhs}"));
    }
    Ok(out)
}

fn hausdorff(rng: &mut ChaCha8Rng, it: u32, tol: f64) -> Result<Vec<String>> {
    let n = if it % 4 == 3 { 3 } else { 2 };
    let b: Vec<ConvexBody> = (0..3).map(|_| random_polytope(rng, n, n + 2, 3, 2)).collect();
    let mut out = Vec::new();
    let d = |x: &ConvexBody, y: &ConvexBody| hausdorff_distance(x, y);
    for x in &b {
        if !d(x, x)?.certified_sq.is_zero() {
            out.push("d(K, K) != 0".into());
        }
    }
    let (ab, ba) = (d(&b[0], &b[1])?, d(&b[1], &b[0])?);
    if ab.certified_sq != ba.certified_sq {
        out.push("asymmetric".into());
    }
    if ab.certified_sq.is_zero() != (b[0] == b[1]) {
        out.push("zero distance between distinct bodies".into());
    }
    let (bc, ac) = (d(&b[1], &b[2])?, d(&b[0], &b[2])?);
    if ac.approx > ab.approx + bc.approx + tol {
        out.push(format!("triangle: {} > {} + {}", ac.approx, ab.approx, bc.approx));
    }
    if n == 2 {
        // translation by a common summand leaves the distance unchanged
        let m = random_polytope(rng, 2, 3, 2, 1);
        let shifted = d(&minkowski_sum(&b[0], &m)?, &minkowski_sum(&b[1], &m)?)?;
        if shifted.certified_sq != ab.certified_sq {
            out.push("d(K + M, L + M) != d(K, L)".into());
        }
    }
    Ok(out)
}

fn random_series(rng: &mut ChaCha8Rng, polynomial: bool) -> Result<GradedSeries> {
    if polynomial {
        let gens = (0..rng.gen_range(1..=3))
            .map(|_| {
                let terms = rng.gen_range(1..=2);
                let t = (0..terms).map(|_| (vec![rng.gen_range(0..=1), rng.gen_range(0..=1)], int(rng.gen_range(1..=2))));
                Poly::from_terms(2, t)
            })
            .filter(|p| !p.is_zero())
            .collect::<Vec<_>>();
        let rule = if gens.is_empty() { PolyRule::Complete } else { PolyRule::Generated(gens) };
        GradedSeries::polynomial(VarietyKind::QuadricP1xP1, vec![1, 1], rule)
    } else {
        let model = ToricModel::line_bundle("p1xp1", &[2, 2])?;
        let metric = random_metric(rng, &model)?;
        GradedSeries::toric(model.with_metric(metric)?, true)
    }
}

fn series_distance(rng: &mut ChaCha8Rng, it: u32, _tol: f64) -> Result<Vec<String>> {
    let polynomial = it % 4 == 3;
    let w: Vec<GradedSeries> = (0..3).map(|_| random_series(rng, polynomial)).collect::<Result<_>>()?;
    let k_max = if polynomial { 2 } else { 3 };
    let mut out = Vec::new();
    let (a, b, c) = (&w[0], &w[1], &w[2]);
    let (ac, bc) = (intersect_series(a, c)?, intersect_series(b, c)?);
    let (sa, sb) = (sum_series(a, c)?, sum_series(b, c)?);
    let flag = SeriesFlag::Toric(ToricFlag::new(vec![0, 1]));
    for k in 1..=k_max {
        let (dab, dbc, dac) = (distance_k(a, b, k)?, distance_k(b, c, k)?, distance_k(a, c, k)?);
        if dac > &dab + &dbc {
            out.push(format!("k={k}: triangle inequality fails"));
        }
        if distance_k(&ac, &bc, k)? > dab {
            out.push(format!("k={k}: intersection is not 1-Lipschitz"));
        }
        if distance_k(&sa, &sb, k)? > dab {
            out.push(format!("k={k}: sum is not 1-Lipschitz"));
        }
        if !polynomial && gamma_k(a, &flag, k)?.len() != a.dim_k(k)? {
            out.push(format!("k={k}: |Gamma_k| != dim W_k"));
        }
    }
    Ok(out)
}

fn valuators() -> Vec<(&'static str, Valuator)> {
    let uv = |s: &str| Poly::parse(s, &CHART_VARS).unwrap();
    vec![
        ("diagonal", Valuator::Surface(SurfaceFlag::p1xp1_diagonal())),
        (
            "conic",
            Valuator::Surface(
                SurfaceFlag::new(VarietyKind::ProjectivePlane, uv("u^2 + v^2 - 2*u"), [int(0), int(0)], 0).unwrap(),
            ),
        ),
        (
            "line",
            Valuator::Surface(SurfaceFlag::new(VarietyKind::ProjectivePlane, uv("u + 2*v - 3"), [int(1), int(1)], 0).unwrap()),
        ),
        (
            "toric",
            Valuator::Toric {
                phi: vec![vec![0, 1], vec![1, 0]],
                shift: vec![0, 0],
            },
        ),
    ]
}

fn valuation(rng: &mut ChaCha8Rng, it: u32, _tol: f64) -> Result<Vec<String>> {
    let vals = valuators();
    let (name, nu) = &vals[it as usize % vals.len()];
    let f = random_poly(rng, 2, 3);
    let g = random_poly(rng, 2, 3);
    let c = int(rng.gen_range(1..=5)) * if rng.gen_bool(0.5) { int(-1) } else { int(1) };
    let mut out = Vec::new();
    let (vf, vg) = (nu.leading(&f)?.0, nu.leading(&g)?.0);
    if nu.leading(&f.mul(&g))?.0 != vf.add(&vg) {
        out.push(format!("{name}: nu(fg) != nu(f) + nu(g) for f = {f}, g = {g}"));
    }
    if nu.leading(&f.scale(&c))?.0 != vf {
        out.push(format!("{name}: nu(cf) != nu(f)"));
    }
    let s = f.add(&g);
    if !s.is_zero() {
        let vs = nu.leading(&s)?.0;
        let m = vf.clone().min(vg.clone());
        if vs < m || (vf != vg && vs != m) {
            out.push(format!("{name}: nu(f + g) violates the ultrametric inequality"));
        }
    }
    // the number of values of a subspace equals its dimension
    let sections: Vec<Poly> = (0..rng.gen_range(1..=5)).map(|_| random_poly(rng, 2, 2)).collect();
    let mut index = std::collections::BTreeMap::new();
    for p in &sections {
        for (e, _) in p.terms() {
            let next = index.len();
            index.entry(e.clone()).or_insert(next);
        }
    }
    let rows: Vec<Vec<Rat>> = sections.iter().map(|p| p.coords(&index)).collect();
    let dim = rank(&rows, index.len());
    let image = valuation_image_with(nu, &sections)?;
    if image.len() != dim {
        out.push(format!("{name}: {} values for a {dim}-dimensional span", image.len()));
    }
    Ok(out)
}

fn mixed_volume_props(rng: &mut ChaCha8Rng, it: u32, _tol: f64) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let n = if it % 5 == 4 { 3 } else { 2 };
    let b: Vec<ConvexBody> = (0..n + 1).map(|_| random_polytope(rng, n, n + 1, 2, 2)).collect();
    let mv = |xs: &[&ConvexBody]| mixed_volume(&xs.iter().map(|&x| x.clone()).collect::<Vec<_>>());
    let t = rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
    if n == 2 {
        let (k, l, m) = (&b[0], &b[1], &b[2]);
        let kl = mv(&[k, l])?;
        if kl != mv(&[l, k])? {
            out.push("not symmetric".into());
        }
        if mv(&[k, k])? != k.volume() {
            out.push("MV(K, K) != vol K".into());
        }
        if mv(&[&k.scale(&t)?, l])? != &t * &kl {
            out.push("not homogeneous".into());
        }
        if mv(&[&minkowski_sum(k, m)?, l])? != &kl + mv(&[m, l])? {
            out.push("not additive".into());
        }
        if minkowski_sum(k, l)?.volume() != k.volume() + int(2) * &kl + l.volume() {
            out.push("vol(K + L) != vol K + 2 MV(K, L) + vol L".into());
        }
    } else {
        let (k, l, m) = (&b[0], &b[1], &b[2]);
        let klm = mv(&[k, l, m])?;
        if klm != mv(&[m, k, l])? || klm != mv(&[l, k, m])? {
            out.push("not symmetric".into());
        }
        if mv(&[k, k, k])? != k.volume() {
            out.push("MV(K, K, K) != vol K".into());
        }
        if mv(&[&k.scale(&t)?, l, m])? != &t * &klm {
            out.push("not homogeneous".into());
        }
    }
    Ok(out)
}

fn test_curves(rng: &mut ChaCha8Rng, it: u32, _tol: f64) -> Result<Vec<String>> {
    let n = [1, 2, 2, 3][it as usize % 4];
    let pieces = rng.gen_range(1..=if n == 3 { 3 } else { 4 });
    let f = random_test_function(rng, n, pieces);
    let mut out = Vec::new();
    if !crate::testcurves::roundtrip_check(&f, rng.gen())? {
        out.push("Legendre roundtrip".into());
    }
    let curve = f.to_curve();
    let e = f.energy()?;
    if curve.energy()? != e {
        out.push("energy of the curve != energy of F".into());
    }
    let dh = dh_measure(&f)?;
    if dh.mass() != f.domain().volume() {
        out.push("DH mass != vol".into());
    }
    if dh.moment(1) * crate::rat::factorial(n) != e {
        out.push("first DH moment != int F".into());
    }
    let (lo, hi) = (f.tau_min(), f.tau_plus().clone());
    let sample = |rng: &mut ChaCha8Rng| &lo + (&hi - &lo) * rat(rng.gen_range(0..=16), 16);
    for _ in 0..3 {
        let (a, b, t) = (sample(rng), sample(rng), random_t(rng));
        let mid = &t * &a + (Rat::one() - &t) * &b;
        let (Some(la), Some(lb), Some(lm)) = (f.level_set(&a)?, f.level_set(&b)?, f.level_set(&mid)?) else {
            out.push("level set below the maximum is empty".into());
            continue;
        };
        for x in la.vertices() {
            for y in lb.vertices() {
                if !lm.contains(&(&x.scaled(&t) + &y.scaled(&(Rat::one() - &t))))? {
                    out.push("level sets are not concave in tau".into());
                }
            }
        }
        if a < hi && b < hi {
            let half = (&a + &b) / int(2);
            let lh = f.level_set(&half)?.expect("nonempty below the maximum");
            if lh.volume() * lh.volume() < la.volume() * lb.volume() {
                out.push("log vol of level sets is not concave".into());
            }
        }
    }
    Ok(out)
}

/// Harness check: asserts the false identity `vol(K + L) = vol K + vol L`.
fn self_test_violation(rng: &mut ChaCha8Rng, _it: u32, _tol: f64) -> Result<Vec<String>> {
    let k = random_polytope(rng, 2, 3, 2, 1);
    let l = random_polytope(rng, 2, 3, 2, 1);
    if minkowski_sum(&k, &l)?.volume() != k.volume() + l.volume() {
        return Ok(vec!["vol(K + L) != vol K + vol L".into()]);
    }
    Ok(vec![])
}
