//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single `criterion N: PASS|FAIL ...` line before asserting.

use std::collections::BTreeSet;
use std::time::Instant;

use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use okounkov::chebyshev::{chebyshev_integral_diff, chebyshev_report, relvol_riemann, PLConvexWeight};
use okounkov::pl::Affine;
use okounkov::rat::{factorial, fmt_rat, int, pow, rat, to_f64};
use okounkov::ratgeom::{hull, mixed_volume, ConvexBody};
use okounkov::series::{delta_k, gamma_k, okounkov_body, BodyMode, GradedSeries, PolyRule, SeriesFlag};
use okounkov::suites::{random_metric, run_suite};
use okounkov::testcurves::{bc_convergence_report, cdf_distance, uniform_grid, PPMeasure, TestFunction, ToricFiltration};
use okounkov::toric::{intersection_number, ToricModel};
use okounkov::valuations::{LexValue, SurfaceFlag, ToricFlag, VarietyKind};
use okounkov::{QVec, Rat};

struct Criterion {
    id: u32,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Criterion { id, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, detail: &str) {
        if self.failures.is_empty() {
            println!("criterion {}: PASS {detail}", self.id);
        } else {
            println!("criterion {}: FAIL {detail}; {}", self.id, self.failures.join("; "));
        }
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}

fn body(pts: &[[i64; 2]]) -> ConvexBody {
    hull(&pts.iter().map(|p| QVec::from_ints(p)).collect::<Vec<_>>()).unwrap()
}

fn hirzebruch(a: i64, divisor: &[i64]) -> ToricModel {
    let fan = okounkov::toric::Fan::named(&format!("hirzebruch:{a}")).unwrap();
    ToricModel::new(std::sync::Arc::new(fan), divisor.iter().map(|&x| int(x)).collect(), None).unwrap()
}

/// Lattice points of `{u : <u, v_i> >= -k a_i}` by brute force over a box.
fn lattice_points_by_rays(model: &ToricModel, k: i64) -> Vec<Vec<i64>> {
    let rays = model.fan.rays();
    let b = 4 * k * model.divisor.iter().map(|a| a.abs().numer().clone()).max().unwrap().to_string().parse::<i64>().unwrap()
        + 4;
    let mut out = Vec::new();
    for x in -b..=b {
        for y in -b..=b {
            let ok = rays
                .iter()
                .zip(&model.divisor)
                .all(|(v, a)| int(v[0] * x + v[1] * y) >= -(int(k) * a));
            if ok {
                out.push(vec![x, y]);
            }
        }
    }
    out
}

/// Area of the convex hull of integer points: monotone chain plus shoelace.
fn hull_area(points: &[Vec<i64>]) -> Rat {
    let mut p: Vec<(i64, i64)> = points.iter().map(|v| (v[0], v[1])).collect();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return Rat::zero();
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    let ring: Vec<(i64, i64)> = lower.into_iter().chain(upper).collect();
    let twice: i64 = (0..ring.len())
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    rat(twice.abs(), 2)
}

#[test]
fn criterion_1_example_trapezoid() {
    let start = Instant::now();
    let mut c = Criterion::new(1);
    let trapezoid = body(&[[0, 0], [1, 0], [1, 1], [0, 3]]);
    let flag = SeriesFlag::Surface(SurfaceFlag::p1xp1_diagonal());
    for deg in [[1u32, 2], [2, 1]] {
        let poly = GradedSeries::polynomial(VarietyKind::QuadricP1xP1, deg.to_vec(), PolyRule::Complete).unwrap();
        let toric = GradedSeries::toric(ToricModel::line_bundle("p1xp1", &[deg[0] as i64, deg[1] as i64]).unwrap(), false).unwrap();
        for (route, w) in [("polynomial", &poly), ("toric", &toric)] {
            for k in 1..=6 {
                let d = delta_k(w, &flag, k).unwrap();
                c.check(d.as_ref() == Some(&trapezoid), || format!("O{deg:?} {route} route, k = {k}: {d:?}"));
            }
        }
        let (b, report) = okounkov_body(&poly, &flag, 6, BodyMode::Stabilized, Some(trapezoid.clone())).unwrap();
        c.check(b == trapezoid && report.stabilized_from == Some(1), || format!("O{deg:?} stabilized body"));
    }
    let mv = mixed_volume(&[trapezoid.clone(), trapezoid.clone()]).unwrap();
    let l1 = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
    let l2 = ToricModel::line_bundle("p1xp1", &[2, 1]).unwrap();
    let ix = intersection_number(&[l1, l2]).unwrap();
    c.check(mv == int(2), || format!("mixed volume {}", fmt_rat(&mv)));
    c.check(ix == int(5), || format!("intersection number {}", fmt_rat(&ix)));
    let strict = mv < &ix / factorial(2);
    c.check(strict, || "strict inequality not observed".into());
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < 5.0, || format!("runtime {secs:.2}s"));
    c.finish(&format!(
        "bodies = conv{{(0,0),(1,0),(1,1),(0,3)}} for k <= 6 on both routes; MV = {}, (L1.L2) = {}, {} < {} is {}; {secs:.2}s",
        fmt_rat(&mv),
        fmt_rat(&ix),
        fmt_rat(&mv),
        fmt_rat(&(&ix / factorial(2))),
        strict
    ));
}

#[test]
fn criterion_2_volume_identity() {
    let mut c = Criterion::new(2);
    // (bundle, closed-form self-intersection)
    let cases: Vec<(&str, ToricModel, Rat)> = vec![
        ("P2 O(1)", ToricModel::line_bundle("p2", &[1]).unwrap(), int(1)),
        ("P2 O(3)", ToricModel::line_bundle("p2", &[3]).unwrap(), int(9)),
        ("P1xP1 O(1,2)", ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap(), int(4)),
        ("P1xP1 O(2,3)", ToricModel::line_bundle("p1xp1", &[2, 3]).unwrap(), int(12)),
        // a3 D3 + a4 D4 on F1: a4 (2 a3 + a4)
        ("F1 D3+D4", hirzebruch(1, &[0, 0, 1, 1]), int(3)),
        ("F1 2D3+D4", hirzebruch(1, &[0, 0, 2, 1]), int(5)),
    ];
    for (name, model, expect) in &cases {
        let ix = intersection_number(&[model.clone(), model.clone()]).unwrap();
        c.check(&ix == expect, || format!("{name}: (L^2) = {}", fmt_rat(&ix)));
        for rays in [[0usize, 1], [1, 2]] {
            let flag = SeriesFlag::Toric(ToricFlag::new(rays.to_vec()));
            let w = GradedSeries::toric(model.clone(), false).unwrap();
            let (b, report) = okounkov_body(&w, &flag, 4, BodyMode::Stabilized, None).unwrap();
            let nv = factorial(2) * b.volume();
            c.check(&nv == expect, || format!("{name} {rays:?}: 2! vol = {}", fmt_rat(&nv)));
            c.check(report.stabilized_from == Some(1), || format!("{name} {rays:?}: stabilized from {:?}", report.stabilized_from));
            let (vi, vj) = (&model.fan.rays()[rays[0]], &model.fan.rays()[rays[1]]);
            let (ai, aj) = (&model.divisor[rays[0]], &model.divisor[rays[1]]);
            for k in 1..=4i64 {
                let expect_gamma: BTreeSet<LexValue> = lattice_points_by_rays(model, k)
                    .iter()
                    .map(|u| {
                        let ord = |v: &Vec<i64>, a: &Rat| {
                            let x = int(v[0] * u[0] + v[1] * u[1]) + int(k) * a;
                            x.to_integer().to_string().parse::<i64>().unwrap()
                        };
                        LexValue(vec![ord(vi, ai), ord(vj, aj)])
                    })
                    .collect();
                let got = gamma_k(&w, &flag, k as u32).unwrap();
                c.check(got == expect_gamma, || format!("{name} {rays:?}: Gamma_{k} differs from kP"));
            }
        }
    }
    c.finish(&format!("{} bundles x 2 toric flags: 2! vol = (L^2), stabilized at k = 1, Gamma_k = kP for k <= 4", cases.len()));
}

fn metric_models(seed: u64) -> Vec<(String, ToricModel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = [
        ("P2 O(3)", ToricModel::line_bundle("p2", &[3]).unwrap()),
        ("P1xP1 O(2,2)", ToricModel::line_bundle("p1xp1", &[2, 2]).unwrap()),
        ("F1 2D3+2D4", hirzebruch(1, &[0, 0, 2, 2])),
    ];
    let mut out = Vec::new();
    for (name, m) in bases {
        for i in 0..5 {
            let metric = random_metric(&mut rng, &m).unwrap();
            out.push((format!("{name} #{i}"), m.clone().with_metric(metric).unwrap()));
        }
    }
    out
}

#[test]
fn criterion_3_partial_bodies_two_routes() {
    let mut c = Criterion::new(3);
    let models = metric_models(3);
    for (name, m) in &models {
        let q_area = hull_area(&m.metric.as_ref().unwrap().exponents);
        for rays in [[0usize, 1], [1, 2]] {
            let tf = ToricFlag::new(rays.to_vec());
            let direct = m.partial_okounkov(&tf).unwrap();
            let (semi, report) = m.partial_okounkov_semigroup(&SeriesFlag::Toric(tf), 3).unwrap();
            c.check(direct.vertices() == semi.vertices(), || format!("{name} {rays:?}: routes disagree"));
            c.check(report.matches_reference, || format!("{name} {rays:?}: report does not match"));
            c.check(direct.volume() == q_area, || format!("{name} {rays:?}: vol {} != vol Q {}", fmt_rat(&direct.volume()), fmt_rat(&q_area)));
        }
    }
    c.finish(&format!("{} random metrics on P2, P1xP1, F1 (5 each) x 2 flags: exact vertex equality, vol = vol Q", models.len()));
}

#[test]
fn criterion_4_lelong_and_orders() {
    let mut c = Criterion::new(4);
    let models = metric_models(4);
    let mut worst = Rat::zero();
    for (name, m) in &models {
        for rays in [[0usize, 1], [1, 2]] {
            let b = m.partial_okounkov(&ToricFlag::new(rays.to_vec())).unwrap();
            let min_first = b.vertices().iter().map(|v| v[0].clone()).min().unwrap();
            let lelong = m.lelong_toric(rays[0]).unwrap();
            c.check(lelong == min_first, || format!("{name} ray {}: Lelong {} vs {}", rays[0], fmt_rat(&lelong), fmt_rat(&min_first)));
        }
        for ray in 0..m.fan.rays().len() {
            let lim = m.asymptotic_ord(ray, None).unwrap();
            for k in 1..=6u32 {
                let fin = m.asymptotic_ord(ray, Some(k)).unwrap();
                c.check(fin == lim, || format!("{name} ray {ray}: ord at k = {k} is {}", fmt_rat(&fin)));
            }
        }
    }
    // A non-nef divisor on F2 whose polytope has the vertex (0, -1/2): the
    // order along D_1 is 1/2 in the limit and 1/2 + 1/(2k) at odd k.
    let f2 = hirzebruch(2, &[0, 1, 1, 1]);
    let lim = f2.asymptotic_ord(1, None).unwrap();
    c.check(lim == rat(1, 2), || format!("F2 limit {}", fmt_rat(&lim)));
    for k in 1..=8u32 {
        let fin = f2.asymptotic_ord(1, Some(k)).unwrap();
        let gap = &fin - &lim;
        let expect = if k % 2 == 1 { rat(1, 2 * k as i64) } else { Rat::zero() };
        c.check(gap == expect, || format!("F2 gap at k = {k}: {}", fmt_rat(&gap)));
        c.check(gap <= rat(1, k as i64) && !gap.is_negative(), || format!("F2 gap {} exceeds 1/{k}", fmt_rat(&gap)));
        if gap > worst {
            worst = gap;
        }
    }
    c.finish(&format!(
        "{} metric models: Lelong = min first coordinate, finite-k orders equal the limit; F2 instance gap <= 1/k (max {})",
        models.len(),
        fmt_rat(&worst)
    ));
}

#[test]
fn criterion_5_test_curve_identities() {
    let mut c = Criterion::new(5);
    let r = run_suite("test-curves", 5, 120, 1e-9).unwrap();
    c.check(r.passed(), || r.failures.join(", "));
    c.finish(&format!(
        "{} random PL test functions (n <= 3): roundtrips, energies, DH mass and moment, concavity; {:.1}s",
        r.iterations, r.seconds
    ));
}

#[test]
fn criterion_6_boucksom_chen() {
    let mut c = Criterion::new(6);
    let p1 = ToricModel::line_bundle("p1", &[1]).unwrap();
    let g = TestFunction::new(p1.polytope().unwrap(), vec![Affine::new(QVec::from_ints(&[1]), int(0))]).unwrap();
    let filt = ToricFiltration::new(p1, g).unwrap();
    let lebesgue = PPMeasure::new(
        vec![],
        vec![okounkov::testcurves::DensityPiece {
            lo: int(0),
            hi: int(1),
            density: okounkov::poly::UPoly::new(vec![int(1)]),
        }],
    )
    .unwrap();
    let grid = uniform_grid(&int(0), &int(1), 128);
    let mut worst = Rat::zero();
    for k in 1..=64u32 {
        let d = cdf_distance(&filt.mu_k(k).unwrap(), &lebesgue, &grid);
        let bound = rat(1, k as i64);
        c.check(d <= bound, || format!("k = {k}: distance {}", fmt_rat(&d)));
        let scaled = d * int(k as i64);
        if scaled > worst {
            worst = scaled;
        }
    }

    let model = ToricModel::line_bundle("p1xp1", &[1, 1]).unwrap();
    let g2 = TestFunction::new(
        model.polytope().unwrap(),
        vec![Affine::new(QVec::from_ints(&[-1, 0]), int(1)), Affine::new(QVec::from_ints(&[0, -1]), int(1))],
    )
    .unwrap();
    let filt2 = ToricFiltration::new(model, g2).unwrap();
    let report = bc_convergence_report(&filt2, &[1, 2, 4, 8, 16], &uniform_grid(&int(0), &int(1), 64)).unwrap();
    c.check(report.nonincreasing, || "2-D distances increase".into());
    let trend: Vec<String> = report.rows.iter().map(|(k, d)| format!("{k}:{:.4}", to_f64(d))).collect();
    c.finish(&format!(
        "P1 linear: max k*distance = {} over k <= 64; P1xP1 min(1-x,1-y) distances [{}] nonincreasing",
        fmt_rat(&worst),
        trend.join(", ")
    ));
}

#[test]
fn criterion_7_property_suites() {
    let mut c = Criterion::new(7);
    let mut total = 0.0;
    let mut lines = Vec::new();
    for name in ["brunn-minkowski", "hausdorff", "series-distance", "valuation", "mixed-volume"] {
        let r = run_suite(name, 7, 200, 1e-9).unwrap();
        total += r.seconds;
        c.check(r.passed(), || format!("{name}: {}", r.failures.join(", ")));
        lines.push(format!("{name} {:.1}s", r.seconds));
    }
    c.check(total < 120.0, || format!("suites took {total:.1}s"));
    c.finish(&format!("5 suites x 200 iterations [{}], total {total:.1}s", lines.join(", ")));
}

#[test]
fn criterion_8_chebyshev() {
    let mut c = Criterion::new(8);
    // constant shifts: the log-det ratio is N_k k c exactly, N_k = #(kP ∩ M)
    let cases: Vec<(ToricModel, fn(i64) -> i64)> = vec![
        (ToricModel::line_bundle("p1", &[1]).unwrap(), |k| k + 1),
        (ToricModel::line_bundle("p2", &[1]).unwrap(), |k| (k + 1) * (k + 2) / 2),
        (ToricModel::line_bundle("p1xp1", &[1, 1]).unwrap(), |k| (k + 1) * (k + 1)),
    ];
    for (model, count) in &cases {
        let n = model.dim();
        let p = model.polytope().unwrap();
        let v = PLConvexWeight::support_of(&p);
        for cst in [rat(3, 2), rat(-2, 3)] {
            let v2 = v.shifted(&cst);
            let integral = chebyshev_integral_diff(model, &v, &v2).unwrap();
            c.check(integral == factorial(n) * &cst * p.volume(), || format!("dim {n}: integral {}", fmt_rat(&integral)));
            for k in 1..=16i64 {
                let r = relvol_riemann(model, &v, &v2, k as u32).unwrap();
                let expect = factorial(n) * &cst * int(count(k)) / pow(&int(k), n);
                c.check(r == expect, || format!("dim {n}, k = {k}: {}", fmt_rat(&r)));
            }
        }
    }

    // P1 kink: v* - v'* is the tent 1 - |2a - 1|, exact integral 1/2; the
    // Riemann sum is exact at even k and misses by 1/(2k^2) at odd k
    let model = ToricModel::line_bundle("p1", &[1]).unwrap();
    let v = PLConvexWeight::new(vec![Affine::new(QVec::from_ints(&[0]), int(0)), Affine::new(QVec::from_ints(&[1]), int(0))]).unwrap();
    let v2 = PLConvexWeight::new(vec![
        Affine::new(QVec::from_ints(&[0]), int(0)),
        Affine::new(QVec::from_rats(&[(1, 2)]), int(1)),
        Affine::new(QVec::from_ints(&[1]), int(0)),
    ])
    .unwrap();
    let ks: Vec<u32> = (1..=64).collect();
    let report = chebyshev_report(&model, &v, &v2, &ks).unwrap();
    c.check(report.exact == rat(1, 2), || format!("kink integral {}", fmt_rat(&report.exact)));
    for (k, r) in &report.rows {
        let gap = (r - &report.exact).abs();
        let expect = if k % 2 == 0 { Rat::zero() } else { rat(1, 2 * (*k as i64) * (*k as i64)) };
        c.check(gap == expect, || format!("kink gap at k = {k}: {}", fmt_rat(&gap)));
        c.check(gap <= &report.measured_c / int(*k as i64), || format!("gap above C/k at k = {k}"));
    }
    // sup_k k / (2 k^2) is attained at k = 1
    c.check(report.measured_c == rat(1, 2), || format!("measured C = {}", fmt_rat(&report.measured_c)));
    c.check(report.measured_c < Rat::one(), || "C not bounded".into());
    c.finish(&format!(
        "constant shifts exact for k <= 16 on P1, P2, P1xP1; kinked P1 weight: {} for k <= 64",
        report.summary()
    ));
}
