//! Browser front end. Each operation is a plain function returning a JSON
//! string (`{"ok": true, ...}` or `{"ok": false, "error": ...}`); the
//! `#[wasm_bindgen]` wrappers only forward arguments.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use okounkov::io::{from_json, AffineJson};
use okounkov::pl::Affine;
use okounkov::rat::{factorial, fmt_rat, int, to_f64};
use okounkov::series::{gamma_k, okounkov_body, BodyMode, GradedSeries, PolyRule, SeriesFlag};
use okounkov::svg::{body_svg, cdf_svg, PALETTE};
use okounkov::testcurves::{dh_measure, uniform_grid, cdf_distance, TestFunction, ToricFiltration};
use okounkov::toric::{intersection_number, ToricModel};
use okounkov::valuations::{SurfaceFlag, ToricFlag, VarietyKind};
use okounkov::{Error, QVec, Rat, Result};

/// Largest bidegree and level accepted, to keep the page responsive.
pub const MAX_DEGREE: u32 = 4;
pub const MAX_LEVEL: u32 = 8;

fn finish(r: Result<Value>) -> String {
    match r {
        Ok(mut v) => {
            v["ok"] = json!(true);
            v.to_string()
        }
        Err(e) => json!({ "ok": false, "error": e.to_string() }).to_string(),
    }
}

fn check_range(name: &str, x: u32, lo: u32, hi: u32) -> Result<()> {
    if x < lo || x > hi {
        return Err(Error::Schema(format!("{name} must lie in {lo}..={hi}, got {x}")));
    }
    Ok(())
}

fn vertex_strings(vs: &[QVec]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

/// Okounkov body of `O(a, b)` on `P1 x P1` under the toric flag or the
/// diagonal flag, with the normalized valuation vectors of level `k`.
pub fn body_report(a: u32, b: u32, flag: &str, k: u32) -> String {
    finish((|| {
        check_range("a", a, 0, MAX_DEGREE)?;
        check_range("b", b, 0, MAX_DEGREE)?;
        check_range("k", k, 1, MAX_LEVEL)?;
        let (w, f) = match flag {
            "toric" => (
                GradedSeries::toric(ToricModel::line_bundle("p1xp1", &[a as i64, b as i64])?, false)?,
                SeriesFlag::Toric(ToricFlag::new(vec![0, 1])),
            ),
            "diagonal" => (
                GradedSeries::polynomial(VarietyKind::QuadricP1xP1, vec![a, b], PolyRule::Complete)?,
                SeriesFlag::Surface(SurfaceFlag::p1xp1_diagonal()),
            ),
            other => return Err(Error::Schema(format!("unknown flag {other:?}"))),
        };
        let (body, report) = okounkov_body(&w, &f, k, BodyMode::Stabilized, None)?;
        let kk = int(k as i64);
        let points: Vec<QVec> = gamma_k(&w, &f, k)?
            .iter()
            .map(|g| QVec(g.0.iter().map(|&x| int(x) / &kk).collect()))
            .collect();
        let vol = body.volume();
        let model = ToricModel::line_bundle("p1xp1", &[a as i64, b as i64])?;
        let self_ix = intersection_number(&[model.clone(), model])?;
        Ok(json!({
            "svg": body_svg(&format!("O({a},{b}), {flag} flag"), &body, &points)?,
            "vertices": vertex_strings(body.vertices()),
            "volume": fmt_rat(&vol),
            "normalized_volume": fmt_rat(&(factorial(2) * &vol)),
            "self_intersection": fmt_rat(&self_ix),
            "sections": points.len(),
            "stabilized_from": report.stabilized_from,
        }))
    })())
}

fn parse_pieces(src: &str, dim: usize) -> Result<Vec<Affine>> {
    let pieces: Vec<AffineJson> = from_json(src)?;
    if pieces.is_empty() {
        return Err(Error::Schema("at least one affine piece is needed".into()));
    }
    pieces
        .iter()
        .map(|p| {
            if p.a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.a.len() });
            }
            Ok(p.to_affine())
        })
        .collect()
}

fn unit_square() -> Result<okounkov::ratgeom::ConvexBody> {
    okounkov::ratgeom::ConvexBody::cuboid(&[(int(0), int(1)), (int(0), int(1))])
}

/// DH measure of `min` of the given affine pieces on the unit square.
/// `pieces` is a JSON list of `{"a": [..], "b": ..}`.
pub fn dh_report(pieces: &str) -> String {
    finish((|| {
        let f = TestFunction::new(unit_square()?, parse_pieces(pieces, 2)?)?;
        let dh = dh_measure(&f)?;
        let (lo, hi) = (f.tau_min(), f.tau_plus().clone());
        Ok(json!({
            "svg": cdf_svg("DH measure", &[(&dh, PALETTE[0])], &lo, &hi, 256),
            "mass": fmt_rat(&dh.mass()),
            "energy": fmt_rat(&f.energy()?),
            "range": [fmt_rat(&lo), fmt_rat(&hi)],
            "atoms": dh.atoms().iter().map(|(x, m)| json!({ "at": fmt_rat(x), "mass": fmt_rat(m) })).collect::<Vec<_>>(),
        }))
    })())
}

/// Spectra `mu_k` of the filtration of `O(a, b)` given by the weight
/// pieces, for `k = 1, 2, 4, ..` up to `k_max`, compared with the DH measure.
pub fn convergence_report(a: u32, b: u32, pieces: &str, k_max: u32) -> String {
    finish((|| {
        check_range("a", a, 1, MAX_DEGREE)?;
        check_range("b", b, 1, MAX_DEGREE)?;
        check_range("k_max", k_max, 1, 32)?;
        let model = ToricModel::line_bundle("p1xp1", &[a as i64, b as i64])?;
        let g = TestFunction::new(model.polytope()?, parse_pieces(pieces, 2)?)?;
        let filt = ToricFiltration::new(model, g)?;
        let dh = dh_measure(&filt.weight)?;
        let (lo, hi) = (filt.weight.tau_min(), filt.weight.tau_plus().clone());
        let grid = uniform_grid(&lo, &hi, 64);
        let ks: Vec<u32> = std::iter::successors(Some(1u32), |k| Some(k * 2)).take_while(|&k| k <= k_max).collect();
        let mus = ks.iter().map(|&k| filt.mu_k(k)).collect::<Result<Vec<_>>>()?;
        let rows: Vec<Value> = ks
            .iter()
            .zip(&mus)
            .map(|(k, m)| {
                let d: Rat = cdf_distance(m, &dh, &grid);
                json!({ "k": k, "distance": fmt_rat(&d), "approx": to_f64(&d) })
            })
            .collect();
        let mut curves = vec![(&dh, PALETTE[0])];
        let start = mus.len().saturating_sub(PALETTE.len() - 1);
        curves.extend(mus[start..].iter().zip(&PALETTE[1..]).map(|(m, c)| (m, *c)));
        Ok(json!({
            "svg": cdf_svg("mu_k against DH", &curves, &lo, &hi, 512),
            "rows": rows,
            "ks": ks,
        }))
    })())
}

#[wasm_bindgen]
pub fn okounkov_body_svg(a: u32, b: u32, flag: &str, k: u32) -> String {
    body_report(a, b, flag, k)
}

#[wasm_bindgen]
pub fn dh_measure_plot(pieces: &str) -> String {
    dh_report(pieces)
}

#[wasm_bindgen]
pub fn mu_k_convergence(a: u32, b: u32, pieces: &str, k_max: u32) -> String {
    convergence_report(a, b, pieces, k_max)
}
