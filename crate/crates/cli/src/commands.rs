use std::cmp::Ordering;
use std::fmt::Write;

use serde_json::{json, Value};

use okounkov::chebyshev::{chebyshev_report, relvol_riemann, PLConvexWeight};
use okounkov::io::{to_json, BodyJson, MeasureJson};
use okounkov::rat::{factorial, fmt_rat, int, pow, to_f64};
use okounkov::ratgeom::{lattice_points, mixed_volume, ConvexBody};
use okounkov::series::{gamma_k, okounkov_body, series_distance_seq, BodyMode, GradedSeries, SeriesFlag};
use okounkov::suites::run_suite;
use okounkov::svg::{bodies_svg, body_svg, cdf_svg, PALETTE};
use okounkov::testcurves::{bc_convergence_report, dh_measure, uniform_grid};
use okounkov::toric::{intersection_number, ToricModel};
use okounkov::{Error, QVec, Rat, Result};

use crate::config::JobConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug)]
pub struct Artifact {
    pub stem: String,
    pub format: Format,
    pub content: String,
}

#[derive(Debug, Default)]
pub struct RunResult {
    pub artifacts: Vec<Artifact>,
    /// Human-readable lines, printed to stderr.
    pub notes: Vec<String>,
    pub violation: Option<String>,
}

impl RunResult {
    fn push(&mut self, stem: &str, format: Format, content: String) {
        self.artifacts.push(Artifact {
            stem: stem.into(),
            format,
            content,
        });
    }

    fn json(&mut self, stem: &str, value: &Value) {
        self.push(stem, Format::Json, to_json(value));
    }

    pub fn artifact(&self, format: Format) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.format == format)
    }
}

fn exact(r: &Rat) -> Value {
    json!({ "exact": fmt_rat(r), "approx": to_f64(r) })
}

fn single_series(cfg: &JobConfig) -> Result<(GradedSeries, SeriesFlag)> {
    let w = JobConfig::require(&cfg.series, "series")?.to_series()?;
    let flag = JobConfig::require(&cfg.flag, "flag")?.to_flag()?;
    Ok((w, flag))
}

pub fn cmd_body(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("body")?;
    let (w, flag) = single_series(cfg)?;
    let reference = cfg.reference.as_ref().map(BodyJson::to_body).transpose()?;
    let k_max = cfg.k_max();
    let mode: BodyMode = cfg.mode.unwrap_or_default().into();
    let (body, report) = okounkov_body(&w, &flag, k_max, mode, reference)?;
    let n = body.dim();
    let vol = body.volume();
    let levels: Vec<Value> = report
        .records
        .iter()
        .map(|r| {
            json!({
                "k": r.k,
                "dim": r.dim,
                "volume": r.volume.as_ref().map(exact),
                "volume_gap": r.volume_gap.as_ref().map(exact),
            })
        })
        .collect();
    let mut out = RunResult::default();
    out.json(
        "body",
        &json!({
            "body": BodyJson::from_body(&body),
            "volume": exact(&vol),
            "normalized_volume": exact(&(factorial(n) * &vol)),
            "k_max": k_max,
            "stabilized_from": report.stabilized_from,
            "matches_reference": report.matches_reference,
            "levels": levels,
        }),
    );
    out.push("convergence", Format::Csv, report.to_csv());
    if n == 2 {
        let k = int(k_max as i64);
        let points: Vec<QVec> = gamma_k(&w, &flag, k_max)?
            .iter()
            .map(|g| QVec(g.0.iter().map(|&x| int(x) / &k).collect()))
            .collect();
        out.push("body", Format::Svg, body_svg("Okounkov body", &body, &points)?);
    }
    out.notes.push(format!(
        "vertices: {}",
        body.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    ));
    out.notes.push(format!("volume = {} (~{:.6})", fmt_rat(&vol), to_f64(&vol)));
    match report.stabilized_from {
        Some(k0) => out.notes.push(format!("levels stable from k = {k0} through k = {k_max}")),
        None => out.notes.push(format!("levels not yet stable at k = {k_max}")),
    }
    Ok(out)
}

enum Route {
    Explicit,
    Series,
    Moment,
}

fn relation_symbol(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    }
}

pub fn cmd_mixedvol(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("mixedvol")?;
    let models: Option<Vec<ToricModel>> = cfg
        .models
        .as_ref()
        .map(|ms| ms.iter().map(|m| m.to_model()).collect())
        .transpose()?;
    let (bodies, route) = if let Some(bs) = &cfg.bodies {
        (bs.iter().map(BodyJson::to_body).collect::<Result<Vec<_>>>()?, Route::Explicit)
    } else if let Some(list) = &cfg.series_list {
        let flag = JobConfig::require(&cfg.flag, "flag")?.to_flag()?;
        let bodies = list
            .iter()
            .map(|s| okounkov_body(&s.to_series()?, &flag, cfg.k_max(), BodyMode::Stabilized, None).map(|(b, _)| b))
            .collect::<Result<Vec<_>>>()?;
        (bodies, Route::Series)
    } else if let Some(ms) = &models {
        (ms.iter().map(|m| m.polytope()).collect::<Result<Vec<_>>>()?, Route::Moment)
    } else {
        return Err(Error::Schema("mixedvol needs \"bodies\", \"series_list\" or \"models\"".into()));
    };
    let mv = mixed_volume(&bodies)?;
    let n = bodies.len();
    let mut out = RunResult::default();
    let mut fields = json!({ "mixed_volume": exact(&mv) });
    let mut csv = format!("quantity,num,den\nmixed_volume,{},{}\n", mv.numer(), mv.denom());
    out.notes.push(format!("mixed volume = {}", fmt_rat(&mv)));
    if let Some(ms) = &models {
        let ix = intersection_number(ms)?;
        let bound = &ix / factorial(n);
        let rel = mv.cmp(&bound);
        let verdict = match rel {
            Ordering::Less => "strict inequality",
            Ordering::Equal => "equality",
            Ordering::Greater => "bound exceeded",
        };
        let line = format!(
            "MV = {} {} {} = (L1...L{n})/{n}!: {verdict}",
            fmt_rat(&mv),
            relation_symbol(rel),
            fmt_rat(&bound)
        );
        fields["intersection_number"] = exact(&ix);
        fields["bound"] = exact(&bound);
        fields["relation"] = json!(relation_symbol(rel));
        fields["verdict"] = json!(line.clone());
        let _ = writeln!(csv, "intersection_number,{},{}", ix.numer(), ix.denom());
        out.notes.push(format!("intersection number = {}", fmt_rat(&ix)));
        out.notes.push(line.clone());
        let broken = match route {
            Route::Moment => rel != Ordering::Equal,
            Route::Series => rel == Ordering::Greater,
            Route::Explicit => false,
        };
        if broken {
            out.violation = Some(line);
        }
    }
    out.json("mixedvol", &fields);
    out.push("mixedvol", Format::Csv, csv);
    if bodies.iter().all(|b| b.dim() == 2) {
        let pairs: Vec<(&ConvexBody, &str)> = bodies.iter().zip(PALETTE.iter().cycle()).map(|(b, c)| (b, *c)).collect();
        out.push("mixedvol", Format::Svg, bodies_svg("bodies", &pairs, &[])?);
    }
    Ok(out)
}

pub fn cmd_intersection(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("intersection")?;
    let models: Vec<ToricModel> = JobConfig::require(&cfg.models, "models")?
        .iter()
        .map(|m| m.to_model())
        .collect::<Result<_>>()?;
    let ix = intersection_number(&models)?;
    let polys = models.iter().map(|m| m.polytope()).collect::<Result<Vec<_>>>()?;
    let via_mv = factorial(models.len()) * mixed_volume(&polys)?;
    let mut out = RunResult::default();
    out.json(
        "intersection",
        &json!({ "intersection_number": exact(&ix), "n_factorial_mixed_volume": exact(&via_mv), "agree": ix == via_mv }),
    );
    out.push(
        "intersection",
        Format::Csv,
        format!("quantity,num,den\nintersection_number,{},{}\n", ix.numer(), ix.denom()),
    );
    out.notes.push(format!("intersection number = {}", fmt_rat(&ix)));
    if ix != via_mv {
        out.violation = Some(format!("n! MV = {} differs from {}", fmt_rat(&via_mv), fmt_rat(&ix)));
    }
    Ok(out)
}

pub fn cmd_dh(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("dh")?;
    let f = JobConfig::require(&cfg.test_function, "test_function")?.to_test_function()?;
    let dh = dh_measure(&f)?;
    let n = f.dim();
    let (mass, vol) = (dh.mass(), f.domain().volume());
    let (moment, energy) = (dh.moment(1), f.energy()?);
    let mass_ok = mass == vol;
    let moment_ok = factorial(n) * &moment == energy;
    let (lo, hi) = (f.tau_min(), f.tau_plus().clone());
    let steps = cfg.grid_steps.unwrap_or(64);
    let mut csv = String::from("x_num,x_den,cdf_num,cdf_den\n");
    for x in uniform_grid(&lo, &hi, steps) {
        let c = dh.cdf(&x);
        let _ = writeln!(csv, "{},{},{},{}", x.numer(), x.denom(), c.numer(), c.denom());
    }
    let mut out = RunResult::default();
    out.json(
        "dh",
        &json!({
            "measure": MeasureJson::from_measure(&dh),
            "mass": exact(&mass),
            "first_moment": exact(&moment),
            "energy": exact(&energy),
            "mass_equals_volume": mass_ok,
            "moment_matches_energy": moment_ok,
        }),
    );
    out.push("dh", Format::Csv, csv);
    out.push("dh", Format::Svg, cdf_svg("Duistermaat-Heckman measure", &[(&dh, PALETTE[0])], &lo, &hi, 256));
    out.notes.push(format!("mass = {}, energy = {}", fmt_rat(&mass), fmt_rat(&energy)));
    if !mass_ok || !moment_ok {
        out.violation = Some("DH mass or first moment disagrees with the test function".into());
    }
    Ok(out)
}

pub fn cmd_bc(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("bc")?;
    let filt = JobConfig::require(&cfg.filtration, "filtration")?.to_filtration()?;
    let ks = cfg.levels();
    let (lo, hi) = (filt.weight.tau_min(), filt.weight.tau_plus().clone());
    let steps = cfg.grid_steps.unwrap_or(128);
    let report = bc_convergence_report(&filt, &ks, &uniform_grid(&lo, &hi, steps))?;
    let rows: Vec<Value> = report.rows.iter().map(|(k, d)| json!({ "k": k, "distance": exact(d) })).collect();
    let mut out = RunResult::default();
    out.json("bc", &json!({ "rows": rows, "nonincreasing": report.nonincreasing, "grid_steps": steps }));
    out.push("bc", Format::Csv, report.to_csv());
    let dh = dh_measure(&filt.weight)?;
    let shown: Vec<u32> = ks.iter().rev().take(PALETTE.len() - 1).rev().copied().collect();
    let mus = shown.iter().map(|&k| filt.mu_k(k)).collect::<Result<Vec<_>>>()?;
    let mut curves = vec![(&dh, PALETTE[0])];
    curves.extend(mus.iter().zip(&PALETTE[1..]).map(|(m, c)| (m, *c)));
    out.push("bc", Format::Svg, cdf_svg("mu_k against DH", &curves, &lo, &hi, 512));
    for (k, d) in &report.rows {
        out.notes.push(format!("k = {k}: distance {} (~{:.6})", fmt_rat(d), to_f64(d)));
    }
    out.notes.push(format!("nonincreasing: {}", report.nonincreasing));
    Ok(out)
}

/// `Some(c)` when `v2 = v + c` piece by piece.
fn constant_shift(v: &PLConvexWeight, v2: &PLConvexWeight) -> Option<Rat> {
    if v.pieces().len() != v2.pieces().len() {
        return None;
    }
    let mut shift = None;
    for (p, q) in v.pieces().iter().zip(v2.pieces()) {
        if p.a != q.a {
            return None;
        }
        let c = &q.b - &p.b;
        match &shift {
            None => shift = Some(c),
            Some(s) if *s == c => {}
            Some(_) => return None,
        }
    }
    shift
}

pub const CHEBYSHEV_BANNER: &str =
    "convention: c[v] is the Legendre dual, normalized so c[canonical] = 0; squared norms throughout";

pub fn cmd_chebyshev(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("chebyshev")?;
    let model = JobConfig::require(&cfg.model, "model")?.to_model()?;
    let weights = JobConfig::require(&cfg.weights, "weights")?;
    if weights.len() != 2 {
        return Err(Error::Schema(format!("\"weights\" needs 2 entries, got {}", weights.len())));
    }
    let (v, v2) = (weights[0].to_weight()?, weights[1].to_weight()?);
    let ks = cfg.levels();
    let report = chebyshev_report(&model, &v, &v2, &ks)?;
    let mut out = RunResult::default();
    out.notes.push(CHEBYSHEV_BANNER.into());
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|(k, r)| json!({ "k": k, "riemann": exact(r), "gap": exact(&(r - &report.exact)) }))
        .collect();
    let mut fields = json!({
        "exact": exact(&report.exact),
        "rows": rows,
        "measured_c": exact(&report.measured_c),
    });
    if let Some(c) = constant_shift(&v, &v2) {
        let n = model.dim();
        let p = model.polytope()?;
        let mut all = true;
        for &k in &ks {
            let count = int(lattice_points(&p, k).len() as i64);
            let expect = factorial(n) * &c * count / pow(&int(k as i64), n);
            all &= relvol_riemann(&model, &v, &v2, k)? == expect;
        }
        let line = format!(
            "constants case (shift {}): exact equality at every k: {}",
            fmt_rat(&c),
            if all { "yes" } else { "no" }
        );
        fields["constants_case"] = json!({ "shift": fmt_rat(&c), "exact_at_every_k": all });
        out.notes.push(line.clone());
        if !all {
            out.violation = Some(line);
        }
    }
    out.notes.push(report.summary());
    out.json("chebyshev", &fields);
    out.push("chebyshev", Format::Csv, report.to_csv());
    Ok(out)
}

pub fn cmd_series_distance(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("series-distance")?;
    let pair = JobConfig::require(&cfg.pair, "pair")?;
    if pair.len() != 2 {
        return Err(Error::Schema(format!("\"pair\" needs 2 series, got {}", pair.len())));
    }
    let (w, w2) = (pair[0].to_series()?, pair[1].to_series()?);
    let seq = series_distance_seq(&w, &w2, cfg.k_max())?;
    let values: Vec<Value> = seq.values.iter().map(|(k, d)| json!({ "k": k, "distance": exact(d) })).collect();
    let mut out = RunResult::default();
    out.json("series-distance", &json!({ "values": values, "trailing_max": exact(&seq.trailing_max) }));
    out.push("series-distance", Format::Csv, seq.to_csv());
    out.notes.extend(seq.to_string().lines().map(String::from));
    Ok(out)
}

pub fn cmd_proptest(cfg: &JobConfig) -> Result<RunResult> {
    cfg.check_command("proptest")?;
    let name = JobConfig::require(&cfg.suite, "suite")?;
    let r = run_suite(name, cfg.seed.unwrap_or(0), cfg.iterations.unwrap_or(200), cfg.tolerance.unwrap_or(1e-9))?;
    let mut out = RunResult::default();
    out.json(
        "proptest",
        &json!({
            "suite": r.name,
            "seed": r.seed,
            "iterations": r.iterations,
            "failed_iterations": r.failed_iterations,
            "failures": r.failures,
            "passed": r.passed(),
        }),
    );
    out.push(
        "proptest",
        Format::Csv,
        format!(
            "suite,seed,iterations,failed,passed\n{},{},{},{},{}\n",
            r.name,
            r.seed,
            r.iterations,
            r.failed_iterations,
            r.passed()
        ),
    );
    out.notes.push(r.summary());
    if !r.passed() {
        out.violation = Some(format!("suite {} failed {} of {} iterations", r.name, r.failed_iterations, r.iterations));
    }
    Ok(out)
}
