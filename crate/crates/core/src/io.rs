//! JSON wire formats. Each `*Json` type mirrors one file schema and converts
//! to and from the in-memory object; rationals never pass through floats.

use std::sync::Arc;

use num::Signed;
use serde::de::{self, DeserializeOwned};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chebyshev::PLConvexWeight;
use crate::error::{Error, Result};
use crate::pl::Affine;
use crate::poly::{Poly, UPoly};
use crate::rat::{fmt_rat, parse_rat, QVec, Rat};
use crate::ratgeom::{hull, ConvexBody};
use crate::series::{GradedSeries, PolyRule, SeriesFlag};
use crate::testcurves::{DensityPiece, PPMeasure, TestFunction, ToricFiltration};
use crate::toric::{Fan, ToricMetric, ToricModel};
use crate::valuations::{SurfaceFlag, ToricFlag, VarietyKind, CHART_VARS};

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("wire types serialize");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(src: &str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| Error::Schema(e.to_string()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatWire {
    Text(String),
    Int(i64),
    PairText([String; 2]),
    PairInt([i64; 2]),
}

impl RatWire {
    fn into_rat(self) -> std::result::Result<Rat, String> {
        let r = match self {
            RatWire::Text(s) => parse_rat(&s),
            RatWire::Int(n) => Ok(crate::rat::int(n)),
            RatWire::PairText([n, d]) => parse_rat(&format!("{n}/{d}")),
            RatWire::PairInt([n, d]) => parse_rat(&format!("{n}/{d}")),
        };
        r.map_err(|e| e.to_string())
    }
}

fn de_rat<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
    RatWire::deserialize(d)?.into_rat().map_err(de::Error::custom)
}

/// Rational written as `"p/q"` (or `"p"`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatStr(pub Rat);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        de_rat(d).map(RatStr)
    }
}

/// Rational written as `["num", "den"]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPair(pub Rat);

impl Serialize for RatPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.numer().to_string(), self.0.denom().to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        de_rat(d).map(RatPair)
    }
}

fn strs(v: &[Rat]) -> Vec<RatStr> {
    v.iter().cloned().map(RatStr).collect()
}

fn unstrs(v: &[RatStr]) -> Vec<Rat> {
    v.iter().map(|r| r.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyJson {
    pub dim: usize,
    pub vertices: Vec<Vec<RatPair>>,
}

impl BodyJson {
    pub fn from_body(b: &ConvexBody) -> Self {
        BodyJson {
            dim: b.dim(),
            vertices: b
                .vertices()
                .iter()
                .map(|v| v.iter().cloned().map(RatPair).collect())
                .collect(),
        }
    }

    pub fn to_body(&self) -> Result<ConvexBody> {
        let pts = self
            .vertices
            .iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(Error::Schema(format!("vertex of length {} in a {}-dimensional body", v.len(), self.dim)));
                }
                Ok(QVec(v.iter().map(|r| r.0.clone()).collect()))
            })
            .collect::<Result<Vec<_>>>()?;
        hull(&pts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanJson {
    Named(String),
    Explicit { rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>> },
}

impl FanJson {
    pub fn to_fan(&self) -> Result<Fan> {
        match self {
            FanJson::Named(n) => Fan::named(n),
            FanJson::Explicit { rays, max_cones } => Fan::new(rays.clone(), max_cones.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricJson {
    pub exponents: Vec<Vec<i64>>,
}

impl MetricJson {
    pub fn to_metric(&self) -> Result<ToricMetric> {
        ToricMetric::new(self.exponents.clone())
    }
}

/// A toric model: a fan plus either an explicit divisor or, for named fans,
/// the degrees of a line bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub fan: FanJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<Vec<RatStr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricJson>,
}

impl ModelJson {
    pub fn from_model(m: &ToricModel) -> Self {
        ModelJson {
            fan: FanJson::Explicit {
                rays: m.fan.rays().to_vec(),
                max_cones: m.fan.max_cones().to_vec(),
            },
            divisor: Some(strs(&m.divisor)),
            degrees: None,
            metric: m.metric.as_ref().map(|x| MetricJson {
                exponents: x.exponents.clone(),
            }),
        }
    }

    pub fn to_model(&self) -> Result<ToricModel> {
        let model = match (&self.divisor, &self.degrees, &self.fan) {
            (Some(d), None, f) => ToricModel::new(Arc::new(f.to_fan()?), unstrs(d), None)?,
            (None, Some(deg), FanJson::Named(name)) => ToricModel::line_bundle(name, deg)?,
            (None, Some(_), _) => return Err(Error::Schema("\"degrees\" needs a named fan".into())),
            _ => return Err(Error::Schema("model needs exactly one of \"divisor\" and \"degrees\"".into())),
        };
        match &self.metric {
            Some(m) => model.with_metric(m.to_metric()?),
            None => Ok(model),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FlagJson {
    Toric {
        rays: Vec<usize>,
    },
    Surface {
        variety: String,
        curve: String,
        point: [RatPair; 2],
        chart: u8,
    },
}

impl FlagJson {
    pub fn from_flag(f: &SeriesFlag) -> Self {
        match f {
            SeriesFlag::Toric(t) => FlagJson::Toric { rays: t.rays.clone() },
            SeriesFlag::Surface(s) => FlagJson::Surface {
                variety: s.variety.name().into(),
                curve: s.curve.display_with(&CHART_VARS),
                point: [RatPair(s.point[0].clone()), RatPair(s.point[1].clone())],
                chart: s.chart,
            },
        }
    }

    pub fn to_flag(&self) -> Result<SeriesFlag> {
        Ok(match self {
            FlagJson::Toric { rays } => SeriesFlag::Toric(ToricFlag::new(rays.clone())),
            FlagJson::Surface {
                variety,
                curve,
                point,
                chart,
            } => SeriesFlag::Surface(SurfaceFlag::new(
                VarietyKind::from_name(variety)?,
                Poly::parse(curve, &CHART_VARS)?,
                [point[0].0.clone(), point[1].0.clone()],
                *chart,
            )?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeriesJson {
    /// Complete toric series of the bundle, filtered by the metric when one
    /// is given (here or inside the bundle).
    Toric {
        bundle: ModelJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<MetricJson>,
    },
    Polynomial {
        variety: String,
        #[serde(alias = "degree")]
        bidegree: Vec<u32>,
        /// Generators of the series in degree one; complete series if absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<String>>,
    },
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<GradedSeries> {
        match self {
            SeriesJson::Toric { bundle, metric } => {
                let mut model = bundle.to_model()?;
                if let Some(m) = metric {
                    model = model.with_metric(m.to_metric()?)?;
                }
                let filtered = model.metric.is_some();
                GradedSeries::toric(model, filtered)
            }
            SeriesJson::Polynomial {
                variety,
                bidegree,
                generators,
            } => {
                let rule = match generators {
                    None => PolyRule::Complete,
                    Some(g) => PolyRule::Generated(
                        g.iter()
                            .map(|s| Poly::parse(s, &CHART_VARS))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                };
                GradedSeries::polynomial(VarietyKind::from_name(variety)?, bidegree.clone(), rule)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineJson {
    pub a: Vec<RatStr>,
    pub b: RatStr,
}

impl AffineJson {
    pub fn from_affine(f: &Affine) -> Self {
        AffineJson {
            a: strs(&f.a),
            b: RatStr(f.b.clone()),
        }
    }

    pub fn to_affine(&self) -> Affine {
        Affine::new(QVec(unstrs(&self.a)), self.b.0.clone())
    }
}

fn affines(pieces: &[AffineJson], dim: usize) -> Result<Vec<Affine>> {
    pieces
        .iter()
        .map(|p| {
            if p.a.len() != dim {
                return Err(Error::Schema(format!("affine piece of length {} in dimension {dim}", p.a.len())));
            }
            Ok(p.to_affine())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionJson {
    pub domain: BodyJson,
    pub pieces: Vec<AffineJson>,
}

impl TestFunctionJson {
    pub fn from_test_function(f: &TestFunction) -> Self {
        TestFunctionJson {
            domain: BodyJson::from_body(f.domain()),
            pieces: f.pieces().iter().map(AffineJson::from_affine).collect(),
        }
    }

    pub fn to_test_function(&self) -> Result<TestFunction> {
        let domain = self.domain.to_body()?;
        let pieces = affines(&self.pieces, domain.dim())?;
        TestFunction::new(domain, pieces)
    }
}

/// Convex weight `max_j (<a_j, x> + b_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJson {
    pub pieces: Vec<AffineJson>,
}

impl WeightJson {
    pub fn from_weight(v: &PLConvexWeight) -> Self {
        WeightJson {
            pieces: v.pieces().iter().map(AffineJson::from_affine).collect(),
        }
    }

    pub fn to_weight(&self) -> Result<PLConvexWeight> {
        let dim = self.pieces.first().map_or(0, |p| p.a.len());
        PLConvexWeight::new(affines(&self.pieces, dim)?)
    }
}

/// Toric filtration induced by a concave weight on the moment polytope; the
/// weight's domain is the polytope itself and is not repeated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationJson {
    pub model: ModelJson,
    pub pieces: Vec<AffineJson>,
}

impl FiltrationJson {
    pub fn to_filtration(&self) -> Result<ToricFiltration> {
        let model = self.model.to_model()?;
        let p = model.polytope()?;
        let pieces = affines(&self.pieces, p.dim())?;
        ToricFiltration::new(model, TestFunction::new(p, pieces)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub at: RatStr,
    pub mass: RatStr,
}

/// Density `sum_i coeffs[i] x^i` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub lo: RatStr,
    pub hi: RatStr,
    pub coeffs: Vec<RatStr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
    pub pieces: Vec<DensityJson>,
}

impl MeasureJson {
    pub fn from_measure(m: &PPMeasure) -> Self {
        MeasureJson {
            atoms: m
                .atoms()
                .iter()
                .map(|(x, w)| AtomJson {
                    at: RatStr(x.clone()),
                    mass: RatStr(w.clone()),
                })
                .collect(),
            pieces: m
                .pieces()
                .iter()
                .map(|p| DensityJson {
                    lo: RatStr(p.lo.clone()),
                    hi: RatStr(p.hi.clone()),
                    coeffs: strs(&p.density.0),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self) -> Result<PPMeasure> {
        if self.atoms.iter().any(|a| a.mass.0.is_negative()) {
            return Err(Error::Schema("negative atom mass".into()));
        }
        PPMeasure::new(
            self.atoms.iter().map(|a| (a.at.0.clone(), a.mass.0.clone())).collect(),
            self.pieces
                .iter()
                .map(|p| DensityPiece {
                    lo: p.lo.0.clone(),
                    hi: p.hi.0.clone(),
                    density: UPoly::new(unstrs(&p.coeffs)),
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn roundtrip<T: Serialize + DeserializeOwned>(src: &str) -> String {
        let a: T = from_json(src).unwrap();
        let out = to_json(&a);
        let b: T = from_json(&out).unwrap();
        assert_eq!(to_json(&b), out);
        out
    }

    #[test]
    fn rationals_in_every_accepted_spelling() {
        let v: Vec<RatStr> = from_json(r#"["1/2", "0.25", 3, ["6", "4"], [-2, 4], "-7"]"#).unwrap();
        let got: Vec<Rat> = v.into_iter().map(|r| r.0).collect();
        assert_eq!(got, vec![rat(1, 2), rat(1, 4), int(3), rat(3, 2), rat(-1, 2), int(-7)]);
        assert!(from_json::<RatStr>("1.5").is_err());
        assert!(from_json::<RatStr>(r#""1/0""#).is_err());
    }

    #[test]
    fn body_json_is_canonical() {
        let src = r#"{"dim":2,"vertices":[[["1","1"],["1","1"]],[["0","1"],["0","1"]],[["1","1"],["0","1"]],[["0","1"],["3","1"]],["1/2","1/2"]]}"#;
        let b: BodyJson = from_json(src).unwrap();
        let body = b.to_body().unwrap();
        assert_eq!(body.vertices().len(), 4);
        let out = to_json(&BodyJson::from_body(&body));
        assert!(out.contains("\"3\""));
        assert_eq!(to_json(&BodyJson::from_body(&from_json::<BodyJson>(&out).unwrap().to_body().unwrap())), out);
        let bad = r#"{"dim":2,"vertices":[[["1","1"]]]}"#;
        assert!(matches!(from_json::<BodyJson>(bad).unwrap().to_body(), Err(Error::Schema(_))));
    }

    #[test]
    fn model_flag_series_roundtrip() {
        let m = r#"{"fan":{"rays":[[1,0],[0,1],[-1,0],[0,-1]],"max_cones":[[0,1],[1,2],[2,3],[3,0]]},"divisor":["1","2","0","0"],"metric":{"exponents":[[0,0],[1,2]]}}"#;
        roundtrip::<ModelJson>(m);
        let model = from_json::<ModelJson>(m).unwrap().to_model().unwrap();
        assert_eq!(model.metric.as_ref().unwrap().exponents.len(), 2);
        assert_eq!(from_json::<ModelJson>(&to_json(&ModelJson::from_model(&model))).unwrap().to_model().unwrap(), model);

        let named = roundtrip::<ModelJson>(r#"{"fan":"p1xp1","degrees":[1,2]}"#);
        assert_eq!(
            from_json::<ModelJson>(&named).unwrap().to_model().unwrap(),
            ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap()
        );
        assert!(from_json::<ModelJson>(r#"{"fan":"p2"}"#).unwrap().to_model().is_err());
        assert!(from_json::<ModelJson>(r#"{"fan":"p2","degree":[1]}"#).is_err());

        let f = r#"{"type":"surface","variety":"p1xp1","curve":"u - v","point":[["0","1"],["0","1"]],"chart":0}"#;
        let out = roundtrip::<FlagJson>(f);
        let flag = from_json::<FlagJson>(&out).unwrap().to_flag().unwrap();
        assert_eq!(to_json(&FlagJson::from_flag(&flag)), out);
        roundtrip::<FlagJson>(r#"{"type":"toric","rays":[0,1]}"#);

        let s = roundtrip::<SeriesJson>(r#"{"backend":"polynomial","variety":"p1xp1","bidegree":[1,2]}"#);
        assert_eq!(from_json::<SeriesJson>(&s).unwrap().to_series().unwrap().dim_k(1).unwrap(), 6);
        let t = roundtrip::<SeriesJson>(r#"{"backend":"toric","bundle":{"fan":"p2","degrees":[2]},"metric":{"exponents":[[0,0],[2,0],[0,1]]}}"#);
        assert_eq!(from_json::<SeriesJson>(&t).unwrap().to_series().unwrap().dim_k(1).unwrap(), 4);
    }

    #[test]
    fn test_function_weight_measure_roundtrip() {
        let f = r#"{"domain":{"dim":1,"vertices":[[["0","1"]],[["1","1"]]]},"pieces":[{"a":["1"],"b":"0"},{"a":["-1"],"b":"1"}]}"#;
        let out = roundtrip::<TestFunctionJson>(f);
        let tf = from_json::<TestFunctionJson>(&out).unwrap().to_test_function().unwrap();
        assert_eq!(tf.tau_plus(), &rat(1, 2));
        assert_eq!(to_json(&TestFunctionJson::from_test_function(&tf)), out);

        let w = roundtrip::<WeightJson>(r#"{"pieces":[{"a":["0"],"b":"0"},{"a":["1"],"b":"0"}]}"#);
        let v = from_json::<WeightJson>(&w).unwrap().to_weight().unwrap();
        assert_eq!(to_json(&WeightJson::from_weight(&v)), w);

        let m = r#"{"atoms":[{"at":"1/2","mass":"1/4"}],"pieces":[{"lo":"0","hi":"1/2","coeffs":["3/2"]}]}"#;
        let out = roundtrip::<MeasureJson>(m);
        let mu = from_json::<MeasureJson>(&out).unwrap().to_measure().unwrap();
        assert_eq!(mu.mass(), int(1));
        assert_eq!(to_json(&MeasureJson::from_measure(&mu)), out);
    }

    #[test]
    fn filtration_json() {
        let src = r#"{"model":{"fan":"p1","degrees":[1]},"pieces":[{"a":["1"],"b":"0"}]}"#;
        let filt = from_json::<FiltrationJson>(src).unwrap().to_filtration().unwrap();
        assert_eq!(filt.jumping_numbers(3).unwrap(), vec![int(1), rat(2, 3), rat(1, 3), int(0)]);
    }
}
