//! Smooth complete toric models: fans, invariant divisors with their moment
//! polytopes, and metrics `phi = log sum |z^beta_i|^2` with gradient polytope
//! `Q = conv(beta_i)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_i64, solve};
use crate::rat::{factorial, fmt_rat, int, QVec, Rat};
use crate::ratgeom::{hull, integer_points, mixed_volume, ConvexBody, Halfspace, HalfspaceSystem};
use crate::series::{okounkov_body, BodyMode, ConvergenceReport, GradedSeries, SeriesFlag};
use crate::valuations::{toric_flag_iso, ToricFlag};

/// Smooth complete fan given by primitive rays and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        let n = rays.first().map(Vec::len).ok_or_else(|| Error::InvalidFan("no rays".into()))?;
        if n == 0 || n > 3 {
            return Err(Error::InvalidFan(format!("dimension {n} unsupported (need 1..=3)")));
        }
        for r in &rays {
            if r.len() != n {
                return Err(Error::InvalidFan("rays of mixed dimension".into()));
            }
            if r.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
                return Err(Error::InvalidFan(format!("ray {r:?} is not primitive")));
            }
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &max_cones {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != n || s.iter().any(|&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {c:?} is not simplicial of full dimension")));
            }
            let m: Vec<Vec<i64>> = s.iter().map(|&i| rays[i].clone()).collect();
            if det_i64(&m).abs() != Rat::one() {
                return Err(Error::InvalidFan(format!("cone {c:?} is not unimodular")));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidFan(format!("cone {c:?} listed twice")));
            }
        }
        let fan = Fan { rays, max_cones };
        fan.check_complete()?;
        Ok(fan)
    }

    /// Built-in fans: `p1`, `p2`, `p1xp1`, `hirzebruch:a`.
    pub fn named(name: &str) -> Result<Self> {
        let (rays, cones): (Vec<Vec<i64>>, Vec<Vec<usize>>) = match name {
            "p1" => (vec![vec![1], vec![-1]], vec![vec![0], vec![1]]),
            "p2" => (
                vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            ),
            "p1xp1" => (
                vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            ),
            _ => {
                let a: i64 = name
                    .strip_prefix("hirzebruch:")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidFan(format!("unknown named fan {name:?}")))?;
                (
                    vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
                    vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
                )
            }
        };
        Fan::new(rays, cones)
    }

    pub fn dim(&self) -> usize {
        self.rays[0].len()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    fn ray_q(&self, i: usize) -> QVec {
        QVec::from_ints(&self.rays[i])
    }

    /// Every ridge lies in exactly two maximal cones on opposite sides, and a
    /// generic vector lies in exactly one cone.
    fn check_complete(&self) -> Result<()> {
        let n = self.dim();
        let mut ridges: std::collections::BTreeMap<Vec<usize>, Vec<(usize, usize)>> = Default::default();
        for (ci, c) in self.max_cones.iter().enumerate() {
            for skip in 0..n {
                let mut ridge: Vec<usize> = c.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &r)| r).collect();
                ridge.sort_unstable();
                ridges.entry(ridge).or_default().push((ci, c[skip]));
            }
        }
        for (ridge, owners) in &ridges {
            if owners.len() != 2 {
                return Err(Error::InvalidFan(format!("ridge {ridge:?} lies in {} cones", owners.len())));
            }
            // sign of det(ridge rays, apex) must differ between the two sides
            let side = |apex: usize| {
                let mut m: Vec<Vec<i64>> = ridge.iter().map(|&r| self.rays[r].clone()).collect();
                m.push(self.rays[apex].clone());
                det_i64(&m)
            };
            let (a, b) = (side(owners[0].1), side(owners[1].1));
            if (a * b).is_positive() {
                return Err(Error::InvalidFan(format!("cones overlap across ridge {ridge:?}")));
            }
        }
        let probe: Vec<Rat> = [(1, 1), (7, 13), (-31, 97)].iter().take(n).map(|&(p, q)| Rat::new(p.into(), q.into())).collect();
        let hits = self.max_cones.iter().filter(|c| self.cone_contains(c, &probe)).count();
        if hits != 1 {
            return Err(Error::InvalidFan(format!("generic vector lies in {hits} cones")));
        }
        Ok(())
    }

    fn cone_contains(&self, cone: &[usize], w: &[Rat]) -> bool {
        let n = self.dim();
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|row| cone.iter().map(|&r| int(self.rays[r][row])).collect())
            .collect();
        solve(&a, w).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
    }
}

/// Metric `phi = log sum_i |z^{beta_i}|^2` given by its lattice exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricMetric {
    pub exponents: Vec<Vec<i64>>,
}

impl ToricMetric {
    pub fn new(exponents: Vec<Vec<i64>>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidMetric("no exponents".into()));
        }
        let mut e = exponents;
        e.sort();
        e.dedup();
        Ok(ToricMetric { exponents: e })
    }

    fn points(&self) -> Vec<QVec> {
        self.exponents.iter().map(|e| QVec::from_ints(e)).collect()
    }
}

/// Fan, invariant divisor `sum a_i D_i` and optional invariant metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricModel {
    pub fan: Arc<Fan>,
    pub divisor: Vec<Rat>,
    pub metric: Option<ToricMetric>,
    /// Translation applied to the polytope by flag normalization
    /// (accumulated; `P_new = P_old + twist`).
    pub twist: QVec,
}

impl ToricModel {
    pub fn new(fan: Arc<Fan>, divisor: Vec<Rat>, metric: Option<ToricMetric>) -> Result<Self> {
        if divisor.len() != fan.rays().len() {
            return Err(Error::DimensionMismatch {
                expected: fan.rays().len(),
                got: divisor.len(),
            });
        }
        if let Some(m) = &metric {
            if m.exponents.iter().any(|e| e.len() != fan.dim()) {
                return Err(Error::InvalidMetric("exponent of wrong dimension".into()));
            }
        }
        let n = fan.dim();
        Ok(ToricModel {
            fan,
            divisor,
            metric,
            twist: QVec::zeros(n),
        })
    }

    /// `O(a, b)` on `P^1 x P^1` (or `O(a)` on `P^2`, `P^1`), placed so that the
    /// polytope sits in the positive orthant at the origin.
    pub fn line_bundle(fan_name: &str, degrees: &[i64]) -> Result<Self> {
        let fan = Arc::new(Fan::named(fan_name)?);
        let r = fan.rays().len();
        let n = fan.dim();
        if degrees.len() != r - n {
            return Err(Error::DimensionMismatch {
                expected: r - n,
                got: degrees.len(),
            });
        }
        let divisor = (0..r).map(|i| if i < n { int(0) } else { int(degrees[i - n]) }).collect();
        ToricModel::new(fan, divisor, None)
    }

    pub fn with_metric(mut self, metric: ToricMetric) -> Result<Self> {
        if metric.exponents.iter().any(|e| e.len() != self.dim()) {
            return Err(Error::InvalidMetric("exponent of wrong dimension".into()));
        }
        self.metric = Some(metric);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    pub fn is_integral(&self) -> bool {
        self.divisor.iter().all(|a| a.is_integer())
    }

    fn divisor_system(&self) -> Result<HalfspaceSystem> {
        let rows = (0..self.fan.rays().len())
            .map(|i| Halfspace::new(-&self.fan.ray_q(i), self.divisor[i].clone()))
            .collect();
        HalfspaceSystem::new(self.dim(), rows)
    }

    /// `P_D = {u : <u, v_i> >= -a_i}`.
    pub fn polytope(&self) -> Result<ConvexBody> {
        match self.divisor_system()?.to_body() {
            Ok(Some(b)) => Ok(b),
            Ok(None) => Err(Error::EmptyLinearSystem),
            Err(Error::Unbounded) => Err(Error::NotBig),
            Err(e) => Err(e),
        }
    }

    /// Replace `D` by `D + div(chi^u)` so that the flag rays get coefficient 0.
    pub fn normalize_to_flag(&self, flag: &ToricFlag) -> Result<ToricModel> {
        toric_flag_iso(&self.fan, flag)?;
        let a: Vec<Vec<Rat>> = flag.rays.iter().map(|&i| self.fan.ray_q(i).0).collect();
        let rhs: Vec<Rat> = flag.rays.iter().map(|&i| -&self.divisor[i]).collect();
        let u = QVec(solve(&a, &rhs).expect("unimodular flag cone"));
        // new a_i = a_i + <u, v_i>; polytope moves by -u
        let divisor = (0..self.fan.rays().len())
            .map(|i| &self.divisor[i] + u.dot(&self.fan.ray_q(i)))
            .collect();
        let shift = -&u;
        let metric = match &self.metric {
            None => None,
            Some(m) => {
                let s = shift.to_i64().ok_or(Error::NonIntegralDivisor)?;
                Some(ToricMetric {
                    exponents: m
                        .exponents
                        .iter()
                        .map(|e| e.iter().zip(&s).map(|(x, y)| x + y).collect())
                        .collect(),
                })
            }
        };
        Ok(ToricModel {
            fan: self.fan.clone(),
            divisor,
            metric,
            twist: &self.twist + &shift,
        })
    }

    fn metric(&self) -> Result<&ToricMetric> {
        self.metric.as_ref().ok_or(Error::MissingMetric)
    }

    /// `Q_{D,phi} = conv(beta_i)`, checked to lie in `P_D`.
    pub fn metric_polytope(&self) -> Result<ConvexBody> {
        let m = self.metric()?;
        let p = self.polytope()?;
        for e in &m.exponents {
            if !p.contains(&QVec::from_ints(e))? {
                return Err(Error::InvalidMetric(format!("exponent {e:?} lies outside P_D")));
            }
        }
        hull(&m.points())
    }

    /// Whether `|z^alpha|^2 e^{-phi}` is bounded, i.e. `alpha` in `Q`.
    pub fn is_bounded_section(&self, alpha: &[i64]) -> Result<bool> {
        Ok(self.separating_halfspace(alpha)?.is_none())
    }

    /// A facet inequality of `Q` violated by `alpha`, if any.
    pub fn separating_halfspace(&self, alpha: &[i64]) -> Result<Option<Halfspace>> {
        let q = self.metric_polytope()?;
        let x = QVec::from_ints(alpha);
        Ok(q.halfspaces().into_iter().find(|h| !h.contains(&x)))
    }

    /// `Phi(Q_{D,phi})` after normalizing to the flag.
    pub fn partial_okounkov(&self, flag: &ToricFlag) -> Result<ConvexBody> {
        let phi = toric_flag_iso(&self.fan, flag)?;
        let q = self.normalize_to_flag(flag)?.metric_polytope()?;
        if q.volume().is_zero() {
            return Err(Error::ZeroVolume);
        }
        q.map_linear(&phi)
    }

    /// The same body through the valuative route: the series of sections
    /// bounded with respect to the metric, valued by the flag.
    pub fn partial_okounkov_semigroup(&self, flag: &SeriesFlag, k_max: u32) -> Result<(ConvexBody, ConvergenceReport)> {
        let q = self.metric_polytope()?;
        if q.volume().is_zero() {
            return Err(Error::ZeroVolume);
        }
        let series = GradedSeries::toric(self.clone(), true)?;
        let reference = match flag {
            SeriesFlag::Toric(f) => Some(self.partial_okounkov(f)?),
            SeriesFlag::Surface(_) => None,
        };
        okounkov_body(&series, flag, k_max, BodyMode::Stabilized, reference)
    }

    /// Nef iff each cone's Cartier datum `u_sigma` lies in `P_D`.
    pub fn is_nef(&self) -> bool {
        self.nef_violation().is_none()
    }

    fn nef_violation(&self) -> Option<String> {
        for cone in self.fan.max_cones() {
            let a: Vec<Vec<Rat>> = cone.iter().map(|&i| self.fan.ray_q(i).0).collect();
            let rhs: Vec<Rat> = cone.iter().map(|&i| -&self.divisor[i]).collect();
            let u = solve(&a, &rhs).expect("unimodular cone");
            for j in 0..self.fan.rays().len() {
                if self.fan.ray_q(j).dot(&u) < -&self.divisor[j] {
                    return Some(format!("cone {cone:?} fails on ray {j}"));
                }
            }
        }
        None
    }

    /// `lim ord_{D_i} H^0(kL) / k`, or its value at level `k`.
    pub fn asymptotic_ord(&self, ray: usize, k: Option<u32>) -> Result<Rat> {
        let v = self.ray(ray)?;
        let a = &self.divisor[ray];
        match k {
            None => {
                let p = self.polytope()?;
                Ok(p.vertices().iter().map(|u| u.dot(&v) + a).min().unwrap())
            }
            Some(k) => {
                if !self.is_integral() {
                    return Err(Error::NonIntegralDivisor);
                }
                let kk = int(k as i64);
                let pts = integer_points(&self.polytope()?.scale(&kk)?);
                let best = pts
                    .iter()
                    .map(|p| QVec::from_ints(p).dot(&v) + &kk * a)
                    .min()
                    .ok_or(Error::EmptyLinearSystem)?;
                Ok(best / kk)
            }
        }
    }

    /// Generic Lelong number along `D_i`: `min_beta <beta, v_i> + a_i`.
    pub fn lelong_toric(&self, ray: usize) -> Result<Rat> {
        let v = self.ray(ray)?;
        let m = self.metric()?;
        Ok(m.exponents
            .iter()
            .map(|b| QVec::from_ints(b).dot(&v) + &self.divisor[ray])
            .min()
            .unwrap())
    }

    fn ray(&self, i: usize) -> Result<QVec> {
        if i >= self.fan.rays().len() {
            return Err(Error::DimensionMismatch {
                expected: self.fan.rays().len(),
                got: i,
            });
        }
        Ok(self.fan.ray_q(i))
    }

    /// `(L + L', phi + phi')`: divisors add, exponents add pairwise.
    pub fn tensor_metric(&self, other: &ToricModel) -> Result<ToricModel> {
        if self.fan != other.fan {
            return Err(Error::FanMismatch);
        }
        let (m1, m2) = (self.metric()?, other.metric()?);
        let exps = m1
            .exponents
            .iter()
            .cartesian_product(&m2.exponents)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(ToricModel {
            fan: self.fan.clone(),
            divisor: self.divisor.iter().zip(&other.divisor).map(|(a, b)| a + b).collect(),
            metric: Some(ToricMetric::new(exps)?),
            twist: &self.twist + &other.twist,
        })
    }

    /// `(aD, a phi)`: divisor scaled, exponents `a beta_i`.
    pub fn scale_level(&self, a: u32) -> ToricModel {
        let ar = int(a as i64);
        ToricModel {
            fan: self.fan.clone(),
            divisor: self.divisor.iter().map(|x| x * &ar).collect(),
            metric: self.metric.as_ref().map(|m| ToricMetric {
                exponents: m
                    .exponents
                    .iter()
                    .map(|e| e.iter().map(|x| x * a as i64).collect())
                    .collect(),
            }),
            twist: self.twist.scaled(&ar),
        }
    }
}

/// `(L_1 ... L_n) = n! MV(P_1, ..., P_n)` for nef bundles on one fan.
pub fn intersection_number(models: &[ToricModel]) -> Result<Rat> {
    let first = models.first().ok_or(Error::ArityMismatch { expected: 1, got: 0 })?;
    let n = first.dim();
    if models.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: models.len(),
        });
    }
    let mut bodies = Vec::with_capacity(n);
    for m in models {
        if m.fan != first.fan {
            return Err(Error::FanMismatch);
        }
        if let Some(why) = m.nef_violation() {
            return Err(Error::NotNef(why));
        }
        bodies.push(m.polytope()?);
    }
    Ok(factorial(n) * mixed_volume(&bodies)?)
}

impl std::fmt::Display for ToricModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.divisor.iter().map(fmt_rat).collect();
        write!(f, "D = [{}]", d.join(", "))?;
        if let Some(m) = &self.metric {
            write!(f, ", exponents {:?}", m.exponents)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn body(pts: &[&[i64]]) -> ConvexBody {
        hull(&pts.iter().map(|p| QVec::from_ints(p)).collect::<Vec<_>>()).unwrap()
    }

    fn id_flag() -> ToricFlag {
        ToricFlag::new(vec![0, 1])
    }

    #[test]
    fn fans_validate() {
        for name in ["p1", "p2", "p1xp1", "hirzebruch:0", "hirzebruch:1", "hirzebruch:3"] {
            Fan::named(name).unwrap();
        }
        // missing cone
        assert!(Fan::new(
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2]]
        )
        .is_err());
        // singular cone
        assert!(Fan::new(
            vec![vec![1, 0], vec![1, 2], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]]
        )
        .is_err());
        // 3-dimensional P^1 x P^1 x P^1
        let mut rays = Vec::new();
        for i in 0..3 {
            for s in [1, -1] {
                let mut r = vec![0; 3];
                r[i] = s;
                rays.push(r);
            }
        }
        let cones: Vec<Vec<usize>> = (0..8)
            .map(|m| (0..3).map(|i| 2 * i + ((m >> i) & 1)).collect())
            .collect();
        Fan::new(rays, cones).unwrap();
    }

    #[test]
    fn polytopes_of_divisors() {
        let m = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
        assert_eq!(m.polytope().unwrap(), body(&[&[0, 0], &[1, 0], &[0, 2], &[1, 2]]));
        let m = ToricModel::line_bundle("p2", &[1]).unwrap();
        assert_eq!(m.polytope().unwrap(), body(&[&[0, 0], &[1, 0], &[0, 1]]));
        let m = ToricModel::line_bundle("p2", &[0]).unwrap();
        assert_eq!(m.polytope().unwrap(), body(&[&[0, 0]]));
        let m = ToricModel::line_bundle("hirzebruch:1", &[1, 1]).unwrap();
        assert_eq!(m.polytope().unwrap(), body(&[&[0, 0], &[1, 0], &[2, 1], &[0, 1]]));
        let fan = Arc::new(Fan::named("p2").unwrap());
        let m = ToricModel::new(fan, vec![int(-1), int(0), int(0)], None).unwrap();
        assert_eq!(m.polytope().unwrap_err(), Error::EmptyLinearSystem);
    }

    #[test]
    fn normalization() {
        let m = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
        assert_eq!(m.normalize_to_flag(&id_flag()).unwrap(), m);
        // O(1) on P^2 normalized to the cone {v1, v2}
        let p2 = ToricModel::line_bundle("p2", &[1]).unwrap();
        let n = p2.normalize_to_flag(&ToricFlag::new(vec![1, 2])).unwrap();
        assert_eq!(n.divisor, vec![int(1), int(0), int(0)]);
        assert_eq!(n.polytope().unwrap(), body(&[&[-1, 0], &[0, 0], &[-1, 1]]));
        assert_eq!(n.twist, QVec::from_ints(&[-1, 0]));
        let twice = n.normalize_to_flag(&ToricFlag::new(vec![1, 2])).unwrap();
        assert_eq!(twice, n);
    }

    #[test]
    fn metric_polytopes_and_sections() {
        let p1 = ToricModel::line_bundle("p1", &[2]).unwrap();
        let m = p1.clone().with_metric(ToricMetric::new(vec![vec![1], vec![2]]).unwrap()).unwrap();
        assert_eq!(m.metric_polytope().unwrap(), body(&[&[1], &[2]]));
        assert!(m.is_bounded_section(&[1]).unwrap());
        assert!(!m.is_bounded_section(&[0]).unwrap());
        let h = m.separating_halfspace(&[0]).unwrap().unwrap();
        assert!(!h.contains(&QVec::from_ints(&[0])));
        assert!(h.contains(&QVec::from_ints(&[1])));
        let bad = p1.with_metric(ToricMetric::new(vec![vec![3]]).unwrap()).unwrap();
        assert!(matches!(bad.metric_polytope(), Err(Error::InvalidMetric(_))));

        let q = ToricModel::line_bundle("p1xp1", &[2, 2])
            .unwrap()
            .with_metric(ToricMetric::new(vec![vec![0, 0], vec![2, 2]]).unwrap())
            .unwrap();
        assert!(q.is_bounded_section(&[1, 1]).unwrap());
    }

    #[test]
    fn partial_bodies() {
        let base = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
        let full = base
            .clone()
            .with_metric(ToricMetric::new(vec![vec![0, 0], vec![1, 0], vec![0, 2], vec![1, 2]]).unwrap())
            .unwrap();
        assert_eq!(full.partial_okounkov(&id_flag()).unwrap(), base.polytope().unwrap());
        let seg = base
            .clone()
            .with_metric(ToricMetric::new(vec![vec![0, 0], vec![1, 2]]).unwrap())
            .unwrap();
        assert_eq!(seg.partial_okounkov(&id_flag()).unwrap_err(), Error::ZeroVolume);
        // swapped flag order transposes the body
        let swapped = full.partial_okounkov(&ToricFlag::new(vec![1, 0])).unwrap();
        assert_eq!(swapped, body(&[&[0, 0], &[2, 0], &[0, 1], &[2, 1]]));
    }

    #[test]
    fn intersection_numbers() {
        let l1 = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
        let l2 = ToricModel::line_bundle("p1xp1", &[2, 1]).unwrap();
        assert_eq!(intersection_number(&[l1, l2]).unwrap(), int(5));
        let h = ToricModel::line_bundle("p2", &[1]).unwrap();
        assert_eq!(intersection_number(&[h.clone(), h]).unwrap(), int(1));
        let o11 = ToricModel::line_bundle("p1xp1", &[1, 1]).unwrap();
        assert_eq!(intersection_number(&[o11.clone(), o11]).unwrap(), int(2));
        // on F_1 the negative section D_2 is not nef, a fiber is
        let f1 = Arc::new(Fan::named("hirzebruch:1").unwrap());
        let e = ToricModel::new(f1.clone(), vec![int(0), int(1), int(0), int(0)], None).unwrap();
        let fiber = ToricModel::new(f1, vec![int(0), int(0), int(1), int(0)], None).unwrap();
        assert!(fiber.is_nef());
        assert!(!e.is_nef());
        assert!(matches!(intersection_number(&[e, fiber]), Err(Error::NotNef(_))));
    }

    #[test]
    fn orders_and_lelong_numbers() {
        let m = ToricModel::line_bundle("p1xp1", &[1, 2]).unwrap();
        assert_eq!(m.asymptotic_ord(0, None).unwrap(), int(0));
        let fan = Arc::new(Fan::named("p1xp1").unwrap());
        // P = [1,2] x [0,1]
        let shifted = ToricModel::new(fan, vec![int(-1), int(0), int(2), int(1)], None).unwrap();
        assert_eq!(shifted.polytope().unwrap(), body(&[&[1, 0], &[2, 0], &[1, 1], &[2, 1]]));
        assert_eq!(shifted.asymptotic_ord(0, None).unwrap(), int(0));
        assert_eq!(shifted.asymptotic_ord(2, Some(3)).unwrap(), int(0));
        // every section of kE on F_1 vanishes to order k along E
        let f1 = Arc::new(Fan::named("hirzebruch:1").unwrap());
        let e = ToricModel::new(f1, vec![int(0), int(1), int(0), int(0)], None).unwrap();
        assert_eq!(e.asymptotic_ord(1, None).unwrap(), int(1));
        assert_eq!(e.asymptotic_ord(1, Some(3)).unwrap(), int(1));

        // rational divisor: finite-k orders approach the limit from above
        let p1 = Arc::new(Fan::named("p1").unwrap());
        let r = ToricModel::new(p1, vec![rat(-1, 2), int(2)], None).unwrap();
        assert_eq!(r.asymptotic_ord(0, None).unwrap(), int(0));

        let m = ToricModel::line_bundle("p1", &[2])
            .unwrap()
            .with_metric(ToricMetric::new(vec![vec![1], vec![2]]).unwrap())
            .unwrap();
        assert_eq!(m.lelong_toric(0).unwrap(), int(1));
        assert_eq!(m.scale_level(3).lelong_toric(0).unwrap(), int(3));
        let body = m.partial_okounkov(&ToricFlag::new(vec![0])).unwrap();
        assert_eq!(body.vertices()[0][0], int(1));
    }

    #[test]
    fn tensor_products() {
        let a = ToricModel::line_bundle("p1xp1", &[1, 1])
            .unwrap()
            .with_metric(ToricMetric::new(vec![vec![0, 0], vec![1, 1]]).unwrap())
            .unwrap();
        let trivial = ToricModel::line_bundle("p1xp1", &[0, 0])
            .unwrap()
            .with_metric(ToricMetric::new(vec![vec![0, 0]]).unwrap())
            .unwrap();
        assert_eq!(a.tensor_metric(&trivial).unwrap().metric_polytope().unwrap(), a.metric_polytope().unwrap());
        let b = ToricModel::line_bundle("p1xp1", &[1, 1])
            .unwrap()
            .with_metric(ToricMetric::new(vec![vec![1, 0], vec![0, 1]]).unwrap())
            .unwrap();
        let t = a.tensor_metric(&b).unwrap();
        let sum = crate::ratgeom::minkowski_sum(&a.metric_polytope().unwrap(), &b.metric_polytope().unwrap()).unwrap();
        assert_eq!(t.metric_polytope().unwrap(), sum);
        let other = ToricModel::line_bundle("p2", &[1]).unwrap();
        assert_eq!(a.tensor_metric(&other).unwrap_err(), Error::FanMismatch);
    }
}
