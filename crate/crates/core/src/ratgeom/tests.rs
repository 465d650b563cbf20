use num::{One, Signed, Zero};
use proptest::prelude::*;

use super::*;
use crate::linalg::solve;
use crate::rat::{int, rat};

fn pts(v: &[(i64, i64)]) -> Vec<QVec> {
    v.iter().map(|&(a, b)| QVec::from_ints(&[a, b])).collect()
}

fn trapezoid() -> ConvexBody {
    hull(&pts(&[(0, 0), (1, 0), (1, 1), (0, 3)])).unwrap()
}

fn unit_square() -> ConvexBody {
    hull(&pts(&[(0, 0), (1, 0), (0, 1), (1, 1)])).unwrap()
}

/// Carathéodory oracle: `p` lies in the hull of `others` (planar) iff it lies
/// in some triangle, segment or point spanned by them.
fn in_hull_bruteforce(p: &QVec, others: &[QVec]) -> bool {
    let m = others.len();
    for i in 0..m {
        if &others[i] == p {
            return true;
        }
        for j in i + 1..m {
            // p = a + t (b - a), 0 <= t <= 1
            let d = &others[j] - &others[i];
            let r = p - &others[i];
            let cross = &d[0] * &r[1] - &d[1] * &r[0];
            if cross.is_zero() {
                let dd = d.norm_sq();
                let t = d.dot(&r) / dd;
                if !t.is_negative() && t <= Rat::one() {
                    return true;
                }
            }
            for k in j + 1..m {
                let a = vec![
                    vec![others[i][0].clone(), others[j][0].clone(), others[k][0].clone()],
                    vec![others[i][1].clone(), others[j][1].clone(), others[k][1].clone()],
                    vec![Rat::one(), Rat::one(), Rat::one()],
                ];
                if let Some(l) = solve(&a, &[p[0].clone(), p[1].clone(), Rat::one()]) {
                    if l.iter().all(|x| !x.is_negative()) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn extreme_bruteforce(points: &[QVec]) -> Vec<QVec> {
    let mut uniq: Vec<QVec> = points.to_vec();
    uniq.sort();
    uniq.dedup();
    let mut out: Vec<QVec> = (0..uniq.len())
        .filter(|&i| {
            let others: Vec<QVec> = uniq
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.clone())
                .collect();
            !in_hull_bruteforce(&uniq[i], &others)
        })
        .map(|i| uniq[i].clone())
        .collect();
    out.sort();
    out
}

/// Sutherland-Hodgman clipping of a convex polygon given in cyclic order.
fn clip_polygon(poly: &[QVec], h: &Halfspace) -> Vec<QVec> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let a = &poly[i];
        let b = &poly[(i + 1) % poly.len()];
        let (sa, sb) = (h.slack(a), h.slack(b));
        if !sa.is_negative() {
            out.push(a.clone());
        }
        if (sa.is_negative() && sb.is_positive()) || (sa.is_positive() && sb.is_negative()) {
            let t = &sa / (&sa - &sb);
            out.push(a + &(b - a).scaled(&t));
        }
    }
    out
}

fn cyclic(body: &ConvexBody) -> Vec<QVec> {
    let c = body.vertex_centroid().to_f64();
    let mut v = body.vertices().to_vec();
    v.sort_by(|p, q| {
        let (p, q) = (p.to_f64(), q.to_f64());
        let ap = (p[1] - c[1]).atan2(p[0] - c[0]);
        let aq = (q[1] - c[1]).atan2(q[0] - c[0]);
        ap.partial_cmp(&aq).unwrap()
    });
    v
}

fn lcg(seed: &mut u64) -> i64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 33) % 1000) as i64
}

#[test]
fn hull_drops_interior_point() {
    let mut p = pts(&[(0, 0), (1, 0), (0, 1)]);
    p.push(QVec::from_rats(&[(1, 4), (1, 4)]));
    let k = hull(&p).unwrap();
    assert_eq!(k.vertices(), &pts(&[(0, 0), (0, 1), (1, 0)])[..]);
}

#[test]
fn hull_of_trapezoid() {
    let k = trapezoid();
    assert_eq!(k.vertices(), &pts(&[(0, 0), (0, 3), (1, 0), (1, 1)])[..]);
    assert_eq!(k.volume(), int(2));
}

#[test]
fn hull_matches_extreme_point_oracle_on_random_points() {
    let mut seed = 7u64;
    for _ in 0..5 {
        let points: Vec<QVec> = (0..20)
            .map(|_| QVec(vec![rat(lcg(&mut seed), 999), rat(lcg(&mut seed), 999)]))
            .collect();
        let k = hull(&points).unwrap();
        assert_eq!(k.vertices(), &extreme_bruteforce(&points)[..]);
    }
}

#[test]
fn hull_handles_collinear_and_lower_dimensional_input() {
    let seg = hull(&pts(&[(0, 0), (2, 2), (1, 1), (3, 3)])).unwrap();
    assert_eq!(seg.vertices(), &pts(&[(0, 0), (3, 3)])[..]);
    assert_eq!(seg.affine_dim(), 1);
    assert_eq!(seg.volume(), Rat::zero());
    assert!(seg.contains(&QVec::from_ints(&[2, 2])).unwrap());
    assert!(!seg.contains(&QVec::from_ints(&[2, 1])).unwrap());

    let tri3: Vec<QVec> = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 0]]
        .iter()
        .map(|p| QVec::from_ints(p))
        .collect();
    let sq = hull(&tri3).unwrap();
    assert_eq!(sq.vertices().len(), 4);
    assert_eq!(sq.affine_dim(), 2);
}

#[test]
fn hull_rejects_bad_input() {
    assert_eq!(hull(&[]).unwrap_err(), Error::EmptyHull);
    let mixed = vec![QVec::from_ints(&[0, 0]), QVec::from_ints(&[1])];
    assert!(matches!(hull(&mixed), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn hull_in_three_dimensions_with_coplanar_points() {
    let mut p: Vec<QVec> = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                p.push(QVec::from_ints(&[x, y, z]));
            }
        }
    }
    let cube = hull(&p).unwrap();
    assert_eq!(cube.vertices().len(), 8);
    assert_eq!(cube.volume(), int(8));
    assert_eq!(cube.facets().len(), 6);
}

#[test]
fn volumes() {
    assert_eq!(unit_square().volume(), int(1));
    assert_eq!(hull(&pts(&[(0, 0), (1, 0), (0, 1)])).unwrap().volume(), rat(1, 2));
    let simplex3 = hull(&[
        QVec::from_ints(&[0, 0, 0]),
        QVec::from_ints(&[1, 0, 0]),
        QVec::from_ints(&[0, 1, 0]),
        QVec::from_ints(&[0, 0, 1]),
    ])
    .unwrap();
    assert_eq!(simplex3.volume(), rat(1, 6));
    let interval = hull(&[QVec::from_ints(&[2]), QVec::from_ints(&[-1])]).unwrap();
    assert_eq!(interval.volume(), int(3));
}

#[test]
fn minkowski_sums() {
    let k = trapezoid();
    let p = ConvexBody::point(QVec::from_ints(&[2, -1]));
    assert_eq!(minkowski_sum(&k, &p).unwrap(), k.translate(&QVec::from_ints(&[2, -1])).unwrap());

    let i01 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[1])]).unwrap();
    let i02 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[2])]).unwrap();
    assert_eq!(minkowski_sum(&i01, &i01).unwrap(), i02);

    let tri = hull(&pts(&[(0, 0), (1, 0), (0, 1)])).unwrap();
    let sum = minkowski_sum(&unit_square(), &tri).unwrap();
    let sums: Vec<QVec> = unit_square()
        .vertices()
        .iter()
        .flat_map(|a| tri.vertices().iter().map(move |b| a + b))
        .collect();
    assert_eq!(sum.vertices(), &extreme_bruteforce(&sums)[..]);
}

#[test]
fn scaling() {
    let i02 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[2])]).unwrap();
    let i01 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[1])]).unwrap();
    assert_eq!(i02.scale(&rat(1, 2)).unwrap(), i01);
    assert_eq!(trapezoid().scale(&int(1)).unwrap(), trapezoid());
    assert_eq!(
        trapezoid().scale(&int(3)).unwrap().vertices(),
        &pts(&[(0, 0), (0, 9), (3, 0), (3, 3)])[..]
    );
    assert_eq!(trapezoid().scale(&int(0)).unwrap().vertices(), &pts(&[(0, 0)])[..]);
    assert_eq!(trapezoid().scale(&int(-1)).unwrap_err(), Error::InvalidScale);
}

#[test]
fn intersections() {
    let sq = unit_square();
    let x_ge_2 = HalfspaceSystem::new(2, vec![Halfspace::new(QVec::from_ints(&[-1, 0]), int(-2))]).unwrap();
    assert_eq!(sq.intersect(&x_ge_2).unwrap(), None);

    let x_le_half = HalfspaceSystem::new(2, vec![Halfspace::new(QVec::from_ints(&[1, 0]), rat(1, 2))]).unwrap();
    let rect = sq.intersect(&x_le_half).unwrap().unwrap();
    assert_eq!(
        rect.vertices(),
        &[
            QVec::from_rats(&[(0, 1), (0, 1)]),
            QVec::from_rats(&[(0, 1), (1, 1)]),
            QVec::from_rats(&[(1, 2), (0, 1)]),
            QVec::from_rats(&[(1, 2), (1, 1)]),
        ][..]
    );
}

#[test]
fn intersection_matches_polygon_clipping_oracle() {
    let mut seed = 99u64;
    for _ in 0..10 {
        let a: Vec<QVec> = (0..7)
            .map(|_| QVec(vec![rat(lcg(&mut seed), 500), rat(lcg(&mut seed), 500)]))
            .collect();
        let b: Vec<QVec> = (0..7)
            .map(|_| QVec(vec![rat(lcg(&mut seed), 500), rat(lcg(&mut seed), 500)]))
            .collect();
        let (ka, kb) = (hull(&a).unwrap(), hull(&b).unwrap());
        let mut poly = cyclic(&ka);
        for h in kb.facets() {
            poly = clip_polygon(&poly, h);
            if poly.is_empty() {
                break;
            }
        }
        let got = ka.intersect_body(&kb).unwrap();
        match got {
            None => assert!(poly.is_empty()),
            Some(body) => assert_eq!(body, hull(&poly).unwrap()),
        }
    }
}

#[test]
fn unbounded_and_degenerate_systems() {
    let half = HalfspaceSystem::new(2, vec![Halfspace::new(QVec::from_ints(&[1, 0]), int(1))]).unwrap();
    assert_eq!(half.vertices().unwrap_err(), Error::Unbounded);
    let wedge = HalfspaceSystem::new(
        2,
        vec![
            Halfspace::new(QVec::from_ints(&[-1, 0]), int(0)),
            Halfspace::new(QVec::from_ints(&[0, -1]), int(0)),
        ],
    )
    .unwrap();
    assert_eq!(wedge.vertices().unwrap_err(), Error::Unbounded);
    let infeasible_strip = HalfspaceSystem::new(
        2,
        vec![
            Halfspace::new(QVec::from_ints(&[1, 0]), int(0)),
            Halfspace::new(QVec::from_ints(&[-1, 0]), int(-1)),
        ],
    )
    .unwrap();
    assert_eq!(infeasible_strip.vertices().unwrap(), None);
}

#[test]
fn mixed_volumes() {
    let k = trapezoid();
    assert_eq!(mixed_volume(&[k.clone(), k.clone()]).unwrap(), int(2));
    let a = ConvexBody::cuboid(&[(int(0), int(1)), (int(0), int(1))]).unwrap();
    let b = ConvexBody::cuboid(&[(int(0), int(2)), (int(0), int(1))]).unwrap();
    // (vol(a+b) - vol a - vol b)/2 = (6 - 1 - 2)/2
    assert_eq!(mixed_volume(&[a.clone(), b]).unwrap(), rat(3, 2));
    assert!(matches!(mixed_volume(&[a]), Err(Error::ArityMismatch { .. })));
}

#[test]
fn hausdorff_examples() {
    let sq = unit_square();
    assert_eq!(hausdorff_distance(&sq, &sq).unwrap().certified_sq, Rat::zero());
    let i01 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[1])]).unwrap();
    let i02 = hull(&[QVec::from_ints(&[0]), QVec::from_ints(&[2])]).unwrap();
    let d = hausdorff_distance(&i01, &i02).unwrap();
    assert_eq!(d.certified_sq, int(1));
    assert_eq!(d.approx, 1.0);
    let moved = sq.translate(&QVec::from_ints(&[3, 4])).unwrap();
    let d = hausdorff_distance(&sq, &moved).unwrap();
    assert_eq!(d.certified_sq, int(25));
    assert!((d.approx - 5.0).abs() < 1e-12);
}

#[test]
fn point_distance_uses_faces() {
    let sq = unit_square();
    // nearest point on an edge interior
    let d = point_sq_distance(&QVec::from_rats(&[(1, 2), (3, 1)]), &sq).unwrap();
    assert_eq!(d, int(4));
    // nearest point is a vertex
    let d = point_sq_distance(&QVec::from_ints(&[2, 2]), &sq).unwrap();
    assert_eq!(d, int(2));
    // distance to a facet of a 3-d simplex: plane x+y+z=1 from the point (1,1,1)
    let s = hull(&[
        QVec::from_ints(&[0, 0, 0]),
        QVec::from_ints(&[1, 0, 0]),
        QVec::from_ints(&[0, 1, 0]),
        QVec::from_ints(&[0, 0, 1]),
    ])
    .unwrap();
    assert_eq!(point_sq_distance(&QVec::from_ints(&[1, 1, 1]), &s).unwrap(), rat(4, 3));
}

#[test]
fn lattice_point_scans() {
    assert_eq!(lattice_points(&unit_square(), 1).len(), 4);
    let tri2 = hull(&pts(&[(0, 0), (2, 0), (0, 2)])).unwrap();
    assert_eq!(lattice_points(&tri2, 1).len(), 6);
    assert_eq!(
        lattice_points(&trapezoid(), 1),
        pts(&[(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1)])
    );
    // (Z/2)^2 points of the unit square
    assert_eq!(lattice_points(&unit_square(), 2).len(), 9);
}

#[test]
fn inner_bodies() {
    let sq = unit_square();
    let inner = sq.inner_body(&rat(1, 4)).unwrap().unwrap();
    assert_eq!(
        inner,
        ConvexBody::cuboid(&[(rat(1, 4), rat(3, 4)), (rat(1, 4), rat(3, 4))]).unwrap()
    );
    assert_eq!(sq.inner_body(&int(1)).unwrap(), None);
    let tri = hull(&pts(&[(0, 0), (4, 0), (0, 4)])).unwrap();
    let inner = tri.inner_body(&rat(1, 3)).unwrap().unwrap();
    assert!(inner.is_subset_of(&tri).unwrap());
    let seg = hull(&pts(&[(0, 0), (1, 1)])).unwrap();
    assert_eq!(seg.inner_body(&rat(1, 4)).unwrap_err(), Error::DegenerateBody);
}

#[test]
fn support_and_subset() {
    let sq = unit_square();
    assert_eq!(sq.support(&QVec::from_ints(&[1, 1])).unwrap(), int(2));
    assert!(sq.is_subset_of(&sq).unwrap());
    let box13 = ConvexBody::cuboid(&[(int(0), int(1)), (int(0), int(3))]).unwrap();
    assert!(trapezoid().is_subset_of(&box13).unwrap());
    assert!(!box13.is_subset_of(&trapezoid()).unwrap());
    assert!(matches!(
        sq.support(&QVec::from_ints(&[1])),
        Err(Error::DimensionMismatch { .. })
    ));
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn planar_points(max: usize) -> impl Strategy<Value = Vec<QVec>> {
    prop::collection::vec((small_rat(), small_rat()).prop_map(|(a, b)| QVec(vec![a, b])), 1..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_is_idempotent_and_contains_inputs(p in planar_points(12)) {
        let k = hull(&p).unwrap();
        prop_assert_eq!(hull(k.vertices()).unwrap(), k.clone());
        for q in &p {
            prop_assert!(k.contains(q).unwrap());
        }
        for h in k.halfspaces() {
            prop_assert!(k.vertices().iter().any(|v| h.is_tight(v)));
        }
    }

    #[test]
    fn volume_is_translation_invariant_and_scales(p in planar_points(10), t in small_rat()) {
        let k = hull(&p).unwrap();
        let shifted = k.translate(&QVec(vec![t.clone(), -t.clone()])).unwrap();
        prop_assert_eq!(shifted.volume(), k.volume());
        let s = t.abs() + int(1);
        prop_assert_eq!(k.scale(&s).unwrap().volume(), k.volume() * &s * &s);
    }

    #[test]
    fn equal_volume_under_containment_forces_equality(p in planar_points(10), drop in 0usize..10) {
        let k1 = hull(&p).unwrap();
        let mut sub: Vec<QVec> = k1.vertices().to_vec();
        if sub.len() > 1 {
            sub.remove(drop % sub.len());
        }
        let k0 = hull(&sub).unwrap();
        prop_assert!(k0.is_subset_of(&k1).unwrap());
        if k0.volume() == k1.volume() && k1.volume() > Rat::zero() {
            prop_assert_eq!(k0, k1);
        }
    }

    #[test]
    fn inner_body_is_contained(p in planar_points(10), d in 1i64..6) {
        let k = hull(&p).unwrap();
        prop_assume!(k.is_full_dimensional());
        if let Some(inner) = k.inner_body(&rat(d, 8)).unwrap() {
            prop_assert!(inner.is_subset_of(&k).unwrap());
        }
    }
}
