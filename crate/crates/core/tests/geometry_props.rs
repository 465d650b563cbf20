use num::Zero;
use proptest::prelude::*;

use okounkov::io::{from_json, to_json, BodyJson};
use okounkov::rat::{int, pow, rat};
use okounkov::ratgeom::{hull, minkowski_sum, ConvexBody, HalfspaceSystem};
use okounkov::{QVec, Rat};

fn points(n: usize) -> impl Strategy<Value = Vec<QVec>> {
    prop::collection::vec(prop::collection::vec((-4i64..=4, 1i64..=3), n), n + 1..n + 6)
        .prop_map(|pts| pts.into_iter().map(|p| QVec(p.into_iter().map(|(a, b)| rat(a, b)).collect())).collect())
}

fn body(n: usize) -> impl Strategy<Value = ConvexBody> {
    points(n).prop_map(|p| hull(&p).unwrap())
}

/// Shoelace area of a planar polygon, ordering vertices by an exact
/// angular comparison around the vertex average.
fn shoelace(vertices: &[QVec]) -> Rat {
    if vertices.len() < 3 {
        return Rat::zero();
    }
    let m = vertices.len() as i64;
    let c: Vec<Rat> = (0..2).map(|i| vertices.iter().map(|v| v[i].clone()).sum::<Rat>() / int(m)).collect();
    let rel: Vec<(Rat, Rat)> = vertices.iter().map(|v| (&v[0] - &c[0], &v[1] - &c[1])).collect();
    let half = |p: &(Rat, Rat)| if p.1 > Rat::zero() || (p.1.is_zero() && p.0 > Rat::zero()) { 0 } else { 1 };
    let mut ord = rel.clone();
    ord.sort_by(|a, b| {
        half(a).cmp(&half(b)).then_with(|| (&b.0 * &a.1).cmp(&(&a.0 * &b.1)))
    });
    let twice: Rat = (0..ord.len())
        .map(|i| {
            let (a, b) = (&ord[i], &ord[(i + 1) % ord.len()]);
            &a.0 * &b.1 - &a.1 * &b.0
        })
        .sum();
    twice / int(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_is_idempotent(b in body(3)) {
        prop_assert_eq!(hull(b.vertices()).unwrap(), b);
    }

    #[test]
    fn planar_volume_matches_shoelace(b in body(2)) {
        let expect = if b.is_full_dimensional() { shoelace(b.vertices()) } else { Rat::zero() };
        prop_assert_eq!(b.volume(), expect);
    }

    #[test]
    fn volume_scales_and_translates(b in body(3), t in 1i64..4, s in prop::collection::vec(-3i64..3, 3)) {
        let scaled = b.scale(&rat(t, 2)).unwrap();
        prop_assert_eq!(scaled.volume(), b.volume() * pow(&rat(t, 2), 3));
        prop_assert_eq!(b.translate(&QVec::from_ints(&s)).unwrap().volume(), b.volume());
    }

    #[test]
    fn facets_recover_vertices(b in body(3)) {
        prop_assume!(b.is_full_dimensional());
        let sys = HalfspaceSystem::new(3, b.halfspaces()).unwrap();
        prop_assert_eq!(sys.to_body().unwrap(), Some(b));
    }

    #[test]
    fn support_is_additive(k in body(2), l in body(2), u in prop::collection::vec(-3i64..=3, 2)) {
        let u = QVec::from_ints(&u);
        let sum = minkowski_sum(&k, &l).unwrap();
        prop_assert_eq!(sum.support(&u).unwrap(), k.support(&u).unwrap() + l.support(&u).unwrap());
    }

    #[test]
    fn body_json_roundtrip(b in body(2)) {
        let text = to_json(&BodyJson::from_body(&b));
        let back: BodyJson = from_json(&text).unwrap();
        prop_assert_eq!(back.to_body().unwrap(), b);
    }
}
