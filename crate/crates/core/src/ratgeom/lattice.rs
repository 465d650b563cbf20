use num::ToPrimitive;

use crate::rat::{ceil, floor, int, QVec, Rat};

use super::{ConvexBody, Halfspace};

/// `K ∩ Z^n` in lexicographic order, by scanning the bounding box.
pub fn integer_points(body: &ConvexBody) -> Vec<Vec<i64>> {
    let n = body.dim();
    let bounds: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let lo = body.vertices().iter().map(|v| &v[i]).min().unwrap();
            let hi = body.vertices().iter().map(|v| &v[i]).max().unwrap();
            (
                ceil(lo).to_i64().expect("coordinate fits i64"),
                floor(hi).to_i64().expect("coordinate fits i64"),
            )
        })
        .collect();
    let rows = body.halfspaces();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    scan(&bounds, &rows, &mut cur, &mut out);
    out
}

fn scan(bounds: &[(i64, i64)], rows: &[Halfspace], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let i = cur.len();
    if i == bounds.len() {
        let x: Vec<Rat> = cur.iter().map(|&c| int(c)).collect();
        if rows.iter().all(|h| h.contains(&x)) {
            out.push(cur.clone());
        }
        return;
    }
    for c in bounds[i].0..=bounds[i].1 {
        cur.push(c);
        scan(bounds, rows, cur, out);
        cur.pop();
    }
}

/// `K ∩ (Z/k)^n` in lexicographic order.
pub fn lattice_points(body: &ConvexBody, k: u32) -> Vec<QVec> {
    assert!(k >= 1, "lattice refinement must be positive");
    let kk = int(k as i64);
    let scaled = body.scale(&kk).expect("positive scale");
    let inv = Rat::from_integer(1.into()) / kk;
    integer_points(&scaled)
        .into_iter()
        .map(|p| QVec::from_ints(&p).scaled(&inv))
        .collect()
}
