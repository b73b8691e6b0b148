use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use super::field::{Elem, Field};
use super::ideal::Ideal;
use crate::error::{domain, Result};

const CANDIDATE_LIMIT: i128 = 200_000_000;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite bound")
}

/// Decides lo <= σ_j(x) <= hi (and σ_j(x) > 0 if `pos`), exactly near the edges.
struct BoxTest<'a> {
    k: &'a Field,
    bx: &'a [(f64, f64)],
    lo: Vec<BigRational>,
    hi: Vec<BigRational>,
    wmax: f64,
    pos: bool,
}

impl<'a> BoxTest<'a> {
    fn new(k: &'a Field, bx: &'a [(f64, f64)], pos: bool) -> Self {
        BoxTest {
            k,
            bx,
            lo: bx.iter().map(|b| rat(b.0)).collect(),
            hi: bx.iter().map(|b| rat(b.1)).collect(),
            wmax: k.omega[0].abs().max(k.omega[1].abs()).max(1.0),
            pos,
        }
    }

    fn inside(&self, x: Elem) -> bool {
        let tol = 1e-13 * (x.a.abs() as f64 + x.b.abs() as f64 * self.wmax + 1.0);
        for j in 0..self.k.d {
            let v = self.k.embed_j(x, j);
            let (lo, hi) = self.bx[j];
            let lo_eff = if self.pos { lo.max(0.0) } else { lo };
            if v < lo_eff - tol || v > hi + tol {
                return false;
            }
            if v > lo_eff + tol && v < hi - tol {
                continue;
            }
            if self.k.cmp_embedding(x, j, &self.lo[j]) == Ordering::Less
                || self.k.cmp_embedding(x, j, &self.hi[j]) == Ordering::Greater
            {
                return false;
            }
            if self.pos && self.k.cmp_embedding(x, j, &BigRational::zero()) != Ordering::Greater {
                return false;
            }
        }
        true
    }
}

/// Elements of `y` whose embedding vector lies in the closed box, in lexicographic
/// coordinate order. With `totally_positive` only elements with all σ_j > 0 are kept.
pub fn enumerate_in_box(k: &Field, y: &Ideal, bx: &[(f64, f64)], totally_positive: bool) -> Result<Vec<Elem>> {
    if bx.len() != k.d {
        return domain(format!("box has {} intervals, field degree is {}", bx.len(), k.d));
    }
    if bx.iter().any(|b| !b.0.is_finite() || !b.1.is_finite()) {
        return domain("unbounded box");
    }
    if bx.iter().any(|b| b.0 > b.1) {
        return Ok(Vec::new());
    }
    let test = BoxTest::new(k, bx, totally_positive);
    let mut out = Vec::new();
    let a = y.a as f64;
    if k.d == 1 {
        let (lo, hi) = bx[0];
        let m0 = (lo / a).floor() as i128 - 1;
        let m1 = (hi / a).ceil() as i128 + 1;
        if m1 - m0 > CANDIDATE_LIMIT {
            return domain("box too large");
        }
        for m in m0..=m1 {
            let x = Elem::int(m * y.a);
            if test.inside(x) {
                out.push(x);
            }
        }
        return Ok(out);
    }
    let (b, c) = (y.b as f64, y.c as f64);
    let sd = k.sqrt_disc;
    let n0 = ((bx[0].0 - bx[1].1) / (c * sd)).floor() as i128 - 1;
    let n1 = ((bx[0].1 - bx[1].0) / (c * sd)).ceil() as i128 + 1;
    if n1 - n0 > CANDIDATE_LIMIT {
        return domain("box too large");
    }
    for n in n0..=n1 {
        let nf = n as f64;
        let mut mlo = f64::NEG_INFINITY;
        let mut mhi = f64::INFINITY;
        for j in 0..2 {
            let off = nf * (b + c * k.omega[j]);
            mlo = mlo.max((bx[j].0 - off) / a);
            mhi = mhi.min((bx[j].1 - off) / a);
        }
        if mlo > mhi + 2.0 {
            continue;
        }
        let m0 = mlo.floor() as i128 - 1;
        let m1 = mhi.ceil() as i128 + 1;
        for m in m0..=m1 {
            let x = Elem::new(m * y.a + n * y.b, n * y.c);
            if test.inside(x) {
                out.push(x);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let k = Field::new(5).unwrap();
        let o = Ideal::unit(5);
        let v = enumerate_in_box(&k, &o, &[(1.0, 3.0), (1.0, 3.0)], false).unwrap();
        assert_eq!(v, vec![Elem::int(1), Elem::int(2), Elem::int(3)]);
        assert!(enumerate_in_box(&k, &o, &[(2.0, 1.0), (1.0, 3.0)], false).unwrap().is_empty());
        let q = Field::rationals();
        let v = enumerate_in_box(&q, &Ideal::rational(&q, 2), &[(1.0, 7.0)], false).unwrap();
        assert_eq!(v, vec![Elem::int(2), Elem::int(4), Elem::int(6)]);
        assert!(enumerate_in_box(&q, &Ideal::unit(1), &[(0.0, f64::INFINITY)], false).is_err());
    }

    #[test]
    fn boundary_points_kept() {
        let k = Field::new(5).unwrap();
        let o = Ideal::unit(5);
        // ε² has σ = (2.618.., 0.381..); a box with ε² on its corners, computed in floats.
        let e2 = k.tp_unit;
        let s = k.embed(e2);
        let v = enumerate_in_box(&k, &o, &[(s[0], s[0]), (s[1], s[1])], true).unwrap();
        // float corners may be off by an ulp; the exact test must agree with the rational corners
        let lo0 = BigRational::from_float(s[0]).unwrap();
        let exact_in = k.cmp_embedding(e2, 0, &lo0) == Ordering::Equal;
        assert_eq!(v.contains(&e2), exact_in && k.cmp_embedding(e2, 1, &BigRational::from_float(s[1]).unwrap()) == Ordering::Equal);
        // a rational integer on the edge of the box is always exact
        let v = enumerate_in_box(&k, &o, &[(3.0, 5.0), (-1.0, 3.0)], false).unwrap();
        assert!(v.contains(&Elem::int(3)));
    }
}
