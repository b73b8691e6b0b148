//! Kloosterman sums S(r1, r2; c) = Σ_{x x̄ ≡ 1 (c)} ψ((r1 x + r2 x̄)/(c δ)) in class number one,
//! with Weil-bound margins and the CRT factorization.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exec::{self, ksum_c, Exec};
use crate::nf::{self, arith_functions, Elem, Field, Ideal, ResidueSystem, DEFAULT_NORM_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KloostermanQuery {
    pub r1: Elem,
    pub r2: Elem,
    pub c: Elem,
}

/// Residues mod (c) with their inverses, reusable across (r1, r2).
#[derive(Clone, Debug)]
pub struct KloostermanTable {
    pub c: Elem,
    pub c_delta: Elem,
    pub c_ideal: Ideal,
    rs: ResidueSystem,
}

impl KloostermanTable {
    pub fn new(k: &Field, c: Elem) -> Result<Self> {
        Self::with_bound(k, c, DEFAULT_NORM_BOUND)
    }

    pub fn with_bound(k: &Field, c: Elem, bound: u128) -> Result<Self> {
        if k.class_number != 1 {
            return Err(Error::ClassNumber(k.class_number));
        }
        if c.is_zero() {
            return domain("modulus must be nonzero");
        }
        let c_ideal = Ideal::principal(k, c);
        let rs = ResidueSystem::with_bound(k, &c_ideal, bound)?;
        Ok(KloostermanTable { c, c_delta: k.mul(c, k.delta), c_ideal, rs })
    }

    pub fn sum(&self, k: &Field, r1: Elem, r2: Elem) -> Complex64 {
        ksum_c(self.rs.units.iter().map(|&u| {
            let x = self.rs.reps[u];
            let xb = self.rs.reps[self.rs.inv[u]];
            let num = k.add(k.mul(r1, x), k.mul(r2, xb));
            nf::psi_quotient(k, self.rs.reduce(num), self.c_delta)
        }))
    }

    pub fn inverse(&self, k: &Field, x: Elem) -> Option<Elem> {
        self.rs.inverse(k, x)
    }
}

pub fn kloosterman_sum(k: &Field, q: &KloostermanQuery) -> Result<Complex64> {
    Ok(KloostermanTable::new(k, q.c)?.sum(k, q.r1, q.r2))
}

#[derive(Clone, Copy, Debug)]
pub struct WeilMargin {
    pub s: Complex64,
    pub tau: u64,
    pub gcd_norm: u128,
    pub c_norm: u128,
    /// |S| / (τ(c) √N(gcd) √N(c))
    pub margin: f64,
}

fn weil_from(k: &Field, tab: &KloostermanTable, r1: Elem, r2: Elem, s: Complex64) -> Result<WeilMargin> {
    let fac = tab.c_ideal.factor(k)?;
    let (_, _, tau) = arith_functions(&fac);
    let mut g = tab.c_ideal;
    for r in [r1, r2] {
        if !r.is_zero() {
            g = g.gcd(&Ideal::principal(k, r));
        }
    }
    let c_norm = tab.c_ideal.norm() as u128;
    let gcd_norm = g.norm() as u128;
    let margin = s.norm() / (tau as f64 * (gcd_norm as f64).sqrt() * (c_norm as f64).sqrt());
    Ok(WeilMargin { s, tau, gcd_norm, c_norm, margin })
}

pub fn weil_margin(k: &Field, q: &KloostermanQuery) -> Result<WeilMargin> {
    let tab = KloostermanTable::new(k, q.c)?;
    let s = tab.sum(k, q.r1, q.r2);
    weil_from(k, &tab, q.r1, q.r2, s)
}

/// S(r1, r2; c1 c2) = S(r1 c̄2², r2; c1) S(r1 c̄1², r2; c2) for coprime c1, c2.
pub fn kloosterman_crt(k: &Field, r1: Elem, r2: Elem, c1: Elem, c2: Elem) -> Result<Complex64> {
    let t1 = KloostermanTable::new(k, c1)?;
    let t2 = KloostermanTable::new(k, c2)?;
    if !t1.c_ideal.gcd(&t2.c_ideal).is_unit() {
        return domain("moduli are not coprime");
    }
    let inv = |t: &KloostermanTable, x: Elem| -> Result<Elem> {
        t.inverse(k, x).ok_or_else(|| Error::Domain("moduli are not coprime".into()))
    };
    let c2b = inv(&t1, c2)?;
    let c1b = inv(&t2, c1)?;
    let a = t1.sum(k, k.mul(r1, k.mul(c2b, c2b)), r2);
    let b = t2.sum(k, k.mul(r1, k.mul(c1b, c1b)), r2);
    Ok(a * b)
}

/// Split c into two coprime nonunit factors c = c1 c2, if it has two distinct prime factors.
pub fn coprime_split(k: &Field, c: Elem) -> Result<Option<(Elem, Elem)>> {
    let ci = Ideal::principal(k, c);
    let fac = ci.factor(k)?;
    if fac.len() < 2 {
        return Ok(None);
    }
    let first = nf::product(k, &fac[..1]);
    let c1 = k.find_generator(&first).ok_or(Error::ClassNumber(k.class_number))?;
    let c2 = k.div_exact(c, c1).ok_or_else(|| Error::Domain("generator does not divide c".into()))?;
    Ok(Some((c1, c2)))
}

/// One generator per nonzero principal ideal of norm ≤ nmax (canonical generators), by norm.
pub fn moduli_up_to(k: &Field, nmax: u64) -> Result<Vec<Elem>> {
    if k.class_number != 1 {
        return Err(Error::ClassNumber(k.class_number));
    }
    nf::ideals_up_to(k, nmax)
        .into_iter()
        .map(|(id, _)| k.canonical_generator(&id).ok_or(Error::ClassNumber(k.class_number)))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub c: Elem,
    pub r1: Elem,
    pub r2: Elem,
    pub weil: WeilMargin,
}

/// S and its Weil margin for every modulus of norm ≤ nmax and every (r1, r2) pair;
/// moduli are processed concurrently under `Exec::Parallel`.
pub fn sweep(k: &Field, nmax: u64, pairs: &[(Elem, Elem)], exec: Exec) -> Result<Vec<SweepRow>> {
    let moduli = moduli_up_to(k, nmax)?;
    let per = exec::map(exec, &moduli, |&c| -> Result<Vec<SweepRow>> {
        let tab = KloostermanTable::new(k, c)?;
        pairs
            .iter()
            .map(|&(r1, r2)| {
                let s = tab.sum(k, r1, r2);
                Ok(SweepRow { c, r1, r2, weil: weil_from(k, &tab, r1, r2, s)? })
            })
            .collect()
    });
    let mut out = Vec::new();
    for rows in per {
        out.extend(rows?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn classical(m: i64, n: i64, c: i64) -> Complex64 {
        // independent oracle: brute-force inverse search over Z/c
        let mut s = Complex64::new(0.0, 0.0);
        for x in 0..c {
            if num_integer::Integer::gcd(&x, &c) != 1 {
                continue;
            }
            let xb = (0..c).find(|&y| (x * y) % c == 1 % c).unwrap();
            s += Complex64::from_polar(1.0, 2.0 * PI * ((m * x + n * xb) as f64) / c as f64);
        }
        s
    }

    #[test]
    fn examples() {
        let q = Field::rationals();
        let s = kloosterman_sum(&q, &KloostermanQuery { r1: Elem::int(1), r2: Elem::int(1), c: Elem::int(5) }).unwrap();
        assert!((s.re - (2.0 + 2.0 * (4.0 * PI / 5.0).cos())).abs() < 1e-12 && s.im.abs() < 1e-12);
        let one = kloosterman_sum(&q, &KloostermanQuery { r1: Elem::int(1), r2: Elem::int(1), c: Elem::int(1) }).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let w = weil_margin(&q, &KloostermanQuery { r1: Elem::int(1), r2: Elem::int(1), c: Elem::int(5) }).unwrap();
        assert!((w.margin - 0.381966011250105 / (2.0 * 5f64.sqrt())).abs() < 1e-12);
        let k = Field::new(5).unwrap();
        let sqrt5 = k.delta;
        let s = kloosterman_sum(&k, &KloostermanQuery { r1: Elem::ONE, r2: Elem::ONE, c: sqrt5 }).unwrap();
        assert!((s.re - (2.0 + 2.0 * (2.0 * PI / 5.0).cos())).abs() < 1e-12, "{s}");
        assert!((s - classical(2, 2, 5)).norm() < 1e-12);
    }

    #[test]
    fn matches_classical_oracle() {
        let q = Field::rationals();
        for c in 1..60 {
            for (m, n) in [(1, 1), (2, 3), (0, 0), (0, 5), (6, 4)] {
                let s = kloosterman_sum(&q, &KloostermanQuery { r1: Elem::int(m as i128), r2: Elem::int(n as i128), c: Elem::int(c as i128) })
                    .unwrap();
                assert!((s - classical(m, n, c)).norm() < 1e-10, "S({m},{n};{c})");
            }
        }
    }

    #[test]
    fn realness_and_crt() {
        let k = Field::new(5).unwrap();
        for c in moduli_up_to(&k, 200).unwrap() {
            let tab = KloostermanTable::new(&k, c).unwrap();
            let s = tab.sum(&k, Elem::new(1, 1), Elem::new(2, 0));
            assert!(s.im.abs() < 1e-10);
            if let Some((c1, c2)) = coprime_split(&k, c).unwrap() {
                let p = kloosterman_crt(&k, Elem::new(1, 1), Elem::new(2, 0), c1, c2).unwrap();
                assert!((p - s).norm() < 1e-9, "c={c:?}: {p} vs {s}");
            }
        }
    }

    #[test]
    fn ramanujan_zero() {
        let k = Field::new(5).unwrap();
        for c in moduli_up_to(&k, 100).unwrap() {
            let s = KloostermanTable::new(&k, c).unwrap().sum(&k, Elem::ZERO, Elem::ZERO);
            let (_, phi, _) = arith_functions(&Ideal::principal(&k, c).factor(&k).unwrap());
            assert!((s.re - phi as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_parallel_matches_sequential() {
        let k = Field::new(5).unwrap();
        let pairs = [(Elem::ONE, Elem::int(2))];
        let a = sweep(&k, 150, &pairs, Exec::Parallel).unwrap();
        let b = sweep(&k, 150, &pairs, Exec::Sequential).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.weil.s, y.weil.s);
        }
        assert!(a.iter().all(|r| r.weil.margin <= 1.0 + 1e-9));
    }
}
