use std::cmp::Ordering;
use std::fmt;

use super::field::{Elem, Field};
use super::int::{self, egcd, gcd};
use crate::error::{domain, Error, Result};

pub const DEFAULT_NORM_BOUND: u128 = 10_000_000;

/// Integral ideal in Hermite normal form: Z-basis {a, b + c·ω}, 0 <= b < a, c | a, c | b.
/// Over Q the ideal is aZ with b = 0, c = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    pub dsq: i64,
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Ord for Ideal {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.norm(), self.a, self.b, self.c).cmp(&(o.norm(), o.a, o.b, o.c))
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dsq == 1 {
            write!(f, "({})", self.a)
        } else {
            write!(f, "[{}, {}+{}w]", self.a, self.b, self.c)
        }
    }
}

fn hnf(dsq: i64, vecs: &[(i128, i128)]) -> Ideal {
    let mut xonly = 0i128;
    let mut pivot: Option<(i128, i128)> = None;
    for &(x, y) in vecs {
        if y == 0 {
            xonly = gcd(xonly, x);
            continue;
        }
        match pivot {
            None => pivot = Some((x, y)),
            Some((x0, y0)) => {
                let (g, s, t) = egcd(y0, y);
                let nx = s * x0 + t * x;
                let ox = (y / g) * x0 - (y0 / g) * x;
                xonly = gcd(xonly, ox);
                pivot = Some(if xonly != 0 { (nx.rem_euclid(xonly), g) } else { (nx, g) });
            }
        }
    }
    let (px, py) = pivot.unwrap_or((0, 0));
    assert!(xonly != 0 && py != 0 || dsq == 1, "degenerate lattice");
    if dsq == 1 {
        return Ideal { dsq, a: gcd(xonly, px).abs(), b: 0, c: 1 };
    }
    let (px, py) = if py < 0 { (-px, -py) } else { (px, py) };
    Ideal { dsq, a: xonly.abs(), b: px.rem_euclid(xonly.abs()), c: py }
}

impl Ideal {
    pub fn unit(dsq: i64) -> Ideal {
        Ideal { dsq, a: 1, b: 0, c: 1 }
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1 && self.c == 1
    }

    pub fn basis(&self) -> [Elem; 2] {
        if self.dsq == 1 {
            return [Elem::int(self.a), Elem::int(self.a)];
        }
        [Elem::int(self.a), Elem::new(self.b, self.c)]
    }

    pub fn principal(k: &Field, x: Elem) -> Ideal {
        Ideal::from_generators(k, &[x])
    }

    pub fn rational(k: &Field, n: i128) -> Ideal {
        Ideal::principal(k, Elem::int(n))
    }

    pub fn from_generators(k: &Field, gens: &[Elem]) -> Ideal {
        let mut v = Vec::with_capacity(2 * gens.len());
        for &g in gens {
            if g.is_zero() {
                continue;
            }
            v.push((g.a, g.b));
            if k.d == 2 {
                let gw = k.mul(g, Elem::new(0, 1));
                v.push((gw.a, gw.b));
            }
        }
        assert!(!v.is_empty(), "zero ideal");
        hnf(k.dsq, &v)
    }

    fn check(&self, o: &Ideal) -> Result<()> {
        if self.dsq != o.dsq {
            return domain(format!("ideals from different fields (D={} vs D={})", self.dsq, o.dsq));
        }
        Ok(())
    }

    pub fn try_mul(&self, k: &Field, o: &Ideal) -> Result<Ideal> {
        self.check(o)?;
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in o.basis() {
                gens.push(k.checked_mul(x, y)?);
            }
        }
        if k.d == 1 {
            return Ok(Ideal { dsq: 1, a: self.a * o.a, b: 0, c: 1 });
        }
        Ok(hnf(k.dsq, &gens.iter().map(|g| (g.a, g.b)).collect::<Vec<_>>()))
    }

    pub fn mul(&self, k: &Field, o: &Ideal) -> Ideal {
        self.try_mul(k, o).expect("ideal product")
    }

    pub fn pow(&self, k: &Field, e: u32) -> Ideal {
        let mut r = Ideal::unit(self.dsq);
        for _ in 0..e {
            r = r.mul(k, self);
        }
        r
    }

    /// a + b, the gcd.
    pub fn try_gcd(&self, o: &Ideal) -> Result<Ideal> {
        self.check(o)?;
        let v: Vec<_> = self.basis().iter().chain(o.basis().iter()).map(|e| (e.a, e.b)).collect();
        Ok(hnf(self.dsq, &v))
    }

    pub fn gcd(&self, o: &Ideal) -> Ideal {
        self.try_gcd(o).expect("ideal gcd")
    }

    /// a ∩ b via factorization.
    pub fn try_lcm(&self, k: &Field, o: &Ideal) -> Result<Ideal> {
        self.check(o)?;
        let fa = self.factor(k)?;
        let fb = o.factor(k)?;
        let mut out = fa.clone();
        for (p, e) in fb {
            match out.iter_mut().find(|(q, _)| q.ideal == p.ideal) {
                Some(slot) => slot.1 = slot.1.max(e),
                None => out.push((p, e)),
            }
        }
        Ok(product(k, &out))
    }

    pub fn lcm(&self, k: &Field, o: &Ideal) -> Ideal {
        self.try_lcm(k, o).expect("ideal lcm")
    }

    pub fn contains(&self, x: Elem) -> bool {
        if self.dsq == 1 {
            return x.b == 0 && x.a % self.a == 0;
        }
        if x.b % self.c != 0 {
            return false;
        }
        let q = x.b / self.c;
        (x.a - q * self.b) % self.a == 0
    }

    /// self | o, i.e. o ⊂ self.
    pub fn divides(&self, o: &Ideal) -> bool {
        self.dsq == o.dsq && o.basis().iter().all(|&e| self.contains(e))
    }

    pub fn conj(&self, k: &Field) -> Ideal {
        if k.d == 1 {
            return *self;
        }
        let v: Vec<_> = self.basis().iter().map(|&e| k.conj(e)).map(|e| (e.a, e.b)).collect();
        hnf(k.dsq, &v)
    }

    fn div_int(&self, p: i128) -> Ideal {
        debug_assert!(self.a % p == 0 && self.b % p == 0 && (self.dsq == 1 || self.c % p == 0));
        if self.dsq == 1 {
            Ideal { a: self.a / p, ..*self }
        } else {
            Ideal { dsq: self.dsq, a: self.a / p, b: self.b / p, c: self.c / p }
        }
    }

    /// self · p^{-1}, assuming p | self.
    pub fn div_prime(&self, k: &Field, p: &PrimeIdeal) -> Ideal {
        let pp = p.p as i128;
        match (k.d, p.kind()) {
            (1, _) | (_, PrimeKind::Inert) => self.div_int(pp),
            (_, PrimeKind::Ramified) => self.mul(k, &p.ideal).div_int(pp),
            (_, PrimeKind::Split) => self.mul(k, &p.ideal.conj(k)).div_int(pp),
        }
    }

    pub fn valuation(&self, k: &Field, p: &PrimeIdeal) -> u32 {
        let mut v = 0;
        let mut cur = *self;
        while p.ideal.divides(&cur) {
            cur = cur.div_prime(k, p);
            v += 1;
        }
        v
    }

    pub fn factor_bounded(&self, k: &Field, bound: u128) -> Result<Factorization> {
        let n = self.norm();
        if n as u128 > bound {
            return Err(Error::OverBound { norm: n as u128, bound });
        }
        let mut out = Vec::new();
        let mut cur = *self;
        for (p, _) in int::factor_u64(n as u64) {
            for pr in primes_above(k, p) {
                let mut e = 0;
                while pr.ideal.divides(&cur) {
                    cur = cur.div_prime(k, &pr);
                    e += 1;
                }
                if e > 0 {
                    out.push((pr, e));
                }
            }
        }
        debug_assert!(cur.is_unit());
        out.sort_by(|x, y| x.0.ideal.cmp(&y.0.ideal));
        Ok(out)
    }

    pub fn factor(&self, k: &Field) -> Result<Factorization> {
        self.factor_bounded(k, DEFAULT_NORM_BOUND)
    }

    /// self / o when o | self.
    pub fn div_exact(&self, k: &Field, o: &Ideal) -> Option<Ideal> {
        if !o.divides(self) {
            return None;
        }
        let mut cur = *self;
        for (p, e) in o.factor(k).ok()? {
            for _ in 0..e {
                cur = cur.div_prime(k, &p);
            }
        }
        Some(cur)
    }
}

pub type Factorization = Vec<(PrimeIdeal, u32)>;

pub fn product(k: &Field, f: &[(PrimeIdeal, u32)]) -> Ideal {
    let mut r = Ideal::unit(k.dsq);
    for (p, e) in f {
        r = r.mul(k, &p.ideal.pow(k, *e));
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// Prime ideal with its two-element representation (p, gen2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub f: u32,
    pub e: u32,
    pub ideal: Ideal,
    pub gen2: Elem,
    /// number of primes above p
    pub g: u32,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f)
    }
    pub fn kind(&self) -> PrimeKind {
        if self.e == 2 {
            PrimeKind::Ramified
        } else if self.f == 2 {
            PrimeKind::Inert
        } else {
            PrimeKind::Split
        }
    }
}

fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    let (a, pp) = (a as u128, p as u128);
    if int::powmod(a, (pp - 1) / 2, pp) != 1 {
        return None;
    }
    let (mut q, mut s) = (pp - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u128;
    while int::powmod(z, (pp - 1) / 2, pp) != pp - 1 {
        z += 1;
    }
    let (mut m, mut c, mut t, mut r) = (s, int::powmod(z, q, pp), int::powmod(a, q, pp), int::powmod(a, (q + 1) / 2, pp));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % pp;
            i += 1;
        }
        let b = int::powmod(c, 1u128 << (m - i - 1), pp);
        m = i;
        c = b * b % pp;
        t = t * c % pp;
        r = r * b % pp;
    }
    Some(r as u64)
}

/// Prime ideals above the rational prime p, sorted by HNF.
pub fn primes_above(k: &Field, p: u64) -> Vec<PrimeIdeal> {
    let pi = p as i128;
    if k.d == 1 {
        let id = Ideal { dsq: 1, a: pi, b: 0, c: 1 };
        return vec![PrimeIdeal { p, f: 1, e: 1, ideal: id, gen2: Elem::int(pi), g: 1 }];
    }
    let kr = int::kronecker_prime(k.disc as i128, p);
    if kr == -1 {
        let id = Ideal { dsq: k.dsq, a: pi, b: 0, c: pi };
        return vec![PrimeIdeal { p, f: 2, e: 1, ideal: id, gen2: Elem::int(pi), g: 1 }];
    }
    // roots of x² - t x - n mod p
    let mut roots: Vec<i128> = if p == 2 {
        (0..2).filter(|&r: &i128| (r * r - k.t * r - k.n).rem_euclid(2) == 0).collect()
    } else {
        let s = sqrt_mod((k.disc as i128).rem_euclid(pi) as u64, p).expect("residue") as i128;
        let inv2 = (pi + 1) / 2;
        let mut v = vec![((k.t + s) * inv2).rem_euclid(pi), ((k.t - s) * inv2).rem_euclid(pi)];
        v.dedup();
        v
    };
    roots.sort();
    let (e, g) = if kr == 0 { (2, 1) } else { (1, 2) };
    let mut out: Vec<PrimeIdeal> = roots
        .iter()
        .map(|&r| {
            let id = Ideal { dsq: k.dsq, a: pi, b: (-r).rem_euclid(pi), c: 1 };
            PrimeIdeal { p, f: 1, e, ideal: id, gen2: Elem::new(-r, 1), g }
        })
        .collect();
    out.sort_by(|x, y| x.ideal.cmp(&y.ideal));
    out
}

/// All prime ideals of norm <= x, sorted by (norm, HNF).
pub fn primes_up_to(k: &Field, x: u64) -> Vec<PrimeIdeal> {
    let mut out = Vec::new();
    for p in int::primes_up_to(x) {
        for pr in primes_above(k, p) {
            if pr.norm() <= x {
                out.push(pr);
            }
        }
    }
    out.sort_by(|a, b| a.ideal.cmp(&b.ideal));
    out
}

/// All integral ideals of norm <= x with their factorizations, sorted by (norm, HNF).
pub fn ideals_up_to(k: &Field, x: u64) -> Vec<(Ideal, Factorization)> {
    let primes = primes_up_to(k, x);
    let mut out = vec![(Ideal::unit(k.dsq), Vec::new())];
    fn rec(
        k: &Field,
        primes: &[PrimeIdeal],
        start: usize,
        cur: Ideal,
        norm: u64,
        fact: &mut Factorization,
        x: u64,
        out: &mut Vec<(Ideal, Factorization)>,
    ) {
        for i in start..primes.len() {
            let pn = primes[i].norm();
            if norm * pn > x {
                break;
            }
            let mut nn = norm;
            let mut id = cur;
            let mut e = 0;
            while nn * pn <= x {
                nn *= pn;
                id = id.mul(k, &primes[i].ideal);
                e += 1;
                fact.push((primes[i], e));
                out.push((id, fact.clone()));
                rec(k, primes, i + 1, id, nn, fact, x, out);
                fact.pop();
            }
        }
    }
    let mut fact = Vec::new();
    rec(k, &primes, 0, Ideal::unit(k.dsq), 1, &mut fact, x, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// (μ, φ, τ) of an integral ideal from its factorization.
pub fn arith_functions(f: &[(PrimeIdeal, u32)]) -> (i64, u128, u64) {
    let mut mu = 1i64;
    let mut phi = 1u128;
    let mut tau = 1u64;
    for (p, e) in f {
        let n = p.norm() as u128;
        mu = if *e > 1 { 0 } else { -mu };
        phi *= n.pow(*e) - n.pow(*e - 1);
        tau *= *e as u64 + 1;
    }
    (mu, phi, tau)
}

pub fn ideal_norm_of(f: &[(PrimeIdeal, u32)]) -> u128 {
    f.iter().map(|(p, e)| (p.norm() as u128).pow(*e)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ops() {
        let q = Field::rationals();
        let i4 = Ideal::rational(&q, 4);
        let i6 = Ideal::rational(&q, 6);
        assert_eq!(i4.gcd(&i6), Ideal::rational(&q, 2));
        assert_eq!(Ideal::rational(&q, 2).lcm(&q, &Ideal::rational(&q, 3)), i6);
        let f = i6.factor(&q).unwrap();
        assert_eq!(f.iter().map(|(p, e)| (p.p, *e)).collect::<Vec<_>>(), vec![(2, 1), (3, 1)]);
        let f12 = Ideal::rational(&q, 12).factor(&q).unwrap();
        assert_eq!(arith_functions(&f12), (0, 4, 6));
    }

    #[test]
    fn sqrt5_primes() {
        let k = Field::new(5).unwrap();
        let r5 = Ideal::principal(&k, k.delta);
        assert_eq!(r5.mul(&k, &r5), Ideal::rational(&k, 5));
        let two = primes_above(&k, 2);
        assert_eq!(two.len(), 1);
        assert_eq!((two[0].kind(), two[0].norm()), (PrimeKind::Inert, 4));
        let f2 = arith_functions(&Ideal::rational(&k, 2).factor(&k).unwrap());
        assert_eq!((f2.1, f2.2), (3, 2));
        let eleven = primes_above(&k, 11);
        assert_eq!(eleven.len(), 2);
        // (4 + √5) = (3 + 2ω)
        let g = Elem::new(3, 2);
        assert_eq!(k.norm(g), 11);
        let pg = Ideal::principal(&k, g);
        assert!(eleven.iter().any(|p| p.ideal == pg));
        assert_eq!(pg.mul(&k, &pg.conj(&k)), Ideal::rational(&k, 11));
        let f11 = Ideal::rational(&k, 11).factor(&k).unwrap();
        assert_eq!(f11.len(), 2);
        assert!(f11.iter().all(|(p, e)| p.norm() == 11 && *e == 1));
    }

    #[test]
    fn ideal_counts_and_factorization_roundtrip() {
        for d in [1, 2, 5, 13] {
            let k = Field::new(d).unwrap();
            let ids = ideals_up_to(&k, 300);
            for (id, f) in &ids {
                assert_eq!(&product(&k, f), id);
                assert_eq!(id.norm() as u128, ideal_norm_of(f));
                let mut g = id.factor(&k).unwrap();
                g.sort_by(|x, y| x.0.ideal.cmp(&y.0.ideal));
                let mut h = f.clone();
                h.sort_by(|x, y| x.0.ideal.cmp(&y.0.ideal));
                assert_eq!(g, h);
            }
            // distinct
            let mut v: Vec<_> = ids.iter().map(|x| x.0).collect();
            v.dedup();
            assert_eq!(v.len(), ids.len());
        }
    }

    #[test]
    fn mixed_fields_rejected() {
        let q = Field::rationals();
        let k = Field::new(5).unwrap();
        let a = Ideal::rational(&q, 2);
        let b = Ideal::rational(&k, 2);
        assert!(a.try_gcd(&b).is_err());
        assert!(a.try_mul(&k, &b).is_err());
    }

    #[test]
    fn generators() {
        let k = Field::new(5).unwrap();
        for (id, _) in ideals_up_to(&k, 200) {
            let g = k.canonical_generator(&id).unwrap();
            assert_eq!(Ideal::principal(&k, g), id);
            assert!(k.is_totally_positive(g));
        }
        let k3 = Field::new(3).unwrap();
        // (√3) has no totally positive generator
        let r3 = Ideal::principal(&k3, Elem::new(0, 1));
        let g = k3.canonical_generator(&r3).unwrap();
        assert_eq!(Ideal::principal(&k3, g), r3);
    }
}
