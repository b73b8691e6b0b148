use super::field::{Elem, Field};
use super::ideal::{Ideal, PrimeIdeal, DEFAULT_NORM_BOUND};
use crate::error::{Error, Result};

/// Representatives of 𝔬/c with unit flags and an inversion table.
#[derive(Clone, Debug)]
pub struct ResidueSystem {
    pub modulus: Ideal,
    pub reps: Vec<Elem>,
    pub is_unit: Vec<bool>,
    /// inverse index for units, usize::MAX otherwise
    pub inv: Vec<usize>,
    pub units: Vec<usize>,
    primes: Vec<PrimeIdeal>,
}

impl ResidueSystem {
    pub fn new(k: &Field, c: &Ideal) -> Result<Self> {
        Self::with_bound(k, c, DEFAULT_NORM_BOUND)
    }

    pub fn with_bound(k: &Field, c: &Ideal, bound: u128) -> Result<Self> {
        let n = c.norm() as u128;
        if n > bound {
            return Err(Error::OverBound { norm: n, bound });
        }
        let primes: Vec<PrimeIdeal> = c.factor_bounded(k, bound)?.into_iter().map(|x| x.0).collect();
        let n = n as usize;
        let mut reps = Vec::with_capacity(n);
        for y in 0..c.c {
            for x in 0..c.a {
                reps.push(Elem::new(x, y));
            }
        }
        let is_unit: Vec<bool> = reps.iter().map(|&r| primes.iter().all(|p| !p.ideal.contains(r))).collect();
        let units: Vec<usize> = (0..n).filter(|&i| is_unit[i]).collect();
        let mut rs = ResidueSystem { modulus: *c, reps, is_unit, inv: vec![usize::MAX; n], units, primes };
        let phi = rs.units.len() as u64;
        for &u in &rs.units.clone() {
            if rs.inv[u] != usize::MAX {
                continue;
            }
            let x = rs.pow_idx(k, u, phi - 1);
            rs.inv[u] = x;
            rs.inv[x] = u;
        }
        Ok(rs)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn phi(&self) -> usize {
        self.units.len()
    }

    pub fn reduce(&self, x: Elem) -> Elem {
        let c = &self.modulus;
        let q = x.b.div_euclid(c.c);
        let (a1, b1) = (x.a - q * c.b, x.b - q * c.c);
        Elem::new(a1.rem_euclid(c.a), b1)
    }

    pub fn index(&self, x: Elem) -> usize {
        let r = self.reduce(x);
        (r.b * self.modulus.a + r.a) as usize
    }

    pub fn mul_idx(&self, k: &Field, i: usize, j: usize) -> usize {
        self.index(k.mul(self.reps[i], self.reps[j]))
    }

    pub fn pow_idx(&self, k: &Field, i: usize, mut e: u64) -> usize {
        let mut r = self.index(Elem::ONE);
        let mut b = i;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_idx(k, r, b);
            }
            b = self.mul_idx(k, b, b);
            e >>= 1;
        }
        r
    }

    pub fn is_unit_elem(&self, x: Elem) -> bool {
        self.primes.iter().all(|p| !p.ideal.contains(x))
    }

    pub fn inverse(&self, k: &Field, x: Elem) -> Option<Elem> {
        let _ = k;
        let i = self.index(x);
        (self.inv[i] != usize::MAX).then(|| self.reps[self.inv[i]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod5_over_q() {
        let q = Field::rationals();
        let rs = ResidueSystem::new(&q, &Ideal::rational(&q, 5)).unwrap();
        assert_eq!(rs.units, vec![1, 2, 3, 4]);
        assert_eq!((rs.inv[2], rs.inv[3], rs.inv[4]), (3, 2, 4));
        let one = ResidueSystem::new(&q, &Ideal::unit(1)).unwrap();
        assert_eq!((one.len(), one.phi()), (1, 1));
    }

    #[test]
    fn gf4() {
        let k = Field::new(5).unwrap();
        let rs = ResidueSystem::new(&k, &Ideal::rational(&k, 2)).unwrap();
        assert_eq!((rs.len(), rs.phi()), (4, 3));
        for &u in &rs.units {
            assert_eq!(rs.mul_idx(&k, u, rs.inv[u]), rs.index(Elem::ONE));
        }
    }

    #[test]
    fn inversion_closed() {
        let k = Field::new(2).unwrap();
        let c = Ideal::principal(&k, Elem::new(5, 3));
        let rs = ResidueSystem::new(&k, &c).unwrap();
        assert_eq!(rs.len() as i128, c.norm());
        for &u in &rs.units {
            assert_eq!(rs.inv[rs.inv[u]], u);
            assert_eq!(rs.mul_idx(&k, u, rs.inv[u]), rs.index(Elem::ONE));
        }
    }
}
