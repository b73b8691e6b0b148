use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ideal::Ideal;
use super::int::{self, isqrt};
use crate::error::{domain, Error, Result};

/// Element a + b·ω of the ring of integers. Over Q, b is always 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem {
    pub a: i128,
    pub b: i128,
}

impl Elem {
    pub const ZERO: Elem = Elem { a: 0, b: 0 };
    pub const ONE: Elem = Elem { a: 1, b: 0 };

    pub fn new(a: i128, b: i128) -> Self {
        Elem { a, b }
    }
    pub fn int(a: i128) -> Self {
        Elem { a, b: 0 }
    }
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

#[derive(Clone, Debug)]
pub struct FieldOptions {
    pub allow_nonprincipal: bool,
    /// Largest Minkowski bound for which the class group is enumerated.
    pub class_bound: u64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions { allow_nonprincipal: false, class_bound: 1_000_000 }
    }
}

/// Q (D = 1) or the real quadratic field Q(√D).
#[derive(Clone, Debug)]
pub struct Field {
    pub d: usize,
    pub dsq: i64,
    pub disc: i64,
    /// ω² = t·ω + n
    pub t: i128,
    pub n: i128,
    pub sqrt_disc: f64,
    pub omega: [f64; 2],
    pub eps: Elem,
    pub eps_norm: i128,
    /// Generator of the totally positive units.
    pub tp_unit: Elem,
    pub class_number: u64,
    pub regulator: f64,
    /// √D_K, the canonical generator f'(ω) of the different.
    pub delta: Elem,
    pub different: Ideal,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.dsq == other.dsq
    }
}

impl Field {
    pub fn rationals() -> Field {
        Field::new(1).expect("Q")
    }

    pub fn new(dsq: i64) -> Result<Field> {
        Field::with_options(dsq, &FieldOptions::default())
    }

    pub fn with_options(dsq: i64, opts: &FieldOptions) -> Result<Field> {
        if dsq < 1 {
            return domain(format!("D = {dsq} must be positive"));
        }
        if !int::is_squarefree(dsq as u64) {
            return domain(format!("D = {dsq} is not squarefree"));
        }
        if dsq == 1 {
            return Ok(Field {
                d: 1,
                dsq: 1,
                disc: 1,
                t: 0,
                n: 0,
                sqrt_disc: 1.0,
                omega: [0.0, 0.0],
                eps: Elem::int(-1),
                eps_norm: -1,
                tp_unit: Elem::ONE,
                class_number: 1,
                regulator: 0.0,
                delta: Elem::ONE,
                different: Ideal::unit(1),
            });
        }
        let (t, n, disc) = if dsq % 4 == 1 {
            (1i128, (dsq as i128 - 1) / 4, dsq)
        } else {
            (0i128, dsq as i128, 4 * dsq)
        };
        let sd = (dsq as f64).sqrt();
        let omega = if t == 1 { [(1.0 + sd) / 2.0, (1.0 - sd) / 2.0] } else { [sd, -sd] };
        let delta = if t == 1 { Elem::new(-1, 2) } else { Elem::new(0, 2) };
        let mut f = Field {
            d: 2,
            dsq,
            disc,
            t,
            n,
            sqrt_disc: (disc as f64).sqrt(),
            omega,
            eps: Elem::ONE,
            eps_norm: 1,
            tp_unit: Elem::ONE,
            class_number: 0,
            regulator: 0.0,
            delta,
            different: Ideal::unit(dsq),
        };
        f.eps = f.fundamental_unit()?;
        f.eps_norm = f.norm(f.eps);
        f.tp_unit = if f.eps_norm == 1 { f.eps } else { f.mul(f.eps, f.eps) };
        f.regulator = f.embed_j(f.eps, 0).ln();
        f.different = Ideal::principal(&f, delta);
        f.class_number = f.compute_class_number(opts.class_bound)?;
        if f.class_number != 1 && !opts.allow_nonprincipal {
            return Err(Error::ClassNumber(f.class_number));
        }
        Ok(f)
    }

    pub fn is_rational(&self) -> bool {
        self.d == 1
    }

    pub fn elem(&self, a: i128, b: i128) -> Elem {
        debug_assert!(self.d == 2 || b == 0);
        Elem { a, b }
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if self.d == 1 {
            return Elem::int(x.a * y.a);
        }
        let bd = x.b * y.b;
        Elem { a: x.a * y.a + bd * self.n, b: x.a * y.b + x.b * y.a + bd * self.t }
    }

    pub fn checked_mul(&self, x: Elem, y: Elem) -> Result<Elem> {
        let ov = || Error::Overflow("element product");
        if self.d == 1 {
            return Ok(Elem::int(x.a.checked_mul(y.a).ok_or_else(ov)?));
        }
        let bd = x.b.checked_mul(y.b).ok_or_else(ov)?;
        let a = x.a.checked_mul(y.a).and_then(|v| v.checked_add(bd.checked_mul(self.n)?)).ok_or_else(ov)?;
        let b = x
            .a
            .checked_mul(y.b)
            .and_then(|v| v.checked_add(x.b.checked_mul(y.a)?))
            .and_then(|v| v.checked_add(bd.checked_mul(self.t)?))
            .ok_or_else(ov)?;
        Ok(Elem { a, b })
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        Elem { a: x.a + y.a, b: x.b + y.b }
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        Elem { a: x.a - y.a, b: x.b - y.b }
    }

    pub fn neg(&self, x: Elem) -> Elem {
        Elem { a: -x.a, b: -x.b }
    }

    pub fn scale(&self, x: Elem, k: i128) -> Elem {
        Elem { a: x.a * k, b: x.b * k }
    }

    pub fn conj(&self, x: Elem) -> Elem {
        if self.d == 1 {
            return x;
        }
        Elem { a: x.a + x.b * self.t, b: -x.b }
    }

    pub fn norm(&self, x: Elem) -> i128 {
        if self.d == 1 {
            return x.a;
        }
        x.a * x.a + x.a * x.b * self.t - x.b * x.b * self.n
    }

    pub fn trace(&self, x: Elem) -> i128 {
        if self.d == 1 {
            return x.a;
        }
        2 * x.a + x.b * self.t
    }

    pub fn embed_j(&self, x: Elem, j: usize) -> f64 {
        if self.d == 1 {
            return x.a as f64;
        }
        // Cancellation-free for the small-conjugate: use N(x)/σ_other when useful.
        let v = x.a as f64 + x.b as f64 * self.omega[j];
        let o = x.a as f64 + x.b as f64 * self.omega[1 - j];
        if v.abs() < 1e-6 * o.abs() && o != 0.0 {
            self.norm(x) as f64 / o
        } else {
            v
        }
    }

    pub fn embed(&self, x: Elem) -> Vec<f64> {
        (0..self.d).map(|j| self.embed_j(x, j)).collect()
    }

    /// Exact comparison of σ_j(x) with a rational bound.
    pub fn cmp_embedding(&self, x: Elem, j: usize, bound: &BigRational) -> Ordering {
        let xa = BigInt::from(x.a);
        if self.d == 1 || x.b == 0 {
            return BigRational::from_integer(xa).cmp(bound);
        }
        // σ_j(x) = (P + Q√D)/R
        let (p, q, r) = if self.t == 1 {
            (BigInt::from(2 * x.a + x.b), BigInt::from(if j == 0 { x.b } else { -x.b }), 2)
        } else {
            (xa, BigInt::from(if j == 0 { x.b } else { -x.b }), 1)
        };
        let u = BigRational::from_integer(p) - bound * BigRational::from_integer(BigInt::from(r));
        let v = BigRational::from_integer(q);
        sign_sum_sqrt(&u, &v, self.dsq)
    }

    pub fn sign_embedding(&self, x: Elem, j: usize) -> Ordering {
        self.cmp_embedding(x, j, &BigRational::zero())
    }

    pub fn is_totally_positive(&self, x: Elem) -> bool {
        (0..self.d).all(|j| self.sign_embedding(x, j) == Ordering::Greater)
    }

    /// Exact quotient x / y if it lies in the ring of integers.
    pub fn div_exact(&self, x: Elem, y: Elem) -> Option<Elem> {
        let ny = self.norm(y);
        if ny == 0 {
            return None;
        }
        if self.d == 1 {
            return (x.a % y.a == 0).then(|| Elem::int(x.a / y.a));
        }
        let num = self.mul(x, self.conj(y));
        if num.a % ny != 0 || num.b % ny != 0 {
            return None;
        }
        Some(Elem { a: num.a / ny, b: num.b / ny })
    }

    pub fn pow(&self, x: Elem, k: u32) -> Elem {
        let mut r = Elem::ONE;
        for _ in 0..k {
            r = self.mul(r, x);
        }
        r
    }

    /// Units are ±ε^k; returns the inverse of a unit.
    pub fn unit_inverse(&self, u: Elem) -> Elem {
        let nu = self.norm(u);
        debug_assert!(nu == 1 || nu == -1);
        self.scale(self.conj(u), nu)
    }

    fn fundamental_unit(&self) -> Result<Elem> {
        // Continued fraction of ω = (P0 + √D)/Q0; the first convergent p/q with
        // N(p - qω) = ±1 yields the fundamental unit.
        let dd = self.dsq as i128;
        let s = isqrt(dd);
        let (mut p_, mut q_) = if self.t == 1 { (1i128, 2i128) } else { (0i128, 1i128) };
        let (mut h0, mut h1) = (0i128, 1i128);
        let (mut k0, mut k1) = (1i128, 0i128);
        for _ in 0..10_000 {
            let a = (p_ + s).div_euclid(q_);
            let h2 = a.checked_mul(h1).and_then(|v| v.checked_add(h0)).ok_or(Error::Overflow("unit"))?;
            let k2 = a.checked_mul(k1).and_then(|v| v.checked_add(k0)).ok_or(Error::Overflow("unit"))?;
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let cand = Elem::new(h1, -k1);
            let nc = self.norm(cand);
            if nc == 1 || nc == -1 {
                return Ok(self.normalize_unit(cand));
            }
            p_ = a * q_ - p_;
            q_ = (dd - p_ * p_) / q_;
        }
        Err(Error::NoConvergence(format!("fundamental unit of Q(√{})", self.dsq)))
    }

    /// Among ±u, ±u' pick the one with σ_1 > 1.
    fn normalize_unit(&self, u: Elem) -> Elem {
        let nu = self.norm(u);
        let cands = [u, self.neg(u), self.conj(u), self.neg(self.conj(u))];
        for c in cands {
            if self.embed_j(c, 0) > 1.0 {
                return c;
            }
        }
        // 1/u' = ±u
        let inv = self.scale(self.conj(u), nu);
        if self.embed_j(inv, 0) > 1.0 { inv } else { self.neg(inv) }
    }

    /// Any generator of a principal ideal, or None.
    pub fn find_generator(&self, id: &Ideal) -> Option<Elem> {
        if self.d == 1 {
            return Some(Elem::int(id.a));
        }
        let nrm = id.norm();
        let eps1 = self.embed_j(self.eps, 0);
        let wmax = (2.0 * (nrm as f64 * eps1).sqrt() / (id.c as f64 * self.sqrt_disc)).ceil() as i128 + 1;
        let dk = self.disc as i128;
        for w in 0..=wmax {
            for ws in [w, -w] {
                if w == 0 && ws != 0 {
                    continue;
                }
                let bb = ws * id.c;
                for s in [1i128, -1] {
                    let disc = bb * bb * dk + 4 * s * nrm;
                    let Some(r) = int::is_square(disc) else { continue };
                    for rr in [r, -r] {
                        let num = -bb * self.t + rr;
                        if num % 2 != 0 {
                            continue;
                        }
                        let aa = num / 2;
                        if (aa - ws * id.b).rem_euclid(id.a) == 0 {
                            let g = Elem::new(aa, bb);
                            debug_assert_eq!(self.norm(g).abs(), nrm);
                            return Some(g);
                        }
                    }
                }
            }
        }
        None
    }

    /// Deterministic generator: totally positive when possible (otherwise σ_1 > 0),
    /// reduced into the fundamental domain of the totally positive units.
    pub fn canonical_generator(&self, id: &Ideal) -> Option<Elem> {
        let g = self.find_generator(id)?;
        Some(self.canonicalize_generator(g))
    }

    pub fn canonicalize_generator(&self, g: Elem) -> Elem {
        if self.d == 1 {
            return Elem::int(g.a.abs());
        }
        let mut cands = vec![g, self.neg(g)];
        if self.eps_norm == -1 {
            cands.push(self.mul(g, self.eps));
            cands.push(self.neg(self.mul(g, self.eps)));
        }
        let pick = cands
            .iter()
            .copied()
            .find(|&c| self.is_totally_positive(c))
            .unwrap_or_else(|| if self.sign_embedding(g, 0) == Ordering::Greater { g } else { self.neg(g) });
        self.reduce_by_tp_units(pick).0
    }

    /// Multiply by a totally positive unit so that the log-ratio coordinate lies in [0,1).
    pub fn reduce_by_tp_units(&self, x: Elem) -> (Elem, i64) {
        if self.d == 1 {
            return (x, 0);
        }
        let y1 = self.embed_j(x, 0).abs().ln();
        let y2 = self.embed_j(x, 1).abs().ln();
        let l = self.embed_j(self.tp_unit, 0).ln();
        let t = (y1 - y2) / (2.0 * l);
        let k = snap_floor(t);
        let mut u = Elem::ONE;
        let step = if k < 0 { self.tp_unit } else { self.unit_inverse(self.tp_unit) };
        for _ in 0..k.unsigned_abs() {
            u = self.mul(u, step);
        }
        (self.mul(x, u), -k)
    }

    fn compute_class_number(&self, bound: u64) -> Result<u64> {
        let mink = (self.disc as f64).sqrt() / 2.0;
        if mink > bound as f64 {
            return Err(Error::OverBound { norm: mink as u128, bound: bound as u128 });
        }
        let ideals = super::ideal::ideals_up_to(self, mink.floor() as u64);
        let mut reps: Vec<Ideal> = Vec::new();
        for (id, _) in ideals {
            let known = reps.iter().any(|r| {
                let prod = id.mul(self, &r.conj(self));
                self.find_generator(&prod).is_some()
            });
            if !known {
                reps.push(id);
            }
        }
        Ok(reps.len() as u64)
    }
}

/// Floor with snapping of values within 1e-9 of an integer.
pub(crate) fn snap_floor(t: f64) -> i64 {
    let r = t.round();
    if (t - r).abs() < 1e-9 {
        r as i64
    } else {
        t.floor() as i64
    }
}

/// Sign of u + v·√D for rationals u, v and squarefree D > 1.
fn sign_sum_sqrt(u: &BigRational, v: &BigRational, dsq: i64) -> Ordering {
    let su = u.signum();
    let sv = v.signum();
    let zero = BigRational::zero();
    if su >= zero && sv >= zero {
        return if u.is_zero() && v.is_zero() { Ordering::Equal } else { Ordering::Greater };
    }
    if su <= zero && sv <= zero {
        return Ordering::Less;
    }
    let u2 = u * u;
    let v2d = v * v * BigRational::from_integer(BigInt::from(dsq));
    if su > zero {
        u2.cmp(&v2d)
    } else {
        v2d.cmp(&u2)
    }
}
