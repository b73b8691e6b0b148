//! Finite characters of (𝔬/q)^×, Hecke characters with infinity type, and the
//! unramified Eisenstein parameter set.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::nf::{Elem, Field, Ideal, ResidueSystem};

/// (𝔬/q)^× as a direct product of cyclic groups with a full discrete-log table.
#[derive(Debug)]
pub struct UnitGroup {
    pub field: Field,
    pub modulus: Ideal,
    pub rs: ResidueSystem,
    pub gens: Vec<Elem>,
    pub orders: Vec<u64>,
    /// least common multiple of the orders
    pub exponent: u64,
    /// coordinates w.r.t. `gens`, indexed by residue index; empty for non-units
    coords: Vec<Vec<u32>>,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / num_integer::Integer::gcd(&a, &b) * b
}

impl UnitGroup {
    pub fn new(k: &Field, q: &Ideal) -> Result<UnitGroup> {
        let rs = ResidueSystem::new(k, q)?;
        let n = rs.phi() as u64;
        let one = rs.index(Elem::ONE);
        let mut gens_idx: Vec<usize> = Vec::new();
        let mut orders: Vec<u64> = Vec::new();
        for (p, v) in crate::nf::int::factor_u64(n) {
            let pv = p.pow(v);
            let cofactor = n / pv;
            // the p-primary part, as residue indices
            let mut part: Vec<usize> = rs.units.iter().map(|&u| rs.pow_idx(k, u, cofactor)).collect();
            part.sort_unstable();
            part.dedup();
            // span of the basis found so far, index -> coordinates in the local basis
            let mut span: HashMap<usize, Vec<u64>> = HashMap::from([(one, vec![])]);
            let mut local: Vec<(usize, u64)> = Vec::new();
            while (span.len() as u64) < pv {
                // element of maximal order modulo the span
                let ord_mod = |g: usize| -> (u64, usize) {
                    let (mut x, mut o) = (g, 1u64);
                    while !span.contains_key(&x) {
                        x = rs.pow_idx(k, x, p);
                        o *= p;
                    }
                    (o, x)
                };
                let (g, (o, h)) = part
                    .iter()
                    .map(|&g| (g, ord_mod(g)))
                    .max_by_key(|&(g, (o, _))| (o, std::cmp::Reverse(g)))
                    .expect("nonempty p-part");
                // g^o = h ∈ span; replace g by g·h'^{-1} with h'^o = h so that ⟨g⟩ ∩ span = 1
                let hc = &span[&h];
                let root: Option<Vec<u64>> = hc
                    .iter()
                    .zip(&local)
                    .map(|(&c, &(_, oi))| {
                        if c % o == 0 {
                            Some(c / o)
                        } else {
                            (0..oi).find(|&r| (r * o) % oi == c)
                        }
                    })
                    .collect();
                let root = root.ok_or_else(|| Error::Domain("unit group basis extension failed".into()))?;
                let mut hp = one;
                for (&c, &(gi, _)) in root.iter().zip(&local) {
                    hp = rs.mul_idx(k, hp, rs.pow_idx(k, gi, c));
                }
                let g = rs.mul_idx(k, g, rs.inv[hp]);
                let mut next = HashMap::with_capacity(span.len() * o as usize);
                for (&x, c) in &span {
                    let mut y = x;
                    for j in 0..o {
                        let mut cc = c.clone();
                        cc.push(j);
                        next.insert(y, cc);
                        y = rs.mul_idx(k, y, g);
                    }
                }
                if next.len() != span.len() * o as usize {
                    return Err(Error::Domain("unit group basis is not independent".into()));
                }
                span = next;
                local.push((g, o));
            }
            for (g, o) in local {
                gens_idx.push(g);
                orders.push(o);
            }
        }
        // full coordinate table from the product of the generators
        let mut coords = vec![Vec::new(); rs.len()];
        let mut elems: Vec<(usize, Vec<u32>)> = vec![(one, vec![])];
        for (&g, &o) in gens_idx.iter().zip(&orders) {
            let mut next = Vec::with_capacity(elems.len() * o as usize);
            for (x, c) in &elems {
                let mut y = *x;
                for j in 0..o as u32 {
                    let mut cc = c.clone();
                    cc.push(j);
                    next.push((y, cc));
                    y = rs.mul_idx(k, y, g);
                }
            }
            elems = next;
        }
        debug_assert_eq!(elems.len(), rs.phi());
        for (x, c) in elems {
            coords[x] = c;
        }
        let exponent = orders.iter().fold(1u64, |a, &b| lcm(a, b));
        let gens = gens_idx.iter().map(|&i| rs.reps[i]).collect();
        Ok(UnitGroup { field: k.clone(), modulus: *q, rs, gens, orders, exponent, coords })
    }

    pub fn order(&self) -> usize {
        self.rs.phi()
    }

    /// Coordinates of x w.r.t. the generators, or None if x is not a unit mod q.
    pub fn dlog(&self, x: Elem) -> Option<&[u32]> {
        let i = self.rs.index(x);
        self.rs.is_unit[i].then(|| self.coords[i].as_slice())
    }
}

/// χ(g_i) = e(exps_i / orders_i) on the generators of a `UnitGroup`.
#[derive(Clone, Debug)]
pub struct FiniteCharacter {
    pub group: Arc<UnitGroup>,
    pub exps: Vec<u64>,
}

impl PartialEq for FiniteCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.group.modulus == o.group.modulus && self.exps == o.exps
    }
}

impl Eq for FiniteCharacter {}

impl FiniteCharacter {
    pub fn trivial(group: Arc<UnitGroup>) -> Self {
        let exps = vec![0; group.gens.len()];
        FiniteCharacter { group, exps }
    }

    pub fn modulus(&self) -> Ideal {
        self.group.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// χ(x) = e(k/E) with E the group exponent; None when x is not coprime to q.
    pub fn exponent_at(&self, x: Elem) -> Option<u64> {
        let g = &self.group;
        let c = g.dlog(x)?;
        let e = g.exponent as u128;
        let mut k = 0u128;
        for ((&ci, &ei), &oi) in c.iter().zip(&self.exps).zip(&g.orders) {
            k = (k + ci as u128 * ei as u128 % oi as u128 * (e / oi as u128)) % e;
        }
        Some(k as u64)
    }

    pub fn value(&self, x: Elem) -> Complex64 {
        match self.exponent_at(x) {
            Some(k) => crate::nf::e_frac(k as i128, self.group.exponent as i128),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.orders)
            .map(|(&e, &o)| o / num_integer::Integer::gcd(&e, &o))
            .fold(1, lcm)
    }

    pub fn inverse(&self) -> Self {
        let exps = self.exps.iter().zip(&self.group.orders).map(|(&e, &o)| (o - e) % o).collect();
        FiniteCharacter { group: self.group.clone(), exps }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.group, &o.group) && self.group.modulus != o.group.modulus {
            return domain("characters of different moduli");
        }
        let exps =
            self.exps.iter().zip(&o.exps).zip(&self.group.orders).map(|((&a, &b), &m)| (a + b) % m).collect();
        Ok(FiniteCharacter { group: self.group.clone(), exps })
    }

    /// Is χ trivial on {x unit : x ≡ 1 mod q'}?
    fn factors_through(&self, qp: &Ideal) -> bool {
        let g = &self.group;
        g.rs.units.iter().all(|&u| {
            let x = g.rs.reps[u];
            !qp.contains(g.field.sub(x, Elem::ONE)) || self.exponent_at(x) == Some(0)
        })
    }

    /// Smallest q' | q such that χ factors through (𝔬/q')^×.
    pub fn conductor(&self) -> Result<Ideal> {
        let k = &self.group.field;
        let q = self.group.modulus;
        let fac = q.factor(k)?;
        let mut f = q;
        // lower one prime exponent at a time while χ still factors through
        loop {
            let mut lowered = false;
            for (p, _) in &fac {
                if p.ideal.divides(&f) {
                    let cand = f.div_prime(k, p);
                    if self.factors_through(&cand) {
                        f = cand;
                        lowered = true;
                    }
                }
            }
            if !lowered {
                return Ok(f);
            }
        }
    }

    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.conductor()? == self.group.modulus)
    }
}

/// All φ(q) characters of (𝔬/q)^×, in lexicographic order of exponent vectors.
pub fn characters_mod(k: &Field, q: &Ideal) -> Result<Vec<FiniteCharacter>> {
    let group = Arc::new(UnitGroup::new(k, q)?);
    let mut all = vec![Vec::new()];
    for &o in &group.orders {
        all = all.into_iter().flat_map(|e: Vec<u64>| (0..o).map(move |j| [e.clone(), vec![j]].concat())).collect();
    }
    Ok(all.into_iter().map(|exps| FiniteCharacter { group: group.clone(), exps }).collect())
}

/// Residual tolerance for the unit-triviality check.
pub const UNIT_TOL: f64 = 1e-10;

/// χ((a)) = χ_fin(a) Π_j sgn(σ_j a)^{e_j} |σ_j a|^{i t_j}, with s_j = i t_j.
#[derive(Clone, Debug)]
pub struct HeckeCharacter {
    pub fin: FiniteCharacter,
    /// t_j with s_j = i t_j
    pub t: Vec<f64>,
    pub signs: Vec<u8>,
}

impl HeckeCharacter {
    pub fn new(fin: FiniteCharacter, t: Vec<f64>, signs: Vec<u8>) -> Result<Self> {
        let d = fin.group.field.d;
        if t.len() != d || signs.len() != d || signs.iter().any(|&e| e > 1) {
            return domain("infinity type has the wrong shape");
        }
        let chi = HeckeCharacter { fin, t, signs };
        let r = chi.unit_residual();
        if r > UNIT_TOL {
            return domain(format!("not trivial on units (residual {r:.3e})"));
        }
        Ok(chi)
    }

    pub fn trivial(k: &Field) -> Result<Self> {
        let g = Arc::new(UnitGroup::new(k, &Ideal::unit(k.dsq))?);
        Self::new(FiniteCharacter::trivial(g), vec![0.0; k.d], vec![0; k.d])
    }

    pub fn field(&self) -> &Field {
        &self.fin.group.field
    }

    pub fn modulus(&self) -> Ideal {
        self.fin.modulus()
    }

    pub fn inverse(&self) -> Self {
        HeckeCharacter { fin: self.fin.inverse(), t: self.t.iter().map(|x| -x).collect(), signs: self.signs.clone() }
    }

    /// Infinity type at a nonzero element.
    pub fn infinity_part(&self, x: Elem) -> Complex64 {
        let k = self.field();
        let mut v = Complex64::new(1.0, 0.0);
        for j in 0..k.d {
            let s = k.embed_j(x, j);
            let ph = self.t[j] * s.abs().ln();
            v *= Complex64::from_polar(1.0, ph);
            if self.signs[j] == 1 && s < 0.0 {
                v = -v;
            }
        }
        v
    }

    pub fn value_on_elem(&self, x: Elem) -> Complex64 {
        if x.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.fin.value(x) * self.infinity_part(x)
    }

    /// max over the unit generators (-1, ε and the totally positive generator) of |χ(u) - 1|.
    pub fn unit_residual(&self) -> f64 {
        let k = self.field();
        let mut units = vec![Elem::int(-1)];
        if k.d == 2 {
            units.push(k.eps);
            units.push(k.tp_unit);
        }
        units.iter().map(|&u| (self.value_on_elem(u) - 1.0).norm()).fold(0.0, f64::max)
    }

    /// Value on an ideal: 0 unless coprime to the modulus; needs a principal ideal.
    pub fn eval_on_ideal(&self, a: &Ideal) -> Result<Complex64> {
        let k = self.field();
        if a.dsq != k.dsq {
            return domain("ideal from a different field");
        }
        if !a.gcd(&self.modulus()).is_unit() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let g = k.canonical_generator(a).ok_or(Error::ClassNumber(k.class_number))?;
        Ok(self.value_on_elem(g))
    }
}

/// Row-stacked matrix M (all-ones row, then log|σ_j(u)| for the U⁺ generator) and
/// the spacing of the discrete s_1 - s_2 constraint for sign-trivial branches.
#[derive(Clone, Debug)]
pub struct ExponentLattice {
    pub m: Vec<Vec<f64>>,
    /// log of the fundamental unit at the first place, None for Q
    pub log_eps: Option<f64>,
    /// 2π / log ε, None for Q
    pub spacing: Option<f64>,
}

pub fn unramified_exponent_lattice(k: &Field) -> ExponentLattice {
    let mut m = vec![vec![1.0; k.d]];
    if k.d == 1 {
        return ExponentLattice { m, log_eps: None, spacing: None };
    }
    m.push((0..2).map(|j| k.embed_j(k.tp_unit, j).abs().ln()).collect());
    let le = k.embed_j(k.eps, 0).ln();
    ExponentLattice { m, log_eps: Some(le), spacing: Some(2.0 * PI / le) }
}

/// One discrete direction: a finite character, a sign vector and s_1 - s_2 = iδ,
/// with the diagonal parameter y sampled on a grid (s_j = i(y ± δ/2)).
#[derive(Clone, Debug)]
pub struct EisensteinBranch {
    pub chi: FiniteCharacter,
    pub signs: Vec<u8>,
    pub delta: f64,
    pub grid: Vec<f64>,
}

impl EisensteinBranch {
    pub fn hecke(&self, y: f64) -> Result<HeckeCharacter> {
        let t = if self.signs.len() == 1 { vec![y] } else { vec![y + self.delta / 2.0, y - self.delta / 2.0] };
        HeckeCharacter::new(self.chi.clone(), t, self.signs.clone())
    }

    pub fn sign_trivial(&self) -> bool {
        self.signs.iter().all(|&e| e == 0)
    }
}

#[derive(Clone, Debug)]
pub struct EisensteinCount {
    /// largest c₁ with c₁² | c
    pub c1: Ideal,
    pub branches: Vec<EisensteinBranch>,
    /// discrete directions with trivial finite and sign characters
    pub unramified_directions: usize,
    pub directions: usize,
    pub grid_points: usize,
}

/// Largest c₁ with c₁² | c.
pub fn half_level(k: &Field, c: &Ideal) -> Result<Ideal> {
    let f: Vec<_> = c.factor(k)?.into_iter().map(|(p, e)| (p, e / 2)).collect();
    Ok(crate::nf::product(k, &f))
}

/// Discrete directions s_1 - s_2 = iδ with |δ| ≤ X (±δ counted separately) for each finite
/// character with conductor² | c and each admissible sign vector, and the diagonal parameter
/// on the grid resolution·Z within |s_j| ≤ X.
pub fn enumerate_eisenstein_pairs(k: &Field, c: &Ideal, x: f64, resolution: f64) -> Result<EisensteinCount> {
    if !(x >= 0.0) || !(resolution > 0.0) {
        return domain("X must be nonnegative and the resolution positive");
    }
    let c1 = half_level(k, c)?;
    let chars = characters_mod(k, &c1)?;
    let sign_vectors: Vec<Vec<u8>> = if k.d == 1 { vec![vec![0], vec![1]] } else { vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]] };
    let lat = unramified_exponent_lattice(k);
    let mut branches = Vec::new();
    for chi in &chars {
        for sv in &sign_vectors {
            let probe = HeckeCharacter { fin: chi.clone(), t: vec![0.0; k.d], signs: sv.clone() };
            // -1 has trivial infinity type magnitude; its value decides parity
            if (probe.value_on_elem(Elem::int(-1)) - 1.0).norm() > UNIT_TOL {
                continue;
            }
            let deltas: Vec<f64> = match lat.log_eps {
                None => vec![0.0],
                Some(le) => {
                    // e^{iδ log ε} = conj(χ_fin(ε) · signs(ε))
                    let theta = -probe.value_on_elem(k.eps).arg();
                    let base = theta / le;
                    let step = 2.0 * PI / le;
                    let jmax = ((x + base.abs()) / step).ceil() as i64 + 1;
                    (-jmax..=jmax).map(|j| base + j as f64 * step).filter(|d| d.abs() <= x + 1e-12).collect()
                }
            };
            for delta in deltas {
                let ymax = if k.d == 1 { x } else { x - delta.abs() / 2.0 };
                let n = (ymax / resolution + 1e-12).floor() as i64;
                let grid: Vec<f64> = (-n..=n).map(|i| i as f64 * resolution).collect();
                branches.push(EisensteinBranch { chi: chi.clone(), signs: sv.clone(), delta, grid });
            }
        }
    }
    let unramified_directions = branches.iter().filter(|b| b.sign_trivial() && b.chi.is_trivial()).count();
    let grid_points = branches.iter().map(|b| b.grid.len()).sum();
    Ok(EisensteinCount { c1, directions: branches.len(), unramified_directions, grid_points, branches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orth_check(k: &Field, q: &Ideal) {
        let chars = characters_mod(k, q).unwrap();
        let g = &chars[0].group;
        assert_eq!(chars.len(), g.order());
        for (i, a) in chars.iter().enumerate() {
            assert!(chars.contains(&a.inverse()));
            for b in &chars[i..] {
                let s: Complex64 = g.rs.units.iter().map(|&u| a.value(g.rs.reps[u]) * b.value(g.rs.reps[u]).conj()).sum();
                let want = if a == b { g.order() as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "{q}: {s}");
            }
        }
    }

    #[test]
    fn counts_and_orthogonality() {
        let q = Field::rationals();
        let c5 = characters_mod(&q, &Ideal::rational(&q, 5)).unwrap();
        assert_eq!(c5.len(), 4);
        assert_eq!(c5[0].group.orders, vec![4]);
        assert_eq!(characters_mod(&q, &Ideal::unit(1)).unwrap().len(), 1);
        let k = Field::new(5).unwrap();
        let c2 = characters_mod(&k, &Ideal::rational(&k, 2)).unwrap();
        assert_eq!(c2.len(), 3);
        assert_eq!(c2[0].group.orders, vec![3]);
        for n in [8, 12, 15, 16, 24, 35] {
            orth_check(&q, &Ideal::rational(&q, n));
        }
        for n in [4, 6, 9, 11] {
            orth_check(&k, &Ideal::rational(&k, n));
        }
        // (Z/8)^× ≅ C2 × C2
        let g8 = &characters_mod(&q, &Ideal::rational(&q, 8)).unwrap()[0].group;
        assert_eq!(g8.orders, vec![2, 2]);
    }

    #[test]
    fn order_four_mod_five() {
        let q = Field::rationals();
        let chars = characters_mod(&q, &Ideal::rational(&q, 5)).unwrap();
        let chi = chars.iter().find(|c| c.order() == 4).unwrap();
        let v = chi.fin_value_at(2);
        assert!((v.powi(4) - 1.0).norm() < 1e-12);
        assert!((v.powi(2) + 1.0).norm() < 1e-12);
        let h = HeckeCharacter::new(chi.clone(), vec![0.0], vec![1]).unwrap();
        assert!((h.eval_on_ideal(&Ideal::rational(&q, 2)).unwrap() - v).norm() < 1e-12);
        assert_eq!(h.eval_on_ideal(&Ideal::rational(&q, 10)).unwrap(), Complex64::new(0.0, 0.0));
        // odd character with trivial sign is not a Hecke character
        assert!(HeckeCharacter::new(chi.clone(), vec![0.0], vec![0]).is_err());
    }

    impl FiniteCharacter {
        fn fin_value_at(&self, n: i128) -> Complex64 {
            self.value(Elem::int(n))
        }
    }

    #[test]
    fn conductors() {
        let q = Field::rationals();
        let chars = characters_mod(&q, &Ideal::rational(&q, 12)).unwrap();
        let mut conds: Vec<i128> = chars.iter().map(|c| c.conductor().unwrap().a).collect();
        conds.sort();
        assert_eq!(conds, vec![1, 3, 4, 12]);
        let prim = characters_mod(&q, &Ideal::rational(&q, 9)).unwrap().iter().filter(|c| c.is_primitive().unwrap()).count();
        // primitive characters mod 9: φ(9) - φ(3) = 4
        assert_eq!(prim, 4);
    }

    #[test]
    fn lattice_spacing() {
        let k5 = Field::new(5).unwrap();
        let want = 2.0 * PI / ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((unramified_exponent_lattice(&k5).spacing.unwrap() - want).abs() < 1e-9);
        let k2 = Field::new(2).unwrap();
        let want = 2.0 * PI / (1.0 + 2f64.sqrt()).ln();
        assert!((unramified_exponent_lattice(&k2).spacing.unwrap() - want).abs() < 1e-9);
        assert!(unramified_exponent_lattice(&Field::rationals()).spacing.is_none());
    }

    #[test]
    fn eisenstein_counts() {
        let k = Field::new(5).unwrap();
        let one = Ideal::unit(5);
        let counts: Vec<usize> = [5.0, 10.0, 14.0, 30.0]
            .iter()
            .map(|&x| enumerate_eisenstein_pairs(&k, &one, x, 0.5).unwrap().unramified_directions)
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 5]);
        let q = Field::rationals();
        let r = enumerate_eisenstein_pairs(&q, &Ideal::unit(1), 1.0, 0.25).unwrap();
        assert_eq!(r.unramified_directions, 1);
        assert_eq!(r.branches[0].grid.len(), 9);
        // every branch point is a valid Hecke character
        let r = enumerate_eisenstein_pairs(&k, &Ideal::rational(&k, 4), 14.0, 1.0).unwrap();
        for b in &r.branches {
            for &y in &b.grid {
                b.hecke(y).unwrap();
            }
        }
        // monotone in X and in c
        let small = enumerate_eisenstein_pairs(&k, &Ideal::rational(&k, 2), 14.0, 1.0).unwrap();
        assert!(small.grid_points <= r.grid_points);
    }
}
