//! Shifted convolution sums, their Dirichlet series in the region of absolute convergence,
//! the amplified second moment with its Plancherel rearrangement, and the finite sums of the
//! approximate functional equation. Only the arithmetic sides are computed; the spectral
//! expansions need the cuspidal spectrum and are not assembled here.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::characters::{characters_mod, HeckeCharacter};
use crate::error::{domain, Error, Result};
use crate::exec::{self, ksum, ksum_c, Exec};
use crate::nf::{arith_functions, enumerate_in_box, ideals_up_to, Elem, Field, Ideal, ResidueSystem};
use crate::spectral::{lambda_value, EigenvalueSystem};

/// A weight on K_∞^×, zero outside a compact box with positive coordinates.
pub trait Weight: Sync {
    fn eval(&self, y: &[f64]) -> Complex64;
    /// closed support box, one interval per real place
    fn support(&self) -> Vec<(f64, f64)>;
    fn sup(&self) -> f64;
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Π_j b(u_j) y_j^{-i v_j}, b(u) = e^{1 - 1/(1-u²)}, u_j the affine image of [lo_j, hi_j] on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct BumpWeight {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub v: Vec<f64>,
}

impl BumpWeight {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != v.len() || lo.is_empty() {
            return domain("weight bounds and twist must have one entry per place");
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return domain("unbounded weight support");
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(*a > 0.0 && a < b)) {
            return domain("weight support must satisfy 0 < lo < hi");
        }
        Ok(BumpWeight { lo, hi, v })
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        BumpWeight::new(vec![lo; d], vec![hi; d], vec![0.0; d])
    }
}

impl Weight for BumpWeight {
    fn eval(&self, y: &[f64]) -> Complex64 {
        let mut m = 1.0;
        let mut ph = 0.0;
        for (j, &x) in y.iter().enumerate() {
            if x <= self.lo[j] || x >= self.hi[j] {
                return Complex64::new(0.0, 0.0);
            }
            m *= bump((2.0 * x - self.lo[j] - self.hi[j]) / (self.hi[j] - self.lo[j]));
            ph -= self.v[j] * x.ln();
        }
        Complex64::from_polar(m, ph)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.lo.iter().copied().zip(self.hi.iter().copied()).collect()
    }
    fn sup(&self) -> f64 {
        1.0
    }
}

/// y ↦ W(y_j / a_j) for a_j > 0.
pub struct Dilated<'a> {
    pub inner: &'a dyn Weight,
    pub by: Vec<f64>,
}

impl Weight for Dilated<'_> {
    fn eval(&self, y: &[f64]) -> Complex64 {
        let z: Vec<f64> = y.iter().zip(&self.by).map(|(x, a)| x / a).collect();
        self.inner.eval(&z)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.inner.support().iter().zip(&self.by).map(|((lo, hi), a)| (lo * a, hi * a)).collect()
    }
    fn sup(&self) -> f64 {
        self.inner.sup()
    }
}

fn in_box(z: &[f64], bx: &[(f64, f64)]) -> bool {
    z.iter().zip(bx).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
}

/// λ(r y^{-1}) and N(r y^{-1}).
fn lambda_quot(sys: &EigenvalueSystem, r: Elem, y: &Ideal) -> Result<(Complex64, f64)> {
    let k = &sys.field;
    let m = Ideal::principal(k, r).div_exact(k, y).ok_or_else(|| Error::Domain(format!("{r:?} is not in {y}")))?;
    Ok((lambda_value(sys, &m)?, m.norm() as f64))
}

fn check_shift_data(sys1: &EigenvalueSystem, sys2: &EigenvalueSystem, l1: Elem, l2: Elem, q: Elem) -> Result<()> {
    let k = &sys1.field;
    if sys2.field != *k {
        return domain("eigenvalue systems over different fields");
    }
    if !k.is_totally_positive(l1) || !k.is_totally_positive(l2) {
        return domain("shifts ℓ1, ℓ2 must be totally positive");
    }
    if q.is_zero() {
        return domain("shift target q must be nonzero");
    }
    Ok(())
}

/// Data of one shifted convolution sum.
pub struct ShiftedQuery<'a> {
    pub sys1: &'a EigenvalueSystem,
    pub sys2: &'a EigenvalueSystem,
    pub l1: Elem,
    pub l2: Elem,
    pub y: Ideal,
    pub q: Elem,
    /// Y per real place
    pub scale: Vec<f64>,
    pub w1: &'a dyn Weight,
    pub w2: &'a dyn Weight,
}

#[derive(Clone, Debug)]
pub struct ShiftedSum {
    pub value: Complex64,
    /// pairs (r1, r2) with both points in the closed weight supports
    pub solutions: usize,
    /// lattice points r1 in the W1 box
    pub candidates: usize,
}

/// Σ_{ℓ1 r1 - q = ℓ2 r2, r_i ∈ y \ 0} λ₁(r1 y⁻¹) conj λ₂(r2 y⁻¹) N(r1 r2 y⁻²)^{-1/2} W1(ℓ1 r1/Y) conj W2(ℓ2 r2/Y).
pub fn shifted_sum(query: &ShiftedQuery) -> Result<ShiftedSum> {
    let k = &query.sys1.field;
    check_shift_data(query.sys1, query.sys2, query.l1, query.l2, query.q)?;
    let (sup1, sup2) = (query.w1.support(), query.w2.support());
    if sup1.len() != k.d || sup2.len() != k.d || query.scale.len() != k.d {
        return domain("weights and scale need one entry per real place");
    }
    if query.scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return domain("scale must be positive");
    }
    let e1 = k.embed(query.l1);
    let bx: Vec<(f64, f64)> = (0..k.d).map(|j| (sup1[j].0 * query.scale[j] / e1[j], sup1[j].1 * query.scale[j] / e1[j])).collect();
    let r1s = enumerate_in_box(k, &query.y, &bx, false)?;
    let unscale = |x: Elem| -> Vec<f64> { k.embed(x).iter().zip(&query.scale).map(|(v, s)| v / s).collect() };
    let mut terms = Vec::new();
    let mut solutions = 0;
    for &r1 in &r1s {
        if r1.is_zero() {
            continue;
        }
        let a = k.mul(query.l1, r1);
        let b = k.sub(a, query.q);
        let Some(r2) = k.div_exact(b, query.l2) else { continue };
        if r2.is_zero() || !query.y.contains(r2) {
            continue;
        }
        let z2 = unscale(b);
        if !in_box(&z2, &sup2) {
            continue;
        }
        solutions += 1;
        let w = query.w1.eval(&unscale(a)) * query.w2.eval(&z2).conj();
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (la, na) = lambda_quot(query.sys1, r1, &query.y)?;
        let (lb, nb) = lambda_quot(query.sys2, r2, &query.y)?;
        terms.push(la * lb.conj() / (na * nb).sqrt() * w);
    }
    Ok(ShiftedSum { value: ksum_c(terms), solutions, candidates: r1s.len() })
}

/// U⁺-fundamental domain F = {y : log(y/(Ny)^{1/d}) = t·(l, -l), 0 ≤ t < 1} with l = log σ_1(ε⁺).
#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    pub d: usize,
    /// generator ε⁺ of U⁺ with σ_1(ε⁺) > 1 (1 over Q)
    pub unit: Elem,
    pub log_unit: f64,
    /// [c3, c4] with F₀ ⊂ [c3, c4]^d
    pub hull: (f64, f64),
    /// coordinates within this distance of an integer snap to it
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct Reduced {
    /// u ∈ U⁺ with u·y ∈ F
    pub unit: Elem,
    /// u = ε⁺^exponent
    pub exponent: i64,
    pub point: Vec<f64>,
}

impl FundamentalDomain {
    pub fn new(k: &Field) -> Self {
        if k.d == 1 {
            return FundamentalDomain { d: 1, unit: Elem::ONE, log_unit: 0.0, hull: (1.0, 1.0), tol: 1e-12 };
        }
        let mut u = k.tp_unit;
        if k.embed_j(u, 0) < 1.0 {
            u = k.unit_inverse(u);
        }
        let l = k.embed_j(u, 0).ln();
        FundamentalDomain { d: 2, unit: u, log_unit: l, hull: ((-l).exp(), l.exp()), tol: 1e-12 }
    }

    /// Coordinate t of log(y/(Ny)^{1/d}) in the basis (l, -l).
    pub fn coordinate(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.d || y.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return domain("fd_reduce needs a point with positive, finite coordinates");
        }
        if self.d == 1 {
            return Ok(0.0);
        }
        Ok((y[0].ln() - y[1].ln()) / (2.0 * self.log_unit))
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        let t = self.coordinate(y)?;
        Ok((0.0..1.0).contains(&t))
    }

    /// The translate of y in F (half-open: coordinates in [0, 1)).
    pub fn reduce(&self, k: &Field, y: &[f64]) -> Result<Reduced> {
        let t = self.coordinate(y)?;
        if self.d == 1 {
            return Ok(Reduced { unit: Elem::ONE, exponent: 0, point: y.to_vec() });
        }
        let r = t.round();
        let n = if (t - r).abs() <= self.tol { r } else { t.floor() } as i64;
        let step = if n > 0 { k.unit_inverse(self.unit) } else { self.unit };
        let mut u = Elem::ONE;
        for _ in 0..n.unsigned_abs() {
            u = k.checked_mul(u, step)?;
        }
        let f = (-(n as f64) * self.log_unit).exp();
        Ok(Reduced { unit: u, exponent: -n, point: vec![y[0] * f, y[1] / f] })
    }
}

pub fn fd_reduce(k: &Field, y: &[f64]) -> Result<Reduced> {
    FundamentalDomain::new(k).reduce(k, y)
}

/// Shift data of the Dirichlet series (weights are not used).
pub struct DirichletQuery<'a> {
    pub sys1: &'a EigenvalueSystem,
    pub sys2: &'a EigenvalueSystem,
    pub l1: Elem,
    pub l2: Elem,
    pub y: Ideal,
    pub q: Elem,
}

#[derive(Clone, Debug)]
pub struct DirichletValue {
    pub value: Complex64,
    pub terms: usize,
    /// truncation height on Tr(ℓ1 r1 + ℓ2 r2)
    pub height: f64,
    pub tail_bound: f64,
    /// true over Q; over a quadratic field the tail is an integral estimate
    pub tail_rigorous: bool,
    /// β > 66 d
    pub beta_admissible: bool,
}

/// Σ_{m > M} τ(m)² m^{-κ} ≤ κ ∫_{max(M,1)}^∞ x^{-κ} (ln x + 1)³ dx, by partial summation from
/// Σ_{m ≤ x} τ(m)² ≤ Σ_{m ≤ x} τ_4(m) ≤ x (ln x + 1)³.
fn tau_sq_tail(m: f64, kappa: f64) -> f64 {
    let a = kappa - 1.0;
    let z = a * (m.max(1.0).ln() + 1.0);
    // e^{a} Γ(4, z) / a⁴ with Γ(4, z) = 6 e^{-z}(1 + z + z²/2 + z³/6)
    kappa * 6.0 * (a - z).exp() * (1.0 + z + z * z / 2.0 + z * z * z / 6.0) / a.powi(4)
}

/// Σ over ℓ1 r1 - ℓ2 r2 = q, r_i ≫ 0 in y, of λ₁ conj λ₂ N(ℓ1 r1 ℓ2 r2)^{(β-1)/2} / Π_j (σ_j(ℓ1 r1 + ℓ2 r2))^{s_j+β-1},
/// truncated at Tr(ℓ1 r1 + ℓ2 r2) ≤ height.
pub fn dirichlet_d(query: &DirichletQuery, s: &[Complex64], beta: u32, height: f64, tol: Option<f64>) -> Result<DirichletValue> {
    let k = &query.sys1.field;
    check_shift_data(query.sys1, query.sys2, query.l1, query.l2, query.q)?;
    if s.len() != k.d {
        return domain("one s_j per real place");
    }
    if s.iter().any(|z| !(z.re > 1.0)) {
        return domain("Re s_j must exceed 1");
    }
    if beta < 2 || beta % 2 != 0 {
        return domain("β must be a positive even integer");
    }
    if !(height > 0.0 && height.is_finite()) {
        return domain("truncation height must be positive");
    }
    let beta_admissible = beta as usize > 66 * k.d;
    if !beta_admissible {
        log::warn!("β = {beta} is below the admissible range β > {}", 66 * k.d);
    }
    let th = query.sys1.theta + query.sys2.theta;
    let kappa: Vec<f64> = s.iter().map(|z| z.re - th).collect();
    if kappa.iter().any(|&x| x <= 1.0) {
        return domain(format!("Re s_j - θ₁ - θ₂ must exceed 1 for the tail bound (θ₁ + θ₂ = {th:.4})"));
    }
    let qv = k.embed(query.q);
    let e1 = k.embed(query.l1);
    let bx: Vec<(f64, f64)> = (0..k.d).map(|j| (qv[j].max(0.0) / e1[j], (height + qv[j]) / (2.0 * e1[j]))).collect();
    let b1 = beta as f64 - 1.0;
    let mut terms = Vec::new();
    for r1 in enumerate_in_box(k, &query.y, &bx, true)? {
        let a = k.mul(query.l1, r1);
        let b = k.sub(a, query.q);
        if !k.is_totally_positive(b) {
            continue;
        }
        let (ea, eb) = (k.embed(a), k.embed(b));
        if ea.iter().zip(&eb).map(|(x, y)| x + y).sum::<f64>() > height {
            continue;
        }
        let Some(r2) = k.div_exact(b, query.l2) else { continue };
        if !query.y.contains(r2) {
            continue;
        }
        let (la, _) = lambda_quot(query.sys1, r1, &query.y)?;
        let (lb, _) = lambda_quot(query.sys2, r2, &query.y)?;
        let mut ex = Complex64::new(0.0, 0.0);
        for j in 0..k.d {
            ex += b1 / 2.0 * (ea[j] * eb[j]).ln() - (s[j] + b1) * (ea[j] + eb[j]).ln();
        }
        terms.push(la * lb.conj() * ex.exp());
    }
    let nterms = terms.len();
    let (tail_bound, tail_rigorous) = dirichlet_tail(query, &kappa, beta, height)?;
    if let Some(t) = tol {
        if tail_bound > t {
            return Err(Error::Certificate(format!("tail bound {tail_bound:.3e} above tolerance {t:.1e}; raise the height")));
        }
    }
    Ok(DirichletValue { value: ksum_c(terms), terms: nterms, height, tail_bound, tail_rigorous, beta_admissible })
}

/// Terms with Tr(s) > T, s = ℓ1 r1 + ℓ2 r2, using |λ(m)| ≤ τ(m) N(m)^θ, √(ab) ≤ s/2 and τ₁τ₂ ≤ (τ₁² + τ₂²)/2.
fn dirichlet_tail(query: &DirichletQuery, kappa: &[f64], beta: u32, t: f64) -> Result<(f64, bool)> {
    let k = &query.sys1.field;
    let (th1, th2) = (query.sys1.theta, query.sys2.theta);
    let ny = query.y.norm() as f64;
    let pre = 2f64.powi(k.d as i32 * (1 - beta as i32));
    if k.d == 1 {
        // s ≥ ℓ1 r1 = ℓ1 y0 m1 and s ≥ ℓ2 y0 m2; s > T forces m1 > (T + q)/(2 ℓ1 y0), m2 > (T - q)/(2 ℓ2 y0)
        let (l1, l2, qv) = (query.l1.a as f64, query.l2.a as f64, query.q.a as f64);
        let (a1, a2) = (l1 * ny, l2 * ny);
        let kk = a1.powf(-th1) * a2.powf(-th2);
        let kap = kappa[0];
        let tail = a1.powf(-kap) * tau_sq_tail((t + qv) / (2.0 * a1), kap) + a2.powf(-kap) * tau_sq_tail((t - qv) / (2.0 * a2), kap);
        return Ok((pre * kk / 2.0 * tail, true));
    }
    // (1/covol) ∫ over s_j > |q_j|, s_1 + s_2 > T of Π s_j^{-κ_j} with τ² replaced by (ln N + 1)^7, the
    // envelope of its partial sums; s = 2a - q has lattice density 1/(4 √D N(ℓ1) N(y)). The region lies in
    // {s_1 > T/2} ∪ {s_2 > T/2} and ln⁺(s_1 s_2) + 1 ≤ A_1 + A_2 with A_j = ln⁺ s_j + 1/2, so the
    // binomial expansion splits into one-variable integrals.
    let n1 = k.norm(query.l1).unsigned_abs() as f64;
    let n2 = k.norm(query.l2).unsigned_abs() as f64;
    let kk = (n1 * ny).powf(-th1) * (n2 * ny).powf(-th2);
    let qv = k.embed(query.q);
    let (p1, p2) = (qv[0].abs(), qv[1].abs());
    let mut integral = 0.0;
    let mut binom = 1.0;
    for i in 0..=7 {
        integral += binom
            * (log_power_tail(p1.max(t / 2.0), kappa[0], i) * log_power_tail(p2, kappa[1], 7 - i)
                + log_power_tail(p1, kappa[0], i) * log_power_tail(p2.max(t / 2.0), kappa[1], 7 - i));
        binom = binom * (7 - i) as f64 / (i + 1) as f64;
    }
    Ok((pre * kk * integral / (4.0 * k.sqrt_disc * n1 * ny), false))
}

/// ∫_a^∞ s^{-κ} (ln⁺ s + 1/2)^i ds for a > 0, κ > 1.
fn log_power_tail(a: f64, kappa: f64, i: i32) -> f64 {
    let c = kappa - 1.0;
    let mut v = 0.0;
    if a < 1.0 {
        v += 0.5f64.powi(i) * (a.powf(-c) - 1.0) / c;
    }
    let u0 = a.max(1.0).ln() + 0.5;
    // e^{c/2} Γ(i+1, c u0) / c^{i+1}, Γ(i+1, z) = i! e^{-z} Σ_{m ≤ i} z^m/m!
    let z = c * u0;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..=i {
        term *= z / m as f64;
        sum += term;
    }
    let fact: f64 = (1..=i).map(|m| m as f64).product();
    v + (c / 2.0 - z).exp() * fact * sum / c.powi(i + 1)
}

/// Upper limit on N(q) for the amplified moment.
pub const MAX_AMPLIFIER_MODULUS: i128 = 10_000;

/// Totally positive prime generators ℓ ∈ F with Nℓ ∈ [L, 2L], (ℓ) ∤ q.
pub fn amplifier_primes(k: &Field, q: &Ideal, l: f64) -> Result<Vec<Elem>> {
    let fd = FundamentalDomain::new(k);
    let mut out = Vec::new();
    for (id, f) in ideals_up_to(k, (2.0 * l).floor() as u64) {
        if f.len() != 1 || f[0].1 != 1 || (id.norm() as f64) < l || id.divides(q) {
            continue;
        }
        let Some(g) = k.find_generator(&id) else { continue };
        let cands = [g, k.neg(g), k.mul(g, k.eps), k.neg(k.mul(g, k.eps))];
        let Some(tp) = cands.into_iter().find(|&c| k.is_totally_positive(c)) else { continue };
        let red = fd.reduce(k, &k.embed(tp))?;
        out.push(k.checked_mul(tp, red.unit)?);
    }
    if out.is_empty() {
        return domain(format!("no totally positive prime generators with norm in [{l}, {}]", 2.0 * l));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct AmplifiedMoment {
    /// Σ_ξ |L_ξ|² |Σ_ℓ ξ(ℓ) conj χ(ℓ)|²
    pub side_a: f64,
    /// φ(q) Σ_{x ∈ (o/q)^×} |Σ_ℓ conj χ(ℓ) Σ_{ℓr ≡ x} c_r|²
    pub side_b: f64,
    pub rel_diff: f64,
    /// the same square summed over every x ∈ o/q
    pub opened: f64,
    /// ℓ1 r1 = ℓ2 r2 part of the opened square
    pub diagonal: Complex64,
    /// Σ over 0 ≠ q' ∈ q of the shifted sums
    pub offdiagonal: Complex64,
    pub opened_rel_diff: f64,
    pub diagonal_pairs: usize,
    pub amplifier: Vec<Elem>,
    /// r in the weight support
    pub support: usize,
    pub shifted_sums: usize,
    pub characters: usize,
}

/// Both sides of the Plancherel identity for the amplified second moment with y = o, v = 0,
/// c_r = λ(r) N(r)^{-1/2} W(r / Y^{1/d}) and χ_fin the finite part of χ.
pub fn amplified_moment(
    q: &Ideal,
    l: f64,
    sys: &EigenvalueSystem,
    chi: &HeckeCharacter,
    w: &dyn Weight,
    y: f64,
    exec: Exec,
) -> Result<AmplifiedMoment> {
    let k = &sys.field;
    if k.class_number != 1 {
        return Err(Error::ClassNumber(k.class_number));
    }
    if chi.field() != k || chi.modulus() != *q {
        return domain("χ must be a character modulo q over the field of the system");
    }
    if q.norm() > MAX_AMPLIFIER_MODULUS {
        return Err(Error::OverBound { norm: q.norm() as u128, bound: MAX_AMPLIFIER_MODULUS as u128 });
    }
    if w.support().len() != k.d {
        return domain("weight needs one interval per real place");
    }
    let ells = amplifier_primes(k, q, l)?;
    let yd = y.powf(1.0 / k.d as f64);
    let bx: Vec<(f64, f64)> = w.support().iter().map(|(a, b)| (a * yd, b * yd)).collect();
    let rs: Vec<Elem> = enumerate_in_box(k, &Ideal::unit(k.dsq), &bx, true)?;
    let c: Vec<Complex64> = rs
        .iter()
        .map(|&r| -> Result<Complex64> {
            let (lam, n) = lambda_quot(sys, r, &Ideal::unit(k.dsq))?;
            let z: Vec<f64> = k.embed(r).iter().map(|x| x / yd).collect();
            Ok(lam / n.sqrt() * w.eval(&z))
        })
        .collect::<Result<_>>()?;
    let chi_bar: Vec<Complex64> = ells.iter().map(|&e| chi.fin.value(e).conj()).collect();

    // side A over all characters of (o/q)^×
    let xis = characters_mod(k, q)?;
    let per_xi = exec::map(exec, &xis, |xi| {
        let lx = ksum_c(rs.iter().zip(&c).map(|(&r, cr)| cr * xi.value(r)));
        let ax = ksum_c(ells.iter().zip(&chi_bar).map(|(&e, cb)| xi.value(e) * cb));
        lx.norm_sqr() * ax.norm_sqr()
    });
    let side_a = ksum(per_xi);

    // side B: the square grouped by x = ℓr mod q
    let res = ResidueSystem::new(k, q)?;
    let mut fx = vec![Complex64::new(0.0, 0.0); res.len()];
    for (e, cb) in ells.iter().zip(&chi_bar) {
        for (&r, cr) in rs.iter().zip(&c) {
            fx[res.index(k.mul(*e, r))] += cb * cr;
        }
    }
    let side_b = res.phi() as f64 * ksum((0..res.len()).filter(|&i| res.is_unit[i]).map(|i| fx[i].norm_sqr()));
    let opened = ksum(fx.iter().map(|z| z.norm_sqr()));
    let rel_diff = (side_a - side_b).abs() / side_a.abs().max(f64::MIN_POSITIVE);

    // diagonal ℓ1 r1 = ℓ2 r2
    let index: HashMap<Elem, usize> = rs.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut diag_terms = Vec::new();
    let mut diagonal_pairs = 0;
    for (i1, &e1) in ells.iter().enumerate() {
        for (j1, &r1) in rs.iter().enumerate() {
            let prod = k.mul(e1, r1);
            for (i2, &e2) in ells.iter().enumerate() {
                let Some(r2) = k.div_exact(prod, e2) else { continue };
                let Some(&j2) = index.get(&r2) else { continue };
                diagonal_pairs += 1;
                diag_terms.push(chi_bar[i1] * chi_bar[i2].conj() * c[j1] * c[j2].conj());
            }
        }
    }
    let diagonal = ksum_c(diag_terms);

    // off-diagonal: ℓ1 r1 - ℓ2 r2 = q' for 0 ≠ q' ∈ q, one shifted sum per (ℓ1, ℓ2, q')
    let mut jobs = Vec::new();
    for i1 in 0..ells.len() {
        for i2 in 0..ells.len() {
            let (s1, s2) = (k.embed(ells[i1]), k.embed(ells[i2]));
            let qbox: Vec<(f64, f64)> = (0..k.d).map(|j| (s1[j] * bx[j].0 - s2[j] * bx[j].1, s1[j] * bx[j].1 - s2[j] * bx[j].0)).collect();
            for qq in enumerate_in_box(k, q, &qbox, false)? {
                if !qq.is_zero() {
                    jobs.push((i1, i2, qq));
                }
            }
        }
    }
    let scale = vec![yd; k.d];
    let sums = exec::map(exec, &jobs, |&(i1, i2, qq)| -> Result<Complex64> {
        let w1 = Dilated { inner: w, by: k.embed(ells[i1]) };
        let w2 = Dilated { inner: w, by: k.embed(ells[i2]) };
        let query = ShiftedQuery {
            sys1: sys,
            sys2: sys,
            l1: ells[i1],
            l2: ells[i2],
            y: Ideal::unit(k.dsq),
            q: qq,
            scale: scale.clone(),
            w1: &w1,
            w2: &w2,
        };
        Ok(chi_bar[i1] * chi_bar[i2].conj() * shifted_sum(&query)?.value)
    });
    let offdiagonal = ksum_c(sums.into_iter().collect::<Result<Vec<_>>>()?);
    let opened_rel_diff = (diagonal + offdiagonal - opened).norm() / opened.max(f64::MIN_POSITIVE);
    if rel_diff > 1e-9 {
        return Err(Error::Certificate(format!("Plancherel sides differ: relative {rel_diff:.3e}")));
    }
    Ok(AmplifiedMoment {
        side_a,
        side_b,
        rel_diff,
        opened,
        diagonal,
        offdiagonal,
        opened_rel_diff,
        diagonal_pairs,
        amplifier: ells,
        support: rs.len(),
        shifted_sums: jobs.len(),
        characters: xis.len(),
    })
}

#[derive(Clone, Debug)]
pub struct AfeSum {
    pub value: Complex64,
    pub terms: usize,
    /// Σ τ(m) N(m)^{θ-1/2} sup|V| over the support
    pub trivial_bound: f64,
}

/// Σ_m λ(m) χ(m) N(m)^{-1/2} V(N(m)/Y) over integral ideals, V supported in [1/2, 2].
pub fn afe_sum(sys: &EigenvalueSystem, chi: &HeckeCharacter, y: f64, v: &dyn Weight) -> Result<AfeSum> {
    let k = &sys.field;
    if chi.field() != k {
        return domain("χ and the system live over different fields");
    }
    let sup = v.support();
    if sup.len() != 1 || sup[0].0 < 0.5 - 1e-12 || sup[0].1 > 2.0 + 1e-12 {
        return domain("V must be a one-variable weight supported in [1/2, 2]");
    }
    if !(y > 0.0 && y.is_finite()) {
        return domain("Y must be positive");
    }
    let mut terms = Vec::new();
    let mut bound = Vec::new();
    for (m, f) in ideals_up_to(k, (sup[0].1 * y).floor() as u64) {
        let n = m.norm() as f64;
        let vv = v.eval(&[n / y]);
        if vv == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (_, _, tau) = arith_functions(&f);
        bound.push(tau as f64 * n.powf(sys.theta - 0.5) * v.sup());
        terms.push(sys.lambda_from_factorization(&f)? * chi.eval_on_ideal(&m)? / n.sqrt() * vv);
    }
    Ok(AfeSum { terms: terms.len(), value: ksum_c(terms), trivial_bound: ksum(bound) })
}
