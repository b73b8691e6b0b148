//! Local newvectors of H(χ, χ^{-1}), Eisenstein Hecke eigenvalues and oldform
//! coefficients, constant-term local factors, and the size of the first coefficient.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::characters::HeckeCharacter;
use crate::error::{domain, Error, Result};
use crate::nf::{self, arith_functions, Field, Ideal, PrimeIdeal};
use crate::special::gamma::lgamma;

pub fn local_dimension(n: u32, m: u32) -> u32 {
    (n + 1).saturating_sub(2 * m)
}

/// a + b√N with exact rational a, b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt {
    pub a: BigRational,
    pub b: BigRational,
    pub n: u64,
}

impl QSqrt {
    fn zero(n: u64) -> Self {
        QSqrt { a: BigRational::zero(), b: BigRational::zero(), n }
    }

    fn rat(n: u64, a: BigRational) -> Self {
        QSqrt { a, b: BigRational::zero(), n }
    }

    /// ±N^{e/2} times a rational factor
    fn half_power(n: u64, e: i64, factor: BigRational) -> Self {
        let nn = BigRational::from_integer(BigInt::from(n));
        let p = |k: i64| if k >= 0 { num_traits::pow(nn.clone(), k as usize) } else { num_traits::pow(nn.recip(), (-k) as usize) };
        if e.rem_euclid(2) == 0 {
            QSqrt::rat(n, factor * p(e / 2))
        } else {
            QSqrt { a: BigRational::zero(), b: factor * p((e - 1).div_euclid(2)), n }
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let nn = BigRational::from_integer(BigInt::from(self.n));
        QSqrt { a: &self.a * &o.a + &self.b * &o.b * nn, b: &self.a * &o.b + &self.b * &o.a, n: self.n }
    }

    fn add(&self, o: &Self) -> Self {
        QSqrt { a: &self.a + &o.a, b: &self.b + &o.b, n: self.n }
    }

    fn scale(&self, r: &BigRational) -> Self {
        QSqrt { a: &self.a * r, b: &self.b * r, n: self.n }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * (self.n as f64).sqrt()
    }
}

/// φ_{𝔭,j} for a prime of norm N with m = v_𝔭(c_χ); n is the level exponent when given.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalVectorSpec {
    pub np: u64,
    pub j: u32,
    pub m: u32,
    pub n: Option<u32>,
}

/// Values of φ_{𝔭,j} on the level sets {v(b) = v}, v < values.len(), and on {v(b) ≥ values.len()};
/// in the ramified case the values carry the unimodular factor χ_𝔭(a b^{-1}).
#[derive(Clone, Debug)]
pub struct LocalProfile {
    pub spec: LocalVectorSpec,
    pub values: Vec<QSqrt>,
    pub tail: QSqrt,
    pub phase: bool,
}

impl LocalVectorSpec {
    pub fn profile(&self) -> Result<LocalProfile> {
        let (np, j, m) = (self.np, self.j, self.m);
        if np < 2 {
            return domain("N𝔭 must be at least 2");
        }
        if let Some(n) = self.n {
            if j + 2 * m > n {
                return domain(format!("index j = {j} exceeds n - 2m = {}", n as i64 - 2 * m as i64));
            }
        }
        let one = BigRational::one();
        let nn = BigRational::from_integer(BigInt::from(np));
        let one_minus = &one - nn.recip();
        let z = QSqrt::zero(np);
        let p = if m > 0 {
            let mut values = vec![z.clone(); (m + j) as usize];
            values.push(QSqrt::half_power(np, (m + j) as i64, one));
            LocalProfile { spec: *self, values, tail: z, phase: true }
        } else {
            match j {
                0 => LocalProfile { spec: *self, values: vec![], tail: QSqrt::rat(np, one), phase: false },
                1 => LocalProfile {
                    spec: *self,
                    values: vec![QSqrt::half_power(np, -1, one.clone())],
                    tail: QSqrt::half_power(np, 1, -one),
                    phase: false,
                },
                _ => {
                    let mut values = vec![z; (j - 1) as usize];
                    values.push(QSqrt::half_power(np, j as i64 - 2, -one));
                    LocalProfile { spec: *self, values, tail: QSqrt::half_power(np, j as i64, one_minus), phase: false }
                }
            }
        };
        Ok(p)
    }
}

/// measure{v(b) ≥ k} = 1 for k = 0 and 1/(N^k (1 + 1/N)) for k ≥ 1.
pub fn level_measure_ge(np: u64, k: u32) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let n = BigInt::from(np);
    BigRational::new(BigInt::one(), num_traits::pow(n.clone(), (k - 1) as usize) * (n + 1))
}

fn level_measure_eq(np: u64, k: u32) -> BigRational {
    level_measure_ge(np, k) - level_measure_ge(np, k + 1)
}

impl LocalProfile {
    fn at(&self, v: usize) -> &QSqrt {
        self.values.get(v).unwrap_or(&self.tail)
    }
}

/// ⟨φ_i, φ_j⟩ exactly. Ramified vectors with different indices have disjoint supports;
/// on a common support the phases cancel in φ conj(φ).
pub fn local_inner(a: &LocalProfile, b: &LocalProfile) -> Result<QSqrt> {
    if a.spec.np != b.spec.np || a.spec.m != b.spec.m {
        return domain("vectors from different local spaces");
    }
    let np = a.spec.np;
    let l = a.values.len().max(b.values.len());
    let mut acc = QSqrt::zero(np);
    for v in 0..l {
        let t = a.at(v).mul(b.at(v));
        if t.is_zero() {
            continue;
        }
        if a.phase && a.spec.j != b.spec.j {
            return Err(Error::Domain("overlapping ramified supports".into()));
        }
        acc = acc.add(&t.scale(&level_measure_eq(np, v as u32)));
    }
    let t = a.tail.mul(&b.tail);
    if !t.is_zero() {
        acc = acc.add(&t.scale(&level_measure_ge(np, l as u32)));
    }
    Ok(acc)
}

/// ‖φ_{𝔭,j}‖² as an exact rational.
pub fn local_vector_norm_sq(spec: &LocalVectorSpec) -> Result<BigRational> {
    let p = spec.profile()?;
    let v = local_inner(&p, &p)?;
    if !v.b.is_zero() {
        return Err(Error::Domain("norm is not rational".into()));
    }
    Ok(v.a)
}

/// [K(𝔬) : K(c)] = Π_{𝔭^j ‖ c} N𝔭^{j-1}(N𝔭 + 1).
pub fn coset_index(k: &Field, c: &Ideal) -> Result<u128> {
    let mut idx = 1u128;
    for (p, e) in c.factor(k)? {
        let n = p.norm() as u128;
        idx = idx.checked_mul(n.pow(e - 1) * (n + 1)).ok_or(Error::Overflow("coset index"))?;
    }
    Ok(idx)
}

/// λ_{χ,χ^{-1}}(m) = Σ_{ab=m} χ(a b^{-1}) for m coprime to the modulus of χ, else 0.
/// χ is taken primitive, so its modulus is c_χ.
pub fn eis_hecke_eigenvalue(chi: &HeckeCharacter, m: &Ideal) -> Result<Complex64> {
    let k = chi.field();
    eis_hecke_from_factorization(chi, &m.factor(k)?)
}

pub fn eis_hecke_from_factorization(chi: &HeckeCharacter, f: &[(PrimeIdeal, u32)]) -> Result<Complex64> {
    let mut v = Complex64::new(1.0, 0.0);
    for (p, e) in f {
        v *= local_hecke(chi, p, *e)?;
    }
    Ok(v)
}

fn local_hecke(chi: &HeckeCharacter, p: &PrimeIdeal, e: u32) -> Result<Complex64> {
    let z = chi.eval_on_ideal(&p.ideal)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(if e == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }
    let zi = z.inv();
    Ok((0..=e).map(|j| z.powi(j as i32) * zi.powi((e - j) as i32)).sum())
}

/// ∫_{v(ξ) = -j} ψ(-r y δ^{-1} ξ) dξ for n = v_𝔭(ry).
fn layer(np: f64, j: u32, n: u32) -> f64 {
    if j == 0 {
        1.0
    } else if j <= n {
        np.powi(j as i32) * (1.0 - 1.0 / np)
    } else if j == n + 1 {
        -np.powi(n as i32)
    } else {
        0.0
    }
}

/// The local integral of φ_{𝔭,τ} (unramified χ_𝔭) against ψ at n = v_𝔭(ry), by level sets:
/// Σ_v φ_τ(v) x^v N^{-v} layer(v, n), x = χ_𝔭(ϖ)².
pub fn unramified_local_integral(np: u64, tau: u32, x: Complex64, n: u32) -> Result<Complex64> {
    let prof = LocalVectorSpec { np, j: tau, m: 0, n: None }.profile()?;
    let nf = np as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for v in 0..=(n + 1) {
        let phi = prof.at(v as usize).to_f64();
        acc += phi * x.powi(v as i32) * nf.powi(-(v as i32)) * layer(nf, v, n);
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
struct LocalT {
    prime: PrimeIdeal,
    tau: u32,
    ramified: bool,
    /// χ_𝔭(ϖ) when unramified
    chi_p: Complex64,
    e: u32,
}

/// t_χ, F_{χ,t} and the local data of λ_{χ,t} for an oldform ideal t.
#[derive(Clone, Debug)]
pub struct EisCoefficientContext {
    pub chi: HeckeCharacter,
    pub t: Ideal,
    pub t_chi: Ideal,
    pub f: f64,
    tau_t: u64,
    local: Vec<LocalT>,
}

/// χ_𝔭²(ϖ) = -1 is decided with this tolerance.
pub const MINUS_ONE_TOL: f64 = 1e-12;

impl EisCoefficientContext {
    pub fn new(chi: &HeckeCharacter, t: &Ideal) -> Result<Self> {
        let k = chi.field();
        let c = chi.modulus();
        let tf = t.factor(k)?;
        let (_, _, tau_t) = arith_functions(&tf);
        let mut local = Vec::new();
        let mut tchi_f = Vec::new();
        let mut f = 1.0;
        for (p, tau) in tf {
            let ramified = p.ideal.divides(&c);
            let (chi_p, e) = if ramified {
                (Complex64::new(0.0, 0.0), tau)
            } else {
                let z = chi.eval_on_ideal(&p.ideal)?;
                let x = z * z;
                let e = match tau {
                    1 if (x + 1.0).norm() < MINUS_ONE_TOL => 1,
                    1 => {
                        f /= (1.0 + x).norm();
                        0
                    }
                    _ => tau.saturating_sub(2),
                };
                (z, e)
            };
            if e > 0 {
                tchi_f.push((p, e));
            }
            local.push(LocalT { prime: p, tau, ramified, chi_p, e });
        }
        let t_chi = nf::product(k, &tchi_f);
        Ok(EisCoefficientContext { chi: chi.clone(), t: *t, t_chi, f, tau_t, local })
    }

    /// t t_χ^{-1}
    pub fn t_over_tchi(&self) -> Ideal {
        self.t.div_exact(self.chi.field(), &self.t_chi).expect("t_χ divides t")
    }

    /// λ_{χ,t}(m), multiplicative, from the local integrals.
    pub fn lambda_chi_t(&self, m: &Ideal) -> Result<Complex64> {
        let k = self.chi.field();
        let mut v = Complex64::new(1.0, 0.0);
        for (p, e) in m.factor(k)? {
            v *= self.local_lambda(&p, e)?;
        }
        Ok(v)
    }

    fn local_lambda(&self, p: &PrimeIdeal, kexp: u32) -> Result<Complex64> {
        let Some(lt) = self.local.iter().find(|l| l.prime == *p) else {
            return local_hecke(&self.chi, p, kexp);
        };
        if lt.ramified {
            return Ok(if kexp == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        }
        let np = p.norm();
        let x = lt.chi_p * lt.chi_p;
        let base = unramified_local_integral(np, lt.tau, x, lt.e)?;
        if base.norm() < 1e-300 {
            return Err(Error::Domain("vanishing local coefficient at t_χ".into()));
        }
        let top = unramified_local_integral(np, lt.tau, x, lt.e + kexp)?;
        Ok(lt.chi_p.inv().powi(kexp as i32) * top / base)
    }

    /// λ^{(t)}_{χ,χ^{-1}}(m)
    pub fn coefficient(&self, m: &Ideal) -> Result<Complex64> {
        let k = self.chi.field();
        let Some(q) = m.div_exact(k, &self.t_chi) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let scale = self.t_chi.norm() as f64 / (self.f * self.tau_t as f64 * (self.t.norm() as f64).sqrt());
        Ok(scale * self.lambda_chi_t(&q)?)
    }
}

pub fn oldform_eis_coefficient(ctx: &EisCoefficientContext, m: &Ideal) -> Result<Complex64> {
    ctx.coefficient(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstantTermCase {
    Unramified,
    /// v = v_𝔭(c)
    Level { v: u32 },
    /// h_𝔭 = (0, -δ^{-1}; δ, η) with v_𝔭(η) = eta_val
    LevelEta { v: u32, eta_val: i64 },
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re <= 0.0 {
        return domain("Re s must be positive");
    }
    Ok(())
}

/// Closed forms of the local factors of the constant term.
pub fn constant_term_local_factor(np: u64, s: Complex64, case: ConstantTermCase) -> Result<Complex64> {
    check_s(s)?;
    let n = np as f64;
    let pw = |e: Complex64| (e * n.ln()).exp();
    let level = |v: u32| pw(-2.0 * s * v as f64) * (1.0 - 1.0 / n) / (1.0 - pw(-2.0 * s));
    Ok(match case {
        ConstantTermCase::Unramified => (1.0 - pw(-1.0 - 2.0 * s)) / (1.0 - pw(-2.0 * s)),
        ConstantTermCase::Level { v } => level(v),
        ConstantTermCase::LevelEta { v, eta_val } => {
            if eta_val <= -(v as i64) {
                // |η| = N^{-v(η)}
                pw((2.0 * s - 1.0) * (-(eta_val as f64))) * level(v)
            } else {
                Complex64::new(n.powi(-(v as i32)), 0.0)
            }
        }
    })
}

/// The same local integrals summed over the layers v(ξ) = -j, j < depth.
pub fn constant_term_layer_sum(np: u64, s: Complex64, case: ConstantTermCase, depth: u32) -> Result<Complex64> {
    check_s(s)?;
    let n = np as f64;
    let pw = |e: Complex64| (e * n.ln()).exp();
    // ∫_{v(ξ) = -j} |ξ|^{-1-2s} dξ = N^{-j(1+2s)} N^j (1 - 1/N)
    let shell = |j: u32| pw(-(j as f64) * (1.0 + 2.0 * s)) * n.powi(j as i32) * (1.0 - 1.0 / n);
    let level = |v: u32| (v.max(1)..v.max(1) + depth).map(shell).sum::<Complex64>();
    Ok(match case {
        ConstantTermCase::Unramified => 1.0 + (1..depth).map(shell).sum::<Complex64>(),
        ConstantTermCase::Level { v } => level(v),
        ConstantTermCase::LevelEta { v, eta_val } => {
            if eta_val <= -(v as i64) {
                pw((2.0 * s - 1.0) * (-(eta_val as f64))) * level(v)
            } else {
                // ∫_{v(ξ) ≥ v} dξ = Σ_{j ≥ v} N^{-j}(1 - 1/N)
                Complex64::new((v..v + depth).map(|j| n.powi(-(j as i32)) * (1.0 - 1.0 / n)).sum::<f64>(), 0.0)
            }
        }
    })
}

/// H(1/2) = |D_K|^{-1} [K(𝔬):K(c)]^{-1}.
pub fn constant_term_h_at_half(k: &Field, c: &Ideal) -> Result<BigRational> {
    let idx = coset_index(k, c)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(k.disc.unsigned_abs()) * BigInt::from(idx)))
}

#[derive(Clone, Debug)]
pub struct ConstantTermCheck {
    pub exact: BigRational,
    /// (δ, H at s = 1/2 + δ)
    pub samples: Vec<(f64, f64)>,
    pub extrapolated: f64,
}

/// Assembled integral at g = 1 divided by Λ_K(2s)/Λ_K(1+2s), at s = 1/2 + δ, for δ in `deltas`,
/// with both Euler products over the same primes N𝔭 ≤ prime_bound and local layers to `depth`.
/// The limit is estimated by Richardson extrapolation 2H(δ₂) - H(δ₁) for δ₂ = δ₁/2.
pub fn constant_term_numeric(k: &Field, c: &Ideal, deltas: [f64; 2], prime_bound: u64, depth: u32) -> Result<ConstantTermCheck> {
    let exact = constant_term_h_at_half(k, c)?;
    let cf = c.factor(k)?;
    let primes = nf::primes_up_to(k, prime_bound);
    let dk = k.disc.unsigned_abs() as f64;
    let d = k.d as f64;
    let mut samples = Vec::new();
    for &delta in &deltas {
        let s = Complex64::new(0.5 + delta, 0.0);
        // |δ|^{2s} |D_K|^{-1/2} (√π Γ(s)/Γ(1/2+s))^d Π_𝔭 local
        let ln_arch = -2.0 * s * dk.ln() - 0.5 * dk.ln() + d * (0.5 * PI.ln() + lgamma(s) - lgamma(s + 0.5));
        let mut ln_local = Complex64::new(0.0, 0.0);
        for p in &primes {
            let case = match cf.iter().find(|(q, _)| q == p) {
                Some((_, v)) => ConstantTermCase::Level { v: *v },
                None => ConstantTermCase::Unramified,
            };
            ln_local += constant_term_layer_sum(p.norm(), s, case, depth)?.ln();
        }
        // ln Λ_K(w) = (w/2) ln|D_K| + d(-(w/2) ln π + ln Γ(w/2)) - Σ ln(1 - N^{-w})
        let ln_lambda = |w: Complex64| -> Complex64 {
            let mut v = w / 2.0 * dk.ln() + d * (-(w / 2.0) * PI.ln() + lgamma(w / 2.0));
            for p in &primes {
                v -= (1.0 - (-w * (p.norm() as f64).ln()).exp()).ln();
            }
            v
        };
        let h = (ln_arch + ln_local - ln_lambda(2.0 * s) + ln_lambda(1.0 + 2.0 * s)).exp();
        samples.push((delta, h.re));
    }
    let extrapolated = 2.0 * samples[1].1 - samples[0].1;
    Ok(ConstantTermCheck { exact, samples, extrapolated })
}

/// E₁(z) for z ≠ 0 off the negative real axis.
fn exp_int_e1(z: Complex64) -> Complex64 {
    if z.norm() < 12.0 {
        e1_series(z)
    } else {
        e1_asymptotic(z)
    }
}

fn e1_series(z: Complex64) -> Complex64 {
    {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        -0.5772156649015329 - z.ln() - sum
    }
}

fn e1_asymptotic(z: Complex64) -> Complex64 {
    {
        // asymptotic e^{-z}/z Σ (-1)^k k!/z^k, truncated at the smallest term
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..40 {
            let next = term * (-(k as f64)) / z;
            if next.norm() > term.norm() {
                break;
            }
            term = next;
            sum += term;
        }
        (-z).exp() / z * sum
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PartialL {
    pub value: Complex64,
    pub primes_used: usize,
    pub prime_bound: u64,
    /// estimated |error| of the truncated product
    pub tail_estimate: f64,
}

/// L^{(S)}(1, χ²) with S the primes dividing `exclude`, by the Euler product over N𝔭 ≤ P.
/// When χ² is N^{iβ} on ideals, the prime-ideal-theorem main term of the tail
/// Σ_{N𝔭 > P} N𝔭^{-1+iβ} = E₁(-iβ ln P) is added; the reported tail estimate is the
/// RH-scale fluctuation (2 + |β|) √P ln P /(8π P).
pub fn partial_l_chi_squared(chi: &HeckeCharacter, exclude: &Ideal, prime_bound: u64) -> Result<PartialL> {
    let k = chi.field();
    let primes = nf::primes_up_to(k, prime_bound);
    let norm_type = chi.fin.order() <= 2 && chi.t.iter().all(|&t| (t - chi.t[0]).abs() < 1e-15);
    let beta = 2.0 * chi.t[0];
    if norm_type && beta.abs() < 1e-12 {
        return Err(Error::Domain("χ² is trivial: L(s, χ²) has a pole at s = 1".into()));
    }
    let mut ln_l = Complex64::new(0.0, 0.0);
    for p in &primes {
        if p.ideal.divides(exclude) {
            continue;
        }
        let z = chi.eval_on_ideal(&p.ideal)?;
        ln_l -= (1.0 - z * z / p.norm() as f64).ln();
    }
    if norm_type {
        ln_l += exp_int_e1(Complex64::new(0.0, -beta * (prime_bound as f64).ln()));
    }
    let pf = prime_bound as f64;
    let tail_estimate = (2.0 + beta.abs()) * pf.sqrt() * pf.ln() / (8.0 * PI * pf) * ln_l.exp().norm();
    Ok(PartialL { value: ln_l.exp(), primes_used: primes.len(), prime_bound, tail_estimate })
}

#[derive(Clone, Copy, Debug)]
pub struct FourierMagnitude {
    pub value: f64,
    pub l: PartialL,
    /// relative uncertainty inherited from the L-value
    pub rel_err: f64,
}

/// |ρ(t_χ)| = π^{d/2}|D_K|^{-1/2} / (|L^{(t t_χ^{-1})}(1, χ²)| N(t t_χ^{-1})^{1/2} F_{χ,t}).
pub fn newvector_fourier_magnitude(ctx: &EisCoefficientContext, prime_bound: u64) -> Result<FourierMagnitude> {
    let k = ctx.chi.field();
    let tt = ctx.t_over_tchi();
    let l = partial_l_chi_squared(&ctx.chi, &tt, prime_bound)?;
    let num = PI.powf(k.d as f64 / 2.0) / (k.disc.unsigned_abs() as f64).sqrt();
    let value = num / (l.value.norm() * (tt.norm() as f64).sqrt() * ctx.f);
    Ok(FourierMagnitude { value, l, rel_err: l.tail_estimate / l.value.norm() })
}

/// (1 - 1/N)² ≤ ‖φ‖² ≤ 1, exactly.
pub fn norm_in_range(np: u64, v: &BigRational) -> bool {
    let lo = BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(np));
    let lo = &lo * &lo;
    !v.is_negative() && *v >= lo && *v <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::characters_mod;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn dimensions() {
        assert_eq!(local_dimension(3, 1), 2);
        assert_eq!(local_dimension(1, 1), 0);
        assert_eq!(local_dimension(4, 0), 5);
    }

    #[test]
    fn norms_and_orthogonality() {
        let sp = |j, m| LocalVectorSpec { np: 5, j, m, n: None };
        assert_eq!(local_vector_norm_sq(&sp(0, 0)).unwrap(), r(1, 1));
        assert_eq!(local_vector_norm_sq(&sp(2, 0)).unwrap(), r(2, 3));
        assert_eq!(local_vector_norm_sq(&sp(0, 1)).unwrap(), r(2, 3));
        let a = sp(0, 0).profile().unwrap();
        let b = sp(1, 0).profile().unwrap();
        assert!(local_inner(&a, &b).unwrap().is_zero());
        assert!(LocalVectorSpec { np: 5, j: 2, m: 1, n: Some(3) }.profile().is_err());
    }

    #[test]
    fn index_and_h() {
        let q = Field::rationals();
        assert_eq!(coset_index(&q, &Ideal::unit(1)).unwrap(), 1);
        assert_eq!(coset_index(&q, &Ideal::rational(&q, 5)).unwrap(), 6);
        assert_eq!(coset_index(&q, &Ideal::rational(&q, 25)).unwrap(), 30);
        assert_eq!(constant_term_h_at_half(&q, &Ideal::rational(&q, 5)).unwrap(), r(1, 6));
        let k = Field::new(5).unwrap();
        assert_eq!(constant_term_h_at_half(&k, &Ideal::unit(5)).unwrap(), r(1, 5));
        assert_eq!(constant_term_h_at_half(&k, &Ideal::rational(&k, 2)).unwrap(), r(1, 25));
    }

    #[test]
    fn local_factors() {
        let s = Complex64::new(1.0, 0.0);
        let u = constant_term_local_factor(5, s, ConstantTermCase::Unramified).unwrap();
        assert!((u.re - 31.0 / 30.0).abs() < 1e-14);
        let l = constant_term_local_factor(5, s, ConstantTermCase::Level { v: 1 }).unwrap();
        assert!((l.re - 1.0 / 30.0).abs() < 1e-14);
        let big = constant_term_local_factor(5, Complex64::new(60.0, 0.0), ConstantTermCase::Unramified).unwrap();
        assert!((big - 1.0).norm() < 1e-15);
        for case in [
            ConstantTermCase::Unramified,
            ConstantTermCase::Level { v: 2 },
            ConstantTermCase::LevelEta { v: 1, eta_val: -3 },
            ConstantTermCase::LevelEta { v: 2, eta_val: 0 },
        ] {
            for s in [Complex64::new(0.7, 0.0), Complex64::new(1.2, 3.0)] {
                let a = constant_term_local_factor(3, s, case).unwrap();
                let b = constant_term_layer_sum(3, s, case, 40).unwrap();
                assert!((a - b).norm() < 1e-10, "{case:?}: {a} vs {b}");
            }
        }
        assert!(constant_term_local_factor(5, Complex64::new(0.0, 1.0), ConstantTermCase::Unramified).is_err());
    }

    #[test]
    fn hecke_examples() {
        let q = Field::rationals();
        let t = 0.37;
        let g = std::sync::Arc::new(crate::characters::UnitGroup::new(&q, &Ideal::unit(1)).unwrap());
        let chi = HeckeCharacter::new(crate::characters::FiniteCharacter::trivial(g), vec![t], vec![0]).unwrap();
        let l3 = eis_hecke_eigenvalue(&chi, &Ideal::rational(&q, 3)).unwrap();
        assert!((l3.re - 2.0 * (t * 3f64.ln()).cos()).abs() < 1e-14);
        let l9 = eis_hecke_eigenvalue(&chi, &Ideal::rational(&q, 9)).unwrap();
        assert!((l3 * l3 - l9 - 1.0).norm() < 1e-13);
        let c5 = characters_mod(&q, &Ideal::rational(&q, 5)).unwrap();
        let even = c5.iter().find(|c| c.order() == 2).unwrap();
        let chi5 = HeckeCharacter::new(even.clone(), vec![0.0], vec![0]).unwrap();
        assert_eq!(eis_hecke_eigenvalue(&chi5, &Ideal::rational(&q, 10)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oldform_examples() {
        let q = Field::rationals();
        let g = std::sync::Arc::new(crate::characters::UnitGroup::new(&q, &Ideal::unit(1)).unwrap());
        let triv = crate::characters::FiniteCharacter::trivial(g);
        let t = 0.8;
        let chi = HeckeCharacter::new(triv.clone(), vec![t], vec![0]).unwrap();
        // t = (1) reduces to the Hecke eigenvalue
        let ctx = EisCoefficientContext::new(&chi, &Ideal::unit(1)).unwrap();
        for n in [1, 2, 6, 12, 49] {
            let m = Ideal::rational(&q, n);
            assert!((ctx.coefficient(&m).unwrap() - eis_hecke_eigenvalue(&chi, &m).unwrap()).norm() < 1e-13);
        }
        // t = (3): |1 + χ_3(ϖ)²| / (2√3) at m = (1)
        let ctx = EisCoefficientContext::new(&chi, &Ideal::rational(&q, 3)).unwrap();
        let x = Complex64::from_polar(1.0, 2.0 * t * 3f64.ln());
        let want = (1.0 + x).norm() / (2.0 * 3f64.sqrt());
        assert!((ctx.coefficient(&Ideal::unit(1)).unwrap().norm() - want).abs() < 1e-13);
        // χ_p(ϖ)² = -1: t_χ = p and coefficients vanish off p
        let t_m1 = PI / (2.0 * 2f64.ln());
        let chi = HeckeCharacter::new(triv, vec![t_m1], vec![0]).unwrap();
        let ctx = EisCoefficientContext::new(&chi, &Ideal::rational(&q, 2)).unwrap();
        assert_eq!(ctx.t_chi, Ideal::rational(&q, 2));
        assert_eq!(ctx.coefficient(&Ideal::rational(&q, 3)).unwrap(), Complex64::new(0.0, 0.0));
        // λ_{χ,t}(p^k) equals the plain divisor sum there
        for kk in 0..4 {
            let m = Ideal::rational(&q, 2i128.pow(kk));
            assert!((ctx.lambda_chi_t(&m).unwrap() - eis_hecke_eigenvalue(&chi, &m).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_term_limit() {
        let q = Field::rationals();
        let chk = constant_term_numeric(&q, &Ideal::rational(&q, 5), [1e-2, 5e-3], 2000, 40).unwrap();
        assert!((chk.extrapolated - 1.0 / 6.0).abs() < 1e-3, "{chk:?}");
    }

    #[test]
    fn e1_branches_agree() {
        // the series and asymptotic branches meet smoothly near |z| = 12
        let z = Complex64::new(0.0, 12.0);
        let (a, b) = (e1_series(z), e1_asymptotic(z));
        assert!((a - b).norm() < 1e-5, "{a} {b}");
        // E₁(iy) = -Ci(y) + i(Si(y) - π/2), y = 20: Ci = 0.04441982084535331, Si = 1.548241701043440
        let e = exp_int_e1(Complex64::new(0.0, 20.0));
        assert!((e - Complex64::new(-0.04441982084535331, 1.548241701043440 - PI / 2.0)).norm() < 1e-9, "{e}");
    }
}
