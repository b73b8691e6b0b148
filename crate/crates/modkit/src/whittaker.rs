//! Classical and normalized Whittaker functions, their L²(R^×, d^×y) inner
//! products, the pointwise bounds, and the A^μ norm.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::special::gamma::{gamma_real, is_nonpositive_integer, lgamma};
use crate::special::quad;

const ADMISSIBLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Laguerre,
    Integral,
    Recurrence,
    Series,
}

fn near_int(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < ADMISSIBLE_TOL).then_some(r as i64)
}

/// Generalized Laguerre polynomial L_n^{(α)}(x).
fn laguerre(n: u64, alpha: f64, x: f64) -> f64 {
    let (mut l0, mut l1) = (1.0, 1.0 + alpha - x);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

fn w_integral(kappa: f64, mu: Complex64, x: f64) -> Result<Complex64> {
    let a = mu - kappa + 0.5;
    let b = mu + kappa - 0.5;
    // |W| <= x^{|κ|+|μ|+1} e^{-x/2} well before this; the result underflows
    if -x / 2.0 + (kappa.abs() + mu.norm() + 1.0) * x.ln() < -745.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if a.re <= 0.0 {
        return domain("integral representation needs Re(μ - κ + 1/2) > 0");
    }
    let q = quad::exp_sinh(
        |s: f64| (-s + (a - 1.0) * s.ln() + b * (x + s).ln()).exp(),
        0.0,
        1e-13,
    );
    if q.err > 1e-9 * q.value.norm() {
        // oscillatory cancellation: judge against the mass of |integrand|
        let mass = quad::exp_sinh(
            |s: f64| Complex64::new((-s + (a.re - 1.0) * s.ln() + b.re * (x + s).ln()).exp(), 0.0),
            0.0,
            1e-10,
        );
        if q.err <= 1e-13 * mass.value.re {
            let pref = ((0.5 - mu) * x.ln() - x / 2.0 - lgamma(a)).exp();
            return Ok(pref * q.value);
        }
        return Err(Error::NoConvergence(format!("W integral κ={kappa} μ={mu} x={x}: err {}", q.err)));
    }
    // t = s/x
    let pref = ((0.5 - mu) * x.ln() - x / 2.0 - lgamma(a)).exp();
    Ok(pref * q.value)
}

/// W_{κ,μ}(x) for real κ, complex μ, x > 0, with the route used.
pub fn whittaker_w(kappa: f64, mu: Complex64, x: f64) -> Result<(Complex64, Route)> {
    let r = whittaker_w_inner(kappa, mu, x);
    if let Ok((_, route)) = &r {
        log::trace!("W(κ={kappa}, μ={mu}, x={x}) via {route:?}");
    }
    r
}

fn whittaker_w_inner(kappa: f64, mu: Complex64, x: f64) -> Result<(Complex64, Route)> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("x = {x} must be positive"));
    }
    // symmetric in μ; Re μ >= 0 is the convergent branch for the integral
    let mu = if mu.re < 0.0 || (mu.re == 0.0 && mu.im < 0.0) { -mu } else { mu };
    for m in [mu, -mu] {
        if m.im.abs() < ADMISSIBLE_TOL {
            if let Some(n) = near_int(kappa - m.re - 0.5) {
                if n >= 0 {
                    let n = n as u64;
                    let fact: f64 = (1..=n).map(|k| k as f64).product();
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let v = sign * fact * ((m.re + 0.5) * x.ln() - x / 2.0).exp() * laguerre(n, 2.0 * m.re, x);
                    return Ok((Complex64::new(v, 0.0), Route::Laguerre));
                }
            }
        }
    }
    let two_mu = 2.0 * mu;
    let dist = (two_mu - two_mu.re.round()).norm();
    if x < 1.0 && dist > 1e-2 {
        return Ok((w_series(kappa, mu, x), Route::Series));
    }
    if (mu - kappa + 0.5).re > 0.25 {
        return Ok((w_integral(kappa, mu, x)?, Route::Integral));
    }
    Ok((w_recurrence(kappa, mu, x)?, Route::Recurrence))
}

/// e^{-x/2} x^{1/2+μ} M(1/2+μ-κ, 1+2μ, x)
fn kummer_m_whittaker(kappa: f64, mu: Complex64, x: f64) -> Complex64 {
    let (a, b) = (mu + 0.5 - kappa, 1.0 + 2.0 * mu);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..200 {
        let kf = k as f64;
        term *= (a + kf) / ((b + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    ((mu + 0.5) * x.ln() - x / 2.0).exp() * sum
}

/// Connection formula W = Γ(-2μ)/Γ(1/2-μ-κ) M_{κ,μ} + Γ(2μ)/Γ(1/2+μ-κ) M_{κ,-μ}, for 2μ ∉ Z.
fn w_series(kappa: f64, mu: Complex64, x: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for m in [mu, -mu] {
        let den = 0.5 - m - kappa;
        if is_nonpositive_integer(den) {
            continue;
        }
        total += (lgamma(-2.0 * m) - lgamma(den)).exp() * kummer_m_whittaker(kappa, m, x);
    }
    total
}

fn w_recurrence(kappa: f64, mu: Complex64, x: f64) -> Result<Complex64> {
    // W_{k+1} = (x - 2k) W_k - (k - μ - 1/2)(k + μ - 1/2) W_{k-1}
    let steps = ((kappa - mu.re - 0.25).floor() as i64 + 1).max(1);
    if steps > 60 {
        return Err(Error::NoConvergence(format!("κ = {kappa} too far above Re μ for the recurrence")));
    }
    let k0 = kappa - steps as f64;
    let mut wm = w_integral(k0 - 1.0, mu, x)?;
    let mut w = w_integral(k0, mu, x)?;
    let mut k = k0;
    for _ in 0..steps {
        let next = (x - 2.0 * k) * w - (k - mu - 0.5) * (k + mu - 0.5) * wm;
        wm = w;
        w = next;
        k += 1.0;
    }
    Ok(w)
}

/// Weight vector q and spectral parameters ν, one per place.
#[derive(Clone, Debug, PartialEq)]
pub struct WhittakerSpec {
    pub q: Vec<i64>,
    pub nu: Vec<Complex64>,
}

impl WhittakerSpec {
    pub fn new(q: Vec<i64>, nu: Vec<Complex64>) -> Result<Self> {
        if q.len() != nu.len() || q.is_empty() {
            return domain("q and ν must have the same positive length");
        }
        for (&qj, &nj) in q.iter().zip(&nu) {
            if !admissible(qj, nj) {
                return domain(format!("(q, ν) = ({qj}, {nj}) is not admissible"));
            }
        }
        Ok(WhittakerSpec { q, nu })
    }

    pub fn single(q: i64, nu: Complex64) -> Result<Self> {
        Self::new(vec![q], vec![nu])
    }
}

/// q even: ν ∈ (1/2 + Z) ∪ iR ∪ (-1/2, 1/2); q odd: ν ∈ Z ∪ iR.
pub fn admissible(q: i64, nu: Complex64) -> bool {
    let imag = nu.re.abs() < ADMISSIBLE_TOL;
    let real = nu.im.abs() < ADMISSIBLE_TOL;
    if imag {
        return true;
    }
    if !real {
        return false;
    }
    if q % 2 == 0 {
        nu.re.abs() < 0.5 || near_int(nu.re - 0.5).is_some()
    } else {
        near_int(nu.re).is_some()
    }
}

/// W̃_{q/2,ν}(y) at a single place.
pub fn normalized_whittaker_1(q: i64, nu: Complex64, y: f64) -> Result<Complex64> {
    if !admissible(q, nu) {
        return domain(format!("(q, ν) = ({q}, {nu}) is not admissible"));
    }
    if y == 0.0 || !y.is_finite() {
        return domain("y must be a nonzero real");
    }
    let s = y.signum();
    let kappa = s * q as f64 / 2.0;
    let a = Complex64::new(0.5 + kappa, 0.0) - nu;
    let b = Complex64::new(0.5 + kappa, 0.0) + nu;
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_rad = if nu.re.abs() < ADMISSIBLE_TOL {
        2.0 * lgamma(b).re
    } else {
        let r = gamma_real(a.re) * gamma_real(b.re);
        if !(r > 0.0) {
            return domain(format!("nonpositive Γ product {r} for (q, ν) = ({q}, {nu})"));
        }
        r.ln()
    };
    let (w, _) = whittaker_w(kappa, nu, 4.0 * PI * y.abs())?;
    let phase = Complex64::from_polar(1.0, PI / 2.0 * kappa);
    Ok(phase * w * (-0.5 * ln_rad).exp())
}

/// Product of the per-place normalized Whittaker functions.
pub fn normalized_whittaker(spec: &WhittakerSpec, y: &[f64]) -> Result<Complex64> {
    if y.len() != spec.q.len() {
        return domain("y has the wrong dimension");
    }
    let mut v = Complex64::new(1.0, 0.0);
    for j in 0..y.len() {
        v *= normalized_whittaker_1(spec.q[j], spec.nu[j], y[j])?;
    }
    Ok(v)
}

/// ⟨W̃_{q/2,ν}, W̃_{q'/2,ν}⟩ = ∫_{R^×} W̃_q conj(W̃_{q'}) d^×y.
pub fn whittaker_inner(q: i64, q2: i64, nu: Complex64) -> Result<f64> {
    Ok(whittaker_inner_c(q, q2, nu)?.re)
}

pub fn whittaker_inner_c(q: i64, q2: i64, nu: Complex64) -> Result<Complex64> {
    for (qq, n) in [(q, nu), (q2, nu)] {
        if !admissible(qq, n) {
            return domain(format!("(q, ν) = ({qq}, {n}) is not admissible"));
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for s in [1.0f64, -1.0] {
        let err = std::cell::Cell::new(None);
        let qd = quad::exp_sinh_abs(
            |y: f64| {
                if y <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let a = normalized_whittaker_1(q, nu, s * y);
                let b = normalized_whittaker_1(q2, nu, s * y);
                match (a, b) {
                    (Ok(a), Ok(b)) => a * b.conj() / y,
                    (Err(e), _) | (_, Err(e)) => {
                        err.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            INNER_Y0,
            1e-10,
            1e-10,
        );
        if let Some(e) = err.take() {
            return Err(e);
        }
        if qd.err > 1e-7 {
            return Err(Error::NoConvergence(format!("inner product quadrature error {}", qd.err)));
        }
        total += qd.value;
    }
    Ok(total)
}

/// Lower cutoff of the inner-product quadrature; see `inner_tail_bound`.
pub const INNER_Y0: f64 = 1e-16;

/// Estimate of the omitted ∫_{|y| < INNER_Y0} |W̃_q W̃_{q'}| d^×y from the calibrated
/// bounds, |W̃| ≤ C |y|^{1/2-a-ε} S^{1+a} with a = |Re ν|.
pub fn inner_tail_bound(q: i64, q2: i64, nu: Complex64) -> f64 {
    let a = nu.re.abs();
    let e = 1.0 - 2.0 * a - 2.0 * BOUND_EPS;
    let c = BOUND2_C.max(BOUND3_C);
    let s = |q: i64| (q.unsigned_abs() as f64 + nu.norm() + 1.0).powf(1.0 + a);
    2.0 * c * c * s(q) * s(q2) * INNER_Y0.powf(e) / e
}

/// Gram matrix of {W̃_{q/2,ν}} over the given weights.
pub fn gram_matrix(qs: &[i64], nu: Complex64, exec: crate::Exec) -> Result<Vec<Vec<Complex64>>> {
    let pairs: Vec<(usize, usize)> = (0..qs.len()).flat_map(|i| (i..qs.len()).map(move |j| (i, j))).collect();
    let vals = crate::exec::map(exec, &pairs, |&(i, j)| whittaker_inner_c(qs[i], qs[j], nu));
    let mut g = vec![vec![Complex64::new(0.0, 0.0); qs.len()]; qs.len()];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        let v = v?;
        g[i][j] = v;
        g[j][i] = v.conj();
    }
    Ok(g)
}

/// Constants of the pointwise bounds: twice the maxima observed by
/// `max_bound_ratios(1, 200)` (0.106, 1.053, 1.053), then frozen.
pub const BOUND1_C: f64 = 0.22;
pub const BOUND2_C: f64 = 2.2;
pub const BOUND3_C: f64 = 2.2;
pub const BOUND_EPS: f64 = 0.1;

/// |y|^{1/2} (|y|/(|q|+|ν|+1))^{-1-|Re ν|} exp(-|y|/(|q|+|ν|+1))
pub fn bound1_shape(q: i64, nu: Complex64, y: f64) -> f64 {
    let s = q.unsigned_abs() as f64 + nu.norm() + 1.0;
    let ay = y.abs();
    ay.sqrt() * (ay / s).powf(-1.0 - nu.re.abs()) * (-ay / s).exp()
}

/// |y|^{1/2-ε} (|q|+|ν|+1), for ν ∈ (1/2)Z ∪ iR.
pub fn bound2_shape(q: i64, nu: Complex64, y: f64, eps: f64) -> f64 {
    y.abs().powf(0.5 - eps) * (q.unsigned_abs() as f64 + nu.norm() + 1.0)
}

/// |y|^{1/2-|ν|-ε} (|q|+|ν|+1)^{1+|ν|}, for ν ∈ (-1/2, 1/2).
pub fn bound3_shape(q: i64, nu: Complex64, y: f64, eps: f64) -> f64 {
    let a = nu.re.abs();
    y.abs().powf(0.5 - a - eps) * (q.unsigned_abs() as f64 + a + 1.0).powf(1.0 + a)
}

/// A random admissible triple (q, ν, y): |q| ≤ 10, |Im ν| ≤ 10, 10^{-3} ≤ |y| ≤ 30.
pub fn sample_admissible<R: rand::Rng>(rng: &mut R) -> (i64, Complex64, f64) {
    let q: i64 = rng.gen_range(-10..=10);
    let nu = match (q % 2 == 0, rng.gen_range(0..3)) {
        (_, 0) => Complex64::new(0.0, rng.gen_range(0.0..10.0)),
        (true, 1) => Complex64::new(rng.gen_range(-0.499..0.499), 0.0),
        (true, _) => Complex64::new([-1.5, -0.5, 0.5, 1.5][rng.gen_range(0..4)], 0.0),
        (false, _) => Complex64::new(rng.gen_range(-2..=2) as f64, 0.0),
    };
    let y = 10f64.powf(rng.gen_range(-3.0..1.5)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (q, nu, y)
}

/// Largest observed |W̃|/shape for the three bounds over `n` seeded samples.
/// Samples outside a bound's ν-range do not count towards it.
pub fn max_bound_ratios(seed: u64, n: usize) -> Result<[f64; 3]> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 3];
    for _ in 0..n {
        let (q, nu, y) = sample_admissible(&mut rng);
        let w = normalized_whittaker_1(q, nu, y)?.norm();
        worst[0] = worst[0].max(w / bound1_shape(q, nu, y));
        let real = nu.im == 0.0;
        if !real || (2.0 * nu.re).fract() == 0.0 {
            worst[1] = worst[1].max(w / bound2_shape(q, nu, y, BOUND_EPS));
        }
        if real && nu.re.abs() < 0.5 {
            worst[2] = worst[2].max(w / bound3_shape(q, nu, y, BOUND_EPS));
        }
    }
    Ok(worst)
}

/// Per-coordinate partial derivatives ∂^κ W(y) for a function on (R^×)^d.
pub trait Derivatives: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, kappa: &[usize], y: &[f64]) -> Complex64;
}

/// Derivatives from a closed-form supplier.
pub struct Supplied<F>(pub usize, pub F);

impl<F: Fn(&[usize], &[f64]) -> Complex64 + Sync> Derivatives for Supplied<F> {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, kappa: &[usize], y: &[f64]) -> Complex64 {
        (self.1)(kappa, y)
    }
}

/// Central finite differences with relative step `FD_STEP·max(|y|, 1e-3)`.
pub struct FiniteDifference<F>(pub usize, pub F);

pub const FD_STEP: f64 = 1e-3;

impl<F: Fn(&[f64]) -> Complex64 + Sync> Derivatives for FiniteDifference<F> {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, kappa: &[usize], y: &[f64]) -> Complex64 {
        fn rec<F: Fn(&[f64]) -> Complex64>(f: &F, kappa: &mut Vec<usize>, y: &mut Vec<f64>) -> Complex64 {
            let Some(j) = kappa.iter().position(|&k| k > 0) else { return f(y) };
            let h = FD_STEP * y[j].abs().max(1e-3);
            kappa[j] -= 1;
            let y0 = y[j];
            y[j] = y0 + h;
            let a = rec(f, kappa, y);
            y[j] = y0 - h;
            let b = rec(f, kappa, y);
            y[j] = y0;
            kappa[j] += 1;
            (a - b) / (2.0 * h)
        }
        rec(&self.1, &mut kappa.to_vec(), &mut y.to_vec())
    }
}

fn integrate_rx(d: usize, f: &dyn Fn(&[f64]) -> f64, tol: f64) -> f64 {
    // ∫_{(R^×)^d} f d^×y, nested exp-sinh over |y_j| and both signs
    fn rec(d: usize, j: usize, y: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64, tol: f64) -> f64 {
        if j == d {
            return f(y);
        }
        let mut total = 0.0;
        for s in [1.0f64, -1.0] {
            let yc = std::cell::RefCell::new(y.clone());
            let q = quad::exp_sinh(
                |t: f64| {
                    if t <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let mut yy = yc.borrow_mut();
                    yy[j] = s * t;
                    let mut copy = yy.clone();
                    drop(yy);
                    Complex64::new(rec(d, j + 1, &mut copy, f, tol) / t, 0.0)
                },
                0.0,
                tol,
            );
            total += q.value.re;
        }
        total
    }
    rec(d, 0, &mut vec![1.0; d], f, tol)
}

/// The A^μ norm: Σ_{|μ_j| ≤ μ} Σ_{κ ≤ μ_j} (∫ |∂^κ W|² Π(|y_j| + |y_j|^{-1})^{μ_j} d^×y)^{1/2}.
pub fn a_norm(w: &dyn Derivatives, mu: usize) -> Result<f64> {
    let d = w.dim();
    if !(1..=2).contains(&d) {
        return domain("A-norm implemented for d ∈ {1, 2}");
    }
    let mut multis: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..d {
        multis = multis.into_iter().flat_map(|m| (0..=mu).map(move |k| [m.clone(), vec![k]].concat())).collect();
    }
    let mut total = 0.0;
    for mus in multis.iter().filter(|m| m.iter().sum::<usize>() <= mu) {
        let mut kappas: Vec<Vec<usize>> = vec![vec![]];
        for &mj in mus {
            kappas = kappas.into_iter().flat_map(|m| (0..=mj).map(move |k| [m.clone(), vec![k]].concat())).collect();
        }
        for ks in &kappas {
            let f = |y: &[f64]| {
                let v = w.eval(ks, y).norm_sqr();
                let wt: f64 = y.iter().zip(mus).map(|(yj, &m)| (yj.abs() + 1.0 / yj.abs()).powi(m as i32)).product();
                v * wt
            };
            let i = integrate_rx(d, &f, 1e-10);
            if !i.is_finite() {
                return Err(Error::NoConvergence("divergent A-norm integrand".into()));
            }
            total += i.sqrt();
        }
    }
    Ok(total)
}
