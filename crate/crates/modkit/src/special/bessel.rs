//! Bessel functions needed by the Kuznetsov transforms: integer-order J_n,
//! and imaginary-order J_{iμ}, K_{iμ} for real μ, returned with the
//! exponential scale of the order divided out.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{lgamma, ln_cosh};
use super::ode;

const RTOL: f64 = 1e-12;
const SERIES_X: f64 = 1.0;

/// J_n(x) by Miller's backward recurrence with the normalization J_0 + 2ΣJ_{2k} = 1.
pub fn jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let big = (n as f64).max(ax);
    let mut m = (big + 30.0 + 10.0 * big.sqrt()) as usize;
    m += m % 2;
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0f64;
    let mut ans = 0.0f64;
    for k in (1..=m).rev() {
        let jm = 2.0 * k as f64 / ax * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            ans *= 1e-250;
            norm *= 1e-250;
        }
        if (k - 1) == n as usize {
            ans = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    let mut r = ans / norm;
    if x < 0.0 && n % 2 == 1 {
        r = -r;
    }
    r
}

/// Series for f(x)/cosh(πμ/2) with f = J_{iμ} (sign = -1) or I_{iμ} (sign = +1),
/// together with x·d/dx of the same.
fn imag_order_series(mu: f64, x: f64, sign: f64) -> (Complex64, Complex64) {
    let im = Complex64::new(0.0, mu);
    let pref = (im * (x / 2.0).ln() - lgamma(1.0 + im) - ln_cosh(PI * mu / 2.0)).exp();
    let q = sign * x * x / 4.0;
    let mut c = Complex64::new(1.0, 0.0);
    let mut s = c;
    let mut ds = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        c = c * q / (k as f64 * (k as f64 + im));
        s += c;
        ds += 2.0 * k as f64 * c;
        if c.norm() < 1e-18 * s.norm() {
            break;
        }
    }
    (pref * s, pref * (im * s + ds))
}

fn order(xs: &[f64], ascending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    if !ascending {
        idx.reverse();
    }
    idx
}

/// J_{iμ}(x) / cosh(πμ/2) for each x > 0.
pub fn j_imag_scaled(mu: f64, xs: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); xs.len()];
    if xs.is_empty() {
        return out;
    }
    let idx = order(xs, true);
    let x0 = xs[idx[0]].min(SERIES_X);
    let (u0, du0) = imag_order_series(mu, x0, -1.0);
    let s0 = x0.ln();
    let targets: Vec<f64> = idx.iter().map(|&k| xs[k].ln().max(s0)).collect();
    let mu2 = mu * mu;
    let states = ode::integrate(
        |s, y: &[f64; 4]| {
            let w = (2.0 * s).exp() + mu2;
            [y[2], y[3], -w * y[0], -w * y[1]]
        },
        s0,
        [u0.re, u0.im, du0.re, du0.im],
        &targets,
        RTOL,
        0.1 / (1.0 + mu),
    );
    for (pos, &k) in idx.iter().enumerate() {
        out[k] = if xs[k] <= SERIES_X {
            imag_order_series(mu, xs[k], -1.0).0
        } else {
            Complex64::new(states[pos][0], states[pos][1])
        };
    }
    out
}

/// K_{iμ}(x) = e^P ∫_0^∞ Re e^{Φ(v)} dv and -K'_{iμ}(x) = e^P ∫_0^∞ Re[e^{Φ(v)} cosh(v + iθ)] dv on the
/// contour Im u = θ, sin θ = μ/x, through the saddle of e^{-x cosh u + iμu}; returns (P, f, g).
/// Needs x > μ. The trapezoid rule is exponentially accurate for this analytic, even integrand.
fn k_integrals(mu: f64, x: f64) -> (f64, f64, f64) {
    let th = (mu / x).asin();
    let (st, ct) = th.sin_cos();
    let ln_pref = -x * ct - mu * th;
    let umax = (1.0 + 745.0 / (x * ct)).acosh();
    let eval = |h: f64| {
        let n = (umax / h).ceil() as usize;
        let (mut f, mut g) = (0.5, 0.5 * ct);
        for k in 1..=n {
            let v = k as f64 * h;
            let (sh, ch) = (v.sinh(), v.cosh());
            let e = Complex64::from_polar((-x * ct * (ch - 1.0)).exp(), mu * v - x * sh * st);
            f += e.re;
            g += (e * Complex64::new(ch * ct, sh * st)).re;
        }
        (f * h, g * h)
    };
    let mut h = 0.25f64.min(1.0 / (1.0 + (x * ct).sqrt()));
    let mut prev = eval(h);
    for _ in 0..12 {
        h /= 2.0;
        let cur = eval(h);
        let done = (cur.0 - prev.0).abs() <= 1e-14 * cur.0.abs().max(1e-300) && (cur.1 - prev.1).abs() <= 1e-14 * cur.1.abs().max(1e-300);
        prev = cur;
        if done {
            break;
        }
    }
    (ln_pref, prev.0, prev.1)
}

/// sinh(πμ/2)·K_{iμ}(x) for each x > 0 (bounded in μ).
pub fn k_imag_scaled(mu: f64, xs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; xs.len()];
    if xs.is_empty() || mu == 0.0 {
        return out;
    }
    let series = |x: f64| -(PI / 2.0) * imag_order_series(mu, x, 1.0).0.im;
    let large: Vec<usize> = order(xs, false).into_iter().filter(|&k| xs[k] > SERIES_X).collect();
    for (k, &x) in xs.iter().enumerate() {
        if x <= SERIES_X {
            out[k] = series(x);
        }
    }
    if large.is_empty() {
        return out;
    }
    let x_start = xs[large[0]].max(1.1 * mu + 10.0);
    let (ln_pref, f, g) = k_integrals(mu, x_start);
    let sc = (ln_pref + PI * mu / 2.0 + (-(-PI * mu).exp_m1()).ln() - std::f64::consts::LN_2).exp();
    let u0 = sc * f;
    let du0 = -x_start * sc * g;
    let s0 = x_start.ln();
    let targets: Vec<f64> = large.iter().map(|&k| xs[k].ln()).collect();
    let mu2 = mu * mu;
    let states = ode::integrate(
        |s, y: &[f64; 2]| [y[1], ((2.0 * s).exp() - mu2) * y[0]],
        s0,
        [u0, du0],
        &targets,
        RTOL,
        0.05 / (1.0 + mu),
    );
    for (pos, &k) in large.iter().enumerate() {
        out[k] = states[pos][0];
    }
    out
}
