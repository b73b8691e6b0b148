//! Double-exponential and Gauss–Legendre quadrature.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: Complex64,
    /// difference between the last two refinement levels
    pub err: f64,
    pub evals: usize,
}

const MAX_LEVEL: u32 = 10;

/// ∫_a^∞ f(x) dx by the exp-sinh substitution x = a + exp(π/2·sinh t).
/// Suited to algebraic singularities at `a` and exponential decay.
pub fn exp_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, tol: f64) -> Quad {
    exp_sinh_abs(f, a, tol, 0.0)
}

/// As `exp_sinh`, also stopping once the level difference is below `abs_tol`.
pub fn exp_sinh_abs<F: Fn(f64) -> Complex64>(f: F, a: f64, tol: f64, abs_tol: f64) -> Quad {
    de_driver(
        |t| {
            let e = (FRAC_PI_2 * t.sinh()).exp();
            (a + e, FRAC_PI_2 * t.cosh() * e)
        },
        f,
        4.5,
        tol,
        abs_tol,
    )
}

/// ∫_a^b f(x) dx by tanh-sinh.
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Quad {
    let (c, r) = ((a + b) / 2.0, (b - a) / 2.0);
    de_driver(
        |t| {
            let s = FRAC_PI_2 * t.sinh();
            let ch = s.cosh();
            (c + r * s.tanh(), r * FRAC_PI_2 * t.cosh() / (ch * ch))
        },
        f,
        3.2,
        tol,
        0.0,
    )
}

fn de_driver<M, F>(map: M, f: F, tmax: f64, tol: f64, abs_tol: f64) -> Quad
where
    M: Fn(f64) -> (f64, f64),
    F: Fn(f64) -> Complex64,
{
    let eval = |t: f64| -> Complex64 {
        let (x, w) = map(t);
        if w == 0.0 || !w.is_finite() || !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            v * w
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut h = 0.5f64;
    let n0 = (tmax / h).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut evals = 0usize;
    for j in -n0..=n0 {
        sum += eval(j as f64 * h);
        evals += 1;
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        h /= 2.0;
        let n = (tmax / h).ceil() as i64;
        let mut j = -n;
        if j % 2 == 0 {
            j += 1;
        }
        while j <= n {
            sum += eval(j as f64 * h);
            evals += 1;
            j += 2;
        }
        let cur = sum * h;
        err = (cur - prev).norm();
        prev = cur;
        if err <= tol * cur.norm().max(1e-300) || err <= abs_tol.max(1e-300) {
            break;
        }
    }
    Quad { value: prev, err, evals }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre nodes on [a, b] with `panels` panels of order `order`.
pub fn composite_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            out.push((lo + (x + 1.0) * h / 2.0, w * h / 2.0));
        }
    }
    out
}

pub fn real<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
    move |x| Complex64::new(f(x), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_sinh_gamma_integral() {
        // ∫_0^∞ x^{-1/2} e^{-x} dx = √π
        let q = exp_sinh(real(|x: f64| x.powf(-0.5) * (-x).exp()), 0.0, 1e-13);
        assert!((q.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 ln x dx = -1
        let q = tanh_sinh(real(|x: f64| x.ln()), 0.0, 1.0, 1e-13);
        assert!((q.value.re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_exactness() {
        let nodes = composite_nodes(0.0, 2.0, 3, 8);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }
}
