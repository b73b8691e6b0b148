//! Gamma function for complex arguments (Lanczos, g = 7).

use num_complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const P: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// log Γ(z), continuous in z off the negative real axis.
pub fn lgamma(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return lgamma(z.conj()).conj();
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lgamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(P[0], 0.0);
    for (i, &p) in P.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// log sin(πz) for Im z >= 0, stable for large Im z.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 1.0 {
        // sin(πz) = e^{-iπz} (e^{2iπz} - 1) / (2i)
        -i * PI * z + ((i * 2.0 * PI * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else {
        (z * PI).sin().ln()
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.im == 0.0 {
        return Complex64::new(gamma_real(z.re), 0.0);
    }
    lgamma(z).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_real(1.0 - x));
    }
    lgamma(Complex64::new(x, 0.0)).re.exp()
}

pub fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < 1e-14 && z.re <= 1e-14 && (z.re - z.re.round()).abs() < 1e-12
}

/// ln cosh(a) without overflow.
pub fn ln_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}
