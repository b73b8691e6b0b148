use modkit::characters::{characters_mod, FiniteCharacter, HeckeCharacter, UnitGroup};
use modkit::eisenstein::*;
use modkit::nf::{arith_functions, ideals_up_to, Field, Ideal};
use num_complex::Complex64;
use std::sync::Arc;

/// ζ(s) by Euler–Maclaurin with N = 20 and Bernoulli terms up to B_16.
fn zeta_em(s: Complex64) -> Complex64 {
    let n = 20.0f64;
    let mut z: Complex64 = (1..20).map(|k| (-s * (k as f64).ln()).exp()).sum();
    let nps = (-s * n.ln()).exp();
    z += nps * n / (s - 1.0) + nps / 2.0;
    let b2k = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0];
    let mut rising = s; // s(s+1)...(s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut npow = nps / n; // N^{-s-2k+1}
    for (k, b) in b2k.iter().enumerate() {
        let k = k + 1;
        z += b / fact * rising * npow;
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        npow /= n * n;
    }
    z
}

fn norm_char(k: &Field, t: f64) -> HeckeCharacter {
    let g = Arc::new(UnitGroup::new(k, &Ideal::unit(k.dsq)).unwrap());
    HeckeCharacter::new(FiniteCharacter::trivial(g), vec![t; k.d], vec![0; k.d]).unwrap()
}

#[test]
fn zeta_oracle_sanity() {
    // ζ(2) = π²/6
    let z = zeta_em(Complex64::new(2.0, 0.0));
    assert!((z.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
}

#[test]
fn fourier_magnitude_against_zeta() {
    let q = Field::rationals();
    let chi = norm_char(&q, 1.0);
    let ctx = EisCoefficientContext::new(&chi, &Ideal::unit(1)).unwrap();
    assert_eq!(ctx.f, 1.0);
    let fm = newvector_fourier_magnitude(&ctx, 100_000).unwrap();
    let want = std::f64::consts::PI.sqrt() / zeta_em(Complex64::new(1.0, 2.0)).norm();
    let rel = (fm.value - want).abs() / want;
    assert!(rel <= fm.rel_err, "rel error {rel:.3e} vs reported {:.3e}", fm.rel_err);
    assert!(rel < 1e-3, "{rel}");
}

#[test]
fn trivial_square_is_rejected() {
    let q = Field::rationals();
    let ctx = EisCoefficientContext::new(&norm_char(&q, 0.0), &Ideal::unit(1)).unwrap();
    assert!(newvector_fourier_magnitude(&ctx, 1000).is_err());
}

#[test]
fn eigenvalue_bounded_by_divisor_count() {
    let k = Field::new(5).unwrap();
    let c = Ideal::rational(&k, 3);
    for fin in characters_mod(&k, &c).unwrap() {
        let Ok(chi) = HeckeCharacter::new(fin, vec![0.4, 0.4], vec![0, 0]) else { continue };
        for (m, f) in ideals_up_to(&k, 500) {
            let (_, _, tau) = arith_functions(&f);
            assert!(eis_hecke_eigenvalue(&chi, &m).unwrap().norm() <= tau as f64 + 1e-12);
        }
    }
}

#[test]
fn oldform_coefficients_bounded() {
    // |λ^{(t)}(m)| ≤ N(gcd(t, m)) τ(m) with constant 1 on this range
    let q = Field::rationals();
    let chi = norm_char(&q, 0.9);
    for t in [2, 3, 4, 6, 8, 12, 18] {
        let ctx = EisCoefficientContext::new(&chi, &Ideal::rational(&q, t)).unwrap();
        for (m, f) in ideals_up_to(&q, 300) {
            let (_, _, tau) = arith_functions(&f);
            let g = m.gcd(&Ideal::rational(&q, t)).norm() as f64;
            let v = oldform_eis_coefficient(&ctx, &m).unwrap().norm();
            assert!(v <= g * tau as f64 + 1e-12, "t={t} m={m}: {v}");
        }
    }
}

#[test]
fn quadratic_field_partial_l_consistent() {
    // χ² = N^{i}, so the product is ζ_K(1 - i) = ζ(1 - i) L(1 - i, (5/·)) for K = Q(√5)
    let k = Field::new(5).unwrap();
    let chi = norm_char(&k, 0.5);
    let l = partial_l_chi_squared(&chi, &Ideal::unit(5), 100_000).unwrap();
    let s = Complex64::new(1.0, -1.0);
    let mut lchi = Complex64::new(0.0, 0.0);
    // L(s, (5/·)) = 5^{-s} Σ_r (r/5) ζ(s, r/5)
    for r in 1..5i64 {
        let sign = if r == 1 || r == 4 { 1.0 } else { -1.0 };
        lchi += sign * hurwitz_em(s, r as f64 / 5.0) * (-s * 5f64.ln()).exp();
    }
    let want = zeta_em(s) * lchi;
    let rel = (l.value - want).norm() / want.norm();
    assert!(rel <= l.tail_estimate / l.value.norm(), "{rel:.3e} vs {:.3e}", l.tail_estimate / l.value.norm());
}

/// ζ(s, a) by Euler–Maclaurin from n = 20.
fn hurwitz_em(s: Complex64, a: f64) -> Complex64 {
    let n = 20usize;
    let mut z: Complex64 = (0..n).map(|k| (-s * (k as f64 + a).ln()).exp()).sum();
    let x = n as f64 + a;
    let xs = (-s * x.ln()).exp();
    z += xs * x / (s - 1.0) + xs / 2.0;
    let b2k = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut rising = s;
    let mut fact = 2.0;
    let mut xp = xs / x;
    for (k, b) in b2k.iter().enumerate() {
        let k = k + 1;
        z += b / fact * rising * xp;
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        xp /= x * x;
    }
    z
}
