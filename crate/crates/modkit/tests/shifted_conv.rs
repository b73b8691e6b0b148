use modkit::characters::HeckeCharacter;
use modkit::nf::{Elem, Field, Ideal};
use modkit::shifted_conv::*;
use modkit::spectral::EigenvalueSystem;
use modkit::Exec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tau_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for d in 1..=n {
        for m in (d..=n).step_by(d) {
            t[m] += 1.0;
        }
    }
    t
}

fn query<'a>(sys: &'a EigenvalueSystem, q: i128, y: f64, w1: &'a dyn Weight, w2: &'a dyn Weight) -> ShiftedQuery<'a> {
    ShiftedQuery { sys1: sys, sys2: sys, l1: Elem::ONE, l2: Elem::ONE, y: Ideal::unit(1), q: Elem::int(q), scale: vec![y], w1, w2 }
}

#[test]
fn empty_box_gives_zero() {
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let w = BumpWeight::cube(1, 1.0, 1.001).unwrap();
    let s = shifted_sum(&query(&sys, 1, 10.0, &w, &w)).unwrap();
    assert_eq!(s.value, Complex64::new(0.0, 0.0));
    assert_eq!(s.solutions, 0);
}

#[test]
fn divisor_shifted_sum_against_double_loop() {
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let tau = tau_table(2000);
    let w1 = BumpWeight::new(vec![0.5], vec![2.0], vec![0.3]).unwrap();
    let w2 = BumpWeight::new(vec![0.4], vec![1.5], vec![-1.1]).unwrap();
    let y = 300.0;
    let got = shifted_sum(&query(&sys, 1, y, &w1, &w2)).unwrap().value;
    let mut want = Complex64::new(0.0, 0.0);
    for n in 2..=600usize {
        let m = n - 1;
        want += tau[n] * tau[m] / ((n * m) as f64).sqrt() * w1.eval(&[n as f64 / y]) * w2.eval(&[m as f64 / y]).conj();
    }
    assert!((got - want).norm() < 1e-12 * want.norm(), "{got} vs {want}");
}

#[test]
fn swap_conjugates() {
    let k = Field::new(5).unwrap();
    let s1 = EigenvalueSystem::synthetic(&k, 11, false);
    let s2 = EigenvalueSystem::synthetic(&k, 12, false);
    let w1 = BumpWeight::new(vec![0.5, 0.6], vec![2.0, 1.8], vec![0.2, -0.4]).unwrap();
    let w2 = BumpWeight::new(vec![0.4, 0.5], vec![1.9, 2.2], vec![0.0, 0.7]).unwrap();
    let (l1, l2) = (k.elem(2, 1), k.elem(3, 0));
    let q = k.elem(1, 2);
    let a = ShiftedQuery { sys1: &s1, sys2: &s2, l1, l2, y: Ideal::unit(5), q, scale: vec![15.0, 15.0], w1: &w1, w2: &w2 };
    let b = ShiftedQuery { sys1: &s2, sys2: &s1, l1: l2, l2: l1, y: Ideal::unit(5), q: k.neg(q), scale: vec![15.0, 15.0], w1: &w2, w2: &w1 };
    let (va, vb) = (shifted_sum(&a).unwrap(), shifted_sum(&b).unwrap());
    assert!(va.solutions > 0);
    assert_eq!(va.solutions, vb.solutions);
    assert!((va.value - vb.value.conj()).norm() < 1e-13);
}

#[test]
fn shift_outside_y_is_empty() {
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let w = BumpWeight::cube(1, 0.5, 2.0).unwrap();
    let mut qu = query(&sys, 3, 100.0, &w, &w);
    qu.y = Ideal::rational(&q, 2);
    assert_eq!(shifted_sum(&qu).unwrap().solutions, 0);
}

fn dquery(sys: &EigenvalueSystem, q: Elem) -> DirichletQuery<'_> {
    let one = Elem::ONE;
    DirichletQuery { sys1: sys, sys2: sys, l1: one, l2: one, y: Ideal::unit(sys.field.dsq), q }
}

#[test]
fn dirichlet_against_scalar_series() {
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let n = 100_000;
    let tau = tau_table(n + 1);
    let want: f64 = (2..=n).map(|a| tau[a] * tau[a - 1] * ((a * (a - 1)) as f64).sqrt() / ((2 * a - 1) as f64).powi(4)).sum();
    let got = dirichlet_d(&dquery(&sys, Elem::ONE), &[Complex64::new(3.0, 0.0)], 2, 2.0 * n as f64, None).unwrap();
    assert!(got.tail_rigorous);
    assert!((got.value.re - want).abs() < 1e-9 * want, "{} vs {want}", got.value);
    assert!(got.value.im.abs() < 1e-15);
}

#[test]
fn dirichlet_truncations_within_tail() {
    for (k, q) in [(Field::rationals(), Elem::int(3)), (Field::new(5).unwrap(), Elem::new(2, 1))] {
        let sys = EigenvalueSystem::synthetic(&k, 5, false);
        let t = if k.d == 1 { 2000.0 } else { 60.0 };
        for sig in [1.1, 1.5, 3.0] {
            let s = vec![Complex64::new(sig, 0.7); k.d];
            let a = dirichlet_d(&dquery(&sys, q), &s, 2, t, None).unwrap();
            let b = dirichlet_d(&dquery(&sys, q), &s, 2, 2.0 * t, None).unwrap();
            assert!(b.terms > a.terms);
            let diff = (a.value - b.value).norm();
            assert!(diff <= a.tail_bound, "d={} σ={sig}: {diff:.3e} > {:.3e}", k.d, a.tail_bound);
        }
    }
}

#[test]
fn dirichlet_large_s_dominated_by_lowest_term() {
    // q = 1 over Q: the lowest term has r1 = 2, r2 = 1, s = 3
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let sigma = 60.0;
    let d = dirichlet_d(&dquery(&sys, Elem::ONE), &[Complex64::new(sigma, 0.0)], 2, 500.0, None).unwrap();
    let first = 2.0 * 1.0 * 2f64.sqrt() / 3f64.powf(sigma + 1.0);
    assert!((d.value.re / first - 1.0).abs() < 1e-9);
}

#[test]
fn dirichlet_rejects_bad_input() {
    let q = Field::rationals();
    let sys = EigenvalueSystem::divisor(&q);
    let dq = dquery(&sys, Elem::ONE);
    assert!(dirichlet_d(&dq, &[Complex64::new(1.0, 0.0)], 2, 10.0, None).is_err());
    assert!(dirichlet_d(&dq, &[Complex64::new(2.0, 0.0)], 3, 10.0, None).is_err());
    assert!(matches!(dirichlet_d(&dq, &[Complex64::new(1.2, 0.0)], 2, 10.0, Some(1e-12)), Err(modkit::Error::Certificate(_))));
    let big = dirichlet_d(&dq, &[Complex64::new(2.0, 0.0)], 134, 10.0, None).unwrap();
    assert!(big.beta_admissible);
}

#[test]
fn fd_reduce_properties() {
    let k = Field::new(5).unwrap();
    let fd = FundamentalDomain::new(&k);
    let e = k.embed(fd.unit);
    // inside F already
    let y = [1.3, 1.1];
    assert!(fd.contains(&y).unwrap());
    assert_eq!(fd_reduce(&k, &y).unwrap().unit, Elem::ONE);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let y = [rng.gen_range(0.01..100.0), rng.gen_range(0.01..100.0)];
        let r = fd_reduce(&k, &y).unwrap();
        // lattice rounding: t = (log y1 - log y2)/(2 log ε⁺) shifted by an integer into [0, 1)
        let t = (r.point[0].ln() - r.point[1].ln()) / (2.0 * e[0].ln());
        assert!((-1e-12..1.0).contains(&t), "{t}");
        assert!((r.point[0] * r.point[1] - y[0] * y[1]).abs() < 1e-9 * y[0] * y[1]);
        let u = k.embed(r.unit);
        assert!((u[0] * y[0] - r.point[0]).abs() < 1e-9 * r.point[0]);
        // ε² y has the same representative
        let y2 = [y[0] * e[0] * e[0], y[1] * e[1] * e[1]];
        let r2 = fd_reduce(&k, &y2).unwrap();
        assert!((r2.point[0] - r.point[0]).abs() < 1e-9 * r.point[0]);
        // idempotent
        assert_eq!(fd_reduce(&k, &r.point).unwrap().exponent, 0);
    }
    assert!(fd_reduce(&k, &[1.0, -1.0]).is_err());
    assert_eq!(fd_reduce(&Field::rationals(), &[7.0]).unwrap().unit, Elem::ONE);
}

fn trivial_char(k: &Field, q: &Ideal) -> HeckeCharacter {
    let chars = modkit::characters::characters_mod(k, q).unwrap();
    let fin = chars.into_iter().find(|c| c.is_trivial()).unwrap();
    HeckeCharacter::new(fin, vec![0.0; k.d], vec![0; k.d]).unwrap()
}

#[test]
fn amplified_moment_trivial_modulus() {
    let k = Field::rationals();
    let sys = EigenvalueSystem::divisor(&k);
    let one = Ideal::unit(1);
    let w = BumpWeight::cube(1, 0.5, 2.0).unwrap();
    let m = amplified_moment(&one, 5.0, &sys, &trivial_char(&k, &one), &w, 40.0, Exec::Sequential).unwrap();
    assert_eq!(m.characters, 1);
    // both sides are |Σ_ℓ Σ_r c_r|² for the single class
    assert!((m.side_a - m.opened).abs() < 1e-9 * m.opened);
    assert!(m.rel_diff < 1e-12);
}

#[test]
fn amplified_moment_plancherel_and_diagonal() {
    let k = Field::rationals();
    let q = Ideal::rational(&k, 7);
    let sys = EigenvalueSystem::divisor(&k);
    let chars = modkit::characters::characters_mod(&k, &q).unwrap();
    let chi = HeckeCharacter::new(chars[2].clone(), vec![0.0], vec![0]).unwrap_or_else(|_| HeckeCharacter::new(chars[2].clone(), vec![0.0], vec![1]).unwrap());
    let w = BumpWeight::new(vec![0.5], vec![2.0], vec![0.4]).unwrap();
    let y = 60.0;
    let m = amplified_moment(&q, 10.0, &sys, &chi, &w, y, Exec::Parallel).unwrap();
    assert!(m.rel_diff < 1e-9, "{}", m.rel_diff);
    assert!(m.opened_rel_diff < 1e-9, "{}", m.opened_rel_diff);
    assert!(m.side_b <= 7.0 * m.opened * (1.0 + 1e-12));
    // brute-force scan over all (ℓ1, r1, ℓ2, r2) with ℓ1 r1 = ℓ2 r2
    let ells: Vec<i128> = m.amplifier.iter().map(|e| e.a).collect();
    assert_eq!(ells, vec![11, 13, 17, 19]);
    let rs: Vec<i128> = (1..=200).filter(|r| (*r as f64) >= 0.5 * y && (*r as f64) <= 2.0 * y).collect();
    let mut pairs = 0;
    for &l1 in &ells {
        for &r1 in &rs {
            for &l2 in &ells {
                for &r2 in &rs {
                    if l1 * r1 == l2 * r2 {
                        pairs += 1;
                    }
                }
            }
        }
    }
    assert_eq!(m.diagonal_pairs, pairs);
}

#[test]
fn amplifier_primes_over_quadratic_field() {
    let k = Field::new(5).unwrap();
    let q = Ideal::principal(&k, k.delta);
    let ells = amplifier_primes(&k, &q, 10.0).unwrap();
    let fd = FundamentalDomain::new(&k);
    for e in &ells {
        let n = k.norm(*e);
        assert!((10..=20).contains(&n));
        assert!(k.is_totally_positive(*e));
        assert!(fd.contains(&k.embed(*e)).unwrap());
    }
    // split primes of norm 11 and 19 contribute two each
    assert_eq!(ells.len(), 4, "{ells:?}");
    assert!(amplifier_primes(&Field::rationals(), &Ideal::unit(1), 0.5).is_err());
}

#[test]
fn afe_against_scalar_loop() {
    let k = Field::rationals();
    let sys = EigenvalueSystem::divisor(&k);
    let chi = HeckeCharacter::trivial(&k).unwrap();
    let v = BumpWeight::new(vec![0.5], vec![2.0], vec![0.0]).unwrap();
    let tau = tau_table(400);
    let y = 150.0;
    let got = afe_sum(&sys, &chi, y, &v).unwrap();
    let want: f64 = (1..=300).map(|n| tau[n] / (n as f64).sqrt() * v.eval(&[n as f64 / y]).re).sum();
    assert!((got.value.re - want).abs() < 1e-12 * want);
    assert!(got.value.norm() <= got.trivial_bound);
    assert_eq!(afe_sum(&sys, &chi, 0.4, &v).unwrap().value, Complex64::new(0.0, 0.0));
    let wide = BumpWeight::new(vec![0.5], vec![3.0], vec![0.0]).unwrap();
    assert!(afe_sum(&sys, &chi, y, &wide).is_err());
}
