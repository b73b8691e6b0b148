use modkit::characters::characters_mod;
use modkit::kloosterman::{kloosterman_sum, weil_margin, KloostermanQuery};
use modkit::nf::{product, Elem, Field, Ideal, ResidueSystem};
use modkit::spectral::{lambda_value, EigenvalueSystem};
use proptest::prelude::*;

fn field(i: usize) -> Field {
    [Field::rationals(), Field::new(2).unwrap(), Field::new(5).unwrap(), Field::new(13).unwrap()][i % 4].clone()
}

fn elem(k: &Field, a: i128, b: i128) -> Elem {
    if k.d == 1 {
        Elem::int(a)
    } else {
        k.elem(a, b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(f in 0usize..4, a in -40i128..40, b in -40i128..40, c in -40i128..40, d in -40i128..40) {
        let k = field(f);
        let (x, y) = (elem(&k, a, b), elem(&k, c, d));
        prop_assert_eq!(k.norm(k.mul(x, y)), k.norm(x) * k.norm(y));
        prop_assert_eq!(k.conj(k.conj(x)), x);
    }

    #[test]
    fn gcd_lcm_norms(f in 0usize..4, a in 1i128..60, b in -20i128..20, c in 1i128..60, d in -20i128..20) {
        let k = field(f);
        let (x, y) = (elem(&k, a, b), elem(&k, c, d));
        prop_assume!(!x.is_zero() && !y.is_zero());
        let (i, j) = (Ideal::principal(&k, x), Ideal::principal(&k, y));
        let (g, l) = (i.gcd(&j), i.lcm(&k, &j));
        prop_assert_eq!(g.norm() * l.norm(), i.norm() * j.norm());
        prop_assert!(g.divides(&i) && g.divides(&j) && i.divides(&l) && j.divides(&l));
    }

    #[test]
    fn factorization_round_trips(f in 0usize..4, a in 1i128..80, b in -30i128..30) {
        let k = field(f);
        let x = elem(&k, a, b);
        prop_assume!(!x.is_zero());
        let i = Ideal::principal(&k, x);
        let fac = i.factor(&k).unwrap();
        prop_assert_eq!(product(&k, &fac), i);
        prop_assert_eq!(k.norm(x).unsigned_abs() as i128, i.norm());
    }

    #[test]
    fn characters_are_multiplicative(f in 0usize..4, m in 2i128..30, a in 1i128..200, b in 1i128..200) {
        let k = field(f);
        let q = Ideal::rational(&k, m);
        let rs = ResidueSystem::new(&k, &q).unwrap();
        let (x, y) = (elem(&k, a, a % 7), elem(&k, b, b % 5));
        prop_assume!(rs.is_unit_elem(x) && rs.is_unit_elem(y));
        let chars = characters_mod(&k, &q).unwrap();
        prop_assert_eq!(chars.len(), rs.phi());
        for chi in chars.iter().take(8) {
            let lhs = chi.value(k.mul(x, y));
            let rhs = chi.value(x) * chi.value(y);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn kloosterman_symmetric_real_and_weil(f in 0usize..3, c in 2i128..40, cb in 0i128..6, r1 in -5i128..6, r2 in -5i128..6) {
        let k = field(f);
        let c = elem(&k, c, cb);
        let (a, b) = (Elem::int(r1), Elem::int(r2));
        let s = kloosterman_sum(&k, &KloostermanQuery { r1: a, r2: b, c }).unwrap();
        let t = kloosterman_sum(&k, &KloostermanQuery { r1: b, r2: a, c }).unwrap();
        prop_assert!((s - t).norm() < 1e-9);
        prop_assert!(s.im.abs() < 1e-9);
        let w = weil_margin(&k, &KloostermanQuery { r1: a, r2: b, c }).unwrap();
        prop_assert!(w.margin <= 1.0 + 1e-9);
    }

    #[test]
    fn kloosterman_at_zero_counts_units(f in 0usize..3, c in 2i128..50) {
        let k = field(f);
        let s = kloosterman_sum(&k, &KloostermanQuery { r1: Elem::ZERO, r2: Elem::ZERO, c: Elem::int(c) }).unwrap();
        let phi = ResidueSystem::new(&k, &Ideal::rational(&k, c)).unwrap().phi();
        prop_assert!((s.re - phi as f64).abs() < 1e-9 && s.im.abs() < 1e-9);
    }

    #[test]
    fn hecke_relation_for_synthetic_systems(f in 0usize..3, seed in 0u64..1000, a in 1i128..40, b in 1i128..40) {
        let k = field(f);
        let sys = EigenvalueSystem::synthetic(&k, seed, seed % 4 == 0);
        let (m, n) = (Ideal::rational(&k, a), Ideal::rational(&k, b));
        let g = m.gcd(&n);
        // λ(m)λ(n) = Σ_{d | gcd} λ(mn/d²)
        let mut rhs = num_complex::Complex64::new(0.0, 0.0);
        for d in modkit::spectral::divisors(&k, &g).unwrap() {
            let mn = m.mul(&k, &n);
            let q = mn.div_exact(&k, &d.mul(&k, &d)).unwrap();
            rhs += lambda_value(&sys, &q).unwrap();
        }
        let lhs = lambda_value(&sys, &m).unwrap() * lambda_value(&sys, &n).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()), "{} vs {}", lhs, rhs);
    }
}
