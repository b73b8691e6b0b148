//! Arithmetic in Q and real quadratic fields.

mod enumerate;
mod field;
mod ideal;
pub mod int;
mod residue;
pub mod table;

pub use enumerate::enumerate_in_box;
pub use field::{Elem, Field, FieldOptions};
pub use ideal::{
    arith_functions, ideal_norm_of, ideals_up_to, primes_above, primes_up_to, product, Factorization, Ideal,
    PrimeIdeal, PrimeKind, DEFAULT_NORM_BOUND,
};
pub use residue::ResidueSystem;

use num_complex::Complex64;
use std::f64::consts::PI;

/// e(num/den) with exact reduction of the fraction.
pub fn e_frac(num: i128, den: i128) -> Complex64 {
    assert!(den != 0);
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let r = num.rem_euclid(den);
    let th = 2.0 * PI * (r as f64) / (den as f64);
    Complex64::new(th.cos(), th.sin())
}

/// ψ(x/y) = e(Tr(x/y)) for ring elements x, y ≠ 0.
pub fn psi_quotient(k: &Field, x: Elem, y: Elem) -> Complex64 {
    if k.d == 1 {
        return e_frac(x.a, y.a);
    }
    let ny = k.norm(y);
    let tr = k.trace(k.mul(x, k.conj(y)));
    e_frac(tr, ny)
}

/// ψ of an element of 𝔬: always 1.
pub fn psi(k: &Field, x: Elem) -> Complex64 {
    e_frac(k.trace(x), 1)
}
