use modkit::characters::{FiniteCharacter, HeckeCharacter, UnitGroup};
use modkit::nf::{Elem, Field, Ideal};
use modkit::shifted_conv::BumpWeight;
use modkit::spectral::EigenvalueSystem;
use modkit::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

fn nums<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().or_else(|_| bad(format!("cannot parse {what} from {s:?}"))))
        .collect()
}

/// "a" or "a,b" for a + bω.
pub fn elem(k: &Field, s: &str) -> Result<Elem> {
    match nums::<i128>(s, "element")?[..] {
        [a] => Ok(Elem::int(a)),
        [a, b] if k.d == 2 => Ok(k.elem(a, b)),
        [_, _] => bad(format!("{s:?}: an ω-coordinate needs a quadratic field")),
        _ => bad(format!("{s:?}: expected a or a,b")),
    }
}

pub fn nonzero_elem(k: &Field, s: &str) -> Result<Elem> {
    let x = elem(k, s)?;
    if x.is_zero() {
        return bad(format!("{s:?} must be nonzero"));
    }
    Ok(x)
}

/// The principal ideal generated by an element.
pub fn ideal(k: &Field, s: &str) -> Result<Ideal> {
    Ok(Ideal::principal(k, nonzero_elem(k, s)?))
}

/// "re" or "re,im".
pub fn complex(s: &str) -> Result<Complex64> {
    match nums::<f64>(s, "complex number")?[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => bad(format!("{s:?}: expected re or re,im")),
    }
}

pub fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    nums(s, "list")
}

/// "lo,hi,v": the same bump on every place.
pub fn bump(d: usize, s: &str) -> Result<BumpWeight> {
    match nums::<f64>(s, "weight")?[..] {
        [lo, hi, v] => BumpWeight::new(vec![lo; d], vec![hi; d], vec![v; d]),
        [lo, hi] => BumpWeight::new(vec![lo; d], vec![hi; d], vec![0.0; d]),
        _ => bad(format!("{s:?}: expected lo,hi[,v]")),
    }
}

/// divisor | synthetic | synthetic-exceptional | eisenstein:T (the pair |·|^{iT} ⊞ |·|^{-iT}).
pub fn system(k: &Field, s: &str, seed: u64) -> Result<EigenvalueSystem> {
    match s {
        "divisor" => Ok(EigenvalueSystem::divisor(k)),
        "synthetic" => Ok(EigenvalueSystem::synthetic(k, seed, false)),
        "synthetic-exceptional" => Ok(EigenvalueSystem::synthetic(k, seed, true)),
        _ => match s.strip_prefix("eisenstein:").map(str::parse::<f64>) {
            Some(Ok(t)) => {
                let g = Arc::new(UnitGroup::new(k, &Ideal::unit(k.dsq))?);
                let chi = HeckeCharacter::new(FiniteCharacter::trivial(g), vec![t; k.d], vec![0; k.d])?;
                Ok(EigenvalueSystem::eisenstein(&chi))
            }
            _ => bad(format!("unknown eigenvalue system {s:?}")),
        },
    }
}

/// χ from modulus, exponents on the unit-group generators, t-vector and sign vector.
pub fn character(k: &Field, modulus: &Ideal, exps: Option<&str>, t: Option<&str>, signs: Option<&str>) -> Result<HeckeCharacter> {
    let g = Arc::new(UnitGroup::new(k, modulus)?);
    let exps: Vec<u64> = match exps {
        Some(s) if !s.is_empty() => list(s)?,
        _ => vec![0; g.orders.len()],
    };
    if exps.len() != g.orders.len() || exps.iter().zip(&g.orders).any(|(e, o)| e >= o) {
        return bad(format!("exponents must be {} values below the generator orders {:?}", g.orders.len(), g.orders));
    }
    let t = match t {
        Some(s) => list(s)?,
        None => vec![0.0; k.d],
    };
    let signs = match signs {
        Some(s) => list(s)?,
        None => vec![0; k.d],
    };
    HeckeCharacter::new(FiniteCharacter { group: g, exps }, t, signs)
}
