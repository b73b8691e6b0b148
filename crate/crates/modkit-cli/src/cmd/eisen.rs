use super::{field_of, json_only};
use crate::report::{self, Output};
use crate::{parse, RunConfig};
use clap::{Args, Subcommand};
use modkit::eisenstein::{
    coset_index, constant_term_h_at_half, constant_term_numeric, local_dimension, local_inner, local_vector_norm_sq, newvector_fourier_magnitude,
    norm_in_range, EisCoefficientContext, LocalVectorSpec,
};
use serde_json::{json, Value};

/// χ as (modulus, finite exponents, t-vector, signs).
#[derive(Args)]
pub struct ChiArgs {
    /// generator of the modulus of χ
    #[arg(id = "chi_mod", long = "chi-mod", allow_hyphen_values = true, default_value = "1")]
    pub modulus: String,
    /// exponents on the unit-group generators (comma separated)
    #[arg(id = "chi_exps", long = "chi-exps")]
    pub exps: Option<String>,
    /// t_j with s_j = i t_j (comma separated, one per place)
    #[arg(id = "chi_t", long = "chi-t", allow_hyphen_values = true)]
    pub t: Option<String>,
    /// sign exponents e_j ∈ {0, 1}
    #[arg(id = "chi_signs", long = "chi-signs")]
    pub signs: Option<String>,
}

impl ChiArgs {
    pub fn build(&self, k: &modkit::nf::Field) -> modkit::Result<modkit::characters::HeckeCharacter> {
        let q = parse::ideal(k, &self.modulus)?;
        parse::character(k, &q, self.exps.as_deref(), self.t.as_deref(), self.signs.as_deref())
    }

    pub fn json(&self) -> Value {
        json!({ "modulus": self.modulus, "exps": self.exps, "t": self.t, "signs": self.signs })
    }
}

#[derive(Subcommand)]
pub enum EisenCmd {
    /// dim of the local invariant space at level 𝔭^n for conductor exponent m
    Dim {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
    },
    /// ‖φ_{𝔭,j}‖² exactly for j ≤ jmax, with pairwise orthogonality
    Norms {
        #[arg(long)]
        np: u64,
        #[arg(long, default_value_t = 4)]
        jmax: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
    },
    /// Fourier coefficient λ_{χ,t}(m) of the oldform at t, and |ρ(t_χ)|
    Coeff {
        #[command(flatten)]
        chi: ChiArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
    },
    /// H(1/2) = |D_K|^{-1} [K(o):K(c)]^{-1}, optionally with the numerical limit
    Constterm {
        #[arg(long, allow_hyphen_values = true)]
        level: String,
        #[arg(long)]
        numeric: bool,
    },
}

impl EisenCmd {
    pub fn name(&self) -> &'static str {
        match self {
            EisenCmd::Dim { .. } => "dim",
            EisenCmd::Norms { .. } => "norms",
            EisenCmd::Coeff { .. } => "coeff",
            EisenCmd::Constterm { .. } => "constterm",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        json_only(cfg)?;
        match self {
            EisenCmd::Dim { n, m } => Ok(Output::json(json!({ "n": n, "m": m }), json!(local_dimension(*n, *m)), Value::Null)),
            EisenCmd::Norms { np, jmax, m } => {
                let specs: Vec<_> = (0..=*jmax).map(|j| LocalVectorSpec { np: *np, j, m: *m, n: None }).collect();
                let mut norms = Vec::new();
                let mut in_range = true;
                for s in &specs {
                    let v = local_vector_norm_sq(s)?;
                    in_range &= norm_in_range(*np, &v);
                    norms.push(json!({ "j": s.j, "norm_sq": v.to_string() }));
                }
                let profiles = specs.iter().map(|s| s.profile()).collect::<modkit::Result<Vec<_>>>()?;
                let mut nonorthogonal = Vec::new();
                for i in 0..profiles.len() {
                    for j in 0..i {
                        if !local_inner(&profiles[i], &profiles[j])?.is_zero() {
                            nonorthogonal.push(json!([j, i]));
                        }
                    }
                }
                Ok(Output::json(
                    json!({ "np": np, "jmax": jmax, "m": m }),
                    Value::Array(norms),
                    json!({ "exact": true, "all_in_range": in_range, "nonorthogonal_pairs": nonorthogonal }),
                ))
            }
            EisenCmd::Coeff { chi, t, m } => {
                let k = field_of(cfg)?;
                let hc = chi.build(&k)?;
                let t_id = parse::ideal(&k, t)?;
                let m_id = parse::ideal(&k, m)?;
                let ctx = EisCoefficientContext::new(&hc, &t_id)?;
                let lam = ctx.lambda_chi_t(&m_id)?;
                let coef = ctx.coefficient(&m_id)?;
                let pb = cfg.bound_or(10_000.0) as u64;
                // |ρ| needs L(1, χ²), which has a pole when χ² is trivial
                let (rho, cert) = match newvector_fourier_magnitude(&ctx, pb) {
                    Ok(r) => (json!(r.value), json!({ "prime_bound": pb, "primes_used": r.l.primes_used, "l_tail_estimate": r.l.tail_estimate, "rho_rel_err": r.rel_err })),
                    Err(e) => (Value::Null, json!({ "prime_bound": pb, "rho_unavailable": e.to_string() })),
                };
                Ok(Output::json(
                    json!({ "D": k.dsq, "chi": chi.json(), "t": report::ideal(&k, &t_id), "m": report::ideal(&k, &m_id) }),
                    json!({ "lambda": report::c(lam), "coefficient": report::c(coef), "t_chi": report::ideal(&k, &ctx.t_chi), "F": ctx.f, "rho_abs": rho }),
                    cert,
                ))
            }
            EisenCmd::Constterm { level, numeric } => {
                let k = field_of(cfg)?;
                let c = parse::ideal(&k, level)?;
                let h = constant_term_h_at_half(&k, &c)?;
                let mut result = json!({ "exact": h.to_string(), "disc": k.disc, "coset_index": coset_index(&k, &c)? });
                let mut cert = json!({ "exact": true });
                if *numeric {
                    let pb = cfg.bound_or(2000.0) as u64;
                    let chk = constant_term_numeric(&k, &c, [1e-2, 5e-3], pb, 40)?;
                    result["extrapolated"] = json!(chk.extrapolated);
                    result["samples"] = json!(chk.samples);
                    use num_traits::ToPrimitive;
                    cert = json!({ "exact": true, "prime_bound": pb, "depth": 40, "extrapolation_error": (chk.extrapolated - h.to_f64().unwrap_or(f64::NAN)).abs() });
                }
                Ok(Output::json(json!({ "D": k.dsq, "level": report::ideal(&k, &c), "numeric": numeric }), result, cert))
            }
        }
    }
}
