use super::{field_of, json_only};
use crate::cmd::eisen::ChiArgs;
use crate::report::{self, Output};
use crate::{parse, RunConfig};
use clap::{Args, Subcommand};
use modkit::nf::{Field, Ideal};
use modkit::shifted_conv::{afe_sum, amplified_moment, dirichlet_d, shifted_sum, BumpWeight, DirichletQuery, ShiftedQuery};
use serde_json::json;

/// ℓ1, ℓ2, the shift q, the ideal y and the two eigenvalue systems.
#[derive(Args)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    l1: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    l2: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// generator of y
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    y: String,
    /// divisor | synthetic | synthetic-exceptional | eisenstein:T
    #[arg(long, default_value = "divisor")]
    sys1: String,
    #[arg(long, default_value = "divisor")]
    sys2: String,
}

impl PairArgs {
    fn json(&self) -> serde_json::Value {
        json!({ "l1": self.l1, "l2": self.l2, "q": self.q, "y": self.y, "sys1": self.sys1, "sys2": self.sys2 })
    }
}

#[derive(Subcommand)]
pub enum ShiftedCmd {
    /// Σ_{ℓ1 r1 - ℓ2 r2 = q} λ₁(r1 y⁻¹) conj λ₂(r2 y⁻¹) / √N · W1 conj W2
    Sum {
        #[command(flatten)]
        pair: PairArgs,
        /// common dilation Y at every place
        #[arg(long = "Y")]
        scale: f64,
        /// lo,hi[,v]
        #[arg(long, default_value = "0.5,2")]
        w1: String,
        #[arg(long, default_value = "0.5,2")]
        w2: String,
    },
    /// The shifted Dirichlet series, truncated at --bound with a tail certificate
    Dirichlet {
        #[command(flatten)]
        pair: PairArgs,
        /// re[,im], the same at every place
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 2)]
        beta: u32,
    },
    /// Both sides of the amplified second moment for characters mod q
    Amplify {
        /// generator of q
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "Y")]
        y: f64,
        #[arg(long, default_value = "divisor")]
        sys: String,
        /// exponents of χ mod q on the unit-group generators
        #[arg(long = "chi-exps")]
        exps: Option<String>,
        #[arg(long = "chi-signs")]
        signs: Option<String>,
    },
    /// Σ_m λ(m) χ(m) N(m)^{-1/2} V(N(m)/Y) with a bump V on [1/2, 2]
    Afe {
        #[command(flatten)]
        chi: ChiArgs,
        #[arg(long = "Y")]
        y: f64,
        #[arg(long, default_value = "divisor")]
        sys: String,
    },
}

fn y_ideal(k: &Field, s: &str) -> modkit::Result<Ideal> {
    parse::ideal(k, s)
}

impl ShiftedCmd {
    pub fn name(&self) -> &'static str {
        match self {
            ShiftedCmd::Sum { .. } => "sum",
            ShiftedCmd::Dirichlet { .. } => "dirichlet",
            ShiftedCmd::Amplify { .. } => "amplify",
            ShiftedCmd::Afe { .. } => "afe",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        json_only(cfg)?;
        let k = field_of(cfg)?;
        match self {
            ShiftedCmd::Sum { pair, scale, w1, w2 } => {
                let (s1, s2) = (parse::system(&k, &pair.sys1, cfg.seed)?, parse::system(&k, &pair.sys2, cfg.seed)?);
                let (b1, b2) = (parse::bump(k.d, w1)?, parse::bump(k.d, w2)?);
                let q = ShiftedQuery {
                    sys1: &s1,
                    sys2: &s2,
                    l1: parse::nonzero_elem(&k, &pair.l1)?,
                    l2: parse::nonzero_elem(&k, &pair.l2)?,
                    y: y_ideal(&k, &pair.y)?,
                    q: parse::nonzero_elem(&k, &pair.q)?,
                    scale: vec![*scale; k.d],
                    w1: &b1,
                    w2: &b2,
                };
                let r = shifted_sum(&q)?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "pair": pair.json(), "Y": scale, "w1": w1, "w2": w2, "seed": cfg.seed }),
                    json!({ "value": report::c(r.value), "solutions": r.solutions }),
                    json!({ "candidates": r.candidates, "exact_enumeration": true }),
                ))
            }
            ShiftedCmd::Dirichlet { pair, s, beta } => {
                let (s1, s2) = (parse::system(&k, &pair.sys1, cfg.seed)?, parse::system(&k, &pair.sys2, cfg.seed)?);
                let q = DirichletQuery {
                    sys1: &s1,
                    sys2: &s2,
                    l1: parse::nonzero_elem(&k, &pair.l1)?,
                    l2: parse::nonzero_elem(&k, &pair.l2)?,
                    y: y_ideal(&k, &pair.y)?,
                    q: parse::nonzero_elem(&k, &pair.q)?,
                };
                let sv = vec![parse::complex(s)?; k.d];
                let h = cfg.bound_or(if k.d == 1 { 2000.0 } else { 60.0 });
                let r = dirichlet_d(&q, &sv, *beta, h, cfg.tol)?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "pair": pair.json(), "s": report::c(sv[0]), "beta": beta, "seed": cfg.seed }),
                    json!({ "value": report::c(r.value), "terms": r.terms }),
                    json!({ "height": r.height, "tail_bound": r.tail_bound, "tail_rigorous": r.tail_rigorous, "beta_admissible": r.beta_admissible, "tol": cfg.tol }),
                ))
            }
            ShiftedCmd::Amplify { q, l, y, sys, exps, signs } => {
                let qi = parse::ideal(&k, q)?;
                let chi = parse::character(&k, &qi, exps.as_deref(), None, signs.as_deref())?;
                let system = parse::system(&k, sys, cfg.seed)?;
                let w = BumpWeight::cube(k.d, 0.5, 2.0)?;
                let m = amplified_moment(&qi, *l, &system, &chi, &w, *y, cfg.exec())?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "q": report::ideal(&k, &qi), "L": l, "Y": y, "sys": sys, "chi_exps": chi.fin.exps, "chi_signs": chi.signs, "seed": cfg.seed }),
                    json!({
                        "side_a": m.side_a, "side_b": m.side_b, "opened": m.opened,
                        "diagonal": report::c(m.diagonal), "offdiagonal": report::c(m.offdiagonal),
                        "amplifier": m.amplifier.iter().map(|&e| report::elem(e)).collect::<Vec<_>>(),
                    }),
                    json!({
                        "rel_diff": m.rel_diff, "opened_rel_diff": m.opened_rel_diff, "diagonal_pairs": m.diagonal_pairs,
                        "support": m.support, "shifted_sums": m.shifted_sums, "characters": m.characters,
                    }),
                ))
            }
            ShiftedCmd::Afe { chi, y, sys } => {
                let hc = chi.build(&k)?;
                let system = parse::system(&k, sys, cfg.seed)?;
                let v = BumpWeight::new(vec![0.5], vec![2.0], vec![0.0])?;
                let r = afe_sum(&system, &hc, *y, &v)?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "chi": chi.json(), "Y": y, "sys": sys, "seed": cfg.seed }),
                    json!({ "value": report::c(r.value), "terms": r.terms }),
                    json!({ "trivial_bound": r.trivial_bound }),
                ))
            }
        }
    }
}
