use super::{field_of, json_only};
use crate::report::{self, Output};
use crate::{parse, RunConfig};
use clap::Subcommand;
use modkit::spectral::{bessel_transforms, gram_residual, kuznetsov_geometric_side, oldform_gram_schmidt, EigenvalueSystem, BESSEL_C, KZ};
use serde_json::{json, Value};

#[derive(Subcommand)]
pub enum SpectralCmd {
    /// Gram-Schmidt coefficients α_{t,s} of a seeded synthetic system at a level
    Oldforms {
        #[arg(long, allow_hyphen_values = true)]
        level: String,
        /// draw |α_𝔭| = N𝔭^θ parameters
        #[arg(long)]
        exceptional: bool,
    },
    /// ǩ(t) and k̃ for the test function k_Z
    Bessel {
        #[arg(long = "Z")]
        z: f64,
        /// comma separated, nonzero
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Geometric side of the Kuznetsov formula with y₁ = y₂ = o, truncated at --bound
    KuzGeom {
        #[arg(long, allow_hyphen_values = true)]
        r1: String,
        #[arg(long, allow_hyphen_values = true)]
        r2: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        level: String,
        #[arg(long = "Z", default_value_t = 1.0)]
        z: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
    },
}

impl SpectralCmd {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralCmd::Oldforms { .. } => "oldforms",
            SpectralCmd::Bessel { .. } => "bessel",
            SpectralCmd::KuzGeom { .. } => "kuz-geom",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        json_only(cfg)?;
        match self {
            SpectralCmd::Oldforms { level, exceptional } => {
                let k = field_of(cfg)?;
                let c = parse::ideal(&k, level)?;
                let sys = EigenvalueSystem::synthetic(&k, cfg.seed, *exceptional);
                let b = oldform_gram_schmidt(&sys, &c)?;
                let alpha: Vec<Value> = b.alpha.iter().map(|r| r.iter().map(|&v| report::c(v)).collect()).collect();
                Ok(Output::json(
                    json!({ "D": k.dsq, "level": report::ideal(&k, &c), "seed": cfg.seed, "exceptional": exceptional }),
                    json!({
                        "divisors": b.divisors.iter().map(|d| report::ideal(&k, d)).collect::<Vec<_>>(),
                        "alpha": alpha,
                    }),
                    json!({ "gram_residual": gram_residual(&sys, &b)?, "off_support": b.off_support }),
                ))
            }
            SpectralCmd::Bessel { z, t } => {
                let ts: Vec<f64> = parse::list(t)?;
                let tol = cfg.tol_or(1e-10);
                let bt = bessel_transforms(&KZ { z: *z }, &ts, tol, cfg.exec())?;
                let ratio: Vec<f64> = ts.iter().zip(&bt.check).map(|(t, v)| v.abs() / (z * z * t.abs().sqrt().min(1.0))).collect();
                Ok(Output::json(
                    json!({ "Z": z, "t": ts, "tol": tol }),
                    json!({ "check": bt.check, "tilde": bt.tilde, "check_ratio": ratio, "tilde_ratio": bt.tilde.abs() / (z * z), "C": BESSEL_C }),
                    json!({ "cutoff": bt.cutoff, "tail_bound": bt.tail_bound, "quad_err": bt.quad_err, "nodes": bt.nodes }),
                ))
            }
            SpectralCmd::KuzGeom { r1, r2, level, z, c1, c2 } => {
                let k = field_of(cfg)?;
                let (a, b) = (parse::nonzero_elem(&k, r1)?, parse::nonzero_elem(&k, r2)?);
                let lv = parse::ideal(&k, level)?;
                let h = cfg.bound_or(if k.d == 1 { 60.0 } else { 6.0 });
                let kf = vec![KZ { z: *z }; k.d];
                let g = kuznetsov_geometric_side(&k, a, b, &lv, &kf, (*c1, *c2), h, cfg.exec())?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "r1": report::elem(a), "r2": report::elem(b), "level": report::ideal(&k, &lv), "Z": z, "c1": c1, "c2": c2 }),
                    json!({ "value": report::c(g.value), "diagonal": g.diagonal, "offdiagonal": report::c(g.offdiagonal), "terms": g.terms }),
                    json!({ "height": g.height, "majorant": g.majorant, "majorant_rigorous": g.majorant_rigorous, "transform_tail": g.transform_tail }),
                ))
            }
        }
    }
}
