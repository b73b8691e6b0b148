use super::field_of;
use crate::report::{self, Output};
use crate::{parse, Format, RunConfig};
use clap::{Args, Subcommand};
use modkit::kloosterman::{sweep, weil_margin, KloostermanQuery};
use modkit::nf::Elem;
use modkit::Error;
use serde_json::{json, Value};
use std::fmt::Write;

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct KloostermanArgs {
    #[command(subcommand)]
    sweep: Option<KloostermanSub>,
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
}

#[derive(Subcommand)]
enum KloostermanSub {
    /// S(r1, r2; c) and its Weil margin for every modulus with N(c) ≤ cmax (CSV by default)
    Sweep {
        #[arg(long)]
        cmax: u64,
        /// repeatable; every (r1, r2) combination is swept
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        r1: Vec<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        r2: Vec<String>,
    },
}

impl KloostermanArgs {
    pub fn name(&self) -> &'static str {
        match self.sweep {
            Some(_) => "kloosterman sweep",
            None => "kloosterman",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        let k = field_of(cfg)?;
        match &self.sweep {
            Some(KloostermanSub::Sweep { cmax, r1, r2 }) => {
                let r1s = r1.iter().map(|s| parse::elem(&k, s)).collect::<modkit::Result<Vec<Elem>>>()?;
                let r2s = r2.iter().map(|s| parse::elem(&k, s)).collect::<modkit::Result<Vec<Elem>>>()?;
                let pairs: Vec<(Elem, Elem)> = r1s.iter().flat_map(|&a| r2s.iter().map(move |&b| (a, b))).collect();
                let rows = sweep(&k, *cmax, &pairs, cfg.exec())?;
                let worst = rows.iter().map(|r| r.weil.margin).fold(0.0, f64::max);
                if cfg.format != Some(Format::Json) {
                    let mut s = String::from("c_norm,c,r1,r2,S,margin\n");
                    for r in &rows {
                        let e = |x: Elem| if k.d == 1 { x.a.to_string() } else { format!("{}+{}w", x.a, x.b) };
                        let _ = writeln!(s, "{},{},{},{},{:?},{:?}", r.weil.c_norm, e(r.c), e(r.r1), e(r.r2), r.weil.s.re, r.weil.margin);
                    }
                    return Ok(Output::Csv(s));
                }
                let arr: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "c": report::elem(r.c), "c_norm": r.weil.c_norm, "r1": report::elem(r.r1), "r2": report::elem(r.r2),
                            "S": r.weil.s.re, "S_imag": r.weil.s.im, "margin": r.weil.margin,
                        })
                    })
                    .collect();
                Ok(Output::json(json!({ "D": k.dsq, "cmax": cmax, "r1": r1, "r2": r2 }), Value::Array(arr), json!({ "sums": rows.len(), "max_margin": worst })))
            }
            None => {
                super::json_only(cfg)?;
                let (Some(r1), Some(r2), Some(c)) = (&self.r1, &self.r2, &self.c) else {
                    return Err(Error::Domain("kloosterman needs --r1, --r2 and --c (or the sweep subcommand)".into()));
                };
                let q = KloostermanQuery { r1: parse::elem(&k, r1)?, r2: parse::elem(&k, r2)?, c: parse::nonzero_elem(&k, c)? };
                let w = weil_margin(&k, &q)?;
                Ok(Output::json(
                    json!({ "D": k.dsq, "r1": report::elem(q.r1), "r2": report::elem(q.r2), "c": report::elem(q.c) }),
                    json!({ "S": w.s.re, "S_imag": w.s.im, "margin": w.margin }),
                    json!({ "tau": w.tau, "gcd_norm": w.gcd_norm, "c_norm": w.c_norm, "weil_bound": w.tau as f64 * (w.gcd_norm as f64).sqrt() * (w.c_norm as f64).sqrt() }),
                ))
            }
        }
    }
}
