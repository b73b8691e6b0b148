use super::json_only;
use crate::report::{self, Output};
use crate::{parse, Format, RunConfig};
use clap::Subcommand;
use modkit::whittaker::{admissible, gram_matrix, inner_tail_bound, normalized_whittaker_1, INNER_Y0};
use serde_json::{json, Value};
use std::fmt::Write;

#[derive(Subcommand)]
pub enum WhittakerCmd {
    /// W̃_{q/2,ν}(y)
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        /// re[,im]
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Gram matrix over the weights |q| ≤ qmax of one parity, for each ν given
    Gram {
        #[arg(long, default_value_t = 4)]
        qmax: i64,
        /// repeatable, re[,im]
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        nu: Vec<String>,
        /// odd weights instead of even
        #[arg(long)]
        odd: bool,
    },
}

impl WhittakerCmd {
    pub fn name(&self) -> &'static str {
        match self {
            WhittakerCmd::Eval { .. } => "eval",
            WhittakerCmd::Gram { .. } => "gram",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        match self {
            WhittakerCmd::Eval { q, nu, y } => {
                json_only(cfg)?;
                let nu_c = parse::complex(nu)?;
                let v = normalized_whittaker_1(*q, nu_c, *y)?;
                Ok(Output::json(json!({ "q": q, "nu": report::c(nu_c), "y": y }), json!({ "value": report::c(v) }), json!({ "admissible": admissible(*q, nu_c) })))
            }
            WhittakerCmd::Gram { qmax, nu, odd } => {
                let qs: Vec<i64> = (-qmax..=*qmax).filter(|q| (q.rem_euclid(2) == 1) == *odd).collect();
                let nus = nu.iter().map(|s| parse::complex(s)).collect::<modkit::Result<Vec<_>>>()?;
                let mut blocks = Vec::new();
                let mut csv = String::from("nu_re,nu_im,q1,q2,re,im\n");
                let mut worst_dev = 0.0f64;
                let mut worst_tail = 0.0f64;
                for &n in &nus {
                    let g = gram_matrix(&qs, n, cfg.exec())?;
                    for (i, row) in g.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            let id = if i == j { 1.0 } else { 0.0 };
                            worst_dev = worst_dev.max((v - id).norm());
                            worst_tail = worst_tail.max(inner_tail_bound(qs[i], qs[j], n));
                            let _ = writeln!(csv, "{:?},{:?},{},{},{:?},{:?}", n.re, n.im, qs[i], qs[j], v.re, v.im);
                        }
                    }
                    let m: Vec<Value> = g.iter().map(|r| r.iter().map(|&v| report::c(v)).collect()).collect();
                    blocks.push(json!({ "nu": report::c(n), "matrix": m }));
                }
                if cfg.format == Some(Format::Csv) {
                    return Ok(Output::Csv(csv));
                }
                Ok(Output::json(
                    json!({ "q": qs, "nu": nus.iter().map(|&n| report::c(n)).collect::<Vec<_>>() }),
                    Value::Array(blocks),
                    json!({ "max_identity_deviation": worst_dev, "lower_cutoff": INNER_Y0, "cutoff_tail_bound": worst_tail }),
                ))
            }
        }
    }
}
