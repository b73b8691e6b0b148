use super::json_only;
use crate::report::{self, Output};
use crate::{parse, RunConfig};
use clap::Subcommand;
use modkit::nf::{self, Field};
use serde_json::{json, Value};

#[derive(Subcommand)]
pub enum FieldCmd {
    /// Discriminant, fundamental unit, class number, regulator
    Info {
        /// squarefree D (defaults to --field)
        #[arg(long = "D")]
        d: Option<i64>,
    },
    /// HNF, norm and factorization of the principal ideal (x)
    Ideal {
        #[arg(long, allow_hyphen_values = true)]
        gen: String,
    },
    /// Prime ideals of norm at most X
    Primes {
        #[arg(long = "X")]
        x: u64,
    },
}

impl FieldCmd {
    pub fn name(&self) -> &'static str {
        match self {
            FieldCmd::Info { .. } => "info",
            FieldCmd::Ideal { .. } => "ideal",
            FieldCmd::Primes { .. } => "primes",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        json_only(cfg)?;
        match self {
            FieldCmd::Info { d } => {
                let dsq = d.unwrap_or(cfg.field);
                let k = Field::new(dsq)?;
                let result = json!({
                    "D": k.dsq,
                    "disc": k.disc,
                    "degree": k.d,
                    "omega": k.omega,
                    "unit": report::elem(k.eps),
                    "unit_norm": k.eps_norm,
                    "totally_positive_unit": report::elem(k.tp_unit),
                    "h": k.class_number,
                    "regulator": k.regulator,
                    "different": report::ideal(&k, &k.different),
                });
                let table = nf::table::lookup(dsq).is_some();
                Ok(Output::json(json!({ "D": dsq }), result, json!({ "table_checked": table })))
            }
            FieldCmd::Ideal { gen } => {
                let k = Field::new(cfg.field)?;
                let id = parse::ideal(&k, gen)?;
                Ok(Output::json(json!({ "D": k.dsq, "gen": gen }), report::ideal(&k, &id), Value::Null))
            }
            FieldCmd::Primes { x } => {
                let k = Field::new(cfg.field)?;
                let ps: Vec<Value> = nf::primes_up_to(&k, *x)
                    .iter()
                    .map(|p| json!({ "p": p.p, "norm": p.norm(), "e": p.e, "f": p.f, "hnf": [p.ideal.a, p.ideal.b, p.ideal.c], "gen2": report::elem(p.gen2) }))
                    .collect();
                let n = ps.len();
                Ok(Output::json(json!({ "D": k.dsq, "X": x }), Value::Array(ps), json!({ "count": n })))
            }
        }
    }
}
