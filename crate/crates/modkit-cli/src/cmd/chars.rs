use super::{field_of, json_only};
use crate::report::{self, Output};
use crate::{parse, RunConfig};
use clap::Subcommand;
use modkit::characters::{characters_mod, enumerate_eisenstein_pairs, FiniteCharacter};
use serde_json::{json, Value};

#[derive(Subcommand)]
pub enum CharsCmd {
    /// All characters of (o/q)^×
    List {
        #[arg(long, allow_hyphen_values = true)]
        modulus: String,
    },
    /// Eisenstein pairs (χ, s) at level c with |s_j| ≤ X
    EisenCount {
        #[arg(long, allow_hyphen_values = true)]
        level: String,
        #[arg(long = "X")]
        x: f64,
        /// grid spacing of the continuous parameter
        #[arg(long, default_value_t = 0.5)]
        resolution: f64,
    },
}

fn char_json(k: &modkit::nf::Field, chi: &FiniteCharacter) -> modkit::Result<Value> {
    let cond = chi.conductor()?;
    Ok(json!({
        "exps": chi.exps,
        "orders": chi.group.orders,
        "order": chi.order(),
        "conductor": report::ideal(k, &cond),
        "primitive": cond == chi.modulus(),
    }))
}

impl CharsCmd {
    pub fn name(&self) -> &'static str {
        match self {
            CharsCmd::List { .. } => "list",
            CharsCmd::EisenCount { .. } => "eisen-count",
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        json_only(cfg)?;
        let k = field_of(cfg)?;
        match self {
            CharsCmd::List { modulus } => {
                let q = parse::ideal(&k, modulus)?;
                let chars = characters_mod(&k, &q)?;
                let arr = chars.iter().map(|c| char_json(&k, c)).collect::<modkit::Result<Vec<_>>>()?;
                let gens: Vec<Value> = chars.first().map(|c| c.group.gens.iter().map(|&g| report::elem(g)).collect()).unwrap_or_default();
                Ok(Output::json(
                    json!({ "D": k.dsq, "modulus": report::ideal(&k, &q) }),
                    Value::Array(arr),
                    json!({ "count": chars.len(), "generators": gens }),
                ))
            }
            CharsCmd::EisenCount { level, x, resolution } => {
                let c = parse::ideal(&k, level)?;
                let n = enumerate_eisenstein_pairs(&k, &c, *x, *resolution)?;
                let branches: Vec<Value> = n
                    .branches
                    .iter()
                    .map(|b| json!({ "exps": b.chi.exps, "signs": b.signs, "delta": b.delta, "grid_points": b.grid.len() }))
                    .collect();
                Ok(Output::json(
                    json!({ "D": k.dsq, "level": report::ideal(&k, &c), "X": x, "resolution": resolution }),
                    json!({
                        "c1": report::ideal(&k, &n.c1),
                        "directions": n.directions,
                        "unramified_directions": n.unramified_directions,
                        "grid_points": n.grid_points,
                        "branches": branches,
                    }),
                    json!({ "resolution": resolution }),
                ))
            }
        }
    }
}
