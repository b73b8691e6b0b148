use modkit::nf::{Elem, Field, Ideal};
use num_complex::Complex64;
use serde_json::{json, Value};

/// What a subcommand hands back before the envelope is added.
pub enum Output {
    Json { inputs: Value, result: Value, certificates: Value },
    Csv(String),
}

impl Output {
    pub fn json(inputs: Value, result: Value, certificates: Value) -> Self {
        Output::Json { inputs, result, certificates }
    }
}

pub fn envelope(command: &str, inputs: Value, result: Value, certificates: Value, elapsed_ms: Option<u128>) -> Value {
    json!({
        "schema": 1,
        "command": command,
        "inputs": inputs,
        "result": result,
        "certificates": certificates,
        "elapsed_ms": elapsed_ms,
    })
}

pub fn error(command: &str, kind: &str, msg: &str) -> Value {
    json!({ "schema": 1, "command": command, "error": { "kind": kind, "message": msg } })
}

pub fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn elem(e: Elem) -> Value {
    json!([e.a, e.b])
}

pub fn ideal(k: &Field, id: &Ideal) -> Value {
    let factors: Value = match id.factor(k) {
        Ok(f) => f.iter().map(|(p, e)| json!({ "p": p.p, "norm": p.norm(), "hnf": [p.ideal.a, p.ideal.b, p.ideal.c], "exp": e })).collect(),
        Err(_) => Value::Null,
    };
    json!({
        "D": k.dsq,
        "disc": k.disc,
        "hnf": [id.a, id.b, id.c],
        "norm": id.norm(),
        "factors": factors,
    })
}
