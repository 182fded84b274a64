//! Channel JSON format and CSV formatting helpers.
//!
//! A channel is either explicit Kraus operators
//!
//! ```json
//! {"kind":"kraus","dim_in":2,"dim_out":2,"ops":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}
//! ```
//!
//! or a named constructor
//!
//! ```json
//! {"kind":"named","name":"random","params":{"d":4,"k":16},"seed":12648430}
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::channels::{named, random_channel, Channel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng;

/// Names accepted by the `named` channel kind.
pub const NAMED_CHANNELS: &[&str] = &[
    "identity",
    "depolarizing",
    "unitary",
    "pauli_mixture",
    "partial_depolarizing",
    "amplitude_damping",
    "random",
    "random_unitary_mixture",
];

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Kraus {
        dim_in: usize,
        dim_out: usize,
        ops: Vec<JsonMatrix>,
    },
    Named {
        name: String,
        #[serde(default)]
        params: Map<String, Value>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

fn default_seed() -> u64 {
    rng::DEFAULT_SEED
}

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(m: &JsonMatrix) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

fn param<'a>(params: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    params
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter \"{key}\"")))
}

fn usize_param(params: &Map<String, Value>, key: &str) -> Result<usize> {
    param(params, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("parameter \"{key}\" must be a non-negative integer")))
}

fn f64_param(params: &Map<String, Value>, key: &str) -> Result<f64> {
    param(params, key)?
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("parameter \"{key}\" must be a number")))
}

fn f64_list_param(params: &Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    serde_json::from_value(param(params, key)?.clone())
        .map_err(|e| Error::Parse(format!("parameter \"{key}\": {e}")))
}

impl ChannelSpec {
    pub fn named(name: &str, params: Map<String, Value>, seed: u64) -> Self {
        ChannelSpec::Named {
            name: name.to_string(),
            params,
            seed,
        }
    }

    /// Builds and validates the channel. Random constructors draw from the
    /// stream `("channel/<name>", 0)` of `seed`.
    pub fn build(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Kraus { dim_in, dim_out, ops } => {
                let ops = ops.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
                if ops.is_empty() {
                    return Err(Error::Parse("\"ops\" is empty".into()));
                }
                for k in &ops {
                    if k.rows() != *dim_out || k.cols() != *dim_in {
                        return Err(Error::DimensionMismatch(format!(
                            "Kraus operator is {}x{}, declared {dim_out}x{dim_in}",
                            k.rows(),
                            k.cols()
                        )));
                    }
                }
                Channel::from_kraus(ops)
            }
            ChannelSpec::Named { name, params, seed } => build_named(name, params, *seed),
        }
    }
}

fn build_named(name: &str, params: &Map<String, Value>, seed: u64) -> Result<Channel> {
    let stream = || rng::stream(seed, &format!("channel/{name}"), 0);
    match name {
        "identity" => named::identity(usize_param(params, "d")?),
        "depolarizing" => named::depolarizing(usize_param(params, "d")?),
        "partial_depolarizing" => named::partial_depolarizing(usize_param(params, "d")?, f64_param(params, "q")?),
        "amplitude_damping" => named::amplitude_damping(f64_param(params, "gamma")?),
        "pauli_mixture" => {
            let q = f64_list_param(params, "q")?;
            let q: [f64; 4] = q
                .try_into()
                .map_err(|_| Error::Parse("parameter \"q\" must have 4 entries".into()))?;
            named::pauli_mixture(q)
        }
        "unitary" => match params.get("u") {
            Some(u) => {
                let m: JsonMatrix = serde_json::from_value(u.clone())
                    .map_err(|e| Error::Parse(format!("parameter \"u\": {e}")))?;
                named::unitary(matrix_from_json(&m)?)
            }
            None => named::unitary(crate::channels::haar_unitary(usize_param(params, "d")?, &mut stream())),
        },
        "random" => {
            let d = usize_param(params, "d")?;
            let k = match params.get("k") {
                Some(_) => usize_param(params, "k")?,
                None => d * d,
            };
            random_channel(d, k, &mut stream())
        }
        "random_unitary_mixture" => {
            let d = usize_param(params, "d")?;
            let weights = f64_list_param(params, "weights")?;
            named::random_unitary_mixture(d, &weights, &mut stream())
        }
        other => Err(Error::Parse(format!(
            "unknown channel name \"{other}\" (expected one of {})",
            NAMED_CHANNELS.join(", ")
        ))),
    }
}

/// Parses a channel description; syntax errors carry line and column.
pub fn parse_channel_spec(text: &str) -> Result<ChannelSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn channel_from_json(text: &str) -> Result<Channel> {
    parse_channel_spec(text)?.build()
}

/// Kraus-form JSON for any channel.
pub fn channel_to_json(phi: &Channel) -> Result<String> {
    let spec = ChannelSpec::Kraus {
        dim_in: phi.dim_in(),
        dim_out: phi.dim_out(),
        ops: phi.kraus()?.iter().map(matrix_to_json).collect(),
    };
    serde_json::to_string(&spec).map_err(|e| Error::Parse(e.to_string()))
}

/// Round-trip-safe float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::is_cptp;

    #[test]
    fn kraus_round_trip() {
        let phi = named::amplitude_damping(0.25).unwrap();
        let back = channel_from_json(&channel_to_json(&phi).unwrap()).unwrap();
        assert!(back.choi().approx_eq(phi.choi(), 1e-12));
    }

    #[test]
    fn named_constructors() {
        for (text, d) in [
            (r#"{"kind":"named","name":"identity","params":{"d":3}}"#, 3),
            (r#"{"kind":"named","name":"depolarizing","params":{"d":2}}"#, 2),
            (r#"{"kind":"named","name":"random","params":{"d":3},"seed":5}"#, 3),
            (r#"{"kind":"named","name":"unitary","params":{"d":4},"seed":5}"#, 4),
            (r#"{"kind":"named","name":"pauli_mixture","params":{"q":[0.5,0.5,0,0]}}"#, 2),
            (r#"{"kind":"named","name":"random_unitary_mixture","params":{"d":2,"weights":[0.3,0.7]}}"#, 2),
            (r#"{"kind":"named","name":"partial_depolarizing","params":{"d":2,"q":0.2}}"#, 2),
            (r#"{"kind":"named","name":"amplitude_damping","params":{"gamma":0.2}}"#, 2),
        ] {
            let phi = channel_from_json(text).unwrap();
            assert_eq!(phi.dim_in(), d, "{text}");
            assert!(is_cptp(&phi).cptp, "{text}");
        }
    }

    #[test]
    fn seeded_random_is_reproducible() {
        let t = r#"{"kind":"named","name":"random","params":{"d":3,"k":4},"seed":9}"#;
        let a = channel_from_json(t).unwrap();
        let b = channel_from_json(t).unwrap();
        assert_eq!(a.choi().max_abs_diff(b.choi()), 0.0);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_channel_spec("{\"kind\": \"kraus\",\n  \"dim_in\": }").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(channel_from_json(r#"{"kind":"named","name":"bogus"}"#).is_err());
        assert!(channel_from_json(r#"{"kind":"named","name":"identity"}"#).is_err());
        assert!(channel_from_json(r#"{"kind":"kraus","dim_in":2,"dim_out":2,"ops":[]}"#).is_err());
        // not trace preserving
        let t = r#"{"kind":"kraus","dim_in":1,"dim_out":1,"ops":[[[[2,0]]]]}"#;
        assert!(matches!(channel_from_json(t), Err(Error::NotCptp { .. })));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
