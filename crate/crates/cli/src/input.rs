//! Unitary and channel files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tdepth::builtins::builtin;
use tdepth::channel::ChannelJson;
use tdepth::{ChannelMatrix, DenseMatrix, Error, GaussianRootTwo, Result};

/// Entries are [a, b, c, d, k] for (a + bi + c√2 + di√2)/√2^k.
#[derive(Serialize, Deserialize)]
pub struct UnitaryJson {
    pub n: usize,
    pub matrix: Vec<Vec<GaussianRootTwo>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputJson {
    Unitary(UnitaryJson),
    Channel { channel: ChannelJson },
}

pub enum Target {
    Unitary(DenseMatrix),
    Channel(ChannelMatrix),
}

pub fn unitary_to_json(u: &DenseMatrix) -> UnitaryJson {
    UnitaryJson {
        n: u.n(),
        matrix: u.rows(),
    }
}

fn unitary_from_json(j: UnitaryJson) -> Result<DenseMatrix> {
    let u = DenseMatrix::from_rows(j.matrix)?;
    if u.n() != j.n {
        return Err(Error::Parse(format!("matrix is {} qubits, header says {}", u.n(), j.n)));
    }
    Ok(u)
}

pub fn parse_target(text: &str) -> Result<Target> {
    let j: InputJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("input is neither a unitary nor a channel: {e}")))?;
    match j {
        InputJson::Unitary(u) => Ok(Target::Unitary(unitary_from_json(u)?)),
        InputJson::Channel { channel } => Ok(Target::Channel(ChannelMatrix::from_json(&channel)?)),
    }
}

pub fn load_target(path: Option<&Path>, name: Option<&str>) -> Result<Target> {
    match (path, name) {
        (Some(p), None) => parse_target(&fs::read_to_string(p)?),
        (None, Some(b)) => Ok(Target::Unitary(builtin(b)?)),
        _ => Err(Error::Invalid("give exactly one of --input and --builtin".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_round_trip() {
        let u = builtin("toffoli").unwrap();
        let text = serde_json::to_string(&unitary_to_json(&u)).unwrap();
        match parse_target(&text).unwrap() {
            Target::Unitary(v) => assert_eq!(u, v),
            Target::Channel(_) => panic!("parsed as channel"),
        }
    }

    #[test]
    fn channel_input() {
        let a = ChannelMatrix::identity(1);
        let text = format!("{{\"channel\":{}}}", serde_json::to_string(&a.to_json()).unwrap());
        assert!(matches!(parse_target(&text).unwrap(), Target::Channel(c) if c == a));
        assert!(matches!(parse_target("{\"n\":1}"), Err(Error::Parse(_))));
    }
}
