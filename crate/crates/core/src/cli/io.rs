//! JSON output, atomic writes, run manifests and machine loading.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::queryham::fixtures::{machine_from_energies, named_machine};
use crate::queryham::{QueryMachine, QueryMachineJson};
use crate::{Error, Result};

/// Pretty JSON with every float written as 17 significant digits.
struct FloatFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for FloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialises `value` as pretty JSON with 17-significant-digit floats.
/// Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = p.file_name().ok_or_else(|| Error::Input(format!("{} is not a file path", p.display())))?;
            let tmp: PathBuf = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p).inspect_err(|_| {
                let _ = std::fs::remove_file(&tmp);
            })?;
            Ok(())
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reproducibility record embedded in every output.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: String,
    /// SHA-256 of every input, keyed by the argument that named it.
    pub input_hashes: BTreeMap<String, String>,
    pub seed: u64,
    pub tol: f64,
    pub dense_cutoff: u32,
    pub jobs: usize,
    /// Solver backend rule in effect.
    pub backend: String,
    /// Excluded from reproducibility comparisons.
    pub wall_time_ms: u64,
}

/// Reads a file and records its hash under `label`.
pub fn read_input(path: &Path, label: &str, hashes: &mut BTreeMap<String, String>) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    hashes.insert(label.to_string(), sha256_hex(&bytes));
    Ok(bytes)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(bytes: &[u8], what: &str) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Input(format!("malformed {what}: {e}")))
}

/// Default `ε` for `fixture:NAME` machines without an explicit value.
pub const FIXTURE_EPSILON: f64 = 1.0;

/// How a suite or command names a query machine.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MachineSpec {
    /// A named fixture.
    Fixture {
        fixture: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    /// One-qubit nodes with the given ground energies.
    Energies { epsilon: f64, energies: BTreeMap<String, f64>, outputs: BTreeMap<String, u8> },
    /// A full machine description.
    Inline(QueryMachineJson),
}

impl MachineSpec {
    pub fn label(&self) -> String {
        match self {
            MachineSpec::Fixture { fixture, .. } => fixture.clone(),
            MachineSpec::Energies { energies, .. } => {
                let parts: Vec<String> = energies.iter().map(|(p, l)| format!("[{p}]={l}")).collect();
                format!("energies({})", parts.join(","))
            }
            MachineSpec::Inline(j) => format!("inline(m={})", j.m),
        }
    }

    pub fn build(&self, default_eps: f64) -> Result<QueryMachine> {
        match self {
            MachineSpec::Fixture { fixture, epsilon } => named_machine(fixture, epsilon.unwrap_or(default_eps)),
            MachineSpec::Energies { epsilon, energies, outputs } => {
                let nodes: Vec<(&str, f64)> = energies.iter().map(|(p, &l)| (p.as_str(), l)).collect();
                let outs: Vec<(&str, u8)> = outputs.iter().map(|(y, &b)| (y.as_str(), b)).collect();
                machine_from_energies(*epsilon, &nodes, &outs)
            }
            MachineSpec::Inline(j) => j.to_machine(),
        }
    }
}

/// Loads a machine from `fixture:NAME[:EPS]` or a JSON file, recording the
/// hash of the canonical machine JSON.
pub fn load_machine(arg: &str, hashes: &mut BTreeMap<String, String>) -> Result<QueryMachine> {
    let machine = if let Some(rest) = arg.strip_prefix("fixture:") {
        let (name, eps) = match rest.split_once(':') {
            Some((n, e)) => (n, e.parse::<f64>().map_err(|_| Error::Input(format!("bad fixture epsilon '{e}'")))?),
            None => (rest, FIXTURE_EPSILON),
        };
        named_machine(name, eps)?
    } else {
        let bytes = std::fs::read(arg).map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))?;
        parse_json::<QueryMachineJson>(&bytes, "query machine")?.to_machine()?
    };
    hashes.insert("machine".into(), machine_hash(&machine)?);
    Ok(machine)
}

/// SHA-256 of the machine's compact JSON form.
pub fn machine_hash(machine: &QueryMachine) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(&QueryMachineJson::from_machine(machine))?.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        let x = [0.1f64, 1.0 / 3.0, 1e-300, -2.5e17, 0.0];
        let s = to_json_string(&x).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert_eq!(to_json_string(&f64::NAN).unwrap().trim(), "null");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        emit(Some(&p), "a").unwrap();
        emit(Some(&p), "b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn machine_specs() {
        let s: MachineSpec = serde_json::from_str(r#"{"fixture": "adaptive"}"#).unwrap();
        assert_eq!(s.build(0.1).unwrap().m(), 2);
        let s: MachineSpec =
            serde_json::from_str(r#"{"epsilon": 0.1, "energies": {"": 0.2}, "outputs": {"0": 0, "1": 0}}"#).unwrap();
        assert_eq!(s.build(1.0).unwrap().m(), 1);
        let mut h = BTreeMap::new();
        assert!(load_machine("fixture:nope", &mut h).is_err());
        assert_eq!(load_machine("fixture:yes:0.5", &mut h).unwrap().epsilon(), 0.5);
    }
}
