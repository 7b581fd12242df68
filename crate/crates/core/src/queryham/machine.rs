//! Adaptive query machines: a depth-`m` binary tree of Hamiltonians.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::operators::json::HamiltonianJson;
use crate::operators::Hamiltonian;
use crate::spectra::dense::min_eigenvalue;
use crate::{Error, Result};

/// Slack applied to the validity thresholds `ε` and `3ε`.
pub const VALIDITY_SLACK: f64 = 1e-10;

/// String of query answers `y₁y₂…`, first bit most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Input(format!("{s:?} is not a bit string"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }

    /// The `len`-bit big-endian encoding of `value`.
    pub fn from_value(value: usize, len: usize) -> Self {
        BitString((0..len).map(|k| ((value >> (len - 1 - k)) & 1) as u8).collect())
    }

    /// All strings of length `len` in increasing order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |v| BitString::from_value(v, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn value(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString(self.0[..len].to_vec())
    }

    pub fn pushed(&self, bit: u8) -> BitString {
        let mut v = self.0.clone();
        v.push(bit);
        BitString(v)
    }

    pub fn as_digits(&self) -> Vec<usize> {
        self.0.iter().map(|&b| b as usize).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    ValidYes,
    ValidNo,
    Invalid,
}

/// Class of a query string relative to the machine's valid answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryStringClass {
    /// Agrees with every valid answer on its path.
    Correct,
    /// Disagrees somewhere, and every disagreeing bit is 0.
    Incorrect,
    /// Some disagreeing bit is 1.
    StronglyIncorrect,
}

/// Query Hamiltonian at one tree node, with its ground energy cached.
#[derive(Clone, Debug)]
pub struct QueryNode {
    pub hamiltonian: Hamiltonian,
    pub ground_energy: f64,
}

/// Depth-`m` adaptive tree of positive semidefinite query Hamiltonians with
/// a total output map on `{0,1}^m`.
#[derive(Clone, Debug)]
pub struct QueryMachine {
    m: usize,
    epsilon: f64,
    nodes: BTreeMap<BitString, QueryNode>,
    outputs: BTreeMap<BitString, bool>,
    proof_qubits: usize,
}

impl QueryMachine {
    pub fn new(
        m: usize,
        epsilon: f64,
        nodes: BTreeMap<BitString, Hamiltonian>,
        outputs: BTreeMap<BitString, bool>,
        proof_qubits: usize,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Machine("depth m must be at least 1".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Machine("ε must be positive".into()));
        }
        for depth in 0..m {
            for p in BitString::all(depth) {
                if !nodes.contains_key(&p) {
                    return Err(Error::Machine(format!(
                        "missing query Hamiltonian for prefix {p:?}",
                        p = p.to_string()
                    )));
                }
            }
        }
        if nodes.len() != (1 << m) - 1 {
            return Err(Error::Machine("query tree has nodes beyond depth m − 1".into()));
        }
        for y in BitString::all(m) {
            if !outputs.contains_key(&y) {
                return Err(Error::Machine(format!("output map is missing string {y}")));
            }
        }
        if outputs.len() != 1 << m {
            return Err(Error::Machine("output map has strings of the wrong length".into()));
        }
        let mut built = BTreeMap::new();
        for (p, h) in nodes {
            if !h.layout().is_qubit_only() {
                return Err(Error::Machine(format!("query Hamiltonian at {p} is not on qubits")));
            }
            let ground_energy = min_eigenvalue(&h.realize_dense()?);
            if ground_energy < -VALIDITY_SLACK {
                return Err(Error::Machine(format!("query Hamiltonian at {p} is not positive semidefinite")));
            }
            built.insert(p, QueryNode { hamiltonian: h, ground_energy });
        }
        Ok(QueryMachine { m, epsilon, nodes: built, outputs, proof_qubits })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn proof_qubits(&self) -> usize {
        self.proof_qubits
    }

    pub fn node(&self, prefix: &BitString) -> &QueryNode {
        &self.nodes[prefix]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&BitString, &QueryNode)> {
        self.nodes.iter()
    }

    pub fn output(&self, y: &BitString) -> bool {
        self.outputs[y]
    }

    pub fn outputs(&self) -> &BTreeMap<BitString, bool> {
        &self.outputs
    }

    pub fn validity(&self, prefix: &BitString) -> Validity {
        let l = self.node(prefix).ground_energy;
        if l <= self.epsilon + VALIDITY_SLACK {
            Validity::ValidYes
        } else if l >= 3.0 * self.epsilon - VALIDITY_SLACK {
            Validity::ValidNo
        } else {
            Validity::Invalid
        }
    }

    pub fn has_valid_query(&self) -> bool {
        self.nodes.keys().any(|p| self.validity(p) != Validity::Invalid)
    }

    /// Qubits of register `Y_i` (`i` 0-based): the widest node at depth `i`.
    pub fn register_sizes(&self) -> Vec<usize> {
        (0..self.m)
            .map(|d| BitString::all(d).map(|p| self.node(&p).hamiltonian.layout().num_sites()).max().unwrap())
            .collect()
    }

    pub fn classify(&self, y: &BitString) -> QueryStringClass {
        let mut wrong_zero = false;
        for i in 0..self.m {
            match (self.validity(&y.prefix(i)), y.bit(i)) {
                (Validity::ValidNo, 1) => return QueryStringClass::StronglyIncorrect,
                (Validity::ValidYes, 0) => wrong_zero = true,
                _ => {}
            }
        }
        if wrong_zero {
            QueryStringClass::Incorrect
        } else {
            QueryStringClass::Correct
        }
    }

    pub fn correct_strings(&self) -> Vec<BitString> {
        BitString::all(self.m).filter(|y| self.classify(y) == QueryStringClass::Correct).collect()
    }

    /// Indices `i` (0-based) where the node on `y`'s path is invalid.
    pub fn invalid_positions(&self, y: &BitString) -> Vec<usize> {
        (0..self.m).filter(|&i| self.validity(&y.prefix(i)) == Validity::Invalid).collect()
    }

    /// Copy with the query at `prefix` replaced.
    pub fn with_node(&self, prefix: &BitString, h: Hamiltonian) -> Result<Self> {
        let mut nodes: BTreeMap<BitString, Hamiltonian> =
            self.nodes.iter().map(|(p, n)| (p.clone(), n.hamiltonian.clone())).collect();
        nodes.insert(prefix.clone(), h);
        QueryMachine::new(self.m, self.epsilon, nodes, self.outputs.clone(), self.proof_qubits)
    }

    /// Every machine obtained by replacing each invalid query with a valid
    /// YES or NO query (`λ = 0` or `λ = 3ε` diagonal stand-ins).
    pub fn resolutions(&self) -> Result<Vec<QueryMachine>> {
        let invalid: Vec<BitString> =
            self.nodes.keys().filter(|p| self.validity(p) == Validity::Invalid).cloned().collect();
        let mut out = Vec::new();
        for mask in 0..1usize << invalid.len() {
            let mut mach = self.clone();
            for (k, p) in invalid.iter().enumerate() {
                let layout = self.node(p).hamiltonian.layout().clone();
                let energy = if (mask >> k) & 1 == 1 { 0.0 } else { 3.0 * self.epsilon };
                let h = Hamiltonian::with_terms(layout, vec![crate::operators::LocalTerm::scalar(energy)])?;
                mach = mach.with_node(p, h)?;
            }
            out.push(mach);
        }
        Ok(out)
    }
}

/// Query machine file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryMachineJson {
    pub m: usize,
    pub epsilon: f64,
    pub nodes: BTreeMap<String, HamiltonianJson>,
    #[serde(rename = "final")]
    pub outputs: BTreeMap<String, u8>,
    #[serde(rename = "M_proof")]
    pub proof_qubits: usize,
}

impl QueryMachineJson {
    pub fn from_machine(mach: &QueryMachine) -> Self {
        QueryMachineJson {
            m: mach.m,
            epsilon: mach.epsilon,
            nodes: mach
                .nodes
                .iter()
                .map(|(p, n)| (p.to_string(), HamiltonianJson::from_hamiltonian(&n.hamiltonian)))
                .collect(),
            outputs: mach.outputs.iter().map(|(y, &b)| (y.to_string(), b as u8)).collect(),
            proof_qubits: mach.proof_qubits,
        }
    }

    pub fn to_machine(&self) -> Result<QueryMachine> {
        let nodes = self
            .nodes
            .iter()
            .map(|(p, h)| Ok((BitString::parse(p)?, h.to_hamiltonian()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let outputs = self
            .outputs
            .iter()
            .map(|(y, &b)| match b {
                0 | 1 => Ok((BitString::parse(y)?, b == 1)),
                _ => Err(Error::Machine(format!("output for {y} must be 0 or 1"))),
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        QueryMachine::new(self.m, self.epsilon, nodes, outputs, self.proof_qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queryham::fixtures::{diagonal_node, machine_from_energies};

    #[test]
    fn bit_strings() {
        let y = BitString::parse("101").unwrap();
        assert_eq!(y.value(), 5);
        assert_eq!(y.weight(), 2);
        assert_eq!(y.prefix(2).to_string(), "10");
        assert_eq!(BitString::from_value(5, 3), y);
        assert!(BitString::parse("12").is_err());
    }

    #[test]
    fn validity_thresholds() {
        let eps = 0.1;
        let m = machine_from_energies(eps, &[("", 0.1)], &[("0", 0), ("1", 1)]).unwrap();
        assert_eq!(m.validity(&BitString::empty()), Validity::ValidYes);
        let m = machine_from_energies(eps, &[("", 0.3)], &[("0", 0), ("1", 1)]).unwrap();
        assert_eq!(m.validity(&BitString::empty()), Validity::ValidNo);
        let m = machine_from_energies(eps, &[("", 0.2)], &[("0", 0), ("1", 1)]).unwrap();
        assert_eq!(m.validity(&BitString::empty()), Validity::Invalid);
        assert!(!m.has_valid_query());
    }

    #[test]
    fn classification_by_wrong_bits() {
        let eps = 0.1;
        // Root YES, child "1" NO, child "0" YES.
        let m = machine_from_energies(
            eps,
            &[("", 0.0), ("0", 0.0), ("1", 0.5)],
            &[("00", 0), ("01", 0), ("10", 1), ("11", 0)],
        )
        .unwrap();
        let c = |s: &str| m.classify(&BitString::parse(s).unwrap());
        assert_eq!(c("10"), QueryStringClass::Correct);
        assert_eq!(c("00"), QueryStringClass::Incorrect);
        assert_eq!(c("01"), QueryStringClass::Incorrect);
        assert_eq!(c("11"), QueryStringClass::StronglyIncorrect);
        assert_eq!(m.correct_strings(), vec![BitString::parse("10").unwrap()]);
    }

    #[test]
    fn rejects_missing_nodes_and_negative_energy() {
        let eps = 0.1;
        assert!(machine_from_energies(eps, &[("", 0.0)], &[("0", 0)]).is_err());
        let mut nodes = BTreeMap::new();
        nodes.insert(BitString::empty(), diagonal_node(&[-1.0, 0.0]));
        let outs = BitString::all(1).map(|y| (y, true)).collect();
        assert!(QueryMachine::new(1, eps, nodes, outs, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = machine_from_energies(0.1, &[("", 0.05)], &[("0", 0), ("1", 1)]).unwrap();
        let text = serde_json::to_string(&QueryMachineJson::from_machine(&m)).unwrap();
        assert!(text.contains("\"final\"") && text.contains("\"M_proof\""));
        let back: QueryMachineJson = serde_json::from_str(&text).unwrap();
        let m2 = back.to_machine().unwrap();
        assert_eq!(m2.validity(&BitString::empty()), Validity::ValidYes);
    }
}
