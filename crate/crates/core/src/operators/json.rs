//! JSON interchange for layouts and Hamiltonians.
//!
//! Layout entries are `[name, count]` for qubits or `[name, count, levels]`
//! for qudits. Blocks are row-major lists of `[re, im]` pairs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Hamiltonian, LocalTerm, Register, RegisterLayout};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LayoutEntry {
    Qubits(String, usize),
    Qudits(String, usize, usize),
}

pub fn layout_to_json(layout: &RegisterLayout) -> Vec<LayoutEntry> {
    layout
        .registers()
        .iter()
        .map(|r| {
            if r.levels == 2 {
                LayoutEntry::Qubits(r.name.clone(), r.sites)
            } else {
                LayoutEntry::Qudits(r.name.clone(), r.sites, r.levels)
            }
        })
        .collect()
}

pub fn layout_from_json(entries: &[LayoutEntry]) -> Result<RegisterLayout> {
    RegisterLayout::new(
        entries
            .iter()
            .map(|e| match e {
                LayoutEntry::Qubits(n, c) => Register::qubits(n, *c),
                LayoutEntry::Qudits(n, c, l) => Register::qudits(n, *c, *l),
            })
            .collect(),
    )
}

pub fn matrix_to_json(m: &DMatrix<C64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

/// Square matrix from a row-major list of `[re, im]` pairs.
pub fn matrix_from_json(entries: &[[f64; 2]]) -> Result<DMatrix<C64>> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n * n != entries.len() || n == 0 {
        return Err(Error::Input(format!("{} entries do not form a square matrix", entries.len())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| C64::new(entries[i * n + j][0], entries[i * n + j][1])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub support: Vec<usize>,
    pub coefficient: f64,
    pub block: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub layout: Vec<LayoutEntry>,
    pub terms: Vec<TermJson>,
}

impl HamiltonianJson {
    pub fn from_hamiltonian(h: &Hamiltonian) -> Self {
        HamiltonianJson {
            layout: layout_to_json(h.layout()),
            terms: h
                .terms()
                .iter()
                .map(|t| TermJson {
                    support: t.support().to_vec(),
                    coefficient: t.coefficient(),
                    block: matrix_to_json(t.block()),
                    tag: t.tag().map(str::to_string),
                })
                .collect(),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<Hamiltonian> {
        let layout = layout_from_json(&self.layout)?;
        let mut h = Hamiltonian::new(layout.clone());
        for t in &self.terms {
            let block = matrix_from_json(&t.block)?;
            let mut term = LocalTerm::from_ordered(&t.support, block, t.coefficient, &layout)?;
            if let Some(tag) = &t.tag {
                term = term.with_tag(tag);
            }
            h.push(term)?;
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::{kron, pauli_x, pauli_y};

    #[test]
    fn round_trip() {
        let l = RegisterLayout::new(vec![Register::qubits("A", 2), Register::qudits("C", 1, 3)]).unwrap();
        let mut h = Hamiltonian::new(l);
        h.push(LocalTerm::new(vec![0, 1], kron(&pauli_x(), &pauli_y()), 0.25).unwrap().with_tag("x")).unwrap();
        let text = serde_json::to_string(&HamiltonianJson::from_hamiltonian(&h)).unwrap();
        let back: HamiltonianJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_hamiltonian().unwrap(), h);
        assert!(text.contains("[\"C\",1,3]"));
    }
}
