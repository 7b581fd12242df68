//! Query Hamiltonians.
//!
//! Level `i` (0-based) contributes, for every prefix `p` of length `i`,
//! `4^{-i} · (|p0⟩⟨p0| ⊗ Z_i + |p1⟩⟨p1| ⊗ H_p)` where `H_p` is the node's
//! query acting on `Y_{i+1}` and `Z_i` is `2ε·I` or the gadget
//! `2ε·I + ε·Σ_j |1⟩⟨1|_j` (unique ground state `2ε`, gap `ε`).
//!
//! In the unary encoding the `2^m − 1` qubits of `X` hold `1^{|x|}0^{…}` and
//! the projector onto strings with prefix `q` is the indicator of an integer
//! range `[lo, hi]`: `q_{lo} = 1` (for `lo ≥ 1`) and `q_{hi+1} = 0` (for
//! `hi + 1 < 2^m`), at most two qubits. `3ε·Σ_j |0⟩⟨0|_j ⊗ |1⟩⟨1|_{j+1}`
//! penalises non-unary patterns.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BitString, QueryMachine};
use crate::operators::matrices::{kron, pattern_projector, projector};
use crate::operators::{Hamiltonian, LocalTerm, Register, RegisterLayout};
use crate::{Error, Result, C64};

pub const TAG_QUERY: &str = "H_query";
pub const TAG_QUERY_STAB: &str = "H_stab";
pub const TAG_GADGET: &str = "H_gadget";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryEncoding {
    Binary,
    Unary,
}

/// Operator on `Y_i` for answer `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroBranch {
    /// `2ε·I`.
    Uniform,
    /// `2ε·I + ε·Σ_j |1⟩⟨1|_j`.
    Gadget,
}

#[derive(Clone, Debug)]
pub struct QueryOptions {
    pub encoding: QueryEncoding,
    pub zero_branch: ZeroBranch,
    /// Multiplier on the unary stabiliser weight `3ε`.
    pub stab_scale: f64,
    /// Penalise sites of `Y_i` beyond a node's own width with `ε·|1⟩⟨1|`,
    /// so every block keeps a unique ground state.
    pub pad_unused: bool,
}

impl QueryOptions {
    pub fn binary() -> Self {
        QueryOptions {
            encoding: QueryEncoding::Binary,
            zero_branch: ZeroBranch::Uniform,
            stab_scale: 1.0,
            pad_unused: false,
        }
    }

    pub fn unary() -> Self {
        QueryOptions { encoding: QueryEncoding::Unary, ..Self::binary() }
    }
}

/// A query Hamiltonian on `X` followed by `Y1 … Ym`.
#[derive(Clone, Debug)]
pub struct QueryHamiltonian {
    pub hamiltonian: Hamiltonian,
    pub encoding: QueryEncoding,
    pub epsilon: f64,
    pub m: usize,
    pub x_sites: Vec<usize>,
    pub y_sites: Vec<Vec<usize>>,
}

/// `X` (binary: `m` qubits, unary: `2^m − 1`) then `Y1 … Ym`.
pub fn query_layout(machine: &QueryMachine, encoding: QueryEncoding) -> Result<RegisterLayout> {
    let m = machine.m();
    let x = match encoding {
        QueryEncoding::Binary => m,
        QueryEncoding::Unary => (1 << m) - 1,
    };
    let mut regs = vec![Register::qubits("X", x)];
    for (i, n) in machine.register_sizes().into_iter().enumerate() {
        regs.push(Register::qubits(&format!("Y{}", i + 1), n));
    }
    RegisterLayout::new(regs)
}

/// Binary-encoded query Hamiltonian at energy scale `eps`.
pub fn build_query_hamiltonian(machine: &QueryMachine, eps: f64) -> Result<QueryHamiltonian> {
    build_query_hamiltonian_with(machine, eps, &QueryOptions::binary())
}

/// Unary-encoded, 4-local (for 2-local queries) query Hamiltonian.
pub fn build_unary_query_hamiltonian(machine: &QueryMachine, eps: f64) -> Result<QueryHamiltonian> {
    build_query_hamiltonian_with(machine, eps, &QueryOptions::unary())
}

/// `(sites, block)` projector onto `X`-values whose string starts with `q`.
pub fn prefix_indicator(
    q: &BitString,
    m: usize,
    encoding: QueryEncoding,
    x_sites: &[usize],
) -> (Vec<usize>, DMatrix<C64>) {
    match encoding {
        QueryEncoding::Binary => (x_sites[..q.len()].to_vec(), pattern_projector(&q.as_digits(), &vec![2; q.len()])),
        QueryEncoding::Unary => {
            let width = 1usize << (m - q.len());
            let lo = q.value() * width;
            let hi = lo + width - 1;
            let mut sites = Vec::new();
            let mut block = DMatrix::identity(1, 1);
            // Unary qubit j (1-based) is set iff |x| ≥ j.
            if lo >= 1 {
                sites.push(x_sites[lo - 1]);
                block = kron(&block, &projector(2, 1));
            }
            if hi + 1 < 1 << m {
                sites.push(x_sites[hi]);
                block = kron(&block, &projector(2, 0));
            }
            (sites, block)
        }
    }
}

pub fn build_query_hamiltonian_with(machine: &QueryMachine, eps: f64, opts: &QueryOptions) -> Result<QueryHamiltonian> {
    if !(eps > 0.0) {
        return Err(Error::Input("ε must be positive".into()));
    }
    let m = machine.m();
    let layout = query_layout(machine, opts.encoding)?;
    let x_sites: Vec<usize> = layout.range("X")?.collect();
    let y_sites: Vec<Vec<usize>> =
        (1..=m).map(|i| layout.range(&format!("Y{i}")).map(|r| r.collect())).collect::<Result<_>>()?;
    let mut h = Hamiltonian::new(layout.clone());

    for (depth, ys) in y_sites.iter().enumerate() {
        let weight = 0.25f64.powi(depth as i32);
        for p in BitString::all(depth) {
            let (s0, b0) = prefix_indicator(&p.pushed(0), m, opts.encoding, &x_sites);
            h.push(LocalTerm::from_ordered(&s0, b0.clone(), 2.0 * eps * weight, &layout)?.with_tag(TAG_QUERY))?;
            if opts.zero_branch == ZeroBranch::Gadget {
                for &y in ys {
                    let mut sites = s0.clone();
                    sites.push(y);
                    let block = kron(&b0, &projector(2, 1));
                    h.push(LocalTerm::from_ordered(&sites, block, eps * weight, &layout)?.with_tag(TAG_GADGET))?;
                }
            }

            let (s1, b1) = prefix_indicator(&p.pushed(1), m, opts.encoding, &x_sites);
            let node = &machine.node(&p).hamiltonian;
            for t in node.terms() {
                let mut sites = s1.clone();
                sites.extend(t.support().iter().map(|&k| ys[k]));
                let block = kron(&b1, t.block());
                h.push(LocalTerm::from_ordered(&sites, block, t.coefficient() * weight, &layout)?.with_tag(TAG_QUERY))?;
            }
            if opts.pad_unused {
                for &y in &ys[node.layout().num_sites()..] {
                    let mut sites = s1.clone();
                    sites.push(y);
                    let block = kron(&b1, &projector(2, 1));
                    h.push(LocalTerm::from_ordered(&sites, block, eps * weight, &layout)?.with_tag(TAG_GADGET))?;
                }
            }
        }
    }

    if opts.encoding == QueryEncoding::Unary {
        for j in 0..x_sites.len().saturating_sub(1) {
            let block = pattern_projector(&[0, 1], &[2, 2]);
            let term = LocalTerm::new(vec![x_sites[j], x_sites[j + 1]], block, 3.0 * eps * opts.stab_scale)?;
            h.push(term.with_tag(TAG_QUERY_STAB))?;
        }
    }

    Ok(QueryHamiltonian { hamiltonian: h, encoding: opts.encoding, epsilon: eps, m, x_sites, y_sites })
}

/// `x̂ = 1^{|x|} 0^{2^m − 1 − |x|}` as digits.
pub fn unary_pattern(x: &BitString) -> Vec<usize> {
    let width = (1usize << x.len()) - 1;
    (0..width).map(|j| usize::from(j < x.value())).collect()
}

/// Inverse of [`unary_pattern`] for valid unary digit strings.
pub fn decode_unary(digits: &[usize], m: usize) -> Option<BitString> {
    let ones = digits.iter().take_while(|&&d| d == 1).count();
    if digits[ones..].iter().any(|&d| d != 0) {
        return None;
    }
    Some(BitString::from_value(ones, m))
}
