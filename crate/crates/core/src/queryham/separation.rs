//! Block-by-block check that correct query strings win by `ε/4^m`.

use serde::Serialize;

use super::build::{decode_unary, QueryEncoding, QueryHamiltonian};
use super::{BitString, QueryMachine, QueryStringClass};
use crate::operators::mixed_digits;
use crate::spectra::dense::min_eigenvalue;
use crate::Result;

/// Slack on both separation assertions.
pub const SEPARATION_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockClass {
    Correct,
    Incorrect,
    StronglyIncorrect,
    /// Unary `X` pattern that encodes no string.
    InvalidPattern,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockEntry {
    /// `X` register contents.
    pub pattern: String,
    pub string: Option<String>,
    pub class: BlockClass,
    pub lambda: f64,
    /// `λ_block − λ(H)`.
    pub excess: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub encoding: QueryEncoding,
    pub m: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub required_margin: f64,
    /// Smallest excess over non-correct blocks.
    pub worst_margin: f64,
    /// Best correct block minus `λ(H)`.
    pub correct_excess: f64,
    pub passed: bool,
    pub offending: Vec<String>,
    pub blocks: Vec<BlockEntry>,
}

/// Diagonalises every `X` block of `qh` and checks that the ground energy
/// sits in a correct block and that every other block is at least
/// `ε/4^m` higher, for the claimed `eps`.
pub fn verify_block_separation(qh: &QueryHamiltonian, machine: &QueryMachine, eps: f64) -> Result<SeparationReport> {
    let m = qh.m;
    let h = &qh.hamiltonian;
    let nx = qh.x_sites.len();
    let mut blocks = Vec::with_capacity(1 << nx);
    for v in 0..1usize << nx {
        let digits = mixed_digits(v, &vec![2; nx]);
        let fixed: Vec<(usize, usize)> = qh.x_sites.iter().copied().zip(digits.iter().copied()).collect();
        let lambda = min_eigenvalue(&h.realize_sector(&fixed)?);
        let string = match qh.encoding {
            QueryEncoding::Binary => Some(BitString::from_value(v, m)),
            QueryEncoding::Unary => decode_unary(&digits, m),
        };
        let class = match &string {
            None => BlockClass::InvalidPattern,
            Some(y) => match machine.classify(y) {
                QueryStringClass::Correct => BlockClass::Correct,
                QueryStringClass::Incorrect => BlockClass::Incorrect,
                QueryStringClass::StronglyIncorrect => BlockClass::StronglyIncorrect,
            },
        };
        let pattern: String = digits.iter().map(|d| char::from(b'0' + *d as u8)).collect();
        blocks.push(BlockEntry { pattern, string: string.map(|s| s.to_string()), class, lambda, excess: 0.0 });
    }
    let lambda = blocks.iter().map(|b| b.lambda).fold(f64::INFINITY, f64::min);
    for b in &mut blocks {
        b.excess = b.lambda - lambda;
    }
    let required = eps / 4f64.powi(m as i32);
    let correct_excess =
        blocks.iter().filter(|b| b.class == BlockClass::Correct).map(|b| b.excess).fold(f64::INFINITY, f64::min);
    let worst_margin =
        blocks.iter().filter(|b| b.class != BlockClass::Correct).map(|b| b.excess).fold(f64::INFINITY, f64::min);
    let mut offending = Vec::new();
    if correct_excess > SEPARATION_SLACK {
        offending.push(format!("ground energy is not attained by a correct string (gap {correct_excess:.3e})"));
    }
    for b in blocks.iter().filter(|b| b.class != BlockClass::Correct) {
        if b.excess < required - SEPARATION_SLACK {
            offending.push(format!("block {} ({:?}) is only {:.3e} above λ", b.pattern, b.class, b.excess));
        }
    }
    Ok(SeparationReport {
        encoding: qh.encoding,
        m,
        epsilon: eps,
        lambda,
        required_margin: required,
        worst_margin,
        correct_excess,
        passed: offending.is_empty(),
        offending,
        blocks,
    })
}
