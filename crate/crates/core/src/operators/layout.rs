//! Named registers laid out on a line of sites.
//!
//! Site 0 is the most significant digit of a basis label. A register is a
//! contiguous block of sites sharing a local dimension (2 for qubits).

use std::ops::Range;

use crate::{Error, Result};

/// Largest Hilbert-space dimension a layout may describe.
const MAX_DIM: u128 = 1 << 62;

/// A named block of sites with a common local dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub sites: usize,
    pub levels: usize,
}

impl Register {
    pub fn qubits(name: &str, sites: usize) -> Self {
        Register { name: name.to_string(), sites, levels: 2 }
    }

    pub fn qudits(name: &str, sites: usize, levels: usize) -> Self {
        Register { name: name.to_string(), sites, levels }
    }
}

/// Ordered sequence of registers.
///
/// Invariants: register names are unique, every register has at least one
/// site and at least two levels, and the total dimension fits in `usize`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    offsets: Vec<usize>,
    site_dims: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        if registers.is_empty() {
            return Err(Error::Layout("layout has no registers".into()));
        }
        let mut offsets = Vec::with_capacity(registers.len());
        let mut site_dims = Vec::new();
        for (k, reg) in registers.iter().enumerate() {
            if reg.sites == 0 {
                return Err(Error::Layout(format!("register {} has no sites", reg.name)));
            }
            if reg.levels < 2 {
                return Err(Error::Layout(format!("register {} has fewer than 2 levels", reg.name)));
            }
            if registers[..k].iter().any(|r| r.name == reg.name) {
                return Err(Error::Layout(format!("duplicate register name {}", reg.name)));
            }
            offsets.push(site_dims.len());
            site_dims.extend(std::iter::repeat_n(reg.levels, reg.sites));
        }
        let mut dim: u128 = 1;
        for &d in &site_dims {
            dim *= d as u128;
            if dim > MAX_DIM {
                return Err(Error::DimensionOverflow(format!("layout with {} sites is too large", site_dims.len())));
            }
        }
        let mut strides = vec![1usize; site_dims.len()];
        for i in (0..site_dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * site_dims[i + 1];
        }
        Ok(RegisterLayout { registers, offsets, site_dims, strides, dim: dim as usize })
    }

    /// Layout made only of qubit registers.
    pub fn qubits(spec: &[(&str, usize)]) -> Result<Self> {
        Self::new(spec.iter().map(|&(n, c)| Register::qubits(n, c)).collect())
    }

    /// New layout with `reg` appended after the existing registers.
    pub fn with_register(&self, reg: Register) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs.push(reg);
        Self::new(regs)
    }

    /// New layout with `reg` placed before the existing registers.
    pub fn with_leading_register(&self, reg: Register) -> Result<Self> {
        let mut regs = vec![reg];
        regs.extend(self.registers.iter().cloned());
        Self::new(regs)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn num_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn site_dim(&self, site: usize) -> usize {
        self.site_dims[site]
    }

    /// Stride of each site in the basis index.
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_qubit_only(&self) -> bool {
        self.site_dims.iter().all(|&d| d == 2)
    }

    /// Base-2 logarithm of the dimension, rounded up.
    pub fn log2_dim(&self) -> f64 {
        (self.dim as f64).log2()
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn has_register(&self, name: &str) -> bool {
        self.register(name).is_some()
    }

    /// Site range occupied by register `name`.
    pub fn range(&self, name: &str) -> Result<Range<usize>> {
        let k = self
            .registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::Layout(format!("no register named {name}")))?;
        let start = self.offsets[k];
        Ok(start..start + self.registers[k].sites)
    }

    /// Global site index of site `k` (0-based) inside register `name`.
    pub fn site(&self, name: &str, k: usize) -> Result<usize> {
        let r = self.range(name)?;
        if k >= r.len() {
            return Err(Error::Layout(format!("register {name} has no site {k}")));
        }
        Ok(r.start + k)
    }

    /// Basis index of the given per-site digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.num_sites());
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Per-site digits of basis index `index`.
    pub fn digits_of(&self, index: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.site_dims).map(|(s, d)| (index / s) % d).collect()
    }

    /// Product of the local dimensions of `sites`.
    pub fn support_dim(&self, sites: &[usize]) -> usize {
        sites.iter().map(|&s| self.site_dims[s]).product()
    }

    /// Offsets into the full basis index for every basis state of `sites`,
    /// enumerated with the first listed site most significant.
    pub fn local_offsets(&self, sites: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &s in sites {
            let d = self.site_dims[s];
            let stride = self.strides[s];
            let mut next = Vec::with_capacity(out.len() * d);
            for &o in &out {
                for v in 0..d {
                    next.push(o + v * stride);
                }
            }
            out = next;
        }
        out
    }

    /// Sites not listed in `sites`, in increasing order.
    pub fn complement(&self, sites: &[usize]) -> Vec<usize> {
        (0..self.num_sites()).filter(|s| !sites.contains(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_zero_is_most_significant() {
        let l = RegisterLayout::qubits(&[("A", 2), ("B", 1)]).unwrap();
        assert_eq!(l.dim(), 8);
        assert_eq!(l.strides(), &[4, 2, 1]);
        assert_eq!(l.index_of(&[1, 0, 1]), 5);
        assert_eq!(l.digits_of(6), vec![1, 1, 0]);
    }

    #[test]
    fn qudit_registers() {
        let l = RegisterLayout::new(vec![Register::qubits("Q", 1), Register::qudits("C", 1, 4)]).unwrap();
        assert_eq!(l.dim(), 8);
        assert_eq!(l.site("C", 0).unwrap(), 1);
        assert_eq!(l.local_offsets(&[1]), vec![0, 1, 2, 3]);
        assert_eq!(l.local_offsets(&[0]), vec![0, 4]);
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(RegisterLayout::qubits(&[("A", 1), ("A", 1)]).is_err());
        assert!(RegisterLayout::qubits(&[("A", 0)]).is_err());
        assert!(RegisterLayout::qubits(&[]).is_err());
        assert!(RegisterLayout::qubits(&[("A", 70)]).is_err());
    }
}
