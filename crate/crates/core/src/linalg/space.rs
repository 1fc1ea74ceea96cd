//! Labelled bases for composite registers.
//!
//! A [`Layout`] is a tensor product of named registers; the leftmost register
//! is the most significant digit of the flat index. A [`Space`] is either a
//! layout or an ordered direct sum of spaces, whose blocks occupy consecutive
//! index ranges in declaration order.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// What a register stores. Only used for labelling and audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterKind {
    /// A bounded counter `0..D`.
    Counter,
    /// A single qubit.
    Bit,
    /// An index into a workspace of declared dimension.
    Workspace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub dim: usize,
    pub kind: RegisterKind,
}

impl Register {
    pub fn new(name: &str, dim: usize, kind: RegisterKind) -> Self {
        Register { name: name.to_string(), dim, kind }
    }

    pub fn counter(name: &str, dim: usize) -> Self {
        Self::new(name, dim, RegisterKind::Counter)
    }

    pub fn bit(name: &str) -> Self {
        Self::new(name, 2, RegisterKind::Bit)
    }

    pub fn workspace(name: &str, dim: usize) -> Self {
        Self::new(name, dim, RegisterKind::Workspace)
    }
}

/// Tensor product of registers, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    regs: Vec<Register>,
}

impl Layout {
    pub fn new(regs: Vec<Register>) -> Self {
        Layout { regs }
    }

    /// A single anonymous workspace register of dimension `dim`.
    pub fn flat(dim: usize) -> Self {
        Layout { regs: alloc::vec![Register::workspace("x", dim)] }
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    pub fn dims(&self) -> Vec<usize> {
        self.regs.iter().map(|r| r.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.regs.iter().map(|r| r.dim).product()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.regs.iter().position(|r| r.name == name)
    }

    /// Stride of register `k` in the flat index.
    pub fn stride(&self, k: usize) -> usize {
        self.regs[k + 1..].iter().map(|r| r.dim).product()
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.regs.len() {
            return Err(Error::DimensionMismatch { expected: self.regs.len(), found: digits.len() });
        }
        let mut idx = 0;
        for (d, r) in digits.iter().zip(&self.regs) {
            if *d >= r.dim {
                return Err(Error::Parameter(alloc::format!(
                    "digit {d} out of range for register {} of dim {}",
                    r.name,
                    r.dim
                )));
            }
            idx = idx * r.dim + d;
        }
        Ok(idx)
    }

    pub fn digits_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.regs.len()];
        for k in (0..self.regs.len()).rev() {
            let d = self.regs[k].dim;
            out[k] = idx % d;
            idx /= d;
        }
        out
    }

    /// Concatenate two layouts as a tensor product (`self` more significant).
    pub fn tensor(&self, other: &Layout) -> Layout {
        let mut regs = self.regs.clone();
        regs.extend(other.regs.iter().cloned());
        Layout { regs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Tensor(Layout),
    Sum(Vec<Space>),
}

/// A basis element of a [`Space`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisLabel {
    Tensor(Vec<usize>),
    Sum { block: usize, inner: Box<BasisLabel> },
}

impl Space {
    pub fn flat(dim: usize) -> Self {
        Space::Tensor(Layout::flat(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Tensor(l) => l.dim(),
            Space::Sum(blocks) => blocks.iter().map(Space::dim).sum(),
        }
    }

    pub fn layout(&self) -> Option<&Layout> {
        match self {
            Space::Tensor(l) => Some(l),
            Space::Sum(_) => None,
        }
    }

    /// Offset of each direct-sum block (empty for a tensor space).
    pub fn block_offsets(&self) -> Vec<usize> {
        match self {
            Space::Tensor(_) => Vec::new(),
            Space::Sum(blocks) => {
                let mut acc = 0;
                blocks
                    .iter()
                    .map(|b| {
                        let o = acc;
                        acc += b.dim();
                        o
                    })
                    .collect()
            }
        }
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        match (self, label) {
            (Space::Tensor(l), BasisLabel::Tensor(d)) => l.index_of(d),
            (Space::Sum(blocks), BasisLabel::Sum { block, inner }) => {
                let b =
                    blocks.get(*block).ok_or_else(|| Error::Parameter(alloc::format!("block {block} out of range")))?;
                let off: usize = blocks[..*block].iter().map(Space::dim).sum();
                Ok(off + b.index_of(inner)?)
            }
            _ => Err(Error::Structure("label shape does not match space".into())),
        }
    }

    pub fn label_of(&self, idx: usize) -> Result<BasisLabel> {
        if idx >= self.dim() {
            return Err(Error::Parameter(alloc::format!("index {idx} out of range")));
        }
        match self {
            Space::Tensor(l) => Ok(BasisLabel::Tensor(l.digits_of(idx))),
            Space::Sum(blocks) => {
                let mut rem = idx;
                for (k, b) in blocks.iter().enumerate() {
                    if rem < b.dim() {
                        return Ok(BasisLabel::Sum { block: k, inner: Box::new(b.label_of(rem)?) });
                    }
                    rem -= b.dim();
                }
                unreachable!("index checked against total dimension")
            }
        }
    }
}
