use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{inner, norm, C64, ONE, ZERO};
use super::space::{BasisLabel, Space};
use crate::error::{check_dim, Error, Result};

/// Complex amplitudes over a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Space,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(space: Space, amps: Vec<C64>) -> Result<Self> {
        check_dim(space.dim(), amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Parameter("non-finite amplitude".into()));
        }
        Ok(StateVector { space, amps })
    }

    /// Unlabelled vector over `C^n`.
    pub fn from_amps(amps: Vec<C64>) -> Self {
        StateVector { space: Space::flat(amps.len()), amps }
    }

    pub fn from_real(vals: &[f64]) -> Self {
        Self::from_amps(vals.iter().map(|v| C64::new(*v, 0.0)).collect())
    }

    pub fn zeros(space: Space) -> Self {
        let n = space.dim();
        StateVector { space, amps: vec![ZERO; n] }
    }

    pub fn basis(space: Space, index: usize) -> Result<Self> {
        let n = space.dim();
        if index >= n {
            return Err(Error::Parameter(alloc::format!("basis index {index} >= {n}")));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = ONE;
        Ok(StateVector { space, amps })
    }

    pub fn basis_label(space: Space, label: &BasisLabel) -> Result<Self> {
        let idx = space.index_of(label)?;
        Self::basis(space, idx)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// Same amplitudes, different label descriptor of equal dimension.
    pub fn relabel(self, space: Space) -> Result<Self> {
        check_dim(space.dim(), self.amps.len())?;
        Ok(StateVector { space, amps: self.amps })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Structure("state vectors live in different spaces".into()));
        }
        Ok(())
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_space(other)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(StateVector {
            space: self.space.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(StateVector {
            space: self.space.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        StateVector { space: self.space.clone(), amps: self.amps.iter().map(|a| a * s).collect() }
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Tensor product, `self` on the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let space = match (&self.space, &other.space) {
            (Space::Tensor(a), Space::Tensor(b)) => Space::Tensor(a.tensor(b)),
            _ => Space::flat(self.dim() * other.dim()),
        };
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { space, amps }
    }

    /// Direct sum of vectors in declaration order.
    pub fn direct_sum(parts: &[&StateVector]) -> Self {
        let space = Space::Sum(parts.iter().map(|p| p.space.clone()).collect());
        let amps = parts.iter().flat_map(|p| p.amps.iter().copied()).collect();
        StateVector { space, amps }
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Result<C64> {
        Ok(self.amps[self.space.index_of(label)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::space::{Layout, Register};

    #[test]
    fn combine_only_in_same_space() {
        let a = StateVector::from_real(&[1.0, 0.0]);
        let b = StateVector::from_real(&[0.0, 1.0]);
        assert!(a.add(&b).is_ok());
        let other = StateVector::zeros(Space::Tensor(Layout::new(alloc::vec![Register::bit("q")])));
        assert!(a.add(&other).is_err());
        assert!(StateVector::new(Space::flat(2), alloc::vec![ZERO; 3]).is_err());
    }

    #[test]
    fn direct_sum_and_kron_dimensions() {
        let a = StateVector::from_real(&[1.0, 2.0]);
        let b = StateVector::from_real(&[3.0, 4.0, 5.0]);
        let s = StateVector::direct_sum(&[&a, &b]);
        assert_eq!(s.dim(), 5);
        assert_eq!(s.amps()[2].re, 3.0);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.amps()[5].re, 10.0);
        assert!((s.norm_sqr() - 55.0).abs() < 1e-12);
    }
}
