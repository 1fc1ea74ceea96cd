use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{c64, Matrix, C64, ONE};
use super::space::{Layout, Space};
use super::state::StateVector;
use crate::error::{check_dim, Error, Result};

/// Default tolerance for unitarity and normalisation checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Dense square complex matrix over a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: Matrix,
    certified: bool,
}

impl Operator {
    pub fn new(space: Space, matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Structure(alloc::format!(
                "operator matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        check_dim(space.dim(), matrix.rows())?;
        Ok(Operator { space, matrix, certified: false })
    }

    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(Space::flat(n), matrix)
    }

    pub fn identity(space: Space) -> Self {
        let n = space.dim();
        Operator { space, matrix: Matrix::identity(n), certified: true }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn relabel(self, space: Space) -> Result<Self> {
        check_dim(space.dim(), self.dim())?;
        Ok(Operator { space, ..self })
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Checks `max |U*U - I| <= tol` and marks the operator as certified.
    pub fn certify_unitary(mut self, tol: f64) -> Result<Self> {
        let defect = self.unitarity_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        self.certified = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Operator { space: self.space.clone(), matrix: self.matrix.adjoint(), certified: self.certified }
    }

    /// `self * other` (apply `other` first). Spaces must match.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: self.matrix.matmul(&other.matrix)?,
            certified: self.certified && other.certified,
        })
    }

    /// Product of operators applied right-to-left as written, i.e.
    /// `product([A, B, C]) = A B C`.
    pub fn product(ops: &[&Operator]) -> Result<Self> {
        let (first, rest) = ops.split_first().ok_or_else(|| Error::Parameter("empty operator product".into()))?;
        let mut acc = (*first).clone();
        for op in rest {
            acc = acc.compose(op)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, s: C64) -> Self {
        let unit = (s.norm() - 1.0).abs() < 1e-15;
        Operator { space: self.space.clone(), matrix: self.matrix.scale(s), certified: self.certified && unit }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        StateVector::new(v.space().clone(), self.matrix.mul_vec(v.amps())?)
    }

    pub fn apply_amps(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.matrix.mul_vec(v)
    }

    pub fn distance_max(&self, other: &Operator) -> Result<f64> {
        Ok(self.matrix.sub(&other.matrix)?.max_abs())
    }
}

/// `2 psi psi* - I`.
pub fn reflection_about(psi: &StateVector) -> Result<Operator> {
    reflection_about_tol(psi, DEFAULT_TOL)
}

pub fn reflection_about_tol(psi: &StateVector, tol: f64) -> Result<Operator> {
    let n = psi.norm();
    if (n - 1.0).abs() > tol {
        return Err(Error::NotNormalized { norm: n });
    }
    let a = psi.amps();
    let m = Matrix::from_fn(a.len(), a.len(), |r, c| {
        let v = a[r] * a[c].conj() * 2.0;
        if r == c {
            v - ONE
        } else {
            v
        }
    });
    Ok(Operator { space: psi.space().clone(), matrix: m, certified: true })
}

/// Block-diagonal operator; blocks concatenate in order.
pub fn direct_sum(ops: &[&Operator]) -> Operator {
    let n: usize = ops.iter().map(|o| o.dim()).sum();
    let mut m = Matrix::zeros(n, n);
    let mut off = 0;
    for op in ops {
        let d = op.dim();
        for r in 0..d {
            for c in 0..d {
                m[(off + r, off + c)] = op.matrix[(r, c)];
            }
        }
        off += d;
    }
    let space = Space::Sum(ops.iter().map(|o| o.space.clone()).collect());
    Operator { space, matrix: m, certified: ops.iter().all(|o| o.certified) }
}

/// Kronecker product; the first operator acts on the most significant factor.
pub fn tensor(ops: &[&Operator]) -> Operator {
    let mut matrix = Matrix::identity(1);
    let mut layout: Option<Layout> = Some(Layout::new(Vec::new()));
    for op in ops {
        matrix = matrix.kron(&op.matrix);
        layout = match (layout, op.space.layout()) {
            (Some(l), Some(o)) => Some(l.tensor(o)),
            _ => None,
        };
    }
    let space = match layout {
        Some(l) if !ops.is_empty() => Space::Tensor(l),
        _ => Space::flat(matrix.rows()),
    };
    Operator { space, matrix, certified: ops.iter().all(|o| o.certified) }
}

/// Permutation `|j> -> |j + 1 mod d>`.
pub fn increment_mod(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::Parameter(alloc::format!("increment modulus must be >= 2, got {d}")));
    }
    Ok(Permutation::new((0..d).map(|j| (j + 1) % d).collect())?.to_operator())
}

/// Permutation `|j> -> |j - 1 mod d>`.
pub fn decrement_mod(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::Parameter(alloc::format!("decrement modulus must be >= 2, got {d}")));
    }
    Ok(Permutation::new((0..d).map(|j| (j + d - 1) % d).collect())?.to_operator())
}

/// Basis permutation `|i> -> |image[i]>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || seen[i] {
                return Err(Error::Structure("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation { image })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (i, &j) in self.image.iter().enumerate() {
            out[j] = v[i];
        }
        out
    }

    pub fn to_operator(&self) -> Operator {
        let n = self.image.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &j) in self.image.iter().enumerate() {
            m[(j, i)] = ONE;
        }
        Operator { space: Space::flat(n), matrix: m, certified: true }
    }
}

/// A condition on one register's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond {
    Eq(usize),
    Ne(usize),
}

/// Conjunction of register conditions; empty means "always".
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Predicate {
    terms: Vec<(usize, Cond)>,
}

impl Predicate {
    pub fn always() -> Self {
        Predicate { terms: Vec::new() }
    }

    pub fn when(register: usize, cond: Cond) -> Self {
        Predicate { terms: vec![(register, cond)] }
    }

    pub fn and(mut self, register: usize, cond: Cond) -> Self {
        self.terms.push((register, cond));
        self
    }

    pub fn registers(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|(r, _)| *r)
    }

    pub fn holds(&self, digits: &[usize]) -> bool {
        self.terms.iter().all(|(r, c)| match c {
            Cond::Eq(v) => digits[*r] == *v,
            Cond::Ne(v) => digits[*r] != *v,
        })
    }
}

/// A small dense operator acting on some registers of a layout, applied only
/// on the subspace where `control` holds.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGate {
    pub targets: Vec<usize>,
    pub op: Matrix,
    pub control: Predicate,
}

impl LocalGate {
    pub fn new(layout: &Layout, targets: Vec<usize>, op: Matrix, control: Predicate) -> Result<Self> {
        let tdim: usize = targets.iter().map(|&t| layout.registers()[t].dim).product();
        if !op.is_square() {
            return Err(Error::Structure("local gate must be square".into()));
        }
        check_dim(tdim, op.rows())?;
        for r in control.registers() {
            if targets.contains(&r) {
                return Err(Error::Structure(alloc::format!("control reads register {r}, which the operator acts on")));
            }
            if r >= layout.registers().len() {
                return Err(Error::Structure(alloc::format!("no register {r}")));
            }
        }
        for (k, t) in targets.iter().enumerate() {
            if *t >= layout.registers().len() || targets[..k].contains(t) {
                return Err(Error::Structure("invalid target register list".into()));
            }
        }
        Ok(LocalGate { targets, op, control })
    }

    /// Offsets (in the flat index) of every target-subspace basis element, in
    /// the op's own index order.
    fn target_offsets(&self, layout: &Layout) -> Vec<usize> {
        let mut offs = vec![0usize];
        for &t in &self.targets {
            let stride = layout.stride(t);
            let dim = layout.registers()[t].dim;
            let mut next = Vec::with_capacity(offs.len() * dim);
            for o in &offs {
                for d in 0..dim {
                    next.push(o + d * stride);
                }
            }
            offs = next;
        }
        offs
    }

    /// Flat indices with all target digits zero where the control holds.
    fn active_bases(&self, layout: &Layout) -> Vec<usize> {
        (0..layout.dim())
            .filter(|&i| {
                let d = layout.digits_of(i);
                self.targets.iter().all(|&t| d[t] == 0) && self.control.holds(&d)
            })
            .collect()
    }

    pub fn apply(&self, layout: &Layout, v: &[C64]) -> Vec<C64> {
        let offs = self.target_offsets(layout);
        let mut out = v.to_vec();
        let mut buf = vec![C64::new(0.0, 0.0); offs.len()];
        for base in self.active_bases(layout) {
            for (r, slot) in buf.iter_mut().enumerate() {
                *slot = self.op.row(r).iter().zip(&offs).map(|(a, o)| a * v[base + o]).sum();
            }
            for (o, val) in offs.iter().zip(&buf) {
                out[base + o] = *val;
            }
        }
        out
    }

    pub fn to_operator(&self, layout: &Layout) -> Operator {
        let n = layout.dim();
        let mut m = Matrix::identity(n);
        let offs = self.target_offsets(layout);
        for base in self.active_bases(layout) {
            for (r, ro) in offs.iter().enumerate() {
                for (c, co) in offs.iter().enumerate() {
                    m[(base + ro, base + co)] = self.op[(r, c)];
                }
            }
        }
        Operator { space: Space::Tensor(layout.clone()), matrix: m, certified: false }
    }
}

/// Dense operator applying `op` on `targets` exactly where `predicate` holds.
pub fn controlled(layout: &Layout, targets: &[usize], op: &Operator, predicate: Predicate) -> Result<Operator> {
    let gate = LocalGate::new(layout, targets.to_vec(), op.matrix().clone(), predicate)?;
    let mut out = gate.to_operator(layout);
    out.certified = op.certified;
    Ok(out)
}

/// Dense operator applying `op` on `targets`, identity on the rest.
pub fn embed(layout: &Layout, targets: &[usize], op: &Operator) -> Result<Operator> {
    controlled(layout, targets, op, Predicate::always())
}

/// `diag(1, -1)`.
pub fn pauli_z() -> Operator {
    Operator::from_matrix(Matrix::diag(&[ONE, -ONE])).expect("square")
}

pub fn pauli_x() -> Operator {
    Permutation::new(vec![1, 0]).expect("valid").to_operator()
}

pub fn hadamard() -> Operator {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    Operator::from_matrix(Matrix::from_real(2, 2, &[h, h, h, -h])).expect("square")
}

/// `H^{(x) m}`.
pub fn hadamard_n(m: usize) -> Operator {
    let h = hadamard();
    let hs: Vec<&Operator> = (0..m).map(|_| &h).collect();
    if hs.is_empty() {
        return Operator::identity(Space::flat(1));
    }
    tensor(&hs)
}

pub fn phase(entries: &[C64]) -> Operator {
    Operator::from_matrix(Matrix::diag(entries)).expect("square")
}

pub fn real_scalar(x: f64) -> C64 {
    c64(x, 0.0)
}
