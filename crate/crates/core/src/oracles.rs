//! Input oracles: the single-qubit reflection `O_p`, state-generating
//! oracles on `A (x) W`, and reflecting oracles built from them.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::linalg::random::random_state;
use crate::linalg::{c64, norm, Matrix, Operator, Space, StateVector, C64, DEFAULT_TOL, ONE, ZERO};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// An answer probability `p` together with the normalised workspace states
/// attached to the two answers.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    p: f64,
    phi0: Vec<C64>,
    phi1: Vec<C64>,
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::Parameter(alloc::format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

impl OracleSpec {
    pub fn new(p: f64, phi0: Vec<C64>, phi1: Vec<C64>) -> Result<Self> {
        check_probability(p)?;
        if phi0.len() != phi1.len() || phi0.is_empty() {
            return Err(Error::DimensionMismatch { expected: phi0.len(), found: phi1.len() });
        }
        for v in [&phi0, &phi1] {
            let n = norm(v);
            if (n - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        Ok(OracleSpec { p, phi0, phi1 })
    }

    /// `d_W = 1`, `phi0 = phi1 = |0>`.
    pub fn simple(p: f64) -> Result<Self> {
        Self::new(p, vec![ONE], vec![ONE])
    }

    /// Random workspace states of dimension `d_w`.
    pub fn random(rng: &mut impl RngCore, p: f64, d_w: usize) -> Result<Self> {
        let a = random_state(rng, d_w).into_amps();
        let b = random_state(rng, d_w).into_amps();
        Self::new(p, a, b)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn delta(&self) -> f64 {
        (0.5 - self.p).abs()
    }

    /// `sqrt(p / (1 - p))`; infinite at `p = 1`.
    pub fn gamma(&self) -> f64 {
        gamma(self.p)
    }

    /// 0 for `p < 1/2`, 1 for `p > 1/2`.
    pub fn r(&self) -> Result<u8> {
        answer_bit(self.p)
    }

    pub fn d_w(&self) -> usize {
        self.phi0.len()
    }

    pub fn phi0(&self) -> &[C64] {
        &self.phi0
    }

    pub fn phi1(&self) -> &[C64] {
        &self.phi1
    }

    /// `|0>|phi0>` and `|1>|phi1>` as vectors in `A (x) W`.
    pub fn branch(&self, a: usize) -> Vec<C64> {
        let d = self.d_w();
        let mut v = vec![ZERO; 2 * d];
        let src = if a == 0 { &self.phi0 } else { &self.phi1 };
        v[a * d..(a + 1) * d].copy_from_slice(src);
        v
    }

    /// `alpha |0>|phi0> + beta |1>|phi1>`.
    pub fn span_vector(&self, alpha: C64, beta: C64) -> Vec<C64> {
        self.branch(0).iter().zip(self.branch(1)).map(|(a, b)| alpha * a + beta * b).collect()
    }

    /// `sqrt(1-p)|0>|phi0> + sqrt(p)|1>|phi1>`.
    pub fn target(&self) -> Vec<C64> {
        self.span_vector(c64((1.0 - self.p).sqrt(), 0.0), c64(self.p.sqrt(), 0.0))
    }

    /// `sqrt(p)|0>|phi0> - sqrt(1-p)|1>|phi1>`.
    pub fn reflected(&self) -> Vec<C64> {
        self.span_vector(c64(self.p.sqrt(), 0.0), c64(-(1.0 - self.p).sqrt(), 0.0))
    }
}

pub fn gamma(p: f64) -> f64 {
    (p / (1.0 - p)).sqrt()
}

pub(crate) fn answer_bit(p: f64) -> Result<u8> {
    check_probability(p)?;
    if p < 0.5 {
        Ok(0)
    } else if p > 0.5 {
        Ok(1)
    } else {
        Err(Error::Parameter("p = 1/2 has no majority answer".into()))
    }
}

/// `2 phi_p phi_p* - I` with `phi_p = sqrt(1-p)|0> + sqrt(p)|1>`.
pub fn simple_oracle(p: f64) -> Result<Operator> {
    check_probability(p)?;
    let a = (1.0 - p).sqrt();
    let b = p.sqrt();
    let m = Matrix::from_real(2, 2, &[2.0 * a * a - 1.0, 2.0 * a * b, 2.0 * a * b, 2.0 * b * b - 1.0]);
    Operator::from_matrix(m)?.certify_unitary(DEFAULT_TOL)
}

/// A unitary on `A (x) W` whose first column is the target state.
///
/// Columns past the first come from the Householder reflection sending
/// `|0>|0>` to the target with its first amplitude rotated real, times the
/// global phase that restores that amplitude.
pub fn state_generating_oracle(spec: &OracleSpec) -> Result<Operator> {
    householder_generator(&spec.target())
}

/// Unitary `U` with `U e_0 = phi` for a unit vector `phi`.
pub fn householder_generator(phi: &[C64]) -> Result<Operator> {
    let n = norm(phi);
    if (n - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized { norm: n });
    }
    let dim = phi.len();
    let phase = if phi[0].norm() > 0.0 { phi[0] / phi[0].norm() } else { ONE };
    let rotated: Vec<C64> = phi.iter().map(|a| a * phase.conj()).collect();
    let mut w = rotated.iter().map(|a| -a).collect::<Vec<_>>();
    w[0] += ONE;
    let ww = norm(&w).powi(2);
    let m = if ww < 1e-300 {
        Matrix::identity(dim)
    } else {
        Matrix::from_fn(dim, dim, |r, c| {
            let id = if r == c { ONE } else { ZERO };
            id - w[r] * w[c].conj() * (2.0 / ww)
        })
    };
    Operator::from_matrix(m.scale(phase))?.certify_unitary(1e-9)
}

/// `O Ref_{|0>|0>} O*`.
pub fn reflecting_from_generator(o: &Operator) -> Result<Operator> {
    let n = o.dim();
    let mut diag = vec![-ONE; n];
    diag[0] = ONE;
    let refl = Operator::from_matrix(Matrix::diag(&diag))?;
    let out = Operator::product(&[o, &refl, &o.adjoint()])?;
    out.relabel(o.space().clone())
}

/// Reflecting oracle constrained only on `span{|0>|phi0>, |1>|phi1>}`.
///
/// On that span it fixes the target and negates its orthogonal partner; on
/// the orthogonal complement it acts as `complement` (compressed to the
/// complement). Without a `complement`, acts as `-I` there, which is what
/// `reflecting_from_generator` gives.
pub fn general_reflecting_oracle(spec: &OracleSpec, complement: Option<&Operator>) -> Result<Operator> {
    let dim = 2 * spec.d_w();
    let t = spec.target();
    let f = spec.reflected();
    let outer = |u: &[C64], v: &[C64]| Matrix::from_fn(dim, dim, |r, c| u[r] * v[c].conj());
    let tt = outer(&t, &t);
    let ff = outer(&f, &f);
    let proj = tt.add(&ff)?;
    let rest = Matrix::identity(dim).sub(&proj)?;
    let on_span = tt.sub(&ff)?;
    let off = match complement {
        None => rest.scale(-ONE),
        Some(c) => {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
            }
            rest.matmul(c.matrix())?.matmul(&rest)?
        }
    };
    let o = Operator::new(Space::flat(dim), on_span.add(&off)?)?;
    let defect = o.unitarity_defect();
    if defect > 1e-9 {
        return Err(Error::Structure(alloc::format!(
            "complement action is not unitary on the orthogonal complement (defect {defect:e})"
        )));
    }
    o.certify_unitary(1e-9)
}

/// Random unitary on the orthogonal complement of the answer span, padded
/// with the identity on the span so it can be passed as a complement action.
pub fn random_complement_action(rng: &mut impl RngCore, spec: &OracleSpec) -> Result<Operator> {
    let dim = 2 * spec.d_w();
    let span = [spec.branch(0), spec.branch(1)];
    let basis = crate::linalg::matrix::complete_basis(&span, dim);
    let comp: Vec<Vec<C64>> = basis[2..].to_vec();
    let k = comp.len();
    let u = crate::linalg::random::random_unitary(rng, k.max(1));
    let mut m = Matrix::zeros(dim, dim);
    for s in &span {
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] += s[r] * s[c].conj();
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            let uij = u[(i, j)];
            for r in 0..dim {
                for c in 0..dim {
                    m[(r, c)] += uij * comp[i][r] * comp[j][c].conj();
                }
            }
        }
    }
    Operator::from_matrix(m)?.certify_unitary(1e-9)
}

/// `O (+) O*`.
pub fn bidirectional(o: &Operator) -> Operator {
    crate::linalg::direct_sum(&[o, &o.adjoint()])
}

/// `(||O t - t||, ||O f + f||)` for the fixed target `t` and the reflected
/// partner `f`.
pub fn reflection_defects(o: &Operator, spec: &OracleSpec) -> Result<(f64, f64)> {
    let t = spec.target();
    let f = spec.reflected();
    let ot = o.apply_amps(&t)?;
    let of = o.apply_amps(&f)?;
    let a = norm(&ot.iter().zip(&t).map(|(x, y)| x - y).collect::<Vec<_>>());
    let b = norm(&of.iter().zip(&f).map(|(x, y)| x + y).collect::<Vec<_>>());
    Ok((a, b))
}

/// State vector in `A (x) W` for `spec.target()`.
pub fn target_state(spec: &OracleSpec) -> StateVector {
    StateVector::from_amps(spec.target())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simple_oracle_examples() {
        assert_eq!(simple_oracle(0.0).unwrap().matrix(), &Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert_eq!(simple_oracle(1.0).unwrap().matrix(), &Matrix::from_real(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        let o = simple_oracle(0.25).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        let e = Matrix::from_real(2, 2, &[0.5, s3, s3, -0.5]);
        assert!(o.matrix().sub(&e).unwrap().max_abs() < 1e-15);
        assert!(simple_oracle(1.5).is_err());
        assert!(simple_oracle(-0.1).is_err());
    }

    #[test]
    fn generator_first_column() {
        let spec = OracleSpec::new(0.36, vec![ONE, ZERO], vec![ZERO, ONE]).unwrap();
        let o = state_generating_oracle(&spec).unwrap();
        let col = o.matrix().column(0);
        let expect = [0.8, 0.0, 0.0, 0.6];
        for (a, b) in col.iter().zip(expect) {
            assert!((a - c64(b, 0.0)).norm() < 1e-12);
        }
        let trivial = state_generating_oracle(&OracleSpec::simple(0.0).unwrap()).unwrap();
        assert!(trivial.matrix().sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn generator_with_complex_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let spec = OracleSpec::random(&mut rng, 0.3, 3).unwrap();
            let o = state_generating_oracle(&spec).unwrap();
            let col = o.matrix().column(0);
            for (a, b) in col.iter().zip(spec.target()) {
                assert!((a - b).norm() < 1e-12);
            }
            let p1 = inner(&spec.branch(1), &col);
            assert!((p1.norm() - 0.3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn reflecting_oracle_properties() {
        let id = Operator::identity(Space::flat(4));
        let r = reflecting_from_generator(&id).unwrap();
        let mut d = vec![-ONE; 4];
        d[0] = ONE;
        assert_eq!(r.matrix(), &Matrix::diag(&d));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = OracleSpec::random(&mut rng, 0.25, 2).unwrap();
        let o = state_generating_oracle(&spec).unwrap();
        let r = reflecting_from_generator(&o).unwrap();
        assert!(r.compose(&r).unwrap().matrix().sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-12);
        let (a, b) = reflection_defects(&r, &spec).unwrap();
        assert!(a < 1e-12 && b < 1e-12);
        let g = general_reflecting_oracle(&spec, None).unwrap();
        assert!(g.matrix().sub(r.matrix()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn general_oracle_with_arbitrary_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [0.1, 0.3, 0.7] {
            let spec = OracleSpec::random(&mut rng, p, 2).unwrap();
            let c = random_complement_action(&mut rng, &spec).unwrap();
            let g = general_reflecting_oracle(&spec, Some(&c)).unwrap();
            let (a, b) = reflection_defects(&g, &spec).unwrap();
            assert!(a < 1e-12 && b < 1e-12);
            let minus = Operator::identity(Space::flat(4)).scale(-ONE);
            let g2 = general_reflecting_oracle(&spec, Some(&minus)).unwrap();
            let (a, b) = reflection_defects(&g2, &spec).unwrap();
            assert!(a < 1e-12 && b < 1e-12);
        }
    }

    #[test]
    fn general_oracle_without_workspace_is_simple() {
        let spec = OracleSpec::simple(0.2).unwrap();
        let g = general_reflecting_oracle(&spec, None).unwrap();
        assert!(g.matrix().sub(simple_oracle(0.2).unwrap().matrix()).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rejects_complement_leaking_into_span() {
        let spec = OracleSpec::new(0.2, vec![ONE, ZERO], vec![ONE, ZERO]).unwrap();
        // Swaps |0>|1> (complement) with |1>|0> (span).
        let swap = crate::linalg::Permutation::new(vec![0, 2, 1, 3]).unwrap().to_operator();
        assert!(general_reflecting_oracle(&spec, Some(&swap)).is_err());
    }
}
