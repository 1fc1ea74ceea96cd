//! Non-Boolean error reduction by the Bernstein-Vazirani lift: the answer
//! register holds `m` bits and a Boolean reducer is run on every inner
//! product `a . b` in superposition over `b`.
//!
//! Wires, most significant first: `B` (`2^m`), `C` (one qubit), `A` (`2^m`), `W`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::operator::hadamard_n;
use crate::linalg::{
    c64, inner, norm, Layout, LocalGate, Matrix, Operator, Permutation, Predicate, Register, C64, ONE, ZERO,
};
use crate::oracles::OracleSpec;
use crate::purifier::{build_general, general_catalyst};
use crate::qsp::ErrorReducer;
use crate::query::{Gate, QueryAlgorithm, Section};
use crate::transducer::{coupling_defect, coupling_query_state, implement_action};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest `m` accepted.
pub const MAX_BITS: usize = 3;

fn dot(a: usize, b: usize) -> usize {
    (a & b).count_ones() as usize % 2
}

/// `phi = sum_a sqrt(p_a) |a>|phi_a>` over `m`-bit answers.
#[derive(Debug, Clone, PartialEq)]
pub struct NonBooleanSpec {
    m: usize,
    probs: Vec<f64>,
    states: Vec<Vec<C64>>,
    r: usize,
}

impl NonBooleanSpec {
    /// Requires a unique `r` with `p_r > 1/2`.
    pub fn new(m: usize, probs: Vec<f64>, states: Vec<Vec<C64>>) -> Result<Self> {
        if m == 0 || m > MAX_BITS {
            return Err(Error::Parameter(alloc::format!("m = {m} outside 1..={MAX_BITS}")));
        }
        check_dim(1 << m, probs.len())?;
        check_dim(1 << m, states.len())?;
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter("answer probabilities must form a distribution".into()));
        }
        let d_w = states[0].len();
        for s in &states {
            check_dim(d_w, s.len())?;
            let n = norm(s);
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        let r = (0..probs.len())
            .find(|&a| probs[a] > 0.5)
            .ok_or_else(|| Error::Contract("no answer has probability above 1/2".into()))?;
        Ok(NonBooleanSpec { m, probs, states, r })
    }

    /// `p_r` on `r`, the rest spread evenly, all workspace states `|0>`.
    pub fn uniform_rest(m: usize, r: usize, p_r: f64, d_w: usize) -> Result<Self> {
        let n = 1usize << m;
        if r >= n || d_w == 0 {
            return Err(Error::Parameter("r or d_W out of range".into()));
        }
        let rest = (1.0 - p_r) / (n - 1) as f64;
        let probs = (0..n).map(|a| if a == r { p_r } else { rest }).collect();
        let mut e0 = vec![ZERO; d_w];
        e0[0] = ONE;
        Self::new(m, probs, vec![e0; n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d_w(&self) -> usize {
        self.states[0].len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `p_r - 1/2`.
    pub fn delta(&self) -> f64 {
        self.probs[self.r] - 0.5
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `phi` on `A (x) W`.
    pub fn phi(&self) -> Vec<C64> {
        self.probs.iter().zip(&self.states).flat_map(|(p, s)| s.iter().map(move |x| x * p.sqrt())).collect()
    }

    /// `2 phi phi* - I`.
    pub fn reflecting_oracle(&self) -> Result<Operator> {
        let phi = self.phi();
        let n = phi.len();
        let m = Matrix::from_fn(n, n, |r, c| phi[r] * phi[c].conj() * 2.0 - if r == c { ONE } else { ZERO });
        Operator::from_matrix(m)?.certify_unitary(1e-9)
    }

    /// `p'_b = sum_{a . b = 1} p_a`.
    pub fn p_prime(&self, b: usize) -> f64 {
        (0..self.probs.len()).filter(|&a| dot(a, b) == 1).map(|a| self.probs[a]).sum()
    }

    /// `phi'_b = T_b |0>_C phi` on `C (x) A (x) W`.
    pub fn phi_prime(&self, b: usize) -> Vec<C64> {
        let half = self.phi().len();
        let mut out = vec![ZERO; 2 * half];
        let d_w = self.d_w();
        for (i, x) in self.phi().into_iter().enumerate() {
            out[dot(i / d_w, b) * half + i] = x;
        }
        out
    }

    /// `(p'_b, phi'_{b,0}, phi'_{b,1})`, with `A (x) W` as the workspace.
    /// An empty branch gets `|0>` as a placeholder state.
    pub fn prime_spec(&self, b: usize) -> Result<OracleSpec> {
        let v = self.phi_prime(b);
        let half = v.len() / 2;
        let unit = |s: &[C64]| {
            let n = norm(s);
            if n < 1e-14 {
                let mut e = vec![ZERO; s.len()];
                e[0] = ONE;
                e
            } else {
                s.iter().map(|x| x / n).collect()
            }
        };
        OracleSpec::new(self.p_prime(b), unit(&v[..half]), unit(&v[half..]))
    }
}

/// Layout `B (x) C (x) A (x) W`.
pub fn bv_layout(m: usize, d_w: usize) -> Layout {
    Layout::new(vec![
        Register::counter("B", 1 << m),
        Register::bit("C"),
        Register::workspace("A", 1 << m),
        Register::workspace("W", d_w),
    ])
}

/// Total dimension of the lifted circuit: `B`, the extra qubit `C`, `A`, `W`.
pub fn bv_dimension(m: usize, d_w: usize) -> usize {
    (1 << m) * 2 * (1 << m) * d_w
}

fn t_permutation(m: usize, d_w: usize) -> Permutation {
    let layout = bv_layout(m, d_w);
    Permutation::from_fn(layout.dim(), |i| {
        let mut d = layout.digits_of(i);
        d[1] ^= dot(d[2], d[0]);
        layout.index_of(&d).expect("digits stay in range")
    })
    .expect("T is an involution")
}

/// `|b>|c>|a> -> |b>|c + a.b>|a>` on `B (x) C (x) A`.
pub fn inner_product_transform(m: usize) -> Result<Operator> {
    if m == 0 || m > MAX_BITS {
        return Err(Error::Parameter(alloc::format!("m = {m} outside 1..={MAX_BITS}")));
    }
    Ok(t_permutation(m, 1).to_operator())
}

/// `T (Z_C) (O_ref controlled on C = 0) T` on `B (x) C (x) A (x) W`.
pub fn lifted_oracle(o_ref: &Operator, m: usize) -> Result<Operator> {
    if m == 0 || m > MAX_BITS {
        return Err(Error::Parameter(alloc::format!("m = {m} outside 1..={MAX_BITS}")));
    }
    let na = 1usize << m;
    if !o_ref.dim().is_multiple_of(na) {
        return Err(Error::DimensionMismatch { expected: na, found: o_ref.dim() });
    }
    let d_w = o_ref.dim() / na;
    let half = o_ref.dim();
    let block = 2 * half;
    let inner_m = |r: usize, c: usize| -> C64 {
        match (r < half, c < half) {
            (true, true) => o_ref.matrix()[(r, c)],
            (false, false) if r == c => -ONE,
            _ => ZERO,
        }
    };
    // Index inside a B-block: c * half + a * d_w + w; T flips c by a.b.
    let flip = |b: usize, i: usize| -> usize {
        let (c, rest) = (i / half, i % half);
        (c ^ dot(rest / d_w, b)) * half + rest
    };
    let n = na * block;
    let mat = Matrix::from_fn(n, n, |r, c| {
        let (br, bc) = (r / block, c / block);
        if br != bc {
            return ZERO;
        }
        inner_m(flip(br, r % block), flip(bc, c % block))
    });
    Operator::from_matrix(mat)?.certify_unitary(1e-9)
}

/// `O'_b`, the `B = b` block of the lifted oracle.
pub fn lifted_block(o_prime: &Operator, m: usize, b: usize) -> Result<Operator> {
    let block = o_prime.dim() >> m;
    let idx: Vec<usize> = (b * block..(b + 1) * block).collect();
    Operator::from_matrix(o_prime.matrix().select(&idx, &idx))
}

/// Largest entry of the lifted oracle outside its `B`-diagonal blocks.
pub fn off_block_mass(o_prime: &Operator, m: usize) -> f64 {
    let block = o_prime.dim() >> m;
    let mat = o_prime.matrix();
    let mut worst: f64 = 0.0;
    for r in 0..mat.rows() {
        for c in 0..mat.cols() {
            if r / block != c / block {
                worst = worst.max(mat[(r, c)].norm());
            }
        }
    }
    worst
}

/// One row of the `p'_b` gap check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub b: usize,
    pub p_prime: f64,
    /// `r . b`.
    pub expected: u8,
    pub holds: bool,
}

/// `p'_b >= 1/2 + delta` when `r . b = 1`, `p'_b <= 1/2 - delta` otherwise.
pub fn gap_check(spec: &NonBooleanSpec) -> Vec<GapRow> {
    let delta = spec.delta();
    (0..1usize << spec.m)
        .map(|b| {
            let p = spec.p_prime(b);
            let expected = dot(spec.r, b) as u8;
            let holds = if expected == 1 { p >= 0.5 + delta - 1e-12 } else { p <= 0.5 - delta + 1e-12 };
            GapRow { b, p_prime: p, expected, holds }
        })
        .collect()
}

/// A Boolean error-reduction subroutine `R`: for an oracle reflecting about
/// `sqrt(1-p)|0>|phi0> + sqrt(p)|1>|phi1>` it sends that state to
/// `(-1)^r` times itself, approximately.
pub trait BooleanReducer {
    /// `R(O) xi`, with `O` acting on `answer (x) workspace` and the workspace
    /// of dimension `d_w`.
    fn apply(&self, oracle: &Operator, d_w: usize, xi: &[C64]) -> Result<Vec<C64>>;
}

impl BooleanReducer for ErrorReducer {
    fn apply(&self, oracle: &Operator, d_w: usize, xi: &[C64]) -> Result<Vec<C64>> {
        let layout = crate::purifier::answer_workspace_layout(d_w);
        crate::qsp::assemble_on(&self.phases, &layout, 0)?.run_amps(oracle, xi)
    }
}

/// The general purifier's transduction action, implemented with `k` copies
/// copies of the catalyst at depth `depth`. On the `p > 1/2` branch the
/// truncated walk only has an approximate fixed point, so `tol` has to admit
/// a catalyst residual of order `gamma^-(depth-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifierReducer {
    pub depth: usize,
    pub k: usize,
    pub tol: f64,
}

impl BooleanReducer for PurifierReducer {
    fn apply(&self, oracle: &Operator, d_w: usize, xi: &[C64]) -> Result<Vec<C64>> {
        let t = build_general(self.depth, d_w)?;
        let st = crate::linalg::StateVector::from_amps(xi.to_vec());
        Ok(implement_action(&t, Some(oracle), &st, self.k, self.tol)?.output.into_amps())
    }
}

/// Outcome of the lifted error reduction on `|0>_B |0>_C |phi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BvReport {
    pub output: Vec<C64>,
    /// Probability that `B` reads `r`.
    pub fidelity: f64,
    /// `||output - |r>|0>|phi>||`.
    pub imprecision: f64,
    /// `||R(O'_b) phi'_b - (-1)^{r.b} phi'_b||` for every `b`.
    pub block_errors: Vec<f64>,
    /// Error of `I_B (x) R` on its actual input, `sqrt(mean_b block_error^2)`.
    pub inner_rms: f64,
    pub inner_max: f64,
}

fn apply_b_hadamard(v: &[C64], m: usize) -> Vec<C64> {
    let h = hadamard_n(m);
    let rest = v.len() >> m;
    let mut out = vec![ZERO; v.len()];
    for b in 0..1usize << m {
        for b2 in 0..1usize << m {
            let hv = h.matrix()[(b, b2)];
            for i in 0..rest {
                out[b * rest + i] += hv * v[b2 * rest + i];
            }
        }
    }
    out
}

/// `H^m T (I_B (x) R)(O') T H^m` on `|0>_B |0>_C |phi>`.
pub fn bv_run(reducer: &dyn BooleanReducer, spec: &NonBooleanSpec) -> Result<BvReport> {
    let (m, d_w) = (spec.m, spec.d_w());
    let o_ref = spec.reflecting_oracle()?;
    let o_prime = lifted_oracle(&o_ref, m)?;
    let t = t_permutation(m, d_w);
    let n = bv_dimension(m, d_w);
    let block = n >> m;
    let phi = spec.phi();
    let mut start = vec![ZERO; n];
    start[..phi.len()].copy_from_slice(&phi);
    let mut cur = t.apply(&apply_b_hadamard(&start, m));
    let scale = ((1usize << m) as f64).sqrt();
    let mut block_errors = Vec::with_capacity(1 << m);
    for b in 0..1usize << m {
        let xi: Vec<C64> = cur[b * block..(b + 1) * block].iter().map(|x| x * scale).collect();
        let ob = lifted_block(&o_prime, m, b)?;
        let out = reducer.apply(&ob, (1 << m) * d_w, &xi)?;
        let sign = if dot(spec.r, b) == 1 { -1.0 } else { 1.0 };
        let want = spec.phi_prime(b);
        block_errors.push(norm(&out.iter().zip(&want).map(|(o, w)| o - w * sign).collect::<Vec<_>>()));
        for (slot, o) in cur[b * block..(b + 1) * block].iter_mut().zip(&out) {
            *slot = o / scale;
        }
    }
    let output = apply_b_hadamard(&t.inverse().apply(&cur), m);
    let mut ideal = vec![ZERO; n];
    ideal[spec.r * block..spec.r * block + phi.len()].copy_from_slice(&phi);
    let imprecision = norm(&output.iter().zip(&ideal).map(|(a, b)| a - b).collect::<Vec<_>>());
    let fidelity = output[spec.r * block..(spec.r + 1) * block].iter().map(|x| x.norm_sqr()).sum();
    let inner_rms = (block_errors.iter().map(|e| e * e).sum::<f64>() / (1usize << m) as f64).sqrt();
    let inner_max = block_errors.iter().copied().fold(0.0, f64::max);
    Ok(BvReport { output, fidelity, imprecision, block_errors, inner_rms, inner_max })
}

/// The whole lifted circuit with the QSP reducer, as a query algorithm
/// whose oracle is the lifted oracle `O'`.
pub fn bv_error_reduction(reducer: &ErrorReducer, m: usize, d_w: usize) -> Result<QueryAlgorithm> {
    let layout = bv_layout(m, d_w);
    let h = Gate::Local(LocalGate::new(&layout, vec![0], hadamard_n(m).into_matrix(), Predicate::always())?);
    let t = Gate::Perm(t_permutation(m, d_w));
    let phases = &reducer.phases;
    let k = phases.k();
    let mut sections = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut d = phases.phase_matrix(j);
        if j == k {
            d = Matrix::diag(&[ONE, -ONE]).matmul(&d)?;
        }
        let d = Gate::Local(LocalGate::new(&layout, vec![1], d, Predicate::always())?);
        let mut gates = Vec::new();
        if j == 0 {
            gates.extend([h.clone(), t.clone()]);
        }
        gates.push(d);
        if j == k {
            gates.extend([t.clone(), h.clone()]);
        }
        sections.push(Section::Circuit(gates));
    }
    QueryAlgorithm::new(0, 1, layout.dim(), Some(layout), sections)
}

/// Query complexity of the general purifier on one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockComplexity {
    pub b: usize,
    pub p_prime: f64,
    pub l: f64,
    /// Defect of the analytic catalyst coupling in the truncated walk.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbAccounting {
    pub blocks: Vec<BlockComplexity>,
    /// `2^-m sum_b L_b`.
    pub l: f64,
    /// `1 / (2 delta)` with `delta = p_r - 1/2`.
    pub bound: f64,
}

/// Per-block query complexities of the depth-`d` general purifier on
/// `(O'_b, phi'_b)`, averaged over the uniform superposition of `b`.
pub fn nb_accounting(spec: &NonBooleanSpec, d: usize) -> Result<NbAccounting> {
    let (m, d_w) = (spec.m, spec.d_w());
    let o_prime = lifted_oracle(&spec.reflecting_oracle()?, m)?;
    let t = build_general(d, (1 << m) * d_w)?;
    let mut blocks = Vec::with_capacity(1 << m);
    for b in 0..1usize << m {
        let ps = spec.prime_spec(b)?;
        let p = ps.p();
        let ob = lifted_block(&o_prime, m, b)?;
        let phi = spec.phi_prime(b);
        let v = general_catalyst(&ps, c64((1.0 - p).sqrt(), 0.0), c64(p.sqrt(), 0.0), d)?;
        let q = coupling_query_state(&t, Some(&ob), &phi, v.amps())?;
        let sign = if dot(spec.r, b) == 1 { -1.0 } else { 1.0 };
        let tau: Vec<C64> = phi.iter().map(|x| x * sign).collect();
        let defect = coupling_defect(&t, Some(&ob), &phi, v.amps(), &tau)?;
        blocks.push(BlockComplexity { b, p_prime: p, l: inner(&q, &q).re, defect });
    }
    let l = blocks.iter().map(|c| c.l).sum::<f64>() / (1usize << m) as f64;
    Ok(NbAccounting { blocks, l, bound: 1.0 / (2.0 * spec.delta()) })
}
