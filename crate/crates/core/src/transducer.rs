//! Transducers: a unitary `S(O)` on `H (+) L` whose action on the public
//! space `H` is defined by the fixed point `S(xi (+) v) = tau (+) v`.
//!
//! Flat indices put `H` first and the private space `L` after it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    c64, gram_schmidt, inner, matrix::complete_basis, norm, svd, Matrix, Operator, Space, StateVector, C64, ONE, ZERO,
};
use crate::query::{self, QueryAlgorithm};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// Below this smallest singular value of `I - D` the catalyst solve switches
/// to a ridge-regularised solution.
pub const SINGULAR_CUTOFF: f64 = 1e-8;
/// Ridge parameter used on the near-singular path.
pub const RIDGE: f64 = 1e-12;
/// `implement_action` materialises the full operator up to this total dimension.
pub const MATERIALIZE_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Oracle-independent unitary.
    Raw(Operator),
    /// `S(O)` is the algorithm's action compressed to the embedded indices;
    /// every other algorithm index is an ancilla starting and ending at 0.
    Algorithm {
        alg: QueryAlgorithm,
        embed: Vec<usize>,
    },
    /// `S(O) = S_work (I_{H (+) L_open} (+) I_{L_up} (x) O)`.
    Canonical {
        work: Operator,
        l_open: usize,
        up: usize,
        oracle_dim: usize,
    },
    Parallel(Vec<Transducer>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transducer {
    kind: Kind,
    dim_h: usize,
    dim_l: usize,
}

impl Transducer {
    pub fn raw(op: Operator, dim_h: usize) -> Result<Self> {
        if dim_h > op.dim() {
            return Err(Error::DimensionMismatch { expected: op.dim(), found: dim_h });
        }
        let d = op.unitarity_defect();
        if d > query::SECTION_TOL {
            return Err(Error::NotUnitary { defect: d });
        }
        let dim_l = op.dim() - dim_h;
        Ok(Transducer { kind: Kind::Raw(op), dim_h, dim_l })
    }

    /// `embed[i]` is the algorithm index holding basis vector `i` of `H (+) L`.
    pub fn from_algorithm(alg: QueryAlgorithm, dim_h: usize, embed: Vec<usize>) -> Result<Self> {
        if dim_h > embed.len() {
            return Err(Error::DimensionMismatch { expected: embed.len(), found: dim_h });
        }
        let mut seen = vec![false; alg.dim()];
        for &e in &embed {
            if e >= alg.dim() || seen[e] {
                return Err(Error::Structure("embedding must be injective into the algorithm space".into()));
            }
            seen[e] = true;
        }
        let dim_l = embed.len() - dim_h;
        Ok(Transducer { kind: Kind::Algorithm { alg, embed }, dim_h, dim_l })
    }

    /// An algorithm viewed as a transducer with empty private space.
    pub fn from_plain_algorithm(alg: QueryAlgorithm) -> Self {
        let n = alg.dim();
        Transducer { kind: Kind::Algorithm { alg, embed: (0..n).collect() }, dim_h: n, dim_l: 0 }
    }

    pub fn canonical(work: Operator, dim_h: usize, l_open: usize, up: usize, oracle_dim: usize) -> Result<Self> {
        check_dim(work.dim(), dim_h + l_open + up * oracle_dim)?;
        let d = work.unitarity_defect();
        if d > query::SECTION_TOL {
            return Err(Error::NotUnitary { defect: d });
        }
        Ok(Transducer {
            kind: Kind::Canonical { work, l_open, up, oracle_dim },
            dim_h,
            dim_l: l_open + up * oracle_dim,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_l(&self) -> usize {
        self.dim_l
    }

    pub fn dim(&self) -> usize {
        self.dim_h + self.dim_l
    }

    /// Dimension of the oracle this transducer queries (0 if none).
    pub fn oracle_dim(&self) -> usize {
        match &self.kind {
            Kind::Raw(_) => 0,
            Kind::Algorithm { alg, .. } => alg.oracle_dim(),
            Kind::Canonical { oracle_dim, .. } => *oracle_dim,
            Kind::Parallel(ts) => ts.iter().map(Transducer::oracle_dim).sum(),
        }
    }

    pub fn algorithm(&self) -> Option<&QueryAlgorithm> {
        match &self.kind {
            Kind::Algorithm { alg, .. } => Some(alg),
            _ => None,
        }
    }

    pub fn embedding(&self) -> Option<&[usize]> {
        match &self.kind {
            Kind::Algorithm { embed, .. } => Some(embed),
            _ => None,
        }
    }

    fn check_oracle<'a>(&self, oracle: Option<&'a Operator>) -> Result<Option<&'a Operator>> {
        let m = self.oracle_dim();
        match oracle {
            Some(o) => {
                check_dim(m, o.dim())?;
                Ok(Some(o))
            }
            None if m == 0 => Ok(None),
            None => Err(Error::Parameter("transducer needs an oracle".into())),
        }
    }

    /// `S(O) v` for `v` in `H (+) L`.
    pub fn apply(&self, oracle: Option<&Operator>, v: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.dim(), v.len())?;
        let oracle = self.check_oracle(oracle)?;
        match &self.kind {
            Kind::Raw(op) => op.apply_amps(v),
            Kind::Algorithm { alg, embed } => {
                let mut full = vec![ZERO; alg.dim()];
                for (x, &e) in v.iter().zip(embed) {
                    full[e] = *x;
                }
                let o = oracle.ok_or_else(|| Error::Parameter("algorithm transducer needs an oracle".into()))?;
                let out = alg.run_amps(o, &full)?;
                let kept: Vec<C64> = embed.iter().map(|&e| out[e]).collect();
                let leak = (norm(&out).powi(2) - norm(&kept).powi(2)).max(0.0).sqrt();
                if leak > 1e-8 * norm(v).max(1.0) {
                    return Err(Error::Structure(alloc::format!(
                        "ancilla register not returned to zero (leak {leak:e})"
                    )));
                }
                Ok(kept)
            }
            Kind::Canonical { work, l_open, up, oracle_dim } => {
                let o = oracle.ok_or_else(|| Error::Parameter("canonical transducer needs an oracle".into()))?;
                let mut w = v.to_vec();
                let base = self.dim_h + l_open;
                for u in 0..*up {
                    let off = base + u * oracle_dim;
                    let block = o.apply_amps(&w[off..off + oracle_dim])?;
                    w[off..off + oracle_dim].copy_from_slice(&block);
                }
                work.apply_amps(&w)
            }
            Kind::Parallel(parts) => {
                let oracles = split_oracle(parts, oracle)?;
                let (hs, ls) = part_ranges(parts, self.dim_h);
                let mut out = vec![ZERO; v.len()];
                for (k, t) in parts.iter().enumerate() {
                    let mut local = v[hs[k].clone()].to_vec();
                    local.extend_from_slice(&v[ls[k].clone()]);
                    let res = t.apply(oracles[k].as_ref(), &local)?;
                    let h = t.dim_h;
                    out[hs[k].clone()].copy_from_slice(&res[..h]);
                    out[ls[k].clone()].copy_from_slice(&res[h..]);
                }
                Ok(out)
            }
        }
    }

    /// Dense `S(O)` on `H (+) L`.
    pub fn operator(&self, oracle: Option<&Operator>) -> Result<Operator> {
        let n = self.dim();
        if let (Kind::Raw(op), None) = (&self.kind, oracle) {
            return Ok(op.clone());
        }
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            cols.push(self.apply(oracle, &e)?);
        }
        Operator::new(
            Space::Sum(vec![Space::flat(self.dim_h), Space::flat(self.dim_l)]),
            Matrix::from_columns(n, &cols),
        )
    }

    /// `S(O) (xi (+) v)` as a block pair.
    pub fn couple(&self, oracle: Option<&Operator>, xi: &[C64], v: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        check_dim(self.dim_h, xi.len())?;
        check_dim(self.dim_l, v.len())?;
        let mut full = xi.to_vec();
        full.extend_from_slice(v);
        let out = self.apply(oracle, &full)?;
        Ok((out[..self.dim_h].to_vec(), out[self.dim_h..].to_vec()))
    }
}

fn part_ranges(parts: &[Transducer], dim_h: usize) -> (Vec<core::ops::Range<usize>>, Vec<core::ops::Range<usize>>) {
    let mut hs = Vec::new();
    let mut ls = Vec::new();
    let (mut h, mut l) = (0, dim_h);
    for t in parts {
        hs.push(h..h + t.dim_h);
        ls.push(l..l + t.dim_l);
        h += t.dim_h;
        l += t.dim_l;
    }
    (hs, ls)
}

fn split_oracle(parts: &[Transducer], oracle: Option<&Operator>) -> Result<Vec<Option<Operator>>> {
    let mut out = Vec::new();
    let mut off = 0;
    for t in parts {
        let m = t.oracle_dim();
        if m == 0 {
            out.push(None);
            continue;
        }
        let o = oracle.ok_or_else(|| Error::Parameter("parallel transducer needs an oracle".into()))?;
        let idx: Vec<usize> = (off..off + m).collect();
        out.push(Some(Operator::from_matrix(o.matrix().select(&idx, &idx))?));
        off += m;
    }
    Ok(out)
}

/// `tau`, the catalyst `v`, `W = ||v||^2` and the fixed-point residual.
#[derive(Debug, Clone, PartialEq)]
pub struct TransductionResult {
    pub tau: StateVector,
    pub catalyst: StateVector,
    pub w: f64,
    pub residual: f64,
    /// Smallest singular value of `I - D`.
    pub sigma_min: f64,
    /// Whether the ridge path was used.
    pub regularised: bool,
}

/// Solves `(I - D) v = C xi` (minimum-norm) and sets `tau = A xi + B v`,
/// where `S(O) = [[A, B], [C, D]]` over `H (+) L`.
pub fn transduce(t: &Transducer, oracle: Option<&Operator>, xi: &StateVector, tol: f64) -> Result<TransductionResult> {
    check_dim(t.dim_h, xi.dim())?;
    let s = t.operator(oracle)?;
    let (h, l) = (t.dim_h, t.dim_l);
    let hi: Vec<usize> = (0..h).collect();
    let li: Vec<usize> = (h..h + l).collect();
    let m = s.matrix();
    let a = m.select(&hi, &hi);
    let b_blk = m.select(&hi, &li);
    let c = m.select(&li, &hi);
    let d = m.select(&li, &li);
    let xi_a = xi.amps();
    if l == 0 {
        let tau = a.mul_vec(xi_a)?;
        return Ok(TransductionResult {
            tau: StateVector::from_amps(tau),
            catalyst: StateVector::from_amps(Vec::new()),
            w: 0.0,
            residual: 0.0,
            sigma_min: f64::INFINITY,
            regularised: false,
        });
    }
    let rhs = c.mul_vec(xi_a)?;
    let i_minus_d = Matrix::identity(l).sub(&d)?;
    let dec = svd(&i_minus_d);
    let sigma_min = dec.singular_values.last().copied().unwrap_or(0.0);
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let regularised = sigma_min < SINGULAR_CUTOFF;
    let mut v = vec![ZERO; l];
    for (k, &sig) in dec.singular_values.iter().enumerate() {
        let uk = dec.u.column(k);
        let coef = inner(&uk, &rhs);
        let scale = if regularised {
            sig / (sig * sig + RIDGE)
        } else if sig > f64::EPSILON * sigma_max * l as f64 {
            1.0 / sig
        } else {
            0.0
        };
        if scale == 0.0 {
            continue;
        }
        for (r, vr) in v.iter_mut().enumerate().take(l) {
            *vr += dec.v[(r, k)] * coef * scale;
        }
    }
    let tau = a.mul_vec(xi_a)?.iter().zip(b_blk.mul_vec(&v)?).map(|(x, y)| x + y).collect::<Vec<_>>();
    let dv = d.mul_vec(&v)?;
    let resid_vec: Vec<C64> = rhs.iter().zip(&dv).zip(&v).map(|((c, dv), v)| c + dv - v).collect();
    let residual = norm(&resid_vec);
    if residual > tol {
        return Err(Error::NearSingularTransduction { residual, tolerance: tol });
    }
    let w = norm(&v).powi(2);
    Ok(TransductionResult {
        tau: StateVector::from_amps(tau),
        catalyst: StateVector::from_amps(v),
        w,
        residual,
        sigma_min,
        regularised,
    })
}

/// `W`, `L` and the total query state `q` of a transduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Complexities {
    pub w: f64,
    pub l: f64,
    pub q: Vec<C64>,
    pub result: TransductionResult,
}

/// Complexities computed from the run on the initial coupling `xi (+) v`.
pub fn complexities(t: &Transducer, oracle: Option<&Operator>, xi: &StateVector, tol: f64) -> Result<Complexities> {
    if let Kind::Parallel(parts) = &t.kind {
        let oracles = split_oracle(parts, oracle)?;
        let mut off = 0;
        let (mut w, mut l, mut q) = (0.0, 0.0, Vec::new());
        let (mut tau, mut cat) = (Vec::new(), Vec::new());
        let mut residual: f64 = 0.0;
        let mut sigma_min = f64::INFINITY;
        let mut regularised = false;
        for (p, o) in parts.iter().zip(&oracles) {
            let local = StateVector::from_amps(xi.amps()[off..off + p.dim_h].to_vec());
            off += p.dim_h;
            let c = complexities(p, o.as_ref(), &local, tol)?;
            w += c.w;
            l += c.l;
            q.extend(c.q);
            tau.extend_from_slice(c.result.tau.amps());
            cat.extend_from_slice(c.result.catalyst.amps());
            residual = residual.hypot(c.result.residual);
            sigma_min = sigma_min.min(c.result.sigma_min);
            regularised |= c.result.regularised;
        }
        let result = TransductionResult {
            tau: StateVector::from_amps(tau),
            catalyst: StateVector::from_amps(cat),
            w,
            residual,
            sigma_min,
            regularised,
        };
        return Ok(Complexities { w, l, q, result });
    }
    let result = transduce(t, oracle, xi, tol)?;
    let q = coupling_query_state(t, oracle, xi.amps(), result.catalyst.amps())?;
    let l = norm(&q).powi(2);
    Ok(Complexities { w: result.w, l, q, result })
}

/// Total query state of the run on the coupling `xi (+) v`.
pub fn coupling_query_state(t: &Transducer, oracle: Option<&Operator>, xi: &[C64], v: &[C64]) -> Result<Vec<C64>> {
    check_dim(t.dim_h, xi.len())?;
    check_dim(t.dim_l, v.len())?;
    let mut coupling = xi.to_vec();
    coupling.extend_from_slice(v);
    Ok(match &t.kind {
        Kind::Raw(_) => Vec::new(),
        Kind::Algorithm { alg, embed } => {
            let mut full = vec![ZERO; alg.dim()];
            for (x, &e) in coupling.iter().zip(embed) {
                full[e] = *x;
            }
            let o = oracle.ok_or_else(|| Error::Parameter("algorithm transducer needs an oracle".into()))?;
            query::trace(alg, o, &StateVector::from_amps(full))?.total_query_state()
        }
        Kind::Canonical { l_open, .. } => coupling[t.dim_h + l_open..].to_vec(),
        Kind::Parallel(parts) => {
            let oracles = split_oracle(parts, oracle)?;
            let (mut ho, mut lo) = (0, 0);
            let mut q = Vec::new();
            for (p, o) in parts.iter().zip(&oracles) {
                q.extend(coupling_query_state(p, o.as_ref(), &xi[ho..ho + p.dim_h], &v[lo..lo + p.dim_l])?);
                ho += p.dim_h;
                lo += p.dim_l;
            }
            q
        }
    })
}

/// `||S(xi (+) v) - (tau (+) v)||`, the size of the perturbation needed to
/// make `v` a catalyst for `xi -> tau`.
pub fn coupling_defect(t: &Transducer, oracle: Option<&Operator>, xi: &[C64], v: &[C64], tau: &[C64]) -> Result<f64> {
    check_dim(t.dim_h, tau.len())?;
    let (out_h, out_l) = t.couple(oracle, xi, v)?;
    let dh = norm(&out_h.iter().zip(tau).map(|(a, b)| a - b).collect::<Vec<_>>());
    let dl = norm(&out_l.iter().zip(v).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(dh.hypot(dl))
}

/// Outcome of the K-copy implementation of a transduction action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionReport {
    /// Public-register output `tau'` after detaching the uniform superposition.
    pub output: StateVector,
    /// Exact transduction action `tau`.
    pub tau: StateVector,
    pub w: f64,
    pub k: usize,
    /// `||tau' - tau||`.
    pub action_error: f64,
    /// Norm of everything left outside `|0>_K (x) H`.
    pub garbage: f64,
    /// Distance of the full final state from `|0>_K (x) tau (+) 0`.
    pub full_state_error: f64,
    /// `2 sqrt(W / K)`.
    pub bound: f64,
    pub materialized: bool,
}

/// Implements the transduction action with `k` applications of `S`, each
/// coupling one copy of `H` (in uniform superposition over `C^k`) with the
/// shared private register, then detaching the superposition.
pub fn implement_action(
    t: &Transducer,
    oracle: Option<&Operator>,
    xi: &StateVector,
    k: usize,
    tol: f64,
) -> Result<ActionReport> {
    if k == 0 {
        return Err(Error::Parameter("K must be at least 1".into()));
    }
    let reference = transduce(t, oracle, xi, tol)?;
    if k * t.dim_h + t.dim_l <= MATERIALIZE_LIMIT {
        implement_action_dense(t, oracle, xi, k, reference)
    } else {
        implement_action_streaming(t, oracle, xi, k, reference)
    }
}

fn finish(
    tau_p: Vec<C64>,
    garbage_sq: f64,
    reference: TransductionResult,
    k: usize,
    materialized: bool,
) -> ActionReport {
    let diff: Vec<C64> = tau_p.iter().zip(reference.tau.amps()).map(|(a, b)| a - b).collect();
    let action_error = norm(&diff);
    let garbage = garbage_sq.max(0.0).sqrt();
    ActionReport {
        output: StateVector::from_amps(tau_p),
        tau: reference.tau,
        w: reference.w,
        k,
        action_error,
        garbage,
        full_state_error: action_error.hypot(garbage),
        bound: 2.0 * (reference.w / k as f64).sqrt(),
        materialized,
    }
}

fn implement_action_streaming(
    t: &Transducer,
    oracle: Option<&Operator>,
    xi: &StateVector,
    k: usize,
    reference: TransductionResult,
) -> Result<ActionReport> {
    let h = t.dim_h;
    let s = 1.0 / (k as f64).sqrt();
    let copy: Vec<C64> = xi.amps().iter().map(|a| a * s).collect();
    let mut shared = vec![ZERO; t.dim_l];
    // Detaching keeps sqrt(K) times the mean copy; what is orthogonal to the
    // uniform superposition is the spread of the copies around that mean,
    // accumulated with Welford's update to avoid cancellation.
    let mut mean = vec![ZERO; h];
    let mut spread = 0.0;
    for i in 0..k {
        let (out, l) = t.couple(oracle, &copy, &shared)?;
        shared = l;
        let n = (i + 1) as f64;
        for (m, x) in mean.iter_mut().zip(&out) {
            let before = x - *m;
            *m += before / n;
            spread += (before.conj() * (x - *m)).re;
        }
    }
    let tau_p: Vec<C64> = mean.iter().map(|a| a * (k as f64).sqrt()).collect();
    let garbage_sq = spread + norm(&shared).powi(2);
    Ok(finish(tau_p, garbage_sq, reference, k, false))
}

/// Same algorithm, with every step written out as a dense operator on
/// `(C^k (x) H) (+) L`.
fn implement_action_dense(
    t: &Transducer,
    oracle: Option<&Operator>,
    xi: &StateVector,
    k: usize,
    reference: TransductionResult,
) -> Result<ActionReport> {
    let (h, l) = (t.dim_h, t.dim_l);
    let n = k * h + l;
    let s = t.operator(oracle)?.into_matrix();
    // Attach: |0>_K -> uniform superposition (a unitary with that first column).
    let uniform = vec![c64(1.0 / (k as f64).sqrt(), 0.0); k];
    let attach_k = crate::oracles::householder_generator(&uniform)?.into_matrix();
    let lift_k = |u: &Matrix| {
        let mut big = Matrix::identity(n);
        for a in 0..k {
            for b in 0..k {
                for r in 0..h {
                    big[(a * h + r, b * h + r)] = u[(a, b)];
                }
            }
        }
        big
    };
    let attach = lift_k(&attach_k);
    let detach = lift_k(&attach_k.adjoint());
    let mut state = vec![ZERO; n];
    state[..h].copy_from_slice(xi.amps());
    state = attach.mul_vec(&state)?;
    for i in 0..k {
        let idx: Vec<usize> = (i * h..(i + 1) * h).chain(k * h..k * h + l).collect();
        let mut step = Matrix::identity(n);
        for (r, &ri) in idx.iter().enumerate() {
            for (c, &ci) in idx.iter().enumerate() {
                step[(ri, ci)] = s[(r, c)];
            }
        }
        state = step.mul_vec(&state)?;
    }
    state = detach.mul_vec(&state)?;
    let tau_p = state[..h].to_vec();
    let garbage_sq = norm(&state[h..]).powi(2);
    Ok(finish(tau_p, garbage_sq, reference, k, true))
}

/// The query operator `O~` pulled back to `H (+) L`, if the transducer's
/// query structure is visible there.
fn query_on_public_private(t: &Transducer, oracle: &Operator) -> Result<Option<Matrix>> {
    let n = t.dim();
    let mut qm = Matrix::identity(n);
    let m = oracle.matrix();
    match &t.kind {
        Kind::Raw(_) => Ok(Some(qm)),
        Kind::Canonical { l_open, up, oracle_dim, .. } => {
            let base = t.dim_h + l_open;
            for u in 0..*up {
                let off = base + u * oracle_dim;
                for r in 0..*oracle_dim {
                    for c in 0..*oracle_dim {
                        qm[(off + r, off + c)] = m[(r, c)];
                    }
                }
            }
            Ok(Some(qm))
        }
        Kind::Algorithm { alg, embed } => {
            let mut pos = vec![usize::MAX; alg.dim()];
            for (i, &e) in embed.iter().enumerate() {
                pos[e] = i;
            }
            let md = alg.oracle_dim();
            for u in 0..alg.up_dim() {
                let block: Vec<usize> = (0..md).map(|k| pos[alg.open_dim() + u * md + k]).collect();
                let inside = block.iter().filter(|&&p| p != usize::MAX).count();
                if inside == 0 {
                    continue;
                }
                if inside != md {
                    return Ok(None);
                }
                for (r, &pr) in block.iter().enumerate() {
                    for (c, &pc) in block.iter().enumerate() {
                        qm[(pr, pc)] = m[(r, c)];
                    }
                }
            }
            Ok(Some(qm))
        }
        Kind::Parallel(_) => Ok(None),
    }
}

fn probe_oracles(m: usize) -> (Operator, Operator) {
    let d1: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, 0.7 * (k as f64 + 1.0))).collect();
    let o1 = Matrix::diag(&d1);
    let shift = Matrix::from_fn(m, m, |r, c| if r == (c + 1) % m { ONE } else { ZERO });
    let d2: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, -0.3 * (k as f64 + 1.0).powi(2))).collect();
    let o2 = shift.matmul(&Matrix::diag(&d2)).expect("square");
    (Operator::from_matrix(o1).expect("square"), Operator::from_matrix(o2).expect("square"))
}

/// Whether `S(O) = S_work O~` for an oracle-independent `S_work`, probed with
/// two different oracles.
pub fn canonical_check(t: &Transducer) -> Result<bool> {
    if let Kind::Parallel(parts) = &t.kind {
        for p in parts {
            if !canonical_check(p)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let m = t.oracle_dim();
    if m == 0 {
        return Ok(true);
    }
    let (o1, o2) = probe_oracles(m);
    let (Some(q1), Some(q2)) = (query_on_public_private(t, &o1)?, query_on_public_private(t, &o2)?) else {
        return Ok(false);
    };
    let w1 = t.operator(Some(&o1))?.into_matrix().matmul(&q1.adjoint())?;
    let w2 = t.operator(Some(&o2))?.into_matrix().matmul(&q2.adjoint())?;
    Ok(w1.sub(&w2)?.max_abs() <= 1e-10)
}

/// Direct sum of transducers: `H = (+) H_i`, `L = (+) L_i`, oracle `(+) O_i`.
pub fn parallel_compose(parts: Vec<Transducer>) -> Transducer {
    let dim_h = parts.iter().map(|t| t.dim_h).sum();
    let dim_l = parts.iter().map(|t| t.dim_l).sum();
    Transducer { kind: Kind::Parallel(parts), dim_h, dim_l }
}

/// Complexity totals of a functional composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accounting {
    pub l_total: f64,
    pub w_total: f64,
}

/// Complexities of the inner transducer on a given input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerComplexity {
    pub l: f64,
    pub w: f64,
}

/// `L = ||q_direct||^2 + L_inner(q_inner)` and `W = W_outer + W_inner(q_inner)`.
pub fn functional_accounting(
    q_direct: &[C64],
    q_inner: &[C64],
    w_outer: f64,
    inner_fn: impl Fn(&[C64]) -> Result<InnerComplexity>,
) -> Result<Accounting> {
    let direct = norm(q_direct).powi(2);
    let inner_c = if norm(q_inner) == 0.0 { InnerComplexity { l: 0.0, w: 0.0 } } else { inner_fn(q_inner)? };
    Ok(Accounting { l_total: direct + inner_c.l, w_total: w_outer + inner_c.w })
}

/// Orthonormal basis of the span of the given vectors.
pub fn span_restriction(states: &[Vec<C64>]) -> Vec<Vec<C64>> {
    gram_schmidt(states, 1e-10)
}

/// A unitary on `C^dim` sending each `inputs[x]` to `outputs[x]`, given
/// matching Gram matrices. Returns the unitary and the worst mismatch
/// `max_x ||U a_x - b_x||`.
pub fn isometry_extension(inputs: &[Vec<C64>], outputs: &[Vec<C64>], dim: usize) -> Result<(Matrix, f64)> {
    check_dim(inputs.len(), outputs.len())?;
    if inputs.is_empty() {
        return Ok((Matrix::identity(dim), 0.0));
    }
    for v in inputs.iter().chain(outputs) {
        check_dim(dim, v.len())?;
    }
    let a = Matrix::from_columns(dim, inputs);
    let b = Matrix::from_columns(dim, outputs);
    let dec = svd(&a);
    let smax = dec.singular_values[0];
    let rank = dec.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1e-300)).count();
    let xs: Vec<Vec<C64>> = (0..rank).map(|k| dec.u.column(k)).collect();
    // y_k = B v_k / s_k, then snapped to the nearest isometry.
    let ys_raw: Vec<Vec<C64>> = (0..rank)
        .map(|k| {
            let vk = dec.v.column(k);
            let bv = b.mul_vec(&vk).expect("shape");
            bv.into_iter().map(|x| x / dec.singular_values[k]).collect()
        })
        .collect();
    let ys = if rank == 0 {
        Vec::new()
    } else {
        let y = Matrix::from_columns(dim, &ys_raw);
        let p = svd(&y);
        let polar = p.u.matmul(&p.v.adjoint())?;
        (0..rank).map(|k| polar.column(k)).collect::<Vec<_>>()
    };
    let xb = complete_basis(&xs, dim);
    let yb = complete_basis(&ys, dim);
    let mut u = Matrix::zeros(dim, dim);
    for (x, y) in xb.iter().zip(&yb) {
        for r in 0..dim {
            for c in 0..dim {
                u[(r, c)] += y[r] * x[c].conj();
            }
        }
    }
    let mismatch = inputs
        .iter()
        .zip(outputs)
        .map(|(a, b)| {
            let ua = u.mul_vec(a).expect("shape");
            norm(&ua.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max);
    Ok((u, mismatch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_state, random_unitary};
    use crate::oracles::simple_oracle;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_raw(rng: &mut ChaCha8Rng, h: usize, l: usize) -> Transducer {
        Transducer::raw(Operator::from_matrix(random_unitary(rng, h + l)).unwrap(), h).unwrap()
    }

    #[test]
    fn empty_private_space_is_plain_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_raw(&mut rng, 3, 0);
        let xi = random_state(&mut rng, 3);
        let r = transduce(&t, None, &xi, 1e-10).unwrap();
        let direct = t.operator(None).unwrap().apply(&xi).unwrap();
        assert!(r.tau.distance(&direct.relabel(r.tau.space().clone()).unwrap()).unwrap() < 1e-14);
        assert_eq!(r.w, 0.0);
        let rep = implement_action(&t, None, &xi, 1, 1e-10).unwrap();
        assert!(rep.full_state_error < 1e-12);
    }

    #[test]
    fn fixed_point_and_isometry_on_random_transducers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let t = random_raw(&mut rng, 2, 5);
            let x1 = StateVector::from_real(&[1.0, 0.0]);
            let x2 = StateVector::from_real(&[0.0, 1.0]);
            let r1 = transduce(&t, None, &x1, 1e-8).unwrap();
            let r2 = transduce(&t, None, &x2, 1e-8).unwrap();
            assert!(r1.residual < 1e-10);
            let (tau, v) = t.couple(None, x1.amps(), r1.catalyst.amps()).unwrap();
            assert!(norm(&tau.iter().zip(r1.tau.amps()).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-10);
            assert!(norm(&v.iter().zip(r1.catalyst.amps()).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-10);
            assert!((r1.tau.norm() - 1.0).abs() < 1e-8);
            assert!(r1.tau.inner(&r2.tau).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn dense_and_streaming_implementations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_raw(&mut rng, 2, 4);
        let xi = random_state(&mut rng, 2);
        for k in [1, 5, 20] {
            let r = transduce(&t, None, &xi, 1e-8).unwrap();
            let a = implement_action_dense(&t, None, &xi, k, r.clone()).unwrap();
            let b = implement_action_streaming(&t, None, &xi, k, r).unwrap();
            assert!(a.output.distance(&b.output).unwrap() < 1e-12);
            assert!((a.garbage - b.garbage).abs() < 1e-10);
            assert!(a.full_state_error <= a.bound + 1e-12);
        }
    }

    #[test]
    fn canonical_check_examples() {
        let id = Operator::identity(Space::flat(2));
        let one = QueryAlgorithm::from_operators(0, 1, 2, vec![id.clone(), id.clone()]).unwrap();
        assert!(canonical_check(&Transducer::from_plain_algorithm(one)).unwrap());
        let two =
            QueryAlgorithm::from_operators(0, 1, 2, vec![id.clone(), crate::linalg::operator::hadamard(), id]).unwrap();
        assert!(!canonical_check(&Transducer::from_plain_algorithm(two)).unwrap());
    }

    #[test]
    fn isometry_extension_maps_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(&mut rng, 5);
        let ins: Vec<Vec<C64>> = (0..3).map(|_| random_state(&mut rng, 5).into_amps()).collect();
        let outs: Vec<Vec<C64>> = ins.iter().map(|a| u.mul_vec(a).unwrap()).collect();
        let (w, mis) = isometry_extension(&ins, &outs, 5).unwrap();
        assert!(mis < 1e-10);
        assert!(w.unitarity_defect() < 1e-10);
    }

    #[test]
    fn functional_accounting_arithmetic() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let direct = [c64(h, 0.0), c64(h, 0.0)];
        let acc = functional_accounting(&direct, &[], 0.0, |_| unreachable!()).unwrap();
        assert!((acc.l_total - 1.0).abs() < 1e-15);
        let acc = functional_accounting(&direct, &[c64(h, 0.0)], 1.0, |q| {
            Ok(InnerComplexity { l: 4.0 * norm(q).powi(2), w: 2.0 })
        })
        .unwrap();
        assert!((acc.l_total - 3.0).abs() < 1e-12);
        assert_eq!(acc.w_total, 3.0);
    }

    #[test]
    fn span_restriction_examples() {
        let a = vec![c64(1.0, 0.0), c64(1.0, 0.0)];
        let b = vec![c64(2.0, 0.0), c64(2.0, 0.0)];
        assert_eq!(span_restriction(&[a.clone(), b]).len(), 1);
        assert_eq!(span_restriction(&[]).len(), 0);
        let c = vec![c64(1.0, 0.0), c64(-1.0, 0.0)];
        assert_eq!(span_restriction(&[a, c]).len(), 2);
    }

    #[test]
    fn parallel_of_one_is_the_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_raw(&mut rng, 2, 3);
        let p = parallel_compose(vec![t.clone()]);
        assert!(p.operator(None).unwrap().distance_max(&t.operator(None).unwrap()).unwrap() < 1e-15);
        let xi = random_state(&mut rng, 2);
        let a = transduce(&t, None, &xi, 1e-8).unwrap();
        let b = complexities(&p, None, &xi, 1e-8).unwrap();
        assert!((a.w - b.w).abs() < 1e-12);
        let _ = simple_oracle(0.1).unwrap();
    }
}
