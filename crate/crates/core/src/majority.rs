//! Quantum majority voting over `l` fresh copies of a state-generating oracle.
//!
//! Wires, most significant first: `out`, the sum register `R`, the pairs
//! `(A_i, W_i)`, then the oracle slot `dir (x) A (x) W`. The slot is where
//! each query lands; `dir = 1` selects `O*` in the bidirectional oracle.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{norm, Layout, Permutation, Register, StateVector, C64, ONE, ZERO};
use crate::oracles::{answer_bit, bidirectional, state_generating_oracle, OracleSpec};
use crate::query::{self, Gate, QueryAlgorithm, Section};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest algorithm dimension `build` accepts.
pub const DIM_CAP: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq)]
pub struct Majority {
    alg: QueryAlgorithm,
    wires: Layout,
    ell: usize,
    d_w: usize,
}

/// Bits needed to hold `0..=ell`.
fn sum_bits(ell: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < ell + 1 {
        b += 1;
    }
    b
}

fn log2_ceil(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

/// Logical qubits of the `ell`-copy circuit, without building it.
pub fn qubit_count(ell: usize, d_w: usize) -> usize {
    ell * (1 + log2_ceil(d_w)) + sum_bits(ell) + 1
}

fn perm_on(layout: &Layout, f: impl Fn(&mut Vec<usize>)) -> Permutation {
    Permutation::from_fn(layout.dim(), |i| {
        let mut d = layout.digits_of(i);
        f(&mut d);
        layout.index_of(&d).expect("digits stay in range")
    })
    .expect("digit map is a bijection")
}

impl Majority {
    /// Majority vote over `ell` oracle copies with workspace dimension `d_w`.
    pub fn build(ell: usize, d_w: usize) -> Result<Self> {
        if ell == 0 || d_w == 0 {
            return Err(Error::Parameter("need at least one copy and a non-empty workspace".into()));
        }
        let r_dim = 1usize << sum_bits(ell);
        let mut regs = vec![Register::bit("out"), Register::counter("R", r_dim)];
        for i in 0..ell {
            regs.push(Register::bit(&alloc::format!("A{i}")));
            regs.push(Register::workspace(&alloc::format!("W{i}"), d_w));
        }
        let dim = (2 * r_dim).saturating_mul((2 * d_w).saturating_pow(ell as u32)).saturating_mul(4 * d_w);
        if dim > DIM_CAP {
            return Err(Error::Parameter(alloc::format!("majority circuit dimension {dim} exceeds cap {DIM_CAP}")));
        }
        regs.extend([Register::bit("dir"), Register::bit("A"), Register::workspace("W", d_w)]);
        let wires = Layout::new(regs);
        let (out, r) = (0, 1);
        let a_of = |i: usize| 2 + 2 * i;
        let (dir, slot_a, slot_w) = (2 + 2 * ell, 3 + 2 * ell, 4 + 2 * ell);
        let swap = |i: usize| {
            perm_on(&wires, move |d| {
                d.swap(a_of(i), slot_a);
                d.swap(a_of(i) + 1, slot_w);
            })
        };
        let threshold = ell.div_ceil(2);
        let add = |sign: isize| {
            perm_on(&wires, move |d| {
                let s: usize = (0..ell).map(|i| d[a_of(i)]).sum();
                d[r] = (d[r] as isize + sign * s as isize).rem_euclid(r_dim as isize) as usize;
            })
        };
        let flip_out = perm_on(&wires, |d| {
            if d[r] >= threshold {
                d[out] ^= 1;
            }
        });
        let flip_dir = perm_on(&wires, |d| d[dir] ^= 1);

        let mut sections: Vec<Vec<Gate>> = vec![vec![Gate::Perm(swap(0))]];
        for i in 1..ell {
            sections.push(vec![Gate::Perm(swap(i - 1)), Gate::Perm(swap(i))]);
        }
        sections.push(vec![
            Gate::Perm(swap(ell - 1)),
            Gate::Perm(add(1)),
            Gate::Perm(flip_out),
            Gate::Perm(add(-1)),
            Gate::Perm(flip_dir.clone()),
            Gate::Perm(swap(ell - 1)),
        ]);
        for i in (0..ell - 1).rev() {
            sections.push(vec![Gate::Perm(swap(i + 1)), Gate::Perm(swap(i))]);
        }
        sections.push(vec![Gate::Perm(swap(0)), Gate::Perm(flip_dir)]);
        let m = 4 * d_w;
        let up = wires.dim() / m;
        let alg =
            QueryAlgorithm::new(0, up, m, Some(wires.clone()), sections.into_iter().map(Section::Circuit).collect())?;
        Ok(Majority { alg, wires, ell, d_w })
    }

    pub fn algorithm(&self) -> &QueryAlgorithm {
        &self.alg
    }

    pub fn wires(&self) -> &Layout {
        &self.wires
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Logical qubits: the `l` copies of `A (x) W`, the sum register and the
    /// output bit. The oracle slot is bookkeeping of the query model.
    pub fn qubits(&self) -> usize {
        qubit_count(self.ell, self.d_w)
    }

    /// Runs the circuit from the all-zero state with the bidirectional
    /// oracle of `spec`; returns the final state.
    pub fn run(&self, spec: &OracleSpec) -> Result<StateVector> {
        crate::error::check_dim(self.d_w, spec.d_w())?;
        let o = bidirectional(&state_generating_oracle(spec)?);
        let mut start = vec![ZERO; self.alg.dim()];
        start[0] = ONE;
        Ok(StateVector::from_amps(self.alg.run_amps(&o, &start)?))
    }

    /// `||final - |r>_out |0...>||`.
    pub fn simulated_imprecision(&self, spec: &OracleSpec) -> Result<f64> {
        let r = answer_bit(spec.p())? as usize;
        let mut out = self.run(spec)?.into_amps();
        out[r * self.wires.stride(0)] -= ONE;
        Ok(norm(&out))
    }

    /// Query states of the run, for Las Vegas accounting.
    pub fn query_cost(&self, spec: &OracleSpec) -> Result<f64> {
        let o = bidirectional(&state_generating_oracle(spec)?);
        let mut start = vec![ZERO; self.alg.dim()];
        start[0] = ONE;
        Ok(query::trace(&self.alg, &o, &StateVector::from_amps(start))?.las_vegas())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Probability of the wrong majority: `Pr[|b| >= ceil(l/2)]` for `p < 1/2`,
/// `Pr[|b| < ceil(l/2)]` for `p > 1/2`, with `|b| ~ Bin(l, p)`.
pub fn wrong_majority_probability(ell: usize, p: f64) -> Result<f64> {
    let r = answer_bit(p)?;
    let t = ell.div_ceil(2);
    let pmf = |k: usize| binomial(ell, k) * p.powi(k as i32) * (1.0 - p).powi((ell - k) as i32);
    Ok(if r == 0 { (t..=ell).map(pmf).sum() } else { (0..t).map(pmf).sum() })
}

/// `sqrt(2) * sqrt(tail)`.
pub fn imprecision_exact(ell: usize, p: f64) -> Result<f64> {
    Ok(core::f64::consts::SQRT_2 * wrong_majority_probability(ell, p)?.sqrt())
}

/// `sqrt(2) * exp(-l delta^2)`, from `tail <= exp(-2 l delta^2)`.
pub fn hoeffding_bound(ell: usize, delta: f64) -> f64 {
    core::f64::consts::SQRT_2 * libm::exp(-(ell as f64) * delta * delta)
}

/// Smallest odd `l` with `hoeffding_bound(l, delta) <= eps`.
pub fn copies_for(delta: f64, eps: f64) -> Result<usize> {
    let valid = delta > 0.0 && delta <= 0.5 && eps > 0.0;
    if !valid {
        return Err(Error::Parameter("need 0 < delta <= 1/2 and eps > 0".into()));
    }
    let l = (libm::log(core::f64::consts::SQRT_2 / eps) / (delta * delta)).ceil().max(1.0) as usize;
    Ok(if l.is_multiple_of(2) { l + 1 } else { l })
}

/// Amplitudes of the final state, for inspection.
pub fn output_amplitude(state: &StateVector, wires: &Layout, out: usize) -> C64 {
    state.amps()[out * wires.stride(0)]
}
