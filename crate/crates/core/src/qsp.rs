//! Quantum signal processing: sign polynomials, their completion to a QSP
//! pair `(P, Q)`, phase factors by layer stripping, and the assembled
//! error-reduction algorithm.
//!
//! `P` is stored in the Chebyshev `T` basis and `Q` in the `U` basis
//! (`q[i]` multiplies `U_i`), which keeps degrees up to 60 well conditioned.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c64, Layout, LocalGate, Matrix, Operator, Predicate, C64, ONE, ZERO};
use crate::query::{Gate, QueryAlgorithm, Section};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest polynomial degree the pipeline accepts.
pub const DEGREE_CAP: usize = 60;
/// Grid size for the sign-polynomial conditions.
pub const SIGN_GRID: usize = 2001;
/// Grid size for the completion condition.
pub const CONDITION_GRID: usize = 201;
/// Grid size for the reassembly check.
pub const REASSEMBLY_GRID: usize = 101;
/// Acceptance threshold for completion and reassembly residuals.
pub const RESIDUAL_TOL: f64 = 1e-8;

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
}

/// `sum c_j T_j(x)`.
pub fn eval_t<T>(c: &[T], x: f64) -> T
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default,
{
    let (mut t0, mut t1) = (1.0, x);
    let mut acc = T::default();
    for (j, &cj) in c.iter().enumerate() {
        let tj = match j {
            0 => 1.0,
            1 => x,
            _ => {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
                t2
            }
        };
        acc = acc + cj * tj;
    }
    acc
}

/// `sum c_i U_i(x)`.
pub fn eval_u<T>(c: &[T], x: f64) -> T
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default,
{
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    let mut acc = T::default();
    for (i, &ci) in c.iter().enumerate() {
        let ui = match i {
            0 => 1.0,
            1 => 2.0 * x,
            _ => {
                let u2 = 2.0 * x * u1 - u0;
                u0 = u1;
                u1 = u2;
                u2
            }
        };
        acc = acc + ci * ui;
    }
    acc
}

fn add_at(v: &mut Vec<C64>, i: usize, c: C64) {
    if v.len() <= i {
        v.resize(i + 1, ZERO);
    }
    v[i] += c;
}

/// `x * sum c_j T_j` in the `T` basis.
fn x_times_t(c: &[C64]) -> Vec<C64> {
    let mut out = Vec::new();
    for (j, &cj) in c.iter().enumerate() {
        if j == 0 {
            add_at(&mut out, 1, cj);
        } else {
            add_at(&mut out, j + 1, cj * 0.5);
            add_at(&mut out, j - 1, cj * 0.5);
        }
    }
    out
}

/// `(1 - x^2) * sum c_i U_i` in the `T` basis.
fn one_minus_x2_times_u(c: &[C64]) -> Vec<C64> {
    let mut out = Vec::new();
    for (i, &ci) in c.iter().enumerate() {
        add_at(&mut out, i, ci * 0.5);
        add_at(&mut out, i + 2, ci * -0.5);
    }
    out
}

/// `x * sum c_i U_i` in the `U` basis.
fn x_times_u(c: &[C64]) -> Vec<C64> {
    let mut out = Vec::new();
    for (i, &ci) in c.iter().enumerate() {
        add_at(&mut out, i + 1, ci * 0.5);
        if i > 0 {
            add_at(&mut out, i - 1, ci * 0.5);
        }
    }
    out
}

/// `sum c_j T_j` rewritten in the `U` basis.
fn t_to_u(c: &[C64]) -> Vec<C64> {
    let mut out = Vec::new();
    for (j, &cj) in c.iter().enumerate() {
        match j {
            0 => add_at(&mut out, 0, cj),
            1 => add_at(&mut out, 1, cj * 0.5),
            _ => {
                add_at(&mut out, j, cj * 0.5);
                add_at(&mut out, j - 2, cj * -0.5);
            }
        }
    }
    out
}

fn combine(a: &[C64], sa: C64, b: &[C64], sb: C64) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(ZERO) * sa + b.get(i).copied().unwrap_or(ZERO) * sb).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Real polynomial in the Chebyshev `T` basis with a declared parity.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    cheb: Vec<f64>,
    parity: Parity,
}

impl RealPolynomial {
    /// Coefficients of the wrong parity must vanish.
    pub fn new(cheb: Vec<f64>, parity: Parity) -> Result<Self> {
        let scale = cheb.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        for (j, c) in cheb.iter().enumerate() {
            if Parity::of(j) != parity && c.abs() > 1e-14 * scale {
                return Err(Error::Parameter(alloc::format!("coefficient of T_{j} breaks the declared parity")));
            }
        }
        let mut cheb: Vec<f64> =
            cheb.iter().enumerate().map(|(j, &c)| if Parity::of(j) == parity { c } else { 0.0 }).collect();
        while cheb.len() > 1 && cheb.last() == Some(&0.0) {
            cheb.pop();
        }
        Ok(RealPolynomial { cheb, parity })
    }

    pub fn chebyshev(&self) -> &[f64] {
        &self.cheb
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> usize {
        self.cheb.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_t(&self.cheb, x)
    }

    /// `max |R|` on an `n`-point grid.
    pub fn sup_on_grid(&self, n: usize) -> f64 {
        grid(n).map(|x| self.eval(x).abs()).fold(0.0, f64::max)
    }
}

/// Checks the three sign-polynomial conditions on the standard grid.
pub fn sign_conditions_hold(r: &RealPolynomial, delta_p: f64, eps_p: f64) -> bool {
    grid(SIGN_GRID).all(|x| {
        let v = r.eval(x);
        v.abs() <= 1.0 && (x < delta_p || v >= 1.0 - eps_p) && (x > -delta_p || v <= -1.0 + eps_p)
    })
}

fn erfc_inv(y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 30.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erfc(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Odd polynomial close to `sign(x)` outside `(-delta', delta')`.
///
/// Tries `R(x) = x` first, then a truncated Chebyshev expansion of
/// `erf(kappa x)`, rescaled by `1 - eps'/2`.
pub fn sign_polynomial(delta_p: f64, eps_p: f64) -> Result<RealPolynomial> {
    if !(delta_p > 0.0 && delta_p < 1.0 && eps_p > 0.0 && eps_p < 1.0) {
        return Err(Error::Parameter("need 0 < delta', eps' < 1".into()));
    }
    let linear = RealPolynomial::new(vec![0.0, 1.0], Parity::Odd)?;
    if sign_conditions_hold(&linear, delta_p, eps_p) {
        return Ok(linear);
    }
    let kappa = erfc_inv(eps_p / 4.0) / delta_p;
    let nodes = 1024;
    let max_j = 4 * DEGREE_CAP;
    let mut a = vec![0.0; max_j + 1];
    for (j, aj) in a.iter_mut().enumerate().skip(1).step_by(2) {
        let mut s = 0.0;
        for n in 0..nodes {
            let th = PI * (n as f64 + 0.5) / nodes as f64;
            s += libm::erf(kappa * libm::cos(th)) * libm::cos(j as f64 * th);
        }
        *aj = 2.0 * s / nodes as f64;
    }
    // Smallest odd degree whose dropped tail is at most eps'/8.
    let mut degree = None;
    for d in (1..=max_j).step_by(2) {
        let tail: f64 = a[d + 1..].iter().map(|c| c.abs()).sum();
        if tail <= eps_p / 8.0 {
            degree = Some(d);
            break;
        }
    }
    let d = degree.unwrap_or(max_j + 1);
    if d > DEGREE_CAP {
        return Err(Error::DegreeCap { required: d, cap: DEGREE_CAP });
    }
    let scale = 1.0 - eps_p / 2.0;
    let r = RealPolynomial::new(a[..=d].iter().map(|c| c * scale).collect(), Parity::Odd)?;
    if !sign_conditions_hold(&r, delta_p, eps_p) {
        return Err(Error::Parameter(alloc::format!(
            "degree-{d} sign polynomial fails the grid check for delta'={delta_p}, eps'={eps_p}"
        )));
    }
    Ok(r)
}

/// `P` (in `T`) and `Q` (in `U`) of a `k`-query QSP sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPair {
    p: Vec<C64>,
    q: Vec<C64>,
    k: usize,
}

impl PolynomialPair {
    pub fn new(mut p: Vec<C64>, mut q: Vec<C64>, k: usize) -> Result<Self> {
        let scale = p.iter().chain(&q).fold(0.0f64, |m, c| m.max(c.norm())).max(1.0);
        let tiny = 1e-12 * scale;
        if p.iter().skip(k + 1).any(|c| c.norm() > tiny)
            || q.iter().skip(k.max(1) - 1 + usize::from(k > 0)).any(|c| c.norm() > tiny)
        {
            return Err(Error::Parameter(alloc::format!("degrees exceed deg P <= {k}, deg Q <= {k}-1")));
        }
        for (j, c) in p.iter().enumerate() {
            if Parity::of(j) != Parity::of(k) && c.norm() > tiny {
                return Err(Error::Parameter("P breaks the parity constraint".into()));
            }
        }
        for (i, c) in q.iter().enumerate() {
            if Parity::of(i) == Parity::of(k) && c.norm() > tiny {
                return Err(Error::Parameter("Q breaks the parity constraint".into()));
            }
        }
        p.resize(k + 1, ZERO);
        q.resize(k, ZERO);
        Ok(PolynomialPair { p, q, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p_coefficients(&self) -> &[C64] {
        &self.p
    }

    pub fn q_coefficients(&self) -> &[C64] {
        &self.q
    }

    pub fn p(&self, x: f64) -> C64 {
        eval_t(&self.p, x)
    }

    pub fn q(&self, x: f64) -> C64 {
        eval_u(&self.q, x)
    }

    /// `max | |P|^2 + (1-x^2)|Q|^2 - 1 |` on an `n`-point grid.
    pub fn condition_residual(&self, n: usize) -> f64 {
        grid(n).map(|x| (self.p(x).norm_sqr() + (1.0 - x * x) * self.q(x).norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Unimodular phases `alpha_0 .. alpha_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence {
    alpha: Vec<C64>,
}

impl PhaseSequence {
    pub fn new(alpha: Vec<C64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Parameter("a phase sequence needs alpha_0".into()));
        }
        if let Some(a) = alpha.iter().find(|a| (a.norm() - 1.0).abs() > 1e-10) {
            return Err(Error::Parameter(alloc::format!("phase {a} is not unimodular")));
        }
        Ok(PhaseSequence { alpha })
    }

    pub fn alphas(&self) -> &[C64] {
        &self.alpha
    }

    /// Number of signal applications.
    pub fn k(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `diag(alpha_j, -conj(alpha_j))`.
    pub fn phase_matrix(&self, j: usize) -> Matrix {
        let a = self.alpha[j];
        Matrix::diag(&[a, -a.conj()])
    }

    /// The pair `(P, Q)` this sequence realises.
    pub fn polynomials(&self) -> PolynomialPair {
        let mut p = vec![self.alpha[0]];
        let mut q: Vec<C64> = Vec::new();
        for &a in &self.alpha[1..] {
            let np = combine(&x_times_t(&p), a, &one_minus_x2_times_u(&q), a);
            let nq = combine(&x_times_u(&q), a.conj(), &t_to_u(&p), -a.conj());
            p = np;
            q = nq;
        }
        PolynomialPair::new(p, q, self.k()).expect("forward recursion keeps degrees and parity")
    }
}

/// `[[x, y], [y, -x]]`.
pub fn signal_unitary(x: f64, y: f64) -> Result<Operator> {
    if (x * x + y * y - 1.0).abs() > 1e-10 {
        return Err(Error::Parameter(alloc::format!("x^2 + y^2 = {} is not 1", x * x + y * y)));
    }
    Operator::from_matrix(Matrix::from_real(2, 2, &[x, y, y, -x]))
}

/// `D_k W D_{k-1} ... W D_0` for a single-qubit signal `W`.
pub fn qsp_assemble(alpha: &PhaseSequence, w: &Operator) -> Result<Operator> {
    crate::error::check_dim(2, w.dim())?;
    let mut acc = alpha.phase_matrix(0);
    for j in 1..alpha.alpha.len() {
        acc = alpha.phase_matrix(j).matmul(&w.matrix().matmul(&acc)?)?;
    }
    Operator::from_matrix(acc)
}

/// Largest entrywise gap between `U_alpha(W(x, y))` and the matrix built
/// from `(P, Q)`, over an `n`-point grid of `x` with `y = sqrt(1 - x^2)`.
pub fn reassembly_residual(alpha: &PhaseSequence, pq: &PolynomialPair, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in grid(n) {
        let y = (1.0 - x * x).max(0.0).sqrt();
        let u = qsp_assemble(alpha, &signal_unitary(x, y)?)?;
        let (p, q) = (pq.p(x), pq.q(x));
        let want = [p, q.conj() * y, q * y, -p.conj()];
        let m = u.matrix();
        for (k, w) in want.iter().enumerate() {
            worst = worst.max((m[(k / 2, k % 2)] - w).norm());
        }
    }
    Ok(worst)
}

fn horner(c: &[C64], x: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &ci in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

/// Roots of `sum c_i x^i` (leading coefficient non-zero) by Aberth
/// iteration followed by Newton polishing.
pub fn polynomial_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n].norm();
    let radius = c[..n].iter().map(|ci| (ci.norm() / lead).powf(1.0 / n as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<C64> = (0..n).map(|j| C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + 0.4)).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let shrinking = step.norm() < 1e-3 * zi.norm().max(1.0);
            if !shrinking {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Tolerance for treating a root as lying on the unit circle.
const CIRCLE_TOL: f64 = 1e-6;

/// Complementary pair with `Re P = R`, via a Fejer-Riesz factorisation of
/// `1 - R^2` in the variable `w = z^2`, `x = (z + 1/z)/2`.
pub fn complete(r: &RealPolynomial, k: usize) -> Result<PolynomialPair> {
    if r.degree() > k || r.parity() != Parity::of(k) {
        return Err(Error::Parameter(alloc::format!("R of degree {} does not fit k = {k}", r.degree())));
    }
    if k > DEGREE_CAP {
        return Err(Error::DegreeCap { required: k, cap: DEGREE_CAP });
    }
    if r.sup_on_grid(SIGN_GRID) > 1.0 + 1e-12 {
        return Err(Error::Parameter("|R| exceeds 1 on [-1, 1]".into()));
    }
    let mut rc = r.chebyshev().to_vec();
    rc.resize(k + 1, 0.0);
    // Laurent coefficients of R in z: r_j / 2 at +-j.
    let mut lr = vec![0.0; 2 * k + 1];
    for (j, &c) in rc.iter().enumerate() {
        if j == 0 {
            lr[k] += c;
        } else {
            lr[k + j] += c / 2.0;
            lr[k - j] += c / 2.0;
        }
    }
    // F = 1 - R^2 on exponents -2k..2k; only even exponents survive.
    let mut f = vec![0.0; 4 * k + 1];
    f[2 * k] = 1.0;
    for (a, &x) in lr.iter().enumerate() {
        for (b, &y) in lr.iter().enumerate() {
            f[a + b] -= x * y;
        }
    }
    // G(w) = w^k F, coefficient of w^m at f[2m].
    let mut g: Vec<C64> = (0..=2 * k).map(|m| c64(f[2 * m], 0.0)).collect();
    let top = g.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let small = 1e-13 * top.max(1e-300);
    let mut low_zeros = 0;
    while g.len() > 1 && g[0].norm() <= small {
        g.remove(0);
        low_zeros += 1;
    }
    while g.len() > 1 && g.last().is_some_and(|c| c.norm() <= small) {
        g.pop();
    }
    let roots = polynomial_roots(&g);
    let (mut inner, mut circle): (Vec<C64>, Vec<C64>) = (Vec::new(), Vec::new());
    for w in roots {
        let m = w.norm();
        if (m - 1.0).abs() <= CIRCLE_TOL {
            circle.push(w);
        } else if m < 1.0 {
            inner.push(w);
        }
    }
    if circle.len() % 2 != 0 {
        return Err(Error::Completion { residual: f64::NAN });
    }
    while let Some(w) = circle.pop() {
        let (idx, _) = circle
            .iter()
            .enumerate()
            .map(|(i, u)| (i, (u - w).norm()))
            .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        let mate = circle.swap_remove(idx);
        inner.push((w + mate) * 0.5);
    }
    if inner.len() + low_zeros != k {
        return Err(Error::Completion { residual: f64::NAN });
    }
    let lead = g.last().map(|c| c.norm()).unwrap_or(0.0);
    let prod: f64 = inner.iter().map(|w| w.norm()).product();
    let c = if lead == 0.0 { 0.0 } else { (lead / prod).sqrt() };
    // h(w) = c w^{low} prod (w - w_i); g(z) = z^{-k} h(z^2). Coefficients by DFT.
    let n = 4 * k + 4;
    let samples: Vec<C64> = (0..n)
        .map(|s| {
            let z = C64::from_polar(1.0, 2.0 * PI * s as f64 / n as f64);
            let w = z * z;
            let mut h = w.powu(low_zeros as u32) * c;
            for wi in &inner {
                h *= w - wi;
            }
            h * z.powi(-(k as i32))
        })
        .collect();
    let coef = |j: i64| -> f64 {
        let s: C64 = samples
            .iter()
            .enumerate()
            .map(|(s, v)| v * C64::from_polar(1.0, -2.0 * PI * (j * s as i64) as f64 / n as f64))
            .sum();
        (s / n as f64).re
    };
    let mut sp = vec![ZERO; k + 1];
    let mut q = vec![ZERO; k];
    for j in 0..=k {
        if Parity::of(j) != Parity::of(k) {
            continue;
        }
        let (cp, cm) = (coef(j as i64), coef(-(j as i64)));
        sp[j] = if j == 0 { c64(cp, 0.0) } else { c64(cp + cm, 0.0) };
        if j > 0 {
            q[j - 1] = c64(cp - cm, 0.0);
        }
    }
    let p: Vec<C64> = rc.iter().zip(&sp).map(|(re, s)| c64(*re, 0.0) + C64::i() * s).collect();
    let pair = PolynomialPair::new(p, q, k)?;
    let residual = pair.condition_residual(CONDITION_GRID);
    if residual > RESIDUAL_TOL {
        return Err(Error::Completion { residual });
    }
    Ok(pair)
}

/// Phases realising `(P, Q)`, peeled one layer at a time from the top.
pub fn phase_factors(pq: &PolynomialPair) -> Result<PhaseSequence> {
    let mut p = pq.p.clone();
    let mut q = pq.q.clone();
    let scale = p.iter().chain(&q).fold(0.0f64, |m, c| m.max(c.norm())).max(1.0);
    let mut alphas = Vec::with_capacity(pq.k + 1);
    for k in (1..=pq.k).rev() {
        let (pk, qk) = (p[k], q[k - 1]);
        let alpha = if pk.norm() < 1e-14 * scale && qk.norm() < 1e-14 * scale {
            ONE
        } else if qk.norm() < 1e-14 * scale {
            return Err(Error::Stripping { degree_reached: k });
        } else {
            let a2 = -pk / qk;
            if (a2.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::Stripping { degree_reached: k });
            }
            let a = a2.sqrt();
            a / a.norm()
        };
        let np = combine(&x_times_t(&p), alpha.conj(), &one_minus_x2_times_u(&q), -alpha);
        let nq = combine(&t_to_u(&p), alpha.conj(), &x_times_u(&q), alpha);
        let leftover = np.iter().skip(k).chain(nq.iter().skip(k - 1)).fold(0.0f64, |m, c| m.max(c.norm()));
        if leftover > 1e-8 * scale {
            return Err(Error::Stripping { degree_reached: k });
        }
        p = np[..k].to_vec();
        q = nq[..k - 1].to_vec();
        alphas.push(alpha);
    }
    let a0 = p[0];
    if (a0.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Stripping { degree_reached: 0 });
    }
    alphas.push(a0 / a0.norm());
    alphas.reverse();
    PhaseSequence::new(alphas)
}

/// Everything the QSP error reduction needs, independent of the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReducer {
    pub delta: f64,
    pub eps: f64,
    pub eps_prime: f64,
    pub polynomial: RealPolynomial,
    pub pair: PolynomialPair,
    pub phases: PhaseSequence,
}

impl ErrorReducer {
    /// Sign polynomial at `delta' = 2 delta`, `eps' = eps^2 / 6`.
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5 && eps > 0.0) {
            return Err(Error::Parameter("need 0 < delta <= 1/2 and eps > 0".into()));
        }
        let eps_prime = (eps * eps / 6.0).min(0.999);
        let delta_p = (2.0 * delta).min(0.999_999);
        let polynomial = sign_polynomial(delta_p, eps_prime)?;
        let k = polynomial.degree();
        let pair = complete(&polynomial, k)?;
        let phases = phase_factors(&pair)?;
        Ok(ErrorReducer { delta, eps, eps_prime, polynomial, pair, phases })
    }

    /// Query count.
    pub fn degree(&self) -> usize {
        self.phases.k()
    }
}

/// `Z_ans U_alpha(O)` as a query algorithm over `layout`, with the phases
/// acting on the two-valued register `answer`.
pub fn assemble_on(alpha: &PhaseSequence, layout: &Layout, answer: usize) -> Result<QueryAlgorithm> {
    let k = alpha.k();
    let mut sections = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut m = alpha.phase_matrix(j);
        if j == k {
            m = Matrix::diag(&[ONE, -ONE]).matmul(&m)?;
        }
        let gate = LocalGate::new(layout, vec![answer], m, Predicate::always())?;
        sections.push(Section::Circuit(vec![Gate::Local(gate)]));
    }
    QueryAlgorithm::new(0, 1, layout.dim(), Some(layout.clone()), sections)
}

/// `U(p) = Z_A U_alpha(O_ref)` on `A (x) W` as a dense operator.
pub fn qsp_error_reduction(o_ref: &Operator, d_w: usize, reducer: &ErrorReducer) -> Result<Operator> {
    let layout = crate::purifier::answer_workspace_layout(d_w);
    crate::error::check_dim(layout.dim(), o_ref.dim())?;
    assemble_on(&reducer.phases, &layout, 0)?.to_operator(o_ref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::uniform_range;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn signal_examples() {
        let w = signal_unitary(1.0, 0.0).unwrap();
        assert_eq!(w.matrix()[(1, 1)].re, -1.0);
        assert!(signal_unitary(0.5, 0.5).is_err());
        let p: f64 = 0.25;
        let w = signal_unitary(1.0 - 2.0 * p, 2.0 * (p * (1.0 - p)).sqrt()).unwrap();
        let o = crate::oracles::simple_oracle(p).unwrap();
        assert!(w.distance_max(&o).unwrap() < 1e-15);
    }

    #[test]
    fn zero_length_sequences() {
        let a = PhaseSequence::new(vec![ONE]).unwrap();
        let u = qsp_assemble(&a, &signal_unitary(0.3, 0.91f64.sqrt()).unwrap()).unwrap();
        assert_eq!(u.matrix()[(0, 0)], ONE);
        assert_eq!(u.matrix()[(1, 1)], -ONE);
        let a = PhaseSequence::new(vec![C64::i()]).unwrap();
        let u = qsp_assemble(&a, &signal_unitary(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(u.matrix()[(1, 1)], C64::i());
        let pq = PolynomialPair::new(vec![ONE], vec![], 0).unwrap();
        assert_eq!(phase_factors(&pq).unwrap().alphas(), &[ONE]);
    }

    #[test]
    fn random_sequences_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [1usize, 2, 5, 12] {
            let alpha: Vec<C64> =
                (0..=k).map(|_| C64::from_polar(1.0, uniform_range(&mut rng, 0.0, 2.0 * PI))).collect();
            let seq = PhaseSequence::new(alpha).unwrap();
            let pq = seq.polynomials();
            assert!(pq.condition_residual(CONDITION_GRID) < 1e-12);
            assert!(reassembly_residual(&seq, &pq, REASSEMBLY_GRID).unwrap() < 1e-12);
            let back = phase_factors(&pq).unwrap();
            assert!(reassembly_residual(&back, &pq, REASSEMBLY_GRID).unwrap() < 1e-8);
            let u1 = qsp_assemble(&seq, &signal_unitary(1.0, 0.0).unwrap()).unwrap();
            assert!((u1.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn completion_examples() {
        let x = RealPolynomial::new(vec![0.0, 1.0], Parity::Odd).unwrap();
        let pq = complete(&x, 1).unwrap();
        assert!((pq.p(0.3) - c64(0.3, 0.0)).norm() < 1e-8);
        assert!((pq.q(0.3).norm() - 1.0).abs() < 1e-8);
        let zero = RealPolynomial::new(vec![0.0], Parity::Odd).unwrap();
        let pq = complete(&zero, 1).unwrap();
        assert!(pq.p(0.5).re.abs() < 1e-12);
        assert!((pq.p(0.5).im.abs() - 0.5).abs() < 1e-12);
        let t3 = RealPolynomial::new(vec![0.0, 0.0, 0.0, 1.0], Parity::Odd).unwrap();
        let pq = complete(&t3, 3).unwrap();
        assert!(pq.condition_residual(CONDITION_GRID) <= 1e-8);
        let seq = phase_factors(&pq).unwrap();
        assert!(reassembly_residual(&seq, &pq, REASSEMBLY_GRID).unwrap() < 1e-8);
    }

    #[test]
    fn sign_polynomial_examples() {
        let r = sign_polynomial(0.9, 0.5).unwrap();
        assert_eq!(r.degree(), 1);
        let r = sign_polynomial(0.4, 0.1).unwrap();
        assert!(r.degree() <= 40);
        assert_eq!(r.eval(0.0), 0.0);
        assert!(matches!(sign_polynomial(0.01, 1e-12), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn reducer_meets_contract() {
        let red = ErrorReducer::new(0.3, 0.2).unwrap();
        for (p, sign) in [(0.2, 1.0), (0.8, -1.0)] {
            let spec = crate::oracles::OracleSpec::simple(p).unwrap();
            let o = crate::oracles::general_reflecting_oracle(&spec, None).unwrap();
            let u = qsp_error_reduction(&o, 1, &red).unwrap();
            let phi = spec.target();
            let out = u.apply_amps(&phi).unwrap();
            let err = crate::linalg::norm(&out.iter().zip(&phi).map(|(a, b)| a - b * sign).collect::<Vec<_>>());
            assert!(err <= 0.2, "p={p} err={err}");
        }
    }
}
