//! Spectrum of `T̄(λ)`: an exact-diagonalisation oracle and the SOV
//! characterisation through the tridiagonal determinants `det D_n`, the
//! site-wise Baxter recursions and eigenstate assembly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::json::F17;
use crate::linalg::{c64, inner, max_abs, norm, ComplexMatrix, Polynomial, C64};
use crate::model::{ChainSpec, HERMITIAN_OFFSET};
use crate::operators::{antiperiodic_transfer, fused_scalar};
use crate::sov::{Side, SovBasis};

/// Closure residual accepted by [`q_amplitudes`].
pub const CLOSURE_TOL: f64 = 1e-9;
/// Relative eigen-residual accepted by [`sov_eigenstate`].
pub const EIGEN_TOL: f64 = 1e-8;
/// Scaled `det D_n` accepted for an eigenvalue.
pub const ACCEPT_TOL: f64 = 1e-10;
/// Newton target for the scaled `det D_n`.
pub const NEWTON_TARGET: f64 = 1e-12;
/// Eigenvalues of the Hermitian operator closer than this (relative) count
/// as a collision.
pub const COLLISION_TOL: f64 = 1e-8;
const MAX_RETRIES: usize = 5;
const PARITY_TOL: f64 = 1e-9;

/// Fixed probe points for eigen-residual checks.
pub const PROBE_POINTS: [C64; 3] = [
    C64 { re: 0.37, im: 0.21 },
    C64 { re: -0.53, im: 0.44 },
    C64 { re: 1.13, im: -0.29 },
];

/// An eigenvalue `t(λ) = Σ_b c_b λ^{b−1}` (at most `N` coefficients) with
/// its values on the separation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueFn {
    poly: Polynomial,
    grid: Vec<Vec<C64>>,
}

impl EigenvalueFn {
    pub fn new(spec: &ChainSpec, coeffs: Vec<C64>) -> Self {
        let poly = Polynomial::new(coeffs);
        let grid = (0..spec.n())
            .map(|n| {
                (0..=spec.spin(n).twice() as i64)
                    .map(|k| poly.eval(spec.grid_point(n, k)))
                    .collect()
            })
            .collect();
        Self { poly, grid }
    }

    pub fn coeffs(&self) -> &[C64] {
        self.poly.coeffs()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn eval(&self, lambda: C64) -> C64 {
        self.poly.eval(lambda)
    }

    /// `t(η_n^{(k)})`.
    pub fn at_grid(&self, n: usize, k: usize) -> C64 {
        self.grid[n][k]
    }

    /// Eigenvalue `t^{(s)}(λ)` of the fused transfer matrix, `two_s = 2s`.
    pub fn fused(&self, spec: &ChainSpec, two_s: u32, lambda: C64) -> C64 {
        fused_scalar(spec, two_s, lambda, &|x| self.eval(x))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let n = self.coeffs().len().max(other.coeffs().len());
        let get = |p: &Self, i: usize| p.coeffs().get(i).copied().unwrap_or_default();
        (0..n).map(|i| (get(self, i) - get(other, i)).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `D_n`: diagonal `t(η_n^{(k)})`, superdiagonal `−a(η_n^{(k)})`,
/// subdiagonal `−d(η_n^{(k)})` (row index `k`).
pub fn dn_matrix(spec: &ChainSpec, t: &EigenvalueFn, n: usize) -> ComplexMatrix {
    let size = spec.spin(n).dim();
    ComplexMatrix::from_fn(size, size, |i, j| {
        let k = i as i64;
        let off = spec.grid_offset(n, k);
        if i == j {
            t.at_grid(n, i)
        } else if j == i + 1 {
            -spec.a_at(n, off)
        } else if i == j + 1 {
            -spec.d_at(n, off)
        } else {
            c64(0.0, 0.0)
        }
    })
}

fn dn_scale(spec: &ChainSpec, t: &EigenvalueFn, n: usize) -> f64 {
    (0..spec.spin(n).dim())
        .map(|k| {
            let off = spec.grid_offset(n, k as i64);
            t.at_grid(n, k)
                .norm()
                .max(spec.a_at(n, off).norm())
                .max(spec.d_at(n, off).norm())
                .max(1.0)
        })
        .product()
}

/// `det D_n` for every site.
pub fn dn_determinants(spec: &ChainSpec, t: &EigenvalueFn) -> Vec<C64> {
    (0..spec.n())
        .map(|n| dn_matrix(spec, t, n).det().expect("D_n is square"))
        .collect()
}

/// `max_n |det D_n| / scale_n`, `scale_n = ∏_k max(|t|, |a|, |d|, 1)` on the
/// grid of site `n`.
pub fn sov_residual(spec: &ChainSpec, t: &EigenvalueFn) -> f64 {
    dn_determinants(spec, t)
        .iter()
        .enumerate()
        .map(|(n, det)| det.norm() / dn_scale(spec, t, n))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QKind {
    /// Right amplitudes `Q_t`.
    Q,
    /// Left amplitudes `Q̄_t`.
    Qbar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QAmplitudes {
    pub kind: QKind,
    /// `values[n][k]` at `η_n^{(k)}`.
    pub values: Vec<Vec<C64>>,
    /// Per-site scaled closure residuals.
    pub closure: Vec<f64>,
}

impl QAmplitudes {
    pub fn max_closure(&self) -> f64 {
        self.closure.iter().copied().fold(0.0, f64::max)
    }
}

/// Forward recursion from `Q(η_n^{(0)}) = 1`:
/// - `Q(h+1) = [t(η^{(h)}) Q(h) − a(η^{(h−1)}) Q(h−1)] / d(η^{(h+1)})`,
/// - `Q̄(h+1) = [t(η^{(h)}) Q̄(h) − d(η^{(h)}) Q̄(h−1)] / a(η^{(h)})`,
///
/// with the closure residual of the first equation past the end.
pub fn q_amplitudes_unchecked(spec: &ChainSpec, t: &EigenvalueFn, kind: QKind) -> QAmplitudes {
    let mut values = Vec::with_capacity(spec.n());
    let mut closure = Vec::with_capacity(spec.n());
    for n in 0..spec.n() {
        let two_s = spec.spin(n).twice() as usize;
        let a = |k: i64| spec.a_at(n, spec.grid_offset(n, k));
        let d = |k: i64| spec.d_at(n, spec.grid_offset(n, k));
        let t = |k: usize| t.at_grid(n, k);
        // (coefficient of q[h−1], divisor for q[h+1]) at step h
        let lower = |h: usize| match kind {
            QKind::Q => a(h as i64 - 1),
            QKind::Qbar => d(h as i64),
        };
        let divisor = |h: usize| match kind {
            QKind::Q => d(h as i64 + 1),
            QKind::Qbar => a(h as i64),
        };
        let mut q = vec![c64(1.0, 0.0)];
        for h in 0..two_s {
            let prev = if h == 0 { c64(0.0, 0.0) } else { lower(h) * q[h - 1] };
            q.push((t(h) * q[h] - prev) / divisor(h));
        }
        let first = t(two_s) * q[two_s];
        let second = lower(two_s) * q[two_s - 1];
        let scale = first.norm().max(second.norm()).max(1.0);
        closure.push((first - second).norm() / scale);
        values.push(q);
    }
    QAmplitudes { kind, values, closure }
}

/// [`q_amplitudes_unchecked`] with the closure check at [`CLOSURE_TOL`].
pub fn q_amplitudes(spec: &ChainSpec, t: &EigenvalueFn, kind: QKind) -> Result<QAmplitudes> {
    q_amplitudes_with_tol(spec, t, kind, CLOSURE_TOL)
}

pub fn q_amplitudes_with_tol(
    spec: &ChainSpec,
    t: &EigenvalueFn,
    kind: QKind,
    tol: f64,
) -> Result<QAmplitudes> {
    let q = q_amplitudes_unchecked(spec, t, kind);
    match q.closure.iter().enumerate().find(|(_, &r)| !(r <= tol)) {
        Some((n, &residual)) => Err(Error::InconsistentEigenvalue { site: n + 1, residual }),
        None => Ok(q),
    }
}

/// Residual of the separated Baxter equation
/// `t(η_n^{(h)}) Ψ(h) = a(η_n^{(h)}) Ψ(h + e_n) + d(η_n^{(h)}) Ψ(h − e_n)`
/// for `Ψ(h) = ∏_a Q̄(η_a^{(h_a)})`, scaled per equation.
pub fn baxter_residual(spec: &ChainSpec, basis: &SovBasis, t: &EigenvalueFn, qbar: &QAmplitudes) -> f64 {
    let psi = |h: &[usize]| -> C64 {
        h.iter().enumerate().map(|(a, &k)| qbar.values[a][k]).product()
    };
    let mut worst: f64 = 0.0;
    for h in basis.indices() {
        let base = psi(h);
        for n in 0..spec.n() {
            let two_s = spec.spin(n).twice() as usize;
            let off = spec.grid_offset(n, h[n] as i64);
            let lhs = t.at_grid(n, h[n]) * base;
            let mut up = c64(0.0, 0.0);
            let mut down = c64(0.0, 0.0);
            if h[n] < two_s {
                let mut k = h.clone();
                k[n] += 1;
                up = spec.a_at(n, off) * psi(&k);
            }
            if h[n] > 0 {
                let mut k = h.clone();
                k[n] -= 1;
                down = spec.d_at(n, off) * psi(&k);
            }
            let scale = lhs.norm().max(up.norm()).max(down.norm()).max(1.0);
            worst = worst.max((lhs - up - down).norm() / scale);
        }
    }
    worst
}

/// `Σ_h ∏_a amp_a(η_a^{(h_a)}) μ(h) |h⟩` (right) or the covector analogue.
pub fn separate_vector(basis: &SovBasis, amplitudes: &[Vec<C64>], side: Side) -> Vec<C64> {
    let coeffs: Vec<C64> = basis
        .indices()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let amp: C64 = h.iter().enumerate().map(|(a, &k)| amplitudes[a][k]).product();
            amp * basis.weight(i)
        })
        .collect();
    basis.from_sov(&coeffs, side)
}

/// Relative residual `max_λ ‖T̄v − t v‖ / max(‖T̄v‖, |t|‖v‖)` over
/// [`PROBE_POINTS`]; for the left side `v T̄` is used.
pub fn eigen_residual(spec: &ChainSpec, t: &EigenvalueFn, v: &[C64], side: Side) -> (f64, Vec<C64>) {
    let mut worst = 0.0;
    let mut worst_vec = Vec::new();
    for &x in &PROBE_POINTS {
        let op = antiperiodic_transfer(spec, x);
        let tv = match side {
            Side::Right => op.apply(v),
            Side::Left => op.apply_left(v),
        };
        let tx = t.eval(x);
        let diff: Vec<C64> = tv.iter().zip(v).map(|(a, b)| a - tx * b).collect();
        // ‖T̄(x)‖_F‖v‖ keeps the ratio meaningful when t(x) ≈ 0
        let scale = (op.frobenius_norm() * norm(v)).max(f64::MIN_POSITIVE);
        let r = norm(&diff) / scale;
        if r >= worst {
            worst = r;
            worst_vec = diff;
        }
    }
    (worst, worst_vec)
}

/// Assembled eigenstate `|t⟩ = Σ_h ∏ Q_t μ(h)|h⟩` or `⟨t| = Σ_h ∏ Q̄_t μ(h)⟨h|`,
/// checked against `T̄` at the probe points.
pub fn sov_eigenstate(basis: &SovBasis, t: &EigenvalueFn, side: Side) -> Result<Vec<C64>> {
    let spec = basis.spec();
    let kind = match side {
        Side::Right => QKind::Q,
        Side::Left => QKind::Qbar,
    };
    let q = q_amplitudes(spec, t, kind)?;
    let v = separate_vector(basis, &q.values, side);
    let (residual, diff) = eigen_residual(spec, t, &v, side);
    if !(residual <= EIGEN_TOL) {
        let coeffs = basis.to_sov(&diff, side);
        let worst = (0..coeffs.len())
            .max_by(|&i, &j| coeffs[i].norm().total_cmp(&coeffs[j].norm()))
            .unwrap_or(0);
        return Err(Error::Assembly { residual, worst_h: basis.indices()[worst].clone() });
    }
    Ok(v)
}

/// `1 − |⟨u, v⟩|² / (‖u‖²‖v‖²)`.
pub fn collinearity_defect(u: &[C64], v: &[C64]) -> f64 {
    let uv = inner(u, v).norm_sqr();
    let denom = inner(u, u).re * inner(v, v).re;
    if denom == 0.0 {
        return 1.0;
    }
    (1.0 - uv / denom).abs()
}

#[derive(Clone, Debug)]
pub struct EdEigenpair {
    pub t: EigenvalueFn,
    /// Eigenvalue of the Hermitian operator `f·T̄(λ_0)`.
    pub hermitian_value: f64,
    /// Normalised eigenvector.
    pub right: Vec<C64>,
    /// Conjugate transpose of `right`.
    pub left: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct EdSpectrum {
    pub lambda0: C64,
    /// Scalar `f` making `f·T̄(λ_0)` Hermitian.
    pub factor: C64,
    /// Offsets tried before the spectrum was found simple.
    pub attempts: usize,
    /// Ascending in `hermitian_value`.
    pub eigen: Vec<EdEigenpair>,
}

/// Diagonalises `f·T̄(λ_0)` at the Hermitian point and recovers every
/// eigenvalue polynomial from Rayleigh quotients at `λ_0 + j·u`,
/// `j = 0..N−1`, `u` along the Hermitian line.
pub fn ed_spectrum(spec: &ChainSpec) -> Result<EdSpectrum> {
    let mut smallest_gap = f64::INFINITY;
    for attempt in 0..=MAX_RETRIES {
        let offset = HERMITIAN_OFFSET + 0.7 * attempt as f64;
        let (lambda0, factor) = spec.hermitian_point(offset)?;
        let h = antiperiodic_transfer(spec, lambda0).scale(factor);
        let eig = h.eig_hermitian()?;
        let scale = eig.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        smallest_gap = smallest_gap.min(gap / scale);
        if gap <= COLLISION_TOL * scale {
            continue;
        }
        let dir = spec.hermitian_direction();
        let nodes: Vec<C64> = (0..spec.n()).map(|j| lambda0 + dir * j as f64).collect();
        let ops: Vec<ComplexMatrix> = nodes.iter().map(|&x| antiperiodic_transfer(spec, x)).collect();
        let mut eigen = Vec::with_capacity(spec.dim());
        for (k, &value) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(k);
            let vv = inner(&v, &v);
            let samples: Vec<C64> = ops.iter().map(|op| inner(&v, &op.apply(&v)) / vv).collect();
            let poly = Polynomial::from_samples(&nodes, &samples)?;
            eigen.push(EdEigenpair {
                t: EigenvalueFn::new(spec, poly.coeffs().to_vec()),
                hermitian_value: value,
                left: v.iter().map(|z| z.conj()).collect(),
                right: v,
            });
        }
        return Ok(EdSpectrum { lambda0, factor, attempts: attempt + 1, eigen });
    }
    Err(Error::SimpleSpectrum { attempts: MAX_RETRIES + 1, gap: smallest_gap })
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub t: EigenvalueFn,
    pub iterations: usize,
    /// Scaled residual before each iteration and after the last one.
    pub trace: Vec<f64>,
}

/// Damped Newton on `F_n(c) = det D_n(c)`, central-difference Jacobian with
/// step `1e−6·max(1, |c_k|)`; stops at [`NEWTON_TARGET`] or fails after 50
/// iterations.
pub fn refine_newton(spec: &ChainSpec, t_init: &EigenvalueFn) -> Result<NewtonOutcome> {
    const MAX_ITER: usize = 50;
    let n = spec.n();
    let mut c: Vec<C64> = t_init.coeffs().to_vec();
    c.resize(n, c64(0.0, 0.0));
    let eval = |c: &[C64]| EigenvalueFn::new(spec, c.to_vec());
    let mut t = eval(&c);
    let mut residual = sov_residual(spec, &t);
    let mut trace = vec![residual];
    for iter in 0..MAX_ITER {
        if residual <= NEWTON_TARGET {
            return Ok(NewtonOutcome { t, iterations: iter, trace });
        }
        let f = dn_determinants(spec, &t);
        let mut jac = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let step = 1e-6 * c[k].norm().max(1.0);
            let mut plus = c.clone();
            let mut minus = c.clone();
            plus[k] += step;
            minus[k] -= step;
            let fp = dn_determinants(spec, &eval(&plus));
            let fm = dn_determinants(spec, &eval(&minus));
            for row in 0..n {
                jac[(row, k)] = (fp[row] - fm[row]) / (2.0 * step);
            }
        }
        let rhs: Vec<C64> = f.iter().map(|z| -z).collect();
        let delta = jac.lu()?.solve(&rhs)?;
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<C64> = c.iter().zip(&delta).map(|(x, d)| x + d * damping).collect();
            let t_trial = eval(&trial);
            let r = sov_residual(spec, &t_trial);
            if r < residual {
                c = trial;
                t = t_trial;
                residual = r;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        trace.push(residual);
        if !accepted {
            break;
        }
    }
    if residual <= NEWTON_TARGET {
        let iterations = trace.len() - 1;
        return Ok(NewtonOutcome { t, iterations, trace });
    }
    Err(Error::Convergence { trace })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

fn parity_of(coeffs: &[C64]) -> Parity {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Parity::Even;
    }
    let small = |p: usize| coeffs.iter().skip(p).step_by(2).all(|c| c.norm() <= PARITY_TOL * scale);
    if small(1) {
        Parity::Even
    } else if small(0) {
        Parity::Odd
    } else {
        Parity::Neither
    }
}

/// Parity of one eigenvalue, in `λ` and in the shifted variable `λ − c`
/// where `c = −c_{d−1}/(d·c_d)` removes the subleading coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityDiagnostic {
    pub degree: Option<usize>,
    pub unshifted: Parity,
    pub shift: Option<C64>,
    pub shifted: Parity,
}

pub fn parity_diagnostic(t: &EigenvalueFn) -> ParityDiagnostic {
    let p = t.polynomial();
    let degree = p.degree();
    let unshifted = parity_of(p.coeffs());
    let shift = match degree {
        Some(d) if d >= 1 => {
            let c = p.coeffs();
            Some(-c[d - 1] / (c[d] * d as f64))
        }
        _ => None,
    };
    let shifted = match shift {
        Some(c) => parity_of(p.shifted(c).coeffs()),
        None => unshifted,
    };
    ParityDiagnostic { degree, unshifted, shift, shifted }
}

/// The parity claimed for a chain of `N` sites: even for odd `N`, odd for
/// even `N`.
pub fn claimed_parity(n: usize) -> Parity {
    if n % 2 == 1 { Parity::Even } else { Parity::Odd }
}

/// Whole-spectrum summary of the measured parity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParitySummary {
    pub claimed: Parity,
    /// Eigenvalues with the claimed parity in `λ`.
    pub holds_in_lambda: usize,
    /// Shift `c` shared by all non-constant eigenvalues, if any.
    pub common_shift: Option<[F17; 2]>,
    /// Eigenvalues with the claimed parity in `λ − c`.
    pub holds_in_shifted: usize,
    pub total: usize,
    pub statement: String,
}

pub fn parity_summary(spec: &ChainSpec, ts: &[EigenvalueFn]) -> ParitySummary {
    let claimed = claimed_parity(spec.n());
    let diags: Vec<ParityDiagnostic> = ts.iter().map(parity_diagnostic).collect();
    let holds_in_lambda = diags.iter().filter(|d| d.unshifted == claimed).count();
    let tol = 1e-8 * spec.eta().norm().max(1.0);
    let shifts: Vec<C64> = diags.iter().filter_map(|d| d.shift).collect();
    let common = shifts
        .first()
        .copied()
        .filter(|c0| shifts.iter().all(|c| (c - c0).norm() <= tol));
    let holds_in_shifted = match common {
        Some(c) => ts.iter().filter(|t| parity_of(t.polynomial().shifted(c).coeffs()) == claimed).count(),
        None => 0,
    };
    let total = ts.len();
    let claimed_name = match claimed {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Neither => "neither",
    };
    let statement = if holds_in_lambda == total {
        format!("parity holds: all {total} eigenvalues are {claimed_name} in lambda")
    } else if let (Some(c), true) = (common, holds_in_shifted == total) {
        format!(
            "parity fails in lambda ({holds_in_lambda}/{total}) but holds in lambda - ({:.6}{:+.6}i) for all {total}",
            c.re, c.im
        )
    } else if let Some(c) = common {
        format!(
            "parity fails: {holds_in_lambda}/{total} {claimed_name} in lambda, {holds_in_shifted}/{total} in lambda - ({:.6}{:+.6}i)",
            c.re, c.im
        )
    } else {
        format!("parity fails: {holds_in_lambda}/{total} {claimed_name} in lambda, no common shift")
    };
    ParitySummary {
        claimed,
        holds_in_lambda,
        common_shift: common.map(|c| [F17(c.re), F17(c.im)]),
        holds_in_shifted,
        total,
        statement,
    }
}

/// One fully characterised eigenvalue.
#[derive(Clone, Debug)]
pub struct SolvedEigen {
    pub t: EigenvalueFn,
    pub q: QAmplitudes,
    pub qbar: QAmplitudes,
    /// SOV-assembled `|t⟩`.
    pub right: Vec<C64>,
    /// SOV-assembled `⟨t|`.
    pub left: Vec<C64>,
    /// Normalised eigenvector from exact diagonalisation.
    pub ed_vector: Vec<C64>,
    pub hermitian_value: f64,
    pub sov_residual: f64,
    pub eigen_residual: f64,
    pub collinearity: f64,
    pub parity: ParityDiagnostic,
}

/// The full spectrum with SOV data, ordered as the ED eigenvalues.
#[derive(Clone, Debug)]
pub struct SolvedSpectrum {
    pub spec: ChainSpec,
    pub basis: SovBasis,
    pub lambda0: C64,
    pub factor: C64,
    pub attempts: usize,
    pub eigen: Vec<SolvedEigen>,
}

impl SolvedSpectrum {
    /// ED → scaled `det D_n` check → Q/Q̄ → eigenstates.
    pub fn solve(spec: &ChainSpec) -> Result<Self> {
        let basis = SovBasis::build(spec)?;
        let ed = ed_spectrum(spec)?;
        let mut eigen = Vec::with_capacity(ed.eigen.len());
        for pair in ed.eigen {
            let t = pair.t;
            let sov_res = sov_residual(spec, &t);
            let q = q_amplitudes(spec, &t, QKind::Q)?;
            let qbar = q_amplitudes(spec, &t, QKind::Qbar)?;
            let right = sov_eigenstate(&basis, &t, Side::Right)?;
            let left = sov_eigenstate(&basis, &t, Side::Left)?;
            let eigen_res = eigen_residual(spec, &t, &right, Side::Right)
                .0
                .max(eigen_residual(spec, &t, &left, Side::Left).0);
            let collinearity = collinearity_defect(&pair.right, &right);
            let parity = parity_diagnostic(&t);
            eigen.push(SolvedEigen {
                t,
                q,
                qbar,
                right,
                left,
                ed_vector: pair.right,
                hermitian_value: pair.hermitian_value,
                sov_residual: sov_res,
                eigen_residual: eigen_res,
                collinearity,
                parity,
            });
        }
        Ok(Self {
            spec: spec.clone(),
            basis,
            lambda0: ed.lambda0,
            factor: ed.factor,
            attempts: ed.attempts,
            eigen,
        })
    }

    pub fn len(&self) -> usize {
        self.eigen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigen.is_empty()
    }

    /// Index of the lowest eigenvalue of `f·T̄(λ_0)`.
    pub fn ground_state(&self) -> usize {
        0
    }

    pub fn eigenvalues(&self) -> Vec<EigenvalueFn> {
        self.eigen.iter().map(|e| e.t.clone()).collect()
    }

    pub fn parity_summary(&self) -> ParitySummary {
        parity_summary(&self.spec, &self.eigenvalues())
    }

    pub fn report(&self) -> SpectrumReport {
        let records = self
            .eigen
            .iter()
            .enumerate()
            .map(|(i, e)| SpectrumRecord {
                index: i,
                coefficients: e.t.coeffs().iter().map(|z| [F17(z.re), F17(z.im)]).collect(),
                hermitian_value: F17(e.hermitian_value),
                sov_residual: F17(e.sov_residual),
                closure_residuals: e
                    .q
                    .closure
                    .iter()
                    .zip(&e.qbar.closure)
                    .map(|(a, b)| [F17(*a), F17(*b)])
                    .collect(),
                parity_flag: ParityRecord {
                    unshifted: e.parity.unshifted,
                    shift: e.parity.shift.map(|c| [F17(c.re), F17(c.im)]),
                    shifted: e.parity.shifted,
                },
                eigen_residual: F17(e.eigen_residual),
                collinearity_defect: F17(e.collinearity),
            })
            .collect();
        SpectrumReport {
            spec: self.spec.to_raw(),
            lambda0: [F17(self.lambda0.re), F17(self.lambda0.im)],
            attempts: self.attempts,
            records,
            parity: self.parity_summary(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityRecord {
    pub unshifted: Parity,
    pub shift: Option<[F17; 2]>,
    pub shifted: Parity,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRecord {
    pub index: usize,
    pub coefficients: Vec<[F17; 2]>,
    pub hermitian_value: F17,
    pub sov_residual: F17,
    /// `[Q, Q̄]` per site.
    pub closure_residuals: Vec<[F17; 2]>,
    pub parity_flag: ParityRecord,
    pub eigen_residual: F17,
    pub collinearity_defect: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub spec: crate::model::RawSpec,
    pub lambda0: [F17; 2],
    pub attempts: usize,
    pub records: Vec<SpectrumRecord>,
    pub parity: ParitySummary,
}

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Largest entry of a vector, for scale estimates.
pub fn vector_scale(v: &[C64]) -> f64 {
    max_abs(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spin;

    fn i() -> C64 {
        c64(0.0, 1.0)
    }

    fn one_site() -> ChainSpec {
        ChainSpec::new(vec![Spin::HALF], i(), vec![c64(0.0, 0.0)]).unwrap()
    }

    fn constant(spec: &ChainSpec, c: C64) -> EigenvalueFn {
        EigenvalueFn::new(spec, vec![c])
    }

    #[test]
    fn one_site_dn() {
        let spec = one_site();
        let t = constant(&spec, c64(0.3, 0.0));
        let d = dn_matrix(&spec, &t, 0);
        assert_eq!(d[(0, 1)], i());
        assert_eq!(d[(1, 0)], i());
        assert!(dn_determinants(&spec, &constant(&spec, i()))[0].norm() < 1e-15);
        assert!(sov_residual(&spec, &constant(&spec, -i())) < 1e-15);
    }

    #[test]
    fn one_site_q_amplitudes() {
        let spec = one_site();
        let plus = constant(&spec, i());
        let q = q_amplitudes(&spec, &plus, QKind::Q).unwrap();
        assert_eq!(q.values[0], vec![c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert_eq!(q.closure[0], 0.0);
        let qb = q_amplitudes(&spec, &plus, QKind::Qbar).unwrap();
        assert_eq!(qb.values[0], vec![c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let minus = constant(&spec, -i());
        assert_eq!(q_amplitudes(&spec, &minus, QKind::Q).unwrap().values[0], vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let wrong = constant(&spec, c64(0.5, 0.0));
        assert!(matches!(
            q_amplitudes(&spec, &wrong, QKind::Q),
            Err(Error::InconsistentEigenvalue { site: 1, .. })
        ));
    }

    #[test]
    fn one_site_eigenstates() {
        let spec = one_site();
        let basis = SovBasis::build(&spec).unwrap();
        let t = constant(&spec, i());
        let r = sov_eigenstate(&basis, &t, Side::Right).unwrap();
        let l = sov_eigenstate(&basis, &t, Side::Left).unwrap();
        for v in [r, l] {
            assert!((v[0] - c64(1.0, 0.0)).norm() < 1e-15 && (v[1] - c64(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn one_site_ed() {
        let ed = ed_spectrum(&one_site()).unwrap();
        assert_eq!(ed.eigen.len(), 2);
        let mut consts: Vec<C64> = ed.eigen.iter().map(|e| e.t.coeffs()[0]).collect();
        consts.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((consts[0] + i()).norm() < 1e-14 && (consts[1] - i()).norm() < 1e-14);
    }

    #[test]
    fn generic_regime_is_refused() {
        let spec = ChainSpec::new(vec![Spin::HALF], c64(1.0, 1.0), vec![c64(0.0, 0.0)]).unwrap();
        assert!(matches!(ed_spectrum(&spec), Err(Error::RegimeUnsupported(_))));
    }

    #[test]
    fn newton_fixed_point_and_basin() {
        let spec = one_site();
        let exact = constant(&spec, i());
        let out = refine_newton(&spec, &exact).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.t.coeffs(), exact.coeffs());
        let perturbed = constant(&spec, i() + 1e-3);
        let out = refine_newton(&spec, &perturbed).unwrap();
        assert!((out.t.coeffs()[0] - i()).norm() < 1e-10);
    }

    #[test]
    fn rank_minor_is_product_of_d() {
        let spec = ChainSpec::benchmark(&[Spin::ONE, Spin::from_twice(3).unwrap()]);
        let t = EigenvalueFn::new(&spec, vec![c64(0.3, 0.1), c64(-0.2, 0.7)]);
        for n in 0..spec.n() {
            let d = dn_matrix(&spec, &t, n);
            let size = d.rows();
            // delete first row and last column
            let minor = ComplexMatrix::from_fn(size - 1, size - 1, |i, j| d[(i + 1, j)]);
            let cofactor = minor.det().unwrap() * if size % 2 == 0 { -1.0 } else { 1.0 };
            let want: C64 = (1..size as i64).map(|k| spec.d_at(n, spec.grid_offset(n, k))).product();
            assert!((cofactor - want).norm() < 1e-12 * want.norm());
            assert!(want.norm() > 0.0);
        }
    }

    #[test]
    fn parity_of_simple_polynomials() {
        let spec = ChainSpec::benchmark(&[Spin::HALF; 2]);
        let odd = EigenvalueFn::new(&spec, vec![c64(0.0, 0.0), c64(2.0, 0.0)]);
        assert_eq!(parity_diagnostic(&odd).unshifted, Parity::Odd);
        // 2ηλ + η² is odd in λ + η/2
        let t = EigenvalueFn::new(&spec, vec![i() * i(), i() * 2.0]);
        let p = parity_diagnostic(&t);
        assert_eq!(p.unshifted, Parity::Neither);
        assert!((p.shift.unwrap() + i() * 0.5).norm() < 1e-15);
        assert_eq!(p.shifted, Parity::Odd);
        let c = EigenvalueFn::new(&spec, vec![i(), c64(0.0, 0.0)]);
        assert_eq!(parity_diagnostic(&c).unshifted, Parity::Even);
        assert_eq!(parity_diagnostic(&c).shift, None);
    }
}
