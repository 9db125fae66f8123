//! Separate states, determinant scalar products, local form factors and
//! their dense-matrix oracles.

use crate::error::{Error, Result};
use crate::json::fmt17;
use crate::linalg::{c64, norm, pair, ComplexMatrix, C64};
use crate::model::ChainSpec;
use crate::operators::{embed, SpinGenerators};
use crate::sov::{Side, SovBasis};
use crate::spectrum::{separate_vector, EigenvalueFn, SolvedEigen, SolvedSpectrum};

/// Denominators below this (relative) are reported as poles.
pub const POLE_TOL: f64 = 1e-10;

/// A state whose SOV coefficients factorise over sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparateState {
    pub side: Side,
    /// `amplitudes[a][k]` at `η_a^{(k)}`.
    pub amplitudes: Vec<Vec<C64>>,
}

impl SeparateState {
    pub fn new(spec: &ChainSpec, side: Side, amplitudes: Vec<Vec<C64>>) -> Result<Self> {
        let ok = amplitudes.len() == spec.n()
            && amplitudes.iter().enumerate().all(|(a, v)| v.len() == spec.spin(a).dim());
        if !ok {
            return Err(Error::Dimension("amplitude arrays must have length 2s_a + 1 per site".into()));
        }
        Ok(Self { side, amplitudes })
    }

    pub fn to_vector(&self, basis: &SovBasis) -> Vec<C64> {
        separate_vector(basis, &self.amplitudes, self.side)
    }
}

/// `M_{a,b} = Σ_h α_a(η_a^{(h)}) β_a(η_a^{(h)}) (η_a^{(h)})^{b}`,
/// `b = 0..cols−1`.
pub fn gram_matrix(spec: &ChainSpec, alpha: &[Vec<C64>], beta: &[Vec<C64>], cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(spec.n(), cols, |a, b| {
        (0..spec.spin(a).dim())
            .map(|h| alpha[a][h] * beta[a][h] * spec.grid_point(a, h as i64).powu(b as u32))
            .sum()
    })
}

/// `⟨α|β⟩ = det_N M^{(α,β)}` for a left separate state with amplitudes
/// `alpha` and a right one with amplitudes `beta`.
pub fn scalar_product_det(spec: &ChainSpec, alpha: &[Vec<C64>], beta: &[Vec<C64>]) -> (C64, ComplexMatrix) {
    let m = gram_matrix(spec, alpha, beta, spec.n());
    (m.det().expect("Gram matrix is square"), m)
}

/// `⟨t|t'⟩` from the Gram determinant.
pub fn eigen_scalar_product(spec: &ChainSpec, t: &SolvedEigen, tp: &SolvedEigen) -> C64 {
    scalar_product_det(spec, &t.qbar.values, &tp.q.values).0
}

/// Frobenius norm of `|M|_{a,b} = Σ_h |α_a β_a (η_a^{(h)})^b|`.
fn gram_magnitude(spec: &ChainSpec, alpha: &[Vec<C64>], beta: &[Vec<C64>], cols: usize) -> f64 {
    let mut sum = 0.0;
    for a in 0..spec.n() {
        for b in 0..cols {
            let e: f64 = (0..spec.spin(a).dim())
                .map(|h| (alpha[a][h] * beta[a][h]).norm() * spec.grid_point(a, h as i64).norm().powi(b as i32))
                .sum();
            sum += e * e;
        }
    }
    sum.sqrt()
}

/// `‖M V‖ / (‖|M|‖‖V‖)` with `V_b = c'_b − c_b`, which `M^{(t,t')}`
/// annihilates when `t ≠ t'`; `|M|` is the termwise magnitude of `M`.
pub fn orthogonality_witness(spec: &ChainSpec, t: &SolvedEigen, tp: &SolvedEigen) -> Result<f64> {
    let n = spec.n();
    let get = |e: &EigenvalueFn, b: usize| e.coeffs().get(b).copied().unwrap_or_default();
    let v: Vec<C64> = (0..n).map(|b| get(&tp.t, b) - get(&t.t, b)).collect();
    let scale = (0..n).map(|b| get(&t.t, b).norm().max(get(&tp.t, b).norm())).fold(1.0, f64::max);
    if norm(&v) <= 1e-12 * scale {
        return Err(Error::DegenerateWitness);
    }
    let m = gram_matrix(spec, &t.qbar.values, &tp.q.values, n);
    let mv = m.apply(&v);
    // entries of M are sums that cancel, so measure them by their terms
    let mn = gram_magnitude(spec, &t.qbar.values, &tp.q.values, n);
    if mn == 0.0 {
        return Ok(0.0);
    }
    Ok(norm(&mv) / (mn * norm(&v)))
}

/// Order-of-magnitude scale of a fused eigenvalue near site `h`.
fn fused_scale(spec: &ChainSpec, two_s: u32, site: usize) -> f64 {
    let spread = spec
        .inhom()
        .iter()
        .map(|z| (z - spec.inhom()[site]).norm())
        .fold(0.0, f64::max);
    (1.0 + spec.eta().norm() + spread).powi((two_s as usize * spec.n()) as i32)
}

/// `∏_{h<n} t^{(s_h)}(η_h) / ∏_{h≤n} t'^{(s_h)}(η_h)`.
fn prefactor(spec: &ChainSpec, t: &EigenvalueFn, tp: &EigenvalueFn, n: usize) -> Result<C64> {
    let mut num = c64(1.0, 0.0);
    let mut den = c64(1.0, 0.0);
    for h in 0..=n {
        let two_s = spec.spin(h).twice();
        let x = spec.inhom()[h];
        let d = tp.fused(spec, two_s, x);
        if d.norm() < POLE_TOL * fused_scale(spec, two_s, h) {
            return Err(Error::Pole { point: x });
        }
        den *= d;
        if h < n {
            num *= t.fused(spec, two_s, x);
        }
    }
    Ok(num / den)
}

/// `⟨t|S_n^-|t'⟩` as an `(N+1)×(N+1)` determinant: the Gram rows with
/// moments up to `λ^N` and a last row
/// `Σ_{k=1}^{2s_n} t^{(s_n−k/2)}(η_n + kη/2)·t'^{((k−1)/2)}(η̄_n^{(k/2)})·(η̄_n^{(k)})^b`.
pub fn form_factor_sminus(spec: &ChainSpec, t: &SolvedEigen, tp: &SolvedEigen, n: usize) -> Result<C64> {
    spec.check_site(n)?;
    let sites = spec.n();
    let two_s = spec.spin(n).twice() as i64;
    let pref = prefactor(spec, &t.t, &tp.t, n)?;
    let gram = gram_matrix(spec, &t.qbar.values, &tp.q.values, sites + 1);
    let coefs: Vec<(C64, C64)> = (1..=two_s)
        .map(|k| {
            let left = t.t.fused(spec, (two_s - k) as u32, spec.point(n, k));
            let right = tp.t.fused(spec, (k - 1) as u32, spec.point(n, k - two_s - 1));
            (left * right, spec.shifted_grid_point(n, k))
        })
        .collect();
    let m = ComplexMatrix::from_fn(sites + 1, sites + 1, |a, b| {
        if a < sites {
            gram[(a, b)]
        } else {
            coefs.iter().map(|(c, x)| c * x.powu(b as u32)).sum()
        }
    });
    Ok(pref * m.det()?)
}

/// `⟨t|S_n^z|t'⟩` as an `(N+1)×(N+1)` determinant: the `N×N` Gram block,
/// an extra column `−Σ_{h≥1} Q_{t'}(η_a^{(h)}) Q̄_t(η_a^{(h−1)}) d(η_a^{(h)})`,
/// a last row
/// `Σ_{h=0}^{2s_n−1} t^{(h/2)}(η_n + (s_n − h/2)η)·t'^{(s_n−(h+1)/2)}(η_n^{(s_n+h/2)})·(η_n^{(h)})^b`
/// and the corner `−½ Σ_h coef_h·t(η_n^{(h)})`, all of the last row scaled
/// by the same prefactor as for `S^-`.
pub fn form_factor_sz(spec: &ChainSpec, t: &SolvedEigen, tp: &SolvedEigen, n: usize) -> Result<C64> {
    spec.check_site(n)?;
    let sites = spec.n();
    let two_s = spec.spin(n).twice() as i64;
    let pref = prefactor(spec, &t.t, &tp.t, n)?;
    let gram = gram_matrix(spec, &t.qbar.values, &tp.q.values, sites);
    let column: Vec<C64> = (0..sites)
        .map(|a| {
            let sum: C64 = (1..spec.spin(a).dim())
                .map(|h| {
                    let d = spec.d_at(a, spec.grid_offset(a, h as i64));
                    tp.q.values[a][h] * t.qbar.values[a][h - 1] * d
                })
                .sum();
            -sum
        })
        .collect();
    let coefs: Vec<(C64, usize)> = (0..two_s)
        .map(|h| {
            let left = t.t.fused(spec, h as u32, spec.point(n, two_s - h));
            let right = tp.t.fused(spec, (two_s - h - 1) as u32, spec.point(n, -h - 1));
            (left * right, h as usize)
        })
        .collect();
    let corner: C64 = coefs.iter().map(|&(c, h)| c * t.t.at_grid(n, h)).sum::<C64>() * -0.5;
    let m = ComplexMatrix::from_fn(sites + 1, sites + 1, |a, b| match (a < sites, b < sites) {
        (true, true) => gram[(a, b)],
        (true, false) => column[a],
        (false, true) => coefs
            .iter()
            .map(|&(c, h)| c * spec.grid_point(n, h as i64).powu(b as u32))
            .sum(),
        (false, false) => corner,
    });
    Ok(pref * m.det()?)
}

/// Dense `left · embed(x, n) · right`.
pub fn matrix_element_direct(
    spec: &ChainSpec,
    left: &[C64],
    right: &[C64],
    x: &ComplexMatrix,
    n: usize,
) -> Result<C64> {
    let op = embed(spec, x, n)?;
    Ok(pair(left, &op.apply(right)))
}

/// Readings of the fused-eigenvalue sum that the `S^z` formula relies on,
/// each compared with `2s_n t^{(s_n)}(η_n)`. Values are relative residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionIdentityDiagnostic {
    /// `Σ_{k=1}^{2s} t^{(s−k/2)}(η_n + kη/2)·t(η̄^{(k)})·t^{((k−1)/2)}(η̄^{(k/2)})`.
    pub reconstruction_order: f64,
    /// `Σ_{h=0}^{2s−1} t^{(h/2)}(η_n^{((h+1)/2)})·t(η_n^{(h)})·t^{(s−(h+1)/2)}(η_n^{(h/2+s)})`.
    pub half_label: f64,
    /// As `half_label` with the first factor `t^{(h)}`.
    pub integer_label: f64,
}

pub fn fusion_identity_diagnostic(spec: &ChainSpec, t: &EigenvalueFn, n: usize) -> FusionIdentityDiagnostic {
    let two_s = spec.spin(n).twice() as i64;
    let target = t.fused(spec, two_s as u32, spec.inhom()[n]) * two_s as f64;
    // η_n^{(X/2)} in half-units
    let grid_half = |x2: i64| spec.point(n, two_s - x2 - 1);
    let rel = |v: C64| (v - target).norm() / target.norm().max(f64::MIN_POSITIVE);
    let r1: C64 = (1..=two_s)
        .map(|k| {
            t.fused(spec, (two_s - k) as u32, spec.point(n, k))
                * t.eval(spec.shifted_grid_point(n, k))
                * t.fused(spec, (k - 1) as u32, spec.point(n, k - two_s - 1))
        })
        .sum();
    let literal = |first_twice: &dyn Fn(i64) -> u32| -> C64 {
        (0..two_s)
            .map(|h| {
                t.fused(spec, first_twice(h), grid_half(h + 1))
                    * t.at_grid(n, h as usize)
                    * t.fused(spec, (two_s - h - 1) as u32, grid_half(h + two_s))
            })
            .sum()
    };
    FusionIdentityDiagnostic {
        reconstruction_order: rel(r1),
        half_label: rel(literal(&|h| h as u32)),
        integer_label: rel(literal(&|h| 2 * h as u32)),
    }
}

/// Local operators with a determinant representation, plus a generic one.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalOp {
    SMinus(usize),
    SPlus(usize),
    SZ(usize),
    Other(ComplexMatrix, usize),
}

impl LocalOp {
    pub fn site(&self) -> usize {
        match self {
            LocalOp::SMinus(n) | LocalOp::SPlus(n) | LocalOp::SZ(n) | LocalOp::Other(_, n) => *n,
        }
    }

    pub fn local_matrix(&self, spec: &ChainSpec) -> ComplexMatrix {
        let g = |n: usize| SpinGenerators::new(spec.spin(n));
        match self {
            LocalOp::SMinus(n) => g(*n).sminus,
            LocalOp::SPlus(n) => g(*n).splus,
            LocalOp::SZ(n) => g(*n).sz,
            LocalOp::Other(x, _) => x.clone(),
        }
    }
}

/// `⟨t_i|X|t_j⟩`, by determinant where one exists (falling back to the
/// dense oracle at a pole), densely otherwise.
pub fn element(sol: &SolvedSpectrum, i: usize, j: usize, op: &LocalOp) -> Result<C64> {
    let spec = &sol.spec;
    let (t, tp) = (&sol.eigen[i], &sol.eigen[j]);
    let det = match op {
        LocalOp::SMinus(n) => Some(form_factor_sminus(spec, t, tp, *n)),
        LocalOp::SZ(n) => Some(form_factor_sz(spec, t, tp, *n)),
        _ => None,
    };
    match det {
        Some(Ok(v)) => Ok(v),
        Some(Err(Error::Pole { .. })) | None => {
            matrix_element_direct(spec, &t.left, &tp.right, &op.local_matrix(spec), op.site())
        }
        Some(Err(e)) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MPointOutcome {
    pub expansion: C64,
    pub direct: C64,
    /// `∏_j ‖x_j‖ · ‖⟨t|‖‖|t⟩‖ / |⟨t|t⟩|`, the natural size of the
    /// expectation value; floors the relative error when it vanishes.
    pub scale: f64,
}

impl MPointOutcome {
    pub fn rel_err(&self) -> f64 {
        (self.expansion - self.direct).norm() / self.direct.norm().max(self.scale).max(f64::MIN_POSITIVE)
    }
}

/// `⟨t|X_1⋯X_m|t⟩/⟨t|t⟩` expanded over the spectrum with weights
/// `1/⟨t_j|t_j⟩`, alongside the dense expectation value.
pub fn mpoint(sol: &SolvedSpectrum, i: usize, ops: &[LocalOp]) -> Result<MPointOutcome> {
    let spec = &sol.spec;
    let d = sol.len();
    let norms: Vec<C64> = (0..d).map(|k| eigen_scalar_product(spec, &sol.eigen[k], &sol.eigen[k])).collect();
    let scale = norms.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if norms.iter().any(|z| z.norm() <= 1e-13 * scale) {
        return Err(Error::DegenerateNorm);
    }
    let expansion = if ops.is_empty() {
        c64(1.0, 0.0)
    } else {
        // row vector over intermediate states, starting from ⟨t_i|
        let mut acc: Vec<C64> = (0..d).map(|k| if k == i { c64(1.0, 0.0) } else { c64(0.0, 0.0) }).collect();
        for (pos, op) in ops.iter().enumerate() {
            let last = pos + 1 == ops.len();
            let targets: Vec<usize> = if last { vec![i] } else { (0..d).collect() };
            let mut next = vec![c64(0.0, 0.0); d];
            for &k in &targets {
                let mut sum = c64(0.0, 0.0);
                for (j, &w) in acc.iter().enumerate() {
                    if w != c64(0.0, 0.0) {
                        sum += w * element(sol, j, k, op)?;
                    }
                }
                next[k] = sum / norms[k];
            }
            acc = next;
        }
        acc[i]
    };
    let e = &sol.eigen[i];
    let mut v = e.right.clone();
    for op in ops.iter().rev() {
        v = embed(spec, &op.local_matrix(spec), op.site())?.apply(&v);
    }
    let self_pair = pair(&e.left, &e.right);
    let direct = pair(&e.left, &v) / self_pair;
    let scale = ops.iter().map(|op| op.local_matrix(spec).operator_norm()).product::<f64>() * norm(&e.left)
        * norm(&e.right)
        / self_pair.norm();
    Ok(MPointOutcome { expansion, direct, scale })
}

/// Completeness sums for `⟨t|X²|t⟩/⟨t|t⟩` over intermediate eigenstates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumRule {
    /// `Σ_{t'} |⟨t|X|t'⟩|² / (|⟨t|t⟩|·|⟨t'|t'⟩|)`; meaningful in the Hermitian
    /// regimes, where `⟨t|` is a common multiple of `|t⟩†`.
    pub modulus: f64,
    /// `Σ_{t'} ⟨t|X|t'⟩⟨t'|X|t⟩ / (⟨t|t⟩⟨t'|t'⟩)`.
    pub bilinear: C64,
    /// Dense `⟨t|X²|t⟩/⟨t|t⟩`.
    pub direct: C64,
}

pub fn sum_rule(sol: &SolvedSpectrum, i: usize, op: &LocalOp) -> Result<SumRule> {
    let spec = &sol.spec;
    let norms: Vec<C64> = sol.eigen.iter().map(|e| eigen_scalar_product(spec, e, e)).collect();
    let mut modulus = 0.0;
    let mut bilinear = c64(0.0, 0.0);
    for j in 0..sol.len() {
        let there = element(sol, i, j, op)?;
        let back = element(sol, j, i, op)?;
        modulus += there.norm_sqr() / (norms[i].norm() * norms[j].norm());
        bilinear += there * back / (norms[i] * norms[j]);
    }
    let direct = mpoint(sol, i, &[op.clone(), op.clone()])?.direct;
    Ok(SumRule { modulus, bilinear, direct })
}

/// `Σ_t |t⟩⟨t| / ⟨t|t⟩`, which should be the identity.
pub fn resolution_of_identity(sol: &SolvedSpectrum) -> ComplexMatrix {
    let dim = sol.spec.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for e in &sol.eigen {
        let w = eigen_scalar_product(&sol.spec, e, e).inv();
        let outer = ComplexMatrix::from_fn(dim, dim, |a, b| e.right[a] * e.left[b] * w);
        out = &out + &outer;
    }
    out
}

/// One row of a form-factor table. Sites are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct FormFactorRow {
    pub site: usize,
    pub operator: &'static str,
    pub t_index: usize,
    pub tp_index: usize,
    pub value: Option<C64>,
    pub oracle: C64,
    /// `|value − oracle| / max(|oracle|, ‖⟨t|‖·‖|t'⟩‖)`.
    pub rel_err: f64,
    pub error: Option<String>,
}

/// Every `(site, operator, t, t')` combination for `S^-` and `S^z`.
pub fn formfactor_table(sol: &SolvedSpectrum) -> Result<Vec<FormFactorRow>> {
    let spec = &sol.spec;
    let mut rows = Vec::new();
    for (name, is_minus) in [("S-", true), ("Sz", false)] {
        for n in 0..spec.n() {
            let g = SpinGenerators::new(spec.spin(n));
            let local = if is_minus { &g.sminus } else { &g.sz };
            let op = embed(spec, local, n)?;
            for (i, t) in sol.eigen.iter().enumerate() {
                for (j, tp) in sol.eigen.iter().enumerate() {
                    let oracle = pair(&t.left, &op.apply(&tp.right));
                    let result = if is_minus {
                        form_factor_sminus(spec, t, tp, n)
                    } else {
                        form_factor_sz(spec, t, tp, n)
                    };
                    let bound = norm(&t.left) * norm(&tp.right);
                    let (value, rel_err, error) = match result {
                        Ok(v) => (Some(v), (v - oracle).norm() / oracle.norm().max(bound), None),
                        Err(e) => (None, f64::NAN, Some(e.to_string())),
                    };
                    rows.push(FormFactorRow {
                        site: n + 1,
                        operator: name,
                        t_index: i,
                        tp_index: j,
                        value,
                        oracle,
                        rel_err,
                        error,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "n,operator,t_index,t'_index,re,im,oracle_re,oracle_im,rel_err";

/// CSV with 17 significant digits; rows that hit a pole carry empty value
/// fields.
pub fn formfactor_csv(rows: &[FormFactorRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (re, im) = match r.value {
            Some(v) => (fmt17(v.re), fmt17(v.im)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.site,
            r.operator,
            r.t_index,
            r.tp_index,
            re,
            im,
            fmt17(r.oracle.re),
            fmt17(r.oracle.im),
            fmt17(r.rel_err)
        ));
    }
    out
}
