//! Left and right SOV bases: the eigenbases of `D(λ)`.
//!
//! A basis state is labelled by `h = (h_1, …, h_N)`, `0 ≤ h_n ≤ 2s_n`. The
//! labels are enumerated in the same order as the computational basis
//! (site 0 fastest), so `flat_index` doubles as a position in either.

use crate::error::Result;
use crate::linalg::{c64, pair, ComplexMatrix, C64};
use crate::model::ChainSpec;
use crate::operators::monodromy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// All labels `h`, in flat-index order.
pub fn h_indices(spec: &ChainSpec) -> Vec<Vec<usize>> {
    let dims = spec.dims();
    (0..spec.dim())
        .map(|mut i| {
            dims.iter()
                .map(|&d| {
                    let k = i % d;
                    i /= d;
                    k
                })
                .collect()
        })
        .collect()
}

pub fn flat_index(spec: &ChainSpec, h: &[usize]) -> usize {
    h.iter()
        .zip(spec.dims())
        .rev()
        .fold(0, |acc, (&k, d)| acc * d + k)
}

/// `η_a^{(h_a)} − η_b^{(h_b)}` from exact site differences.
fn grid_diff(spec: &ChainSpec, a: usize, ha: usize, b: usize, hb: usize) -> C64 {
    spec.point_diff(a, spec.grid_offset(a, ha as i64), b, spec.grid_offset(b, hb as i64))
}

/// `μ(h) = ∏_{b<a} (η_a^{(h_a)} − η_b^{(h_b)})`.
pub fn vandermonde_weight(spec: &ChainSpec, h: &[usize]) -> C64 {
    let mut w = c64(1.0, 0.0);
    for a in 0..h.len() {
        for b in 0..a {
            w *= grid_diff(spec, a, h[a], b, h[b]);
        }
    }
    w
}

/// `⟨h|k⟩ = δ_{h,k} / μ(h)`.
pub fn sov_overlap(spec: &ChainSpec, h: &[usize], k: &[usize]) -> C64 {
    if h == k {
        vandermonde_weight(spec, h).inv()
    } else {
        c64(0.0, 0.0)
    }
}

/// `d_h(λ) = ∏_n (λ − η_n^{(h_n)})`.
pub fn d_eigenvalue(spec: &ChainSpec, h: &[usize], lambda: C64) -> C64 {
    h.iter()
        .enumerate()
        .fold(c64(1.0, 0.0), |acc, (n, &k)| acc * (lambda - spec.grid_point(n, k as i64)))
}

/// `∏_{b<a} (η_a^{(0)} − η_b^{(0)})^{1/2}` (principal branch).
pub fn normalization(spec: &ChainSpec) -> C64 {
    let mut nrm = c64(1.0, 0.0);
    for a in 0..spec.n() {
        for b in 0..a {
            nrm *= grid_diff(spec, a, 0, b, 0).sqrt();
        }
    }
    nrm
}

/// Lagrange factor `∏_{b≠a} (λ − η_b^{(h_b)}) / (η_a^{(h_a)} − η_b^{(h_b)})`.
fn lagrange(spec: &ChainSpec, h: &[usize], a: usize, lambda: C64) -> C64 {
    (0..h.len()).filter(|&b| b != a).fold(c64(1.0, 0.0), |acc, b| {
        acc * (lambda - spec.grid_point(b, h[b] as i64)) / grid_diff(spec, a, h[a], b, h[b])
    })
}

/// Which monodromy entry a predicted action refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Raising {
    B,
    C,
}

/// Predicted SOV expansion of `X(λ)|h⟩` (right side) or `⟨h|X(λ)` (left
/// side) for `X ∈ {B, C}`, as a list of `(target label, coefficient)`.
/// Terms whose shifted label falls outside the range are dropped; their
/// coefficients vanish on the boundary.
pub fn predicted_action(
    spec: &ChainSpec,
    side: Side,
    op: Raising,
    h: &[usize],
    lambda: C64,
) -> Vec<(Vec<usize>, C64)> {
    let mut out = Vec::new();
    for a in 0..h.len() {
        let two_s = spec.spin(a).twice() as usize;
        let ha = h[a] as i64;
        let off = |k: i64| spec.grid_offset(a, k);
        // (step, scalar) per the right/left D-representation
        let (step, scalar): (i64, C64) = match (side, op) {
            (Side::Right, Raising::C) => (-1, spec.d_at(a, off(ha))),
            (Side::Right, Raising::B) => (1, spec.a_at(a, off(ha))),
            (Side::Left, Raising::C) => {
                let beta = if h[a] == two_s { two_s as i64 + 1 } else { 0 };
                (1, spec.d_at(a, off(ha + 1 - beta)))
            }
            (Side::Left, Raising::B) => {
                let alpha = if h[a] == 0 { two_s as i64 + 1 } else { 0 };
                (-1, spec.a_at(a, off(ha - 1 + alpha)))
            }
        };
        let target = ha + step;
        if target < 0 || target > two_s as i64 {
            continue;
        }
        let mut k = h.to_vec();
        k[a] = target as usize;
        out.push((k, lagrange(spec, h, a, lambda) * scalar));
    }
    out
}

/// Both SOV bases of a separable chain, stored densely.
#[derive(Clone, Debug)]
pub struct SovBasis {
    spec: ChainSpec,
    indices: Vec<Vec<usize>>,
    weights: Vec<C64>,
    nrm: C64,
    right: Vec<Vec<C64>>,
    left: Vec<Vec<C64>>,
}

impl SovBasis {
    /// `|h⟩ = (1/nrm) ∏_n ∏_{k<h_n} B(η_n^{(k)})/a(η_n^{(k)}) |0⟩` and
    /// `⟨h| = (1/nrm) ⟨0| ∏_n ∏_{k<h_n} C(η_n^{(k)})/d(η_n^{(k+1)})`,
    /// factors applied in increasing `k`, sites in increasing `n`.
    pub fn build(spec: &ChainSpec) -> Result<Self> {
        spec.require_separable()?;
        let dim = spec.dim();
        let n_sites = spec.n();
        // B(η_n^{(k)})/a(η_n^{(k)}) and C(η_n^{(k)})/d(η_n^{(k+1)}) per (n, k)
        let mut raise_b = Vec::with_capacity(n_sites);
        let mut raise_c = Vec::with_capacity(n_sites);
        for n in 0..n_sites {
            let two_s = spec.spin(n).twice() as i64;
            let mut bs = Vec::new();
            let mut cs = Vec::new();
            for k in 0..two_s {
                let m = monodromy(spec, spec.grid_point(n, k));
                let a = spec.a_at(n, spec.grid_offset(n, k));
                let d = spec.d_at(n, spec.grid_offset(n, k + 1));
                assert!(a != c64(0.0, 0.0) && d != c64(0.0, 0.0), "separable chain has nonzero divisors");
                bs.push(m.b.scale(a.inv()));
                cs.push(m.c.scale(d.inv()));
            }
            raise_b.push(bs);
            raise_c.push(cs);
        }
        let nrm = normalization(spec);
        let indices = h_indices(spec);
        let mut reference = vec![c64(0.0, 0.0); dim];
        reference[0] = nrm.inv();
        let mut right = Vec::with_capacity(dim);
        let mut left = Vec::with_capacity(dim);
        for h in &indices {
            let mut v = reference.clone();
            let mut w = reference.clone();
            for n in 0..n_sites {
                for k in 0..h[n] {
                    v = raise_b[n][k].apply(&v);
                    w = raise_c[n][k].apply_left(&w);
                }
            }
            right.push(v);
            left.push(w);
        }
        let weights = indices.iter().map(|h| vandermonde_weight(spec, h)).collect();
        Ok(Self { spec: spec.clone(), indices, weights, nrm, right, left })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn normalization(&self) -> C64 {
        self.nrm
    }

    /// `μ(h)` for the state at flat index `i`.
    pub fn weight(&self, i: usize) -> C64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn state(&self, side: Side, i: usize) -> &[C64] {
        match side {
            Side::Left => &self.left[i],
            Side::Right => &self.right[i],
        }
    }

    /// Right states as columns.
    pub fn right_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.right)
    }

    /// Left states as rows.
    pub fn left_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&self.left)
    }

    /// SOV coefficients: `v = Σ_h c_h |h⟩` with `c_h = μ(h)⟨h|v⟩`
    /// (right), or `w = Σ_h c_h ⟨h|` with `c_h = μ(h) w|h⟩` (left).
    pub fn to_sov(&self, v: &[C64], side: Side) -> Vec<C64> {
        let dual = match side {
            Side::Right => &self.left,
            Side::Left => &self.right,
        };
        dual.iter().zip(&self.weights).map(|(u, &mu)| mu * pair(u, v)).collect()
    }

    pub fn from_sov(&self, coeffs: &[C64], side: Side) -> Vec<C64> {
        let states = match side {
            Side::Right => &self.right,
            Side::Left => &self.left,
        };
        let mut out = vec![c64(0.0, 0.0); self.spec.dim()];
        for (state, &c) in states.iter().zip(coeffs) {
            if c == c64(0.0, 0.0) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(state) {
                *o += c * x;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::Spin;

    fn one_site() -> ChainSpec {
        ChainSpec::new(vec![Spin::HALF], c64(0.0, 1.0), vec![c64(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn one_site_states() {
        let basis = SovBasis::build(&one_site()).unwrap();
        assert_eq!(basis.state(Side::Right, 0), &[c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(basis.state(Side::Right, 1), &[c64(0.0, 0.0), c64(-1.0, 0.0)]);
        assert_eq!(basis.state(Side::Left, 1), &[c64(0.0, 0.0), c64(-1.0, 0.0)]);
    }

    #[test]
    fn index_enumeration() {
        let spec = ChainSpec::benchmark(&[Spin::HALF, Spin::ONE]);
        let idx = h_indices(&spec);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx[1], vec![1, 0]);
        assert_eq!(idx[2], vec![0, 1]);
        for (i, h) in idx.iter().enumerate() {
            assert_eq!(flat_index(&spec, h), i);
        }
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(sov_overlap(&one_site(), &[1], &[1]), c64(1.0, 0.0));
        let spec = ChainSpec::new(
            vec![Spin::HALF; 2],
            c64(0.0, 1.0),
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        )
        .unwrap();
        assert!((sov_overlap(&spec, &[0, 0], &[0, 0]) - c64(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(sov_overlap(&spec, &[0, 1], &[1, 0]), c64(0.0, 0.0));
    }

    #[test]
    fn reference_state_coefficients() {
        let spec = ChainSpec::benchmark(&[Spin::HALF, Spin::ONE]);
        let basis = SovBasis::build(&spec).unwrap();
        let mut v = vec![c64(0.0, 0.0); spec.dim()];
        v[0] = c64(1.0, 0.0);
        let c = basis.to_sov(&v, Side::Right);
        let scaled: Vec<C64> = c.iter().map(|x| x / basis.normalization()).collect();
        // |0⟩ = nrm·|h=0⟩
        assert!((scaled[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(max_abs(&scaled[1..]) < 1e-12);
        let back = basis.from_sov(&c, Side::Right);
        assert!(max_abs(&back.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
    }

    #[test]
    fn homogeneous_chain_is_refused() {
        let spec = ChainSpec::homogeneous(Spin::HALF, 2, c64(0.0, 1.0)).unwrap();
        assert!(SovBasis::build(&spec).is_err());
    }
}
