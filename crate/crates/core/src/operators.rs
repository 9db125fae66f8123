//! Lax and R matrices, the monodromy matrix, twisted and fused transfer
//! matrices, symmetry operators and the homogeneous Hamiltonian.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::linalg::{apply_site_left, c64, embed_site_operator, ComplexMatrix, Polynomial, C64};
use crate::model::{ChainSpec, Spin};

/// Largest condition number accepted when a matrix must be inverted.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinGenerators {
    pub spin: Spin,
    pub sz: ComplexMatrix,
    pub splus: ComplexMatrix,
    pub sminus: ComplexMatrix,
    /// Antidiagonal of ones.
    pub sigma_x: ComplexMatrix,
}

impl SpinGenerators {
    pub fn new(spin: Spin) -> Self {
        let two_s = spin.twice() as usize;
        let dim = two_s + 1;
        let s = spin.value();
        let sz = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i == j { c64(s - i as f64, 0.0) } else { c64(0.0, 0.0) }
        });
        let splus = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                c64(((j * (two_s + 1 - j)) as f64).sqrt(), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let sminus = splus.transpose();
        let sigma_x = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i + j == two_s { c64(1.0, 0.0) } else { c64(0.0, 0.0) }
        });
        Self { spin, sz, splus, sminus, sigma_x }
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.spin.dim())
    }
}

/// `x` on site `n` of the chain.
pub fn embed(spec: &ChainSpec, x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    embed_site_operator(x, n, &spec.dims())
}

/// A 2×2 auxiliary-space block of operators.
pub type Blocks = [[ComplexMatrix; 2]; 2];

/// Lax operator `[[λ + η(1/2 + S^z), η S^-], [η S^+, λ + η(1/2 − S^z)]]` on
/// a single spin.
#[derive(Clone, Debug, PartialEq)]
pub struct Lax {
    pub blocks: Blocks,
}

impl Lax {
    pub fn new(spin: Spin, eta: C64, lambda: C64) -> Self {
        let g = SpinGenerators::new(spin);
        let id = g.identity();
        let diag = |sign: f64| {
            let shifted = &id.scale(c64(0.5, 0.0)) + &g.sz.scale(c64(sign, 0.0));
            &id.scale(lambda) + &shifted.scale(eta)
        };
        Self {
            blocks: [
                [diag(1.0), g.sminus.scale(eta)],
                [g.splus.scale(eta), diag(-1.0)],
            ],
        }
    }

    /// Dense form on `C² ⊗ V`, auxiliary index slowest.
    pub fn to_matrix(&self) -> ComplexMatrix {
        blocks_to_matrix(&self.blocks)
    }
}

pub fn blocks_to_matrix(b: &Blocks) -> ComplexMatrix {
    let d = b[0][0].rows();
    ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| b[i / d][j / d][(i % d, j % d)])
}

/// Lax operator of site `n` at the bare argument `lambda` (no inhomogeneity
/// shift).
pub fn lax(spec: &ChainSpec, n: usize, lambda: C64) -> Result<Lax> {
    spec.check_site(n)?;
    Ok(Lax::new(spec.spin(n), spec.eta(), lambda))
}

/// Rational six-vertex R-matrix.
pub fn r_matrix(lambda: C64, eta: C64) -> ComplexMatrix {
    let z = c64(0.0, 0.0);
    let p = lambda + eta;
    ComplexMatrix::from_rows(&[
        vec![p, z, z, z],
        vec![z, lambda, eta, z],
        vec![z, eta, lambda, z],
        vec![z, z, z, p],
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyBlocks {
    pub lambda: C64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl MonodromyBlocks {
    pub fn blocks(&self) -> Blocks {
        [[self.a.clone(), self.b.clone()], [self.c.clone(), self.d.clone()]]
    }

    pub fn entry(&self, i: usize, j: usize) -> &ComplexMatrix {
        match (i, j) {
            (0, 0) => &self.a,
            (0, 1) => &self.b,
            (1, 0) => &self.c,
            _ => &self.d,
        }
    }
}

/// `M(λ) = L_N(λ − η_N) ⋯ L_1(λ − η_1)`.
pub fn monodromy(spec: &ChainSpec, lambda: C64) -> MonodromyBlocks {
    let dims = spec.dims();
    let dim = spec.dim();
    let id = ComplexMatrix::identity(dim);
    let zero = ComplexMatrix::zeros(dim, dim);
    let mut m: Blocks = [[id.clone(), zero.clone()], [zero, id]];
    for n in 0..spec.n() {
        let l = Lax::new(spec.spin(n), spec.eta(), lambda - spec.inhom()[n]);
        let apply = |x: &ComplexMatrix, y: &ComplexMatrix| {
            apply_site_left(x, n, &dims, y).expect("lax blocks match site dimension")
        };
        let next: Blocks = std::array::from_fn(|i| {
            std::array::from_fn(|j| &apply(&l.blocks[i][0], &m[0][j]) + &apply(&l.blocks[i][1], &m[1][j]))
        });
        m = next;
    }
    let [[a, b], [c, d]] = m;
    MonodromyBlocks { lambda, a, b, c, d }
}

/// Invertible 2×2 twist matrix `W`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    w: [[C64; 2]; 2],
}

impl Twist {
    pub fn new(w: [[C64; 2]; 2]) -> Result<Self> {
        let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
        let scale = w.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 || det.norm() <= 1e-14 * scale * scale {
            return Err(Error::SingularTwist);
        }
        Ok(Self { w })
    }

    pub fn sigma_x() -> Self {
        let (o, z) = (c64(1.0, 0.0), c64(0.0, 0.0));
        Self { w: [[z, o], [o, z]] }
    }

    pub fn identity() -> Self {
        let (o, z) = (c64(1.0, 0.0), c64(0.0, 0.0));
        Self { w: [[o, z], [z, o]] }
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.w
    }

    pub fn det(&self) -> C64 {
        self.w[0][0] * self.w[1][1] - self.w[0][1] * self.w[1][0]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[self.w[0].to_vec(), self.w[1].to_vec()])
    }
}

/// `tr_0(W_0 M_0(λ))`.
pub fn transfer(spec: &ChainSpec, lambda: C64, twist: &Twist) -> ComplexMatrix {
    transfer_from(&monodromy(spec, lambda), twist)
}

pub fn transfer_from(m: &MonodromyBlocks, twist: &Twist) -> ComplexMatrix {
    let w = twist.entries();
    let mut out = ComplexMatrix::zeros(m.a.rows(), m.a.cols());
    for i in 0..2 {
        for j in 0..2 {
            if w[i][j] != c64(0.0, 0.0) {
                out = &out + &m.entry(j, i).scale(w[i][j]);
            }
        }
    }
    out
}

/// Antiperiodic transfer matrix `T̄(λ) = B(λ) + C(λ)`.
pub fn antiperiodic_transfer(spec: &ChainSpec, lambda: C64) -> ComplexMatrix {
    let m = monodromy(spec, lambda);
    &m.b + &m.c
}

/// Periodic transfer matrix `T(λ) = A(λ) + D(λ)`.
pub fn periodic_transfer(spec: &ChainSpec, lambda: C64) -> ComplexMatrix {
    let m = monodromy(spec, lambda);
    &m.a + &m.d
}

/// `qdetbar(λ) = a(λ) d(λ − η)`.
pub fn qdetbar(spec: &ChainSpec, lambda: C64) -> C64 {
    spec.qdetbar(lambda)
}

/// The operator `B(λ)C(λ−η) − A(λ)D(λ−η)`, which is `qdetbar(λ)·Id`.
pub fn qdet_operator(spec: &ChainSpec, lambda: C64) -> ComplexMatrix {
    let m = monodromy(spec, lambda);
    let s = monodromy(spec, lambda - spec.eta());
    &(&m.b * &s.c) - &(&m.a * &s.d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Twist `σ^x`: `T̄ = B + C`.
    Antiperiodic,
    /// No twist: `T = A + D`.
    Periodic,
}

impl Boundary {
    /// Sign relating the twisted quantum determinant to `qdetbar`
    /// (`det W` times the untwisted one, which is `−qdetbar`).
    fn qdet_sign(self) -> f64 {
        match self {
            Boundary::Antiperiodic => 1.0,
            Boundary::Periodic => -1.0,
        }
    }
}

type CacheKey = (Boundary, u32, u64, u64);

/// Fused transfer matrices with a build-once cache.
///
/// The recursion is
/// `T^{(s)}(λ) = T(λ⁻ + sη)·T^{(s−1/2)}(λ⁻) − q(λ⁻ + sη)·T^{(s−1)}(λ − η)`,
/// `λ⁻ = λ − η/2`, with `q = qdetbar` (antiperiodic) or `−qdetbar`
/// (periodic). The determinant sits at the point where the product of the
/// two spin-1/2 factors carries the auxiliary singlet.
#[derive(Debug)]
pub struct TransferFamily {
    spec: ChainSpec,
    cache: Mutex<HashMap<CacheKey, Arc<ComplexMatrix>>>,
}

impl Clone for TransferFamily {
    fn clone(&self) -> Self {
        Self::new(self.spec.clone())
    }
}

impl TransferFamily {
    pub fn new(spec: ChainSpec) -> Self {
        Self { spec, cache: Mutex::new(HashMap::new()) }
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    /// `T̄^{(s)}(λ)` with `two_s = 2s`.
    pub fn fused(&self, two_s: u32, lambda: C64) -> Arc<ComplexMatrix> {
        self.fused_with(Boundary::Antiperiodic, two_s, lambda)
    }

    /// Periodic `T^{(s)}(λ)`.
    pub fn fused_periodic(&self, two_s: u32, lambda: C64) -> Arc<ComplexMatrix> {
        self.fused_with(Boundary::Periodic, two_s, lambda)
    }

    pub fn fused_with(&self, boundary: Boundary, two_s: u32, lambda: C64) -> Arc<ComplexMatrix> {
        let key = (boundary, two_s, (lambda.re + 0.0).to_bits(), (lambda.im + 0.0).to_bits());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Arc::clone(hit);
        }
        let value = Arc::new(self.compute(boundary, two_s, lambda));
        let mut cache = self.cache.lock().expect("cache poisoned");
        Arc::clone(cache.entry(key).or_insert(value))
    }

    fn compute(&self, boundary: Boundary, two_s: u32, lambda: C64) -> ComplexMatrix {
        let spec = &self.spec;
        match two_s {
            0 => ComplexMatrix::identity(spec.dim()),
            1 => match boundary {
                Boundary::Antiperiodic => antiperiodic_transfer(spec, lambda),
                Boundary::Periodic => periodic_transfer(spec, lambda),
            },
            _ => {
                let eta = spec.eta();
                let lm = lambda - eta * 0.5;
                let top = lm + eta * (two_s as f64 * 0.5);
                let first = self.fused_with(boundary, 1, top);
                let second = self.fused_with(boundary, two_s - 1, lm);
                let third = self.fused_with(boundary, two_s - 2, lambda - eta);
                let q = spec.qdetbar(top) * boundary.qdet_sign();
                &(&*first * &*second) - &third.scale(q)
            }
        }
    }
}

/// `T̄^{(s)}(λ)` for a half-integer `s ≥ 0`.
pub fn fused_transfer(spec: &ChainSpec, s: f64, lambda: C64) -> Result<ComplexMatrix> {
    let two_s = 2.0 * s;
    if !(two_s >= 0.0) || two_s.fract() != 0.0 || two_s > u32::MAX as f64 {
        return Err(Error::InvalidFusion(two_s));
    }
    Ok((*TransferFamily::new(spec.clone()).fused(two_s as u32, lambda)).clone())
}

/// Scalar fused recursion applied to a function `t`, giving the eigenvalue
/// of `T̄^{(s)}(λ)` on a common eigenvector whose `T̄` eigenvalue is `t`.
pub fn fused_scalar(spec: &ChainSpec, two_s: u32, lambda: C64, t: &dyn Fn(C64) -> C64) -> C64 {
    let eta = spec.eta();
    let mut cache: HashMap<(u32, u64, u64), C64> = HashMap::new();
    fn go(
        spec: &ChainSpec,
        eta: C64,
        two_s: u32,
        lambda: C64,
        t: &dyn Fn(C64) -> C64,
        cache: &mut HashMap<(u32, u64, u64), C64>,
    ) -> C64 {
        match two_s {
            0 => return c64(1.0, 0.0),
            1 => return t(lambda),
            _ => {}
        }
        let key = (two_s, (lambda.re + 0.0).to_bits(), (lambda.im + 0.0).to_bits());
        if let Some(&v) = cache.get(&key) {
            return v;
        }
        let lm = lambda - eta * 0.5;
        let top = lm + eta * (two_s as f64 * 0.5);
        let v = t(top) * go(spec, eta, two_s - 1, lm, t, cache)
            - spec.qdetbar(top) * go(spec, eta, two_s - 2, lambda - eta, t, cache);
        cache.insert(key, v);
        v
    }
    go(spec, eta, two_s, lambda, t, &mut cache)
}

/// `⊗_n Σ^x_n`.
pub fn global_flip(spec: &ChainSpec) -> ComplexMatrix {
    let dim = spec.dim();
    let dims = spec.dims();
    // Σ^x maps local index k to 2s − k on every site.
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let mut rest = i;
        let mut stride = 1;
        let mut j = 0;
        for &d in &dims {
            let k = rest % d;
            rest /= d;
            j += (d - 1 - k) * stride;
            stride *= d;
        }
        out[(j, i)] = c64(1.0, 0.0);
    }
    out
}

/// `Σ^x` embedded at site `n`.
pub fn site_flip(spec: &ChainSpec, n: usize) -> Result<ComplexMatrix> {
    spec.check_site(n)?;
    embed(spec, &SpinGenerators::new(spec.spin(n)).sigma_x, n)
}

/// `U = ⊗_n exp(iπ S^z_n)`; conjugation by `U` flips the sign of `T̄`.
pub fn parity_conjugator(spec: &ChainSpec) -> ComplexMatrix {
    let phases = [c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0), c64(0.0, -1.0)];
    let dims = spec.dims();
    let diag: Vec<C64> = (0..spec.dim())
        .map(|i| {
            let mut rest = i;
            let mut phase = c64(1.0, 0.0);
            for (n, &d) in dims.iter().enumerate() {
                let k = (rest % d) as i64;
                rest /= d;
                // exp(iπm) = i^{2m} with 2m = 2s − 2k
                let two_m = spec.spin(n).twice() as i64 - 2 * k;
                phase *= phases[two_m.rem_euclid(4) as usize];
            }
            phase
        })
        .collect();
    ComplexMatrix::from_diag(&diag)
}

/// `H = T̄^{(s)}(0)^{-1} · dT̄^{(s)}/dλ(0)` for a homogeneous chain of spin `s`,
/// with the derivative taken from the exact interpolant on `2sN + 1` nodes.
pub fn hamiltonian(spec: &ChainSpec) -> Result<ComplexMatrix> {
    let spin = spec.spin(0);
    if spec.spins().iter().any(|&s| s != spin)
        || spec.inhom().iter().any(|z| *z != c64(0.0, 0.0))
    {
        return Err(Error::Config("the Hamiltonian needs a homogeneous chain".into()));
    }
    let family = TransferFamily::new(spec.clone());
    let two_s = spin.twice();
    let k = two_s as usize * spec.n() + 1;
    let nodes: Vec<C64> = (0..k).map(|j| c64(0.5 * j as f64 - 0.25 * (k - 1) as f64, 0.0)).collect();
    let mut derivative = ComplexMatrix::zeros(spec.dim(), spec.dim());
    for (j, &x) in nodes.iter().enumerate() {
        let mut unit = vec![c64(0.0, 0.0); k];
        unit[j] = c64(1.0, 0.0);
        let weight = if k > 1 { Polynomial::from_samples(&nodes, &unit)?.coeffs()[1] } else { c64(0.0, 0.0) };
        derivative = &derivative + &family.fused(two_s, x).scale(weight);
    }
    let at_zero = family.fused(two_s, c64(0.0, 0.0));
    let (inv, _) = at_zero.inverse_conditioned(MAX_CONDITION)?;
    Ok(&inv * &derivative)
}
