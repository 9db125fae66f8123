//! Dense complex matrices, LU factorisation, a Hermitian eigensolver and
//! polynomial interpolation.
//!
//! Everything here works on small dense problems (dimension up to a few
//! hundred). Matrices are stored row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative threshold below which a polynomial coefficient counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product `self ⊗ other`; `other`'s index varies fastest.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let gram = &self.adjoint() * self;
        match gram.eig_hermitian() {
            Ok(eig) => eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
            Err(_) => self.frobenius_norm(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `self · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Covector action `w · self`.
    pub fn apply_left(&self, w: &[C64]) -> Vec<C64> {
        assert_eq!(w.len(), self.rows, "covector length mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if wi == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += wi * a;
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn det(&self) -> Result<C64> {
        Ok(self.lu()?.det())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.lu()?.inverse()
    }

    /// Inverse together with its 1-norm condition number; fails when the
    /// condition number exceeds `max_cond`.
    pub fn inverse_conditioned(&self, max_cond: f64) -> Result<(Self, f64)> {
        let inv = self.inverse()?;
        let cond = self.norm_1() * inv.norm_1();
        if !cond.is_finite() || cond > max_cond {
            return Err(Error::Singular { cond });
        }
        Ok((inv, cond))
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn eig_hermitian(&self) -> Result<HermitianEigen> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "eigen-decomposition of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if !self.is_hermitian(1e-10) {
            return Err(Error::NotHermitian);
        }
        let n = self.rows;
        let m = DMatrix::from_row_slice(n, n, &self.data);
        let eig = nalgebra::linalg::SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(HermitianEigen { values, vectors })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

/// LU factorisation with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.rows == 0 {
            return Err(Error::Dimension(format!(
                "LU of a {}x{} matrix",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu, perm, sign })
    }

    pub fn det(&self) -> C64 {
        let n = self.n;
        (0..n).fold(C64::new(self.sign, 0.0), |acc, i| acc * self.lu[i * n + i])
    }

    fn is_singular(&self) -> bool {
        (0..self.n).any(|i| self.lu[i * self.n + i] == C64::new(0.0, 0.0))
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        if self.is_singular() {
            return Err(Error::Singular { cond: f64::INFINITY });
        }
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            cols.push(self.solve(&e)?);
        }
        Ok(ComplexMatrix::from_columns(&cols))
    }
}

/// Lifts a local operator on site `n` to the tensor product with local
/// dimensions `dims`. Site 0 is the fastest-varying index, i.e. the full
/// space is `V_{N−1} ⊗ … ⊗ V_0` in Kronecker order.
pub fn embed_site_operator(x: &ComplexMatrix, n: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    check_site_operator(x, n, dims)?;
    let total: usize = dims.iter().product();
    let stride: usize = dims[..n].iter().product();
    let d = dims[n];
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        let ki = (i / stride) % d;
        let base = i - ki * stride;
        for kj in 0..d {
            out[(i, base + kj * stride)] = x[(ki, kj)];
        }
    }
    Ok(out)
}

/// `embed(x, n) · m` without forming the embedded operator.
pub fn apply_site_left(
    x: &ComplexMatrix,
    n: usize,
    dims: &[usize],
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_site_operator(x, n, dims)?;
    let total: usize = dims.iter().product();
    if m.rows != total {
        return Err(Error::Dimension(format!("{} rows, expected {total}", m.rows)));
    }
    let stride: usize = dims[..n].iter().product();
    let d = dims[n];
    let cols = m.cols;
    let mut out = ComplexMatrix::zeros(total, cols);
    for i in 0..total {
        let ki = (i / stride) % d;
        let base = i - ki * stride;
        let dst = &mut out.data[i * cols..(i + 1) * cols];
        for kj in 0..d {
            let c = x[(ki, kj)];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, v) in dst.iter_mut().zip(m.row(base + kj * stride)) {
                *o += c * v;
            }
        }
    }
    Ok(out)
}

fn check_site_operator(x: &ComplexMatrix, n: usize, dims: &[usize]) -> Result<()> {
    if n >= dims.len() {
        return Err(Error::SiteOutOfRange { site: n + 1, n: dims.len() });
    }
    if x.rows != dims[n] || x.cols != dims[n] {
        return Err(Error::Dimension(format!(
            "site {} has dimension {}, operator is {}x{}",
            n + 1,
            dims[n],
            x.rows,
            x.cols
        )));
    }
    Ok(())
}

/// Sum of `a_i b_i` without conjugation (covector-vector pairing).
pub fn pair(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hermitian inner product `Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Polynomial `Σ_k c_k λ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Highest index whose coefficient exceeds `ZERO_THRESHOLD` times the
    /// largest coefficient magnitude; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > ZERO_THRESHOLD * scale)
    }

    /// `q(x) = p(x + c)`.
    pub fn shifted(&self, c: C64) -> Self {
        // repeated synthetic division (Taylor shift)
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = a[j + 1];
                a[j] += c * next;
            }
        }
        Self { coeffs: a }
    }

    /// Unique interpolant of degree `< nodes.len()` through the samples.
    pub fn from_samples(nodes: &[C64], values: &[C64]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::Dimension(format!(
                "{} nodes for {} values",
                nodes.len(),
                values.len()
            )));
        }
        let k = nodes.len();
        for i in 0..k {
            for j in 0..i {
                let scale = nodes[i].norm().max(nodes[j].norm()).max(1.0);
                if (nodes[i] - nodes[j]).norm() <= 1e-13 * scale {
                    return Err(Error::DegenerateNodes(i, j));
                }
            }
        }
        // Newton divided differences
        let mut dd = values.to_vec();
        for level in 1..k {
            for i in (level..k).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
            }
        }
        let mut coeffs = vec![dd[k - 1]];
        for i in (0..k - 1).rev() {
            // coeffs <- coeffs * (x - nodes[i]) + dd[i]
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (p, &c) in coeffs.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * nodes[i];
            }
            next[0] += dd[i];
            coeffs = next;
        }
        Ok(Self { coeffs })
    }
}
