//! Chain specification, the scalar functions `a`, `d`, and the separation grid.
//!
//! Sites are 0-based in the API; user-facing messages and file formats use
//! 1-based site labels.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SpecViolation};
use crate::json::F17;
use crate::linalg::{c64, C64};

/// A spin `s`, stored as the positive integer `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(two_s: u32) -> Option<Self> {
        (two_s > 0).then_some(Self(two_s))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Local dimension `2s + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn label(self) -> String {
        if self.0 % 2 == 0 {
            (self.0 / 2).to_string()
        } else {
            format!("{}/2", self.0)
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Spin {
    type Err = String;

    /// Accepts `"p/2"` or an integer `"p"`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let two_s = match s.split_once('/') {
            Some((p, "2")) => p.trim().parse::<u32>().ok(),
            Some(_) => None,
            None => s.parse::<u32>().ok().and_then(|p| p.checked_mul(2)),
        };
        two_s
            .and_then(Spin::from_twice)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `eta` purely imaginary, inhomogeneities real.
    ImaginaryEta,
    /// `eta` real, inhomogeneities purely imaginary.
    RealEta,
    Generic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ImaginaryEta => "imaginary-eta",
            Regime::RealEta => "real-eta",
            Regime::Generic => "generic",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = SpecViolation;
    fn from_str(s: &str) -> std::result::Result<Self, SpecViolation> {
        match s {
            "imaginary-eta" => Ok(Regime::ImaginaryEta),
            "real-eta" => Ok(Regime::RealEta),
            "generic" => Ok(Regime::Generic),
            other => Err(SpecViolation::UnknownRegime(other.to_string())),
        }
    }
}

/// Default real offset `x_0` of the Hermitian evaluation point.
pub const HERMITIAN_OFFSET: f64 = 0.1;

/// The physical chain. Construct through [`ChainSpec::new`] (fully
/// validated) or [`ChainSpec::homogeneous`] (operator-level use only).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    spins: Vec<Spin>,
    eta: C64,
    inhom: Vec<C64>,
    regime: Regime,
    separable: bool,
}

fn is_real(z: C64, scale: f64) -> bool {
    z.im.abs() <= 1e-14 * scale.max(1.0)
}

fn is_imag(z: C64, scale: f64) -> bool {
    z.re.abs() <= 1e-14 * scale.max(1.0)
}

impl ChainSpec {
    /// Validates and detects the regime.
    pub fn new(spins: Vec<Spin>, eta: C64, inhom: Vec<C64>) -> Result<Self> {
        Self::with_regime(spins, eta, inhom, None)
    }

    /// Validates against an explicitly declared regime (detected if `None`).
    pub fn with_regime(
        spins: Vec<Spin>,
        eta: C64,
        inhom: Vec<C64>,
        declared: Option<Regime>,
    ) -> Result<Self> {
        let mut v = Vec::new();
        Self::check_basic(&spins, eta, &inhom, &mut v);
        if v.is_empty() {
            Self::check_sov(&spins, eta, &inhom, &mut v);
        }
        let detected = detect_regime(eta, &inhom);
        let regime = match declared {
            None => detected,
            Some(Regime::Generic) => Regime::Generic,
            Some(r) if r == detected => r,
            Some(r) => {
                v.push(SpecViolation::RegimeMismatch {
                    declared: r,
                    reason: match r {
                        Regime::ImaginaryEta => "needs purely imaginary eta and real inhomogeneities",
                        _ => "needs real eta and purely imaginary inhomogeneities",
                    },
                });
                r
            }
        };
        if !v.is_empty() {
            return Err(Error::InvalidSpec(v));
        }
        Ok(Self { spins, eta, inhom, regime, separable: true })
    }

    /// Homogeneous chain (all inhomogeneities zero). This deliberately
    /// violates the separation condition for `N > 1`; use it only with
    /// operator-level routines.
    pub fn homogeneous(spin: Spin, n: usize, eta: C64) -> Result<Self> {
        let spins = vec![spin; n];
        let inhom = vec![c64(0.0, 0.0); n];
        let mut v = Vec::new();
        Self::check_basic(&spins, eta, &inhom, &mut v);
        if !v.is_empty() {
            return Err(Error::InvalidSpec(v));
        }
        let mut sov = Vec::new();
        Self::check_sov(&spins, eta, &inhom, &mut sov);
        let regime = detect_regime(eta, &inhom);
        Ok(Self { spins, eta, inhom, regime, separable: sov.is_empty() })
    }

    /// The default test chain: `eta = i`, `eta_n = n` (1-based).
    pub fn benchmark(spins: &[Spin]) -> Self {
        let inhom = (1..=spins.len()).map(|n| c64(n as f64, 0.0)).collect();
        Self::new(spins.to_vec(), c64(0.0, 1.0), inhom).expect("benchmark chain is valid")
    }

    /// Benchmark chain with `n` copies of `spin`.
    pub fn benchmark_uniform(spin: Spin, n: usize) -> Self {
        Self::benchmark(&vec![spin; n])
    }

    fn check_basic(spins: &[Spin], eta: C64, inhom: &[C64], v: &mut Vec<SpecViolation>) {
        if spins.is_empty() {
            v.push(SpecViolation::NoSites);
        }
        if spins.len() != inhom.len() {
            v.push(SpecViolation::SiteCountMismatch {
                declared: spins.len(),
                spins: spins.len(),
                inhom: inhom.len(),
            });
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !finite(&eta) || !inhom.iter().all(finite) {
            v.push(SpecViolation::NonFinite);
        } else if eta.norm() == 0.0 {
            v.push(SpecViolation::ZeroEta);
        }
    }

    fn check_sov(spins: &[Spin], eta: C64, inhom: &[C64], v: &mut Vec<SpecViolation>) {
        let s_max = spins.iter().map(|s| s.value()).fold(0.0, f64::max);
        let m_max = (4.0 * s_max).ceil() as i64;
        let tol = 1e-8 * eta.norm();
        for a in 0..inhom.len() {
            for b in 0..a {
                let diff = inhom[a] - inhom[b];
                let hit = (-m_max..=m_max).find(|&m| (diff - eta * m as f64).norm() <= tol);
                if let Some(multiple) = hit {
                    v.push(SpecViolation::SovCondition { a: b + 1, b: a + 1, multiple: -multiple });
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn spin(&self, n: usize) -> Spin {
        self.spins[n]
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn inhom(&self) -> &[C64] {
        &self.inhom
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Whether the separation condition holds (always true for specs built
    /// by [`ChainSpec::new`]).
    pub fn is_separable(&self) -> bool {
        self.separable
    }

    pub fn require_separable(&self) -> Result<()> {
        if self.separable {
            return Ok(());
        }
        let mut v = Vec::new();
        Self::check_sov(&self.spins, self.eta, &self.inhom, &mut v);
        Err(Error::InvalidSpec(v))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spins.iter().map(|s| s.dim()).collect()
    }

    /// Full Hilbert-space dimension `prod(2 s_n + 1)`.
    pub fn dim(&self) -> usize {
        self.spins.iter().map(|s| s.dim()).product()
    }

    /// Stride of site `n` in the flat index (site 0 varies fastest).
    pub fn stride(&self, n: usize) -> usize {
        self.spins[..n].iter().map(|s| s.dim()).product()
    }

    pub fn check_site(&self, n: usize) -> Result<()> {
        if n < self.n() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site: n + 1, n: self.n() })
        }
    }

    /// `a(λ) = −∏_n (λ − η_n + η/2 + s_n η)`.
    pub fn a(&self, lambda: C64) -> C64 {
        -self.product(|m| (lambda - self.inhom[m]) + self.eta * half_shift(self.spins[m].twice() as i64 + 1))
    }

    /// `d(λ) = ∏_n (λ − η_n + η/2 − s_n η)`.
    pub fn d(&self, lambda: C64) -> C64 {
        self.product(|m| (lambda - self.inhom[m]) + self.eta * half_shift(1 - self.spins[m].twice() as i64))
    }

    /// `a` at `λ = η_n + (c/2)·η`, computed from exact site differences so
    /// that zeros on the grid are exact.
    pub fn a_at(&self, n: usize, c_half: i64) -> C64 {
        -self.product(|m| {
            self.site_diff(n, m) + self.eta * half_shift(c_half + self.spins[m].twice() as i64 + 1)
        })
    }

    /// `d` at `λ = η_n + (c/2)·η` (see [`ChainSpec::a_at`]).
    pub fn d_at(&self, n: usize, c_half: i64) -> C64 {
        self.product(|m| {
            self.site_diff(n, m) + self.eta * half_shift(c_half + 1 - self.spins[m].twice() as i64)
        })
    }

    /// `qdetbar(λ) = a(λ)·d(λ − η)`.
    pub fn qdetbar(&self, lambda: C64) -> C64 {
        self.a(lambda) * self.d(lambda - self.eta)
    }

    fn product(&self, f: impl Fn(usize) -> C64) -> C64 {
        (0..self.n()).fold(c64(1.0, 0.0), |acc, m| acc * f(m))
    }

    fn site_diff(&self, n: usize, m: usize) -> C64 {
        if n == m {
            c64(0.0, 0.0)
        } else {
            self.inhom[n] - self.inhom[m]
        }
    }

    /// `η_n^- = η_n − η/2`.
    pub fn eta_minus(&self, n: usize) -> C64 {
        self.inhom[n] - self.eta * 0.5
    }

    /// Half-integer offset (in units of `η/2`) of `η_n^{(k)}` from `η_n`.
    pub fn grid_offset(&self, n: usize, k: i64) -> i64 {
        self.spins[n].twice() as i64 - 2 * k - 1
    }

    /// Grid point `η_n^{(k)} = η_n − η/2 + (s_n − k)η`.
    pub fn grid_point(&self, n: usize, k: i64) -> C64 {
        self.point(n, self.grid_offset(n, k))
    }

    /// Shifted point `η̄_n^{(k)} = η_n + (k − s_n − 1/2)η`.
    pub fn shifted_grid_point(&self, n: usize, k: i64) -> C64 {
        self.point(n, 2 * k - self.spins[n].twice() as i64 - 1)
    }

    /// `η_n + (c/2)·η`.
    pub fn point(&self, n: usize, c_half: i64) -> C64 {
        self.inhom[n] + self.eta * half_shift(c_half)
    }

    /// `(η_a + (c_a/2)η) − (η_b + (c_b/2)η)` from exact differences.
    pub fn point_diff(&self, a: usize, c_a: i64, b: usize, c_b: i64) -> C64 {
        self.site_diff(a, b) + self.eta * half_shift(c_a - c_b)
    }

    pub fn grid(&self) -> SeparationGrid {
        SeparationGrid {
            points: (0..self.n())
                .map(|n| (0..=self.spins[n].twice() as i64).map(|k| self.grid_point(n, k)).collect())
                .collect(),
            shifted: (0..self.n())
                .map(|n| (1..=self.spins[n].twice() as i64).map(|k| self.shifted_grid_point(n, k)).collect())
                .collect(),
        }
    }

    /// Self-adjoint evaluation point `λ_0` and the scalar `f` such that
    /// `f·T̄(λ_0)` is Hermitian. `offset` is the free real parameter.
    pub fn hermitian_point(&self, offset: f64) -> Result<(C64, C64)> {
        let half = self.eta * 0.5;
        match self.regime {
            Regime::ImaginaryEta => Ok((c64(offset, 0.0) - half, c64(0.0, 1.0))),
            Regime::RealEta => {
                let factor = if self.n() % 2 == 0 { c64(0.0, 1.0) } else { c64(1.0, 0.0) };
                Ok((c64(0.0, offset) - half, factor))
            }
            Regime::Generic => Err(Error::RegimeUnsupported(Regime::Generic)),
        }
    }

    /// Direction along which the Hermitian line extends.
    pub fn hermitian_direction(&self) -> C64 {
        match self.regime {
            Regime::RealEta => c64(0.0, 1.0),
            _ => c64(1.0, 0.0),
        }
    }

    /// Parses the JSON document form.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        raw.validate()
    }

    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            n: self.n(),
            spins: self.spins.iter().map(|s| format!("{}/2", s.twice())).collect(),
            eta: [self.eta.re, self.eta.im],
            inhom: self.inhom.iter().map(|z| [z.re, z.im]).collect(),
            regime: Some(self.regime.as_str().to_string()),
        }
    }

    /// JSON document with 17 significant digits per float.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(rename = "N")]
            n: usize,
            spins: Vec<String>,
            eta: [F17; 2],
            inhom: Vec<[F17; 2]>,
            regime: &'a str,
        }
        let out = Out {
            n: self.n(),
            spins: self.spins.iter().map(|s| format!("{}/2", s.twice())).collect(),
            eta: [F17(self.eta.re), F17(self.eta.im)],
            inhom: self.inhom.iter().map(|z| [F17(z.re), F17(z.im)]).collect(),
            regime: self.regime.as_str(),
        };
        serde_json::to_string_pretty(&out).expect("spec serialization is infallible")
    }
}

#[inline]
fn half_shift(c: i64) -> f64 {
    c as f64 * 0.5
}

fn detect_regime(eta: C64, inhom: &[C64]) -> Regime {
    let scale = eta.norm();
    if is_imag(eta, scale) && inhom.iter().all(|z| is_real(*z, z.norm())) {
        Regime::ImaginaryEta
    } else if is_real(eta, scale) && inhom.iter().all(|z| is_imag(*z, z.norm())) {
        Regime::RealEta
    } else {
        Regime::Generic
    }
}

/// Unvalidated JSON form of a [`ChainSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub spins: Vec<String>,
    pub eta: [f64; 2],
    pub inhom: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
}

impl RawSpec {
    pub fn validate(&self) -> Result<ChainSpec> {
        let mut v = Vec::new();
        let mut spins = Vec::with_capacity(self.spins.len());
        for (i, label) in self.spins.iter().enumerate() {
            match label.parse::<Spin>() {
                Ok(s) => spins.push(s),
                Err(_) => v.push(SpecViolation::InvalidSpin { site: i + 1, label: label.clone() }),
            }
        }
        if self.n != self.spins.len() || self.n != self.inhom.len() {
            v.push(SpecViolation::SiteCountMismatch {
                declared: self.n,
                spins: self.spins.len(),
                inhom: self.inhom.len(),
            });
        }
        let declared = match self.regime.as_deref().map(str::parse::<Regime>) {
            None => None,
            Some(Ok(r)) => Some(r),
            Some(Err(e)) => {
                v.push(e);
                None
            }
        };
        if !v.is_empty() {
            return Err(Error::InvalidSpec(v));
        }
        let eta = c64(self.eta[0], self.eta[1]);
        let inhom = self.inhom.iter().map(|p| c64(p[0], p[1])).collect();
        ChainSpec::with_regime(spins, eta, inhom, declared)
    }
}

/// Grid points `η_n^{(k)}`, `k = 0..2s_n`, and shifted points `η̄_n^{(k)}`,
/// `k = 1..2s_n` (stored at index `k − 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationGrid {
    pub points: Vec<Vec<Complex64>>,
    pub shifted: Vec<Vec<Complex64>>,
}
