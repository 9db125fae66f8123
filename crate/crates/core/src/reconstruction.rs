//! Local operators rebuilt from fused transfer matrices and monodromy
//! entries at the inhomogeneities, plus the `σ^x` string identities.

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, C64};
use crate::model::ChainSpec;
use crate::operators::{embed, monodromy, Boundary, SpinGenerators, TransferFamily, MAX_CONDITION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Plus,
    Minus,
    Z,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Plus, Generator::Minus, Generator::Z];

    pub fn label(self) -> &'static str {
        match self {
            Generator::Plus => "S+",
            Generator::Minus => "S-",
            Generator::Z => "Sz",
        }
    }

    pub fn local(self, g: &SpinGenerators) -> &ComplexMatrix {
        match self {
            Generator::Plus => &g.splus,
            Generator::Minus => &g.sminus,
            Generator::Z => &g.sz,
        }
    }

    fn kernel(self) -> Kernel {
        match self {
            Generator::Plus => Kernel::A,
            Generator::Minus => Kernel::D,
            Generator::Z => Kernel::HalfCMinusB,
        }
    }
}

/// Which operator a plan rebuilds.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorTag {
    Generator(Generator),
    /// Spin-1/2 site operator, expanded on `1, S^+, S^-, S^z`.
    Generic(ComplexMatrix),
}

/// Order of the two fused factors around the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `T̄^{(s−k/2)}(η_n + kη/2) · K · T̄^{((k−1)/2)}(η̄_n^{(k/2)})`.
    R1,
    /// `T̄^{((k−1)/2)}(η̄_n^{(k/2)}) · K · T̄^{(s−k/2)}(η_n + kη/2)`.
    R2,
}

/// Spin-1/2 trace kernels `tr_0(S^α σ^x M(λ))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    A,
    D,
    /// `(C − B)/2`.
    HalfCMinusB,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Fused { boundary: Boundary, two_s: u32, point: C64, site: usize, inverse: bool },
    Kernel { kernel: Kernel, point: C64 },
}

/// `coeff · ∏ factors`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<Factor>,
}

/// `prefix · Σ terms · suffix`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionPlan {
    pub site: usize,
    pub tag: OperatorTag,
    pub ordering: Ordering,
    pub prefix: Vec<Factor>,
    pub terms: Vec<Term>,
    pub suffix: Vec<Factor>,
}

fn fused_at_site(spec: &ChainSpec, boundary: Boundary, k: usize, inverse: bool) -> Factor {
    Factor::Fused {
        boundary,
        two_s: spec.spin(k).twice(),
        point: spec.inhom()[k],
        site: k,
        inverse,
    }
}

fn generator_terms(spec: &ChainSpec, n: usize, g: Generator, ordering: Ordering) -> Vec<Term> {
    let two_s = spec.spin(n).twice() as i64;
    (1..=two_s)
        .map(|k| {
            let outer = Factor::Fused {
                boundary: Boundary::Antiperiodic,
                two_s: (two_s - k) as u32,
                point: spec.point(n, k),
                site: n,
                inverse: false,
            };
            let inner = Factor::Fused {
                boundary: Boundary::Antiperiodic,
                two_s: (k - 1) as u32,
                point: spec.point(n, k - two_s - 1),
                site: n,
                inverse: false,
            };
            let kernel = Factor::Kernel { kernel: g.kernel(), point: spec.shifted_grid_point(n, k) };
            let factors = match ordering {
                Ordering::R1 => vec![outer, kernel, inner],
                Ordering::R2 => vec![inner, kernel, outer],
            };
            Term { coeff: c64(1.0, 0.0), factors }
        })
        .collect()
}

impl ReconstructionPlan {
    pub fn new(spec: &ChainSpec, tag: OperatorTag, n: usize, ordering: Ordering) -> Result<Self> {
        spec.check_site(n)?;
        let prefix = (0..n).map(|k| fused_at_site(spec, Boundary::Antiperiodic, k, false)).collect();
        let suffix = (0..=n).map(|k| fused_at_site(spec, Boundary::Antiperiodic, k, true)).collect();
        let terms = match &tag {
            OperatorTag::Generator(g) => generator_terms(spec, n, *g, ordering),
            OperatorTag::Generic(x) => {
                if spec.spin(n).dim() != 2 || x.rows() != 2 || x.cols() != 2 {
                    return Err(Error::Dimension(
                        "generic site operators are reconstructed on spin-1/2 sites only".into(),
                    ));
                }
                // x = x00 (1/2 + S^z) + x11 (1/2 − S^z) + x01 S^+ + x10 S^-
                let parts = [
                    (Generator::Z, x[(0, 0)] - x[(1, 1)]),
                    (Generator::Plus, x[(0, 1)]),
                    (Generator::Minus, x[(1, 0)]),
                ];
                let mut terms = Vec::new();
                for (g, c) in parts {
                    for mut t in generator_terms(spec, n, g, ordering) {
                        t.coeff *= c;
                        terms.push(t);
                    }
                }
                // prefix·suffix alone is T̄(η_n)^{-1}; the identity part needs T̄(η_n)
                terms.push(Term {
                    coeff: (x[(0, 0)] + x[(1, 1)]) * 0.5,
                    factors: vec![fused_at_site(spec, Boundary::Antiperiodic, n, false)],
                });
                terms
            }
        };
        Ok(Self { site: n, tag, ordering, prefix, terms, suffix })
    }

    pub fn evaluate(&self, family: &TransferFamily) -> Result<ComplexMatrix> {
        let dim = family.spec().dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            let p = product(family, &t.factors)?;
            sum = &sum + &p.scale(t.coeff);
        }
        let left = product(family, &self.prefix)?;
        let right = product(family, &self.suffix)?;
        Ok(&(&left * &sum) * &right)
    }
}

fn factor_matrix(family: &TransferFamily, f: &Factor) -> Result<ComplexMatrix> {
    match *f {
        Factor::Fused { boundary, two_s, point, site, inverse } => {
            let m = family.fused_with(boundary, two_s, point);
            if !inverse {
                return Ok((*m).clone());
            }
            match m.inverse_conditioned(MAX_CONDITION) {
                Ok((inv, _)) => Ok(inv),
                Err(Error::Singular { cond }) => Err(Error::SingularFactor { site, point, cond }),
                Err(e) => Err(e),
            }
        }
        Factor::Kernel { kernel, point } => {
            let m = monodromy(family.spec(), point);
            Ok(match kernel {
                Kernel::A => m.a,
                Kernel::D => m.d,
                Kernel::HalfCMinusB => (&m.c - &m.b).scale(c64(0.5, 0.0)),
            })
        }
    }
}

fn product(family: &TransferFamily, factors: &[Factor]) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(family.spec().dim());
    for f in factors {
        out = &out * &factor_matrix(family, f)?;
    }
    Ok(out)
}

/// Rebuilds `S_n^α` through the transfer matrices.
pub fn reconstruct_local(spec: &ChainSpec, g: Generator, n: usize) -> Result<ComplexMatrix> {
    reconstruct_with(&TransferFamily::new(spec.clone()), OperatorTag::Generator(g), n, Ordering::R1)
}

pub fn reconstruct_with(
    family: &TransferFamily,
    tag: OperatorTag,
    n: usize,
    ordering: Ordering,
) -> Result<ComplexMatrix> {
    ReconstructionPlan::new(family.spec(), tag, n, ordering)?.evaluate(family)
}

/// `‖X − Y‖ / ‖Y‖` in operator norm (absolute when `Y = 0`).
pub fn relative_operator_error(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let diff = (x - y).operator_norm();
    let scale = y.operator_norm();
    if scale == 0.0 { diff } else { diff / scale }
}

/// Which side the inverse periodic factors sit on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StringForm {
    /// `∏ T̄^{(s_b)}(η_b) · ∏ T^{(s_b)}(η_b)^{-1}`.
    TwistedFirst,
    /// `∏ T^{(s_b)}(η_b) · ∏ T̄^{(s_b)}(η_b)^{-1}`, the inverse of the
    /// first form, equal to it because the string is an involution.
    PeriodicFirst,
}

/// `∏_{b<c} Σ^x_b` from transfer matrices; `c` counts sites from the left.
pub fn sigma_string(family: &TransferFamily, c: usize, form: StringForm) -> Result<ComplexMatrix> {
    let spec = family.spec();
    if c > spec.n() {
        return Err(Error::SiteOutOfRange { site: c, n: spec.n() });
    }
    let (first, second) = match form {
        StringForm::TwistedFirst => (Boundary::Antiperiodic, Boundary::Periodic),
        StringForm::PeriodicFirst => (Boundary::Periodic, Boundary::Antiperiodic),
    };
    let first: Vec<Factor> = (0..c).map(|b| fused_at_site(spec, first, b, false)).collect();
    let second: Vec<Factor> = (0..c).map(|b| fused_at_site(spec, second, b, true)).collect();
    Ok(&product(family, &first)? * &product(family, &second)?)
}

/// `⊗_{b<c} Σ^x_b ⊗ 1`.
pub fn sigma_string_oracle(spec: &ChainSpec, c: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(spec.dim());
    for b in 0..c {
        out = &out * &embed(spec, &SpinGenerators::new(spec.spin(b)).sigma_x, b)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaStringCheck {
    pub twisted_first: f64,
    pub periodic_first: f64,
    /// `‖S·S − 1‖`.
    pub involution: f64,
}

pub fn check_sigma_string(family: &TransferFamily, c: usize) -> Result<SigmaStringCheck> {
    let oracle = sigma_string_oracle(family.spec(), c)?;
    let a = sigma_string(family, c, StringForm::TwistedFirst)?;
    let b = sigma_string(family, c, StringForm::PeriodicFirst)?;
    let id = ComplexMatrix::identity(family.spec().dim());
    Ok(SigmaStringCheck {
        twisted_first: relative_operator_error(&a, &oracle),
        periodic_first: relative_operator_error(&b, &oracle),
        involution: relative_operator_error(&(&a * &a), &id),
    })
}

/// `Σ^x_n = ∏_{k<n} T^{(s_k)}(η_k) · T̄^{(s_n)}(η_n) · ∏_{k≤n} T^{(s_k)}(η_k)^{-1}`
/// against the embedded flip, as a relative operator-norm residual.
pub fn verify_reconstruction_identity(family: &TransferFamily, n: usize) -> Result<f64> {
    let spec = family.spec();
    spec.check_site(n)?;
    let mut factors: Vec<Factor> = (0..n).map(|k| fused_at_site(spec, Boundary::Periodic, k, false)).collect();
    factors.push(fused_at_site(spec, Boundary::Antiperiodic, n, false));
    factors.extend((0..=n).map(|k| fused_at_site(spec, Boundary::Periodic, k, true)));
    let built = product(family, &factors)?;
    let oracle = embed(spec, &SpinGenerators::new(spec.spin(n)).sigma_x, n)?;
    Ok(relative_operator_error(&built, &oracle))
}
