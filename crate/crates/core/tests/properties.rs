use proptest::prelude::*;

use sov_chain::correlators::{form_factor_sminus, form_factor_sz, scalar_product_det, SeparateState};
use sov_chain::linalg::{c64, embed_site_operator, norm, pair};
use sov_chain::operators::{antiperiodic_transfer, embed, parity_conjugator, SpinGenerators};
use sov_chain::reconstruction::{reconstruct_local, relative_operator_error, Generator};
use sov_chain::sov::{Side, SovBasis};
use sov_chain::spectrum::SolvedSpectrum;
use sov_chain::verify::{commutator_residual, qdet_residual, relative_difference, yang_baxter_lax};
use sov_chain::{ChainSpec, ComplexMatrix, Polynomial, Spin, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c64(re, im))
}

fn point() -> impl Strategy<Value = C64> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(re, im)| c64(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |d| ComplexMatrix::new(n, n, d).unwrap())
}

fn spin() -> impl Strategy<Value = Spin> {
    (1u32..=2).prop_map(|t| Spin::from_twice(t).unwrap())
}

/// Imaginary-eta chain with well separated real inhomogeneities.
fn chain(max_sites: usize) -> impl Strategy<Value = ChainSpec> {
    (prop::collection::vec((spin(), 0.2..0.9f64), 1..=max_sites), 0.6..1.4f64).prop_map(|(sites, g)| {
        let mut x = 0.0;
        let mut spins = Vec::new();
        let mut inhom = Vec::new();
        for (s, gap) in sites {
            x += gap;
            spins.push(s);
            inhom.push(c64(x, 0.0));
        }
        ChainSpec::new(spins, c64(0.0, g), inhom).unwrap()
    })
}

fn amplitudes(spec: &ChainSpec, raw: &[C64]) -> Vec<Vec<C64>> {
    let mut it = raw.iter().copied().cycle();
    (0..spec.n()).map(|a| (0..spec.spin(a).dim()).map(|_| it.next().unwrap()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn det_is_multiplicative(a in matrix(5), b in matrix(5)) {
        let (da, db) = (a.det().unwrap(), b.det().unwrap());
        let dab = (&a * &b).det().unwrap();
        prop_assert!((dab - da * db).norm() <= 1e-9 * (da * db).norm().max(1e-12));
    }

    #[test]
    fn hermitian_eigenpairs(dim in 1usize..=81, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = ComplexMatrix::from_fn(dim, dim, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = &x + &x.adjoint();
        let e = h.eig_hermitian().unwrap();
        let d = ComplexMatrix::from_diag(&e.values.iter().map(|&v| c64(v, 0.0)).collect::<Vec<_>>());
        prop_assert!(relative_difference(&(&h * &e.vectors), &(&e.vectors * &d)) <= 1e-10);
        prop_assert!((&(&e.vectors.adjoint() * &e.vectors) - &ComplexMatrix::identity(dim)).max_abs() <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn interpolation_round_trip(coeffs in prop::collection::vec(complex(), 1..8)) {
        let p = Polynomial::new(coeffs.clone());
        let nodes: Vec<C64> = (0..coeffs.len()).map(|j| c64(j as f64 * 0.6 - 1.0, 0.25 * j as f64)).collect();
        let values: Vec<C64> = nodes.iter().map(|&x| p.eval(x)).collect();
        let q = Polynomial::from_samples(&nodes, &values).unwrap();
        for (a, b) in q.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn embedding_commutes_across_sites(a in matrix(2), b in matrix(3)) {
        let dims = [2, 3];
        let x = embed_site_operator(&a, 0, &dims).unwrap();
        let y = embed_site_operator(&b, 1, &dims).unwrap();
        prop_assert!(commutator_residual(&x, &y) <= 1e-15);
        prop_assert!(relative_difference(&(&x * &y), &b.kron(&a)) <= 1e-15);
    }

    #[test]
    fn grid_identities(spec in chain(3)) {
        for n in 0..spec.n() {
            let two_s = spec.spin(n).twice() as i64;
            prop_assert!(spec.d(spec.grid_point(n, 0)).norm() <= 1e-12);
            prop_assert!(spec.qdetbar(spec.grid_point(n, two_s)).norm() <= 1e-12);
            for k in 1..=two_s {
                let diff = spec.shifted_grid_point(n, k) - spec.grid_point(n, two_s - k);
                prop_assert!(diff.norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn lax_yang_baxter(two_s in 1u32..=3, g in 0.3..1.5f64, l in point(), m in point()) {
        let s = Spin::from_twice(two_s).unwrap();
        prop_assert!(yang_baxter_lax(s, c64(0.0, g), l, m) <= 1e-11);
    }

    #[test]
    fn transfer_family_commutes(spec in chain(2), l in point(), m in point()) {
        let r = commutator_residual(&antiperiodic_transfer(&spec, l), &antiperiodic_transfer(&spec, m));
        prop_assert!(r <= 1e-10);
        prop_assert!(qdet_residual(&spec, l) <= 1e-11);
    }

    #[test]
    fn parity_conjugation_flips_sign(spec in chain(3), l in point()) {
        let u = parity_conjugator(&spec);
        let t = antiperiodic_transfer(&spec, l);
        let conj = &(&u * &t) * &u.inverse().unwrap();
        prop_assert!(relative_difference(&conj, &t.scale(c64(-1.0, 0.0))) <= 1e-12);
    }

    #[test]
    fn scalar_product_determinant(spec in chain(3), raw in prop::collection::vec(complex(), 14)) {
        let basis = SovBasis::build(&spec).unwrap();
        let alpha = amplitudes(&spec, &raw[..7]);
        let beta = amplitudes(&spec, &raw[7..]);
        let left = SeparateState::new(&spec, Side::Left, alpha.clone()).unwrap().to_vector(&basis);
        let right = SeparateState::new(&spec, Side::Right, beta.clone()).unwrap().to_vector(&basis);
        let direct = pair(&left, &right);
        let (det, _) = scalar_product_det(&spec, &alpha, &beta);
        prop_assert!((det - direct).norm() <= 1e-9 * direct.norm().max(norm(&left) * norm(&right)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_symmetric_and_form_factors_match(spec in chain(2)) {
        let sol = SolvedSpectrum::solve(&spec).unwrap();
        prop_assert_eq!(sol.len(), spec.dim());
        let consts: Vec<C64> = sol.eigen.iter().map(|e| e.t.coeffs()[0]).collect();
        for (i, e) in sol.eigen.iter().enumerate() {
            let neg: Vec<C64> = e.t.coeffs().iter().map(|c| -c).collect();
            let mirrored = sol.eigen.iter().any(|f| {
                f.t.coeffs().iter().zip(&neg).all(|(a, b)| (a - b).norm() <= 1e-8 * (1.0 + b.norm()))
            });
            prop_assert!(mirrored, "t_{} has no partner -t ({:?})", i, consts);
        }
        for n in 0..spec.n() {
            let g = SpinGenerators::new(spec.spin(n));
            let sm = embed(&spec, &g.sminus, n).unwrap();
            let sz = embed(&spec, &g.sz, n).unwrap();
            for t in &sol.eigen {
                for tp in &sol.eigen {
                    let floor = norm(&t.left) * norm(&tp.right);
                    let want = pair(&t.left, &sm.apply(&tp.right));
                    let got = form_factor_sminus(&spec, t, tp, n).unwrap();
                    prop_assert!((got - want).norm() <= 1e-8 * want.norm().max(floor));
                    let want = pair(&t.left, &sz.apply(&tp.right));
                    let got = form_factor_sz(&spec, t, tp, n).unwrap();
                    prop_assert!((got - want).norm() <= 1e-8 * want.norm().max(floor));
                }
            }
        }
    }

    #[test]
    fn generators_reconstruct(spec in chain(3)) {
        for n in 0..spec.n() {
            let g = SpinGenerators::new(spec.spin(n));
            for gen in Generator::ALL {
                let x = reconstruct_local(&spec, gen, n).unwrap();
                let oracle = embed(&spec, gen.local(&g), n).unwrap();
                prop_assert!(relative_operator_error(&x, &oracle) <= 1e-8);
            }
        }
    }
}
