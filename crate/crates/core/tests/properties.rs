mod common;

use common::{c, random_coefficients, random_field, random_vector, rel_err, small_grid};
use formlab::certificates::{form_nonneg_1d, riccati_check_1d, riccati_check_nd, riccati_construct_1d};
use formlab::discrete::{CommutatorOperator, DirichletSpace};
use formlab::field::{curl_matrix, grad, random_band_limited};
use formlab::hodge::hodge_decompose;
use formlab::reduction::{reduce_symbols, sesquilinear, to_divergence_form, CoefficientSet};
use formlab::regnorms::{bmo_norm, trace_norm};
use formlab::varforms::{accretivity_min, form_bound_constant, schrodinger_positivity};
use formlab::{Grid, MatrixField, ScalarField, VectorField};
use num_complex::Complex64;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn interval(n: usize) -> Grid {
    Grid::new(1, n, std::f64::consts::PI).unwrap().with_inner_fraction(1.0).unwrap()
}

/// Smooth positive density in `[lo, lo + 1]`.
fn positive_density(g: &Grid, seed: u64, lo: f64) -> ScalarField {
    let r = random_field(g, seed, 2, true);
    let m = r.max_norm().max(1e-300);
    r.map(|v| Complex64::new(lo + 0.5 * (1.0 + v.re / m), 0.0))
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn parseval(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let u = random_field(&g, seed, 4, false);
        let v = random_field(&g, seed + 1, 4, false);
        let physical = u.inner(&v).unwrap();
        let n = g.len() as f64;
        let spectral: Complex64 = u.spectral().iter().zip(v.spectral()).map(|(a, b)| a * b.conj()).sum::<Complex64>()
            * (g.cell_volume() / n);
        prop_assert!((physical - spectral).norm() <= 1e-12 * u.l2_norm() * v.l2_norm());
    }

    #[test]
    fn periodic_integration_by_parts(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let u = random_field(&g, seed, 4, false);
        let v = random_field(&g, seed + 7, 4, false);
        let (gu, gv) = (grad(&u), grad(&v));
        for a in 0..g.dim() {
            let total: Complex64 = u.mul(gv.component(a)).unwrap().add(&v.mul(gu.component(a)).unwrap()).unwrap()
                .values().iter().sum::<Complex64>() * g.cell_volume();
            let scale = u.l2_norm() * gv.l2_norm() + v.l2_norm() * gu.l2_norm();
            prop_assert!(total.norm() <= 1e-12 * scale, "{total}");
        }
    }

    #[test]
    fn curl_matrix_is_skew_as_stored(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let m = curl_matrix(&random_vector(&g, seed, 4, false));
        for j in 0..g.dim() {
            for k in 0..g.dim() {
                let (a, b) = (m.entry(j, k).values(), m.entry(k, j).values());
                prop_assert!(a.iter().zip(b).all(|(x, y)| *x == -*y));
            }
        }
    }

    #[test]
    fn divergence_form_preserves_the_sesquilinear_form(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let cs = random_coefficients(&g, 2 * seed + 1, false);
        let div = to_divergence_form(&cs).unwrap();
        let u = random_field(&g, seed + 11, 3, false);
        let v = random_field(&g, seed + 12, 3, false);
        let (a, b) = (sesquilinear(&cs, &u, &v).unwrap(), sesquilinear(&div, &u, &v).unwrap());
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1e-300));
    }

    #[test]
    fn reduced_symbols_are_real(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let cs = random_coefficients(&g, seed, false);
        let r = reduce_symbols(&cs).unwrap();
        let scale = cs.a.max_norm() + cs.b.max_norm() + cs.c.max_norm();
        prop_assert!(r.p.im().max_norm() <= 1e-12 * scale);
        prop_assert!(r.d.im().max_norm() <= 1e-12 * scale);
        prop_assert!(r.sigma.max_imag() <= 1e-12 * scale);
    }

    #[test]
    fn hodge_is_linear_and_orthogonal(seed in 0u64..10_000, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let g = small_grid(seed);
        let b1 = random_vector(&g, seed, 4, false);
        let b2 = random_vector(&g, seed + 5, 4, false);
        let (p1, p2) = (hodge_decompose(&b1), hodge_decompose(&b2));
        let combo = b1.scale(c(alpha)).add(&b2.scale(c(beta))).unwrap();
        let p = hodge_decompose(&combo);
        let expect = p1.irrotational.scale(c(alpha)).add(&p2.irrotational.scale(c(beta))).unwrap();
        let scale = combo.max_norm().max(1e-300);
        prop_assert!(p.irrotational.sub(&expect).unwrap().max_norm() <= 1e-12 * scale);
        let expect = p1.skew.scale(c(alpha)).add(&p2.skew.scale(c(beta))).unwrap();
        prop_assert!(p.skew.sub(&expect).unwrap().max_norm() <= 1e-12 * scale);
        prop_assert!(p.orthogonality_defect() <= 1e-10);
    }

    #[test]
    fn hodge_is_idempotent_on_its_parts(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let parts = hodge_decompose(&random_vector(&g, seed, 4, false));
        let again = hodge_decompose(&parts.irrotational);
        let scale = parts.irrotational.max_norm().max(1e-300);
        prop_assert!(again.solenoidal().max_norm() <= 1e-12 * scale);
        prop_assert!(again.irrotational.sub(&parts.irrotational).unwrap().max_norm() <= 1e-12 * scale);
        let sol = parts.solenoidal();
        let again = hodge_decompose(&sol);
        let scale = sol.max_norm().max(1e-300);
        prop_assert!(again.irrotational.max_norm() <= 1e-12 * scale);
        prop_assert!(again.reconstruction_error(&sol) <= 1e-12);
    }

    #[test]
    fn bmo_is_homogeneous(seed in 0u64..10_000, lambda in -5.0f64..5.0) {
        let g = small_grid(seed);
        let f = random_field(&g, seed, 4, false);
        let a = bmo_norm(&f.scale(c(lambda))).value;
        let b = lambda.abs() * bmo_norm(&f).value;
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn trace_norm_is_homogeneous_and_monotone(seed in 0u64..10_000, lambda in 0.1f64..10.0) {
        let g = small_grid(seed);
        let mu = positive_density(&g, seed, 0.0);
        let base = trace_norm(&mu, &[]).unwrap().value;
        let scaled = trace_norm(&mu.scale(c(lambda)), &[]).unwrap().value;
        prop_assert!(rel_err(scaled, lambda.sqrt() * base) <= 1e-12, "{scaled} {base}");
        let bigger = mu.add(&positive_density(&g, seed + 3, 0.0).scale(c(0.5))).unwrap();
        prop_assert!(base <= trace_norm(&bigger, &[]).unwrap().value + 1e-8);
    }

    #[test]
    fn form_bound_scales_linearly(seed in 0u64..10_000, lambda in -4.0f64..4.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let g = small_grid(seed);
        let cs = random_coefficients(&g, seed, true);
        let base = form_bound_constant(&cs, false).unwrap().constant;
        let scaled = form_bound_constant(&cs.scaled(c(lambda)), false).unwrap().constant;
        prop_assert!(rel_err(scaled, lambda.abs() * base) <= 1e-12, "{scaled} {base}");
    }

    #[test]
    fn commutator_form_is_antisymmetric(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let space = DirichletSpace::new(&g).unwrap();
        let op = CommutatorOperator::new(&space, &random_vector(&g, seed, 4, true)).unwrap();
        let u: Vec<Complex64> = space.restrict(&random_field(&g, seed + 9, 4, true)).unwrap();
        let v: Vec<Complex64> = space.restrict(&random_field(&g, seed + 10, 4, true)).unwrap();
        let scale = op.form(&u, &v).norm().max(1e-300);
        prop_assert!(op.form(&u, &u).norm() <= 1e-12 * scale);
        prop_assert!((op.form(&u, &v) + op.form(&v, &u)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn reduced_operator_has_the_same_accretivity_minimum(seed in 0u64..10_000) {
        let g = small_grid(seed);
        let cs = random_coefficients(&g, seed, true);
        let reduced = reduce_symbols(&cs).unwrap().operator();
        let a = accretivity_min(&cs).unwrap().min_rayleigh;
        let b = accretivity_min(&reduced).unwrap().min_rayleigh;
        prop_assert!((a - b).abs() <= 1e-8, "{a} {b}");
    }

    #[test]
    fn real_coefficients_agree_with_schrodinger_positivity(seed in 0u64..10_000, shift in -30.0f64..60.0) {
        let g = small_grid(seed);
        let a = random_coefficients(&g, seed, true).a.re();
        let sym = a.add(&a.transpose()).unwrap().scale(c(0.5));
        let sigma = random_field(&g, seed + 1, 2, true).add(&ScalarField::constant(g, c(shift))).unwrap();
        let cs = CoefficientSet::new(sym.clone(), VectorField::zeros(g), sigma.clone(), formlab::reduction::FormTag::Divergence).unwrap();
        let acc = accretivity_min(&cs).unwrap();
        let sch = schrodinger_positivity(&sym, &sigma, &[]).unwrap();
        prop_assert_eq!(acc.verdict, sch.verdict);
    }

    #[test]
    fn valid_one_dimensional_certificates_are_sound(seed in 0u64..10_000, shift in -2.0f64..2.0, amp in 0.0f64..3.0) {
        let g = interval(64);
        let p = positive_density(&g, seed, 1.0);
        let b = random_band_limited(&g, seed + 1, 2, false).unwrap().scale(c(0.3));
        let c0 = random_field(&g, seed + 2, 2, true).add(&ScalarField::constant(g, c(shift))).unwrap();
        let f = random_field(&g, seed + 3, 2, true).scale(c(amp));
        let cert = riccati_check_1d(&p, &b, &c0, &[], &f).unwrap();
        if cert.valid {
            prop_assert!(form_nonneg_1d(&p, &b, &c0, &[]).unwrap().min_rayleigh >= -1e-6);
        }
        if let Ok(cert) = riccati_construct_1d(&p, &b, &c0, &[]) {
            prop_assert!(cert.valid);
        }
    }

    #[test]
    fn valid_certificates_are_sound(seed in 0u64..10_000, shift in -40.0f64..20.0, amp in 0.0f64..4.0) {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let p = MatrixField::diagonal(vec![positive_density(&g, seed, 1.0), positive_density(&g, seed + 1, 1.0)]).unwrap();
        let sigma = random_field(&g, seed + 2, 2, true).scale(c(5.0)).add(&ScalarField::constant(g, c(shift))).unwrap();
        let gv = random_vector(&g, seed + 3, 2, true).scale(c(amp));
        if riccati_check_nd(&p, &sigma, &gv).unwrap().valid {
            prop_assert!(schrodinger_positivity(&p, &sigma, &[]).unwrap().min_rayleigh >= -1e-6);
        }
    }

    #[test]
    fn certificate_slack_is_affine_in_sigma(seed in 0u64..10_000, t in -5.0f64..5.0) {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let p = MatrixField::identity(g);
        let gv = random_vector(&g, seed, 2, true);
        let s1 = random_field(&g, seed + 1, 2, true);
        let a = riccati_check_nd(&p, &s1, &gv).unwrap();
        let b = riccati_check_nd(&p, &s1.add(&ScalarField::constant(g, c(t))).unwrap(), &gv).unwrap();
        let space = DirichletSpace::new(&g).unwrap();
        let (sa, sb) = (space.restrict(&a.slack).unwrap(), space.restrict(&b.slack).unwrap());
        let scale = a.slack.max_norm().max(1.0);
        prop_assert!(sa.iter().zip(&sb).all(|(x, y)| (x.re - y.re - t).abs() <= 1e-12 * scale));
    }
}
