use lcs_core::error::Error;
use lcs_core::exterior::{l2_inner, wedge};
use lcs_core::grid::Point;
use lcs_core::lichnerowicz::*;
use lcs_core::random::{random_field, random_form, random_lee};
use lcs_core::twisted::{fixtures, untwisted_betti};
use lcs_core::{DiffForm, GridSpec, ScalarField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn g3() -> GridSpec {
    GridSpec::new(3, 16).unwrap()
}

fn g4() -> GridSpec {
    GridSpec::new(4, 8).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn field(grid: GridSpec, f: impl Fn(&Point<f64>) -> f64) -> ScalarField<f64> {
    ScalarField::from_fn(grid, f)
}

fn symplectic(grid: GridSpec) -> DiffForm<f64> {
    DiffForm::basis_form(grid, &[0, 1])
        .unwrap()
        .add(&DiffForm::basis_form(grid, &[2, 3]).unwrap())
        .unwrap()
}

/// Contact form times a circle, expanded by hand:
/// `d eta - c dx4 ^ eta` with `eta = cos(2 pi x1) dx2 + sin(2 pi x1) dx3`.
fn contact_circle(grid: GridSpec, c: f64) -> DiffForm<f64> {
    DiffForm::from_fn(grid, 2, |p: &Point<f64>, comp| {
        let (s, co) = (TAU * p[0]).sin_cos();
        // Components 12 13 14 23 24 34.
        [-TAU * s, TAU * co, 0.0, 0.0, c * co, c * s][comp]
    })
    .unwrap()
}

fn lee_error(lee: &LeeForm<f64>, expected: &DiffForm<f64>) -> f64 {
    lee.one_form().sub(expected).unwrap().max_abs()
}

/// Rescales a log-factor to amplitude 0.1 so that `e^u` times a
/// band-limited form stays resolved on a 16-point axis.
fn small_log(u: ScalarField<f64>) -> ScalarField<f64> {
    let m = u.max_abs();
    u.scale(0.1 / m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn d_theta_squared_vanishes(seed in any::<u64>(), k in 0usize..2) {
        let mut r = rng(seed);
        let lee = random_lee::<f64, _>(g3(), 2, &mut r);
        let a = random_form::<f64, _>(g3(), k, 2, &mut r);
        let dd = d_theta(&d_theta(&a, &lee).unwrap(), &lee).unwrap();
        prop_assert!(dd.norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn chain_map_identity(seed in any::<u64>(), k in 0usize..3) {
        let grid = g3();
        let mut r = rng(seed);
        let lee = random_lee::<f64, _>(grid, 1, &mut r);
        let a = random_form::<f64, _>(grid, k, 1, &mut r);
        let u = small_log(random_field::<f64, _>(grid, 1, &mut r));
        let f = u.map(f64::exp);
        let shifted = LeeForm::from_parts(lee.harmonic(), lee.potential().add(&u).unwrap()).unwrap();
        let fa = a.mul_function(&f).unwrap();
        let lhs = d_theta(&a, &lee).unwrap().mul_function(&f).unwrap();
        let rhs = d_theta(&fa, &shifted).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-9 * fa.norm());
    }

    #[test]
    fn adjointness(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let lee = random_lee::<f64, _>(g3(), 1, &mut r);
        let a = random_form::<f64, _>(g3(), k, 2, &mut r);
        let b = random_form::<f64, _>(g3(), k + 1, 2, &mut r);
        let lhs = l2_inner(&d_theta(&a, &lee).unwrap(), &b).unwrap();
        let rhs = l2_inner(&a, &d_theta_star(&b, &lee).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * a.norm() * b.norm());
    }

    #[test]
    fn laplacian_is_nonnegative(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let lee = random_lee::<f64, _>(g3(), 1, &mut r);
        let a = random_form::<f64, _>(g3(), k, 2, &mut r);
        let q = l2_inner(&laplacian_theta(&a, &lee).unwrap(), &a).unwrap();
        let da = if k < 3 { d_theta(&a, &lee).unwrap().norm() } else { 0.0 };
        let dsa = if k > 0 { d_theta_star(&a, &lee).unwrap().norm() } else { 0.0 };
        prop_assert!(q >= -1e-10 * a.norm() * a.norm());
        prop_assert!((q - da * da - dsa * dsa).abs() <= 1e-9 * (1.0 + q));
    }

    #[test]
    fn hodge_decomposition_splits_orthogonally(seed in any::<u64>(), k in 0usize..4, twisted in any::<bool>()) {
        let grid = g3();
        let mut r = rng(seed);
        let c: Vec<f64> = if twisted { vec![0.7, -0.3, 1.1] } else { vec![0.0; 3] };
        let lee = LeeForm::constant(grid, &c);
        let a = random_form::<f64, _>(grid, k, 3, &mut r)
            .add(&DiffForm::from_fn(grid, k, |_, i| 0.5 + i as f64).unwrap())
            .unwrap();
        let h = hodge_decompose(&a, &lee).unwrap();
        let scale = a.norm() * a.norm();
        let parts = [&h.harmonic, &h.exact, &h.coexact];
        for i in 0..3 {
            for j in i + 1..3 {
                prop_assert!(l2_inner(parts[i], parts[j]).unwrap().abs() <= 1e-9 * scale);
            }
        }
        let sum = h.harmonic.add(&h.exact).unwrap().add(&h.coexact).unwrap().add(&h.unresolved).unwrap();
        prop_assert!(sum.sub(&a).unwrap().norm() <= 1e-10 * a.norm());
        // Characterization: exact part is closed, coexact part is coclosed.
        if k < 3 {
            prop_assert!(d_theta(&h.exact, &lee).unwrap().norm() <= 1e-9 * a.norm());
        }
        if k > 0 {
            prop_assert!(d_theta_star(&h.coexact, &lee).unwrap().norm() <= 1e-9 * a.norm());
        }
        if twisted {
            prop_assert_eq!(h.harmonic.max_abs(), 0.0);
        } else {
            prop_assert!(h.harmonic.norm() > 0.0);
        }
    }

    #[test]
    fn primitive_of_exact_target(seed in any::<u64>(), k in 1usize..4, twisted in any::<bool>()) {
        let grid = g3();
        let mut r = rng(seed);
        let c: Vec<f64> = if twisted { vec![1.0, 0.0, -0.4] } else { vec![0.0; 3] };
        let lee = LeeForm::constant(grid, &c);
        let beta = random_form::<f64, _>(grid, k - 1, 3, &mut r);
        let target = d_theta(&beta, &lee).unwrap();
        prop_assume!(target.norm() > 1e-6);
        let sol = solve_primitive(&target, &lee).unwrap();
        prop_assert!(sol.residual <= 1e-9);
        let back = d_theta(&sol.primitive, &lee).unwrap();
        prop_assert!(back.sub(&target).unwrap().norm() <= 1e-9 * target.norm());
        // Orthogonal to closed forms of the same degree.
        let gamma = random_form::<f64, _>(grid, k.saturating_sub(2), 2, &mut r);
        let closed = if k >= 2 { d_theta(&gamma, &lee).unwrap() } else { DiffForm::zero(grid, k - 1).unwrap() };
        prop_assert!(l2_inner(&sol.primitive, &closed).unwrap().abs() <= 1e-9 * sol.primitive.norm() * closed.norm().max(1.0));
        let again = solve_primitive(&target, &lee).unwrap();
        prop_assert!(again.primitive.sub(&sol.primitive).unwrap().max_abs() <= 1e-12 * (1.0 + sol.primitive.max_abs()));
    }

    #[test]
    fn lee_of_rescaled_form(seed in any::<u64>()) {
        let grid = GridSpec::new(4, 16).unwrap();
        let mut r = rng(seed);
        let omega = validate_lcs(&contact_circle(grid, 1.0), &LcsOptions::default()).unwrap();
        let u = small_log(random_field::<f64, _>(grid, 1, &mut r));
        let rescaled = conformal_rescale(&omega, &u.map(f64::exp)).unwrap();
        let extracted = lee_form(rescaled.omega(), &LcsOptions::default()).unwrap();
        let expected = omega.lee().one_form().add(&LeeForm::from_parts(&[], u).unwrap().one_form()).unwrap();
        prop_assert!(lee_error(&extracted, &expected) <= 1e-9);
    }
}

#[test]
fn d_theta_examples() {
    let grid = g4();
    let one = DiffForm::function(ScalarField::constant(grid, 1.0));
    let lee = LeeForm::constant(grid, &[2.5]);
    let out = d_theta(&one, &lee).unwrap();
    assert_eq!(
        out.sub(&DiffForm::constant_one_form(grid, &[-2.5])).unwrap().max_abs(),
        0.0
    );
    let a = random_form::<f64, _>(grid, 1, 2, &mut rng(1));
    let untwisted = d_theta(&a, &LeeForm::zero(grid)).unwrap();
    assert_eq!(
        untwisted
            .sub(&lcs_core::exterior::ext_d(&a).unwrap())
            .unwrap()
            .max_abs(),
        0.0
    );
    let vol12 = DiffForm::basis_form(grid, &[0, 1]).unwrap();
    let star = d_theta_star(&vol12, &LeeForm::constant(grid, &[3.0])).unwrap();
    assert!(
        star.sub(&DiffForm::constant_one_form(grid, &[0.0, -3.0]))
            .unwrap()
            .max_abs()
            < 1e-15
    );
}

#[test]
fn laplacian_on_single_modes() {
    let grid = g3();
    let c = [0.8, 0.0, 0.0];
    let lee = LeeForm::constant(grid, &c);
    for (m, k) in [([1i64, 2, 0], 0usize), ([0, 1, 3], 1), ([2, -1, 1], 2)] {
        let a = DiffForm::from_fn(grid, k, |p: &Point<f64>, i| {
            let phase = TAU * (m[0] as f64 * p[0] + m[1] as f64 * p[1] + m[2] as f64 * p[2]);
            (phase + i as f64).cos()
        })
        .unwrap();
        let eig = TAU * TAU * m.iter().map(|v| (v * v) as f64).sum::<f64>() + c.iter().map(|v| v * v).sum::<f64>();
        let lap = laplacian_theta(&a, &lee).unwrap();
        assert!(lap.sub(&a.scale(eig)).unwrap().norm() <= 1e-10 * eig * a.norm());
        // Direct composition of the first-order operators.
        let mut direct = d_theta_star(&d_theta(&a, &lee).unwrap(), &lee).unwrap();
        if k > 0 {
            direct = direct
                .add(&d_theta(&d_theta_star(&a, &lee).unwrap(), &lee).unwrap())
                .unwrap();
        }
        assert!(lap.sub(&direct).unwrap().norm() <= 1e-10 * eig * a.norm());
    }
    let s = DiffForm::function(field(grid, |p| (TAU * p[0]).sin()));
    let lap = laplacian_theta(&s, &LeeForm::zero(grid)).unwrap();
    assert!(lap.sub(&s.scale(TAU * TAU)).unwrap().max_abs() < 1e-11);
}

#[test]
fn lee_form_recovery() {
    let grid = GridSpec::new(4, 16).unwrap();
    let opts = LcsOptions::default();
    let l = validate_lcs(&symplectic(grid), &opts).unwrap();
    assert_eq!(l.lee().harmonic(), &[0.0; 4]);
    assert!(l.diagnostics().lcs_residual <= 1e-12);

    let c = 1.0;
    let l = validate_lcs(&contact_circle(grid, c), &opts).unwrap();
    assert!(lee_error(l.lee(), &DiffForm::constant_one_form(grid, &[0.0, 0.0, 0.0, c])) <= 1e-9);
    // Pointwise Pfaffian w12 w34 - w13 w24 + w14 w23 = -2 pi c.
    assert!((l.diagnostics().nondeg_margin - TAU * c).abs() < 1e-12);
    assert!(l.diagnostics().lcs_residual <= 1e-9);

    let g = field(grid, |p| {
        0.3 * (TAU * p[0]).sin() * (TAU * p[3]).cos() + 0.2 * (TAU * p[2]).cos()
    });
    let omega = symplectic(grid).mul_function(&g.map(f64::exp)).unwrap();
    let lee = lee_form(&omega, &opts).unwrap();
    let dg = LeeForm::from_parts(&[], g).unwrap().one_form();
    assert!(lee_error(&lee, &dg) <= 1e-9);

    let degenerate = DiffForm::<f64>::basis_form(grid, &[0, 1]).unwrap();
    assert!(matches!(
        validate_lcs(&degenerate, &opts),
        Err(Error::DegenerateForm { .. })
    ));
    // Closed but not lcs: d omega is not of the form theta ^ omega.
    let bent = symplectic(grid)
        .add(&DiffForm::monomial(field(grid, |p| 0.1 * (TAU * p[1]).sin()), &[0, 2]).unwrap())
        .unwrap();
    assert!(matches!(validate_lcs(&bent, &opts), Err(Error::NotLcs { .. })));
}

#[test]
fn conformal_rescale_examples() {
    let grid = g4();
    let opts = LcsOptions::default();
    let l = validate_lcs(&symplectic(grid), &opts).unwrap();
    let same = conformal_rescale(&l, &ScalarField::constant(grid, 1.0)).unwrap();
    assert_eq!(same.omega().sub(l.omega()).unwrap().max_abs(), 0.0);
    let doubled = conformal_rescale(&l, &ScalarField::constant(grid, 2.0)).unwrap();
    assert!(lee_error(doubled.lee(), &l.lee().one_form()) < 1e-12);
    let f = field(grid, |p| (TAU * p[0]).sin().exp());
    let r = conformal_rescale(&l, &f).unwrap();
    let expected = DiffForm::monomial(field(grid, |p| TAU * (TAU * p[0]).cos()), &[0]).unwrap();
    assert!(lee_error(r.lee(), &expected) <= 1e-9);
    let back = conformal_rescale(&r, &f.map(|v| 1.0 / v)).unwrap();
    assert!(back.omega().sub(l.omega()).unwrap().max_abs() < 1e-14);
    assert!(matches!(
        conformal_rescale(&l, &field(grid, |p| p[0] - 0.5)),
        Err(Error::NonPositiveFunction { .. })
    ));
}

#[test]
fn gauge_normalization_removes_exact_part() {
    let grid = GridSpec::new(4, 16).unwrap();
    let c = 0.7;
    let l = validate_lcs(&contact_circle(grid, c), &LcsOptions::default()).unwrap();
    let (n, f) = gauge_normalize(&l).unwrap();
    assert!(f.sub(&ScalarField::constant(grid, 1.0)).unwrap().max_abs() < 1e-12);
    assert!(n.lee().is_constant());

    let s = field(grid, |p| (TAU * p[0]).sin());
    let twisted = conformal_rescale(&l, &s.map(f64::exp)).unwrap();
    let (n, f) = gauge_normalize(&twisted).unwrap();
    assert!(f.sub(&s.map(|v| (-v).exp())).unwrap().max_abs() < 1e-12);
    assert!(lee_error(n.lee(), &DiffForm::constant_one_form(grid, &[0.0, 0.0, 0.0, c])) < 1e-12);

    let gcs = symplectic(grid).mul_function(&s.map(|v| (0.4 * v).exp())).unwrap();
    let (n, _) = gauge_normalize(&validate_lcs(&gcs, &LcsOptions::default()).unwrap()).unwrap();
    assert!(n.lee().harmonic_norm() < 1e-12);
    assert!(n.omega().sub(&symplectic(grid)).unwrap().max_abs() < 1e-10);
}

#[test]
fn harmonic_exact_split() {
    let grid = g3();
    let l = split_harmonic_exact(&DiffForm::constant_one_form(grid, &[3.0]), 1e-10).unwrap();
    assert_eq!(l.harmonic(), &[3.0, 0.0, 0.0]);
    assert_eq!(l.potential_norm(), 0.0);
    let g = field(grid, |p| (TAU * p[1]).cos());
    let dg = LeeForm::from_parts(&[], g.clone()).unwrap().one_form();
    let l = split_harmonic_exact(&dg, 1e-10).unwrap();
    assert!(l.harmonic_norm() < 1e-15);
    assert!(l.potential().sub(&g).unwrap().max_abs() < 1e-12);

    let mixed = random_lee::<f64, _>(grid, 3, &mut rng(4)).one_form();
    let l = split_harmonic_exact(&mixed, 1e-10).unwrap();
    assert!(l.one_form().sub(&mixed).unwrap().norm() <= 1e-10 * mixed.norm());
    let not_closed = DiffForm::monomial(field(grid, |p| (TAU * p[1]).sin()), &[0]).unwrap();
    assert!(matches!(
        split_harmonic_exact(&not_closed, 1e-8),
        Err(Error::NotClosed { .. })
    ));
}

#[test]
fn harmonic_obstruction_and_non_constant_lee() {
    let grid = g4();
    let target = DiffForm::<f64>::basis_form(grid, &[0, 1]).unwrap().scale(2.0);
    let sol = solve_primitive(&target, &LeeForm::zero(grid)).unwrap();
    assert!((sol.harmonic_part_norm - target.norm()).abs() < 1e-14);
    assert!((sol.residual - 1.0).abs() < 1e-14);
    let h = hodge_decompose(&target, &LeeForm::zero(grid)).unwrap();
    assert_eq!(h.harmonic.sub(&target).unwrap().max_abs(), 0.0);
    let lee = random_lee::<f64, _>(grid, 1, &mut rng(2));
    assert!(matches!(
        solve_primitive(&target, &lee),
        Err(Error::NonConstantLee { .. })
    ));
    assert!(matches!(
        hodge_decompose(&target, &lee),
        Err(Error::NonConstantLee { .. })
    ));
}

#[test]
fn twisted_betti_numbers_of_tori() {
    assert_eq!(torus_twisted_betti(&[0.0; 4], &g4()), vec![1, 4, 6, 4, 1]);
    assert_eq!(torus_twisted_betti(&[1.0, 0.0, 0.0, 0.0], &g4()), vec![0; 5]);
    let g2 = GridSpec::new(2, 16).unwrap();
    // Classical oracle: rational Betti numbers of a triangulated torus.
    assert_eq!(
        torus_twisted_betti(&[0.0; 2], &g2),
        untwisted_betti(&fixtures::torus()).dims
    );
    assert_eq!(torus_twisted_betti(&[0.0, 1e-3], &g2), vec![0, 0, 0]);
}

#[test]
fn wedge_with_lee_matches_definition() {
    let grid = g3();
    let mut r = rng(9);
    let lee = random_lee::<f64, _>(grid, 1, &mut r);
    let a = random_form::<f64, _>(grid, 1, 2, &mut r);
    let expected = lcs_core::exterior::ext_d(&a)
        .unwrap()
        .sub(&wedge(&lee.one_form(), &a).unwrap())
        .unwrap();
    assert!(d_theta(&a, &lee).unwrap().sub(&expected).unwrap().norm() <= 1e-12 * a.norm());
}
