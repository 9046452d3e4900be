use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use tricrystal::graph::build_grid;
use tricrystal::profiles::Deriv;
use tricrystal::spectral::*;
use tricrystal::{EdgeGrid64, ProfileFamily, YGraphSpec};

fn grid(l: f64, n: usize) -> EdgeGrid64 {
    build_grid(l, n).unwrap()
}

fn kink(lambda: f64) -> ProfileFamily<f64> {
    ProfileFamily::kink(YGraphSpec::uniform(1.0, lambda).unwrap()).unwrap()
}

fn antikink(lambda: f64) -> ProfileFamily<f64> {
    ProfileFamily::antikink(YGraphSpec::uniform(1.0, lambda).unwrap()).unwrap()
}

fn spectrum(os: OperatorSpec<f64>, k: usize) -> SpectrumReport<f64> {
    lowest_eigenpairs(&assemble(&os).unwrap(), k).unwrap()
}

fn linearized(fam: ProfileFamily<f64>, g: EdgeGrid64, k: usize) -> SpectrumReport<f64> {
    spectrum(OperatorSpec::linearized(fam, g), k)
}

// Independent reference values from a scipy sparse shift-invert solve of the same P1 model
// (L = 40, h = 0.01).
const KINK_M4_NU0: f64 = -0.73905;
const KINK_M4_NU1: f64 = 0.32375;
const ANTIKINK_0_NU0: f64 = 0.5757;

#[test]
fn free_operator_matches_the_bound_state_formula() {
    let g = grid(40.0, 4001);
    for lambda in [-3.0, -4.5, -6.0] {
        let r = spectrum(OperatorSpec::free(YGraphSpec::uniform(1.0, lambda).unwrap(), g), 3);
        let exact = -(3.0 / lambda).powi(2);
        assert!(((r.lowest() - exact) / exact).abs() < 1e-3, "lambda {lambda}: {}", r.lowest());
        assert_eq!(r.morse_index, 1);
    }
    let r = spectrum(OperatorSpec::free(YGraphSpec::uniform(1.0, 2.0).unwrap(), g), 3);
    assert!(r.eigenvalues.iter().all(|&v| v >= -1e-3));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn free_operator_oracle_for_random_speeds(
        c in proptest::array::uniform3(0.5f64..2.0),
        ratio in 1.2f64..4.0,
    ) {
        // keep the decay rate sum(c)/(c_j |lambda|) well above 1/L
        let lambda = -ratio * c.iter().sum::<f64>();
        let g = grid(40.0, 4001);
        let spec = YGraphSpec::new(c, lambda).unwrap();
        let r = spectrum(OperatorSpec::free(spec, g), 2);
        let exact = -(c.iter().sum::<f64>() / lambda).powi(2);
        let tol = 1e-3f64.max(20.0 * g.spacing().powi(2));
        prop_assert!(((r.lowest() - exact) / exact).abs() < tol, "{} vs {}", r.lowest(), exact);
    }
}

#[test]
fn free_operator_error_is_second_order_in_h() {
    let err = |n: usize| {
        let r = spectrum(OperatorSpec::free(YGraphSpec::uniform(1.0, -3.0).unwrap(), grid(40.0, n)), 1);
        (r.lowest() + 1.0).abs()
    };
    let ratio = err(2001) / err(4001);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn linearized_eigenvalues_converge_at_second_order() {
    let nu = |n: usize| linearized(kink(-4.0), grid(20.0, n), 2).eigenvalues;
    let (a, b, c) = (nu(501), nu(1001), nu(2001));
    for i in 0..2 {
        let ratio = (a[i] - b[i]) / (b[i] - c[i]);
        assert!((3.5..=4.5).contains(&ratio), "eigenvalue {i}: ratio {ratio}");
    }
}

#[test]
fn kink_spectrum_matches_reference_values() {
    let r = linearized(kink(-4.0), grid(40.0, 4001), 4);
    assert!((r.eigenvalues[0] - KINK_M4_NU0).abs() < 1e-4);
    assert!((r.eigenvalues[1] - KINK_M4_NU1).abs() < 1e-4);
    assert!((r.eigenvalues[1] - r.eigenvalues[2]).abs() < 1e-9, "edge-permutation pair is degenerate");
    assert_eq!(morse_and_kernel(&r).unwrap(), (1, 0));
}

#[test]
fn antikink_at_kirchhoff_point_matches_reference_value() {
    let r = linearized(antikink(0.0), grid(40.0, 4001), 3);
    assert!((r.lowest() - ANTIKINK_0_NU0).abs() < 1e-3, "{}", r.lowest());
}

#[test]
fn threshold_kink_has_a_two_dimensional_kernel() {
    let g = grid(40.0, 8001);
    let fam = kink(-1.5 * PI);
    let r = linearized(fam, g, 6);
    assert_eq!(morse_and_kernel(&r).unwrap(), (1, 2));
    let op = assemble(&OperatorSpec::linearized(fam, g)).unwrap();
    for psi in analytic_kernel_vectors(&fam, &g).unwrap() {
        let rq = rayleigh_quotient(&op, &psi).unwrap();
        assert!(rq.abs() <= 10.0 * g.spacing().powi(2), "Rayleigh quotient {rq}");
    }
}

#[test]
fn threshold_antikink_has_a_two_dimensional_kernel() {
    let g = grid(40.0, 4001);
    let fam = antikink(-0.5 * PI);
    let r = linearized(fam, g, 6);
    assert_eq!(morse_and_kernel(&r).unwrap(), (1, 2));
    let op = assemble(&OperatorSpec::linearized(fam, g)).unwrap();
    for psi in analytic_kernel_vectors(&fam, &g).unwrap() {
        assert!(rayleigh_quotient(&op, &psi).unwrap().abs() <= 10.0 * g.spacing().powi(2));
    }
}

#[test]
fn kernel_is_trivial_away_from_thresholds() {
    let g = grid(40.0, 4001);
    for lambda in [-3.2, -3.5, -4.0, -4.4, -5.0, -5.5, -6.0, -7.0, -8.0, -10.0] {
        let r = linearized(kink(lambda), g, 6);
        assert_eq!(morse_and_kernel(&r).unwrap().1, 0, "kink lambda {lambda}");
    }
    for lambda in [-6.0, -3.0, -1.0, -0.8, -0.5, -0.2, 0.0, 0.5, 1.0, 5.0] {
        let r = linearized(antikink(lambda), g, 6);
        assert_eq!(morse_and_kernel(&r).unwrap().1, 0, "antikink lambda {lambda}");
    }
}

#[test]
fn morse_index_is_at_most_one_on_the_semibounded_range() {
    let g = grid(40.0, 4001);
    for lambda in [-1.5 * PI, -4.5, -4.0, -3.5, -3.1] {
        assert!(linearized(kink(lambda), g, 4).morse_index <= 1, "kink lambda {lambda}");
    }
    for lambda in [-0.5 * PI, -1.2, -0.8, -0.5, -0.1] {
        assert!(linearized(antikink(lambda), g, 4).morse_index <= 1, "antikink lambda {lambda}");
    }
}

#[test]
fn continuum_floor_approaches_one_as_the_box_grows() {
    let floors: Vec<f64> = [(10.0, 1001), (20.0, 2001), (40.0, 4001)]
        .into_iter()
        .map(|(l, n)| linearized(kink(-4.0), grid(l, n), 6).continuum_floor_estimate.unwrap())
        .collect();
    for w in floors.windows(2) {
        assert!((w[1] - 1.0).abs() <= (w[0] - 1.0).abs(), "{floors:?}");
    }
    assert!(*floors.last().unwrap() >= 0.9);
}

#[test]
fn restricted_eigenvalues_appear_in_the_full_spectrum() {
    let g = grid(40.0, 4001);
    for fam in [antikink(-6.0), kink(-6.0), kink(-4.0)] {
        let full = linearized(fam, g, 8);
        let restricted = spectrum(OperatorSpec::linearized(fam, g).restricted(), 3);
        for nu in &restricted.eigenvalues {
            let gap = full.eigenvalues.iter().map(|v| (v - nu).abs()).fold(f64::INFINITY, f64::min);
            assert!(gap <= 1e-8, "{nu} missing from {:?}", full.eigenvalues);
        }
    }
    let r = spectrum(OperatorSpec::linearized(antikink(-6.0), g).restricted(), 3);
    assert_eq!(morse_and_kernel(&r).unwrap(), (1, 0));
}

#[test]
fn agrees_with_a_dense_generalized_eigensolver() {
    let g = grid(6.0, 31);
    let op = assemble(&OperatorSpec::linearized(kink(-4.0), g)).unwrap();
    let n = op.dim();
    let k = DMatrix::from_fn(n, n, |i, j| op.stiffness.get(i, j));
    let m = DMatrix::from_fn(n, n, |i, j| op.mass.get(i, j));
    let chol = m.cholesky().unwrap();
    let linv = chol.l().try_inverse().unwrap();
    let reduced = &linv * k * linv.transpose();
    let mut dense: Vec<f64> = SymmetricEigen::new(reduced).eigenvalues.iter().copied().collect();
    dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = lowest_eigenpairs(&op, 8).unwrap();
    for (a, b) in r.eigenvalues.iter().zip(&dense) {
        assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
    }
}

#[test]
fn kirchhoff_operator_is_the_limit_of_large_positive_penalties() {
    // lambda -> 0+ turns the vertex term (1/lambda)(sum c_j u_j(0))^2 into the hard constraint.
    let g = grid(40.0, 4001);
    let hard = linearized(antikink(0.0), g, 3);
    let soft = linearized(antikink(1e-7), g, 3);
    for (a, b) in hard.eigenvalues.iter().zip(&soft.eigenvalues) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
    for v in &hard.eigenvectors {
        let s: f64 = (0..3).map(|j| v.edge(j)[0]).sum();
        assert!(s.abs() < 1e-12);
    }
}

#[test]
fn eigenpairs_are_accurate_and_m_orthonormal() {
    let g = grid(40.0, 4001);
    let fam = kink(-1.5 * PI);
    let op = assemble(&OperatorSpec::linearized(fam, g)).unwrap();
    let r = lowest_eigenpairs(&op, 6).unwrap();
    for w in r.eigenvalues.windows(2) {
        assert!(w[0] <= w[1]);
    }
    for (i, (x, &nu)) in r.dof_vectors.iter().zip(&r.eigenvalues).enumerate() {
        assert!(r.backward_errors[i] < 1e-13, "backward error {}", r.backward_errors[i]);
        if nu.abs() >= 0.05 {
            let kx = op.stiffness.matvec(x);
            let knorm = kx.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(r.residuals[i] <= 1e-8 * knorm, "pair {i}: {} vs {}", r.residuals[i], knorm);
        }
        for (j, y) in r.dof_vectors.iter().enumerate() {
            let my = op.mass.matvec(y);
            let ip: f64 = x.iter().zip(&my).map(|(a, b)| a * b).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((ip - expect).abs() < 1e-10, "({i},{j}) -> {ip}");
        }
    }
}

#[test]
fn identical_solves_are_bitwise_identical() {
    let g = grid(40.0, 2001);
    let a = linearized(kink(-4.0), g, 4);
    let b = linearized(kink(-4.0), g, 4);
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.dof_vectors, b.dof_vectors);
}

#[test]
fn too_few_eigenpairs_is_inconclusive() {
    let r = linearized(kink(-1.5 * PI), grid(40.0, 2001), 2);
    assert!(matches!(morse_and_kernel(&r), Err(tricrystal::Error::Inconclusive(_))));
}

#[test]
fn inertia_count_matches_the_eigenvalues() {
    let op = assemble(&OperatorSpec::linearized(kink(-6.0), grid(40.0, 4001))).unwrap();
    assert_eq!(count_below(&op, 0.0).unwrap(), 3);
    assert_eq!(count_below(&op, -0.5).unwrap(), 1);
}

#[test]
fn antikink_form_on_the_fluxon_matches_closed_form() {
    let g = grid(40.0, 4001);
    let fam = antikink(-0.5 * PI);
    let op = assemble(&OperatorSpec::linearized(fam, g)).unwrap();
    let q = quadratic_form(&op, &fam.sample(&g, Deriv::First).unwrap()).unwrap();
    let exact = -72.0 / PI;
    assert!(((q - exact) / exact).abs() < 1e-2, "{q}");
    assert_eq!(quadratic_form(&op, &tricrystal::GraphField::zeros(g)).unwrap(), 0.0);
}

#[test]
fn form_of_a_free_eigenvector_is_its_eigenvalue() {
    let g = grid(40.0, 4001);
    let op = assemble(&OperatorSpec::free(YGraphSpec::uniform(1.0, -6.0).unwrap(), g)).unwrap();
    let r = lowest_eigenpairs(&op, 1).unwrap();
    let x = &r.dof_vectors[0];
    let q = op.stiffness.quad(x);
    assert!((q - r.lowest() * op.mass.quad(x)).abs() < 1e-10);
    let mu = growing_mode_rate(&r).mu_plus().unwrap();
    assert!((mu - 0.5).abs() < 1e-3);
}

#[test]
fn kink_form_decomposition_signs() {
    let g = grid(40.0, 4001);
    let tail = kink(-4.0);
    let (a, _) = form_decomposition_p(&tail, &tail.sample(&g, Deriv::First).unwrap()).unwrap();
    assert!(a.abs() < 1e-12);
    let bump_like = tricrystal::graph::sample(|j, x| (1.0 + j as f64) * (-4.0 * x).exp(), &g).unwrap();
    let (a, p) = form_decomposition_p(&tail, &bump_like).unwrap();
    assert!(a >= 0.0 && p >= 0.0);
    let (a, p) = form_decomposition_p(&kink(-6.0), &bump_like).unwrap();
    assert!(a >= 0.0 && p < 0.0, "P = {p}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn decomposition_a_is_nonnegative(coef in proptest::array::uniform3(-2.0f64..2.0), rate in 0.3f64..3.0, lambda in -8.0f64..-3.1) {
        let g = grid(10.0, 201);
        let u = tricrystal::graph::sample(|j, x| coef[j] * (-rate * x).exp() * (1.0 + x), &g).unwrap();
        let (a, _) = form_decomposition_p(&kink(lambda), &u).unwrap();
        prop_assert!(a >= 0.0);
    }
}

#[test]
fn negativity_witness_on_tail_and_flat_kinks() {
    let g = grid(40.0, 4001);
    for lambda in [-4.0, -3.2, -1.5 * PI] {
        assert!(negativity_witness_kink(&kink(lambda), &g).unwrap() < 0.0, "lambda {lambda}");
    }
    assert!(matches!(negativity_witness_kink(&kink(-6.0), &g), Err(tricrystal::Error::OutOfRange(_))));
}

#[test]
fn single_precision_spectrum() {
    let g = build_grid(20.0f32, 401).unwrap();
    let spec = YGraphSpec::uniform(1.0f32, -3.0).unwrap();
    let r = lowest_eigenpairs(&assemble(&OperatorSpec::free(spec, g)).unwrap(), 1).unwrap();
    assert!((r.lowest() + 1.0).abs() < 2e-3, "{}", r.lowest());
}
