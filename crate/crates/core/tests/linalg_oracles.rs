use proptest::prelude::*;
use qudit_tomo::linalg::{
    fidelity, hermitian_eigendecomposition, Basis, CMatrix, StateVector, C64,
};
use qudit_tomo::measurement::outcome_probabilities;
use qudit_tomo::random::{haar_state, haar_unitary, RandomStream};

fn random_hermitian(d: usize, rng: &mut RandomStream) -> CMatrix {
    let g = CMatrix::from_fn(d, |_, _| {
        C64::new(rng.standard_normal(), rng.standard_normal())
    });
    CMatrix::from_fn(d, |r, c| (g[(r, c)] + g[(c, r)].conj()) * 0.5)
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn quadratic_roots(h: &CMatrix) -> Vec<f64> {
    let (a, d) = (h[(0, 0)].re, h[(1, 1)].re);
    let r = ((a - d) * (a - d) / 4.0 + h[(0, 1)].norm_sqr()).sqrt();
    vec![(a + d) / 2.0 + r, (a + d) / 2.0 - r]
}

/// Roots of `det(lambda I - H)` for a 3x3 Hermitian `H`, by the
/// trigonometric form of the cubic formula.
fn cubic_roots(h: &CMatrix) -> Vec<f64> {
    let e = |r: usize, c: usize| h[(r, c)];
    let c2 = (e(0, 0) + e(1, 1) + e(2, 2)).re;
    let c1 = (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0)
        + e(1, 1) * e(2, 2)
        - e(1, 2) * e(2, 1))
    .re;
    let c0 = (e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0)))
    .re;
    // lambda = x + c2/3 turns lambda^3 - c2 lambda^2 + c1 lambda - c0 into x^3 + p x + q.
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    (0..3)
        .map(|k| shift + m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
        .collect()
}

#[test]
fn reconstruction_residual_is_small() {
    let mut rng = RandomStream::new(101, 0);
    for d in 2..=8 {
        for _ in 0..200 {
            let h = random_hermitian(d, &mut rng);
            let eig = hermitian_eigendecomposition(&h).unwrap();
            assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-8);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let v = CMatrix::from_columns(&eig.eigenvectors).unwrap();
            assert!(v.unitarity_defect() <= 1e-9);
        }
    }
}

#[test]
fn eigenvalues_match_characteristic_roots() {
    let mut rng = RandomStream::new(102, 0);
    for _ in 0..200 {
        let h = random_hermitian(2, &mut rng);
        let eig = hermitian_eigendecomposition(&h).unwrap();
        for (a, b) in eig.eigenvalues.iter().zip(quadratic_roots(&h)) {
            assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
        let h = random_hermitian(3, &mut rng);
        let eig = hermitian_eigendecomposition(&h).unwrap();
        for (a, b) in eig.eigenvalues.iter().zip(sorted_desc(cubic_roots(&h))) {
            assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn repeated_decompositions_agree_bitwise() {
    let mut rng = RandomStream::new(103, 0);
    let h = random_hermitian(5, &mut rng);
    let a = hermitian_eigendecomposition(&h).unwrap();
    let b = hermitian_eigendecomposition(&h).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.eigenvectors, b.eigenvectors);
}

#[test]
fn born_probabilities_sum_to_one() {
    let mut rng = RandomStream::new(104, 0);
    for d in 2..=13 {
        for _ in 0..50 {
            let psi = haar_state(d, &mut rng).unwrap();
            let basis = haar_unitary(d, &mut rng).unwrap();
            let p = outcome_probabilities(&psi, &basis).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }
}

fn state_strategy(d: usize) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            StateVector::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
        })
}

proptest! {
    #[test]
    fn fidelity_is_symmetric_and_phase_blind(
        (a, b) in (2usize..7).prop_flat_map(|d| (state_strategy(d), state_strategy(d))),
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let fab = fidelity(&a, &b).unwrap();
        prop_assert_eq!(fab, fidelity(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&fab));
        let rotated = StateVector::normalized(
            a.amplitudes().iter().map(|z| z * C64::from_polar(1.0, phase)).collect(),
        ).unwrap();
        prop_assert!((fidelity(&rotated, &b).unwrap() - fab).abs() < 1e-12);
    }

    #[test]
    fn overlaps_with_any_basis_sum_to_one(psi in (2usize..9).prop_flat_map(state_strategy), seed in any::<u64>()) {
        let mut rng = RandomStream::new(seed, 0);
        let basis = haar_unitary(psi.dim(), &mut rng).unwrap();
        let total: f64 = basis.overlaps(&psi).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn fourier_basis_is_unbiased_to_computational() {
    for d in 2..=13 {
        let f = Basis::fourier(d);
        for k in 0..d {
            for p in f.overlaps(&StateVector::basis_state(d, k)).unwrap() {
                assert!((p - 1.0 / d as f64).abs() < 1e-12);
            }
        }
    }
}
