use num_complex::Complex64;
use proptest::prelude::*;

use numshadow::analytic::{
    entangled_moments, real_shadow_variance, restricted_moments, schmidt_second_moment, separable_moments,
    Eigenbasis, Gamma3x3,
};
use numshadow::dynamics::{is_separable_2x2, trajectory, DynamicsConfig, DEFAULT_PPT_TOL};
use numshadow::linalg::{expectation, hermitian_eigenvalues, partial_trace, ComplexMatrix, Subsystem};
use numshadow::range::numerical_range_boundary;
use numshadow::sampler::{sample_haar_unitary, sample_pure, Field, Restriction, RngStream, SchmidtSpec};
use numshadow::shadow::{estimate_shadow, sample_expectations};
use numshadow::stats::MomentEstimate;
use numshadow::{catalog, DensityMatrix, GridSpec, PureState};
use rand::RngCore;

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-2.0f64..2.0, 2 * dim * dim).prop_map(move |v| {
        let entries = v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        ComplexMatrix::new(dim, entries).unwrap()
    })
}

fn any_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..=4).prop_flat_map(matrix)
}

fn restriction() -> impl Strategy<Value = Restriction> {
    prop_oneof![
        (1usize..=5).prop_map(Restriction::FullComplex),
        (1usize..=5).prop_map(Restriction::FullReal),
        (prop::collection::vec(2usize..=3, 2..=3), prop::bool::ANY).prop_map(|(dims, real)| Restriction::Product {
            dims,
            field: if real { Field::Real } else { Field::Complex },
        }),
        (2usize..=3, prop::bool::ANY).prop_map(|(n, real)| Restriction::MaxEntangled {
            n,
            field: if real { Field::Real } else { Field::Complex },
        }),
        Just(Restriction::GhzOrbit),
        Just(Restriction::WOrbit),
        prop::collection::vec(0.01f64..1.0, 2..=3).prop_map(|w| {
            let s: f64 = w.iter().sum();
            Restriction::Schmidt(SchmidtSpec::new(w.iter().map(|x| x / s).collect()).unwrap())
        }),
    ]
}

fn hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    a.hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_ignores_global_phase(a in any_matrix(), seed in any::<u64>(), theta in 0.0f64..6.3) {
        let psi = sample_pure(&Restriction::FullComplex(a.dim()), &mut RngStream::new(seed, 0));
        let phase = Complex64::from_polar(1.0, theta);
        let rotated: Vec<Complex64> = psi.amplitudes().iter().map(|x| x * phase).collect();
        let rotated = PureState::new(rotated, Restriction::FullComplex(a.dim())).unwrap();
        let (z0, z1) = (expectation(&a, &psi).unwrap(), expectation(&a, &rotated).unwrap());
        prop_assert!((z0 - z1).norm() < 1e-12);
    }

    #[test]
    fn partial_traces_preserve_trace(a in matrix(6), split in prop::bool::ANY) {
        let dims = if split { (2, 3) } else { (3, 2) };
        let ta = partial_trace(&a, dims, Subsystem::A).unwrap().trace();
        let tb = partial_trace(&a, dims, Subsystem::B).unwrap().trace();
        prop_assert!((ta - a.trace()).norm() < 1e-12);
        prop_assert!((tb - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn hermitian_expectation_within_spectrum(a in any_matrix(), seed in any::<u64>()) {
        let h = hermitian(&a);
        let eig = hermitian_eigenvalues(&h).unwrap();
        let psi = sample_pure(&Restriction::FullComplex(h.dim()), &mut RngStream::new(seed, 1));
        let z = expectation(&h, &psi).unwrap();
        prop_assert!(z.im.abs() < 1e-12);
        prop_assert!(z.re >= eig[0] - 1e-12 && z.re <= eig[eig.len() - 1] + 1e-12);
    }

    #[test]
    fn sampled_states_belong_to_their_restriction(r in restriction(), seed in any::<u64>(), stream in 0u64..1000) {
        let psi = sample_pure(&r, &mut RngStream::new(seed, stream));
        let norm: f64 = psi.amplitudes().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(psi.membership_residual().unwrap() < 1e-10);
        if r.field() == Field::Real {
            prop_assert!(psi.amplitudes().iter().all(|x| x.im.abs() <= 1e-14));
        }
        let again = sample_pure(&r, &mut RngStream::new(seed, stream));
        prop_assert_eq!(psi.amplitudes(), again.amplitudes());
    }

    #[test]
    fn rng_streams_reproduce_and_separate(seed in any::<u64>(), s1 in any::<u64>(), s2 in any::<u64>()) {
        prop_assume!(s1 != s2);
        let draw = |s| {
            let mut r = RngStream::new(seed, s);
            (0..4).map(|_| r.next_u64()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(s1), draw(s1));
        prop_assert_ne!(draw(s1), draw(s2));
    }

    #[test]
    fn schmidt_specs_are_normalized_and_sorted(w in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let s: f64 = w.iter().sum();
        prop_assume!(s > 1e-6);
        let spec = SchmidtSpec::new(w.iter().map(|x| x / s).collect()).unwrap();
        prop_assert!((spec.lambda().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(spec.lambda().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn histogram_mass_is_conserved(
        a in matrix(3),
        seed in any::<u64>(),
        window in (-1.5f64..0.0, 0.1f64..1.5),
        bins in 1usize..40,
    ) {
        let r = Restriction::FullComplex(3);
        let grid = GridSpec::new(window.0, window.1, window.0, window.1, bins, bins + 1).unwrap();
        let h = estimate_shadow(&a, &r, 3000, Some(grid), seed).unwrap();
        let total: f64 = h.masses().iter().sum::<f64>() + h.outside_fraction();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let auto = estimate_shadow(&a, &r, 3000, None, seed).unwrap();
        prop_assert_eq!(auto.n_outside, 0);
    }

    #[test]
    fn moment_estimates_are_consistent(a in any_matrix(), seed in any::<u64>()) {
        let zs = sample_expectations(&a, &Restriction::FullComplex(a.dim()), 500, seed).unwrap();
        let m = MomentEstimate::from_samples(&zs).unwrap();
        prop_assert!(m.variance >= 0.0);
        prop_assert!(m.second_abs >= m.mean.norm_sqr() - 1e-12);
    }

    #[test]
    fn samples_lie_in_numerical_range(a in any_matrix(), r_seed in any::<u64>(), seed in any::<u64>()) {
        let poly = numerical_range_boundary(&a, 720).unwrap();
        let r = match (a.dim(), r_seed % 3) {
            (4, 0) => Restriction::Product { dims: vec![2, 2], field: Field::Complex },
            (4, 1) => Restriction::MaxEntangled { n: 2, field: Field::Complex },
            (d, 2) => Restriction::FullReal(d),
            (d, _) => Restriction::FullComplex(d),
        };
        for z in sample_expectations(&a, &r, 2000, seed).unwrap() {
            prop_assert!(poly.signed_distance(z) >= -1e-9, "{z} outside W(A) by {}", -poly.signed_distance(z));
        }
    }

    #[test]
    fn range_polygon_is_convex_and_equivariant(
        a in any_matrix(),
        modulus in 0.1f64..3.0,
        step in 0usize..360,
        beta in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        // A phase that is a whole number of sweep steps keeps the two sweeps aligned.
        let alpha = Complex64::from_polar(modulus, 2.0 * std::f64::consts::PI * step as f64 / 360.0);
        let beta = Complex64::new(beta.0, beta.1);
        let p = numerical_range_boundary(&a, 360).unwrap();
        prop_assert!(p.is_convex(1e-12));
        let shifted = &a.scale(alpha) + &ComplexMatrix::identity(a.dim()).scale(beta);
        let q = numerical_range_boundary(&shifted, 360).unwrap();
        let tol = 1e-9 * (1.0 + modulus);
        for v in p.vertices() {
            prop_assert!(q.signed_distance(alpha * v + beta).abs() < tol);
        }
        for w in q.vertices() {
            prop_assert!(p.signed_distance((w - beta) / alpha).abs() < tol);
        }
    }

    #[test]
    fn range_area_grows_with_angles(a in any_matrix()) {
        let mut last = 0.0;
        for n in [45, 90, 180, 360, 720] {
            let area = numerical_range_boundary(&a, n).unwrap().area();
            prop_assert!(area >= last - 1e-12);
            last = area;
        }
    }

    #[test]
    fn exact_reports_are_self_consistent(a in matrix(4), w in 0.5f64..1.0) {
        for r in [
            Restriction::FullComplex(4),
            Restriction::Product { dims: vec![2, 2], field: Field::Complex },
            Restriction::MaxEntangled { n: 2, field: Field::Complex },
            Restriction::Schmidt(SchmidtSpec::new(vec![w, 1.0 - w]).unwrap()),
        ] {
            let m = restricted_moments(&a, &r).unwrap().unwrap();
            prop_assert!(m.exact);
            prop_assert!((m.variance - (m.second_abs - m.mean.norm_sqr())).abs() < 1e-12);
        }
    }

    #[test]
    fn schmidt_endpoints_match_closed_forms(a in matrix(4)) {
        let sep = separable_moments(&a, 2).unwrap().second_abs;
        let ent = entangled_moments(&a, 2).unwrap().second_abs;
        prop_assert!((schmidt_second_moment(&a, 2, &SchmidtSpec::product(2)).unwrap() - sep).abs() < 1e-12);
        prop_assert!((schmidt_second_moment(&a, 2, &SchmidtSpec::maximally_entangled(2)).unwrap() - ent).abs() < 1e-12);
    }

    #[test]
    fn gamma_has_zero_line_sums(c in prop::array::uniform3(prop::array::uniform3(-5.0f64..5.0))) {
        let g = Gamma3x3::new(&c);
        for i in 0..3 {
            prop_assert!(g.full[i].iter().sum::<f64>().abs() < 1e-12);
            prop_assert!((0..3).map(|k| g.full[k][i]).sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn real_variance_general_basis_reduces_to_orthogonal(
        lambda in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..=5),
        seed in any::<u64>(),
    ) {
        let lambda: Vec<Complex64> = lambda.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        let o = sample_haar_unitary(lambda.len(), Field::Real, &mut RngStream::new(seed, 0));
        let general = real_shadow_variance(&lambda, Eigenbasis::General(&o)).unwrap();
        let orthogonal = real_shadow_variance(&lambda, Eigenbasis::Orthogonal).unwrap();
        prop_assert!((general - orthogonal).abs() < 1e-10 * (1.0 + orthogonal));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_stay_physical(alpha in -1.0f64..1.0, beta in 0.0f64..0.75, obs in 0usize..3) {
        let observable = match obs {
            0 => catalog::lookup("X1").unwrap().matrix,
            1 => catalog::lookup("X2").unwrap().matrix,
            _ => catalog::lookup("B4f").unwrap().matrix,
        };
        let poly = numerical_range_boundary(&observable, 720).unwrap();
        let cfg = DynamicsConfig { alpha, beta, steps: 60, observable };
        for p in trajectory(&cfg).unwrap() {
            prop_assert!(p.purity > 0.0 && p.purity <= 1.0 + 1e-12);
            prop_assert_eq!(p.separable, p.min_pt_eigenvalue >= -DEFAULT_PPT_TOL);
            prop_assert!(poly.signed_distance(p.z) >= -1e-9);
        }
    }

    #[test]
    fn ppt_classification_is_tolerance_stable(seed in any::<u64>(), mix in 0.0f64..1.0) {
        let psi = sample_pure(&Restriction::FullComplex(4), &mut RngStream::new(seed, 0));
        let pure = DensityMatrix::from_pure(psi.amplitudes()).unwrap().into_matrix();
        let m = &pure.scale(Complex64::new(mix, 0.0))
            + &ComplexMatrix::identity(4).scale(Complex64::new((1.0 - mix) / 4.0, 0.0));
        let rho = DensityMatrix::new(m).unwrap();
        let tol = 1e-12;
        let (a, min) = is_separable_2x2(&rho, tol).unwrap();
        let (b, _) = is_separable_2x2(&rho, 10.0 * tol).unwrap();
        prop_assert!(a == b || min.abs() < 10.0 * tol);
    }
}
