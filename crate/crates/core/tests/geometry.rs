use nalgebra::DMatrix;
use num_complex::Complex64;

use numshadow::linalg::{expectation, hermitian_eigensystem, kron, ComplexMatrix, Pauli};
use numshadow::range::{minkowski_product, numerical_range_boundary, RangePolygon};
use numshadow::sampler::{sample_ginibre, Field, Restriction, RngStream};
use numshadow::{catalog, PureState};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Characteristic polynomial coefficients `[c0, ..., c_{n-1}]` of `x^n + ...`
/// by the Faddeev-LeVerrier recursion.
fn faddeev_leverrier(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &m).trace() / k as f64;
    }
    coeffs.truncate(n);
    coeffs
}

#[test]
fn hermitian_part_of_a4a_matches_companion_roots() {
    let h = catalog::lookup("A4a").unwrap().matrix.hermitian_part();
    assert!(h.entries().iter().all(|z| z.im == 0.0));
    let real = DMatrix::from_fn(4, 4, |i, j| h[(i, j)].re);
    let coeffs = faddeev_leverrier(&real);
    let companion = DMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (i, 3) => -coeffs[i],
        (i, j) if i == j + 1 => 1.0,
        _ => 0.0,
    });
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-9);
            z.re
        })
        .collect();
    roots.sort_by(f64::total_cmp);

    let eig = hermitian_eigensystem(&h).unwrap();
    for (x, y) in eig.values.iter().zip(&roots) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let hv = h.mul_vec(&v).unwrap();
        let residual: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt();
        assert!(residual <= 1e-10 * h.hs_norm_sqr().sqrt());
    }
}

#[test]
fn expectation_examples() {
    let psi = PureState::new(vec![c(0.6, 0.0), c(0.0, 0.8)], Restriction::FullComplex(2)).unwrap();
    assert!((expectation(&ComplexMatrix::identity(2), &psi).unwrap() - 1.0).norm() < 1e-15);
    let e1 = PureState::basis(2, 0);
    let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    assert_eq!(expectation(&z, &e1).unwrap(), c(1.0, 0.0));
    let a2 = catalog::lookup("A2").unwrap().matrix;
    assert_eq!(expectation(&a2, &e1).unwrap(), c(-1.0, 0.0));
}

#[test]
fn kron_examples() {
    let xy = kron(&Pauli::X.matrix(), &Pauli::Y.matrix());
    assert_eq!(xy[(0, 3)], c(0.0, -1.0));

    let mut rng = RngStream::new(3, 0);
    let [a, b, p, q] = [0, 1, 2, 3].map(|_| sample_ginibre(2, Field::Complex, &mut rng));
    let lhs = &kron(&a, &b) * &kron(&p, &q);
    let rhs = kron(&(&a * &p), &(&b * &q));
    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
}

#[test]
fn normal_segment_range() {
    let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
    let p = numerical_range_boundary(&a, 720).unwrap();
    for v in p.vertices() {
        // Distance to the segment from 1 to i.
        let t = (((v - c(1.0, 0.0)) * c(-1.0, 1.0).conj()).re / 2.0).clamp(0.0, 1.0);
        let closest = c(1.0, 0.0) + c(-1.0, 1.0) * t;
        assert!((v - closest).norm() < 1e-10);
    }
}

#[test]
fn nilpotent_range_is_a_disc() {
    let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    let p = numerical_range_boundary(&a, 720).unwrap();
    let max = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!((max - 0.5).abs() < 1e-9);
    assert!(p.vertices().iter().all(|v| (v.norm() - 0.5).abs() < 1e-9));
}

#[test]
fn u8_range_is_the_phase_triangle() {
    let u8 = catalog::lookup("U8").unwrap().matrix;
    let p = numerical_range_boundary(&u8, 720).unwrap();
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let triangle = RangePolygon::from_points(&[c(1.0, 0.0), w, w.conj()]).unwrap();
    assert!((p.area() - triangle.area()).abs() < 1e-9);
    for v in p.vertices() {
        assert!(triangle.signed_distance(*v).abs() < 1e-9);
    }
    for corner in [c(1.0, 0.0), w, w.conj()] {
        assert!(p.vertices().iter().any(|v| (v - corner).norm() < 1e-9));
    }
}

#[test]
fn range_contains_diagonal_entries() {
    let mut rng = RngStream::new(5, 0);
    for d in 2..=6 {
        let a = sample_ginibre(d, Field::Complex, &mut rng);
        let p = numerical_range_boundary(&a, 720).unwrap();
        for z in a.diagonal() {
            assert!(p.contains(z, 1e-9));
        }
    }
}

#[test]
fn minkowski_product_examples() {
    let point = RangePolygon::from_points(&[c(1.0, 0.0)]).unwrap();
    let a = catalog::lookup("A3b").unwrap().matrix;
    let q = numerical_range_boundary(&a, 360).unwrap();
    let out = minkowski_product(&point, &q, 64).unwrap();
    let expected = q.resample(64);
    assert_eq!(out.len(), expected.len());
    for (x, y) in out.iter().zip(&expected) {
        assert!((x - y).norm() < 1e-12);
    }

    let r = 0.7;
    let disc = numerical_range_boundary(&ComplexMatrix::from_real_rows(&[vec![0.0, 2.0 * r], vec![0.0, 0.0]]).unwrap(), 360)
        .unwrap();
    let cloud = minkowski_product(&disc, &disc, 90).unwrap();
    let max = cloud.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(max <= r * r + 1e-9);
    assert!(max >= r * r - 1e-9);
}
