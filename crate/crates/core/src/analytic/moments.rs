//! Closed-form first and second moments of product, maximally entangled and
//! fixed-Schmidt-spectrum shadows on `N x N` systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{partial_trace, ComplexMatrix, Subsystem, STRUCTURE_TOL};
use crate::sampler::{Field, Restriction, SchmidtSpec};
use crate::{Error, Result};

/// Exact moments of a shadow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: Complex64,
    /// `E(z conj z)`.
    pub second_abs: f64,
    pub variance: f64,
    pub exact: bool,
    pub formula_id: String,
}

/// The four quadratic functionals every bipartite second moment is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFunctionals {
    /// `|tr X|^2`
    pub trace_abs_sqr: f64,
    /// `||tr_A X||^2` (Hilbert-Schmidt)
    pub reduced_a_sqr: f64,
    /// `||tr_B X||^2`
    pub reduced_b_sqr: f64,
    /// `||X||^2`
    pub hs_norm_sqr: f64,
}

impl MatrixFunctionals {
    pub fn new(x: &ComplexMatrix, n: usize) -> Result<Self> {
        check_square_bipartite(x, n)?;
        Ok(MatrixFunctionals {
            trace_abs_sqr: x.trace().norm_sqr(),
            reduced_a_sqr: partial_trace(x, (n, n), Subsystem::A)?.hs_norm_sqr(),
            reduced_b_sqr: partial_trace(x, (n, n), Subsystem::B)?.hs_norm_sqr(),
            hs_norm_sqr: x.hs_norm_sqr(),
        })
    }
}

fn check_square_bipartite(x: &ComplexMatrix, n: usize) -> Result<()> {
    if n == 0 || x.dim() != n * n {
        return Err(Error::NotFactorable {
            dim: x.dim(),
            factors: format!("{n}x{n}"),
        });
    }
    Ok(())
}

fn report(mean: Complex64, second_abs: f64, variance: f64, formula_id: &str) -> MomentReport {
    MomentReport {
        mean,
        second_abs,
        variance,
        exact: true,
        formula_id: formula_id.to_owned(),
    }
}

/// Moments over product states `a (x) b`, `a, b` Haar on `C^N`.
pub fn separable_moments(x: &ComplexMatrix, n: usize) -> Result<MomentReport> {
    let f = MatrixFunctionals::new(x, n)?;
    let nf = n as f64;
    let denom = nf * nf * (nf + 1.0) * (nf + 1.0);
    let second = (f.trace_abs_sqr + f.reduced_a_sqr + f.reduced_b_sqr + f.hs_norm_sqr) / denom;
    let variance = (-(2.0 * nf + 1.0) / (nf * nf) * f.trace_abs_sqr
        + f.reduced_a_sqr
        + f.reduced_b_sqr
        + f.hs_norm_sqr)
        / denom;
    Ok(report(x.trace() / (nf * nf), second, variance, "separable"))
}

/// Moments over maximally entangled states `(U (x) 1)|psi+>`.
pub fn entangled_moments(x: &ComplexMatrix, n: usize) -> Result<MomentReport> {
    let f = MatrixFunctionals::new(x, n)?;
    if n < 2 {
        return Err(Error::InvalidArgument("entangled moments need N >= 2".into()));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let partial = (f.reduced_a_sqr + f.reduced_b_sqr) / (nf * n2 * (n2 - 1.0));
    let second = (f.hs_norm_sqr + f.trace_abs_sqr) / (n2 * (n2 - 1.0)) - partial;
    let variance = (f.hs_norm_sqr + f.trace_abs_sqr / n2) / (n2 * (n2 - 1.0)) - partial;
    Ok(report(x.trace() / n2, second, variance.max(0.0), "entangled"))
}

/// Weingarten contraction coefficients for `E(z conj z)` over
/// `(U_A (x) U_B) |x>` with fixed Schmidt coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollinsSniadyCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub functionals: MatrixFunctionals,
}

impl CollinsSniadyCoeffs {
    /// `c1 + c4 + (c2 + c3) sum lambda_i^2`.
    pub fn second_moment(&self, purity: f64) -> f64 {
        self.c1 + self.c4 + (self.c2 + self.c3) * purity
    }
}

pub fn collins_sniady_coeffs(x: &ComplexMatrix, n: usize) -> Result<CollinsSniadyCoeffs> {
    let f = MatrixFunctionals::new(x, n)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the coefficients have a pole at N = 1".into()));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let k = 1.0 / ((n2 - 1.0) * (n2 - 1.0));
    let (t, a, b, h) = (f.trace_abs_sqr, f.reduced_a_sqr, f.reduced_b_sqr, f.hs_norm_sqr);
    Ok(CollinsSniadyCoeffs {
        c1: k * (t - a / nf - b / nf + h / n2),
        c2: k * (b - h / nf - t / nf + a / n2),
        c3: k * (a - h / nf - t / nf + b / n2),
        c4: k * (h - a / nf - b / nf + t / n2),
        functionals: f,
    })
}

/// `E(z conj z)` over states with Schmidt coefficients `lambda`.
pub fn schmidt_second_moment(x: &ComplexMatrix, n: usize, lambda: &SchmidtSpec) -> Result<f64> {
    if lambda.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambda.n(),
        });
    }
    Ok(collins_sniady_coeffs(x, n)?.second_moment(lambda.purity()))
}

/// For diagonal `X = diag(d1, d2, d3, d4)` on two qubits, the entangled shadow
/// of `X` equals the full shadow of `diag(d1 + d4, d2 + d3) / 2`.
pub fn reduced_matrix_y(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: x.dim(),
        });
    }
    if !x.is_diagonal(STRUCTURE_TOL) {
        return Err(Error::NotDiagonal);
    }
    let d = x.diagonal();
    Ok(ComplexMatrix::from_diagonal(&[(d[0] + d[3]) * 0.5, (d[1] + d[2]) * 0.5]))
}

/// `(1/48) |C11 + C22 - C12 - C21|^2`: the entangled two-qubit variance of
/// `diag(C11, C12, C21, C22)`.
pub fn entangled_variance_2x2_diag(c: [[Complex64; 2]; 2]) -> f64 {
    (c[0][0] + c[1][1] - c[0][1] - c[1][0]).norm_sqr() / 48.0
}

/// Moments over Haar-random pure states of `C^D`, valid for any square `A`:
/// `E|z|^2 = (|tr A|^2 + tr(A A^dagger)) / (D (D + 1))`.
pub fn full_complex_moments(a: &ComplexMatrix) -> MomentReport {
    let d = a.dim() as f64;
    let mean = a.trace() / d;
    let second = (a.trace().norm_sqr() + a.hs_norm_sqr()) / (d * (d + 1.0));
    report(mean, second, (second - mean.norm_sqr()).max(0.0), "full-complex")
}

/// The closed-form moments that apply to `restriction`, or `None` when no
/// formula is implemented for it.
pub fn restricted_moments(a: &ComplexMatrix, restriction: &Restriction) -> Result<Option<MomentReport>> {
    restriction.validate()?;
    if a.dim() != restriction.dim() {
        return Err(Error::DimensionMismatch {
            expected: restriction.dim(),
            found: a.dim(),
        });
    }
    Ok(match restriction {
        Restriction::FullComplex(_) => Some(full_complex_moments(a)),
        Restriction::Product { dims, field: Field::Complex } if dims.len() == 2 && dims[0] == dims[1] => {
            Some(separable_moments(a, dims[0])?)
        }
        Restriction::MaxEntangled { n, field: Field::Complex } if *n >= 2 => Some(entangled_moments(a, *n)?),
        Restriction::Schmidt(spec) if spec.n() >= 2 => {
            let n = spec.n();
            let mean = a.trace() / (n * n) as f64;
            let second = schmidt_second_moment(a, n, spec)?;
            Some(report(mean, second, (second - mean.norm_sqr()).max(0.0), "schmidt"))
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(d)
    }

    #[test]
    fn functionals_of_diag_1234() {
        let f = MatrixFunctionals::new(&diag(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        // tr_A = diag(4, 6), tr_B = diag(3, 7)
        assert_eq!(
            (f.trace_abs_sqr, f.reduced_a_sqr, f.reduced_b_sqr, f.hs_norm_sqr),
            (100.0, 52.0, 58.0, 30.0)
        );
    }

    #[test]
    fn separable_diag_1234() {
        let r = separable_moments(&diag(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_abs_diff_eq!(r.mean.re, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.variance, 5.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.second_abs - r.mean.norm_sqr(), r.variance, epsilon = 1e-12);
    }

    #[test]
    fn entangled_examples() {
        let r = entangled_moments(&diag(&[1.0, 0.0, 0.0, 1.0]), 2).unwrap();
        assert_abs_diff_eq!(r.variance, 1.0 / 12.0, epsilon = 1e-15);
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_abs_diff_eq!(entangled_variance_2x2_diag([[c(1.0), c(0.0)], [c(0.0), c(1.0)]]), 1.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(entangled_moments(&diag(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap().variance, 0.0, epsilon = 1e-14);
        let id = entangled_moments(&ComplexMatrix::identity(9), 3).unwrap();
        assert_abs_diff_eq!(id.variance, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(id.second_abs, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_coefficients_sum_to_one() {
        let cs = collins_sniady_coeffs(&ComplexMatrix::identity(4), 2).unwrap();
        assert_abs_diff_eq!(cs.c1 + cs.c2 + cs.c3 + cs.c4, 1.0, epsilon = 1e-14);
        assert!(collins_sniady_coeffs(&ComplexMatrix::identity(1), 1).is_err());
    }

    #[test]
    fn reduced_y() {
        let y = reduced_matrix_y(&diag(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(y, diag(&[2.5, 2.5]));
        assert_eq!(reduced_matrix_y(&diag(&[1.0, 0.0, 0.0, 1.0])).unwrap(), diag(&[1.0, 0.0]));
        assert!(reduced_matrix_y(&ComplexMatrix::identity(3)).is_err());
        let mut x = diag(&[1.0; 4]);
        x[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(reduced_matrix_y(&x), Err(Error::NotDiagonal)));
    }

    #[test]
    fn wrong_dimension() {
        assert!(separable_moments(&ComplexMatrix::identity(6), 2).is_err());
        assert!(entangled_moments(&ComplexMatrix::identity(5), 2).is_err());
        let spec = SchmidtSpec::new(vec![0.5, 0.5]).unwrap();
        assert!(schmidt_second_moment(&ComplexMatrix::identity(9), 3, &spec).is_err());
    }

    #[test]
    fn full_complex_against_simplex_moments() {
        // Haar |psi_i|^2 is flat Dirichlet: E x_i^2 = 2/(D(D+1)), E x_i x_j = 1/(D(D+1)).
        let c = Complex64::new;
        let d = [c(1.0, 0.0), c(-0.5, 2.0), c(0.25, -1.0)];
        let k = 1.0 / 12.0;
        let mut oracle = 0.0;
        for (i, a) in d.iter().enumerate() {
            for (j, b) in d.iter().enumerate() {
                oracle += (a * b.conj()).re * if i == j { 2.0 * k } else { k };
            }
        }
        let m = full_complex_moments(&ComplexMatrix::from_diagonal(&d));
        assert_abs_diff_eq!(m.second_abs, oracle, epsilon = 1e-14);

        // z = conj(a) b for the nilpotent Jordan block; E|a|^2|b|^2 = 1/6.
        let jordan = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let m = full_complex_moments(&jordan);
        assert_abs_diff_eq!(m.second_abs, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.mean.norm(), 0.0);
    }

    #[test]
    fn dispatch_by_restriction() {
        let x = diag(&[1.0, 2.0, 3.0, 4.0]);
        let sep = restricted_moments(&x, &"product:2x2".parse().unwrap()).unwrap().unwrap();
        assert_eq!(sep, separable_moments(&x, 2).unwrap());
        let ent = restricted_moments(&x, &"maxent:2".parse().unwrap()).unwrap().unwrap();
        assert_eq!(ent.formula_id, "entangled");
        let sch = restricted_moments(&x, &"schmidt:0.5,0.5".parse().unwrap()).unwrap().unwrap();
        assert_abs_diff_eq!(sch.second_abs, ent.second_abs, epsilon = 1e-12);
        assert!(restricted_moments(&x, &"real:4".parse().unwrap()).unwrap().is_none());
        assert!(restricted_moments(&x, &"complex:3".parse().unwrap()).is_err());
    }
}
