//! Dense complex matrices, density matrices and the subsystem operations used
//! throughout the crate.
//!
//! Composite bases are ordered lexicographically: for `H_A (x) H_B` with
//! dimensions `(N_A, N_B)` the basis vector `|i_A, i_B>` sits at index
//! `i_A * N_B + i_B`, so the A-subsystem is the major index.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on entry residuals for Hermitian/unitary/normal checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Eigenvalues of a density matrix may dip this far below zero.
pub const POSITIVITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Wire format: `{"dim": D, "entries": [[re, im], ...]}` in row-major order.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let entries = json
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(json.dim, entries)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.dim,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.entries.chunks(self.dim) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix { dim, entries })
    }

    /// Builds a matrix from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        ComplexMatrix::new(dim, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        let dim = u.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in u {
            for b in v {
                entries.push(a * b.conj());
            }
        }
        ComplexMatrix::new(dim, entries)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Squared Hilbert-Schmidt norm `tr(X X^dagger)`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn unitary_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_residual() <= tol
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let a = self.adjoint();
        (self * &a).max_abs_diff(&(&a * self)) <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// `(A - A^dagger) / 2i`, so that `A = H + iK` with both parts Hermitian.
    pub fn skew_hermitian_part(&self) -> Self {
        (self - &self.adjoint()).scale(Complex64::new(0.0, -0.5))
    }

    /// `A - (tr A / D) 1`.
    pub fn traceless(&self) -> Self {
        let shift = self.trace() / self.dim as f64;
        self - &Self::identity(self.dim).scale(shift)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self
            .entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `<v|A|v>` without normalization or dimension checks.
    #[inline]
    pub(crate) fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for (row, vi) in self.entries.chunks_exact(self.dim).zip(v) {
            let mut s = ZERO;
            for (a, vj) in row.iter().zip(v) {
                s += a * vj;
            }
            acc += vi.conj() * s;
        }
        acc
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(m[(i, j)]);
            }
        }
        ComplexMatrix::new(n, entries)
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i1 in 0..na {
        for j1 in 0..na {
            let x = a[(i1, j1)];
            if x == ZERO {
                continue;
            }
            for i2 in 0..nb {
                for j2 in 0..nb {
                    out[(i1 * nb + i2, j1 * nb + j2)] = x * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kron_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

/// Which tensor factor an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn check_bipartition(x: &ComplexMatrix, (na, nb): (usize, usize)) -> Result<()> {
    if na == 0 || nb == 0 || na * nb != x.dim {
        return Err(Error::NotFactorable {
            dim: x.dim,
            factors: format!("{na}x{nb}"),
        });
    }
    Ok(())
}

/// Partial trace over `over`, returning an operator on the remaining factor.
///
/// `tr_A X` has entries `sum_i X[(i, i2), (i, j2)]`; `tr_B X` has entries
/// `sum_j X[(i1, j), (j1, j)]`.
pub fn partial_trace(
    x: &ComplexMatrix,
    dims: (usize, usize),
    over: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartition(x, dims)?;
    let (na, nb) = dims;
    let idx = |a: usize, b: usize| a * nb + b;
    Ok(match over {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(nb);
            for i2 in 0..nb {
                for j2 in 0..nb {
                    out[(i2, j2)] = (0..na).map(|i| x[(idx(i, i2), idx(i, j2))]).sum();
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(na);
            for i1 in 0..na {
                for j1 in 0..na {
                    out[(i1, j1)] = (0..nb).map(|j| x[(idx(i1, j), idx(j1, j))]).sum();
                }
            }
            out
        }
    })
}

/// Partial transpose on one factor: `X[(i1,i2),(j1,j2)] -> X[(i1,j2),(j1,i2)]` for B.
pub fn partial_transpose(
    x: &ComplexMatrix,
    dims: (usize, usize),
    on: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartition(x, dims)?;
    let (na, nb) = dims;
    let idx = |a: usize, b: usize| a * nb + b;
    let mut out = ComplexMatrix::zeros(x.dim);
    for i1 in 0..na {
        for i2 in 0..nb {
            for j1 in 0..na {
                for j2 in 0..nb {
                    let v = x[(idx(i1, i2), idx(j1, j2))];
                    match on {
                        Subsystem::B => out[(idx(i1, j2), idx(j1, i2))] = v,
                        Subsystem::A => out[(idx(j1, i2), idx(i1, j2))] = v,
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Reduced density operator of factor `keep` for a pure state on a product of
/// spaces with the given dimensions.
pub fn reduced_state(psi: &[Complex64], dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: psi.len(),
        });
    }
    if keep >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "subsystem {keep} out of range for {} factors",
            dims.len()
        )));
    }
    let d = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let mut rho = ComplexMatrix::zeros(d);
    for o in 0..outer {
        for r in 0..inner {
            for a in 0..d {
                let pa = psi[(o * d + a) * inner + r];
                for b in 0..d {
                    let pb = psi[(o * d + b) * inner + r];
                    rho[(a, b)] += pa * pb.conj();
                }
            }
        }
    }
    Ok(rho)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Eigensystem> {
    let scale = h.entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let residual = h.hermitian_residual();
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    let eig = SymmetricEigen::new(h.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..h.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(h.dim);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..h.dim {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(h).map(|e| e.values)
}

/// Largest eigenvalue of a Hermitian matrix and a corresponding unit eigenvector.
pub(crate) fn top_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
    let eig = hermitian_eigensystem(h)?;
    let k = h.dim - 1;
    Ok((eig.values[k], eig.vectors.column(k)))
}

/// `<psi|A|psi>` for a normalized state of matching dimension.
pub fn expectation(a: &ComplexMatrix, psi: &crate::PureState) -> Result<Complex64> {
    let amps = psi.amplitudes();
    if amps.len() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: amps.len(),
        });
    }
    let norm = vector_norm(amps);
    if (norm - 1.0).abs() > STRUCTURE_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(a.quadratic_form(amps))
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The single-qubit Pauli basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix {
            dim: 2,
            entries: entries.to_vec(),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let residual = m.hermitian_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermitian residual {residual:e}"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&m)?[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi)?)
    }

    /// Maximally mixed state `1/D`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so tr(rho^2) = sum |rho_ij|^2.
        self.0.hs_norm_sqr()
    }

    /// `tr(rho^dagger X)`.
    pub fn expectation(&self, x: &ComplexMatrix) -> Result<Complex64> {
        if x.dim != self.0.dim {
            return Err(Error::DimensionMismatch {
                expected: self.0.dim,
                found: x.dim,
            });
        }
        let n = x.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(j, i)].conj() * x[(j, i)];
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expectation_basics() {
        use crate::{PureState, Restriction};
        let psi = PureState::new(
            vec![c(0.6, 0.0), c(0.0, 0.8)],
            Restriction::FullComplex(2),
        )
        .unwrap();
        let z = expectation(&ComplexMatrix::identity(2), &psi).unwrap();
        assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-15);
        let e1 = PureState::basis(2, 0);
        let z = expectation(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &e1).unwrap();
        assert_eq!(z, c(1.0, 0.0));
        let a2 = crate::catalog::lookup("A2").unwrap().matrix;
        assert_eq!(expectation(&a2, &e1).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn expectation_errors() {
        use crate::{PureState, Restriction};
        let e1 = PureState::basis(3, 0);
        assert!(matches!(
            expectation(&ComplexMatrix::identity(2), &e1),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = PureState::new_unchecked(vec![c(1.0, 0.0), c(1.0, 0.0)], Restriction::FullComplex(2));
        assert!(matches!(
            expectation(&ComplexMatrix::identity(2), &bad),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let id4 = ComplexMatrix::identity(4);
        let ta = partial_trace(&id4, (2, 2), Subsystem::A).unwrap();
        assert_eq!(ta, ComplexMatrix::identity(2).scale(c(2.0, 0.0)));

        let x = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let ta = partial_trace(&x, (2, 2), Subsystem::A).unwrap();
        let tb = partial_trace(&x, (2, 2), Subsystem::B).unwrap();
        assert_eq!(ta, ComplexMatrix::from_real_diagonal(&[4.0, 6.0]));
        assert_eq!(tb, ComplexMatrix::from_real_diagonal(&[3.0, 7.0]));

        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(5), (2, 2), Subsystem::A),
            Err(Error::NotFactorable { .. })
        ));
    }

    #[test]
    fn partial_trace_of_tensor_product() {
        let p = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.5, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]])
            .unwrap();
        let q = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.5), c(0.0, 0.0)],
            vec![c(4.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
        ])
        .unwrap();
        let x = kron(&p, &q);
        let tb = partial_trace(&x, (2, 3), Subsystem::B).unwrap();
        assert!(tb.max_abs_diff(&p.scale(q.trace())) < 1e-14);
        let ta = partial_trace(&x, (2, 3), Subsystem::A).unwrap();
        assert!(ta.max_abs_diff(&q.scale(p.trace())) < 1e-14);
    }

    #[test]
    fn kron_examples() {
        let id2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&id2, &id2), ComplexMatrix::identity(4));
        let xy = kron(&Pauli::X.matrix(), &Pauli::Y.matrix());
        assert_eq!(xy[(0, 3)], c(0.0, -1.0));
        assert_eq!(xy.dim(), 4);
    }

    #[test]
    fn eigensystem_examples() {
        let d = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let vals = hermitian_eigenvalues(&d).unwrap();
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-14);
        }
        let vals = hermitian_eigenvalues(&Pauli::X.matrix()).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
        let nh = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(hermitian_eigensystem(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pauli_properties() {
        let id = ComplexMatrix::identity(2);
        for p in Pauli::ALL {
            let m = p.matrix();
            assert!(m.is_hermitian(0.0));
            assert!(m.is_unitary(0.0));
            assert_eq!(&m * &m, id);
            if p != Pauli::I {
                assert_eq!(m.trace(), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn partial_transpose_involution() {
        let rows: Vec<Vec<Complex64>> = (0..4)
            .map(|i| (0..4).map(|j| c(i as f64 + 0.1 * j as f64, (i * j) as f64)).collect())
            .collect();
        let x = ComplexMatrix::from_rows(&rows).unwrap();
        for s in [Subsystem::A, Subsystem::B] {
            let t = partial_transpose(&x, (2, 2), s).unwrap();
            assert_eq!(partial_transpose(&t, (2, 2), s).unwrap(), x);
        }
        let ta = partial_transpose(&x, (2, 2), Subsystem::A).unwrap();
        let tb = partial_transpose(&x, (2, 2), Subsystem::B).unwrap();
        assert_eq!(ta.transpose(), tb);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(mixed.purity(), 0.25, epsilon = 1e-15);
        let bad = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = crate::catalog::lookup("B4f").unwrap().matrix;
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"dim\":4,\"entries\":[["));
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"dim":2,"entries":[[1,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn reduced_state_of_product() {
        let u = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let psi = kron_vec(&u, &v);
        let ra = reduced_state(&psi, &[2, 2], 0).unwrap();
        assert!(ra.max_abs_diff(&ComplexMatrix::outer(&u, &u).unwrap()) < 1e-15);
        let rb = reduced_state(&psi, &[2, 2], 1).unwrap();
        assert!(rb.max_abs_diff(&ComplexMatrix::outer(&v, &v).unwrap()) < 1e-15);
    }
}
