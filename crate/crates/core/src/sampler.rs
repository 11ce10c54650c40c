//! Random pure states on restricted manifolds.
//!
//! Every sampler takes an explicit `&mut R: Rng`, so a fixed [`RngStream`]
//! reproduces the same sequence of states bit for bit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{hermitian_eigenvalues, kron_vec, reduced_state, vector_norm, ComplexMatrix};
use crate::{Error, Result};

/// Tolerance on `sum(lambda) = 1` for Schmidt coefficients.
const SCHMIDT_SUM_TOL: f64 = 1e-12;

/// Seeded, splittable random stream.
///
/// Streams with the same `seed` but different `stream_id` are independent
/// ChaCha8 streams; the same `(seed, stream_id)` always yields the same draws.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Complex,
    Real,
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" | "c" => Ok(Field::Complex),
            "real" | "r" => Ok(Field::Real),
            _ => Err(Error::parse("field", s, "expected 'complex' or 'real'")),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Complex => "complex",
            Field::Real => "real",
        })
    }
}

/// Fixed Schmidt coefficients `lambda_1 >= ... >= lambda_N`, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpec {
    lambda: Vec<f64>,
}

impl SchmidtSpec {
    pub fn new(mut lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidArgument("empty Schmidt spectrum".into()));
        }
        if lambda.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Schmidt coefficients must be nonnegative, got {lambda:?}"
            )));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > SCHMIDT_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "Schmidt coefficients sum to {sum}, not 1"
            )));
        }
        lambda.sort_by(|a, b| b.total_cmp(a));
        Ok(SchmidtSpec { lambda })
    }

    /// `(1/N, ..., 1/N)`.
    pub fn maximally_entangled(n: usize) -> Self {
        SchmidtSpec {
            lambda: vec![1.0 / n as f64; n],
        }
    }

    /// `(1, 0, ..., 0)`.
    pub fn product(n: usize) -> Self {
        let mut lambda = vec![0.0; n];
        lambda[0] = 1.0;
        SchmidtSpec { lambda }
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `sum lambda_i^2`, the purity of either reduced state.
    pub fn purity(&self) -> f64 {
        self.lambda.iter().map(|l| l * l).sum()
    }
}

/// The manifold of pure states a shadow is restricted to.
#[derive(Clone, Debug, PartialEq)]
pub enum Restriction {
    /// All pure states of dimension `D` (Fubini-Study measure).
    FullComplex(usize),
    /// Real pure states of dimension `D`.
    FullReal(usize),
    /// Product states `psi_1 (x) ... (x) psi_m` with the given factor dimensions.
    Product { dims: Vec<usize>, field: Field },
    /// Local-unitary orbit of `sum_i |i,i> / sqrt(N)` on `N x N`.
    MaxEntangled { n: usize, field: Field },
    /// Local-unitary orbit of `(|000> + |111>) / sqrt 2`.
    GhzOrbit,
    /// Local-unitary orbit of `(|100> + |010> + |001>) / sqrt 3`.
    WOrbit,
    /// Bipartite `N x N` states with fixed Schmidt coefficients.
    Schmidt(SchmidtSpec),
}

impl Restriction {
    pub fn dim(&self) -> usize {
        match self {
            Restriction::FullComplex(d) | Restriction::FullReal(d) => *d,
            Restriction::Product { dims, .. } => dims.iter().product(),
            Restriction::MaxEntangled { n, .. } => n * n,
            Restriction::GhzOrbit | Restriction::WOrbit => 8,
            Restriction::Schmidt(spec) => spec.n() * spec.n(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Restriction::FullReal(_) => Field::Real,
            Restriction::Product { field, .. } | Restriction::MaxEntangled { field, .. } => *field,
            _ => Field::Complex,
        }
    }

    /// Checks the typed invariants (positive dimensions, at least one factor).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("{msg}: {self}")));
        match self {
            Restriction::FullComplex(0) | Restriction::FullReal(0) => bad("dimension must be positive"),
            Restriction::Product { dims, .. } if dims.is_empty() || dims.contains(&0) => {
                bad("product factors must be positive")
            }
            Restriction::MaxEntangled { n: 0, .. } => bad("dimension must be positive"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::FullComplex(d) => write!(f, "complex:{d}"),
            Restriction::FullReal(d) => write!(f, "real:{d}"),
            Restriction::Product { dims, field } => {
                let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "product:{}:{field}", dims.join("x"))
            }
            Restriction::MaxEntangled { n, field } => write!(f, "maxent:{n}:{field}"),
            Restriction::GhzOrbit => f.write_str("ghz"),
            Restriction::WOrbit => f.write_str("w"),
            Restriction::Schmidt(spec) => {
                let l: Vec<String> = spec.lambda.iter().map(|x| x.to_string()).collect();
                write!(f, "schmidt:{}", l.join(","))
            }
        }
    }
}

impl FromStr for Restriction {
    type Err = Error;

    /// Parses `complex:4`, `real:3`, `product:2x2[:field]`, `maxent:2[:field]`,
    /// `ghz`, `w` and `schmidt:0.75,0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::parse("restriction", s, reason);
        let parse_dim = |t: &str| -> Result<usize> {
            match t.trim().parse::<usize>() {
                Ok(d) if d > 0 => Ok(d),
                _ => Err(err("dimensions must be positive integers")),
            }
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let field_at = |i: usize| -> Result<Field> {
            match parts.get(i) {
                None => Ok(Field::Complex),
                Some(t) => t.parse().map_err(|_| err("unknown field")),
            }
        };
        let r = match parts[0].to_ascii_lowercase().as_str() {
            "complex" if parts.len() == 2 => Restriction::FullComplex(parse_dim(parts[1])?),
            "real" if parts.len() == 2 => Restriction::FullReal(parse_dim(parts[1])?),
            "product" | "sep" if (2..=3).contains(&parts.len()) => Restriction::Product {
                dims: parts[1].split('x').map(parse_dim).collect::<Result<_>>()?,
                field: field_at(2)?,
            },
            "maxent" | "ent" if (2..=3).contains(&parts.len()) => Restriction::MaxEntangled {
                n: parse_dim(parts[1])?,
                field: field_at(2)?,
            },
            "ghz" if parts.len() == 1 => Restriction::GhzOrbit,
            "w" if parts.len() == 1 => Restriction::WOrbit,
            "schmidt" if parts.len() == 2 => {
                let lambda = parts[1]
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| err("bad Schmidt coefficient")))
                    .collect::<Result<Vec<_>>>()?;
                Restriction::Schmidt(SchmidtSpec::new(lambda)?)
            }
            _ => return Err(err("unrecognized restriction")),
        };
        r.validate()?;
        Ok(r)
    }
}

/// A unit vector tagged with the manifold it was drawn from.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    restriction: Restriction,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, restriction: Restriction) -> Result<Self> {
        if amplitudes.len() != restriction.dim() {
            return Err(Error::DimensionMismatch {
                expected: restriction.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > crate::linalg::STRUCTURE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState {
            amplitudes,
            restriction,
        })
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<Complex64>, restriction: Restriction) -> Self {
        PureState {
            amplitudes,
            restriction,
        }
    }

    /// Computational basis vector `|k>` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); d];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        PureState {
            amplitudes,
            restriction: Restriction::FullComplex(d),
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Distance from the declared manifold: the largest violation among
    /// normalization, reality (real fields), factorization (product states),
    /// or reduced-state spectrum (entangled orbits and Schmidt states).
    pub fn membership_residual(&self) -> Result<f64> {
        let psi = &self.amplitudes;
        let mut residual = (vector_norm(psi) - 1.0).abs();
        if self.restriction.field() == Field::Real {
            residual = residual.max(psi.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
        }
        let spectrum_gap = |dims: &[usize], keep: usize, target: &[f64]| -> Result<f64> {
            let mut eig = hermitian_eigenvalues(&reduced_state(psi, dims, keep)?)?;
            eig.sort_by(|a, b| b.total_cmp(a));
            Ok(eig
                .iter()
                .zip(target)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        };
        match &self.restriction {
            Restriction::FullComplex(_) | Restriction::FullReal(_) => {}
            Restriction::Product { dims, .. } => {
                for k in 0..dims.len() {
                    let mut target = vec![0.0; dims[k]];
                    target[0] = 1.0;
                    residual = residual.max(spectrum_gap(dims, k, &target)?);
                }
            }
            Restriction::MaxEntangled { n, .. } => {
                let rho = reduced_state(psi, &[*n, *n], 0)?;
                let mixed = ComplexMatrix::identity(*n).scale(Complex64::new(1.0 / *n as f64, 0.0));
                residual = residual.max(rho.max_abs_diff(&mixed));
            }
            Restriction::GhzOrbit => {
                for k in 0..3 {
                    residual = residual.max(spectrum_gap(&[2, 2, 2], k, &[0.5, 0.5])?);
                }
            }
            Restriction::WOrbit => {
                for k in 0..3 {
                    residual = residual.max(spectrum_gap(&[2, 2, 2], k, &[2.0 / 3.0, 1.0 / 3.0])?);
                }
            }
            Restriction::Schmidt(spec) => {
                let n = spec.n();
                residual = residual.max(spectrum_gap(&[n, n], 0, spec.lambda())?);
            }
        }
        Ok(residual)
    }
}

#[inline]
fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

#[inline]
fn gaussian_entry<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Complex64 {
    match field {
        Field::Complex => Complex64::new(gaussian(rng), gaussian(rng)),
        Field::Real => Complex64::new(gaussian(rng), 0.0),
    }
}

/// Normalized Gaussian vector: Haar-distributed on the unit sphere of `C^d` or `R^d`.
pub(crate) fn random_unit_vector<R: Rng + ?Sized>(d: usize, field: Field, rng: &mut R) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> = (0..d).map(|_| gaussian_entry(field, rng)).collect();
        let norm = vector_norm(&v);
        if norm > 0.0 {
            let inv = 1.0 / norm;
            v.iter_mut().for_each(|z| *z *= inv);
            return v;
        }
    }
}

/// Haar-random unitary (`Field::Complex`) or orthogonal (`Field::Real`) matrix.
///
/// Columns of a Ginibre matrix are orthonormalized by modified Gram-Schmidt
/// with one reorthogonalization pass; this is the QR factorization with a
/// positive diagonal in `R`, whose `Q` factor is Haar distributed.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> ComplexMatrix {
    assert!(n > 0, "unitary dimension must be positive");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian_entry(field, rng)).collect();
        let raw = vector_norm(&v);
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= proj * qi);
            }
        }
        let norm = vector_norm(&v);
        // Rank-deficient draws have probability zero; redraw if one shows up numerically.
        if norm <= 1e-10 * raw.max(1.0) {
            continue;
        }
        let inv = 1.0 / norm;
        v.iter_mut().for_each(|z| *z *= inv);
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Matrix of i.i.d. standard Gaussian entries (complex or real).
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> ComplexMatrix {
    let entries = (0..n * n).map(|_| gaussian_entry(field, rng)).collect();
    ComplexMatrix::new(n, entries).expect("n * n entries")
}

/// Dirichlet(`s`, ..., `s`) vector on the `d - 1` simplex from normalized Gamma(`s`) variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(d: usize, s: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Dirichlet parameter must be positive, got {s}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("Dirichlet dimension must be positive".into()));
    }
    let gamma = Gamma::new(s, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    loop {
        let mut q: Vec<f64> = (0..d).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = q.iter().sum();
        if sum > 0.0 {
            q.iter_mut().for_each(|x| *x /= sum);
            return Ok(q);
        }
    }
}

/// `sum_i sqrt(lambda_i) U_A|i> (x) U_B|i>` with independent Haar `U_A`, `U_B`.
pub fn sample_schmidt_state<R: Rng + ?Sized>(spec: &SchmidtSpec, rng: &mut R) -> PureState {
    let amps = schmidt_amplitudes(spec, rng);
    PureState::new_unchecked(amps, Restriction::Schmidt(spec.clone()))
}

fn schmidt_amplitudes<R: Rng + ?Sized>(spec: &SchmidtSpec, rng: &mut R) -> Vec<Complex64> {
    let n = spec.n();
    let ua = sample_haar_unitary(n, Field::Complex, rng);
    let ub = sample_haar_unitary(n, Field::Complex, rng);
    let weights: Vec<f64> = spec.lambda.iter().map(|l| l.sqrt()).collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            amps[a * n + b] = weights
                .iter()
                .enumerate()
                .map(|(i, w)| ua[(a, i)] * ub[(b, i)] * *w)
                .sum();
        }
    }
    amps
}

/// Local-unitary image of a three-qubit seed given as `(weight, [q1, q2, q3])` terms.
fn three_qubit_orbit<R: Rng + ?Sized>(terms: &[(f64, [usize; 3])], rng: &mut R) -> Vec<Complex64> {
    let us: Vec<ComplexMatrix> = (0..3)
        .map(|_| sample_haar_unitary(2, Field::Complex, rng))
        .collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    for &(w, bits) in terms {
        let cols: Vec<Vec<Complex64>> = bits.iter().zip(&us).map(|(&b, u)| u.column(b)).collect();
        let v = kron_vec(&kron_vec(&cols[0], &cols[1]), &cols[2]);
        amps.iter_mut().zip(v).for_each(|(a, x)| *a += x * w);
    }
    amps
}

/// Amplitudes of a random state on the given manifold.
pub(crate) fn sample_amplitudes<R: Rng + ?Sized>(restriction: &Restriction, rng: &mut R) -> Vec<Complex64> {
    match restriction {
        Restriction::FullComplex(d) => random_unit_vector(*d, Field::Complex, rng),
        Restriction::FullReal(d) => random_unit_vector(*d, Field::Real, rng),
        Restriction::Product { dims, field } => {
            let mut psi = random_unit_vector(dims[0], *field, rng);
            for &d in &dims[1..] {
                psi = kron_vec(&psi, &random_unit_vector(d, *field, rng));
            }
            psi
        }
        Restriction::MaxEntangled { n, field } => {
            // (U_A (x) U_B)|psi+> has amplitudes (U_A U_B^T)_{ij} / sqrt N, and
            // U_A U_B^T is itself Haar distributed.
            let u = sample_haar_unitary(*n, *field, rng);
            let s = 1.0 / (*n as f64).sqrt();
            u.entries().iter().map(|z| z * s).collect()
        }
        Restriction::GhzOrbit => three_qubit_orbit(&[(FRAC_1_SQRT_2, [0, 0, 0]), (FRAC_1_SQRT_2, [1, 1, 1])], rng),
        Restriction::WOrbit => {
            let w = 1.0 / 3f64.sqrt();
            three_qubit_orbit(&[(w, [1, 0, 0]), (w, [0, 1, 0]), (w, [0, 0, 1])], rng)
        }
        Restriction::Schmidt(spec) => schmidt_amplitudes(spec, rng),
    }
}

/// Draws one state from the restriction's induced measure.
pub fn sample_pure<R: Rng + ?Sized>(restriction: &Restriction, rng: &mut R) -> PureState {
    PureState::new_unchecked(sample_amplitudes(restriction, rng), restriction.clone())
}
