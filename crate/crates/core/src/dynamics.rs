//! Two-qubit dynamics: a fixed entangling unitary interleaved with local
//! depolarizing noise on the second qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigenvalues, kron, partial_transpose, ComplexMatrix, DensityMatrix, Pauli, Subsystem};
use crate::{Error, Result};

/// Full depolarization of the second qubit.
pub const MAX_BETA: f64 = 0.75;
pub const DEFAULT_PPT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsConfig {
    /// Interaction strength in `U = exp(i alpha sigma_x (x) sigma_y)`.
    pub alpha: f64,
    /// Depolarizing rate in `[0, 3/4]`.
    pub beta: f64,
    pub steps: usize,
    pub observable: ComplexMatrix,
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        if !(0.0..=MAX_BETA).contains(&self.beta) {
            return Err(Error::InvalidArgument(format!("beta = {} outside [0, 3/4]", self.beta)));
        }
        if self.observable.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.observable.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: usize,
    /// `tr(rho_t^dagger X)`.
    pub z: Complex64,
    pub separable: bool,
    pub purity: f64,
    pub min_pt_eigenvalue: f64,
}

/// `cos(alpha) 1 + i sin(alpha) sigma_x (x) sigma_y`, exact because the
/// generator squares to the identity.
pub fn entangling_unitary(alpha: f64) -> ComplexMatrix {
    let generator = kron(&Pauli::X.matrix(), &Pauli::Y.matrix());
    &ComplexMatrix::identity(4).scale(Complex64::new(alpha.cos(), 0.0))
        + &generator.scale(Complex64::new(0.0, alpha.sin()))
}

/// `{sqrt(1-beta) 1, sqrt(beta/3) 1 (x) sigma_p}` for `p = x, y, z`.
pub fn kraus_operators(beta: f64) -> Result<Vec<ComplexMatrix>> {
    if !(0.0..=MAX_BETA).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta = {beta} outside [0, 3/4]")));
    }
    let id2 = ComplexMatrix::identity(2);
    let w = Complex64::new((beta / 3.0).sqrt(), 0.0);
    let mut ops = vec![ComplexMatrix::identity(4).scale(Complex64::new((1.0 - beta).sqrt(), 0.0))];
    ops.extend([Pauli::X, Pauli::Y, Pauli::Z].map(|p| kron(&id2, &p.matrix()).scale(w)));
    Ok(ops)
}

/// `(|00> + |11>)(<00| + <11|) / 2`.
pub fn bell_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [s, 0.0, 0.0, s].map(|x| Complex64::new(x, 0.0));
    DensityMatrix::from_pure(&psi).expect("Bell vector is normalized")
}

/// `sum_k K rho K^dagger`.
pub fn apply_channel(rho: &ComplexMatrix, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    kraus.iter().fold(ComplexMatrix::zeros(rho.dim()), |acc, k| &acc + &(&(k * rho) * &k.adjoint()))
}

/// Stepper with the unitary and Kraus set precomputed.
#[derive(Clone, Debug)]
pub struct Evolution {
    unitary: ComplexMatrix,
    unitary_adj: ComplexMatrix,
    kraus: Vec<ComplexMatrix>,
}

impl Evolution {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let unitary = entangling_unitary(alpha);
        Ok(Evolution {
            unitary_adj: unitary.adjoint(),
            unitary,
            kraus: kraus_operators(beta)?,
        })
    }

    /// `rho -> U Phi(rho) U^dagger`, without re-validating the output.
    pub fn step_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let noisy = apply_channel(rho, &self.kraus);
        &(&self.unitary * &noisy) * &self.unitary_adj
    }
}

/// One step `rho_{t+1} = U Phi(rho_t) U^dagger`.
pub fn step(rho: &DensityMatrix, cfg: &DynamicsConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let next = Evolution::new(cfg.alpha, cfg.beta)?.step_matrix(rho.matrix());
    DensityMatrix::new(next)
}

/// PPT test with the transpose on the second qubit; in `2 x 2` this decides
/// separability exactly.
pub fn is_separable_2x2(rho: &DensityMatrix, tol: f64) -> Result<(bool, f64)> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let pt = partial_transpose(rho.matrix(), (2, 2), Subsystem::B)?;
    let min = hermitian_eigenvalues(&pt)?[0];
    Ok((min >= -tol, min))
}

fn point(t: usize, rho: &DensityMatrix, x: &ComplexMatrix) -> Result<TrajectoryPoint> {
    let (separable, min_pt_eigenvalue) = is_separable_2x2(rho, DEFAULT_PPT_TOL)?;
    Ok(TrajectoryPoint {
        t,
        z: rho.expectation(x)?,
        separable,
        purity: rho.purity(),
        min_pt_eigenvalue,
    })
}

/// Points for `t = 0..=steps`, starting from [`bell_state`].
pub fn trajectory(cfg: &DynamicsConfig) -> Result<Vec<TrajectoryPoint>> {
    cfg.validate()?;
    let evo = Evolution::new(cfg.alpha, cfg.beta)?;
    let mut rho = bell_state();
    let mut out = Vec::with_capacity(cfg.steps + 1);
    out.push(point(0, &rho, &cfg.observable)?);
    for t in 1..=cfg.steps {
        rho = DensityMatrix::new(evo.step_matrix(rho.matrix()))?;
        out.push(point(t, &rho, &cfg.observable)?);
    }
    Ok(out)
}

/// Number of consecutive pairs with different separability flags.
pub fn separability_transitions(points: &[TrajectoryPoint]) -> usize {
    points.windows(2).filter(|w| w[0].separable != w[1].separable).count()
}
