//! Haar integrals over small unitary groups.

use super::hypergeometric::{pfq, pochhammer};
use crate::Result;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `E[b1^n1 b2^n2 b3^n3 b4^n4]` over Haar `U(3)`, where `b = |U_ij|^2` for the
/// entries `b1 = (1,1)`, `b2 = (1,2)`, `b3 = (2,1)`, `b4 = (2,2)`.
///
/// Prefactor `n1! n2! n3! n4! (2)_{n2+n3} (2)_{n1+n2+n4}` over
/// `(3)_{n} (2)_{n2+n4} (2)_{n1+n2} (2)_{n3}` times the terminating
/// `4F3(-n1, -n2, -n4, 1+n3; 1, 2+n3, -1-n1-n2-n4; 1)`.
pub fn u3_monomial_integral(n1: u32, n2: u32, n3: u32, n4: u32) -> Result<f64> {
    let total = n1 + n2 + n3 + n4;
    let num = factorial(n1)
        * factorial(n2)
        * factorial(n3)
        * factorial(n4)
        * pochhammer(2.0, n2 + n3)
        * pochhammer(2.0, n1 + n2 + n4);
    let den = pochhammer(3.0, total) * pochhammer(2.0, n2 + n4) * pochhammer(2.0, n1 + n2) * pochhammer(2.0, n3);
    let (f1, f2, f3, f4) = (f64::from(n1), f64::from(n2), f64::from(n3), f64::from(n4));
    let series = pfq(
        &[-f1, -f2, -f4, 1.0 + f3],
        &[1.0, 2.0 + f3, -1.0 - f1 - f2 - f4],
        1.0,
    )?;
    Ok(num / den * series)
}

/// Doubly centred `3 x 3` array `gamma_ij = C_ij - C_i./3 - C_.j/3 + C../9`,
/// whose rows and columns sum to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gamma3x3 {
    pub full: [[f64; 3]; 3],
    /// `C..`, the sum of all entries of `C`.
    pub total: f64,
}

impl Gamma3x3 {
    pub fn new(c: &[[f64; 3]; 3]) -> Self {
        let row: Vec<f64> = (0..3).map(|i| c[i].iter().sum()).collect();
        let col: Vec<f64> = (0..3).map(|j| (0..3).map(|i| c[i][j]).sum()).collect();
        let total: f64 = row.iter().sum();
        let mut full = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                full[i][j] = c[i][j] - row[i] / 3.0 - col[j] / 3.0 + total / 9.0;
            }
        }
        Gamma3x3 { full, total }
    }

    /// The leading `2 x 2` block, which determines the rest.
    pub fn block(&self) -> [[f64; 2]; 2] {
        [[self.full[0][0], self.full[0][1]], [self.full[1][0], self.full[1][1]]]
    }
}

/// `E z^2` for `z = sum_ij C_ij |U_ij|^2 / 3`, `U` Haar on `U(3)`; equivalently the
/// second moment of the entangled shadow of `diag(C_11, C_12, ..., C_33)` on `3 x 3`.
///
/// With `G` the leading block of [`Gamma3x3`]:
/// `(1/72){3 sum G^2 + (sum G)^2 + 2 (G11 + G22)(G12 + G21)} + (C../9)^2`.
pub fn entangled_second_moment_3x3(c: &[[f64; 3]; 3]) -> f64 {
    let gamma = Gamma3x3::new(c);
    let g = gamma.block();
    let sum_sq: f64 = g.iter().flatten().map(|x| x * x).sum();
    let sum: f64 = g.iter().flatten().sum();
    let centred = (3.0 * sum_sq + sum * sum + 2.0 * (g[0][0] + g[1][1]) * (g[0][1] + g[1][0])) / 72.0;
    centred + (gamma.total / 9.0).powi(2)
}

/// `int q1^n q2^k = n! k! / (n + k + 1)!` over the Bell-basis weights of a
/// random maximally entangled two-qubit state.
pub fn bell_orbit_simplex_moment(n: u32, k: u32) -> f64 {
    // n! k! / (n+k+1)! = 1 / ((n+k+1) C(n+k, n))
    let mut binom = 1.0;
    for j in 1..=k {
        binom *= f64::from(n + j) / f64::from(j);
    }
    1.0 / (f64::from(n + k + 1) * binom)
}
