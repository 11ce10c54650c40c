//! Real shadows: densities, distribution functions, sphere moments and
//! variance formulas for normal matrices.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use super::hypergeometric::{hyp2f1, pochhammer};
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

const TIE_SHIFT: f64 = 1e-12;
const CDF_TARGET_ERR: f64 = 1e-10;

/// Density of the real shadow of `diag(1, 0, -1)` on `(-1, 1)`:
/// `g3(t) = 2F1(1/2, 1/2; 1; (|t| - 1)/(2|t|)) / (2 sqrt(2|t|))`.
///
/// Zero for `|t| > 1`; at `|t| = 1` the one-sided limit `1/(2 sqrt 2)`.
/// `t = 0` is an integrable singularity and is reported as an error.
pub fn g3_density(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::InvalidArgument("t is NaN".into()));
    }
    let s = t.abs();
    if s == 0.0 {
        return Err(Error::Singular(0.0));
    }
    if s > 1.0 {
        return Ok(0.0);
    }
    let x = (s - 1.0) / (2.0 * s);
    Ok(hyp2f1(0.5, 0.5, 1.0, x)? / (2.0 * (2.0 * s).sqrt()))
}

/// `int t^n g3(t) dt` in closed form: 0 for odd `n`, and for `n = 2m`
/// `(2m+2)(2m+4)...(4m) / ((2m+1)(2m+3)...(4m+1))`.
pub fn g3_moment(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let m = n / 2;
    let num: f64 = (1..=m).map(|j| (2 * m + 2 * j) as f64).product();
    let den: f64 = (0..=m).map(|j| (2 * m + 2 * j + 1) as f64).product();
    num / den
}

/// The same moment as the alternating sum
/// `sum_k C(n,k) (-1)^k (1/2)_{n-k} (1/2)_k / (3/2)_n`.
pub fn g3_moment_series(n: u32) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * pochhammer(0.5, n - k) * pochhammer(0.5, k);
        binom *= (n - k) as f64 / (k + 1) as f64;
    }
    sum / pochhammer(1.5, n)
}

/// `P(sum_k a_k x_k^2 <= t)` for `x` uniform on the real unit sphere.
///
/// Evaluated from the inversion integral
/// `1/2 - (1/pi) int_0^inf sin(1/2 sum_j atan((a_j - t) u)) / (u prod_j (1 + (a_j - t)^2 u^2)^{1/4}) du`
/// after the substitution `u = tan(phi)`. Repeated eigenvalues are split by
/// `1e-12` with a warning.
pub fn real_shadow_cdf(a: &[f64], t: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    if a.iter().any(|x| !x.is_finite()) || t.is_nan() {
        return Err(Error::InvalidArgument("non-finite spectrum or argument".into()));
    }
    let mut a = a.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    let (hi, lo) = (a[0], a[a.len() - 1]);
    if a.len() == 1 || hi == lo {
        return Ok(if t >= hi { 1.0 } else { 0.0 });
    }
    if t <= lo {
        return Ok(0.0);
    }
    if t >= hi {
        return Ok(1.0);
    }
    let mut tied = false;
    for k in 1..a.len() {
        if a[k] >= a[k - 1] - TIE_SHIFT {
            a[k] = a[k - 1] - TIE_SHIFT;
            tied = true;
        }
    }
    if tied {
        log::warn!("repeated eigenvalues in real_shadow_cdf split by {TIE_SHIFT}");
    }
    let shifted: Vec<f64> = a.iter().map(|x| x - t).collect();
    let integrand = |phi: f64| -> f64 {
        if phi <= 0.0 {
            return 0.5 * shifted.iter().sum::<f64>();
        }
        if phi >= FRAC_PI_2 {
            return 0.0;
        }
        let u = phi.tan();
        let angle = 0.5 * shifted.iter().map(|c| (c * u).atan()).sum::<f64>();
        let log_damp = 0.25 * shifted.iter().map(|c| (c * u).mul_add(c * u, 1.0).ln()).sum::<f64>();
        // du = (1 + u^2) dphi
        angle.sin() / u * (1.0 + u * u) * (-log_damp).exp()
    };
    let out = quadrature::integrate(integrand, 0.0, FRAC_PI_2, CDF_TARGET_ERR);
    Ok((0.5 - out.integral / PI).clamp(0.0, 1.0))
}

/// `E prod_k x_k^{2 beta_k}` over the real unit sphere `S^{N-1}`:
/// `prod_k (1/2)_{beta_k} / (N/2)_{|beta|}`.
pub fn sphere_monomial(beta: &[u32], n: usize) -> Result<f64> {
    if beta.len() > n || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "multi-index of length {} does not fit on S^{}",
            beta.len(),
            n.saturating_sub(1)
        )));
    }
    let total: u32 = beta.iter().sum();
    let num: f64 = beta.iter().map(|&b| pochhammer(0.5, b)).product();
    Ok(num / pochhammer(n as f64 / 2.0, total))
}

/// `E prod_k x_k^{e_k}` over `S^{N-1}` for arbitrary exponents; zero when any
/// exponent is odd.
pub fn sphere_monomial_integral(exponents: &[u32], n: usize) -> Result<f64> {
    let beta: Vec<u32> = exponents.iter().map(|e| e / 2).collect();
    let even = sphere_monomial(&beta, n)?;
    Ok(if exponents.iter().any(|e| e % 2 == 1) { 0.0 } else { even })
}

/// All compositions of `n` into `parts` nonnegative parts.
pub(crate) fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[slot] = v;
            rec(left - v, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, 0, &mut vec![0; parts], &mut out);
    }
    out
}

fn multinomial(beta: &[u32]) -> f64 {
    let mut k = 0u32;
    let mut acc = 1.0;
    for &b in beta {
        for j in 1..=b {
            k += 1;
            acc *= k as f64 / j as f64;
        }
    }
    acc
}

/// `n`-th moment of the real shadow of `diag(a)`:
/// `sum_{|beta| = n} multinomial(n; beta) a^beta R(2 beta)`.
pub fn real_diag_moment(a: &[f64], n: u32) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    compositions(n, a.len()).iter().try_fold(0.0, |acc, beta| {
        let mono: f64 = a.iter().zip(beta).map(|(x, &b)| x.powi(b as i32)).product();
        Ok(acc + multinomial(beta) * mono * sphere_monomial(beta, a.len())?)
    })
}

fn centred(eigenvalues: &[Complex64]) -> Result<Vec<Complex64>> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let m = eigenvalues.iter().sum::<Complex64>() / eigenvalues.len() as f64;
    Ok(eigenvalues.iter().map(|l| l - m).collect())
}

/// Variance of the complex shadow of a normal matrix:
/// `sum |lambda_j - m|^2 / (N (N + 1))`.
pub fn complex_shadow_variance(eigenvalues: &[Complex64]) -> Result<f64> {
    let d = centred(eigenvalues)?;
    let n = d.len() as f64;
    Ok(d.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * (n + 1.0)))
}

/// Eigenbasis information for [`real_shadow_variance`].
#[derive(Clone, Copy, Debug)]
pub enum Eigenbasis<'a> {
    /// A real orthogonal eigenbasis.
    Orthogonal,
    /// The unitary eigenvector matrix `V` (columns are eigenvectors).
    General(&'a ComplexMatrix),
}

/// Variance of the real shadow of `A = V diag(lambda) V^dagger`:
/// `(1/(N(N+2))) sum_ij (lambda_i - m) conj(lambda_j - m) (delta_ij + C(V)_ij)`,
/// which reduces to `2 sum |lambda_j - m|^2 / (N (N + 2))` for real orthogonal `V`.
pub fn real_shadow_variance(eigenvalues: &[Complex64], basis: Eigenbasis<'_>) -> Result<f64> {
    let d = centred(eigenvalues)?;
    let n = d.len();
    let nf = n as f64;
    let scale = 1.0 / (nf * (nf + 2.0));
    match basis {
        Eigenbasis::Orthogonal => Ok(2.0 * scale * d.iter().map(|z| z.norm_sqr()).sum::<f64>()),
        Eigenbasis::General(v) => {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
            let c = unistochastic_c(v)?;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let w = if i == j { 1.0 } else { 0.0 } + c[i][j];
                    acc += (d[i] * d[j].conj()).re * w;
                }
            }
            Ok(scale * acc)
        }
    }
}

/// `C(V)_ij = |sum_k V_ki V_kj|^2 = |(V^T V)_ij|^2`, a symmetric unistochastic matrix.
pub fn unistochastic_c(v: &ComplexMatrix) -> Result<Vec<Vec<f64>>> {
    let residual = v.unitary_residual();
    if residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let vtv = &v.transpose() * v;
    let n = v.dim();
    Ok((0..n).map(|i| (0..n).map(|j| vtv[(i, j)].norm_sqr()).collect()).collect())
}

/// Normalized discrete Fourier matrix `F_jk = omega^{jk} / sqrt N`.
pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(n);
    let s = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        for k in 0..n {
            let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
            f[(j, k)] = Complex64::from_polar(s, phase);
        }
    }
    f
}

/// `g3` at `|t| = 1`.
pub const G3_AT_ONE: f64 = 1.0 / (2.0 * SQRT_2);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn g3_values() {
        assert_relative_eq!(g3_density(1.0).unwrap(), G3_AT_ONE, max_relative = 1e-15);
        assert_relative_eq!(g3_density(-1.0).unwrap(), G3_AT_ONE, max_relative = 1e-15);
        assert_eq!(g3_density(1.5).unwrap(), 0.0);
        assert!(g3_density(0.0).is_err());
        for &t in &[1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            assert_eq!(g3_density(t).unwrap(), g3_density(-t).unwrap());
        }
    }

    #[test]
    fn g3_moment_forms_agree() {
        assert_eq!(g3_moment(0), 1.0);
        assert_eq!(g3_moment(1), 0.0);
        assert_relative_eq!(g3_moment(2), 4.0 / 15.0, max_relative = 1e-15);
        for n in 0..=20 {
            assert_abs_diff_eq!(g3_moment(n), g3_moment_series(n), epsilon = 1e-12);
        }
    }

    #[test]
    fn cdf_edges_and_symmetry() {
        let a = [1.0, 0.0, -1.0];
        assert_eq!(real_shadow_cdf(&a, -1.5).unwrap(), 0.0);
        assert_eq!(real_shadow_cdf(&a, 1.5).unwrap(), 1.0);
        assert_abs_diff_eq!(real_shadow_cdf(&a, 0.0).unwrap(), 0.5, epsilon = 1e-9);
        assert_eq!(real_shadow_cdf(&[2.0], 1.0).unwrap(), 0.0);
        assert_eq!(real_shadow_cdf(&[2.0], 2.0).unwrap(), 1.0);
        assert!(real_shadow_cdf(&[], 0.0).is_err());
    }

    #[test]
    fn cdf_two_level_is_arcsine() {
        // x1^2 for x uniform on S^1 has the arcsine law: P(cos^2 <= s) = 1 - (2/pi) acos(sqrt s).
        for &s in &[0.1f64, 0.25, 0.5, 0.9] {
            let exact = 1.0 - 2.0 / PI * s.sqrt().acos();
            assert_abs_diff_eq!(real_shadow_cdf(&[1.0, 0.0], s).unwrap(), exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn cdf_derivative_is_g3() {
        let h = 1e-4;
        for &t in &[-0.5, 0.5] {
            let d = (real_shadow_cdf(&[1.0, 0.0, -1.0], t + h).unwrap() - real_shadow_cdf(&[1.0, 0.0, -1.0], t - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(d, g3_density(t).unwrap(), epsilon = 1e-4);
        }
    }

    #[test]
    fn sphere_monomials() {
        assert_eq!(sphere_monomial(&[0, 0], 2).unwrap(), 1.0);
        assert_relative_eq!(sphere_monomial(&[1, 1], 2).unwrap(), 1.0 / 8.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_monomial(&[1, 0, 0], 3).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(sphere_monomial_integral(&[1, 2], 2).unwrap(), 0.0);
        assert_relative_eq!(sphere_monomial_integral(&[2, 2], 2).unwrap(), 1.0 / 8.0, max_relative = 1e-15);
        assert!(sphere_monomial(&[1, 1, 1], 2).is_err());
    }

    #[test]
    fn diag_moments() {
        assert_relative_eq!(real_diag_moment(&[1.0, 0.0, -1.0], 2).unwrap(), 4.0 / 15.0, max_relative = 1e-14);
        assert_relative_eq!(real_diag_moment(&[0.7; 4], 3).unwrap(), 0.7f64.powi(3), max_relative = 1e-14);
        assert_relative_eq!(real_diag_moment(&[1.0, 2.0, 6.0], 1).unwrap(), 3.0, max_relative = 1e-15);
        for n in 0..=8 {
            assert_abs_diff_eq!(real_diag_moment(&[1.0, 0.0, -1.0], n).unwrap(), g3_moment(n), epsilon = 1e-13);
        }
        assert_eq!(compositions(2, 3).len(), 6);
    }

    #[test]
    fn variance_examples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert_abs_diff_eq!(complex_shadow_variance(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let roots4 = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_abs_diff_eq!(complex_shadow_variance(&roots4).unwrap(), 0.2, epsilon = 1e-15);
        assert_eq!(complex_shadow_variance(&[c(2.0, 1.0); 3]).unwrap(), 0.0);
        assert!(complex_shadow_variance(&[]).is_err());
        let pm = [c(1.0, 0.0), c(-1.0, 0.0)];
        assert_abs_diff_eq!(real_shadow_variance(&pm, Eigenbasis::Orthogonal).unwrap(), 0.5, epsilon = 1e-15);
        let id = ComplexMatrix::identity(2);
        assert_abs_diff_eq!(real_shadow_variance(&pm, Eigenbasis::General(&id)).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fourier_unistochastic() {
        let f = fourier_matrix(3);
        let cv = unistochastic_c(&f).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expected = if (j + k) % 3 == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(cv[j][k], expected, epsilon = 1e-14);
            }
        }
        let mut not_unitary = ComplexMatrix::identity(2);
        not_unitary[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(unistochastic_c(&not_unitary).is_err());
    }
}
