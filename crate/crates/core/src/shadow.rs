//! Monte Carlo estimation of restricted numerical shadows.
//!
//! Work is split into chunks of [`CHUNK_SIZE`] samples. Chunk `c` draws from
//! `RngStream::new(seed, c)`, so the output depends only on the seed and the
//! sample count, never on the number of worker threads.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::sampler::{sample_amplitudes, sample_dirichlet, Restriction, RngStream};
use crate::{Error, Result};

pub use crate::stats::MomentEstimate;

pub const CHUNK_SIZE: usize = 1 << 16;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_BINS: usize = 256;
/// Relative padding added around the numerical-range bounding box.
pub const AUTO_PAD: f64 = 0.05;

/// Rectangular window of the complex plane split into `nx x ny` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidArgument(format!("degenerate grid window {self:?}")));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidArgument("grid needs at least one cell per axis".into()));
        }
        Ok(())
    }

    /// Bounding box of `W(A)` padded by 5%, with `nx x ny` cells.
    ///
    /// The box is exact: `Re W(A)` spans the spectrum of the Hermitian part and
    /// `Im W(A)` that of the skew-Hermitian part.
    pub fn auto(a: &ComplexMatrix, nx: usize, ny: usize) -> Result<Self> {
        let re = hermitian_eigenvalues(&a.hermitian_part())?;
        let im = hermitian_eigenvalues(&a.skew_hermitian_part())?;
        let (r0, r1) = (re[0], re[re.len() - 1]);
        let (i0, i1) = (im[0], im[im.len() - 1]);
        let scale = (r1 - r0).max(i1 - i0);
        let (re_min, re_max) = padded_axis(r0, r1, scale, nx);
        let (im_min, im_max) = padded_axis(i0, i1, scale, ny);
        GridSpec::new(re_min, re_max, im_min, im_max, nx, ny)
    }

    pub fn dx(&self) -> f64 {
        (self.re_max - self.re_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.im_max - self.im_min) / self.ny as f64
    }

    /// Cell `(ix, iy)` containing `z`, or `None` off-grid. The upper edges are
    /// closed so points on `re_max`/`im_max` stay on the grid.
    #[inline]
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - self.re_min) / self.dx();
        let fy = (z.im - self.im_min) / self.dy();
        if !(fx >= 0.0 && fy >= 0.0 && fx <= self.nx as f64 && fy <= self.ny as f64) {
            return None;
        }
        Some(((fx as usize).min(self.nx - 1), (fy as usize).min(self.ny - 1)))
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.re_min + (ix as f64 + 0.5) * self.dx(),
            self.im_min + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }
}

fn padded_axis(lo: f64, hi: f64, scale: f64, cells: usize) -> (f64, f64) {
    let width = hi - lo;
    let magnitude = lo.abs().max(hi.abs());
    if width > 1e-12 * magnitude.max(1.0) {
        let pad = AUTO_PAD * width.max(AUTO_PAD * scale);
        return (lo - pad, hi + pad);
    }
    // Collapsed axis: give it a window and shift by half a cell so the single
    // coordinate sits in the middle of a cell rather than on an edge.
    let c = 0.5 * (lo + hi);
    let pad = AUTO_PAD * scale.max(magnitude).max(1.0);
    let half_cell = pad / cells as f64;
    (c - pad + half_cell, c + pad + half_cell)
}

/// Counts of `z = <psi|A|psi>` per grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowHistogram {
    pub grid: GridSpec,
    /// Row-major counts, row `iy` (from `im_min`) then column `ix`.
    counts: Vec<u64>,
    pub n_samples: u64,
    pub n_outside: u64,
}

impl ShadowHistogram {
    pub fn empty(grid: GridSpec) -> Self {
        ShadowHistogram {
            grid,
            counts: vec![0; grid.n_cells()],
            n_samples: 0,
            n_outside: 0,
        }
    }

    pub fn from_samples(grid: GridSpec, zs: &[Complex64]) -> Result<Self> {
        grid.validate()?;
        let mut h = Self::empty(grid);
        zs.iter().for_each(|&z| h.add(z));
        Ok(h)
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.n_samples += 1;
        match self.grid.cell_of(z) {
            Some((ix, iy)) => self.counts[iy * self.grid.nx + ix] += 1,
            None => self.n_outside += 1,
        }
    }

    /// Adds another histogram on the same grid.
    pub fn merge(&mut self, other: &ShadowHistogram) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("cannot merge histograms on different grids".into()));
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.n_samples += other.n_samples;
        self.n_outside += other.n_outside;
        Ok(())
    }

    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.grid.nx + ix]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Fraction of all samples in cell `(ix, iy)`.
    pub fn mass(&self, ix: usize, iy: usize) -> f64 {
        self.count(ix, iy) as f64 / self.n_samples.max(1) as f64
    }

    pub fn masses(&self) -> Vec<f64> {
        let n = self.n_samples.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn outside_fraction(&self) -> f64 {
        self.n_outside as f64 / self.n_samples.max(1) as f64
    }

    pub fn occupied_cells(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Total variation between two histograms on the same grid, counting the
    /// off-grid fraction as one extra cell.
    pub fn total_variation(&self, other: &ShadowHistogram) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("histograms are on different grids".into()));
        }
        let (p, q) = (self.masses(), other.masses());
        let cells: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        Ok(0.5 * (cells + (self.outside_fraction() - other.outside_fraction()).abs()))
    }

    /// Header line, one line of grid values, then `ny` rows of `nx` masses
    /// starting from `im_min`.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut s = String::with_capacity(g.n_cells() * 8 + 128);
        s.push_str("re_min,re_max,im_min,im_max,nx,ny,n_samples,n_outside\n");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            g.re_min, g.re_max, g.im_min, g.im_max, g.nx, g.ny, self.n_samples, self.n_outside
        );
        let masses = self.masses();
        for row in masses.chunks(g.nx) {
            for (k, m) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{m}");
            }
            s.push('\n');
        }
        s
    }

    /// Binary 8-bit PGM with `im_max` on the top row, max-normalized with gamma 0.5.
    pub fn to_pgm(&self) -> Vec<u8> {
        let g = &self.grid;
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
        for iy in (0..g.ny).rev() {
            for ix in 0..g.nx {
                let v = (self.count(ix, iy) as f64 / max).sqrt();
                out.push((255.0 * v).round() as u8);
            }
        }
        out
    }
}

fn check_inputs(a: &ComplexMatrix, restriction: &Restriction, n: usize) -> Result<()> {
    restriction.validate()?;
    if a.dim() != restriction.dim() {
        return Err(Error::DimensionMismatch {
            expected: restriction.dim(),
            found: a.dim(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    Ok(())
}

/// `<psi|A|psi>` evaluator specialised for diagonal operators.
enum Evaluator<'a> {
    Diagonal(Vec<Complex64>),
    Dense(&'a ComplexMatrix),
}

impl<'a> Evaluator<'a> {
    fn new(a: &'a ComplexMatrix) -> Self {
        if a.is_diagonal(0.0) {
            Evaluator::Diagonal(a.diagonal())
        } else {
            Evaluator::Dense(a)
        }
    }

    #[inline]
    fn eval(&self, psi: &[Complex64]) -> Complex64 {
        match self {
            Evaluator::Diagonal(d) => d.iter().zip(psi).map(|(a, p)| a * p.norm_sqr()).sum(),
            Evaluator::Dense(a) => a.quadratic_form(psi),
        }
    }
}

fn chunk_ranges(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(CHUNK_SIZE))
        .map(|c| (c as u64, CHUNK_SIZE.min(n - c * CHUNK_SIZE)))
        .collect()
}

/// Runs `draw` for every sample, chunk by chunk in parallel, and returns the
/// per-chunk outputs in chunk order.
fn par_chunks<T, F>(n: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync,
{
    chunk_ranges(n)
        .into_par_iter()
        .map(|(c, len)| draw(&mut RngStream::new(seed, c), len))
        .collect()
}

/// `n` values of `draw`, generated chunk-parallel with the same per-chunk
/// streams as the shadow estimators, returned in a thread-count independent order.
pub fn draw_parallel<T, F>(n: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync,
{
    par_chunks(n, seed, |rng, len| (0..len).map(|_| draw(rng)).collect::<Vec<_>>()).into_iter().flatten().collect()
}

/// Histogram of `<psi|A|psi>` over `n` states drawn from `restriction`.
///
/// `grid = None` uses [`GridSpec::auto`] at the default resolution.
pub fn estimate_shadow(
    a: &ComplexMatrix,
    restriction: &Restriction,
    n: usize,
    grid: Option<GridSpec>,
    seed: u64,
) -> Result<ShadowHistogram> {
    check_inputs(a, restriction, n)?;
    let grid = match grid {
        Some(g) => {
            g.validate()?;
            g
        }
        None => GridSpec::auto(a, DEFAULT_BINS, DEFAULT_BINS)?,
    };
    let eval = Evaluator::new(a);
    let parts = par_chunks(n, seed, |rng, len| {
        let mut h = ShadowHistogram::empty(grid);
        for _ in 0..len {
            h.add(eval.eval(&sample_amplitudes(restriction, rng)));
        }
        h
    });
    let mut total = ShadowHistogram::empty(grid);
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// The raw values `<psi|A|psi>` of `n` draws, in a thread-count independent order.
pub fn sample_expectations(a: &ComplexMatrix, restriction: &Restriction, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    check_inputs(a, restriction, n)?;
    let eval = Evaluator::new(a);
    let parts = par_chunks(n, seed, |rng, len| {
        (0..len)
            .map(|_| eval.eval(&sample_amplitudes(restriction, rng)))
            .collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// Sample moments of the shadow with jackknife standard errors.
pub fn estimate_moments(a: &ComplexMatrix, restriction: &Restriction, n: usize, seed: u64) -> Result<MomentEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument("moment estimation needs at least two samples".into()));
    }
    MomentEstimate::from_samples(&sample_expectations(a, restriction, n, seed)?)
}

/// Dirichlet shortcut for diagonal operators: `z = sum_k x_k q_k` with `q` on
/// the probability simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletCase {
    /// Complex states: flat Dirichlet (`s = 1`).
    Complex,
    /// Real states: `s = 1/2`.
    Real,
    /// Complex product states on `n x m`: `q = p (x) p'` with flat factors.
    ComplexProduct(usize, usize),
    /// Real product states on `n x m`: factors with `s = 1/2`.
    RealProduct(usize, usize),
}

impl DirichletCase {
    fn concentration(self) -> f64 {
        match self {
            DirichletCase::Complex | DirichletCase::ComplexProduct(..) => 1.0,
            DirichletCase::Real | DirichletCase::RealProduct(..) => 0.5,
        }
    }
}

/// One draw of the shadow of `diag(x)` without sampling a state vector.
pub fn diag_fast_sample<R: Rng + ?Sized>(x: &[Complex64], case: DirichletCase, rng: &mut R) -> Result<Complex64> {
    let s = case.concentration();
    let weights = match case {
        DirichletCase::Complex | DirichletCase::Real => sample_dirichlet(x.len(), s, rng)?,
        DirichletCase::ComplexProduct(n, m) | DirichletCase::RealProduct(n, m) => {
            if n == 0 || m == 0 || n * m != x.len() {
                return Err(Error::NotFactorable {
                    dim: x.len(),
                    factors: format!("{n}x{m}"),
                });
            }
            let p = sample_dirichlet(n, s, rng)?;
            let q = sample_dirichlet(m, s, rng)?;
            p.iter().flat_map(|pi| q.iter().map(move |qj| pi * qj)).collect()
        }
    };
    Ok(x.iter().zip(&weights).map(|(xi, w)| xi * w).sum())
}

/// `n` fast-path draws, chunked and seeded like [`sample_expectations`].
pub fn diag_fast_samples(x: &[Complex64], case: DirichletCase, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    if x.is_empty() || n == 0 {
        return Err(Error::InvalidArgument("need a nonempty spectrum and a positive sample count".into()));
    }
    diag_fast_sample(x, case, &mut RngStream::new(seed, u64::MAX))?;
    let parts = par_chunks(n, seed, |rng, len| {
        (0..len)
            .map(|_| diag_fast_sample(x, case, rng).expect("arguments checked above"))
            .collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// Shadow of `A (x) B` on product states from independent shadows of `A` and
/// `B`: the products `t_k s_k`, cycling the shorter list.
pub fn tensor_shadow_compose(samples_a: &[Complex64], samples_b: &[Complex64]) -> Result<Vec<Complex64>> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::InvalidArgument("sample lists must be nonempty".into()));
    }
    let n = samples_a.len().max(samples_b.len());
    Ok((0..n)
        .map(|k| samples_a[k % samples_a.len()] * samples_b[k % samples_b.len()])
        .collect())
}
