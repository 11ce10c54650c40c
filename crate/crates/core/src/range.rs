//! Numerical-range boundaries, empirical support masks and Minkowski products.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::{top_eigenpair, ComplexMatrix};
use crate::shadow::{GridSpec, ShadowHistogram};
use crate::{Error, Result};

pub const DEFAULT_ANGLES: usize = 720;

/// Convex polygon given by boundary points in counterclockwise order together
/// with supporting half-planes `Re(conj(n_k) z) <= h_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RangePolygon {
    vertices: Vec<Complex64>,
    /// Unit outward normals of the supporting lines.
    normals: Vec<Complex64>,
    /// Support values `h_k`.
    support: Vec<f64>,
    n_angles: usize,
}

impl RangePolygon {
    /// Convex hull of a point set.
    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("polygon needs at least one point".into()));
        }
        let hull = convex_hull(points);
        let (normals, support) = match hull.len() {
            1 | 2 => {
                // A point or a segment: bound it with the edge normals plus the
                // directions along it.
                let d = if hull.len() == 2 { hull[1] - hull[0] } else { Complex64::new(1.0, 0.0) };
                let u = d / d.norm();
                let normals = vec![u, u * Complex64::i(), -u, -u * Complex64::i()];
                let support = normals
                    .iter()
                    .map(|n| hull.iter().map(|p| (n.conj() * p).re).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                (normals, support)
            }
            m => {
                let mut normals = Vec::with_capacity(m);
                let mut support = Vec::with_capacity(m);
                for k in 0..m {
                    let (p, q) = (hull[k], hull[(k + 1) % m]);
                    let d = q - p;
                    let n = -Complex64::i() * d / d.norm();
                    normals.push(n);
                    support.push((n.conj() * p).re);
                }
                (normals, support)
            }
        };
        Ok(RangePolygon {
            vertices: hull,
            normals,
            support,
            n_angles: 0,
        })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support
    }

    pub fn normals(&self) -> &[Complex64] {
        &self.normals
    }

    /// Number of sweep angles, or 0 for hulls built from points.
    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    /// Shoelace area of the vertex polygon.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let m = v.len();
        0.5 * (0..m).map(|k| (v[k].conj() * v[(k + 1) % m]).im).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        let v = &self.vertices;
        let m = v.len();
        if m < 2 {
            return 0.0;
        }
        (0..m).map(|k| (v[(k + 1) % m] - v[k]).norm()).sum()
    }

    /// Smallest cross product of consecutive edges, scaled by the squared diameter.
    pub fn min_turn(&self) -> f64 {
        let v = &self.vertices;
        let m = v.len();
        if m < 3 {
            return 0.0;
        }
        let (lo, hi) = self.bbox();
        let scale = (hi - lo).norm_sqr().max(f64::MIN_POSITIVE);
        (0..m)
            .map(|k| {
                let e1 = v[(k + 1) % m] - v[k];
                let e2 = v[(k + 2) % m] - v[(k + 1) % m];
                (e1.conj() * e2).im / scale
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_turn() >= -tol
    }

    /// `min_k (h_k - Re(conj(n_k) z))`: positive inside, negative outside, and
    /// for points outside a lower bound on minus the Euclidean distance.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        self.normals
            .iter()
            .zip(&self.support)
            .map(|(n, h)| h - (n.conj() * z).re)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.signed_distance(z) >= -tol
    }

    /// `(lower-left, upper-right)` corners of the vertex bounding box.
    pub fn bbox(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Complex64::new(lo.re.min(v.re), lo.im.min(v.im));
            hi = Complex64::new(hi.re.max(v.re), hi.im.max(v.im));
        }
        (lo, hi)
    }

    /// `n` points spaced evenly by arc length along the closed boundary.
    pub fn resample(&self, n: usize) -> Vec<Complex64> {
        let v = &self.vertices;
        let total = self.perimeter();
        if total == 0.0 || n == 0 {
            return vec![v[0]; n.min(1)];
        }
        let m = v.len();
        let mut out = Vec::with_capacity(n);
        let (mut edge, mut walked) = (0usize, 0.0f64);
        for k in 0..n {
            let s = total * k as f64 / n as f64;
            loop {
                let len = (v[(edge + 1) % m] - v[edge]).norm();
                if walked + len >= s || edge + 1 == m {
                    let t = if len > 0.0 { ((s - walked) / len).clamp(0.0, 1.0) } else { 0.0 };
                    out.push(v[edge] + (v[(edge + 1) % m] - v[edge]) * t);
                    break;
                }
                walked += len;
                edge += 1;
            }
        }
        out
    }
}

/// Andrew's monotone chain; counterclockwise, collinear points dropped.
fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| ((a - o).conj() * (b - o)).im;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// Boundary of `W(A)` by a supporting-line sweep over `n_angles` directions.
///
/// For each `theta`, the top eigenvector `v` of the Hermitian part of
/// `e^{-i theta} A` gives the boundary point `<v|A|v>` and the support value
/// `max Re(e^{-i theta} W(A))`, its eigenvalue.
pub fn numerical_range_boundary(a: &ComplexMatrix, n_angles: usize) -> Result<RangePolygon> {
    if n_angles < 3 {
        return Err(Error::InvalidArgument("need at least three sweep angles".into()));
    }
    let sweep: Vec<(Complex64, f64, Complex64)> = (0..n_angles)
        .into_par_iter()
        .map(|k| {
            let theta = TAU * (k as f64 / n_angles as f64);
            let normal = Complex64::from_polar(1.0, theta);
            let h = a.scale(normal.conj()).hermitian_part();
            let (lambda, v) = top_eigenpair(&h)?;
            Ok((a.quadratic_form(&v), lambda, normal))
        })
        .collect::<Result<_>>()?;
    Ok(RangePolygon {
        vertices: sweep.iter().map(|s| s.0).collect(),
        support: sweep.iter().map(|s| s.1).collect(),
        normals: sweep.iter().map(|s| s.2).collect(),
        n_angles,
    })
}

/// Occupancy of a grid, with connectivity queries.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportMask {
    pub grid: GridSpec,
    /// Row-major like [`ShadowHistogram`].
    cells: Vec<bool>,
}

const NEIGHBOURS_8: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const NEIGHBOURS_4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Cells whose mass exceeds `threshold`.
pub fn restricted_support(hist: &ShadowHistogram, threshold: f64) -> SupportMask {
    let n = hist.n_samples.max(1) as f64;
    SupportMask {
        grid: hist.grid,
        cells: hist.counts().iter().map(|&c| c as f64 / n > threshold).collect(),
    }
}

impl SupportMask {
    /// Cells that meet the polygon, by a separating-axis test against each
    /// supporting half-plane. A superset of the exact rasterization.
    pub fn from_polygon(poly: &RangePolygon, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let (hx, hy) = (0.5 * grid.dx(), 0.5 * grid.dy());
        let mut cells = Vec::with_capacity(grid.n_cells());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let c = grid.cell_center(ix, iy);
                let hit = poly
                    .normals
                    .iter()
                    .zip(&poly.support)
                    .all(|(n, h)| h - (n.conj() * c).re + hx * n.re.abs() + hy * n.im.abs() >= -1e-12);
                cells.push(hit);
            }
        }
        Ok(SupportMask { grid, cells })
    }

    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[iy * self.grid.nx + ix]
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_subset_of(&self, other: &SupportMask) -> bool {
        self.grid == other.grid && self.cells.iter().zip(&other.cells).all(|(a, b)| !a || *b)
    }

    fn neighbours(&self, ix: usize, iy: usize, occupied: bool) -> impl Iterator<Item = (usize, usize)> + '_ {
        let steps: &[(isize, isize)] = if occupied { &NEIGHBOURS_8 } else { &NEIGHBOURS_4 };
        steps.iter().filter_map(move |&(dx, dy)| {
            let x = ix.checked_add_signed(dx)?;
            let y = iy.checked_add_signed(dy)?;
            (x < self.grid.nx && y < self.grid.ny).then_some((x, y))
        })
    }

    /// Connected components of cells with the given occupancy, 8-connected for
    /// occupied cells and 4-connected for empty ones. Each cell gets a component label, and each component records whether it touches
    /// the grid border.
    fn components(&self, occupied: bool) -> (Vec<Option<usize>>, Vec<bool>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut label = vec![None; nx * ny];
        let mut touches_border = Vec::new();
        for start in 0..nx * ny {
            if self.cells[start] != occupied || label[start].is_some() {
                continue;
            }
            let id = touches_border.len();
            let mut border = false;
            let mut queue = VecDeque::from([start]);
            label[start] = Some(id);
            while let Some(k) = queue.pop_front() {
                let (ix, iy) = (k % nx, k / nx);
                border |= ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny;
                for (x, y) in self.neighbours(ix, iy, occupied) {
                    let j = y * nx + x;
                    if self.cells[j] == occupied && label[j].is_none() {
                        label[j] = Some(id);
                        queue.push_back(j);
                    }
                }
            }
            touches_border.push(border);
        }
        (label, touches_border)
    }

    /// Number of empty regions not connected to the border.
    pub fn enclosed_holes(&self) -> usize {
        self.components(false).1.iter().filter(|b| !**b).count()
    }

    pub fn occupied_components(&self) -> usize {
        self.components(true).1.len()
    }

    /// True when `z` lies in an unoccupied cell whose empty region is cut off
    /// from the grid border.
    pub fn has_hole_at(&self, z: Complex64) -> bool {
        let Some((ix, iy)) = self.grid.cell_of(z) else {
            return false;
        };
        if self.is_occupied(ix, iy) {
            return false;
        }
        let (label, border) = self.components(false);
        label[iy * self.grid.nx + ix].is_some_and(|id| !border[id])
    }

    /// One occupied component and no enclosed holes, at this resolution.
    pub fn is_simply_connected(&self) -> bool {
        self.occupied_components() == 1 && self.enclosed_holes() == 0
    }

    /// Binary PGM, occupied cells white, `im_max` on the top row.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
        for iy in (0..ny).rev() {
            out.extend((0..nx).map(|ix| if self.is_occupied(ix, iy) { 255u8 } else { 0 }));
        }
        out
    }
}

/// Products `p q` of `n_out` arc-length samples of each boundary. A polygon
/// collapsed to a point contributes that single point.
pub fn minkowski_product(p: &RangePolygon, q: &RangePolygon, n_out: usize) -> Result<Vec<Complex64>> {
    if n_out == 0 {
        return Err(Error::InvalidArgument("n_out must be positive".into()));
    }
    let ps = p.resample(n_out);
    let qs = q.resample(n_out);
    Ok(ps.iter().flat_map(|a| qs.iter().map(move |b| a * b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_hull() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.5, 0.5), c(0.5, 0.0)];
        let p = RangePolygon::from_points(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_abs_diff_eq!(p.area(), 1.0);
        assert_abs_diff_eq!(p.perimeter(), 4.0);
        assert!(p.is_convex(0.0));
        assert_abs_diff_eq!(p.signed_distance(c(0.5, 0.5)), 0.5);
        assert_abs_diff_eq!(p.signed_distance(c(2.0, 0.5)), -1.0);
        assert!(p.contains(c(1.0, 1.0), 1e-12));
    }

    #[test]
    fn point_and_segment_hulls() {
        let pt = RangePolygon::from_points(&[c(1.0, 2.0); 3]).unwrap();
        assert!(pt.contains(c(1.0, 2.0), 1e-12));
        assert!(!pt.contains(c(1.0, 2.1), 1e-12));
        let seg = RangePolygon::from_points(&[c(0.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert!(seg.contains(c(0.5, 0.5), 1e-12));
        assert!(!seg.contains(c(0.5, 0.6), 1e-3));
        assert!(!seg.contains(c(1.1, 1.1), 1e-3));
    }

    #[test]
    fn resample_square() {
        let p = RangePolygon::from_points(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        let s = p.resample(8);
        assert_eq!(s.len(), 8);
        assert!((s[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((s[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((s[2] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s[7] - c(0.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_range_is_hull_of_spectrum() {
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)]);
        let p = numerical_range_boundary(&a, 360).unwrap();
        let tri = RangePolygon::from_points(&a.diagonal()).unwrap();
        for v in p.vertices() {
            assert!(tri.contains(*v, 1e-12));
        }
        assert_abs_diff_eq!(p.area(), tri.area(), epsilon = 1e-12);
    }

    #[test]
    fn mask_holes() {
        let g = GridSpec::new(0.0, 5.0, 0.0, 5.0, 5, 5).unwrap();
        let ring: Vec<Complex64> = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| (1..=3).contains(&i) && (1..=3).contains(&j) && !(i == 2 && j == 2))
            .map(|(i, j)| c(i as f64 + 0.5, j as f64 + 0.5))
            .collect();
        let h = ShadowHistogram::from_samples(g, &ring).unwrap();
        let m = restricted_support(&h, 0.0);
        assert_eq!(m.occupied_count(), 8);
        assert_eq!(m.enclosed_holes(), 1);
        assert!(m.has_hole_at(c(2.5, 2.5)));
        assert!(!m.has_hole_at(c(0.5, 0.5)));
        assert!(!m.is_simply_connected());

        // Removing one wall cell connects the hole to the outside.
        let open: Vec<Complex64> = ring.iter().copied().filter(|z| *z != c(2.5, 1.5)).collect();
        let m2 = restricted_support(&ShadowHistogram::from_samples(g, &open).unwrap(), 0.0);
        assert_eq!(m2.enclosed_holes(), 0);
        assert!(m2.is_simply_connected());
    }

    #[test]
    fn diagonal_wall_encloses_hole() {
        let g = GridSpec::new(0.0, 7.0, 0.0, 7.0, 7, 7).unwrap();
        let diamond: Vec<Complex64> = (0..7i32)
            .flat_map(|i| (0..7i32).map(move |j| (i, j)))
            .filter(|&(i, j)| (i - 3).abs() + (j - 3).abs() == 2)
            .map(|(i, j)| c(f64::from(i) + 0.5, f64::from(j) + 0.5))
            .collect();
        let m = restricted_support(&ShadowHistogram::from_samples(g, &diamond).unwrap(), 0.0);
        assert_eq!(m.occupied_count(), 8);
        assert_eq!(m.occupied_components(), 1);
        assert_eq!(m.enclosed_holes(), 1);
        assert!(m.has_hole_at(c(3.5, 3.5)));
        assert!(m.has_hole_at(c(2.5, 3.5)));
    }

    #[test]
    fn polygon_raster_contains_polygon_cells() {
        let p = RangePolygon::from_points(&[c(0.1, 0.1), c(0.9, 0.1), c(0.5, 0.9)]).unwrap();
        let g = GridSpec::new(0.0, 1.0, 0.0, 1.0, 10, 10).unwrap();
        let m = SupportMask::from_polygon(&p, g).unwrap();
        assert!(m.is_occupied(1, 1));
        assert!(m.is_occupied(5, 8));
        assert!(!m.is_occupied(0, 9));
        assert!(!m.is_occupied(9, 9));
    }
}
