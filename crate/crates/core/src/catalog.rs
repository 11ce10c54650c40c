//! Named fixture matrices.
//!
//! Keys: `A2`, `A3a`, `A3b`, `A4a`, `A4b` (real-shadow examples), `B4a`..`B4f`
//! (two-qubit product/entangled shadow examples), `X1`, `X2` (dynamics
//! observables) and `U8` (three-qubit diagonal unitary).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{kron, ComplexMatrix};

#[derive(Clone, Debug)]
pub struct MatrixCatalogEntry {
    pub name: &'static str,
    pub matrix: ComplexMatrix,
    /// `(N_A, N_B)` when the fixture is meant for a bipartite space.
    pub bipartition: Option<(usize, usize)>,
}

pub const NAMES: [&str; 14] = [
    "A2", "A3a", "A3b", "A4a", "A4b", "B4a", "B4b", "B4c", "B4d", "B4e", "B4f", "X1", "X2", "U8",
];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const O: Complex64 = c(0.0, 0.0);
const R1: Complex64 = c(1.0, 0.0);
const M1: Complex64 = c(-1.0, 0.0);
const J: Complex64 = c(0.0, 1.0);
const MJ: Complex64 = c(0.0, -1.0);

fn rows(r: &[&[Complex64]]) -> ComplexMatrix {
    let v: Vec<Vec<Complex64>> = r.iter().map(|row| row.to_vec()).collect();
    ComplexMatrix::from_rows(&v).expect("fixture is square")
}

fn build(name: &str) -> Option<ComplexMatrix> {
    let m = match name {
        "A2" => rows(&[&[M1, c(1.0, -1.0)], &[MJ, R1]]),
        "A3a" => rows(&[&[O, R1, R1], &[O, R1, R1], &[O, O, c(2.0, 0.0)]]),
        "A3b" => rows(&[&[O, R1, O], &[O, R1, O], &[O, O, c(0.0, 2.0)]]),
        "A4a" => rows(&[
            &[O, R1, R1, R1],
            &[O, R1, R1, R1],
            &[O, O, c(2.0, 0.0), R1],
            &[O, O, O, c(3.0, 0.0)],
        ]),
        "A4b" => rows(&[
            &[O, R1, R1, R1],
            &[O, R1, R1, R1],
            &[O, O, J, R1],
            &[O, O, O, c(1.0, 1.0)],
        ]),
        "B4a" => rows(&[&[R1, O, R1, O], &[O, J, O, R1], &[O, O, M1, O], &[O, O, O, MJ]]),
        "B4b" => rows(&[&[R1, O, O, R1], &[O, J, O, O], &[O, O, M1, O], &[O, O, O, MJ]]),
        "B4c" => rows(&[&[R1, O, O, O], &[O, J, O, R1], &[O, O, M1, O], &[O, O, O, MJ]]),
        "B4d" => rows(&[&[R1, O, O, R1], &[O, J, R1, O], &[O, O, M1, O], &[O, O, O, MJ]]),
        "B4e" => rows(&[&[R1, R1, R1, R1], &[O, J, R1, R1], &[O, O, M1, R1], &[O, O, O, MJ]]),
        "B4f" => {
            let p = rows(&[&[J, c(0.5, 0.0)], &[O, c(0.0, 0.5)]]);
            let q = rows(&[&[O, c(2.0, 0.0)], &[R1, J]]);
            let id = ComplexMatrix::identity(2);
            &kron(&p, &id) + &kron(&id, &q)
        }
        "X1" => rows(&[&[M1, O, O, J], &[O, R1, O, O], &[O, O, M1, O], &[O, O, O, R1]]),
        "X2" => rows(&[&[R1, O, O, J], &[O, M1, O, O], &[O, O, M1, O], &[O, O, O, R1]]),
        "U8" => {
            let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
            let wb = w.conj();
            ComplexMatrix::from_diagonal(&[R1, w, w, wb, w, wb, wb, R1])
        }
        _ => return None,
    };
    Some(m)
}

/// Looks up a fixture by its exact key.
pub fn lookup(name: &str) -> Option<MatrixCatalogEntry> {
    let key = NAMES.iter().find(|&&k| k == name)?;
    let matrix = build(key)?;
    let bipartition = match key.as_bytes()[0] {
        b'B' | b'X' => Some((2, 2)),
        _ => None,
    };
    Some(MatrixCatalogEntry {
        name: key,
        matrix,
        bipartition,
    })
}

pub fn entries() -> Vec<MatrixCatalogEntry> {
    NAMES.iter().filter_map(|k| lookup(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_resolves() {
        assert_eq!(entries().len(), NAMES.len());
        assert!(lookup("A5").is_none());
        assert!(lookup("a2").is_none());
    }

    #[test]
    fn b4f_matches_hand_expansion() {
        // P (x) 1 + 1 (x) Q written out by hand.
        let expected = rows(&[
            &[J, c(2.0, 0.0), c(0.5, 0.0), O],
            &[R1, c(0.0, 2.0), O, c(0.5, 0.0)],
            &[O, O, c(0.0, 0.5), c(2.0, 0.0)],
            &[O, O, R1, c(0.0, 1.5)],
        ]);
        assert_eq!(lookup("B4f").unwrap().matrix, expected);
    }

    #[test]
    fn u8_phases() {
        let u8 = lookup("U8").unwrap().matrix;
        assert!(u8.is_diagonal(0.0));
        assert!(u8.is_unitary(1e-15));
        let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let expected = [R1, w, w, w.conj(), w, w.conj(), w.conj(), R1];
        for (d, e) in u8.diagonal().iter().zip(expected) {
            assert!((d - e).norm() < 1e-15);
        }
    }

    #[test]
    fn fixture_entries() {
        let a2 = lookup("A2").unwrap().matrix;
        assert_eq!(a2[(0, 1)], c(1.0, -1.0));
        assert_eq!(a2[(1, 0)], MJ);
        let x1 = lookup("X1").unwrap();
        assert_eq!(x1.bipartition, Some((2, 2)));
        assert_eq!(x1.matrix[(0, 3)], J);
        assert_eq!(x1.matrix.trace(), O);
        let x2 = lookup("X2").unwrap().matrix;
        assert_eq!(x2.diagonal(), vec![R1, M1, M1, R1]);
        assert_eq!(lookup("A4b").unwrap().matrix[(3, 3)], c(1.0, 1.0));
    }
}
