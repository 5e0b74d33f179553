#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qmetro::linalg::ComplexMatrix;
use qmetro::qstate::{DensityOperator, PureState, UnitaryOp};

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), dim * dim)
        .prop_map(|data| ComplexMatrix::from_row_major(data).unwrap())
}

pub fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim).prop_map(|a| a.add(&a.adjoint()).unwrap().scale_real(0.5))
}

pub fn pure_state(dim: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(complex(), dim)
        .prop_filter("non-zero", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            PureState::new(v.into_iter().map(|z| z / norm).collect()).unwrap()
        })
}

/// Full-rank-or-not mixed state `A A† / tr(A A†)`.
pub fn density(dim: usize) -> impl Strategy<Value = DensityOperator> {
    matrix(dim)
        .prop_filter("non-zero", |a| a.frobenius_norm() > 1e-3)
        .prop_map(|a| {
            let m = a.matmul(&a.adjoint()).unwrap();
            let tr = m.trace().re;
            DensityOperator::new(m.scale_real(1.0 / tr)).unwrap()
        })
}

/// `V diag(e^{iθ}) V†` from the eigenbasis of a random Hermitian matrix.
pub fn unitary(dim: usize) -> impl Strategy<Value = UnitaryOp> {
    (
        hermitian(dim),
        prop::collection::vec(0.0f64..std::f64::consts::TAU, dim),
    )
        .prop_map(|(h, angles)| {
            let v = h.hermitian_eig().unwrap().eigenvectors;
            let phases: Vec<Complex64> = angles
                .iter()
                .map(|&t| Complex64::from_polar(1.0, t))
                .collect();
            let m = v
                .matmul(&ComplexMatrix::from_diag(&phases))
                .unwrap()
                .matmul(&v.adjoint())
                .unwrap();
            UnitaryOp::new(m).unwrap()
        })
}

pub fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i * n + j] += a[(i, k)] * b[(k, j)];
            }
        }
    }
    ComplexMatrix::from_row_major(out).unwrap()
}

pub fn min_eigenvalue(rho: &DensityOperator) -> f64 {
    rho.matrix().hermitian_eig().unwrap().eigenvalues[0]
}
