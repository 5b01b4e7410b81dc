use crate::hermitian::{ComplexMatrix, HermitianMatrix};
use crate::sampling;

pub fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    sampling::hermitian(&mut sampling::rng(seed), n)
}

pub fn random_pd(n: usize, seed: u64) -> HermitianMatrix {
    sampling::positive_definite(&mut sampling::rng(seed), n)
}

pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    sampling::unitary(&mut sampling::rng(seed), n)
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    sampling::matrix(&mut sampling::rng(seed), rows, cols)
}
