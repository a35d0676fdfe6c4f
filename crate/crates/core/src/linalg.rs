//! Internal dense linear-algebra helpers shared by the propagator and oracle.

use nalgebra::SymmetricEigen;

use crate::{C64, CMatrix};

/// Eigendecomposition of a Hermitian matrix: returns (eigenvalues, Q) with
/// M = Q diag(λ) Q†.
pub(crate) fn herm_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = SymmetricEigen::new(m.clone());
    let vals = se.eigenvalues.iter().copied().collect();
    (vals, se.eigenvectors)
}

/// Q f(λ) Q† for a precomputed Hermitian eigendecomposition.
pub(crate) fn func_from_eig(vals: &[f64], q: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let mut scaled = q.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let fj = f(lam);
        for x in scaled.column_mut(j).iter_mut() {
            *x *= fj;
        }
    }
    scaled * q.adjoint()
}

