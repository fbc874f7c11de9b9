use nalgebra::{DMatrix, DVector};
use spaceform::{Cochain, Dec, Space};

fn dense(m: &spaceform::SparseMatrix) -> DMatrix<f64> {
    let rows = m.to_dense();
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j])
}

fn columns(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), keep.len(), |i, j| m[(i, keep[j])])
}

/// Exact and co-exact parts of a 1-cochain by dense orthogonal projection.
pub fn projection_oracle(d: &Dec, alpha: &Cochain, kind: Space) -> (DVector<f64>, DVector<f64>) {
    let cx = &d.complex;
    let d0 = dense(cx.d0());
    let d1 = dense(cx.d1());
    let m0 = DMatrix::from_diagonal(&DVector::from_vec(d.stars.star0.clone()));
    let m1 = DMatrix::from_diagonal(&DVector::from_vec(d.stars.star1.clone()));
    let m2 = DMatrix::from_diagonal(&DVector::from_vec(d.stars.star2.clone()));
    // δ₂ = ⋆₁⁻¹ d₁ᵀ ⋆₂ with collar rows dropped, δ₁ likewise
    let inv1 = DVector::from_iterator(cx.num_edges(), (0..cx.num_edges()).map(|e| if cx.collar(1)[e] { 0.0 } else { 1.0 / d.stars.star1[e] }));
    let inv0 =
        DVector::from_iterator(cx.num_vertices(), (0..cx.num_vertices()).map(|v| if cx.collar(0)[v] { 0.0 } else { 1.0 / d.stars.star0[v] }));
    let delta2 = DMatrix::from_diagonal(&inv1) * d1.transpose() * &m2;
    let delta1 = DMatrix::from_diagonal(&inv0) * d0.transpose() * &m1;

    let s = match kind {
        Space::L2 => m1.clone(),
        Space::H1 => {
            let c = d.space(Space::H1, 1).unwrap().constant;
            &m1 * (1.0 + c) + d1.transpose() * &m2 * &d1 + delta1.transpose() * &m0 * &delta1
        }
    };
    let a = DVector::from_column_slice(alpha.values());
    let project = |b: DMatrix<f64>| {
        let g = b.transpose() * &s * &b;
        let x = g.pseudo_inverse(1e-13).unwrap() * (b.transpose() * &s * &a);
        b * x
    };
    let exact = project(columns(&d0, &cx.interior_indices(0)));
    let coexact = project(columns(&delta2, &cx.interior_indices(2)));
    (exact, coexact)
}
