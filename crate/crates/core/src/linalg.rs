//! Small dense helpers not covered directly by nalgebra.

use crate::{CMatrix, C64};

/// `H_out = A^H B`, with the inner loop running down contiguous columns.
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "inner dimensions differ");
    let mut out = CMatrix::zeros(a.ncols(), b.ncols());
    for n in 0..a.ncols() {
        let an = a.column(n);
        let an = an.as_slice();
        for k in 0..b.ncols() {
            let bk = b.column(k);
            let mut acc = C64::new(0.0, 0.0);
            for (x, y) in an.iter().zip(bk.as_slice()) {
                acc += x.conj() * y;
            }
            out[(n, k)] = acc;
        }
    }
    out
}

/// `max |M - I|` over all entries.
pub fn identity_residual(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
