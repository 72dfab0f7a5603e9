//! Complex-to-real structural transforms.
//!
//! `underline` maps a complex `p x q` matrix to the real `2pq` vector
//! `[vec(Re P); vec(Im P)]` (columns stacked top to bottom). `realify_channel`
//! builds the real block matrix that acts on underlined vectors the way
//! `I_T (x) H` acts on complex `N_t x T` blocks:
//!
//! ```text
//! underline(H X) = realify_channel(H, T) * underline(X)
//! ```

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::{ComplexMat, Error, Real, RealMat, RealVec, Result};

pub fn underline<T: Real>(p: &ComplexMat<T>) -> RealVec<T> {
    let n = p.len();
    // DMatrix storage is column-major, so iteration order is already vec{.}
    RealVec::from_iterator(2 * n, p.iter().map(|z| z.re).chain(p.iter().map(|z| z.im)))
}

pub fn ununderline<T: Real>(v: &RealVec<T>, rows: usize, cols: usize) -> Result<ComplexMat<T>> {
    let n = rows * cols;
    if v.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            what: "ununderline",
            expected: 2 * n,
            got: v.len(),
        });
    }
    Ok(ComplexMat::from_iterator(
        rows,
        cols,
        (0..n).map(|i| Complex::new(v[i], v[n + i])),
    ))
}

/// `I_T (x) H`: block diagonal with `t` copies of `h`.
pub fn kron_identity<T: Real>(h: &ComplexMat<T>, t: usize) -> ComplexMat<T> {
    let (r, c) = h.shape();
    let mut out = ComplexMat::zeros(t * r, t * c);
    for b in 0..t {
        out.view_mut((b * r, b * c), (r, c)).copy_from(h);
    }
    out
}

/// Real equivalent of `I_T (x) H`:
/// `[[Re(I_T (x) H), -Im(I_T (x) H)], [Im(I_T (x) H), Re(I_T (x) H)]]`.
pub fn realify_channel<T: Real>(h: &ComplexMat<T>, t: usize) -> RealMat<T> {
    realify_matrix(&kron_identity(h, t))
}

/// `[[Re M, -Im M], [Im M, Re M]]` for an arbitrary complex matrix.
pub fn realify_matrix<T: Real>(m: &ComplexMat<T>) -> RealMat<T> {
    let (r, c) = m.shape();
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(&re);
    out.view_mut((0, c), (r, c)).copy_from(&(-&im));
    out.view_mut((r, 0), (r, c)).copy_from(&im);
    out.view_mut((r, c), (r, c)).copy_from(&re);
    out
}
