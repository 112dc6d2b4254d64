//! Dense complex linear algebra: norms, a scaling-and-squaring matrix
//! exponential, and thin wrappers over the LAPACK eigensolver and inverse.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};

use crate::error::{Error, Result};
use crate::C64;

/// Max absolute column sum (the induced 1-norm).
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0_f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Largest entry magnitude.
pub fn max_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product, row-major block layout.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::<C64>::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] = aij * b[[p, q]];
                }
            }
        }
    }
    out
}

/// Deviation from Hermiticity, `max |a - a^dag|`.
pub fn hermiticity_error(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Right eigendecomposition of a general complex matrix; eigenvectors are the
/// columns of the returned matrix.
pub fn eig(a: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    a.eig()
        .map_err(|e| Error::Numeric(format!("eigendecomposition: {e}")))
}

/// Eigendecomposition of a Hermitian matrix (lower triangle is read);
/// eigenvalues are real and ascending, eigenvectors are the columns.
///
/// The backend solves the transposed (conjugate) problem for row-major
/// complex input, so the returned vectors are conjugated here to satisfy
/// A v = w v; the row-major copy keeps that behavior deterministic.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let standard = a.as_standard_layout().to_owned();
    let (w, v) = standard
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numeric(format!("hermitian eigendecomposition: {e}")))?;
    Ok((w, v.mapv(|z| z.conj())))
}

/// Singular values in descending order. Values are layout-agnostic, so no
/// transposition handling is needed here.
pub fn singular_values(a: &Array2<C64>) -> Result<Array1<f64>> {
    let (_, mut s, _) = a
        .svd(false, false)
        .map_err(|e| Error::Numeric(format!("singular values: {e}")))?;
    s.as_slice_mut()
        .expect("contiguous")
        .sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(s)
}

/// Matrix inverse through LU factorization.
pub fn inverse(a: &Array2<C64>) -> Result<Array2<C64>> {
    a.inv()
        .map_err(|e| Error::Numeric(format!("matrix inverse: {e}")))
}

// Degree-13 Pade numerator coefficients.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// 1-norm bound under which the degree-13 approximant is backward stable.
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape(format!(
            "expm needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("expm: non-finite input".into()));
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(0.5_f64.powi(squarings as i32), 0.0);
    let a1 = a.mapv(|z| z * scale);

    let id = Array2::<C64>::eye(n);
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = a6.mapv(|z| z * b(13)) + a4.mapv(|z| z * b(11)) + a2.mapv(|z| z * b(9));
    let u_poly =
        a6.dot(&u_inner) + a6.mapv(|z| z * b(7)) + a4.mapv(|z| z * b(5)) + a2.mapv(|z| z * b(3))
            + id.mapv(|z| z * b(1));
    let u = a1.dot(&u_poly);
    let v_inner = a6.mapv(|z| z * b(12)) + a4.mapv(|z| z * b(10)) + a2.mapv(|z| z * b(8));
    let v = a6.dot(&v_inner) + a6.mapv(|z| z * b(6)) + a4.mapv(|z| z * b(4)) + a2.mapv(|z| z * b(2))
        + id.mapv(|z| z * b(0));

    // (V - U) X = (V + U)
    let denom = &v - &u;
    let numer = &v + &u;
    let mut x = inverse(&denom)?.dot(&numer);
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    Ok(x)
}
