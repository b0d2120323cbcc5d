//! Minimum-norm least squares and local affine fits.

use faer::{Mat, MatRef};

use crate::datasets::Neighborhood;
use crate::{Error, Result, Scalar};

/// Minimum-Euclidean-norm minimizer of `||design * beta - rhs||`.
///
/// Computed through the SVD: singular values at or below
/// `max(N, m) * eps * sigma_max` are treated as zero, so rank-deficient
/// designs get the pseudoinverse solution instead of an error. Tall designs
/// are first reduced by a Householder QR of `[design | rhs]`, which leaves
/// the singular values unchanged and carries `Q^T rhs` in the last column.
pub fn solve_least_squares<T: Scalar>(design: MatRef<'_, T>, rhs: &[T]) -> Result<Vec<T>> {
    let (rows, cols) = (design.nrows(), design.ncols());
    if rows == 0 || cols == 0 {
        return Err(Error::argument("least-squares design must be non-empty"));
    }
    if rhs.len() != rows {
        return Err(Error::dimension(format!("rhs of length {} for {rows} design rows", rhs.len())));
    }
    let finite = (0..cols).all(|j| (0..rows).all(|i| design[(i, j)].is_finite()));
    if !finite || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::argument("least-squares inputs must be finite"));
    }

    if rows >= cols {
        let augmented = Mat::<T>::from_fn(rows, cols + 1, |i, j| if j < cols { design[(i, j)] } else { rhs[i] });
        let qr = augmented.qr();
        let r = qr.thin_R();
        let projected: Vec<T> = (0..cols).map(|i| r[(i, cols)]).collect();
        let square = r.get(0..cols, 0..cols).to_owned();
        svd_solve(square.as_ref(), &projected, rows.max(cols))
    } else {
        svd_solve(design, rhs, rows.max(cols))
    }
}

fn svd_solve<T: Scalar>(matrix: MatRef<'_, T>, rhs: &[T], size: usize) -> Result<Vec<T>> {
    let svd = matrix.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let cols = matrix.ncols();
    let largest = (0..s.nrows()).map(|i| s[i]).fold(T::zero(), T::max);
    let cutoff = T::of(size as f64) * <T as num_traits::Float>::epsilon() * largest;
    let mut beta = vec![T::zero(); cols];
    for i in 0..s.nrows() {
        let sigma = s[i];
        if !(sigma > cutoff) {
            continue;
        }
        let coef = (0..u.nrows()).fold(T::zero(), |acc, l| acc + u[(l, i)] * rhs[l]) / sigma;
        for (j, b) in beta.iter_mut().enumerate() {
            *b += coef * v[(j, i)];
        }
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Solver("non-finite least-squares solution".into()));
    }
    Ok(beta)
}

/// Affine model `y = slopes . x + intercept` fitted to a neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneFit<T> {
    pub slopes: Vec<T>,
    pub intercept: T,
    /// Root-mean-square residual over the fitted points.
    pub residual_rms: T,
}

impl<T: Scalar> HyperplaneFit<T> {
    pub fn eval(&self, x: &[T]) -> T {
        self.slopes.iter().zip(x).fold(self.intercept, |acc, (&a, &xi)| acc + a * xi)
    }
}

/// Least-squares hyperplane through the anchor and all of its members,
/// weighted uniformly. Degenerate point sets get the minimum-norm fit.
pub fn fit_hyperplane<T: Scalar>(neighborhood: &Neighborhood<T>) -> Result<HyperplaneFit<T>> {
    let n = neighborhood.dim();
    let points: Vec<(&[T], T)> = neighborhood.points().collect();
    let design = Mat::<T>::from_fn(points.len(), n + 1, |i, j| if j < n { points[i].0[j] } else { T::one() });
    let rhs: Vec<T> = points.iter().map(|p| p.1).collect();
    let coef = solve_least_squares(design.as_ref(), &rhs)?;
    let mut fit = HyperplaneFit { slopes: coef[..n].to_vec(), intercept: coef[n], residual_rms: T::zero() };
    let sse = points.iter().fold(T::zero(), |acc, (x, y)| {
        let r = *y - fit.eval(x);
        acc + r * r
    });
    fit.residual_rms = (sse / T::of(points.len() as f64)).sqrt();
    Ok(fit)
}
