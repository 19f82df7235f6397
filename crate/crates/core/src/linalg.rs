//! Dense vectors, matrices and the handful of factorizations the solvers need.
//!
//! Everything here is sized for problems with a few hundred unknowns at most,
//! so the routines are plain row-major loops with no blocking.

use std::ops::{Add, Deref, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real signal vector.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean distance `|self - other|`.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Returns `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, v) in self.0.iter_mut().zip(&x.0) {
            *s += a * v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn mean_square(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.norm_sq() / self.0.len() as f64
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Add for &DenseVector {
    type Output = DenseVector;

    fn add(self, rhs: &DenseVector) -> DenseVector {
        self.lincomb(1.0, rhs, 1.0)
    }
}

impl Sub for &DenseVector {
    type Output = DenseVector;

    fn sub(self, rhs: &DenseVector) -> DenseVector {
        self.lincomb(1.0, rhs, -1.0)
    }
}

impl Mul<&DenseVector> for f64 {
    type Output = DenseVector;

    fn mul(self, rhs: &DenseVector) -> DenseVector {
        rhs.scaled(self)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> DenseVector {
        DenseVector::from_fn(self.rows, |i| self[(i, j)])
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        x.check_len(self.cols)?;
        Ok(DenseVector::from_fn(self.rows, |i| {
            self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum()
        }))
    }

    /// `Aᵀ v`
    pub fn tr_matvec(&self, v: &DenseVector) -> Result<DenseVector> {
        v.check_len(self.rows)?;
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(DenseVector::new(out))
    }

    /// `AᵀA`
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..n {
                if r[a] == 0.0 {
                    continue;
                }
                for b in a..n {
                    g.data[a * n + b] += r[a] * r[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g.data[a * n + b] = g.data[b * n + a];
            }
        }
        g
    }

    /// `I + c·self`, for square matrices.
    pub fn shifted_identity(&self, c: f64) -> DenseMatrix {
        debug_assert!(self.is_square());
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v *= c;
        }
        for i in 0..self.rows {
            m[(i, i)] += 1.0;
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Full (zero-padded) linear convolution with `filter` as a tall Toeplitz matrix.
///
/// The result has `signal_len + filter.len() - 1` rows and `signal_len` columns,
/// with `M[i][j] = filter[i - j]` where that index exists.
pub fn convolution_matrix(filter: &[f64], signal_len: usize) -> Result<DenseMatrix> {
    if filter.is_empty() || filter.iter().all(|&t| t == 0.0) {
        return Err(Error::InvalidFilter);
    }
    if filter.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidFilter);
    }
    if signal_len == 0 {
        return Err(Error::InvalidArgument("signal length must be positive".into()));
    }
    let rows = signal_len + filter.len() - 1;
    let mut m = DenseMatrix::zeros(rows, signal_len);
    for j in 0..signal_len {
        for (k, &tap) in filter.iter().enumerate() {
            m[(j + k, j)] = tap;
        }
    }
    Ok(m)
}

/// Linear operator `H` with forward and adjoint application.
///
/// The extreme eigenvalues of `HᵀH` are computed on demand, or once up front
/// through [`LinearMap::with_gram_extremes`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DenseMatrix,
    gram_extremes: Option<(f64, f64)>,
}

impl LinearMap {
    pub fn new(matrix: DenseMatrix) -> Self {
        Self {
            matrix,
            gram_extremes: None,
        }
    }

    /// Builds the map and caches `(s, σ)`, failing if `HᵀH` is singular.
    pub fn with_gram_extremes(matrix: DenseMatrix) -> Result<Self> {
        let mut map = Self::new(matrix);
        map.gram_extremes = Some(gram_extreme_eigenvalues(&map)?);
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DenseMatrix::identity(n),
            gram_extremes: Some((1.0, 1.0)),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Input dimension.
    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    /// Output dimension.
    pub fn range_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &DenseVector) -> Result<DenseVector> {
        self.matrix.matvec(x)
    }

    pub fn adjoint_apply(&self, v: &DenseVector) -> Result<DenseVector> {
        self.matrix.tr_matvec(v)
    }

    pub fn cached_gram_extremes(&self) -> Option<(f64, f64)> {
        self.gram_extremes
    }

    /// `(s, σ)`: least and greatest eigenvalue of `HᵀH`.
    pub fn gram_extremes(&self) -> Result<(f64, f64)> {
        match self.gram_extremes {
            Some(e) => Ok(e),
            None => gram_extreme_eigenvalues(self),
        }
    }
}

/// Least and greatest eigenvalue `(s, σ)` of `HᵀH`.
///
/// Fails with [`Error::NotStronglyConvex`] when `s < 1e-12·σ`.
pub fn gram_extreme_eigenvalues(map: &LinearMap) -> Result<(f64, f64)> {
    let eig = symmetric_eigenvalues(&map.matrix.gram())?;
    let s = eig[0];
    let sigma = eig[eig.len() - 1];
    if !(s >= 1e-12 * sigma) || sigma <= 0.0 {
        return Err(Error::NotStronglyConvex { s, sigma });
    }
    Ok((s, sigma))
}

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.data.clone();
    let scale: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Factorization { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / d;
            }
        }
        Ok(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector> {
        b.check_len(self.n)?;
        let n = self.n;
        let l = &self.lower;
        let mut y = b.clone().into_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= l[i * n + k] * y[k];
            }
            y[i] = v / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in i + 1..n {
                v -= l[k * n + i] * y[k];
            }
            y[i] = v / l[i * n + i];
        }
        Ok(DenseVector::new(y))
    }
}

/// Solves `A z = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    Cholesky::factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector {
        DenseVector::from_fn(n, |_| rng.random_range(-1.0..1.0))
    }

    // Characteristic polynomial coefficients via Faddeev-LeVerrier, then
    // roots by sign-change scanning and bisection. Independent of Jacobi.
    fn charpoly_roots(a: &DenseMatrix) -> Vec<f64> {
        let n = a.rows();
        let mul = |x: &DenseMatrix, y: &DenseMatrix| {
            let mut out = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] = (0..n).map(|k| x[(i, k)] * y[(k, j)]).sum();
                }
            }
            out
        };
        // p(λ) = λⁿ + c[1] λⁿ⁻¹ + ... + c[n]
        let mut c = vec![1.0; n + 1];
        let mut m = DenseMatrix::zeros(n, n);
        for k in 1..=n {
            let mut mk = mul(a, &m);
            for i in 0..n {
                mk[(i, i)] += c[k - 1];
            }
            let am = mul(a, &mk);
            let tr: f64 = (0..n).map(|i| am[(i, i)]).sum();
            c[k] = -tr / k as f64;
            m = mk;
        }
        let p = |x: f64| c.iter().fold(0.0, |acc, &ck| acc * x + ck);
        let hi: f64 = (0..n).map(|i| a[(i, i)]).sum::<f64>() + 1.0;
        let steps = 200_000;
        let mut roots = Vec::new();
        let mut prev_x = -1e-9;
        let mut prev = p(prev_x);
        for i in 1..=steps {
            let x = hi * i as f64 / steps as f64;
            let v = p(x);
            if prev == 0.0 || prev.signum() != v.signum() {
                let (mut lo, mut up) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + up);
                    if p(lo).signum() == p(mid).signum() {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                }
                roots.push(0.5 * (lo + up));
            }
            prev_x = x;
            prev = v;
        }
        roots
    }

    #[test]
    fn identity_filter_gives_identity() {
        let m = convolution_matrix(&[1.0], 3).unwrap();
        assert_eq!(m, DenseMatrix::identity(3));
    }

    #[test]
    fn two_tap_filter_matrix() {
        let m = convolution_matrix(&[1.0, 1.0], 2).unwrap();
        let expected = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn experiment_sized_matrix_is_tall() {
        let filter: Vec<f64> = (0..31).map(|k| 0.5f64.powi(k)).collect();
        let m = convolution_matrix(&filter, 90).unwrap();
        assert_eq!((m.rows(), m.cols()), (120, 90));
    }

    #[test]
    fn invalid_filters_rejected() {
        assert!(matches!(convolution_matrix(&[], 3), Err(Error::InvalidFilter)));
        assert!(matches!(convolution_matrix(&[0.0, 0.0], 3), Err(Error::InvalidFilter)));
    }

    #[test]
    fn columns_are_shifted_copies() {
        let m = convolution_matrix(&[0.3, -1.0, 2.0, 0.5], 6).unwrap();
        let c0 = m.column(0);
        for j in 1..6 {
            let cj = m.column(j);
            for i in 0..m.rows() {
                let expected = if i >= j { c0[i - j] } else { 0.0 };
                assert_eq!(cj[i], expected);
            }
        }
    }

    #[test]
    fn matvec_and_adjoint_examples() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let map = LinearMap::new(a);
        let y = map.apply(&DenseVector::new(vec![1.0, 2.0])).unwrap();
        assert_eq!(y.as_slice(), &[3.0, 3.0, 2.0]);
        let z = map.adjoint_apply(&DenseVector::new(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(z.as_slice(), &[1.0, 1.0]);

        let id = LinearMap::identity(3);
        let x = DenseVector::new(vec![0.5, -2.0, 7.0]);
        assert_eq!(id.apply(&x).unwrap(), x);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let map = LinearMap::identity(3);
        let err = map.apply(&DenseVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, found: 2 }));
        assert!(map.adjoint_apply(&DenseVector::zeros(4)).is_err());
    }

    #[test]
    fn adjoint_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let map = LinearMap::new(random_matrix(&mut rng, 9, 5));
        for _ in 0..50 {
            let x = random_vector(&mut rng, 5);
            let v = random_vector(&mut rng, 9);
            let lhs = map.apply(&x).unwrap().dot(&v);
            let rhs = x.dot(&map.adjoint_apply(&v).unwrap());
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn gram_extremes_trivial_cases() {
        assert_eq!(
            gram_extreme_eigenvalues(&LinearMap::new(DenseMatrix::identity(3))).unwrap(),
            (1.0, 1.0)
        );
        let (s, sigma) = gram_extreme_eigenvalues(&LinearMap::new(DenseMatrix::diagonal(&[1.0, 2.0]))).unwrap();
        assert!((s - 1.0).abs() < 1e-14 && (sigma - 4.0).abs() < 1e-14);
    }

    #[test]
    fn gram_extremes_match_charpoly_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 6, 4);
        let roots = charpoly_roots(&a.gram());
        assert_eq!(roots.len(), 4);
        let (s, sigma) = gram_extreme_eigenvalues(&LinearMap::new(a)).unwrap();
        assert!((s - roots[0]).abs() <= 1e-10 * roots[0], "{s} vs {}", roots[0]);
        assert!((sigma - roots[3]).abs() <= 1e-10 * roots[3]);
    }

    #[test]
    fn rank_deficient_map_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.5, 1.0]]).unwrap();
        assert!(matches!(
            gram_extreme_eigenvalues(&LinearMap::new(a)),
            Err(Error::NotStronglyConvex { .. })
        ));
    }

    #[test]
    fn cached_extremes_match_fresh_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 12, 7);
        let map = LinearMap::with_gram_extremes(a.clone()).unwrap();
        let (s, sigma) = map.cached_gram_extremes().unwrap();
        let (s2, sigma2) = gram_extreme_eigenvalues(&LinearMap::new(a)).unwrap();
        assert!(0.0 < s && s <= sigma);
        assert!((s - s2).abs() <= 1e-8 * s2 && (sigma - sigma2).abs() <= 1e-8 * sigma2);
    }

    #[test]
    fn eigen_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let map = LinearMap::new(random_matrix(&mut rng, 15, 8));
        let (s, sigma) = map.gram_extremes().unwrap();
        for _ in 0..200 {
            let w = random_vector(&mut rng, 8);
            let w = w.scaled(1.0 / w.norm());
            let q = map.apply(&w).unwrap().norm_sq();
            assert!(s - 1e-8 <= q && q <= sigma + 1e-8);
        }
    }

    #[test]
    fn spd_solves() {
        let b = DenseVector::new(vec![1.5, -2.0, 3.0]);
        assert_eq!(solve_spd(&DenseMatrix::identity(3), &b).unwrap(), b);
        let z = solve_spd(&DenseMatrix::diagonal(&[2.0, 4.0]), &DenseVector::new(vec![2.0, 8.0])).unwrap();
        assert!(z.distance(&DenseVector::new(vec![1.0, 2.0])) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = random_matrix(&mut rng, 5, 5);
        let a = r.gram().shifted_identity(1.0);
        let b = random_vector(&mut rng, 5);
        let z = solve_spd(&a, &b).unwrap();
        let res = &a.matvec(&z).unwrap() - &b;
        assert!(res.norm() <= 1e-10 * (1.0 + b.norm()));
    }

    #[test]
    fn non_spd_detected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_spd(&a, &DenseVector::zeros(2)),
            Err(Error::Factorization { pivot: 1, .. })
        ));
    }
}
