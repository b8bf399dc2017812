//! Dense complex linear algebra for small multi-qudit systems.
//!
//! Subsystems are always ordered with the leftmost tensor factor as the most
//! significant index. Scenario states use the party order `(A, B, C_A, C_B)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance (max-norm) for Hermiticity, positivity and
/// projector checks.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "empty matrix {rows}x{cols}"
            )));
        }
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, data)))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data: Vec<_> = data.iter().map(|&x| re(x)).collect();
        Self::from_row_major(rows, cols, &data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { re(diag[i]) } else { ZERO })
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Self {
        Self(u * v.adjoint())
    }

    /// Orthogonal projector onto the span of the given orthonormal columns.
    pub fn projector_onto(columns: &DMatrix<Complex64>) -> Self {
        Self(columns * columns.adjoint())
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static shape")
    }

    pub fn pauli_y() -> Self {
        Self::from_row_major(2, 2, &[ZERO, -I, I, ZERO]).expect("static shape")
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static shape")
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.cols(), other.rows());
        debug_assert_eq!(self.rows(), other.cols());
        let mut acc = ZERO;
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `V† self V` for a matrix `V` of column vectors.
    pub fn compress(&self, basis: &DMatrix<Complex64>) -> Self {
        Self(basis.adjoint() * &self.0 * basis)
    }

    pub fn mul_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data: self
                .to_row_major()
                .into_iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let data: Vec<_> = repr.data.iter().map(|&[r, i]| c(r, i)).collect();
        ComplexMatrix::from_row_major(repr.rows, repr.cols, &data).map_err(D::Error::custom)
    }
}

/// Kronecker product, leftmost factor most significant.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Kronecker product of a list of factors.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("at least one factor").clone();
    iter.fold(first, |acc, m| acc.tensor(m))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top(&self) -> (f64, DVector<Complex64>) {
        let k = self.values.len() - 1;
        (self.values[k], self.vector(k))
    }

    /// `V diag(w) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let w = DMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| re(x)),
        ));
        ComplexMatrix(&self.vectors * w * self.vectors.adjoint())
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized before solving; inputs further than
/// `DEFAULT_TOL · (1 + ‖H‖_max)` from Hermitian are rejected.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > DEFAULT_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian(defect));
    }
    let eig = h.hermitian_part().into_inner().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(HermitianEigen { values, vectors })
}

/// Largest eigenvalue and its eigenvector.
pub fn top_eigenpair(h: &ComplexMatrix) -> Result<(f64, DVector<Complex64>)> {
    Ok(eig_hermitian(h)?.top())
}

/// Schmidt coefficients (descending) of a bipartite pure state on `d_a ⊗ d_b`.
pub fn schmidt_coefficients(
    vector: &DVector<Complex64>,
    d_a: usize,
    d_b: usize,
) -> Result<Vec<f64>> {
    if vector.len() != d_a * d_b {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} on {d_a}x{d_b}",
            vector.len()
        )));
    }
    let m = DMatrix::from_fn(d_a, d_b, |i, j| vector[i * d_b + j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of Schmidt coefficients above `tol`.
pub fn schmidt_rank(
    vector: &DVector<Complex64>,
    d_a: usize,
    d_b: usize,
    tol: f64,
) -> Result<usize> {
    Ok(schmidt_coefficients(vector, d_a, d_b)?
        .into_iter()
        .filter(|&s| s > tol)
        .count())
}

fn check_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "invalid subsystem dims {dims:?}"
        )));
    }
    let prod: usize = dims.iter().product();
    if prod != side {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} multiply to {prod}, matrix side is {side}"
        )));
    }
    Ok(())
}

/// Unit vector on a declared tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vector: DVector<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(vector: DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, vector.len())?;
        let norm = vector.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { vector, dims })
    }

    /// Normalizes `vector` before wrapping it.
    pub fn normalized(vector: DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = vector.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(vector.map(|z| z / norm), dims)
    }

    pub fn from_amplitudes(amps: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        Self::new(DVector::from_column_slice(amps), dims)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if index >= d {
            return Err(Error::OutOfRange(format!("basis index {index} >= {d}")));
        }
        let mut v = DVector::zeros(d);
        v[index] = ONE;
        Self::new(v, dims)
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            vector: self.vector.kronecker(&other.vector),
            dims,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "overlap of states with dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.vector.dotc(&other.vector))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.vector, &self.vector),
            dims: self.dims.clone(),
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector, &self.vector)
    }

    pub fn conj(&self) -> Self {
        Self {
            vector: self.vector.map(|z| z.conj()),
            dims: self.dims.clone(),
        }
    }
}

/// `|⟨psi|phi⟩|²`.
pub fn overlap_sq(psi: &PureState, phi: &PureState) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}

/// Positive unit-trace operator on a declared tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at `tol`.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        check_dims(&dims, matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = eig_hermitian(&matrix)?;
        if eig.values[0] < -tol {
            return Err(Error::NotPositive(eig.values[0]));
        }
        Ok(Self { matrix, dims })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: self.matrix.tensor(&other.matrix),
            dims,
        }
    }

    /// Convex mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "mixing states on {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange(format!("mixing weight {w}")));
        }
        Ok(Self {
            matrix: &self.matrix.scale(w) + &other.matrix.scale(1.0 - w),
            dims: self.dims.clone(),
        })
    }

    /// `Re Tr(ρ · op)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(op).re
    }

    /// Reduced state on the `keep` subsystems, in their original relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        for &k in keep {
            if k >= n {
                return Err(Error::SubsystemOutOfRange { index: k, count: n });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() {
            return Err(Error::DimensionMismatch(
                "partial trace must keep a subsystem".into(),
            ));
        }
        let kept_dims: Vec<usize> = kept.iter().map(|&k| self.dims[k]).collect();
        let d_keep: usize = kept_dims.iter().product();

        let split = subsystem_split(&self.dims, &kept);
        let d = self.dim();
        let mut out = DMatrix::zeros(d_keep, d_keep);
        for r in 0..d {
            let (kr, tr) = split[r];
            for col in 0..d {
                let (kc, tc) = split[col];
                if tr == tc {
                    out[(kr, kc)] += self.matrix.0[(r, col)];
                }
            }
        }
        Ok(Self {
            matrix: ComplexMatrix(out),
            dims: kept_dims,
        })
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {n} subsystems",
                order.len()
            )));
        }
        for &o in order {
            if o >= n || seen[o] {
                return Err(Error::OutOfRange(format!(
                    "invalid subsystem permutation {order:?}"
                )));
            }
            seen[o] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let d = self.dim();
        // old flat index for each new flat index
        let map: Vec<usize> = (0..d)
            .map(|new_idx| {
                let new_digits = digits(new_idx, &new_dims);
                let mut old_digits = vec![0; n];
                for (k, &o) in order.iter().enumerate() {
                    old_digits[o] = new_digits[k];
                }
                flatten(&old_digits, &self.dims)
            })
            .collect();
        let m = DMatrix::from_fn(d, d, |i, j| self.matrix.0[(map[i], map[j])]);
        Ok(Self {
            matrix: ComplexMatrix(m),
            dims: new_dims,
        })
    }

    /// Applies `op ρ op†` without renormalizing; the result may be subnormalized.
    pub fn sandwich(&self, op: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&op.0 * &self.matrix.0 * op.0.adjoint())
    }

    /// Wraps a positive operator after dividing by its trace.
    pub fn from_unnormalized(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.scale(1.0 / tr), dims, 1e-8)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dims: &'a [usize],
            matrix: &'a ComplexMatrix,
        }
        Repr {
            dims: &self.dims,
            matrix: &self.matrix,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dims: Vec<usize>,
            matrix: ComplexMatrix,
        }
        let r = Repr::deserialize(deserializer)?;
        DensityMatrix::new(r.matrix, r.dims, DEFAULT_TOL).map_err(D::Error::custom)
    }
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// For each flat index: (flat index over kept subsystems, flat index over traced ones).
fn subsystem_split(dims: &[usize], kept: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|idx| {
            let ds = digits(idx, dims);
            let mut k = 0;
            let mut t = 0;
            for (s, (&x, &d)) in ds.iter().zip(dims).enumerate() {
                if kept.contains(&s) {
                    k = k * d + x;
                } else {
                    t = t * d + x;
                }
            }
            (k, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn phi_plus() -> PureState {
        PureState::from_amplitudes(
            &[re(FRAC_1_SQRT_2), ZERO, ZERO, re(FRAC_1_SQRT_2)],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_zz_on_00() {
        let zz = tensor(&ComplexMatrix::pauli_z(), &ComplexMatrix::pauli_z());
        let s = PureState::basis(0, vec![2, 2]).unwrap();
        let out = zz.mul_vec(s.vector());
        assert!((out - s.vector()).norm() < 1e-15);
    }

    #[test]
    fn tensor_zx_spectrum() {
        let zx = tensor(&ComplexMatrix::pauli_z(), &ComplexMatrix::pauli_x());
        let eig = eig_hermitian(&zx).unwrap();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (w, e) in eig.values.iter().zip(expected) {
            assert!((w - e).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_leftmost_is_most_significant() {
        // |1⟩⊗|0⟩ = |10⟩ = index 2
        let x = ComplexMatrix::pauli_x();
        let i2 = ComplexMatrix::identity(2);
        let op = tensor(&x, &i2);
        let v = op.mul_vec(PureState::basis(0, vec![2, 2]).unwrap().vector());
        assert_eq!(v[2], ONE);
    }

    #[test]
    fn ptrace_bell_marginal() {
        let rho = phi_plus().density();
        let a = rho.partial_trace(&[0]).unwrap();
        assert!(
            a.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale(0.5))
                < 1e-15
        );
    }

    #[test]
    fn ptrace_product_state() {
        let ra = DensityMatrix::new(
            ComplexMatrix::from_row_major(2, 2, &[re(0.7), c(0.1, 0.2), c(0.1, -0.2), re(0.3)])
                .unwrap(),
            vec![2],
            DEFAULT_TOL,
        )
        .unwrap();
        let rb = DensityMatrix::maximally_mixed(vec![3]);
        let joint = ra.tensor(&rb);
        assert!(
            joint
                .partial_trace(&[0])
                .unwrap()
                .matrix()
                .max_abs_diff(ra.matrix())
                < 1e-15
        );
        assert!(
            joint
                .partial_trace(&[1])
                .unwrap()
                .matrix()
                .max_abs_diff(rb.matrix())
                < 1e-15
        );
    }

    #[test]
    fn ptrace_two_bell_pairs() {
        // A C_A B C_B ordering, keep A and B
        let rho = phi_plus().density().tensor(&phi_plus().density());
        let ab = rho.partial_trace(&[0, 2]).unwrap();
        assert_eq!(ab.dims(), &[2, 2]);
        assert!(
            ab.matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale(0.25))
                < 1e-15
        );
    }

    #[test]
    fn ptrace_out_of_range() {
        let rho = phi_plus().density();
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn permute_swaps_factors() {
        let ra = PureState::basis(1, vec![2]).unwrap().density();
        let rb = DensityMatrix::maximally_mixed(vec![3]);
        let swapped = ra.tensor(&rb).permute(&[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        assert!(swapped.matrix().max_abs_diff(rb.tensor(&ra).matrix()) < 1e-15);
    }

    #[test]
    fn eig_pauli_z() {
        let eig = eig_hermitian(&ComplexMatrix::pauli_z()).unwrap();
        assert_eq!(eig.values.len(), 2);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
        // -1 eigenvector is |1⟩ up to phase
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rotated_observable() {
        let h = (&ComplexMatrix::pauli_z() + &ComplexMatrix::pauli_x()).scale(FRAC_1_SQRT_2);
        let eig = eig_hermitian(&h).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_chsh_operator() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let h = (&tensor(&z, &z) + &tensor(&x, &x)).scale(2f64.sqrt());
        let eig = eig_hermitian(&h).unwrap();
        let s = 2.0 * 2f64.sqrt();
        for (w, e) in eig.values.iter().zip([-s, 0.0, 0.0, s]) {
            assert!((w - e).abs() < 1e-12, "{w} vs {e}");
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn overlaps() {
        let phi = phi_plus();
        let psi_minus = PureState::from_amplitudes(
            &[ZERO, re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2), ZERO],
            vec![2, 2],
        )
        .unwrap();
        let zero = PureState::basis(0, vec![2, 2]).unwrap();
        assert!((overlap_sq(&phi, &phi).unwrap() - 1.0).abs() < 1e-15);
        assert!(overlap_sq(&phi, &psi_minus).unwrap().abs() < 1e-15);
        assert!((overlap_sq(&zero, &phi).unwrap() - 0.5).abs() < 1e-15);
        let qubit = PureState::basis(0, vec![2]).unwrap();
        assert!(matches!(
            overlap_sq(&qubit, &phi),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(bad_trace, vec![2], DEFAULT_TOL),
            Err(Error::InvalidTrace(_))
        ));
        let negative = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(negative, vec![2], DEFAULT_TOL),
            Err(Error::NotPositive(_))
        ));
        let wrong_dims = ComplexMatrix::identity(4).scale(0.25);
        assert!(DensityMatrix::new(wrong_dims, vec![2, 3], DEFAULT_TOL).is_err());
    }

    #[test]
    fn matrix_json_format() {
        let m = ComplexMatrix::from_row_major(1, 2, &[c(1.0, 0.5), c(0.0, -2.0)]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"rows":1,"cols":2,"data":[[1.0,0.5],[0.0,-2.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let short = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(short).is_err());
    }

    #[test]
    fn schmidt_of_bell_and_product() {
        let s = schmidt_coefficients(phi_plus().vector(), 2, 2).unwrap();
        assert!((s[0] - FRAC_1_SQRT_2).abs() < 1e-12 && (s[1] - FRAC_1_SQRT_2).abs() < 1e-12);
        let prod = PureState::basis(3, vec![2, 2]).unwrap();
        assert_eq!(schmidt_rank(prod.vector(), 2, 2, 1e-9).unwrap(), 1);
    }
}
