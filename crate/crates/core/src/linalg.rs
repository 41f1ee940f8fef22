//! Dense complex linear algebra shared by every module.
//!
//! Everything here works on `nalgebra` dynamic matrices. Hermitian matrix
//! functions (exponentials, square roots, cosines of a phase operator) all go
//! through one eigendecomposition routine so they are exact within the
//! truncated space.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Dense operator on a tensor-product space.
///
/// `dims` lists the subsystem dimensions (product = matrix size) and
/// `labels` names each subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub data: CMatrix,
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
}

impl Operator {
    pub fn new(data: CMatrix, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if data.nrows() != data.ncols() || data.nrows() != size {
            return Err(Error::Numerical(format!(
                "operator of shape {}x{} does not match dims {:?}",
                data.nrows(),
                data.ncols(),
                dims
            )));
        }
        if dims.len() != labels.len() {
            return Err(Error::Numerical("one label per subsystem required".into()));
        }
        Ok(Self { data, dims, labels })
    }

    /// Single-subsystem operator.
    pub fn single(data: CMatrix, label: &str) -> Self {
        let n = data.nrows();
        Self {
            data,
            dims: vec![n],
            labels: vec![label.to_string()],
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        max_asymmetry(&self.data) <= rel_tol * max_abs(&self.data).max(1.0)
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for f in factors {
        out = out.kronecker(*f);
    }
    out
}

/// Embeds `op` acting on subsystem `slot` of a product space with `dims`.
pub fn embed(op: &CMatrix, slot: usize, dims: &[usize]) -> CMatrix {
    let eyes: Vec<CMatrix> = dims.iter().map(|&d| identity(d)).collect();
    let factors: Vec<&CMatrix> = (0..dims.len())
        .map(|k| if k == slot { op } else { &eyes[k] })
        .collect();
    kron_all(&factors)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|M - M^dagger|`.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Induced infinity norm (max absolute row sum); an upper bound on the
/// spectral norm.
pub fn norm_inf(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors matching `values`.
    pub vectors: CMatrix,
}

pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    let se = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = se.eigenvectors.column(src).into_owned();
        // Fix the gauge: largest component real and positive.
        let (imax, _) = col
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 + 1e-12 { (i, z.norm()) } else { acc });
        let pivot = col[imax];
        if pivot.norm() > 0.0 {
            col *= pivot.conj() / pivot.norm();
        }
        vectors.set_column(dst, &col);
    }
    Eigh { values, vectors }
}

/// Applies a scalar function to a Hermitian matrix through its eigenbasis.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let e = eigh(m);
    from_eigh(&e, f)
}

pub fn from_eigh(e: &Eigh, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = e.values.len();
    let mut scaled = e.vectors.clone();
    for (k, &lam) in e.values.iter().enumerate() {
        let fk = f(lam);
        for i in 0..n {
            scaled[(i, k)] *= fk;
        }
    }
    scaled * e.vectors.adjoint()
}

/// `exp(-i * theta * H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, theta: f64) -> CMatrix {
    hermitian_fn(h, |lam| C64::from_polar(1.0, -theta * lam))
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative rounding eigenvalues are clipped to zero.
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    hermitian_fn(m, |lam| C64::new(lam.max(0.0).sqrt(), 0.0))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `|<a|b>|`-style inner product `<a|b>`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Unit basis vector `|k>` in dimension `n`.
pub fn basis(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

/// Maximum entrywise distance between two matrices.
pub fn max_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Flat index of a multi-index in a row-major tensor product.
pub fn flat_index(levels: &[usize], dims: &[usize]) -> usize {
    levels
        .iter()
        .zip(dims)
        .fold(0, |acc, (&l, &d)| acc * d + l)
}

/// Inverse of [`flat_index`].
pub fn multi_index(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}
