//! Quadratic objectives with spectra computed by eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::oracle::{ModelOracle, OracleMeta};
use crate::vector::{dot, Vector};
use rand::Rng;

/// Eigenvalues below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
enum Hessian {
    Dense(DMatrix<f64>),
    Diagonal(Vec<f64>),
}

/// `f(x) = ½(x − c)ᵀH(x − c)` with `H` symmetric positive definite.
#[derive(Clone, Debug)]
pub struct QuadraticOracle {
    hessian: Hessian,
    center: Vector,
    /// Largest eigenvalue of `H`.
    pub l: f64,
    /// Smallest eigenvalue of `H`.
    pub mu: f64,
}

impl QuadraticOracle {
    pub fn new(hessian: DMatrix<f64>, center: Vector) -> Result<Self> {
        if !hessian.is_square() {
            return Err(Error::InvalidParameter("hessian must be square".into()));
        }
        check_dim(hessian.nrows(), center.dim())?;
        let sym = (&hessian + hessian.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone()).eigenvalues;
        let l = eig.max();
        let mu = eig.min();
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter("hessian must be positive definite".into()));
        }
        Ok(Self {
            hessian: Hessian::Dense(sym),
            center,
            l,
            mu,
        })
    }

    /// `H = diag(d)`; storage and products are `O(n)`.
    pub fn diagonal(d: Vec<f64>, center: Vector) -> Result<Self> {
        check_dim(d.len(), center.dim())?;
        let mu = d.iter().copied().fold(f64::INFINITY, f64::min);
        let l = d.iter().copied().fold(0.0, f64::max);
        if !(mu > 0.0) || !l.is_finite() {
            return Err(Error::InvalidParameter("diagonal must be positive and finite".into()));
        }
        Ok(Self {
            hessian: Hessian::Diagonal(d),
            center,
            l,
            mu,
        })
    }

    /// Diagonal entries uniform on `[lo, hi]`, Gaussian minimiser.
    pub fn random_diagonal(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidParameter(format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
        }
        let mut rng = super::rng(seed);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::diagonal(d, Vector::from_raw(c))
    }

    /// `f(x) = (a/2)‖x‖²`
    pub fn isotropic(n: usize, a: f64) -> Self {
        Self::new(DMatrix::identity(n, n) * a, Vector::zeros(n)).expect("a > 0")
    }

    /// `H = MᵀM/n + shift·I` with Gaussian `M`, minimiser drawn from a Gaussian.
    pub fn random(n: usize, shift: f64, seed: u64) -> Self {
        let mut rng = super::rng(seed);
        let m = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let h = m.transpose() * &m / n as f64 + DMatrix::identity(n, n) * shift;
        let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::new(h, Vector::from_raw(c)).expect("shifted Gram matrix is positive definite")
    }

    pub fn minimizer(&self) -> &Vector {
        &self.center
    }

    /// `H` as a dense matrix.
    pub fn hessian(&self) -> DMatrix<f64> {
        match &self.hessian {
            Hessian::Dense(h) => h.clone(),
            Hessian::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
        }
    }

    fn apply(&self, d: &[f64]) -> Vec<f64> {
        match &self.hessian {
            Hessian::Dense(h) => (h * DVector::from_column_slice(d)).as_slice().to_vec(),
            Hessian::Diagonal(diag) => diag.iter().zip(d).map(|(a, b)| a * b).collect(),
        }
    }
}

impl ModelOracle for QuadraticOracle {
    fn dim(&self) -> usize {
        self.center.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(self.center.iter()).map(|(a, b)| a - b).collect();
        0.5 * dot(&d, &self.apply(&d))
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let d: Vec<f64> = x.iter().zip(self.center.iter()).map(|(a, b)| a - b).collect();
        Vector::from_raw(self.apply(&d))
    }

    fn meta(&self) -> OracleMeta {
        OracleMeta::exact(Some(self.l))
    }
}

/// Least squares `f(x) = ½‖Ax − b‖²`: PL with `μ` the smallest positive
/// eigenvalue of `AᵀA`, even when `A` is rank deficient.
#[derive(Clone, Debug)]
pub struct PLQuadratic {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub mu: f64,
    pub l: f64,
    pub f_star: f64,
    /// Minimum-norm minimiser.
    pub x_star: Vector,
}

/// Builds `½‖Ax − b‖²` with its spectrum and optimum.
pub fn pl_quadratic_make(a: DMatrix<f64>, b: DVector<f64>) -> Result<PLQuadratic> {
    check_dim(a.nrows(), b.len())?;
    if a.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter("A must be nonzero".into()));
    }
    // Nonzero spectrum of AᵀA equals that of AAᵀ; use the smaller Gram matrix.
    let gram = if a.nrows() < a.ncols() {
        &a * a.transpose()
    } else {
        a.transpose() * &a
    };
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let l = eig.max();
    let mu = eig
        .iter()
        .copied()
        .filter(|&e| e > RANK_TOL * l)
        .fold(f64::INFINITY, f64::min);
    let svd = a.clone().svd(true, true);
    let x_ls = svd
        .solve(&b, RANK_TOL * l.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("least-squares solve failed: {e}")))?;
    let r = &a * &x_ls - &b;
    let f_star = 0.5 * r.norm_squared();
    Ok(PLQuadratic {
        a,
        b,
        mu,
        l,
        f_star,
        x_star: Vector::from_raw(x_ls.as_slice().to_vec()),
    })
}

impl PLQuadratic {
    /// Gaussian `A` (`rows × cols`) and `b`.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let mut rng = super::rng(seed);
        let a = DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng));
        let b = DVector::from_fn(rows, |_, _| StandardNormal.sample(&mut rng));
        pl_quadratic_make(a, b)
    }

    /// `A = UV` with inner dimension `rank`, so `AᵀA` is singular whenever
    /// `rank < min(rows, cols)`.
    pub fn random_low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> Result<Self> {
        let mut rng = super::rng(seed);
        let u: DMatrix<f64> = DMatrix::from_fn(rows, rank, |_, _| StandardNormal.sample(&mut rng));
        let v: DMatrix<f64> = DMatrix::from_fn(rank, cols, |_, _| StandardNormal.sample(&mut rng));
        let b = DVector::from_fn(rows, |_, _| StandardNormal.sample(&mut rng));
        pl_quadratic_make(u * v, b)
    }

    /// `f(x) − f*` as `½‖A(x − x*)‖²`; the residual at `x*` is orthogonal to
    /// the range of `A`, and this form avoids cancellation near the optimum.
    pub fn gap(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(self.x_star.iter()).map(|(a, b)| a - b).collect();
        0.5 * (&self.a * DVector::from_vec(d)).norm_squared()
    }

    fn residual(&self, x: &[f64]) -> DVector<f64> {
        &self.a * DVector::from_column_slice(x) - &self.b
    }
}

impl ModelOracle for PLQuadratic {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.residual(x).norm_squared()
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let g = self.a.tr_mul(&self.residual(x));
        Vector::from_raw(g.as_slice().to_vec())
    }

    fn meta(&self) -> OracleMeta {
        OracleMeta::exact(Some(self.l))
    }
}
