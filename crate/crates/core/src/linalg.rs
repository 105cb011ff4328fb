//! Dense complex linear algebra for the small Hilbert spaces used here (dimension 2 to 16).
//!
//! Matrices are stored row-major. Tensor products follow the fixed flattening where the
//! left factor varies slowest: `kron(A, B)[(i·dB + k, j·dB + l)] = A[i, j]·B[k, l]`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sweep budget of the cyclic Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 50;

/// Default eigenvalue-grouping threshold.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-8;

/// Absolute Hermiticity threshold checked before diagonalising.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T: Real> {
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { data })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![Complex::zero(); dim] }
    }

    /// Unit vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = Complex::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, i: usize) -> Complex<T> {
        self.data[i]
    }

    pub fn into_entries(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == T::zero() {
            None
        } else {
            Some(self.scale(Complex::new(T::one() / n, T::zero())))
        }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr())
            .sqrt())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries; the entry count must be a perfect square.
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::NotSquare(data.len()));
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one();
        }
        m
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = Complex::new(v, T::zero());
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &ComplexVector<T>, v: &ComplexVector<T>) -> Result<Self> {
        check_dims(u.dim(), v.dim())?;
        let dim = u.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for a in u.entries() {
            for b in v.entries() {
                data.push(a * b.conj());
            }
        }
        Ok(Self { dim, data })
    }

    /// Rank-one projector `|u⟩⟨u|` (no normalisation applied).
    pub fn projector(u: &ComplexVector<T>) -> Self {
        Self::outer(u, u).expect("same vector")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        check_dims(self.dim, v.dim())?;
        let n = self.dim;
        let data = (0..n)
            .map(|i| {
                (0..n).fold(Complex::zero(), |acc, j| acc + self.data[i * n + j] * v.entries()[j])
            })
            .collect();
        Ok(ComplexVector { data })
    }

    /// `‖M − M†‖_F`.
    pub fn hermitian_deviation(&self) -> T {
        frobenius_distance(self, &self.adjoint()).expect("same dim")
    }

    /// `‖M M† − I‖_F`.
    pub fn unitary_deviation(&self) -> T {
        let prod = self.try_mul(&self.adjoint()).expect("same dim");
        frobenius_distance(&prod, &Self::identity(self.dim)).expect("same dim")
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitary_deviation() <= tol
    }
}

impl<'a, T: Real> Mul<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    /// Panics on dimension mismatch; use [`ComplexMatrix::try_mul`] for the checked form.
    fn mul(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.try_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<'a, T: Real> Add<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix dimensions agree")
    }
}

impl<'a, T: Real> Sub<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix dimensions agree")
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[i * da + j];
            if aij.is_zero() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * n + j * db + l] = aij * b.data[k * db + l];
                }
            }
        }
    }
    out
}

/// Kronecker product of kets, `u ⊗ v`.
pub fn kron_vec<T: Real>(u: &ComplexVector<T>, v: &ComplexVector<T>) -> ComplexVector<T> {
    let data = u
        .entries()
        .iter()
        .flat_map(|a| v.entries().iter().map(move |b| a * b))
        .collect();
    ComplexVector { data }
}

/// `[A, B] = AB − BA`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    ab.try_sub(&ba)
}

pub fn frobenius_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    check_dims(a.dim, b.dim)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr())
        .sqrt())
}

/// One eigenspace: eigenvalue, orthogonal projector and its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup<T: Real> {
    pub eigenvalue: T,
    pub projector: ComplexMatrix<T>,
    pub multiplicity: usize,
}

/// Eigenvalues grouped into eigenspaces, sorted ascending.
///
/// Only projectors are exposed: eigenvector phases inside a degenerate group are arbitrary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T: Real> {
    dim: usize,
    groups: Vec<EigenGroup<T>>,
    tolerance: T,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[EigenGroup<T>] {
        &self.groups
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// Group eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.groups.iter().map(|g| g.eigenvalue).collect()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn spectrum(&self) -> Vec<T> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.eigenvalue, g.multiplicity))
            .collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.groups.iter().all(|g| g.multiplicity == 1)
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.groups.iter().fold(ComplexMatrix::zeros(self.dim), |acc, g| {
            &acc + &g.projector.scale_real(g.eigenvalue)
        })
    }

    /// Unit vector spanning a rank-one group, phase fixed so its largest entry is real positive.
    pub fn rank_one_vector(&self, group: usize) -> Option<ComplexVector<T>> {
        let g = self.groups.get(group)?;
        if g.multiplicity != 1 {
            return None;
        }
        Some(vector_from_rank_one(&g.projector))
    }
}

/// Recovers `u` (up to phase) from `P = |u⟩⟨u|` using the column with the largest norm.
pub fn vector_from_rank_one<T: Real>(p: &ComplexMatrix<T>) -> ComplexVector<T> {
    let n = p.dim();
    let col_norm = |j: usize| (0..n).fold(T::zero(), |acc, i| acc + p.get(i, j).norm_sqr());
    let best = (0..n)
        .max_by(|&x, &y| col_norm(x).partial_cmp(&col_norm(y)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let col = ComplexVector { data: (0..n).map(|i| p.get(i, best)).collect() };
    canonical_phase(&col.normalized().unwrap_or(col))
}

/// Rotates the global phase so that the first entry of maximal modulus is real positive.
pub fn canonical_phase<T: Real>(v: &ComplexVector<T>) -> ComplexVector<T> {
    let eps = T::lit(1e-12);
    let max = v.entries().iter().fold(T::zero(), |m, z| m.max(z.norm()));
    match v.entries().iter().find(|z| z.norm() >= max - eps) {
        Some(pivot) if !pivot.is_zero() => v.scale(pivot.conj() / Complex::new(pivot.norm(), T::zero())),
        _ => v.clone(),
    }
}

/// Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues whose sorted neighbours differ by less than `tol` are chained into one group.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<SpectralDecomposition<T>> {
    let n = m.dim();
    let scale = m.frobenius_norm();
    let herm_tol = T::lit(HERMITIAN_TOL).max(T::epsilon() * T::lit(64.0) * scale);
    let dev = m.hermitian_deviation();
    if dev > herm_tol {
        return Err(Error::NotHermitian(dev.as_f64()));
    }

    let (values, vectors) = jacobi(m)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));

    let mut groups: Vec<EigenGroup<T>> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, groups: &mut Vec<EigenGroup<T>>| {
        if members.is_empty() {
            return;
        }
        let count = T::from_usize(members.len()).expect("small count");
        let mean = members.iter().fold(T::zero(), |acc, &k| acc + values[k]) / count;
        let mut projector = ComplexMatrix::zeros(n);
        for &k in members.iter() {
            let col = ComplexVector { data: (0..n).map(|i| vectors.get(i, k)).collect() };
            projector = &projector + &ComplexMatrix::projector(&col);
        }
        groups.push(EigenGroup { eigenvalue: mean, projector, multiplicity: members.len() });
        members.clear();
    };
    for (pos, &k) in order.iter().enumerate() {
        if pos > 0 && values[k] - values[order[pos - 1]] >= tol {
            flush(&mut members, &mut groups);
        }
        members.push(k);
    }
    flush(&mut members, &mut groups);

    Ok(SpectralDecomposition { dim: n, groups, tolerance: tol })
}

/// Returns the diagonalised entries and the accumulated unitary whose columns are eigenvectors.
fn jacobi<T: Real>(m: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = m.dim();
    let mut a = m.clone();
    // symmetrise away the round-off that passed the Hermiticity check
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, Complex::new(d, T::zero()));
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()).scale(T::lit(0.5));
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let stop = T::epsilon() * scale;
    let skip = stop * T::lit(1e-2) / T::from_usize(n.max(1)).expect("small dim");

    let off_norm = |a: &ComplexMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= stop;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                let phase = apq / Complex::new(r, T::zero());
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (T::lit(2.0) * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [−s, c]] acting on the (p, q) plane
                let g_pp = Complex::new(c, T::zero());
                let g_pq = Complex::new(s, T::zero());
                let g_qp = phase.conj().scale(-s);
                let g_qq = phase.conj().scale(c);
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * g_pp + akq * g_qp);
                    a.set(k, q, akp * g_pq + akq * g_qq);
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * g_pp + vkq * g_qp);
                    v.set(k, q, vkp * g_pq + vkq * g_qq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, g_pp.conj() * apk + g_qp.conj() * aqk);
                    a.set(q, k, g_pq.conj() * apk + g_qq.conj() * aqk);
                }
                a.set(p, q, Complex::zero());
                a.set(q, p, Complex::zero());
                let dp = a.get(p, p).re;
                let dq = a.get(q, q).re;
                a.set(p, p, Complex::new(dp, T::zero()));
                a.set(q, q, Complex::new(dq, T::zero()));
            }
        }
        converged = off_norm(&a) <= stop;
    }
    Ok(((0..n).map(|i| a.get(i, i).re).collect(), v))
}

/// Singular values of a `rows × cols` row-major matrix, descending, by one-sided Jacobi.
pub fn singular_values<T: Real>(rows: usize, cols: usize, data: &[Complex<T>]) -> Result<Vec<T>> {
    if rows * cols != data.len() {
        return Err(Error::DimensionMismatch { left: rows * cols, right: data.len() });
    }
    let mut columns: Vec<Vec<Complex<T>>> =
        (0..cols).map(|j| (0..rows).map(|i| data[i * cols + j]).collect()).collect();
    let dot = |x: &[Complex<T>], y: &[Complex<T>]| {
        x.iter().zip(y).fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b)
    };
    let sq = |x: &[Complex<T>]| x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let floor = T::epsilon() * columns.iter().fold(T::zero(), |acc, col| acc + sq(col));

    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = sq(&columns[i]);
                let beta = sq(&columns[j]);
                let gamma = dot(&columns[i], &columns[j]);
                let g = gamma.norm();
                if g <= floor || g <= T::epsilon() * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / Complex::new(g, T::zero());
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (head, tail) = columns.split_at_mut(j);
                for (xi, xj) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    let x = *xi;
                    let w = *xj * phase.conj();
                    *xi = x.scale(c) - w.scale(s);
                    *xj = x.scale(s) + w.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }
    let mut sv: Vec<T> = columns.iter().map(|c| sq(c).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv)
}
