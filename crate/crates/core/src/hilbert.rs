//! Spin-½ vocabulary: product-basis kets, Pauli observables, Bell states, the conditional
//! spin flip and detection of correlation degeneracy in `A ⊗ B`.
//!
//! The single-particle basis is `|+⟩ = (1, 0)`, `|−⟩ = (0, 1)`. Multi-particle basis
//! states are ordered lexicographically with particle 0 leftmost: `|++⟩, |+−⟩, |−+⟩, |−−⟩`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, kron, kron_vec, singular_values, DEFAULT_GROUPING_TOL};
use crate::{Matrix, Vector, C64};

/// Kets emitted by public constructors have unit norm within this bound.
pub const NORM_TOL: f64 = 1e-10;

/// Singular values above this count toward the Schmidt rank.
pub const SCHMIDT_TOL: f64 = 1e-10;

const EXACT_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    vector: Vector,
    nparticles: usize,
}

impl Ket {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let vector = Vector::new(amplitudes)?;
        let nparticles = particle_count(vector.dim())?;
        let n2 = vector.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { vector, nparticles })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let vector = Vector::new(amplitudes)?;
        let nparticles = particle_count(vector.dim())?;
        let vector = vector.normalized().ok_or(Error::NotNormalized(0.0))?;
        Ok(Self { vector, nparticles })
    }

    pub fn from_vector(vector: Vector) -> Result<Self> {
        Self::new(vector.into_entries())
    }

    /// Product-basis ket from a label such as `"+-"`.
    pub fn basis(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n == 0 {
            return Err(Error::InvalidLabel(label.to_string()));
        }
        let mut index = 0usize;
        for ch in label.chars() {
            let bit = match ch {
                '+' => 0,
                '-' | '−' => 1,
                _ => return Err(Error::InvalidLabel(label.to_string())),
            };
            index = (index << 1) | bit;
        }
        Ok(Self { vector: Vector::basis(1 << n, index), nparticles: n })
    }

    /// Single-particle ket `a|+⟩ + b|−⟩`.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.vector.entries()
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.vector.get(index)
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn nparticles(&self) -> usize {
        self.nparticles
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            vector: kron_vec(&self.vector, &other.vector),
            nparticles: self.nparticles + other.nparticles,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        self.vector.inner(&other.vector)
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Amplitude-level distance `‖self − other‖`, sensitive to global phase.
    pub fn distance(&self, other: &Ket) -> Result<f64> {
        self.vector.distance(&other.vector)
    }

    /// Applies a full-space operator without renormalizing.
    pub(crate) fn apply_raw(&self, op: &Matrix) -> Result<Vector> {
        op.apply(&self.vector)
    }

    pub fn apply_unitary(&self, u: &Unitary) -> Result<Ket> {
        let v = u.matrix().apply(&self.vector)?;
        Ok(Ket { vector: v, nparticles: self.nparticles })
    }

    /// Label of a product-basis index, e.g. `2 → "-+"` for two particles.
    pub fn basis_label(index: usize, nparticles: usize) -> String {
        (0..nparticles)
            .map(|p| if (index >> (nparticles - 1 - p)) & 1 == 0 { '+' } else { '-' })
            .collect()
    }

    /// If the ket is a product-basis vector up to phase, its label.
    pub fn as_basis_label(&self) -> Option<String> {
        let idx = self.amplitudes().iter().position(|z| (z.norm_sqr() - 1.0).abs() < EXACT_TOL)?;
        Some(Self::basis_label(idx, self.nparticles))
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, z) in self.amplitudes().iter().enumerate() {
            if z.norm_sqr() < 1e-24 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{}⟩", z.re, z.im, Self::basis_label(i, self.nparticles))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn particle_count(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() && dim >= 2 {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::NotQubitDimension(dim))
    }
}

/// Lifts an operator on the listed particles to the full `nparticles` space.
///
/// `targets[0]` is the slowest-varying index of `op`.
pub fn embed_operator(op: &Matrix, targets: &[usize], nparticles: usize) -> Result<Matrix> {
    let k = targets.len();
    if op.dim() != 1 << k {
        return Err(Error::DimensionMismatch { left: op.dim(), right: 1 << k });
    }
    for (pos, &t) in targets.iter().enumerate() {
        if t >= nparticles {
            return Err(Error::ParticleOutOfRange { index: t, nparticles });
        }
        if targets[..pos].contains(&t) {
            return Err(Error::OverlappingParticles(t));
        }
    }
    let dim = 1 << nparticles;
    let bit = |idx: usize, p: usize| (idx >> (nparticles - 1 - p)) & 1;
    let sub = |idx: usize| targets.iter().fold(0, |acc, &t| (acc << 1) | bit(idx, t));
    let mask: usize = targets.iter().map(|&t| 1 << (nparticles - 1 - t)).sum();
    let mut out = Matrix::zeros(dim);
    for r in 0..dim {
        for col in 0..dim {
            if r & !mask == col & !mask {
                out.set(r, col, op.get(sub(r), sub(col)));
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of the listed particles (others traced out).
pub fn reduced_density(psi: &Ket, keep: &[usize]) -> Result<Matrix> {
    let n = psi.nparticles();
    for &p in keep {
        if p >= n {
            return Err(Error::ParticleOutOfRange { index: p, nparticles: n });
        }
    }
    let bit = |idx: usize, p: usize| (idx >> (n - 1 - p)) & 1;
    let sub = |idx: usize| keep.iter().fold(0, |acc, &t| (acc << 1) | bit(idx, t));
    let mask: usize = keep.iter().map(|&t| 1 << (n - 1 - t)).sum();
    let mut rho = Matrix::zeros(1 << keep.len());
    let amps = psi.amplitudes();
    for r in 0..psi.dim() {
        for col in 0..psi.dim() {
            if r & !mask == col & !mask {
                let (i, j) = (sub(r), sub(col));
                rho.set(i, j, rho.get(i, j) + amps[r] * amps[col].conj());
            }
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    name: String,
    matrix: Matrix,
    factors: Option<Box<(Observable, Observable)>>,
}

impl Observable {
    pub fn new(name: impl Into<String>, matrix: Matrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { name: name.into(), matrix, factors: None })
    }

    /// `A ⊗ B`, remembering both local factors.
    pub fn tensor(left: &Observable, right: &Observable) -> Observable {
        Observable {
            name: format!("{}⊗{}", left.name, right.name),
            matrix: kron(&left.matrix, &right.matrix),
            factors: Some(Box::new((left.clone(), right.clone()))),
        }
    }

    pub fn identity(nparticles: usize) -> Observable {
        Observable { name: "1".into(), matrix: Matrix::identity(1 << nparticles), factors: None }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Local factors when this observable was built as an explicit tensor product.
    pub fn factors(&self) -> Option<(&Observable, &Observable)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    pub fn nparticles(&self) -> usize {
        self.matrix.dim().trailing_zeros() as usize
    }

    /// `‖O ψ − λ ψ‖`.
    pub fn eigen_residual(&self, psi: &Ket, lambda: f64) -> Result<f64> {
        let applied = self.matrix.apply(psi.vector())?;
        applied.distance(&psi.vector().scale(c(lambda, 0.0)))
    }

    /// Rayleigh quotient `⟨ψ|O|ψ⟩` (real for Hermitian `O`).
    pub fn expectation(&self, psi: &Ket) -> Result<f64> {
        let applied = self.matrix.apply(psi.vector())?;
        Ok(psi.vector().inner(&applied)?.re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    name: String,
    matrix: Matrix,
}

impl Unitary {
    pub fn new(name: impl Into<String>, matrix: Matrix) -> Result<Self> {
        let dev = matrix.unitary_deviation();
        if dev > EXACT_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { name: name.into(), matrix })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `self ⊗ 1` on `extra` trailing particles.
    pub fn extend(&self, extra: usize) -> Unitary {
        Unitary {
            name: format!("{}⊗1", self.name),
            matrix: kron(&self.matrix, &Matrix::identity(1 << extra)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_letter(ch: char) -> Option<Axis> {
        match ch.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

pub fn pauli_matrix(axis: Axis) -> Matrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let data = match axis {
        Axis::X => vec![z, one, one, z],
        Axis::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        Axis::Z => vec![one, z, z, -one],
    };
    Matrix::new(data).expect("2x2 literal")
}

/// Spin observable along `axis`, in units of ħ/2.
pub fn pauli(axis: Axis) -> Observable {
    Observable {
        name: format!("σ{}", axis.letter()),
        matrix: pauli_matrix(axis),
        factors: None,
    }
}

/// Orthonormal eigenbasis of `pauli(axis)`, plus-eigenvector first.
pub fn local_basis(axis: Axis) -> (Ket, Ket) {
    let h = FRAC_1_SQRT_2;
    let (p, m) = match axis {
        Axis::Z => (vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]),
        Axis::X => (vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]),
        Axis::Y => (vec![c(h, 0.0), c(0.0, h)], vec![c(h, 0.0), c(0.0, -h)]),
    };
    (Ket::new(p).expect("unit"), Ket::new(m).expect("unit"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellLabel {
    /// Branch order of the teleportation protocol: Ψ⁻, Ψ⁺, Φ⁻, Φ⁺.
    pub const ALL: [BellLabel; 4] =
        [BellLabel::PsiMinus, BellLabel::PsiPlus, BellLabel::PhiMinus, BellLabel::PhiPlus];

    pub fn state(self) -> Ket {
        let h = FRAC_1_SQRT_2;
        let (i00, i01, i10, i11) = match self {
            BellLabel::PsiPlus => (0.0, h, h, 0.0),
            BellLabel::PsiMinus => (0.0, h, -h, 0.0),
            BellLabel::PhiPlus => (h, 0.0, 0.0, h),
            BellLabel::PhiMinus => (h, 0.0, 0.0, -h),
        };
        Ket::new(vec![c(i00, 0.0), c(i01, 0.0), c(i10, 0.0), c(i11, 0.0)]).expect("unit")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellLabel::PsiMinus => "psi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PhiPlus => "phi+",
        }
    }

    pub fn parse(s: &str) -> Option<BellLabel> {
        BellLabel::ALL.into_iter().find(|l| l.as_str() == s || (s == "singlet" && *l == BellLabel::PsiMinus))
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellStates {
    pub psi_plus: Ket,
    pub psi_minus: Ket,
    pub phi_plus: Ket,
    pub phi_minus: Ket,
}

impl BellStates {
    /// In the order Ψ⁺, Ψ⁻, Φ⁺, Φ⁻.
    pub fn as_array(&self) -> [&Ket; 4] {
        [&self.psi_plus, &self.psi_minus, &self.phi_plus, &self.phi_minus]
    }
}

pub fn bell_states() -> BellStates {
    BellStates {
        psi_plus: BellLabel::PsiPlus.state(),
        psi_minus: BellLabel::PsiMinus.state(),
        phi_plus: BellLabel::PhiPlus.state(),
        phi_minus: BellLabel::PhiMinus.state(),
    }
}

/// `c_x σx⊗σx + c_z σz⊗σz`. A sum of products, so it carries no factor structure.
pub fn bell_operator(c_x: f64, c_z: f64) -> Result<Observable> {
    if c_x == 0.0 && c_z == 0.0 {
        return Err(Error::ZeroCoefficients);
    }
    let xx = kron(&pauli_matrix(Axis::X), &pauli_matrix(Axis::X)).scale_real(c_x);
    let zz = kron(&pauli_matrix(Axis::Z), &pauli_matrix(Axis::Z)).scale_real(c_z);
    Observable::new(format!("{c_x}·σx⊗σx+{c_z}·σz⊗σz"), &xx + &zz)
}

/// `U_C = |+−⟩⟨++| + |++⟩⟨+−| + |−+⟩⟨−+| + |−−⟩⟨−−|`: flips particle 1 when particle 0 is `|+⟩`.
pub fn conditional_spin_flip() -> Unitary {
    let mut m = Matrix::zeros(4);
    m.set(1, 0, c(1.0, 0.0));
    m.set(0, 1, c(1.0, 0.0));
    m.set(2, 2, c(1.0, 0.0));
    m.set(3, 3, c(1.0, 0.0));
    Unitary::new("U_C", m).expect("permutation matrix")
}

/// Number of Schmidt coefficients above [`SCHMIDT_TOL`] across the cut after `cut` particles.
pub fn schmidt_rank(psi: &Ket, cut: usize) -> Result<usize> {
    let n = psi.nparticles();
    if n < 2 || cut == 0 || cut >= n {
        return Err(Error::InvalidCut { cut, nparticles: n });
    }
    let rows = 1 << cut;
    let cols = 1 << (n - cut);
    let sv = singular_values(rows, cols, psi.amplitudes())?;
    Ok(sv.iter().filter(|&&s| s > SCHMIDT_TOL).count())
}

/// One product eigenvector `|u_i⟩ ⊗ |v_j⟩` with its local eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEigenvector {
    pub left_index: usize,
    pub right_index: usize,
    pub left_eigenvalue: f64,
    pub right_eigenvalue: f64,
    pub ket: Ket,
    /// Product-basis label when the vector is a `|±±⟩` basis vector, else `u{i}v{j}`.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyGroup {
    pub eigenvalue: f64,
    pub members: Vec<ProductEigenvector>,
    /// Equal-weight superposition of the first two members (groups of size ≥ 2 only).
    pub witness: Option<Ket>,
    pub witness_residual: Option<f64>,
    pub witness_schmidt_rank: Option<usize>,
}

impl DegeneracyGroup {
    pub fn is_degenerate(&self) -> bool {
        self.members.len() >= 2
    }

    /// `α₁|u_k v_l⟩ + α₂|u_m v_n⟩` over the first two members; requires `|α₁|² + |α₂|² = 1`.
    pub fn combination(&self, alpha1: C64, alpha2: C64) -> Result<Ket> {
        if self.members.len() < 2 {
            return Err(Error::NotDegenerate);
        }
        let w = alpha1.norm_sqr() + alpha2.norm_sqr();
        if (w - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidWeights(w));
        }
        let v = self.members[0]
            .ket
            .vector()
            .scale(alpha1)
            .try_add(&self.members[1].ket.vector().scale(alpha2))?;
        Ket::from_vector(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub observable: String,
    pub groups: Vec<DegeneracyGroup>,
}

impl DegeneracyReport {
    pub fn degenerate_groups(&self) -> impl Iterator<Item = &DegeneracyGroup> {
        self.groups.iter().filter(|g| g.is_degenerate())
    }

    pub fn has_degeneracy(&self) -> bool {
        self.degenerate_groups().next().is_some()
    }
}

/// Local eigenpairs of a non-degenerate observable, largest eigenvalue first.
pub(crate) fn local_eigenpairs(obs: &Observable) -> Result<Vec<(f64, Ket)>> {
    let spec = hermitian_eig(obs.matrix(), DEFAULT_GROUPING_TOL)?;
    if !spec.is_nondegenerate() {
        return Err(Error::LocallyDegenerate(obs.name().to_string()));
    }
    let mut pairs = Vec::with_capacity(spec.groups().len());
    for (k, g) in spec.groups().iter().enumerate().rev() {
        let v = spec.rank_one_vector(k).expect("rank one");
        pairs.push((g.eigenvalue, Ket::from_vector(v)?));
    }
    Ok(pairs)
}

/// Groups the product eigenvalues `a_i b_j` of `A ⊗ B` and builds an entangled eigenvector
/// for every group shared by two or more product eigenvectors.
pub fn detect_correlation_degeneracy(a: &Observable, b: &Observable) -> Result<DegeneracyReport> {
    let left = local_eigenpairs(a)?;
    let right = local_eigenpairs(b)?;
    let ab = Observable::tensor(a, b);
    let (na, nb) = (a.nparticles(), b.nparticles());

    let mut groups: Vec<DegeneracyGroup> = Vec::new();
    for (i, (ai, ui)) in left.iter().enumerate() {
        for (j, (bj, vj)) in right.iter().enumerate() {
            let ket = ui.tensor(vj);
            let label = ket
                .as_basis_label()
                .unwrap_or_else(|| format!("u{}v{}", i + 1, j + 1));
            let member = ProductEigenvector {
                left_index: i,
                right_index: j,
                left_eigenvalue: *ai,
                right_eigenvalue: *bj,
                ket,
                label,
            };
            let lambda = ai * bj;
            match groups.iter_mut().find(|g| (g.eigenvalue - lambda).abs() < DEFAULT_GROUPING_TOL) {
                Some(g) => g.members.push(member),
                None => groups.push(DegeneracyGroup {
                    eigenvalue: lambda,
                    members: vec![member],
                    witness: None,
                    witness_residual: None,
                    witness_schmidt_rank: None,
                }),
            }
        }
    }

    for g in groups.iter_mut().filter(|g| g.members.len() >= 2) {
        let w = g.combination(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0))?;
        g.witness_residual = Some(ab.eigen_residual(&w, g.eigenvalue)?);
        g.witness_schmidt_rank = Some(if na + nb >= 2 { schmidt_rank(&w, na)? } else { 1 });
        g.witness = Some(w);
    }

    Ok(DegeneracyReport { observable: ab.name().to_string(), groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real_diag(values: &[f64]) -> Observable {
        Observable::new(format!("diag{values:?}"), Matrix::diagonal(values)).unwrap()
    }

    #[test]
    fn pauli_eigenrelations() {
        let (zp, _) = local_basis(Axis::Z);
        assert_eq!(pauli(Axis::Z).eigen_residual(&zp, 1.0).unwrap(), 0.0);
        let (xp, xm) = local_basis(Axis::X);
        assert!(pauli(Axis::X).eigen_residual(&xp, 1.0).unwrap() < 1e-15);
        assert!(pauli(Axis::X).eigen_residual(&xm, -1.0).unwrap() < 1e-15);
        let (yp, ym) = local_basis(Axis::Y);
        assert!(pauli(Axis::Y).eigen_residual(&yp, 1.0).unwrap() < 1e-15);
        assert!(pauli(Axis::Y).eigen_residual(&ym, -1.0).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_square_trace_spectrum() {
        for axis in Axis::ALL {
            let m = pauli_matrix(axis);
            assert_eq!(&m * &m, Matrix::identity(2));
            assert_eq!(m.trace(), c(0.0, 0.0));
            let spec = hermitian_eig(&m, 1e-8).unwrap();
            assert_abs_diff_eq!(spec.eigenvalues()[0], -1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(spec.eigenvalues()[1], 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn local_bases_are_orthonormal() {
        for axis in Axis::ALL {
            let (p, m) = local_basis(axis);
            assert!(p.inner(&m).unwrap().norm() < 1e-15);
            assert_abs_diff_eq!(p.vector().norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(m.vector().norm(), 1.0, epsilon = 1e-15);
        }
        let (p, m) = local_basis(Axis::Z);
        assert_eq!(p, Ket::basis("+").unwrap());
        assert_eq!(m, Ket::basis("-").unwrap());
    }

    #[test]
    fn basis_labels_round_trip() {
        for i in 0..8 {
            let label = Ket::basis_label(i, 3);
            assert_eq!(Ket::basis(&label).unwrap().amplitude(i), c(1.0, 0.0));
        }
        assert!(Ket::basis("+x").is_err());
        assert!(Ket::basis("").is_err());
    }

    #[test]
    fn ket_rejects_unnormalized_and_bad_dims() {
        assert!(matches!(Ket::new(vec![c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::NotNormalized(_))));
        assert_eq!(Ket::new(vec![c(1.0, 0.0); 3]), Err(Error::NotQubitDimension(3)));
    }

    #[test]
    fn bell_operator_rejects_zero() {
        assert_eq!(bell_operator(0.0, 0.0), Err(Error::ZeroCoefficients));
    }

    #[test]
    fn bell_operator_one_zero_is_xx() {
        let op = bell_operator(1.0, 0.0).unwrap();
        let xx = kron(&pauli_matrix(Axis::X), &pauli_matrix(Axis::X));
        assert_eq!(op.matrix(), &xx);
        assert!(op.factors().is_none());
    }

    #[test]
    fn conditional_spin_flip_action() {
        let u = conditional_spin_flip();
        let pp = Ket::basis("++").unwrap();
        assert_eq!(pp.apply_unitary(&u).unwrap(), Ket::basis("+-").unwrap());
        let mm = Ket::basis("--").unwrap();
        assert_eq!(mm.apply_unitary(&u).unwrap(), mm);
        assert_eq!(u.matrix() * u.matrix(), Matrix::identity(4));
    }

    #[test]
    fn embed_single_particle_matches_kron() {
        let z = pauli_matrix(Axis::Z);
        let i2 = Matrix::identity(2);
        assert_eq!(embed_operator(&z, &[0], 2).unwrap(), kron(&z, &i2));
        assert_eq!(embed_operator(&z, &[1], 2).unwrap(), kron(&i2, &z));
        let x = pauli_matrix(Axis::X);
        let xz = kron(&x, &z);
        // reversed target order swaps the roles of the factors
        assert_eq!(embed_operator(&xz, &[1, 0], 2).unwrap(), kron(&z, &x));
        assert_eq!(
            embed_operator(&xz, &[0, 2], 3).unwrap(),
            kron(&kron(&x, &i2), &z)
        );
        assert!(embed_operator(&xz, &[0, 0], 3).is_err());
        assert!(embed_operator(&xz, &[0, 3], 3).is_err());
    }

    #[test]
    fn reduced_density_of_singlet_is_maximally_mixed() {
        let rho = reduced_density(&BellLabel::PsiMinus.state(), &[1]).unwrap();
        assert!(linalg::frobenius_distance(&rho, &Matrix::identity(2).scale_real(0.5)).unwrap() < 1e-15);
    }

    #[test]
    fn schmidt_rank_examples() {
        assert_eq!(schmidt_rank(&Ket::basis("+-").unwrap(), 1).unwrap(), 1);
        assert_eq!(schmidt_rank(&BellLabel::PsiMinus.state(), 1).unwrap(), 2);
        let phi = Ket::qubit(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let psi = phi.tensor(&BellLabel::PsiMinus.state());
        assert_eq!(schmidt_rank(&psi, 1).unwrap(), 1);
        assert_eq!(schmidt_rank(&psi, 2).unwrap(), 2);
        assert!(matches!(schmidt_rank(&psi, 0), Err(Error::InvalidCut { .. })));
        assert!(matches!(schmidt_rank(&psi, 3), Err(Error::InvalidCut { .. })));
    }

    #[test]
    fn zz_degeneracy_groups() {
        let report = detect_correlation_degeneracy(&pauli(Axis::Z), &pauli(Axis::Z)).unwrap();
        assert_eq!(report.groups.len(), 2);
        let labels: Vec<Vec<&str>> = report
            .groups
            .iter()
            .map(|g| g.members.iter().map(|m| m.label.as_str()).collect())
            .collect();
        assert_eq!(labels, vec![vec!["++", "--"], vec!["+-", "-+"]]);
        assert_abs_diff_eq!(report.groups[0].eigenvalue, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(report.groups[1].eigenvalue, -1.0, epsilon = 1e-14);
        let w0 = report.groups[0].witness.as_ref().unwrap();
        let w1 = report.groups[1].witness.as_ref().unwrap();
        assert!(w0.fidelity(&BellLabel::PhiPlus.state()).unwrap() > 1.0 - 1e-14);
        assert!(w1.fidelity(&BellLabel::PsiPlus.state()).unwrap() > 1.0 - 1e-14);
        for g in &report.groups {
            assert!(g.witness_residual.unwrap() < 1e-10);
            assert_eq!(g.witness_schmidt_rank, Some(2));
        }
    }

    #[test]
    fn distinct_products_have_no_degeneracy() {
        let report = detect_correlation_degeneracy(&real_diag(&[1.0, 2.0]), &real_diag(&[3.0, 4.0])).unwrap();
        assert_eq!(report.groups.len(), 4);
        assert!(!report.has_degeneracy());
        let mut products: Vec<f64> = report.groups.iter().map(|g| g.eigenvalue).collect();
        products.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in products.iter().zip([3.0, 4.0, 6.0, 8.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn crossed_diagonals_share_eigenvalue_two() {
        let report = detect_correlation_degeneracy(&real_diag(&[1.0, 2.0]), &real_diag(&[2.0, 1.0])).unwrap();
        let degenerate: Vec<_> = report.degenerate_groups().collect();
        assert_eq!(degenerate.len(), 1);
        assert_abs_diff_eq!(degenerate[0].eigenvalue, 2.0, epsilon = 1e-12);
        let mut labels: Vec<&str> = degenerate[0].members.iter().map(|m| m.label.as_str()).collect();
        labels.sort();
        // |u₁v₁⟩ = e₀⊗e₀ and |u₂v₂⟩ = e₁⊗e₁ in diagonal-position numbering
        assert_eq!(labels, vec!["++", "--"]);
    }

    #[test]
    fn locally_degenerate_input_is_rejected() {
        let err = detect_correlation_degeneracy(&Observable::identity(1), &pauli(Axis::Z)).unwrap_err();
        assert!(matches!(err, Error::LocallyDegenerate(_)));
    }

    #[test]
    fn arbitrary_weight_combination() {
        let report = detect_correlation_degeneracy(&pauli(Axis::Z), &pauli(Axis::Z)).unwrap();
        let g = &report.groups[1];
        let psi = g.combination(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let zz = Observable::tensor(&pauli(Axis::Z), &pauli(Axis::Z));
        assert!(zz.eigen_residual(&psi, -1.0).unwrap() < 1e-14);
        assert!(matches!(g.combination(c(1.0, 0.0), c(1.0, 0.0)), Err(Error::InvalidWeights(_))));
    }
}
