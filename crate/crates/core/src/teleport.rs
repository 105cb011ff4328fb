//! Teleportation of `a|+⟩ + b|−⟩` from particle 0 to particle 2 through a singlet shared by
//! particles 1 and 2.
//!
//! The protocol runs in seven steps: preparation, Bell-basis rewriting (algebra only),
//! Bell measurement, disentangling by the conditional spin flip, local detection, two
//! classical bits, and a Pauli correction. The Bell measurement is the only step that
//! depends on the collapse rule. Under [`Semantics::LocalJoint`] it is refused, because that
//! rule only gives outcomes for tensor-product observables and no such observable has the
//! Bell states as eigenvectors.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{
    bell_operator, conditional_spin_flip, local_basis, pauli, pauli_matrix, reduced_density, Axis, BellLabel, Ket,
    Observable, Unitary, NORM_TOL,
};
use crate::linalg::{frobenius_distance, kron};
use crate::measurement::{
    channel_ensemble, draw, ensembles_equal, exact_distribution, observable_distribution, MeasurementRecord,
    MeasurementStep, Outcome, Semantics,
};
use crate::rng::TrialRng;
use crate::{Matrix, Vector, C64};

/// Allowed distance between a state handed to the readout and a disentangled branch state.
pub const PROTOCOL_FORM_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The payload `a|+⟩ + b|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    pub a: C64,
    pub b: C64,
}

impl InputState {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(c(a, 0.0), c(b, 0.0))
    }

    /// Uniform on the Bloch sphere, with a uniform global phase.
    pub fn random(rng: &mut TrialRng) -> Self {
        let cos_theta = 2.0 * rng.uniform() - 1.0;
        let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
        let phi = 2.0 * PI * rng.uniform();
        let chi = 2.0 * PI * rng.uniform();
        let global = C64::from_polar(1.0, chi);
        Self { a: global * half.cos(), b: global * C64::from_polar(half.sin(), phi) }
    }

    pub fn ket(&self) -> Ket {
        Ket::qubit(self.a, self.b).expect("normalized on construction")
    }
}

/// `|φ⟩₀ ⊗ |Ψ⁻⟩₁₂`.
pub fn prepare(input: &InputState) -> Ket {
    input.ket().tensor(&BellLabel::PsiMinus.state())
}

/// One term `|Bell⟩₀₁ ⊗ |χ⟩₂` of the Bell-basis rewriting; `particle2` keeps its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BellBranch {
    pub label: BellLabel,
    pub particle2: Vector,
}

impl BellBranch {
    /// `‖χ‖`, the amplitude of this branch.
    pub fn weight(&self) -> f64 {
        self.particle2.norm()
    }

    pub fn full_state(&self) -> Vector {
        crate::linalg::kron_vec(self.label.state().vector(), &self.particle2)
    }
}

fn check_three(psi: &Ket) -> Result<()> {
    if psi.nparticles() != 3 {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: 8 });
    }
    Ok(())
}

/// Contracts particles 0 and 1 of a three-particle state against `pair`.
fn contract_pair(psi: &Ket, pair: &Ket) -> Vector {
    let mut out = vec![c(0.0, 0.0); 2];
    for (m, w) in pair.amplitudes().iter().enumerate() {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot += w.conj() * psi.amplitude(m * 2 + k);
        }
    }
    Vector::new(out).expect("finite")
}

/// Rewrites a three-particle state in the Bell basis of particles 0 and 1, in the branch
/// order Ψ⁻, Ψ⁺, Φ⁻, Φ⁺. Nothing is measured.
pub fn bell_expand(psi: &Ket) -> Result<Vec<BellBranch>> {
    check_three(psi)?;
    Ok(BellLabel::ALL
        .into_iter()
        .map(|label| BellBranch { label, particle2: contract_pair(psi, &label.state()) })
        .collect())
}

/// `Σ |Bell⟩ ⊗ χ` over the branches.
pub fn reassemble(branches: &[BellBranch]) -> Result<Vector> {
    let mut acc = Vector::zeros(8);
    for b in branches {
        acc = acc.try_add(&b.full_state())?;
    }
    Ok(acc)
}

/// `|B⟩⟨B| ⊗ 1` for each Bell state `B` of particles 0 and 1.
pub fn bell_projectors() -> Vec<(BellLabel, Matrix)> {
    BellLabel::ALL
        .into_iter()
        .map(|l| (l, kron(&Matrix::projector(l.state().vector()), &Matrix::identity(2))))
        .collect()
}

/// `Σ_B |B⟩⟨B|` on two particles.
pub fn bell_identity() -> Matrix {
    BellLabel::ALL
        .into_iter()
        .fold(Matrix::zeros(4), |acc, l| &acc + &Matrix::projector(l.state().vector()))
}

/// Observable with the four Bell states as non-degenerate eigenvectors:
/// `σx⊗σx + 2σz⊗σz`, eigenvalues −3 (Ψ⁻), −1 (Ψ⁺), +1 (Φ⁻), +3 (Φ⁺).
pub fn bell_measurement_observable() -> Observable {
    bell_operator(1.0, 2.0).expect("nonzero coefficients")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellCollapse {
    pub label: BellLabel,
    pub probability: f64,
    pub post_state: Ket,
}

/// Replaces the rule's outcome when the Bell measurement is undefined under it.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticsRefusal {
    pub semantics: Semantics,
    pub reason: String,
    /// Operators tried as a Bell measurement, each rejected for lack of factor structure.
    pub attempted_observables: Vec<String>,
    /// σz⊗σz on Ψ⁻: fidelity of the post-state with Ψ⁻ per outcome under local-joint
    /// collapse, versus 1 under eigenspace projection.
    pub counterexample: NonDemolitionCounterexample,
    pub order_dependence: OrderDependence,
    /// Local-joint σz⊗σz on particles 0 and 1 of the refused state. Not a Bell measurement.
    pub nearest_experiment: Vec<MeasurementRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonDemolitionCounterexample {
    pub observable: String,
    pub state: BellLabel,
    pub luders_post_fidelity: f64,
    /// `(outcome, probability, fidelity of post-state with the input)`.
    pub local_joint: Vec<(Outcome, f64, f64)>,
}

/// σz⊗σz then σx⊗σx versus the reverse order on Ψ⁻, per rule.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderDependence {
    pub matrix_commutator_norm: f64,
    pub local_joint_mixture_distance: f64,
    pub local_joint_supports_disjoint: bool,
    pub luders_mixture_distance: f64,
}

pub fn zz_xx_steps(reverse: bool) -> Vec<MeasurementStep> {
    let zz = MeasurementStep::new(pauli(Axis::Z), pauli(Axis::Z), (0, 1));
    let xx = MeasurementStep::new(pauli(Axis::X), pauli(Axis::X), (0, 1));
    if reverse {
        vec![xx, zz]
    } else {
        vec![zz, xx]
    }
}

/// Channel-order comparison of σz⊗σz and σx⊗σx on Ψ⁻ under both rules.
pub fn order_dependence() -> Result<OrderDependence> {
    let singlet = BellLabel::PsiMinus.state();
    let zz = kron(&pauli_matrix(Axis::Z), &pauli_matrix(Axis::Z));
    let xx = kron(&pauli_matrix(Axis::X), &pauli_matrix(Axis::X));
    let comm = crate::linalg::commutator(&zz, &xx)?.frobenius_norm();
    let compare = |sem| -> Result<_> {
        let forward = channel_ensemble(&singlet, &zz_xx_steps(false), sem)?;
        let backward = channel_ensemble(&singlet, &zz_xx_steps(true), sem)?;
        ensembles_equal(&forward, &backward, 1e-12)
    };
    let lj = compare(Semantics::LocalJoint)?;
    let lu = compare(Semantics::Luders)?;
    Ok(OrderDependence {
        matrix_commutator_norm: comm,
        local_joint_mixture_distance: lj.mixture_distance,
        local_joint_supports_disjoint: lj.supports_disjoint,
        luders_mixture_distance: lu.mixture_distance,
    })
}

fn non_demolition_counterexample() -> Result<NonDemolitionCounterexample> {
    let singlet = BellLabel::PsiMinus.state();
    let z = pauli(Axis::Z);
    let lu = exact_distribution(&singlet, &z, &z, Semantics::Luders, (0, 1))?;
    let lj = exact_distribution(&singlet, &z, &z, Semantics::LocalJoint, (0, 1))?;
    Ok(NonDemolitionCounterexample {
        observable: "σz⊗σz".into(),
        state: BellLabel::PsiMinus,
        luders_post_fidelity: lu[0].post_state.fidelity(&singlet)?,
        local_joint: lj
            .iter()
            .map(|r| Ok((r.outcome, r.probability, r.post_state.fidelity(&singlet)?)))
            .collect::<Result<_>>()?,
    })
}

fn refusal(psi: &Ket) -> Result<SemanticsRefusal> {
    let mut attempted = Vec::new();
    for op in [bell_measurement_observable(), bell_operator(2f64.sqrt(), 2f64.sqrt())?] {
        match observable_distribution(psi, &op, &[0, 1], Semantics::LocalJoint) {
            Err(Error::NoJointEigenvalues(name)) => attempted.push(name),
            Err(e) => return Err(e),
            Ok(_) => unreachable!("sums of products have no factor structure"),
        }
    }
    let z = pauli(Axis::Z);
    Ok(SemanticsRefusal {
        semantics: Semantics::LocalJoint,
        reason: "local-joint collapse defines outcomes only for tensor-product observables A⊗B, whose \
                 eigenvectors under pair-valued outcomes are product states; the Bell states are not, \
                 so no observable realises the Bell-basis reduction"
            .into(),
        attempted_observables: attempted,
        counterexample: non_demolition_counterexample()?,
        order_dependence: order_dependence()?,
        nearest_experiment: exact_distribution(psi, &z, &z, Semantics::LocalJoint, (0, 1))?,
    })
}

fn identify_branch(post: &Ket) -> BellLabel {
    BellLabel::ALL
        .into_iter()
        .map(|l| (l, contract_pair(post, &l.state()).norm_sqr()))
        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(l, _)| l)
        .expect("four labels")
}

/// All Bell-measurement branches with their exact probabilities, in Ψ⁻, Ψ⁺, Φ⁻, Φ⁺ order.
pub fn step3_distribution(psi: &Ket) -> Result<Vec<BellCollapse>> {
    check_three(psi)?;
    let records = observable_distribution(psi, &bell_measurement_observable(), &[0, 1], Semantics::Luders)?;
    let mut out: Vec<BellCollapse> = records
        .into_iter()
        .map(|r| BellCollapse { label: identify_branch(&r.post_state), probability: r.probability, post_state: r.post_state })
        .collect();
    out.sort_by_key(|b| b.label);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step3Outcome {
    Collapsed(BellCollapse),
    Refused(Box<SemanticsRefusal>),
}

pub fn step3_bell_measurement(psi: &Ket, sem: Semantics, rng_seed: u64) -> Result<Step3Outcome> {
    step3_with(psi, sem, &mut TrialRng::new(rng_seed, 0))
}

pub fn step3_with(psi: &Ket, sem: Semantics, rng: &mut TrialRng) -> Result<Step3Outcome> {
    check_three(psi)?;
    match sem {
        Semantics::LocalJoint => Ok(Step3Outcome::Refused(Box::new(refusal(psi)?))),
        Semantics::Luders => {
            let branches = step3_distribution(psi)?;
            let records: Vec<MeasurementRecord> = branches
                .iter()
                .map(|b| MeasurementRecord {
                    outcome: Outcome::Scalar(b.label as usize as f64),
                    probability: b.probability,
                    post_state: b.post_state.clone(),
                })
                .collect();
            let picked = draw(&records, rng);
            let idx = records.iter().position(|r| std::ptr::eq(r, picked)).expect("drawn from slice");
            Ok(Step3Outcome::Collapsed(branches[idx].clone()))
        }
    }
}

/// Branch override: projects onto the chosen Bell state without sampling.
pub fn step3_forced(psi: &Ket, label: BellLabel) -> Result<BellCollapse> {
    step3_distribution(psi)?
        .into_iter()
        .find(|b| b.label == label)
        .ok_or(Error::NotProtocolForm(1.0))
}

/// Applies `U_C ⊗ 1`.
pub fn step4_disentangle(state: &Ket) -> Result<Ket> {
    check_three(state)?;
    state.apply_unitary(&conditional_spin_flip().extend(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Correction {
    Identity,
    Z,
    X,
    /// The product σx·σz.
    XZ,
}

impl Correction {
    pub const ALL: [Correction; 4] = [Correction::Identity, Correction::Z, Correction::X, Correction::XZ];

    pub fn matrix(self) -> Matrix {
        match self {
            Correction::Identity => Matrix::identity(2),
            Correction::Z => pauli_matrix(Axis::Z),
            Correction::X => pauli_matrix(Axis::X),
            Correction::XZ => &pauli_matrix(Axis::X) * &pauli_matrix(Axis::Z),
        }
    }

    pub fn unitary(self) -> Unitary {
        Unitary::new(self.as_str(), self.matrix()).expect("Pauli products are unitary")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Correction::Identity => "I",
            Correction::Z => "Z",
            Correction::X => "X",
            Correction::XZ => "XZ",
        }
    }

    pub fn parse(s: &str) -> Option<Correction> {
        Correction::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classical message `[x-bit, z-bit]` (0 for a +1 reading) → branch and Pauli correction.
pub const CORRECTION_TABLE: [([u8; 2], BellLabel, Correction); 4] = [
    ([1, 0], BellLabel::PsiMinus, Correction::Identity),
    ([0, 0], BellLabel::PsiPlus, Correction::Z),
    ([1, 1], BellLabel::PhiMinus, Correction::X),
    ([0, 1], BellLabel::PhiPlus, Correction::XZ),
];

pub fn lookup_correction(bits: [u8; 2]) -> (BellLabel, Correction) {
    CORRECTION_TABLE
        .iter()
        .find(|(b, _, _)| *b == bits)
        .map(|(_, l, c)| (*l, *c))
        .expect("table covers all four messages")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    /// σx reading on particle 0.
    pub particle0_x: f64,
    /// σz reading on particle 1.
    pub particle1_z: f64,
    pub bits: [u8; 2],
    pub branch: BellLabel,
    pub correction: Correction,
    /// Particle 2 before the correction.
    pub received: Ket,
    pub final_particle2: Ket,
}

fn bit(reading: f64) -> u8 {
    if reading > 0.0 {
        0
    } else {
        1
    }
}

/// Steps 5 to 7: σx on particle 0 and σz on particle 1 (local-joint collapse, deterministic
/// on disentangled branch states), two classical bits, and Bob's correction on particle 2.
pub fn steps5to7_readout(state: &Ket, rng_seed: u64) -> Result<Readout> {
    readout_with(state, &mut TrialRng::new(rng_seed, 0))
}

pub fn readout_with(state: &Ket, rng: &mut TrialRng) -> Result<Readout> {
    check_three(state)?;
    let records = exact_distribution(state, &pauli(Axis::X), &pauli(Axis::Z), Semantics::LocalJoint, (0, 1))?;
    let max_p = records.iter().map(|r| r.probability).fold(0.0, f64::max);
    let deviation = 1.0 - max_p;
    if deviation > PROTOCOL_FORM_TOL {
        return Err(Error::NotProtocolForm(deviation));
    }
    let rec = draw(&records, rng);
    let (x_reading, z_reading) = match rec.outcome {
        Outcome::Joint(j) => (j.left, j.right),
        Outcome::Scalar(_) => unreachable!("local-joint outcomes are pairs"),
    };
    let (xp, xm) = local_basis(Axis::X);
    let (zp, zm) = local_basis(Axis::Z);
    let x_ket = if x_reading > 0.0 { xp } else { xm };
    let z_ket = if z_reading > 0.0 { zp } else { zm };
    let received = Ket::from_vector(contract_pair(&rec.post_state, &x_ket.tensor(&z_ket)))?;
    let bits = [bit(x_reading), bit(z_reading)];
    let (branch, correction) = lookup_correction(bits);
    let final_particle2 = received.apply_unitary(&correction.unitary())?;
    Ok(Readout {
        particle0_x: x_reading,
        particle1_z: z_reading,
        bits,
        branch,
        correction,
        received,
        final_particle2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub semantics: Semantics,
    pub branch: BellLabel,
    pub classical_bits: [u8; 2],
    pub correction: Correction,
    pub final_particle2: Ket,
    /// `|⟨φ|final⟩|²`.
    pub fidelity: f64,
    pub branch_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TeleportOutcome {
    Completed(TeleportReport),
    Refused(Box<SemanticsRefusal>),
}

impl TeleportOutcome {
    pub fn completed(&self) -> Option<&TeleportReport> {
        match self {
            TeleportOutcome::Completed(r) => Some(r),
            TeleportOutcome::Refused(_) => None,
        }
    }
}

pub fn run_full(input: &InputState, sem: Semantics, rng_seed: u64) -> Result<TeleportOutcome> {
    run_full_with(input, sem, &mut TrialRng::new(rng_seed, 0))
}

pub fn run_full_with(input: &InputState, sem: Semantics, rng: &mut TrialRng) -> Result<TeleportOutcome> {
    let psi = prepare(input);
    match step3_with(&psi, sem, rng)? {
        Step3Outcome::Refused(r) => Ok(TeleportOutcome::Refused(r)),
        Step3Outcome::Collapsed(collapse) => Ok(TeleportOutcome::Completed(finish(input, collapse, sem, rng)?)),
    }
}

/// Runs steps 4 to 7 after forcing the Bell branch.
pub fn run_forced(input: &InputState, label: BellLabel) -> Result<TeleportReport> {
    let collapse = step3_forced(&prepare(input), label)?;
    finish(input, collapse, Semantics::Luders, &mut TrialRng::new(0, 0))
}

fn finish(input: &InputState, collapse: BellCollapse, sem: Semantics, rng: &mut TrialRng) -> Result<TeleportReport> {
    let disentangled = step4_disentangle(&collapse.post_state)?;
    let readout = readout_with(&disentangled, rng)?;
    let fidelity = input.ket().fidelity(&readout.final_particle2)?.min(1.0);
    Ok(TeleportReport {
        semantics: sem,
        branch: readout.branch,
        classical_bits: readout.bits,
        correction: readout.correction,
        final_particle2: readout.final_particle2,
        fidelity,
        branch_probability: collapse.probability,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveReport {
    /// `(U_C ⊗ 1)|φ⟩₀|Ψ⁻⟩₁₂` with no Bell measurement in between.
    pub state: Ket,
    /// `‖U_C · Σ_B |B⟩⟨B| − U_C‖_F`.
    pub identity_check_distance: f64,
    /// Distance to `a|+⟩⊗|Φ⁻⟩ + b|−⟩⊗|Ψ⁻⟩`.
    pub in_phase_form_distance: f64,
    /// Distance to `−a|+⟩⊗|Φ⁻⟩ + b|−⟩⊗|Ψ⁻⟩`.
    pub signed_form_distance: f64,
    /// Reduced state of particle 2.
    pub particle2_density: Matrix,
    /// `⟨φ|ρ₂|φ⟩`.
    pub particle2_fidelity: f64,
}

/// Two-term form `s·a|+⟩⊗|Φ⁻⟩ + b|−⟩⊗|Ψ⁻⟩` with `s = ±1`.
pub fn naive_closed_form(input: &InputState, sign_of_a: f64) -> Vector {
    let plus = Ket::basis("+").expect("label").tensor(&BellLabel::PhiMinus.state());
    let minus = Ket::basis("-").expect("label").tensor(&BellLabel::PsiMinus.state());
    plus.vector()
        .scale(input.a * sign_of_a)
        .try_add(&minus.vector().scale(input.b))
        .expect("same dim")
}

/// Applies the disentangling unitary straight to the prepared state, skipping the Bell
/// measurement.
pub fn naive_path(input: &InputState) -> NaiveReport {
    let u = conditional_spin_flip();
    let identity_check_distance =
        frobenius_distance(&(u.matrix() * &bell_identity()), u.matrix()).expect("4x4");
    let state = step4_disentangle(&prepare(input)).expect("three particles");
    let in_phase_form_distance = state.vector().distance(&naive_closed_form(input, 1.0)).expect("8");
    let signed_form_distance = state.vector().distance(&naive_closed_form(input, -1.0)).expect("8");
    let rho = reduced_density(&state, &[2]).expect("particle 2 exists");
    let phi = input.ket();
    let particle2_fidelity = phi.vector().inner(&rho.apply(phi.vector()).expect("2")).expect("2").re;
    NaiveReport {
        state,
        identity_check_distance,
        in_phase_form_distance,
        signed_form_distance,
        particle2_density: rho,
        particle2_fidelity,
    }
}
