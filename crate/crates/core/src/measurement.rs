//! The two collapse rules for a joint measurement of `A ⊗ B`.
//!
//! [`Semantics::Luders`] projects onto whole eigenspaces of the product operator, so a
//! superposition of product eigenvectors sharing the eigenvalue `a_k b_l = a_m b_n` survives
//! the measurement untouched. [`Semantics::LocalJoint`] records the pair `(a_i, b_j)` and
//! collapses each particle onto its own local eigenspace.
//!
//! Particles not named in a measurement are carried through by identity extension.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{embed_operator, Ket, Observable, NORM_TOL};
use crate::linalg::{frobenius_distance, hermitian_eig, kron, DEFAULT_GROUPING_TOL};
use crate::rng::TrialRng;
use crate::{Matrix, C64};

/// Branches at or below this probability are dropped.
pub const ZERO_BRANCH_TOL: f64 = 1e-12;

/// Members whose fidelity exceeds `1 − PHASE_MERGE_TOL` are the same pure state.
pub const PHASE_MERGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Degenerate-eigenspace projection of the product operator.
    Luders,
    /// Rank-one local collapse with pair-valued outcomes.
    LocalJoint,
}

impl Semantics {
    pub const ALL: [Semantics; 2] = [Semantics::Luders, Semantics::LocalJoint];

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Luders => "luders",
            Semantics::LocalJoint => "local-joint",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "luders" | "lüders" => Ok(Semantics::Luders),
            "local-joint" | "localjoint" | "joint" => Ok(Semantics::LocalJoint),
            other => Err(format!("unknown semantics `{other}` (expected `luders` or `local-joint`)")),
        }
    }
}

/// Pair of local eigenvalues recorded by the two observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcome {
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Scalar(f64),
    Joint(JointOutcome),
}

impl Outcome {
    pub fn approx_eq(&self, other: &Outcome, tol: f64) -> bool {
        match (self, other) {
            (Outcome::Scalar(a), Outcome::Scalar(b)) => (a - b).abs() <= tol,
            (Outcome::Joint(a), Outcome::Joint(b)) => {
                (a.left - b.left).abs() <= tol && (a.right - b.right).abs() <= tol
            }
            _ => false,
        }
    }

    /// The product `a·b` for a joint outcome, or the scalar itself.
    pub fn product_value(&self) -> f64 {
        match self {
            Outcome::Scalar(v) => *v,
            Outcome::Joint(j) => j.left * j.right,
        }
    }

    pub fn joint(left: f64, right: f64) -> Outcome {
        Outcome::Joint(JointOutcome { left, right })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: Ket,
}

/// One joint measurement: `left` on `particles.0`, `right` on `particles.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementStep {
    pub left: Observable,
    pub right: Observable,
    pub particles: (usize, usize),
}

impl MeasurementStep {
    pub fn new(left: Observable, right: Observable, particles: (usize, usize)) -> Self {
        Self { left, right, particles }
    }
}

fn check_state(psi: &Ket) -> Result<()> {
    let n2 = psi.vector().norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

fn check_particles(psi: &Ket, particles: &[usize]) -> Result<()> {
    for (pos, &p) in particles.iter().enumerate() {
        if particles[..pos].contains(&p) {
            return Err(Error::OverlappingParticles(p));
        }
        if p >= psi.nparticles() {
            return Err(Error::ParticleOutOfRange { index: p, nparticles: psi.nparticles() });
        }
    }
    Ok(())
}

fn project(psi: &Ket, projector: &Matrix, particles: &[usize]) -> Result<Option<(f64, Ket)>> {
    let full = embed_operator(projector, particles, psi.nparticles())?;
    let v = psi.apply_raw(&full)?;
    let p = v.norm_sqr();
    if p <= ZERO_BRANCH_TOL {
        return Ok(None);
    }
    let post = Ket::normalized(v.into_entries())?;
    Ok(Some((p, post)))
}

/// Every outcome of measuring `a` on `particles.0` and `b` on `particles.1`, with its exact
/// probability and post-measurement state.
pub fn exact_distribution(
    psi: &Ket,
    a: &Observable,
    b: &Observable,
    sem: Semantics,
    particles: (usize, usize),
) -> Result<Vec<MeasurementRecord>> {
    observable_distribution(psi, &Observable::tensor(a, b), &[particles.0, particles.1], sem)
}

/// Exact outcome distribution of an observable acting on `particles`.
///
/// Under [`Semantics::LocalJoint`] the observable must be an explicit two-factor tensor
/// product; sums such as the Bell operator have no joint eigenvalues and are rejected with
/// [`Error::NoJointEigenvalues`].
pub fn observable_distribution(
    psi: &Ket,
    obs: &Observable,
    particles: &[usize],
    sem: Semantics,
) -> Result<Vec<MeasurementRecord>> {
    check_state(psi)?;
    check_particles(psi, particles)?;
    if obs.matrix().dim() != 1 << particles.len() {
        return Err(Error::DimensionMismatch { left: obs.matrix().dim(), right: 1 << particles.len() });
    }
    match sem {
        Semantics::Luders => {
            let spec = hermitian_eig(obs.matrix(), DEFAULT_GROUPING_TOL)?;
            let mut records = Vec::new();
            for g in spec.groups().iter().rev() {
                if let Some((p, post)) = project(psi, &g.projector, particles)? {
                    records.push(MeasurementRecord {
                        outcome: Outcome::Scalar(g.eigenvalue),
                        probability: p,
                        post_state: post,
                    });
                }
            }
            Ok(records)
        }
        Semantics::LocalJoint => {
            let (left, right) = match obs.factors() {
                Some(f) if particles.len() == 2 => f,
                _ => return Err(Error::NoJointEigenvalues(obs.name().to_string())),
            };
            let ls = hermitian_eig(left.matrix(), DEFAULT_GROUPING_TOL)?;
            let rs = hermitian_eig(right.matrix(), DEFAULT_GROUPING_TOL)?;
            let mut records = Vec::new();
            for ga in ls.groups().iter().rev() {
                for gb in rs.groups().iter().rev() {
                    let proj = kron(&ga.projector, &gb.projector);
                    if let Some((p, post)) = project(psi, &proj, particles)? {
                        records.push(MeasurementRecord {
                            outcome: Outcome::joint(ga.eigenvalue, gb.eigenvalue),
                            probability: p,
                            post_state: post,
                        });
                    }
                }
            }
            Ok(records)
        }
    }
}

/// Picks a record with probability proportional to its weight using one uniform draw.
pub fn draw<'a>(records: &'a [MeasurementRecord], rng: &mut TrialRng) -> &'a MeasurementRecord {
    let total: f64 = records.iter().map(|r| r.probability).sum();
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    for r in records {
        acc += r.probability;
        if u < acc {
            return r;
        }
    }
    records.last().expect("a normalized state has at least one branch")
}

/// One seeded draw from [`exact_distribution`]; the record carries the exact probability.
pub fn sample(
    psi: &Ket,
    a: &Observable,
    b: &Observable,
    sem: Semantics,
    particles: (usize, usize),
    rng_seed: u64,
) -> Result<MeasurementRecord> {
    let mut rng = TrialRng::new(rng_seed, 0);
    sample_with(psi, a, b, sem, particles, &mut rng)
}

pub fn sample_with(
    psi: &Ket,
    a: &Observable,
    b: &Observable,
    sem: Semantics,
    particles: (usize, usize),
    rng: &mut TrialRng,
) -> Result<MeasurementRecord> {
    let records = exact_distribution(psi, a, b, sem, particles)?;
    Ok(draw(&records, rng).clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<MeasurementRecord>,
    pub final_state: Ket,
}

/// Chains seeded samples, feeding each post-measurement state into the next step.
pub fn sequential(psi: &Ket, steps: &[MeasurementStep], sem: Semantics, rng_seed: u64) -> Result<Trajectory> {
    let mut rng = TrialRng::new(rng_seed, 0);
    let mut state = psi.clone();
    let mut records = Vec::with_capacity(steps.len());
    for step in steps {
        let rec = sample_with(&state, &step.left, &step.right, sem, step.particles, &mut rng)?;
        state = rec.post_state.clone();
        records.push(rec);
    }
    Ok(Trajectory { records, final_state: state })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: Ket,
    /// Outcomes along the trajectory that produced this member.
    pub history: Vec<Outcome>,
}

/// Weighted list of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > NORM_TOL || members.iter().any(|m| m.weight <= 0.0 || m.weight > 1.0 + NORM_TOL) {
            return Err(Error::EnsembleWeights(total));
        }
        if let Some(first) = members.first() {
            if let Some(m) = members.iter().find(|m| m.state.dim() != first.state.dim()) {
                return Err(Error::DimensionMismatch { left: first.state.dim(), right: m.state.dim() });
            }
        }
        Ok(Self { members })
    }

    pub fn pure(state: Ket) -> Self {
        Self { members: vec![EnsembleMember { weight: 1.0, state, history: Vec::new() }] }
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members.first().map(|m| m.state.dim()).unwrap_or(0)
    }

    /// `Σ w_i |s_i⟩⟨s_i|`.
    pub fn mixture(&self) -> Matrix {
        self.members.iter().fold(Matrix::zeros(self.dim()), |acc, m| {
            &acc + &Matrix::projector(m.state.vector()).scale_real(m.weight)
        })
    }

    /// Members equal up to global phase merged into one, weights summed.
    /// Histories of merged members are dropped.
    pub fn merged(&self) -> Ensemble {
        let mut out: Vec<EnsembleMember> = Vec::new();
        for m in &self.members {
            match out.iter_mut().find(|o| {
                o.state.fidelity(&m.state).map(|f| f > 1.0 - PHASE_MERGE_TOL).unwrap_or(false)
            }) {
                Some(o) => {
                    o.weight += m.weight;
                    o.history.clear();
                }
                None => out.push(m.clone()),
            }
        }
        Ensemble { members: out }
    }
}

/// Enumerates every trajectory of `steps` and returns the weighted final states.
pub fn channel_ensemble(psi: &Ket, steps: &[MeasurementStep], sem: Semantics) -> Result<Ensemble> {
    check_state(psi)?;
    let mut frontier = vec![EnsembleMember { weight: 1.0, state: psi.clone(), history: Vec::new() }];
    for step in steps {
        let mut next = Vec::new();
        for member in &frontier {
            for rec in exact_distribution(&member.state, &step.left, &step.right, sem, step.particles)? {
                let mut history = member.history.clone();
                history.push(rec.outcome);
                next.push(EnsembleMember {
                    weight: member.weight * rec.probability,
                    state: rec.post_state,
                    history,
                });
            }
        }
        frontier = next;
    }
    Ensemble::new(frontier)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleComparison {
    pub equal: bool,
    /// Frobenius distance between the two mixture operators.
    pub mixture_distance: f64,
    /// No pure state (up to phase) occurs in both ensembles.
    pub supports_disjoint: bool,
    /// Largest `|⟨s|t⟩|²` over members `s` of the left and `t` of the right ensemble.
    pub max_cross_fidelity: f64,
    pub left_support: Ensemble,
    pub right_support: Ensemble,
}

/// Compares two ensembles by the mixtures they induce; equal when the distance is below `tol`.
pub fn ensembles_equal(e1: &Ensemble, e2: &Ensemble, tol: f64) -> Result<EnsembleComparison> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch { left: e1.dim(), right: e2.dim() });
    }
    let mixture_distance = frobenius_distance(&e1.mixture(), &e2.mixture())?;
    let left_support = e1.merged();
    let right_support = e2.merged();
    let mut max_cross_fidelity: f64 = 0.0;
    for s in left_support.members() {
        for t in right_support.members() {
            max_cross_fidelity = max_cross_fidelity.max(s.state.fidelity(&t.state)?);
        }
    }
    Ok(EnsembleComparison {
        equal: mixture_distance < tol,
        mixture_distance,
        supports_disjoint: max_cross_fidelity < 1.0 - PHASE_MERGE_TOL,
        max_cross_fidelity,
        left_support,
        right_support,
    })
}

/// Sum of probabilities in a distribution.
pub fn total_probability(records: &[MeasurementRecord]) -> f64 {
    records.iter().map(|r| r.probability).sum()
}

/// Amplitude helper for tests and callers building superpositions.
pub fn superpose(terms: &[(C64, &Ket)]) -> Result<Ket> {
    let dim = terms.first().map(|(_, k)| k.dim()).ok_or(Error::Empty)?;
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for (w, k) in terms {
        if k.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: k.dim() });
        }
        for (slot, z) in acc.iter_mut().zip(k.amplitudes()) {
            *slot += w * z;
        }
    }
    Ket::new(acc)
}
