//! Scenario builders: each turns parsed arguments into a [`ReportDocument`].

use jointeig::hilbert::{
    bell_operator, detect_correlation_degeneracy, reduced_density, schmidt_rank, Axis,
};
use jointeig::linalg::{commutator, hermitian_eig, kron, DEFAULT_GROUPING_TOL};
use jointeig::measurement::{
    channel_ensemble, draw, ensembles_equal, exact_distribution, observable_distribution, total_probability,
    MeasurementRecord,
};
use jointeig::teleport::{
    naive_path, prepare, run_forced, run_full_with, step3_with, zz_xx_steps, InputState,
    SemanticsRefusal, Step3Outcome, TeleportOutcome, TeleportReport,
};
use jointeig::{BellLabel, Error, Ket, Outcome, Semantics, TrialRng, C64};
use serde_json::Value;

use crate::report::{complex_text, ket_text, num, round12, text, RefusalSection, ReportDocument, Table};
use crate::specs::{ObservableSpec, StateSpec};

/// Fidelity threshold for a successful teleportation.
pub const FIDELITY_TOL: f64 = 1e-10;
/// Threshold for the unitary-only path's operator identity and closed-form checks.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Residual below which a state counts as a matrix eigenvector.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotNormalized(_)
            | Error::InvalidLabel(_)
            | Error::ParticleOutOfRange { .. }
            | Error::OverlappingParticles(_)
            | Error::NotQubitDimension(_)
            | Error::LocallyDegenerate(_)
            | Error::ZeroCoefficients
            | Error::InvalidCut { .. }
            | Error::DimensionMismatch { .. } => CliError::Input(e),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn signed(x: f64) -> String {
    let r = round12(x);
    if r.fract() == 0.0 && r.abs() < 1e6 {
        format!("{:+}", r as i64)
    } else if r > 0.0 {
        format!("+{}", num(r))
    } else {
        num(r).to_string()
    }
}

pub fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Scalar(v) => signed(*v),
        Outcome::Joint(j) => format!("({},{})", signed(j.left), signed(j.right)),
    }
}

fn index_of(records: &[MeasurementRecord], picked: &MeasurementRecord) -> usize {
    records.iter().position(|r| std::ptr::eq(r, picked)).expect("drawn from the slice")
}

/// Three-sigma binomial band around `p` for `n` trials.
fn band(p: f64, n: u64) -> (f64, f64, f64) {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (sigma, p - 3.0 * sigma, p + 3.0 * sigma)
}

fn frequency_table(name: &str, label: &str, rows: &[(String, u64, f64)], trials: u64) -> (Table, bool) {
    let mut t = Table::new(name, &[label, "count", "frequency", "expected", "sigma", "lower_3sigma", "upper_3sigma", "within_band"])
        .probabilities("frequency", true);
    let mut all = true;
    for (outcome, count, p) in rows {
        let f = *count as f64 / trials as f64;
        let (sigma, lo, hi) = band(*p, trials);
        let ok = f >= lo - 1e-12 && f <= hi + 1e-12;
        all &= ok;
        t.push(vec![text(outcome.clone()), Value::from(*count), num(f), num(*p), num(sigma), num(lo), num(hi), Value::Bool(ok)]);
    }
    (t, all)
}

pub struct DistributionArgs {
    pub state: StateSpec,
    pub obs: ObservableSpec,
    pub semantics: Semantics,
    pub particles: (usize, usize),
    pub trials: Option<u64>,
    pub seed: u64,
}

pub fn distribution(args: &DistributionArgs) -> CliResult<ReportDocument> {
    let mut doc = ReportDocument::new("distribution");
    doc.semantics = Some(args.semantics.to_string());
    doc.param("state", text(args.state.text.clone()));
    doc.param("obs", text(args.obs.text.clone()));
    doc.param("particles", Value::from(vec![args.particles.0, args.particles.1]));
    if let Some(n) = args.trials {
        doc.param("trials", Value::from(n));
        doc.param("seed", Value::from(args.seed));
    }
    let psi = &args.state.ket;
    let records = exact_distribution(psi, &args.obs.left, &args.obs.right, args.semantics, args.particles)?;

    let mut exact = Table::new("exact", &["outcome", "value", "probability", "post_state", "fidelity_with_input"])
        .probabilities("probability", true);
    for r in &records {
        exact.push(vec![
            text(outcome_text(&r.outcome)),
            num(r.outcome.product_value()),
            num(r.probability),
            text(ket_text(&r.post_state)),
            num(r.post_state.fidelity(psi)?),
        ]);
    }
    doc.tables.push(exact);
    doc.diag("total_probability", num(total_probability(&records)));
    doc.diag("outcomes", Value::from(records.len()));
    if (args.state.input_norm - 1.0).abs() > 0.0 {
        doc.diag("input_norm_before_normalization", num(args.state.input_norm));
    }
    if psi.nparticles() == 2 && args.particles.0 != args.particles.1 {
        doc.diag("input_schmidt_rank", Value::from(schmidt_rank(psi, 1)?));
        let ranks: Vec<Value> = records.iter().map(|r| schmidt_rank(&r.post_state, 1).map(Value::from)).collect::<Result<_, _>>()?;
        doc.diag("post_state_schmidt_ranks", Value::Array(ranks));
    }

    if let Some(n) = args.trials {
        let mut counts = vec![0u64; records.len()];
        for t in 0..n {
            let mut rng = TrialRng::new(args.seed, t);
            counts[index_of(&records, draw(&records, &mut rng))] += 1;
        }
        let rows: Vec<(String, u64, f64)> = records
            .iter()
            .zip(&counts)
            .map(|(r, c)| (outcome_text(&r.outcome), *c, r.probability))
            .collect();
        let (table, all) = frequency_table("empirical", "outcome", &rows, n);
        doc.tables.push(table);
        doc.diag("all_within_3sigma", Value::Bool(all));
    }
    Ok(doc)
}

pub fn commutators() -> CliResult<ReportDocument> {
    let mut doc = ReportDocument::new("commutators");
    let z = jointeig::hilbert::pauli_matrix(Axis::Z);
    let x = jointeig::hilbert::pauli_matrix(Axis::X);
    let comm = commutator(&kron(&z, &z), &kron(&x, &x))?;
    doc.param("operators", text("σz⊗σz, σx⊗σx"));
    doc.param("state", text("psi-"));
    doc.param("particles", Value::from(vec![0, 1]));
    doc.diag("matrix_commutator_norm", num(comm.frobenius_norm()));
    doc.diag("matrix_commutator_exact_zero", Value::Bool(comm.entries().iter().all(|e| *e == C64::new(0.0, 0.0))));

    let singlet = BellLabel::PsiMinus.state();
    let mut order = Table::new(
        "channel_order",
        &["semantics", "mixture_distance", "ensembles_equal", "supports_disjoint", "max_cross_fidelity"],
    );
    let mut support = Table::new("supports", &["semantics", "order", "weight", "state"])
        .probabilities("weight", true)
        .grouped_by(&["semantics", "order"]);
    for sem in Semantics::ALL {
        let fwd = channel_ensemble(&singlet, &zz_xx_steps(false), sem)?;
        let bwd = channel_ensemble(&singlet, &zz_xx_steps(true), sem)?;
        let cmp = ensembles_equal(&fwd, &bwd, 1e-12)?;
        order.push(vec![
            text(sem.as_str()),
            num(cmp.mixture_distance),
            Value::Bool(cmp.equal),
            Value::Bool(cmp.supports_disjoint),
            num(cmp.max_cross_fidelity),
        ]);
        for (label, ens) in [("zz,xx", &cmp.left_support), ("xx,zz", &cmp.right_support)] {
            for m in ens.members() {
                support.push(vec![text(sem.as_str()), text(label), num(m.weight), text(ket_text(&m.state))]);
            }
        }
    }
    doc.tables.push(order);
    doc.tables.push(support);
    Ok(doc)
}

pub enum TeleportInputs {
    Fixed(InputState),
    Random(u64),
}

pub struct TeleportArgs {
    pub inputs: TeleportInputs,
    pub semantics: Semantics,
    pub seed: u64,
    pub trials: u64,
    pub force_branch: Option<BellLabel>,
    pub naive: bool,
}

fn teleport_inputs(args: &TeleportArgs) -> Vec<(InputState, TrialRng)> {
    match &args.inputs {
        TeleportInputs::Fixed(input) => (0..args.trials).map(|t| (*input, TrialRng::new(args.seed, t))).collect(),
        TeleportInputs::Random(n) => (0..*n)
            .map(|t| {
                let mut rng = TrialRng::new(args.seed, t);
                (InputState::random(&mut rng), rng)
            })
            .collect(),
    }
}

pub fn teleport(args: &TeleportArgs) -> CliResult<ReportDocument> {
    let mut doc = ReportDocument::new(if args.naive { "teleport-naive" } else { "teleport" });
    match &args.inputs {
        TeleportInputs::Fixed(i) => {
            doc.param("a", text(complex_text(i.a)));
            doc.param("b", text(complex_text(i.b)));
            doc.param("trials", Value::from(args.trials));
        }
        TeleportInputs::Random(n) => {
            doc.param("random_inputs", Value::from(*n));
        }
    }
    if args.naive {
        return naive(doc, args);
    }
    doc.semantics = Some(args.semantics.to_string());
    doc.param("seed", Value::from(args.seed));
    if let Some(l) = args.force_branch {
        doc.param("force_branch", text(l.as_str()));
    }
    let runs = teleport_inputs(args);

    if args.semantics == Semantics::LocalJoint {
        let (input, mut rng) = runs.first().cloned().ok_or_else(|| CliError::Usage("no trials requested".into()))?;
        match step3_with(&prepare(&input), Semantics::LocalJoint, &mut rng)? {
            Step3Outcome::Refused(r) => {
                doc.diag("refused_trials", Value::from(runs.len()));
                doc.diag("completed_trials", Value::from(0));
                doc.refusal = Some(refusal_section(&r));
                return Ok(doc);
            }
            Step3Outcome::Collapsed(_) => {
                return Err(CliError::Invariant("local-joint Bell measurement produced a collapse".into()));
            }
        }
    }

    let mut reports: Vec<(InputState, TeleportReport)> = Vec::with_capacity(runs.len());
    for (input, mut rng) in runs {
        let report = match args.force_branch {
            Some(label) => run_forced(&input, label)?,
            None => match run_full_with(&input, args.semantics, &mut rng)? {
                TeleportOutcome::Completed(r) => r,
                TeleportOutcome::Refused(_) => return Err(CliError::Invariant("projection rule refused".into())),
            },
        };
        reports.push((input, report));
    }

    let mut trials = Table::new(
        "trials",
        &["trial", "a", "b", "branch", "bits", "correction", "branch_probability", "fidelity", "final_particle2"],
    )
    .probabilities("branch_probability", false);
    for (t, (input, r)) in reports.iter().enumerate() {
        trials.push(vec![
            Value::from(t),
            text(complex_text(input.a)),
            text(complex_text(input.b)),
            text(r.branch.as_str()),
            text(format!("{}{}", r.classical_bits[0], r.classical_bits[1])),
            text(r.correction.as_str()),
            num(r.branch_probability),
            num(r.fidelity),
            text(ket_text(&r.final_particle2)),
        ]);
    }
    doc.tables.push(trials);

    let n = reports.len() as u64;
    let rows: Vec<(String, u64, f64)> = BellLabel::ALL
        .into_iter()
        .map(|l| (l.as_str().to_string(), reports.iter().filter(|(_, r)| r.branch == l).count() as u64, 0.25))
        .collect();
    if args.force_branch.is_none() {
        let (table, all) = frequency_table("branch_frequencies", "branch", &rows, n);
        doc.tables.push(table);
        doc.diag("all_branches_within_3sigma", Value::Bool(all));
    }
    let fids: Vec<f64> = reports.iter().map(|(_, r)| r.fidelity).collect();
    let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    doc.diag("fidelity_min", num(min));
    doc.diag("fidelity_max", num(max));
    doc.diag("fidelity_mean", num(fids.iter().sum::<f64>() / n as f64));
    doc.diag("all_fidelities_within_1e-10", Value::Bool(fids.iter().all(|f| (f - 1.0).abs() < FIDELITY_TOL)));
    doc.diag("completed_trials", Value::from(n));
    Ok(doc)
}

fn naive(mut doc: ReportDocument, args: &TeleportArgs) -> CliResult<ReportDocument> {
    let inputs: Vec<InputState> = match &args.inputs {
        TeleportInputs::Fixed(i) => vec![*i],
        TeleportInputs::Random(n) => {
            doc.param("seed", Value::from(args.seed));
            (0..*n).map(|t| InputState::random(&mut TrialRng::new(args.seed, t))).collect()
        }
    };
    let mut table = Table::new(
        "naive_path",
        &["input", "a", "b", "in_phase_form_distance", "signed_form_distance", "particle2_fidelity"],
    );
    let mut identity = 0.0f64;
    let mut in_phase = 0.0f64;
    let mut signed_form = 0.0f64;
    let mut fid_sum = 0.0;
    let mut last = None;
    for (t, input) in inputs.iter().enumerate() {
        let r = naive_path(input);
        identity = identity.max(r.identity_check_distance);
        in_phase = in_phase.max(r.in_phase_form_distance);
        signed_form = signed_form.max(r.signed_form_distance);
        fid_sum += r.particle2_fidelity;
        table.push(vec![
            Value::from(t),
            text(complex_text(input.a)),
            text(complex_text(input.b)),
            num(r.in_phase_form_distance),
            num(r.signed_form_distance),
            num(r.particle2_fidelity),
        ]);
        last = Some((*input, r));
    }
    doc.tables.push(table);
    if let (TeleportInputs::Fixed(_), Some((input, r))) = (&args.inputs, &last) {
        let mut amps = Table::new("final_state", &["basis", "re", "im"]);
        for (i, a) in r.state.amplitudes().iter().enumerate() {
            amps.push(vec![text(Ket::basis_label(i, 3)), num(a.re), num(a.im)]);
        }
        doc.tables.push(amps);
        let mut rho = Table::new("particle2_density", &["row", "col0", "col1"]);
        for i in 0..2 {
            rho.push(vec![
                Value::from(i),
                text(complex_text(r.particle2_density.get(i, 0))),
                text(complex_text(r.particle2_density.get(i, 1))),
            ]);
        }
        doc.tables.push(rho);
        doc.diag("final_state", text(ket_text(&r.state)));
        let form = Ket::from_vector(jointeig::teleport::naive_closed_form(input, 1.0))?;
        doc.diag("in_phase_form_fidelity", num(r.state.fidelity(&form)?));
        let direct = reduced_density(&r.state, &[2])?;
        doc.diag("particle2_purity", num((&direct * &direct).trace().re));
    }
    doc.diag("identity_check_distance", num(identity));
    doc.diag("identity_check_passed", Value::Bool(identity < IDENTITY_TOL));
    doc.diag("max_in_phase_form_distance", num(in_phase));
    doc.diag("in_phase_form_matches", Value::Bool(in_phase < IDENTITY_TOL));
    doc.diag("max_signed_form_distance", num(signed_form));
    doc.diag("signed_form_matches", Value::Bool(signed_form < IDENTITY_TOL));
    doc.diag("mean_particle2_fidelity", num(fid_sum / inputs.len().max(1) as f64));
    Ok(doc)
}

fn refusal_section(r: &SemanticsRefusal) -> RefusalSection {
    let mut counter = Table::new("counterexample", &["outcome", "probability", "fidelity_with_input"])
        .probabilities("probability", true);
    for (o, p, f) in &r.counterexample.local_joint {
        counter.push(vec![text(outcome_text(o)), num(*p), num(*f)]);
    }
    let mut nearest = Table::new("nearest_experiment", &["outcome", "probability", "post_state"])
        .probabilities("probability", true);
    for rec in &r.nearest_experiment {
        nearest.push(vec![text(outcome_text(&rec.outcome)), num(rec.probability), text(ket_text(&rec.post_state))]);
    }
    let od = &r.order_dependence;
    let mut order = std::collections::BTreeMap::new();
    order.insert("matrix_commutator_norm".into(), num(od.matrix_commutator_norm));
    order.insert("local_joint_mixture_distance".into(), num(od.local_joint_mixture_distance));
    order.insert("local_joint_supports_disjoint".into(), Value::Bool(od.local_joint_supports_disjoint));
    order.insert("luders_mixture_distance".into(), num(od.luders_mixture_distance));
    RefusalSection {
        semantics: r.semantics.to_string(),
        reason: r.reason.clone(),
        attempted_observables: r.attempted_observables.clone(),
        counterexample_note: format!(
            "{} on {}: eigenspace projection leaves the state with fidelity {}; local-joint collapse gives",
            r.counterexample.observable,
            r.counterexample.state,
            num(r.counterexample.luders_post_fidelity)
        ),
        counterexample: counter,
        order_dependence: order,
        nearest_experiment_note: "local-joint σz⊗σz on particles 0,1 of the prepared state; not a Bell measurement".into(),
        nearest_experiment: nearest,
    }
}

pub enum DegeneracyTarget {
    Product(ObservableSpec),
    BellOperator(f64, f64),
}

pub fn degeneracy(target: &DegeneracyTarget) -> CliResult<ReportDocument> {
    let mut doc = ReportDocument::new("degeneracy");
    match target {
        DegeneracyTarget::Product(spec) => {
            doc.param("obs", text(spec.text.clone()));
            let report = detect_correlation_degeneracy(&spec.left, &spec.right)?;
            let mut t = Table::new(
                "groups",
                &["eigenvalue", "multiplicity", "members", "witness", "witness_residual", "witness_schmidt_rank"],
            );
            for g in &report.groups {
                let members: Vec<&str> = g.members.iter().map(|m| m.label.as_str()).collect();
                t.push(vec![
                    num(g.eigenvalue),
                    Value::from(g.members.len()),
                    text(members.join(" ")),
                    g.witness.as_ref().map(|w| text(ket_text(w))).unwrap_or(Value::Null),
                    g.witness_residual.map(num).unwrap_or(Value::Null),
                    g.witness_schmidt_rank.map(Value::from).unwrap_or(Value::Null),
                ]);
            }
            doc.tables.push(t);
            doc.diag("observable", text(report.observable.clone()));
            doc.diag("has_degeneracy", Value::Bool(report.has_degeneracy()));
        }
        DegeneracyTarget::BellOperator(cx, cz) => {
            doc.param("bell_op", Value::from(vec![num(*cx), num(*cz)]));
            let op = bell_operator(*cx, *cz)?;
            let mut states = Table::new("bell_states", &["state", "eigenvector", "eigenvalue", "residual"]);
            let mut all = true;
            for label in BellLabel::ALL {
                let s = label.state();
                let lambda = op.expectation(&s)?;
                let residual = op.eigen_residual(&s, lambda)?;
                let is_eig = residual < EIGEN_TOL;
                all &= is_eig;
                states.push(vec![text(label.as_str()), Value::Bool(is_eig), num(lambda), num(residual)]);
            }
            doc.tables.push(states);
            let spec = hermitian_eig(op.matrix(), DEFAULT_GROUPING_TOL)?;
            let mut spectrum = Table::new("spectrum", &["eigenvalue", "multiplicity"]);
            for g in spec.groups() {
                spectrum.push(vec![num(g.eigenvalue), Value::from(g.multiplicity)]);
            }
            doc.tables.push(spectrum);
            doc.diag("observable", text(op.name()));
            doc.diag("all_bell_states_are_eigenvectors", Value::Bool(all));
            doc.diag("nondegenerate", Value::Bool(spec.is_nondegenerate()));
            doc.diag("has_factor_structure", Value::Bool(op.factors().is_some()));
            let singlet = BellLabel::PsiMinus.state();
            let lj = match observable_distribution(&singlet, &op, &[0, 1], Semantics::LocalJoint) {
                Err(Error::NoJointEigenvalues(_)) => "refused: no joint eigenvalues".to_string(),
                Err(e) => return Err(e.into()),
                Ok(_) => return Err(CliError::Invariant("sum of products accepted as local-joint".into())),
            };
            doc.diag("local_joint_distribution", text(lj));
        }
    }
    Ok(doc)
}
