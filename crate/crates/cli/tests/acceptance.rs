//! Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.
//!
//! Runs without the libtest harness so every line is printed; exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

use jointeig::hilbert::{bell_states, pauli, pauli_matrix, Axis};
use jointeig::linalg::{commutator, kron, kron_vec};
use jointeig::measurement::{channel_ensemble, ensembles_equal, exact_distribution};
use jointeig::teleport::{
    bell_expand, naive_path, prepare, run_forced, step3_distribution, step3_forced, step3_with, step4_disentangle,
    zz_xx_steps, InputState, Step3Outcome,
};
use jointeig::{BellLabel, Ket, Matrix, Observable, Outcome, Semantics, TrialRng, Vector, C64};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn inputs(n: u64, seed: u64) -> Vec<InputState> {
    (0..n).map(|t| InputState::random(&mut TrialRng::new(seed, t))).collect()
}

fn bell_gram() -> Verdict {
    let bs = bell_states();
    let states = bs.as_array();
    let mut worst: f64 = 0.0;
    for (i, s) in states.iter().enumerate() {
        for (j, t) in states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s.inner(t).unwrap() - c(want, 0.0)).norm());
        }
    }
    verdict(worst < 1e-12, format!("max |G - I| = {worst:.3e} (tol 1e-12)"))
}

fn eigenrelations() -> Verdict {
    let zz = Observable::tensor(&pauli(Axis::Z), &pauli(Axis::Z));
    let xx = Observable::tensor(&pauli(Axis::X), &pauli(Axis::X));
    // zz: Ψ± → −1, Φ± → +1; xx: Ψ± → ±1, Φ± → ±1
    let table = [
        (BellLabel::PsiPlus, -1.0, 1.0),
        (BellLabel::PsiMinus, -1.0, -1.0),
        (BellLabel::PhiPlus, 1.0, 1.0),
        (BellLabel::PhiMinus, 1.0, -1.0),
    ];
    let mut worst: f64 = 0.0;
    for (label, z_sign, x_sign) in table {
        let s = label.state();
        worst = worst.max(zz.eigen_residual(&s, z_sign).unwrap());
        worst = worst.max(xx.eigen_residual(&s, x_sign).unwrap());
    }
    verdict(worst < 1e-12, format!("max residual {worst:.3e} over 4 states x 2 operators (tol 1e-12)"))
}

fn matrix_commutator() -> Verdict {
    let z = pauli_matrix(Axis::Z);
    let x = pauli_matrix(Axis::X);
    let comm = commutator(&kron(&z, &z), &kron(&x, &x)).unwrap();
    let exact = comm.entries().iter().all(|e| *e == c(0.0, 0.0));
    verdict(exact, format!("all 16 entries exactly zero: {exact}"))
}

fn channel_order() -> Verdict {
    let singlet = BellLabel::PsiMinus.state();
    let compare = |sem| {
        let fwd = channel_ensemble(&singlet, &zz_xx_steps(false), sem).unwrap();
        let bwd = channel_ensemble(&singlet, &zz_xx_steps(true), sem).unwrap();
        ensembles_equal(&fwd, &bwd, 1e-12).unwrap()
    };
    let lj = compare(Semantics::LocalJoint);
    let lu = compare(Semantics::Luders);
    let pass = lj.mixture_distance > 0.5 && lj.supports_disjoint && lu.mixture_distance < 1e-12;
    verdict(
        pass,
        format!(
            "local-joint mixture distance {:.3e} (need > 0.5), supports disjoint {} (max cross fidelity {:.3}); luders distance {:.3e} (tol 1e-12)",
            lj.mixture_distance, lj.supports_disjoint, lj.max_cross_fidelity, lu.mixture_distance
        ),
    )
}

fn singlet_zz() -> Verdict {
    let singlet = BellLabel::PsiMinus.state();
    let z = pauli(Axis::Z);
    let lj = exact_distribution(&singlet, &z, &z, Semantics::LocalJoint, (0, 1)).unwrap();
    let want = [Outcome::joint(1.0, -1.0), Outcome::joint(-1.0, 1.0)];
    let lj_ok = lj.len() == 2
        && want.iter().all(|w| lj.iter().any(|r| r.outcome.approx_eq(w, 0.0) && (r.probability - 0.5).abs() < 1e-12));
    let lu = exact_distribution(&singlet, &z, &z, Semantics::Luders, (0, 1)).unwrap();
    let fid = lu.first().map(|r| r.post_state.fidelity(&singlet).unwrap()).unwrap_or(0.0);
    let lu_ok = lu.len() == 1
        && lu[0].outcome.approx_eq(&Outcome::Scalar(-1.0), 1e-12)
        && (lu[0].probability - 1.0).abs() < 1e-12
        && fid > 1.0 - 1e-10;
    let lj_probs: Vec<String> = lj
        .iter()
        .map(|r| match r.outcome {
            Outcome::Joint(j) => format!("({:+},{:+}): {}", j.left, j.right, r.probability),
            Outcome::Scalar(v) => format!("{v:+}: {}", r.probability),
        })
        .collect();
    verdict(
        lj_ok && lu_ok,
        format!(
            "local-joint [{}] (tol 1e-12); luders {} outcome(s) with p = {}, post fidelity {fid} (need > 1 - 1e-10)",
            lj_probs.join(", "),
            lu.len(),
            lu.first().map(|r| r.probability).unwrap_or(0.0)
        ),
    )
}

fn xx_on_minus_plus() -> Verdict {
    let psi = Ket::basis("-+").unwrap();
    let x = pauli(Axis::X);
    let d = exact_distribution(&psi, &x, &x, Semantics::LocalJoint, (0, 1)).unwrap();
    let worst = d.iter().map(|r| (r.probability - 0.25).abs()).fold(0.0, f64::max);
    verdict(d.len() == 4 && worst < 1e-12, format!("{} outcomes, max |p - 1/4| = {worst:.3e} (tol 1e-12)", d.len()))
}

fn branch_probabilities() -> Verdict {
    let mut worst: f64 = 0.0;
    for input in inputs(100, 50) {
        for b in step3_distribution(&prepare(&input)).unwrap() {
            worst = worst.max((b.probability - 0.25).abs());
        }
    }
    let exact_ok = worst < 1e-10;
    let trials = 100_000u64;
    let mut counts = [0u64; 4];
    for t in 0..trials {
        let mut rng = TrialRng::new(50, t);
        let input = InputState::random(&mut rng);
        match step3_with(&prepare(&input), Semantics::Luders, &mut rng).unwrap() {
            Step3Outcome::Collapsed(b) => counts[b.label as usize] += 1,
            Step3Outcome::Refused(_) => return verdict(false, "projection rule refused"),
        }
    }
    let sigma = (0.25f64 * 0.75 / trials as f64).sqrt();
    let devs: Vec<f64> = counts.iter().map(|&k| (k as f64 / trials as f64 - 0.25) / sigma).collect();
    let mc_ok = devs.iter().all(|d| d.abs() <= 3.0);
    verdict(
        exact_ok && mc_ok,
        format!(
            "exact: max |p - 1/4| = {worst:.3e} over 100 inputs (tol 1e-10); Monte Carlo 1e5 counts {counts:?}, z-scores [{}] (band 3 sigma)",
            devs.iter().map(|d| format!("{d:+.2}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn qubit(a: C64, b: C64) -> Vector {
    Vector::new(vec![a, b]).unwrap()
}

/// The written amplitude forms: particle-2 factor per branch, and the particle-0 and
/// particle-1 factors after the disentangling unitary.
fn written_forms(input: &InputState) -> Vec<(BellLabel, Vector, Ket)> {
    let (a, b) = (input.a, input.b);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let x_minus = Ket::new(vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
    let x_plus = Ket::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
    let plus = Ket::basis("+").unwrap();
    let minus = Ket::basis("-").unwrap();
    vec![
        (BellLabel::PsiMinus, qubit(-a, -b), x_minus.tensor(&plus)),
        (BellLabel::PsiPlus, qubit(-a, b), x_plus.tensor(&plus)),
        (BellLabel::PhiMinus, qubit(a, b), x_minus.tensor(&minus)),
        (BellLabel::PhiPlus, qubit(a, -b), x_plus.tensor(&minus)),
    ]
}

fn amplitude_exactness() -> Verdict {
    let mut worst = [[0.0f64; 3]; 4];
    for input in inputs(100, 36) {
        let psi = prepare(&input);
        let branches = bell_expand(&psi).unwrap();
        for (k, (label, chi, pair)) in written_forms(&input).into_iter().enumerate() {
            let expand = branches[k].particle2.distance(&chi.scale(c(0.5, 0.0))).unwrap();
            let post = step3_forced(&psi, label).unwrap().post_state;
            let written_post = kron_vec(label.state().vector(), &chi);
            let step3 = post.vector().distance(&written_post).unwrap();
            let out = step4_disentangle(&post).unwrap();
            let written_out = kron_vec(pair.vector(), &chi);
            let step4 = out.vector().distance(&written_out).unwrap();
            for (slot, d) in worst[k].iter_mut().zip([expand, step3, step4]) {
                *slot = slot.max(d);
            }
        }
    }
    let pass = worst.iter().flatten().all(|&d| d < 1e-12);
    let parts: Vec<String> = BellLabel::ALL
        .iter()
        .zip(&worst)
        .map(|(l, w)| format!("{l}: expand {:.2e}, step3 {:.2e}, step4 {:.2e}", w[0], w[1], w[2]))
        .collect();
    verdict(pass, format!("max amplitude distance over 100 inputs (tol 1e-12): {}", parts.join("; ")))
}

fn end_to_end_fidelity() -> Verdict {
    let mut worst: f64 = 0.0;
    for input in inputs(100, 9) {
        for label in BellLabel::ALL {
            worst = worst.max((run_forced(&input, label).unwrap().fidelity - 1.0).abs());
        }
    }
    verdict(worst < 1e-10, format!("max |F - 1| = {worst:.3e} over 100 inputs x 4 forced branches (tol 1e-10)"))
}

fn naive_path_checks() -> Verdict {
    let mut identity: f64 = 0.0;
    let mut written: f64 = 0.0;
    let mut flipped: f64 = 0.0;
    for input in inputs(100, 48) {
        let r = naive_path(&input);
        identity = identity.max(r.identity_check_distance);
        written = written.max(r.in_phase_form_distance);
        flipped = flipped.max(r.signed_form_distance);
    }
    verdict(
        identity < 1e-12 && written < 1e-12,
        format!(
            "operator identity distance {identity:.3e}; distance to a|+>Phi- + b|->Psi- max {written:.3e}; to -a|+>Phi- + b|->Psi- max {flipped:.3e} (tol 1e-12)"
        ),
    )
}

fn random_observable(rng: &mut TrialRng, eig: [f64; 2]) -> Observable {
    let theta = PI * rng.uniform();
    let phi = 2.0 * PI * rng.uniform();
    let (s, co) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let u1 = [c(co, 0.0), e * s];
    let u2 = [c(-s, 0.0), e * co];
    let mut m = Matrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            m.set(i, j, u1[i] * u1[j].conj() * eig[0] + u2[i] * u2[j].conj() * eig[1]);
        }
    }
    Observable::new("random", m).unwrap()
}

fn semantics_agreement() -> Verdict {
    let mut worst_p: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    let mut mismatched = 0;
    let mut pairs = 0;
    let mut stream = 0u64;
    while pairs < 50 {
        let mut rng = TrialRng::new(11, stream);
        stream += 1;
        let mut u = || 4.0 * rng.uniform() - 2.0;
        let (a, b) = ([u(), u()], [u(), u()]);
        let prods = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        let distinct = (a[0] - a[1]).abs() > 0.05
            && (b[0] - b[1]).abs() > 0.05
            && (0..4).all(|i| (i + 1..4).all(|j| (prods[i] - prods[j]).abs() > 1e-3));
        if !distinct {
            continue;
        }
        pairs += 1;
        let oa = random_observable(&mut rng, a);
        let ob = random_observable(&mut rng, b);
        let amps: Vec<C64> = (0..4).map(|_| c(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0)).collect();
        let psi = Ket::normalized(amps).unwrap();
        let lu = exact_distribution(&psi, &oa, &ob, Semantics::Luders, (0, 1)).unwrap();
        let lj = exact_distribution(&psi, &oa, &ob, Semantics::LocalJoint, (0, 1)).unwrap();
        if lu.len() != lj.len() {
            mismatched += 1;
            continue;
        }
        for r in &lj {
            match lu.iter().find(|s| (s.outcome.product_value() - r.outcome.product_value()).abs() < 1e-9) {
                Some(s) => {
                    worst_p = worst_p.max((s.probability - r.probability).abs());
                    worst_f = worst_f.max(1.0 - s.post_state.fidelity(&r.post_state).unwrap());
                }
                None => mismatched += 1,
            }
        }
    }
    verdict(
        mismatched == 0 && worst_p < 1e-10 && worst_f < 1e-10,
        format!("50 pairs: unmatched outcomes {mismatched}, max |dp| {worst_p:.3e}, max 1 - fidelity {worst_f:.3e} (tol 1e-10)"),
    )
}

const DETERMINISM_CASES: &[(&str, &[&str])] = &[
    (
        "distribution_singlet_zz_local_joint.json",
        &["distribution", "--state", "singlet", "--obs", "zz", "--semantics", "local-joint", "--trials", "1000", "--seed", "7", "--format", "json"],
    ),
    ("commutators.txt", &["commutators"]),
    (
        "teleport_luders_400.json",
        &["teleport", "--a", "0.6", "--b", "0.8", "--semantics", "luders", "--trials", "400", "--seed", "7", "--format", "json"],
    ),
    ("degeneracy_zz.txt", &["degeneracy", "--obs", "zz"]),
];

fn determinism() -> Verdict {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_jointeig")).args(args).output().map(|o| o.stdout).unwrap_or_default()
    };
    let mut problems = Vec::new();
    for (golden, args) in DETERMINISM_CASES {
        let first = run(args);
        let second = run(args);
        if first.is_empty() || first != second {
            problems.push(format!("{} not repeatable", args[0]));
        }
        match std::fs::read(dir.join(golden)) {
            Ok(expected) if expected == first => {}
            Ok(_) => problems.push(format!("{golden} differs")),
            Err(_) => problems.push(format!("{golden} missing")),
        }
    }
    let detail = if problems.is_empty() {
        "4 subcommands: two runs byte-identical and equal to committed golden files".to_string()
    } else {
        problems.join("; ")
    };
    verdict(problems.is_empty(), detail)
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Bell-state orthonormality", bell_gram),
        ("matrix eigenrelations of zz and xx on Bell states", eigenrelations),
        ("matrix commutator [zz, xx] is exactly zero", matrix_commutator),
        ("channel-order divergence under local-joint collapse", channel_order),
        ("singlet zz distributions under both rules", singlet_zz),
        ("local-joint xx on |-+> gives four outcomes at 1/4", xx_on_minus_plus),
        ("Bell-branch probabilities 1/4", branch_probabilities),
        ("amplitude-exact branch forms (rewriting, Bell projection, disentangling)", amplitude_exactness),
        ("end-to-end teleportation fidelity under projection", end_to_end_fidelity),
        ("unitary-only path checks", naive_path_checks),
        ("rule agreement without correlation degeneracy", semantics_agreement),
        ("deterministic CLI reports and golden files", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("criterion {:>2} {} {title}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of {} criteria pass; failing: {failed:?}", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
