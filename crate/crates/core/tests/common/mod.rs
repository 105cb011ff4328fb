#![allow(dead_code)]

use std::f64::consts::PI;

use jointeig::{Ket, Matrix, Observable, TrialRng, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ket_from_parts(parts: &[f64]) -> Option<Ket> {
    let amps: Vec<C64> = parts.chunks(2).map(|p| c(p[0], p[1])).collect();
    let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if n2 < 1e-3 {
        return None;
    }
    Ket::normalized(amps).ok()
}

/// Random normalized ket on `n` qubits.
pub fn ket_strategy(n: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec(-1.0..1.0f64, 2 << n).prop_filter_map("nonzero", |v| ket_from_parts(&v))
}

pub fn hermitian_from_parts(dim: usize, parts: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(dim);
    let mut k = 0;
    for i in 0..dim {
        m.set(i, i, c(parts[k], 0.0));
        k += 1;
        for j in i + 1..dim {
            let z = c(parts[k], parts[k + 1]);
            k += 2;
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

pub fn hermitian_strategy(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, dim * dim).prop_map(move |v| hermitian_from_parts(dim, &v))
}

/// `U diag(l1, l2) U†` with `U` built from two angles and a phase.
pub fn qubit_observable(name: &str, l1: f64, l2: f64, theta: f64, phi: f64) -> Observable {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let u1 = [c(co, 0.0), e * s];
    let u2 = [c(-s, 0.0), e * co];
    let mut m = Matrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            m.set(i, j, u1[i] * u1[j].conj() * l1 + u2[i] * u2[j].conj() * l2);
        }
    }
    Observable::new(name, m).expect("Hermitian by construction")
}

/// Local eigenvalues of a random observable pair whose four products are pairwise distinct.
pub fn distinct_products(a: [f64; 2], b: [f64; 2]) -> bool {
    let p = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    (a[0] - a[1]).abs() > 0.05
        && (b[0] - b[1]).abs() > 0.05
        && (0..4).all(|i| (i + 1..4).all(|j| (p[i] - p[j]).abs() > 1e-3))
}

/// Draws a locally non-degenerate pair with distinct products from a seeded stream.
pub fn random_nondegenerate_pair(rng: &mut TrialRng) -> (Observable, Observable) {
    loop {
        let mut u = || 4.0 * rng.uniform() - 2.0;
        let a = [u(), u()];
        let b = [u(), u()];
        if !distinct_products(a, b) {
            continue;
        }
        let ta = PI * rng.uniform();
        let pa = 2.0 * PI * rng.uniform();
        let tb = PI * rng.uniform();
        let pb = 2.0 * PI * rng.uniform();
        return (qubit_observable("A", a[0], a[1], ta, pa), qubit_observable("B", b[0], b[1], tb, pb));
    }
}

pub fn random_ket(rng: &mut TrialRng, n: usize) -> Ket {
    loop {
        let parts: Vec<f64> = (0..(2 << n)).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        if let Some(k) = ket_from_parts(&parts) {
            return k;
        }
    }
}
