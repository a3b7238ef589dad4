//! Reference models used across tests, examples and the CLI.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::periodic::PeriodicHamiltonian;
use crate::numerics::{c64, Complex64, ComplexMatrix};

/// Circularly driven two-level system
/// `H(t) = [[delta/2, v e^{2 pi i t}], [v e^{-2 pi i t}, -delta/2]]`.
pub fn rabi(delta: f64, v: f64) -> PeriodicHamiltonian {
    let h0 = ComplexMatrix::from_real_diagonal(&[delta / 2.0, -delta / 2.0]);
    let h1 = ComplexMatrix::from_real_rows(&[vec![0.0, v], vec![0.0, 0.0]]).expect("2x2");
    PeriodicHamiltonian::from_harmonics(h0, [(1, h1)], format!("rabi delta={delta} v={v}"))
        .expect("rabi model is admissible")
}

/// Closed-form propagator of [`rabi`]:
/// `U(t,0) = e^{i pi t sz} e^{-i t H_rot}` with `H_rot = [[delta/2 + pi, v], [v, -delta/2 - pi]]`.
pub fn rabi_propagator(delta: f64, v: f64, t: f64) -> ComplexMatrix {
    let a = delta / 2.0 + PI;
    let omega = (a * a + v * v).sqrt();
    let (s, c) = (omega * t).sin_cos();
    let k = if omega > 0.0 { s / omega } else { t };
    // e^{-itH_rot} = cos(omega t) I - i sin(omega t) H_rot / omega
    let rot = ComplexMatrix::from_rows(&[
        vec![c64(c, -k * a), c64(0.0, -k * v)],
        vec![c64(0.0, -k * v), c64(c, k * a)],
    ])
    .expect("2x2");
    let frame =
        ComplexMatrix::from_diagonal(&[Complex64::from_polar(1.0, PI * t), Complex64::from_polar(1.0, -PI * t)]);
    frame.matmul(&rot)
}

/// Quasi-energies of [`rabi`] folded into `[0, 2 pi)`, ascending.
pub fn rabi_quasi_energies(delta: f64, v: f64) -> [f64; 2] {
    let a = delta / 2.0 + PI;
    let omega = (a * a + v * v).sqrt();
    let mut q = [(omega + PI).rem_euclid(2.0 * PI), (-omega + PI).rem_euclid(2.0 * PI)];
    q.sort_by(f64::total_cmp);
    q
}

/// Random admissible model: Hermitian `H0` with entries in `[-1, 1]` and
/// harmonics `1..=support` with entries in `[-strength, strength]`.
pub fn random_model(dim: usize, support: u32, strength: f64, seed: u64) -> PeriodicHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_matrix = |scale: f64| {
        ComplexMatrix::from_fn(dim, dim, |_, _| {
            c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
        })
    };
    let h0 = random_matrix(1.0).hermitian_part();
    let harmonics: Vec<_> = (1..=support).map(|n| (n, random_matrix(strength))).collect();
    PeriodicHamiltonian::from_harmonics(h0, harmonics, format!("random d={dim} M={support} seed={seed}"))
        .expect("random model is admissible")
}

/// Three-level model with first and second harmonics.
pub fn two_harmonic_d3() -> PeriodicHamiltonian {
    random_model(3, 2, 0.3, 3).with_label("two-harmonic d=3")
}

/// Four-level model with first and second harmonics and a static interaction.
pub fn two_harmonic_d4() -> PeriodicHamiltonian {
    let base = random_model(4, 2, 0.25, 4);
    let v0 = ComplexMatrix::from_real_diagonal(&[0.2, -0.1, 0.0, 0.15]);
    let mut modes: Vec<(i64, ComplexMatrix)> = base.modes().map(|(n, m)| (n, m.clone())).collect();
    modes.push((0, v0));
    PeriodicHamiltonian::new(base.h0().clone(), modes, "two-harmonic d=4").expect("admissible")
}

/// Constant diagonal model.
pub fn constant_diagonal(levels: &[f64]) -> PeriodicHamiltonian {
    PeriodicHamiltonian::constant(ComplexMatrix::from_real_diagonal(levels), "constant").expect("diagonal")
}

/// The small-dimensional fleet with mode support at most 2.
pub fn standard_fleet() -> Vec<PeriodicHamiltonian> {
    vec![
        rabi(0.0, 1.0),
        rabi(0.7, 0.4),
        two_harmonic_d3(),
        two_harmonic_d4(),
        constant_diagonal(&[0.3, -1.1, 2.0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabi_closed_form_solves_schroedinger() {
        // Centered difference of the closed form against -i H(t) U(t).
        for &(delta, v) in &[(0.0, 1.0), (0.7, 0.4)] {
            let h = rabi(delta, v);
            let dt = 1e-5;
            for t in [0.1, 0.45, 0.8] {
                let du = (&rabi_propagator(delta, v, t + dt) - &rabi_propagator(delta, v, t - dt)).scale_real(0.5 / dt);
                let rhs = h
                    .evaluate(t)
                    .matmul(&rabi_propagator(delta, v, t))
                    .scale(c64(0.0, -1.0));
                assert!(du.max_abs_diff(&rhs) < 1e-8, "t={t}");
            }
            assert!(rabi_propagator(delta, v, 0.0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn fleet_mode_support() {
        for h in standard_fleet() {
            assert!(h.mode_support() <= 2);
            for k in 0..20 {
                assert!(h.evaluate(0.05 * k as f64).hermitian_defect() == 0.0);
            }
        }
    }
}
