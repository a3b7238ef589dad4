use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::block::{block_q_on, free_block};
use crate::error::{Error, Result};
use crate::floquet::{circular_distance, QuasiEnergySpectrum};
use crate::model::PeriodicHamiltonian;
use crate::numerics::{hermitian_eig, vec_norm, Complex64, ComplexMatrix, EigenDecomposition};

/// Imaginary offsets used to approach the real axis.
pub const EPS_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Candidates closer than this to `spec(H0) + 2 pi Z` are rejected.
pub const THRESHOLD_DISTANCE: f64 = 1e-3;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundStateOptions {
    /// Half-width of the refinement bracket around the candidate.
    pub search_half_width: f64,
    /// Relative residual `||(K - lambda) psi|| / ||psi||` required for a verdict.
    pub residual_tol: f64,
    /// Bracket width at which golden-section refinement stops.
    pub refine_tol: f64,
}

impl Default for BoundStateOptions {
    fn default() -> Self {
        Self {
            search_half_width: 1e-3,
            residual_tol: 1e-6,
            refine_tol: 1e-12,
        }
    }
}

/// Outcome of the null-vector search for `I + Q(lambda + i0)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundStateVerdict {
    pub candidate: f64,
    /// Minimizer of the smallest singular value near the candidate.
    pub refined: f64,
    pub threshold_distance: f64,
    /// `(eps, sigma_min(I + Q(refined + i eps)))`.
    pub ladder: Vec<(f64, f64)>,
    /// Quadratic extrapolation of the ladder to `eps = 0`.
    pub sigma_ladder_extrapolated: f64,
    /// Smallest singular value of the extrapolated `I + Q(refined + i0)`.
    pub sigma_min: f64,
    /// `||(K - refined) psi|| / ||psi||` for the reconstructed eigenvector.
    pub residual: f64,
    pub verified: bool,
    /// Nearest localized Floquet eigenvalue, once cross-checked.
    pub floquet_match: Option<f64>,
}

impl BoundStateVerdict {
    /// Records the nearest value of `localized` (unfolded Floquet eigenvalues).
    pub fn cross_check(&mut self, localized: &[f64]) -> f64 {
        let best = localized
            .iter()
            .copied()
            .min_by(|a, b| (a - self.refined).abs().total_cmp(&(b - self.refined).abs()));
        self.floquet_match = best;
        best.map_or(f64::INFINITY, |b| (b - self.refined).abs())
    }
}

/// Lagrange weights that evaluate the quadratic through `EPS_LADDER` at 0.
fn richardson_weights() -> [f64; 3] {
    let e = EPS_LADDER;
    let mut w = [0.0; 3];
    for k in 0..3 {
        w[k] = (0..3).filter(|&m| m != k).map(|m| e[m] / (e[m] - e[k])).product();
    }
    w
}

/// Distance from `lambda` to `spec(H0) + 2 pi Z`.
pub fn threshold_distance(h0_levels: &[f64], lambda: f64) -> f64 {
    h0_levels
        .iter()
        .map(|&e| circular_distance(lambda, e))
        .fold(f64::INFINITY, f64::min)
}

struct Scanner<'a> {
    h: &'a PeriodicHamiltonian,
    eig: EigenDecomposition,
    n_modes: usize,
    support: Vec<usize>,
    weights: [f64; 3],
}

impl Scanner<'_> {
    fn i_plus_q(&self, zeta: Complex64) -> ComplexMatrix {
        let mut m = block_q_on(self.h, &self.eig, zeta, self.n_modes, &self.support);
        for k in 0..m.rows() {
            m[(k, k)] += Complex64::new(1.0, 0.0);
        }
        m
    }

    fn extrapolated(&self, lambda: f64) -> ComplexMatrix {
        let mut acc = self
            .i_plus_q(Complex64::new(lambda, EPS_LADDER[0]))
            .scale_real(self.weights[0]);
        for (k, &eps) in EPS_LADDER.iter().enumerate().skip(1) {
            acc.axpy(
                Complex64::new(self.weights[k], 0.0),
                &self.i_plus_q(Complex64::new(lambda, eps)),
            );
        }
        acc
    }

    /// Smallest singular value and its right singular vector.
    fn smallest_singular(m: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
        let gram = m.adjoint_matmul(m).hermitian_part();
        let eig = hermitian_eig(&gram)?;
        Ok((eig.values[0].re.max(0.0).sqrt(), eig.vector(0)))
    }

    fn sigma(&self, lambda: f64) -> Result<f64> {
        Ok(Self::smallest_singular(&self.extrapolated(lambda))?.0)
    }

    /// `||(K - lambda) psi|| / ||psi||` with the truncated Floquet operator applied blockwise.
    fn floquet_residual(&self, lambda: f64, psi: &[Vec<Complex64>]) -> f64 {
        let nm = self.n_modes as i64;
        let support = self.h.mode_support() as i64;
        let modes: Vec<(i64, ComplexMatrix)> = (-support..=support).map(|j| (j, self.h.full_mode(j))).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for n in -nm..=nm {
            let mut r = vec![Complex64::new(0.0, 0.0); self.h.dim()];
            for (j, mj) in &modes {
                let k = n - j;
                if k.abs() <= nm {
                    for (ri, x) in r.iter_mut().zip(mj.mul_vec(&psi[(k + nm) as usize])) {
                        *ri += x;
                    }
                }
            }
            let own = &psi[(n + nm) as usize];
            for (ri, x) in r.iter_mut().zip(own) {
                *ri += (TAU * n as f64 - lambda) * x;
            }
            num += vec_norm(&r).powi(2);
            den += vec_norm(own).powi(2);
        }
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }
}

/// Looks for a null vector of `I + Q(lambda + i0)` near a real `candidate`,
/// reconstructs `psi_n = (H0 + 2 pi n - lambda)^{-1} phi_n` and checks that it
/// is an eigenvector of the truncated Floquet matrix.
pub fn bound_state_correspondence(
    h: &PeriodicHamiltonian,
    candidate: f64,
    n_modes: usize,
) -> Result<BoundStateVerdict> {
    bound_state_correspondence_with(h, candidate, n_modes, &BoundStateOptions::default())
}

pub fn bound_state_correspondence_with(
    h: &PeriodicHamiltonian,
    candidate: f64,
    n_modes: usize,
    opts: &BoundStateOptions,
) -> Result<BoundStateVerdict> {
    let support_m = h.mode_support();
    if n_modes < support_m {
        return Err(Error::TruncationTooSmall {
            cutoff: n_modes,
            support: support_m,
        });
    }
    let eig = hermitian_eig(h.h0())?;
    let dist = threshold_distance(&eig.real_values(), candidate);
    if dist < THRESHOLD_DISTANCE {
        return Err(Error::NearThreshold {
            candidate,
            distance: dist,
        });
    }
    let support = h.interaction_support();
    if support.is_empty() {
        // No interaction: Q = 0 and I + Q is the identity everywhere.
        return Ok(BoundStateVerdict {
            candidate,
            refined: candidate,
            threshold_distance: dist,
            ladder: EPS_LADDER.iter().map(|&e| (e, 1.0)).collect(),
            sigma_ladder_extrapolated: 1.0,
            sigma_min: 1.0,
            residual: f64::INFINITY,
            verified: false,
            floquet_match: None,
        });
    }
    let scanner = Scanner {
        h,
        eig,
        n_modes,
        support,
        weights: richardson_weights(),
    };

    // Golden-section search for the minimum of sigma_min on the bracket.
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (candidate - opts.search_half_width, candidate + opts.search_half_width);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = scanner.sigma(x1)?;
    let mut f2 = scanner.sigma(x2)?;
    while hi - lo > opts.refine_tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = scanner.sigma(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = scanner.sigma(x2)?;
        }
    }
    let refined = 0.5 * (lo + hi);
    let (sigma_min, phi) = Scanner::smallest_singular(&scanner.extrapolated(refined))?;

    let ladder: Vec<(f64, f64)> = EPS_LADDER
        .iter()
        .map(|&eps| {
            Ok((
                eps,
                Scanner::smallest_singular(&scanner.i_plus_q(Complex64::new(refined, eps)))?.0,
            ))
        })
        .collect::<Result<_>>()?;
    let sigma_ladder_extrapolated = ladder
        .iter()
        .zip(scanner.weights)
        .map(|((_, s), w)| s * w)
        .sum::<f64>()
        .abs();

    let s = scanner.support.len();
    let nm = n_modes as i64;
    let all: Vec<usize> = (0..h.dim()).collect();
    let psi: Vec<Vec<Complex64>> = (-nm..=nm)
        .map(|n| {
            let b = (n + nm) as usize;
            let block = free_block(&scanner.eig, n, Complex64::new(refined, 0.0), &all, &scanner.support);
            block.mul_vec(&phi[b * s..(b + 1) * s])
        })
        .collect();
    let residual = scanner.floquet_residual(refined, &psi);
    let verified = residual <= opts.residual_tol;
    Ok(BoundStateVerdict {
        candidate,
        refined,
        threshold_distance: dist,
        ladder,
        sigma_ladder_extrapolated,
        sigma_min,
        residual,
        verified,
        floquet_match: None,
    })
}

/// Share of each Floquet eigenvector's mass on fiber indices `region`, summed over modes.
pub fn localization_scores(spec: &QuasiEnergySpectrum, region: &[usize]) -> Vec<f64> {
    let d = spec.fiber_dim;
    let nb = 2 * spec.n_modes + 1;
    (0..spec.values.len())
        .map(|k| {
            let inside: f64 = (0..nb)
                .flat_map(|b| region.iter().map(move |&i| b * d + i))
                .map(|r| spec.vectors[(r, k)].norm_sqr())
                .sum();
            inside
        })
        .collect()
}

/// Non-edge Floquet eigenvalues whose eigenvectors carry at least `min_score`
/// of their mass on `region`.
pub fn localized_floquet_values(spec: &QuasiEnergySpectrum, region: &[usize], min_score: f64) -> Vec<(f64, f64)> {
    let scores = localization_scores(spec, region);
    spec.interior()
        .into_iter()
        .filter(|&k| scores[k] >= min_score)
        .map(|k| (spec.values[k], scores[k]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{build_floquet, quasi_spectrum};
    use crate::model::{build_lattice, central_window};

    #[test]
    fn richardson_weights_reproduce_quadratics() {
        let w = richardson_weights();
        let q = |e: f64| 0.3 + 2.0 * e - 5.0 * e * e;
        let ext: f64 = EPS_LADDER.iter().zip(w).map(|(&e, w)| w * q(e)).sum();
        assert!((ext - 0.3).abs() < 1e-12);
    }

    #[test]
    fn free_model_has_no_null_vectors() {
        let lat = build_lattice(16, 1.0, 0.0, 0.0, 7..9).unwrap();
        let v = bound_state_correspondence(lat.drive(), 3.0, 4).unwrap();
        assert!(!v.verified);
        assert_eq!(v.sigma_min, 1.0);
    }

    #[test]
    fn threshold_candidates_rejected() {
        let lat = build_lattice(16, 1.0, -2.0, 0.0, 7..9).unwrap();
        let err = bound_state_correspondence(lat.drive(), 2.0 + TAU, 4).unwrap_err();
        assert!(matches!(err, Error::NearThreshold { .. }));
    }

    #[test]
    fn static_well_bound_state_found() {
        let lat = build_lattice(24, 1.0, -2.0, 0.0, central_window(24, 3)).unwrap();
        let h = lat.drive();
        let levels = crate::numerics::hermitian_eigenvalues(&h.evaluate(0.0)).unwrap();
        let ground = levels[0];
        assert!(ground < -2.0);
        let v = bound_state_correspondence(h, ground + 1e-4, 2).unwrap();
        assert!(v.verified, "{v:?}");
        assert!((v.refined - ground).abs() < 1e-7, "{v:?}");
        let spec = quasi_spectrum(&build_floquet(h, 2).unwrap()).unwrap();
        let region: Vec<usize> = lat.widened_support(4).collect();
        let localized: Vec<f64> = localized_floquet_values(&spec, &region, 0.9)
            .iter()
            .map(|p| p.0)
            .collect();
        let mut v = v;
        assert!(v.cross_check(&localized) < 1e-7);
    }
}
