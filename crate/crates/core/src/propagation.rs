//! Propagators `U(t, s)` of `i dpsi/dt = H(t) psi` and the monodromy `U(s + 1, s)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PeriodicHamiltonian;
use crate::numerics::{expm_hermitian, principal_arg, unitary_eig, Complex64, ComplexMatrix, EigenDecomposition};

/// Integrator order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    /// Exponential midpoint rule.
    Second,
    /// Two-point Gauss-Magnus with commutator correction.
    Fourth,
}

impl Order {
    pub fn value(self) -> u32 {
        match self {
            Order::Second => 2,
            Order::Fourth => 4,
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Order::Second),
            4 => Ok(Order::Fourth),
            _ => Err(format!("integrator order must be 2 or 4, got {v}")),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        o.value() as u8
    }
}

/// Time-stepping rule: `steps_per_period` uniform steps per unit time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSchedule {
    pub steps_per_period: usize,
    pub order: Order,
    pub start: f64,
}

impl PropagatorSchedule {
    pub fn new(steps_per_period: usize, order: Order) -> Result<Self> {
        if steps_per_period < 8 {
            return Err(Error::validation(
                "steps_per_period",
                format!("must be at least 8, got {steps_per_period}"),
            ));
        }
        Ok(Self {
            steps_per_period,
            order,
            start: 0.0,
        })
    }

    pub fn with_start(mut self, start: f64) -> Self {
        self.start = start;
        self
    }

    /// Number of uniform steps used on `[s, t]`.
    pub fn steps_for(&self, s: f64, t: f64) -> usize {
        let exact = (t - s) * self.steps_per_period as f64;
        // Slack keeps interval lengths like 0.3 * 10 from rounding up a step.
        ((exact - 1e-9).ceil() as usize).max(1)
    }
}

impl Default for PropagatorSchedule {
    /// 512 fourth-order steps per period, starting at 0.
    fn default() -> Self {
        Self {
            steps_per_period: 512,
            order: Order::Fourth,
            start: 0.0,
        }
    }
}

/// One integrator step `U(t0 + dt, t0)`.
pub fn step(h: &PeriodicHamiltonian, t0: f64, dt: f64, order: Order) -> Result<ComplexMatrix> {
    match order {
        Order::Second => expm_hermitian(&h.evaluate(t0 + 0.5 * dt), dt),
        Order::Fourth => {
            let c = 3f64.sqrt() / 6.0;
            let h1 = h.evaluate(t0 + (0.5 - c) * dt);
            let h2 = h.evaluate(t0 + (0.5 + c) * dt);
            let mut eff = (&h1 + &h2).scale_real(0.5);
            let comm = h2.commutator(&h1);
            eff.axpy(Complex64::new(0.0, -3f64.sqrt() / 12.0 * dt), &comm);
            expm_hermitian(&eff.hermitian_part(), dt)
        }
    }
}

/// `U(t, s)`. Returns the identity exactly for `t == s` and `U(s, t)^dag` for `t < s`.
/// Interaction-free Hamiltonians are propagated exactly.
pub fn propagate(h: &PeriodicHamiltonian, s: f64, t: f64, sched: &PropagatorSchedule) -> Result<ComplexMatrix> {
    if t == s {
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    if t < s {
        return Ok(propagate(h, t, s, sched)?.adjoint());
    }
    if h.is_free() {
        return expm_hermitian(h.h0(), t - s);
    }
    let n = sched.steps_for(s, t);
    let dt = (t - s) / n as f64;
    let mut u = step(h, s, dt, sched.order)?;
    for k in 1..n {
        u = step(h, s + k as f64 * dt, dt, sched.order)?.matmul(&u);
    }
    Ok(u)
}

/// `U(t_k, s)` for ascending times `t_k >= s`, chaining consecutive intervals.
pub fn propagate_path(
    h: &PeriodicHamiltonian,
    s: f64,
    times: &[f64],
    sched: &PropagatorSchedule,
) -> Result<Vec<ComplexMatrix>> {
    let mut out = Vec::with_capacity(times.len());
    let mut prev_t = s;
    let mut u = ComplexMatrix::identity(h.dim());
    for &t in times {
        if t < prev_t {
            return Err(Error::validation(
                "times",
                "sample times must be ascending and not before the start",
            ));
        }
        u = propagate(h, prev_t, t, sched)?.matmul(&u);
        prev_t = t;
        out.push(u.clone());
    }
    Ok(out)
}

/// Period operator `Theta = U(s + 1, s)` with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pub theta: ComplexMatrix,
    pub start: f64,
    pub eig: EigenDecomposition,
    pub schedule: PropagatorSchedule,
}

impl Monodromy {
    /// Principal arguments of the eigenvalues, ascending in `[0, 2 pi)`.
    pub fn eigenphases(&self) -> Vec<f64> {
        self.eig.values.iter().map(|&z| principal_arg(z)).collect()
    }

    /// Quasi-energies `lambda` in `[0, 2 pi)` with `Theta phi = e^{-i lambda} phi`,
    /// in the same order as the eigenvectors.
    pub fn quasi_energies(&self) -> Vec<f64> {
        self.eig.values.iter().map(|&z| fold(-principal_arg(z))).collect()
    }

    pub fn dim(&self) -> usize {
        self.theta.rows()
    }
}

/// Representative of `x` modulo `2 pi` in `[0, 2 pi)`.
pub fn fold(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = x.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

pub fn monodromy(h: &PeriodicHamiltonian, s: f64, sched: &PropagatorSchedule) -> Result<Monodromy> {
    let theta = propagate(h, s, s + 1.0, sched)?;
    let eig = unitary_eig(&theta)?;
    Ok(Monodromy {
        theta,
        start: s,
        eig,
        schedule: PropagatorSchedule { start: s, ..*sched },
    })
}

/// `max |U(t, r) U(r, s) - U(t, s)|`.
pub fn check_cocycle(h: &PeriodicHamiltonian, s: f64, r: f64, t: f64, sched: &PropagatorSchedule) -> Result<f64> {
    if !(s <= r && r <= t) {
        return Err(Error::validation("r", "cocycle check needs s <= r <= t"));
    }
    let lhs = propagate(h, r, t, sched)?.matmul(&propagate(h, s, r, sched)?);
    Ok(lhs.max_abs_diff(&propagate(h, s, t, sched)?))
}

/// `max |U(t + 1, 0) - U(t, 0) Theta|` with `Theta = U(1, 0)`.
pub fn check_period_shift(h: &PeriodicHamiltonian, t: f64, sched: &PropagatorSchedule) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::validation("t", "period shift check needs t >= 0"));
    }
    let theta = propagate(h, 0.0, 1.0, sched)?;
    let lhs = propagate(h, 0.0, t + 1.0, sched)?;
    let rhs = propagate(h, 0.0, t, sched)?.matmul(&theta);
    Ok(lhs.max_abs_diff(&rhs))
}

/// Monodromy differences over a doubling ladder of step counts.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergenceStudy {
    pub order: u32,
    pub steps: Vec<usize>,
    /// `max |Theta(N_k) - Theta(N_{k+1})|`.
    pub differences: Vec<f64>,
    /// `differences[k] / differences[k + 1]`.
    pub ratios: Vec<f64>,
}

impl ConvergenceStudy {
    /// Error estimate for the finest monodromy of the ladder.
    pub fn estimated_error(&self) -> f64 {
        let p = 2f64.powi(self.order as i32);
        self.differences.last().copied().unwrap_or(0.0) / (p - 1.0)
    }

    /// Whether every ratio is within `rel` of `2^order`, ignoring pairs whose
    /// differences are already below `floor`.
    pub fn order_verified(&self, rel: f64, floor: f64) -> bool {
        let p = 2f64.powi(self.order as i32);
        self.ratios
            .iter()
            .zip(self.differences.windows(2))
            .filter(|(_, d)| d[1] > floor)
            .all(|(r, _)| (r / p - 1.0).abs() <= rel)
    }
}

pub fn convergence_study(h: &PeriodicHamiltonian, ladder: &[usize], order: Order) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(Error::validation("ladder", "need at least three step counts"));
    }
    let thetas = ladder
        .iter()
        .map(|&n| propagate(h, 0.0, 1.0, &PropagatorSchedule::new(n, order)?))
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = thetas.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
    let ratios = differences.windows(2).map(|d| d[0] / d[1]).collect();
    Ok(ConvergenceStudy {
        order: order.value(),
        steps: ladder.to_vec(),
        differences,
        ratios,
    })
}
