//! Classic fourth-order Runge–Kutta, both as a generic vector stepper (used
//! by the Gaussian reference ODE and the convergence tests) and specialized
//! to the coefficient state with its basis-growth bookkeeping.

use crate::coupled::{rhs, BasisPolicy, CoefficientState};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedule::RampSchedule;

use crate::basis::OscillatorModel;

/// New even slots opened per step under the growing policy: each RK4 stage
/// can reach one Δn = +2 neighbor further, and there are four stages.
pub const FRONTIER_SLOTS_PER_STEP: usize = 4;

/// One RK4 step for a generic first-order system y' = f(t, y):
/// y⁺ = y + (z₁ + 2z₂ + 2z₃ + z₄)/6 with the usual half-step stages.
pub fn rk4_step<T: Real, F>(t: T, y: &[T], h: T, mut f: F) -> Vec<T>
where
    F: FnMut(T, &[T]) -> Vec<T>,
{
    let half = h / T::of(2.0);
    let stage = |y: &[T], d: &[T], s: T| -> Vec<T> {
        y.iter().zip(d).map(|(&a, &b)| a + s * b).collect()
    };
    let z1 = f(t, y);
    let z2 = f(t + half, &stage(y, &z1, half));
    let z3 = f(t + half, &stage(y, &z2, half));
    let z4 = f(t + h, &stage(y, &z3, h));
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    (0..y.len())
        .map(|i| y[i] + sixth * (z1[i] + two * z2[i] + two * z3[i] + z4[i]))
        .collect()
}

/// One RK4 step of the coupled coefficient equations. Under the growing
/// policy the frontier is extended first, so the stages write into slots that
/// were zero at the start of the step.
pub fn rk4_step_coefficients<T: Real>(
    state: &CoefficientState<T>,
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
    h: T,
) -> Result<CoefficientState<T>> {
    let mut base = state.clone();
    if base.policy() == BasisPolicy::Growing {
        for _ in 0..FRONTIER_SLOTS_PER_STEP {
            base.grow_frontier()?;
        }
    }
    let t = base.time;
    let half = h / T::of(2.0);
    let z1 = rhs(&base, schedule, model, t)?;
    let s2 = base.add_scaled(&z1, half, half);
    let z2 = rhs(&s2, schedule, model, t + half)?;
    let s3 = base.add_scaled(&z2, half, half);
    let z3 = rhs(&s3, schedule, model, t + half)?;
    let s4 = base.add_scaled(&z3, h, h);
    let z4 = rhs(&s4, schedule, model, t + h)?;
    let next = base.apply_rk4_combination(&z1, &z2, &z3, &z4, h);
    if !next.all_finite() {
        return Err(Error::NonFinite {
            t: next.time.as_f64(),
        });
    }
    Ok(next)
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationSettings<T> {
    /// Step size h.
    pub step: T,
    /// Number of steps to take.
    pub steps: usize,
    /// Stop early once the norm exceeds this ceiling; `None` disables the
    /// check and lets divergence run to non-finite values.
    pub norm_ceiling: Option<T>,
}

impl<T: Real> IntegrationSettings<T> {
    /// h = 0.001 over [0, 3.2] with a generous ceiling: the run that exhibits
    /// the breakdown without overflowing.
    pub fn paper_run() -> Self {
        IntegrationSettings {
            step: T::of(1e-3),
            steps: 3200,
            norm_ceiling: Some(T::of(1e6)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive and finite, got {}",
                self.step
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("step count must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopReason<T> {
    Completed,
    /// The norm crossed the ceiling at time `t`; the returned state is the
    /// last one computed.
    NormCeiling { t: T, norm: T },
}

#[derive(Clone, Debug)]
pub struct IntegrationOutcome<T> {
    pub state: CoefficientState<T>,
    pub stop: StopReason<T>,
    pub steps_taken: usize,
}

/// Integrates `steps` RK4 steps from `state`, invoking `observer` after every
/// step (and once on the initial state with step index 0).
pub fn integrate<T: Real, F>(
    state: CoefficientState<T>,
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
    settings: &IntegrationSettings<T>,
    mut observer: F,
) -> Result<IntegrationOutcome<T>>
where
    F: FnMut(usize, &CoefficientState<T>),
{
    settings.validate()?;
    let mut current = state;
    observer(0, &current);
    for step in 1..=settings.steps {
        current = rk4_step_coefficients(&current, schedule, model, settings.step)?;
        observer(step, &current);
        if let Some(ceiling) = settings.norm_ceiling {
            let norm = diagnostics::norm(&current);
            if norm > ceiling {
                return Ok(IntegrationOutcome {
                    stop: StopReason::NormCeiling {
                        t: current.time,
                        norm,
                    },
                    state: current,
                    steps_taken: step,
                });
            }
        }
    }
    let steps_taken = settings.steps;
    Ok(IntegrationOutcome {
        state: current,
        stop: StopReason::Completed,
        steps_taken,
    })
}
