//! Time profile of the Hamiltonian: the ramp S(t), the variation
//! V(t) = H(t) − H₀ = k·(S(t) − 1)·x²/2, and its matrix elements row by row.

use crate::basis::{x2_half_matrix_element, OscillatorModel};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RampVariant {
    /// S(t) = 1 for t ≤ 0, 1 + ηt on (0, T), 1 + ηT for t ≥ T.
    RampUp,
    /// V(t) = −x²ηt/2 for all t > 0, no plateau as printed. A bounded
    /// variant with a plateau at t = T is available behind an explicit flag.
    RampDown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampSchedule<T> {
    eta: T,
    ramp_end: T,
    variant: RampVariant,
    ramp_down_plateau: bool,
}

impl<T: Real> RampSchedule<T> {
    pub fn new(eta: T, ramp_end: T, variant: RampVariant) -> Result<Self> {
        if !(ramp_end > T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ramp requires T > 0 and finite η (η = {eta}, T = {ramp_end})"
            )));
        }
        Ok(RampSchedule {
            eta,
            ramp_end,
            variant,
            ramp_down_plateau: false,
        })
    }

    /// The paper's parameter set: η = 1, T = 1, ramp up.
    pub fn paper_ramp_up() -> Self {
        RampSchedule {
            eta: T::one(),
            ramp_end: T::one(),
            variant: RampVariant::RampUp,
            ramp_down_plateau: false,
        }
    }

    /// Opt into a bounded ramp-down that plateaus at t = T. Default is
    /// faithful to the printed unbounded form.
    pub fn with_ramp_down_plateau(mut self, plateau: bool) -> Self {
        self.ramp_down_plateau = plateau;
        self
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn ramp_end(&self) -> T {
        self.ramp_end
    }

    pub fn variant(&self) -> RampVariant {
        self.variant
    }

    /// Scalar time factor s(t) with V(t) = k·s(t)·x²/2. At t = T exactly the
    /// plateau branch applies (the printed inequality is t ≥ T).
    pub fn scalar_factor(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        match self.variant {
            RampVariant::RampUp => {
                if t >= self.ramp_end {
                    self.eta * self.ramp_end
                } else {
                    self.eta * t
                }
            }
            RampVariant::RampDown => {
                if self.ramp_down_plateau && t >= self.ramp_end {
                    -self.eta * self.ramp_end
                } else {
                    -self.eta * t
                }
            }
        }
    }

    /// The full ramp S(t) = 1 + s(t), multiplying the x²k/2 potential term.
    pub fn big_s(&self, t: T) -> T {
        T::one() + self.scalar_factor(t)
    }

    /// Eigenbasis of the final Hamiltonian: spring constant k·(1 + ηT).
    /// Rejects the ramp-down variant, whose printed V(t) has no final value.
    pub fn post_ramp_model(&self, model: &OscillatorModel<T>) -> Result<OscillatorModel<T>> {
        match self.variant {
            RampVariant::RampUp => model.with_spring_scaled(T::one() + self.eta * self.ramp_end),
            RampVariant::RampDown => Err(Error::Policy(
                "ramp-down variation grows without bound and has no final Hamiltonian".into(),
            )),
        }
    }
}

/// The three possibly nonzero elements of row n of V(t), with the transition
/// frequencies ω_{n,n±2} = ∓2ω that generate the oscillating phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingRow<T> {
    pub index: usize,
    pub diagonal: T,
    pub super_diagonal: T,
    pub sub_diagonal: T,
    /// ω_{n,n+2} = −2ω
    pub freq_up: T,
    /// ω_{n,n−2} = +2ω
    pub freq_down: T,
}

/// Row n of V_{nl}(t) = k·s(t)·⟨n|x²/2|l⟩. The sub-diagonal entry vanishes
/// for n < 2; everything with |n − l| ∉ {0, 2} is identically zero.
pub fn coupling_row<T: Real>(
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
    n: usize,
    t: T,
) -> CouplingRow<T> {
    let s = schedule.scalar_factor(t) * model.spring_constant();
    let two_omega = T::of(2.0) * model.omega();
    CouplingRow {
        index: n,
        diagonal: s * x2_half_matrix_element(model, n, n),
        super_diagonal: s * x2_half_matrix_element(model, n, n + 2),
        sub_diagonal: if n >= 2 {
            s * x2_half_matrix_element(model, n, n - 2)
        } else {
            T::zero()
        },
        freq_up: -two_omega,
        freq_down: two_omega,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> (RampSchedule<f64>, OscillatorModel<f64>) {
        (RampSchedule::paper_ramp_up(), OscillatorModel::paper_units())
    }

    #[test]
    fn scalar_factor_printed_values() {
        let (ramp, _) = paper();
        assert_eq!(ramp.scalar_factor(0.5), 0.5);
        assert_eq!(ramp.scalar_factor(3.0), 1.0);
        assert_eq!(ramp.scalar_factor(-2.0), 0.0);
        let down = RampSchedule::new(1.0, 1.0, RampVariant::RampDown).unwrap();
        assert_eq!(down.scalar_factor(2.0), -2.0);
        assert_eq!(down.scalar_factor(-2.0), 0.0);
    }

    #[test]
    fn scalar_factor_continuity_and_plateau_tie() {
        let ramp = RampSchedule::new(0.7, 1.3, RampVariant::RampUp).unwrap();
        let eps = 1e-9f64;
        assert!((ramp.scalar_factor(eps) - 0.0).abs() < 1e-8);
        assert!((ramp.scalar_factor(1.3 - eps) - ramp.scalar_factor(1.3)).abs() < 1e-8);
        // t = T takes the plateau branch
        assert_eq!(ramp.scalar_factor(1.3), 0.7 * 1.3);
        assert_eq!(ramp.big_s(1.3), 1.0 + 0.7 * 1.3);
    }

    #[test]
    fn ramp_down_plateau_flag() {
        let down = RampSchedule::new(1.0, 1.0, RampVariant::RampDown)
            .unwrap()
            .with_ramp_down_plateau(true);
        assert_eq!(down.scalar_factor(0.5), -0.5);
        assert_eq!(down.scalar_factor(2.0), -1.0);
    }

    #[test]
    fn coupling_row_values() {
        let (ramp, model) = paper();
        let row = coupling_row(&ramp, &model, 0, 1.0);
        assert_eq!(row.diagonal, 0.25);
        assert!((row.super_diagonal - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(row.sub_diagonal, 0.0);

        let at0 = coupling_row(&ramp, &model, 5, 0.0);
        assert_eq!(at0.diagonal, 0.0);
        assert_eq!(at0.super_diagonal, 0.0);
        assert_eq!(at0.sub_diagonal, 0.0);

        // n = 2, t = 0.5: Eqs for j = 1 scaled by 0.5
        let row2 = coupling_row(&ramp, &model, 2, 0.5);
        assert!((row2.diagonal - 0.625).abs() < 1e-15);
        assert!((row2.super_diagonal - 0.5 * (1.5f64 * 2.0).sqrt() * 0.5).abs() < 1e-15);
        assert!((row2.sub_diagonal - 0.17677669529663687).abs() < 1e-15);
    }

    #[test]
    fn coupling_matrix_is_symmetric() {
        let (ramp, model) = paper();
        for &t in &[0.2, 0.9, 1.0, 2.4] {
            for n in 0..20 {
                let here = coupling_row(&ramp, &model, n, t);
                let above = coupling_row(&ramp, &model, n + 2, t);
                assert_eq!(here.super_diagonal, above.sub_diagonal);
            }
        }
    }

    #[test]
    fn transition_frequencies() {
        let (ramp, model) = paper();
        let row = coupling_row(&ramp, &model, 4, 0.3);
        assert_eq!(row.freq_up, -2.0);
        assert_eq!(row.freq_down, 2.0);
    }

    #[test]
    fn post_ramp_model_values() {
        let model = OscillatorModel::<f64>::paper_units();
        let r = RampSchedule::new(1.0, 1.0, RampVariant::RampUp).unwrap();
        let post = r.post_ramp_model(&model).unwrap();
        assert_eq!(post.spring_constant(), 2.0);
        assert!((post.omega() - 2f64.sqrt()).abs() < 1e-15);

        let r2 = RampSchedule::new(0.5, 2.0, RampVariant::RampUp).unwrap();
        assert_eq!(r2.post_ramp_model(&model).unwrap().spring_constant(), 2.0);

        let m3 = OscillatorModel::new(1.0, 3.0, 1.0).unwrap();
        assert_eq!(r.post_ramp_model(&m3).unwrap().spring_constant(), 6.0);

        let down = RampSchedule::new(1.0, 1.0, RampVariant::RampDown).unwrap();
        assert!(down.post_ramp_model(&model).is_err());
    }

    #[test]
    fn schedule_validates_parameters() {
        assert!(RampSchedule::new(f64::NAN, 1.0, RampVariant::RampUp).is_err());
        assert!(RampSchedule::new(1.0f64, 0.0, RampVariant::RampUp).is_err());
        // η = 0 is the valid "no ramp" schedule
        let none = RampSchedule::new(0.0f64, 1.0, RampVariant::RampUp).unwrap();
        assert_eq!(none.scalar_factor(0.7), 0.0);
        assert_eq!(none.big_s(2.0), 1.0);
    }
}
