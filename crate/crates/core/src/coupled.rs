//! The coupled coefficient ODEs over a finite active basis: the real/imaginary
//! split equations, the growing-basis policy, and a fixed-truncation
//! alternative whose coupling matrix is Hermitian by construction.

use num_complex::Complex;

use crate::basis::OscillatorModel;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedule::RampSchedule;

/// How the active basis evolves during integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisPolicy {
    /// The paper's scheme: the active set is extended ahead of every step by
    /// the RK4 stage reach, giving (8n + 2) nonzero variables after n steps.
    Growing,
    /// Dynamics restricted to the first N stored modes; the truncated
    /// generator is Hermitian and the exact flow conserves the norm.
    Fixed(usize),
}

/// Which mode indices the slots address. The even set (n = 0, 2, 4, …) is
/// the natural one for the ground-state initial condition; the full set keeps
/// odd indices around so parity conservation can be observed rather than
/// assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSet {
    Even,
    Full,
}

impl IndexSet {
    #[inline]
    fn mode(&self, slot: usize) -> usize {
        match self {
            IndexSet::Even => 2 * slot,
            IndexSet::Full => slot,
        }
    }

    /// Slot distance corresponding to Δn = 2.
    #[inline]
    fn stride(&self) -> usize {
        match self {
            IndexSet::Even => 1,
            IndexSet::Full => 2,
        }
    }
}

/// Complex expansion coefficients C_n at one instant, split into real and
/// imaginary parts as in the integrated equations. Anything outside the
/// active set — including every negative index — is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientState<T> {
    pub time: T,
    policy: BasisPolicy,
    index_set: IndexSet,
    re: Vec<T>,
    im: Vec<T>,
}

/// Derivative arrays matching the slot layout of the state they came from.
#[derive(Clone, Debug)]
pub struct RhsEvaluation<T> {
    pub time: T,
    pub d_re: Vec<T>,
    pub d_im: Vec<T>,
}

impl<T: Real> CoefficientState<T> {
    /// C_0(0) = 1, C_n(0) = 0: the ground state at t = 0, on the even set.
    pub fn initial(policy: BasisPolicy) -> Self {
        Self::initial_with_index_set(policy, IndexSet::Even)
    }

    pub fn initial_with_index_set(policy: BasisPolicy, index_set: IndexSet) -> Self {
        let slots = match policy {
            BasisPolicy::Growing => 1,
            BasisPolicy::Fixed(n) => n.max(1),
        };
        let mut re = vec![T::zero(); slots];
        re[0] = T::one();
        CoefficientState {
            time: T::zero(),
            policy,
            index_set,
            re,
            im: vec![T::zero(); slots],
        }
    }

    pub fn policy(&self) -> BasisPolicy {
        self.policy
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    /// Number of active slots (stored modes).
    pub fn active_len(&self) -> usize {
        self.re.len()
    }

    /// Count of stored real plus imaginary variables.
    pub fn variable_count(&self) -> usize {
        2 * self.re.len()
    }

    pub fn mode_index(&self, slot: usize) -> usize {
        self.index_set.mode(slot)
    }

    pub fn real_parts(&self) -> &[T] {
        &self.re
    }

    pub fn imag_parts(&self) -> &[T] {
        &self.im
    }

    pub fn amplitude(&self, slot: usize) -> Complex<T> {
        Complex::new(self.re[slot], self.im[slot])
    }

    pub fn set_amplitude(&mut self, slot: usize, c: Complex<T>) {
        self.re[slot] = c.re;
        self.im[slot] = c.im;
    }

    /// Largest mode index whose amplitude is nonzero.
    pub fn max_populated_index(&self) -> usize {
        for slot in (0..self.re.len()).rev() {
            if self.re[slot] != T::zero() || self.im[slot] != T::zero() {
                return self.mode_index(slot);
            }
        }
        0
    }

    /// |C| of the last active slot.
    pub fn frontier_magnitude(&self) -> T {
        match self.re.last() {
            Some(&r) => (r * r + *self.im.last().unwrap() * *self.im.last().unwrap()).sqrt(),
            None => T::zero(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.re.iter().chain(self.im.iter()).all(|v| v.is_finite())
    }

    /// Extends the active set by one zero-initialized Δn = +2 slot so the
    /// coupling can populate it on the next step.
    pub fn grow_frontier(&mut self) -> Result<()> {
        if self.policy != BasisPolicy::Growing {
            return Err(Error::Policy(
                "grow_frontier requires the growing basis policy".into(),
            ));
        }
        self.re.push(T::zero());
        self.im.push(T::zero());
        Ok(())
    }

    /// Schrödinger-picture amplitudes C_n(t)·e^(−iE_n t/ħ) for the active set.
    pub fn to_complex_amplitudes(&self, model: &OscillatorModel<T>) -> Vec<(usize, Complex<T>)> {
        (0..self.re.len())
            .map(|slot| {
                let n = self.mode_index(slot);
                let phase = -model.eigenenergy(n) * self.time / model.hbar();
                let rot = Complex::new(phase.cos(), phase.sin());
                (n, self.amplitude(slot) * rot)
            })
            .collect()
    }

    /// state + factor·derivative, with time advanced by `dt`; the RK4 stage
    /// combinator.
    pub(crate) fn add_scaled(&self, rhs: &RhsEvaluation<T>, factor: T, dt: T) -> Self {
        debug_assert_eq!(self.re.len(), rhs.d_re.len());
        let re = self
            .re
            .iter()
            .zip(&rhs.d_re)
            .map(|(&y, &d)| y + factor * d)
            .collect();
        let im = self
            .im
            .iter()
            .zip(&rhs.d_im)
            .map(|(&y, &d)| y + factor * d)
            .collect();
        CoefficientState {
            time: self.time + dt,
            policy: self.policy,
            index_set: self.index_set,
            re,
            im,
        }
    }

    pub(crate) fn apply_rk4_combination(
        &self,
        z1: &RhsEvaluation<T>,
        z2: &RhsEvaluation<T>,
        z3: &RhsEvaluation<T>,
        z4: &RhsEvaluation<T>,
        h: T,
    ) -> Self {
        let sixth = h / T::of(6.0);
        let two = T::of(2.0);
        let re = (0..self.re.len())
            .map(|i| {
                self.re[i] + sixth * (z1.d_re[i] + two * z2.d_re[i] + two * z3.d_re[i] + z4.d_re[i])
            })
            .collect();
        let im = (0..self.im.len())
            .map(|i| {
                self.im[i] + sixth * (z1.d_im[i] + two * z2.d_im[i] + two * z3.d_im[i] + z4.d_im[i])
            })
            .collect();
        CoefficientState {
            time: self.time + h,
            policy: self.policy,
            index_set: self.index_set,
            re,
            im,
        }
    }
}

/// Right-hand side of the coupled equations at time `t`:
///
///   dC_n^r/dt = ([C_{n−2}^i cosθ + C_{n−2}^r sinθ] V_{n−2,n}
///                + C_n^i V_{n,n} + [C_{n+2}^i cosθ − C_{n+2}^r sinθ] V_{n,n+2}) / ħ
///   dC_n^i/dt = −([C_{n−2}^r cosθ − C_{n−2}^i sinθ] V_{n−2,n}
///                + C_n^r V_{n,n} + [C_{n+2}^r cosθ + C_{n+2}^i sinθ] V_{n,n+2}) / ħ
///
/// with θ = 2ωt (the printed 2t at ω = 1) and out-of-range neighbors zero.
pub fn rhs<T: Real>(
    state: &CoefficientState<T>,
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
    t: T,
) -> Result<RhsEvaluation<T>> {
    if !state.all_finite() {
        return Err(Error::NonFinite {
            t: state.time.as_f64(),
        });
    }
    let slots = state.re.len();
    let stride = state.index_set.stride();
    let hbar = model.hbar();
    // V_{nl} = k·s(t)·⟨n|x²/2|l⟩; the ladder elements in closed form.
    let s = schedule.scalar_factor(t) * model.spring_constant();
    let scale = model.hbar() / (model.mass() * model.omega());
    let theta = T::of(2.0) * model.omega() * t;
    let (cos_t, sin_t) = (theta.cos(), theta.sin());

    let diag = |n: usize| s * (T::of_usize(n) + T::of(0.5)) / T::of(2.0) * scale;
    // V_{n,n+2}
    let up = |n: usize| {
        let nn = T::of_usize(n);
        s * ((nn + T::one()) * (nn + T::of(2.0))).sqrt() / T::of(4.0) * scale
    };

    let mut d_re = vec![T::zero(); slots];
    let mut d_im = vec![T::zero(); slots];
    for slot in 0..slots {
        let n = state.index_set.mode(slot);
        let v_nn = diag(n);
        let mut re_acc = state.im[slot] * v_nn;
        let mut im_acc = state.re[slot] * v_nn;
        if slot >= stride {
            let v_dn = up(n - 2); // V_{n−2,n}
            let (cr, ci) = (state.re[slot - stride], state.im[slot - stride]);
            re_acc += (ci * cos_t + cr * sin_t) * v_dn;
            im_acc += (cr * cos_t - ci * sin_t) * v_dn;
        }
        if slot + stride < slots {
            let v_up = up(n); // V_{n,n+2}
            let (cr, ci) = (state.re[slot + stride], state.im[slot + stride]);
            re_acc += (ci * cos_t - cr * sin_t) * v_up;
            im_acc += (cr * cos_t + ci * sin_t) * v_up;
        }
        d_re[slot] = re_acc / hbar;
        d_im[slot] = -im_acc / hbar;
    }
    Ok(RhsEvaluation {
        time: t,
        d_re,
        d_im,
    })
}
