//! Observables over coefficient states — norm, average energy, breakdown
//! detection on recorded time series, and the post-ramp stationarity probe.

use num_complex::Complex;

use crate::basis::{eigenfunction_table, GridSpec, OscillatorModel};
use crate::coupled::CoefficientState;
use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Real};
use crate::schedule::{RampSchedule, RampVariant};

/// One sampled row of the diagnostics time series; mirrors the CSV schema
/// `t,norm,energy,basis_size,max_index,frontier_mag`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord<T> {
    pub time: T,
    pub norm: T,
    pub energy: T,
    pub basis_size: usize,
    pub max_index: usize,
    pub frontier_mag: T,
}

/// Σ |C_n|² over the active set, compensated.
pub fn norm<T: Real>(state: &CoefficientState<T>) -> T {
    let mut acc = KahanSum::new();
    for (r, i) in state.real_parts().iter().zip(state.imag_parts()) {
        acc.add(*r * *r + *i * *i);
    }
    acc.value()
}

/// ⟨E⟩ = Σ E_n |C_n|² with E_n = (n + 1/2)ħω of the initial Hamiltonian.
pub fn average_energy<T: Real>(state: &CoefficientState<T>, model: &OscillatorModel<T>) -> T {
    let mut acc = KahanSum::new();
    for slot in 0..state.active_len() {
        let c = state.amplitude(slot);
        let p = c.re * c.re + c.im * c.im;
        acc.add(model.eigenenergy(state.mode_index(slot)) * p);
    }
    acc.value()
}

pub fn record<T: Real>(state: &CoefficientState<T>, model: &OscillatorModel<T>) -> DiagnosticsRecord<T> {
    DiagnosticsRecord {
        time: state.time,
        norm: norm(state),
        energy: average_energy(state, model),
        basis_size: state.active_len(),
        max_index: state.max_populated_index(),
        frontier_mag: state.frontier_magnitude(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BreakdownReport<T> {
    /// First sampled time with |norm − 1| > threshold, if any.
    pub breakdown_time: Option<T>,
    pub threshold: T,
    /// 2π/ω of the unperturbed oscillator (6.28 in the reference units).
    pub oscillation_period: T,
    pub within_one_period: bool,
}

/// Scans the series for the first norm departure beyond `threshold`.
pub fn detect_breakdown<T: Real>(
    series: &[DiagnosticsRecord<T>],
    threshold: T,
    model: &OscillatorModel<T>,
) -> Result<BreakdownReport<T>> {
    if series.is_empty() {
        return Err(Error::InvalidParameter(
            "breakdown detection needs a non-empty series".into(),
        ));
    }
    let period = T::of(2.0) * T::PI() / model.omega();
    let crossing = series
        .iter()
        .find(|r| (r.norm - T::one()).abs() > threshold)
        .map(|r| r.time);
    Ok(BreakdownReport {
        breakdown_time: crossing,
        threshold,
        oscillation_period: period,
        within_one_period: crossing.map_or(false, |t| t < period),
    })
}

/// Populations |D_m|² of `state` in the eigenbasis of the post-ramp
/// Hamiltonian, computed through quadrature overlap matrices. Only the mode
/// indices stored in the state are used as targets; for even-parity states
/// the omitted odd-index projections vanish identically.
pub fn post_ramp_populations<T: Real>(
    state: &CoefficientState<T>,
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
) -> Result<Vec<(usize, T)>> {
    let post = schedule.post_ramp_model(model)?;
    let overlaps = overlap_matrix(&post, model, state)?;
    let amps = state.to_complex_amplitudes(model);
    let mut out = Vec::with_capacity(amps.len());
    for (row, (m, _)) in amps.iter().enumerate() {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (col, (_, c)) in amps.iter().enumerate() {
            re.add(overlaps[row][col] * c.re);
            im.add(overlaps[row][col] * c.im);
        }
        let d = Complex::new(re.value(), im.value());
        out.push((*m, d.norm_sqr()));
    }
    Ok(out)
}

/// ⟨φ_m^(post)|ψ_n⟩ for every pair of mode indices present in the state.
fn overlap_matrix<T: Real>(
    post: &OscillatorModel<T>,
    model: &OscillatorModel<T>,
    state: &CoefficientState<T>,
) -> Result<Vec<Vec<T>>> {
    let modes: Vec<usize> = (0..state.active_len()).map(|s| state.mode_index(s)).collect();
    let n_max = *modes.last().unwrap_or(&0);
    // The wider of the two eigenbases sets the quadrature domain.
    let alpha = model.alpha().min(post.alpha());
    let grid = GridSpec::for_modes(n_max, alpha);
    let dx = grid.spacing();
    let table_post = eigenfunction_table(post, n_max, &grid)?;
    let table_init = eigenfunction_table(model, n_max, &grid)?;
    let mut out = vec![vec![T::zero(); modes.len()]; modes.len()];
    for (row, &m) in modes.iter().enumerate() {
        for (col, &n) in modes.iter().enumerate() {
            let mut acc = KahanSum::new();
            for i in 0..grid.points {
                acc.add(table_post[m][i] * table_init[n][i]);
            }
            out[row][col] = acc.value() * dx;
        }
    }
    Ok(out)
}

/// Maximum drift, over the sampled states, of any single post-ramp-eigenbasis
/// population: max_m (max_t |D_m|² − min_t |D_m|²). The exact dynamics is
/// stationary after the ramp, so this measures how well a solver honors that.
pub fn stationarity_probe<T: Real>(
    states: &[CoefficientState<T>],
    schedule: &RampSchedule<T>,
    model: &OscillatorModel<T>,
) -> Result<T> {
    if schedule.variant() != RampVariant::RampUp {
        return Err(Error::Policy(
            "stationarity probe applies to the ramp-up schedule".into(),
        ));
    }
    if states.is_empty() {
        return Err(Error::InvalidParameter(
            "stationarity probe needs at least one sampled state".into(),
        ));
    }
    for s in states {
        if s.time < schedule.ramp_end() {
            return Err(Error::InvalidParameter(format!(
                "stationarity probe sampled before the ramp end (t = {})",
                s.time
            )));
        }
    }
    let mut lo: Vec<T> = Vec::new();
    let mut hi: Vec<T> = Vec::new();
    for state in states {
        let pops = post_ramp_populations(state, schedule, model)?;
        if lo.is_empty() {
            lo = pops.iter().map(|&(_, p)| p).collect();
            hi = lo.clone();
        } else {
            for (slot, &(_, p)) in pops.iter().enumerate() {
                lo[slot] = lo[slot].min(p);
                hi[slot] = hi[slot].max(p);
            }
        }
    }
    Ok(lo
        .iter()
        .zip(&hi)
        .map(|(&a, &b)| b - a)
        .fold(T::zero(), T::max))
}
