//! Numerical probes of the convergence behaviour of the ~1/(n+1) coefficient
//! family: partial norms with analytic tail bounds, the term-by-term
//! differentiated series (whose partial sums grow without bound in x and N),
//! and the (2αx)ⁿ/√(2ⁿn!) comparison series.

use crate::basis::{ln_normalization_constant, OscillatorModel};
use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, KahanSum, Real};

/// Coefficient families for the model series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientRule {
    /// C_n = √6/(π(n+1)); Σ C_n² = 1 exactly (Basel sum).
    InverseLinear,
}

/// C_n under `rule`.
pub fn coefficient<T: Real>(rule: CoefficientRule, n: usize) -> T {
    match rule {
        CoefficientRule::InverseLinear => {
            T::of(6.0).sqrt() / (T::PI() * (T::of_usize(n) + T::one()))
        }
    }
}

/// Σ_{n≤N} C_n².
pub fn partial_norm<T: Real>(rule: CoefficientRule, n_max: usize) -> T {
    let mut acc = KahanSum::new();
    for n in 0..=n_max {
        let c = coefficient::<T>(rule, n);
        acc.add(c * c);
    }
    acc.value()
}

/// Integral-test bounds on the norm tail 1 − Σ_{n≤N} C_n² of the
/// inverse-linear family: [6/(π²(N+2)), 6/(π²(N+1))].
pub fn tail_bounds<T: Real>(n_max: usize) -> (T, T) {
    let six_over_pi_sq = T::of(6.0) / (T::PI() * T::PI());
    (
        six_over_pi_sq / (T::of_usize(n_max) + T::of(2.0)),
        six_over_pi_sq / (T::of_usize(n_max) + T::one()),
    )
}

/// ln|H_n(ξ)| with signs for n = 0..=n_max, via the raw Hermite recurrence
/// H_{n+1} = 2ξH_n − 2nH_{n−1} carried with periodic rescaling so that
/// arbitrarily large orders and arguments stay representable.
pub fn hermite_log_scan<T: Real>(n_max: usize, xi: T) -> Vec<(T, i8)> {
    let sign_of = |v: T| -> i8 {
        if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            0
        }
    };
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = T::zero(); // H_{-1} placeholder
    let mut curr = T::one(); // H_0
    let mut ln_scale = T::zero();
    let rescale_at = T::of(1e150);
    out.push((T::zero(), 1));
    for n in 0..n_max {
        let next = T::of(2.0) * xi * curr - T::of(2.0) * T::of_usize(n) * prev;
        prev = curr;
        curr = next;
        let mag = curr.abs().max(prev.abs());
        if mag > rescale_at {
            prev = prev / rescale_at;
            curr = curr / rescale_at;
            ln_scale += rescale_at.ln();
        }
        let v = curr;
        if v == T::zero() {
            out.push((T::neg_infinity(), 0));
        } else {
            out.push((v.abs().ln() + ln_scale, sign_of(v)));
        }
    }
    out
}

/// ln of the magnitude of the n-th differentiated-series term
/// ((n+1/2)/(n+1))·N_n·H_n(αx), plus its sign.
pub fn differentiated_term_log<T: Real>(
    model: &OscillatorModel<T>,
    n: usize,
    x: T,
) -> (T, i8) {
    let xi = model.alpha() * x;
    let scan = hermite_log_scan(n, xi);
    let (ln_h, sign) = scan[n];
    let nn = T::of_usize(n);
    let factor = ((nn + T::of(0.5)) / (nn + T::one())).ln();
    (factor + ln_normalization_constant(model, n) + ln_h, sign)
}

/// ln of the n-th comparison-series term (2αx)ⁿ/√(2ⁿn!) (x ≥ 0).
pub fn comparison_term_log<T: Real>(model: &OscillatorModel<T>, n: usize, x: T) -> T {
    let base = T::of(2.0) * model.alpha() * x;
    let log_pow = if n == 0 {
        T::zero()
    } else {
        T::of_usize(n) * base.ln()
    };
    log_pow - T::of(0.5) * (T::of_usize(n) * T::of(2.0).ln() + ln_factorial::<T>(n))
}

/// Partial sum Σ_{n≤N} ((n+1/2)/(n+1))·N_n·H_n(αx), the term-by-term time
/// derivative series with the common Gaussian factor left out (it does not
/// affect term-by-term comparisons); `include_gaussian` multiplies it back in.
pub fn differentiated_partial_sum<T: Real>(
    model: &OscillatorModel<T>,
    n_max: usize,
    x: T,
    include_gaussian: bool,
) -> Result<T> {
    let xi = model.alpha() * x;
    let scan = hermite_log_scan(n_max, xi);
    let mut acc = KahanSum::new();
    for (n, &(ln_h, sign)) in scan.iter().enumerate() {
        if sign == 0 {
            continue;
        }
        let nn = T::of_usize(n);
        let ln_term = ((nn + T::of(0.5)) / (nn + T::one())).ln()
            + ln_normalization_constant(model, n)
            + ln_h;
        let term = if sign < 0 { -ln_term.exp() } else { ln_term.exp() };
        if !term.is_finite() {
            return Err(Error::Range(format!(
                "differentiated-series term n = {n} overflows at x = {x}"
            )));
        }
        acc.add(term);
    }
    let mut value = acc.value();
    if include_gaussian {
        value = value * (-xi * xi / T::of(2.0)).exp();
    }
    Ok(value)
}

/// Partial sum Σ_{n≤N} (2αx)ⁿ/√(2ⁿn!) of the comparison series (x ≥ 0).
pub fn comparison_series<T: Real>(model: &OscillatorModel<T>, n_max: usize, x: T) -> T {
    let mut acc = KahanSum::new();
    for n in 0..=n_max {
        acc.add(comparison_term_log(model, n, x).exp());
    }
    acc.value()
}

/// Grid spacing used for supremum scans; suprema over the grid are lower
/// bounds on the true suprema.
pub const SUP_SCAN_SPACING: f64 = 1e-2;

/// For each truncation N in `n_list`, the supremum of
/// |differentiated_partial_sum| over the uniform grid on [0, x_max].
pub fn sup_growth_profile<T: Real>(
    model: &OscillatorModel<T>,
    n_list: &[usize],
    x_max: T,
) -> Result<Vec<(usize, T)>> {
    if n_list.is_empty() || !(x_max > T::zero()) {
        return Err(Error::InvalidParameter(
            "supremum scan needs truncations and a positive window".into(),
        ));
    }
    let spacing = T::of(SUP_SCAN_SPACING);
    let points = (x_max / spacing).round().to_usize().unwrap_or(0) + 1;
    let mut sups = vec![T::zero(); n_list.len()];
    let n_top = *n_list.iter().max().unwrap();
    for i in 0..points {
        let x = spacing * T::of_usize(i);
        let xi = model.alpha() * x;
        let scan = hermite_log_scan(n_top, xi);
        let mut acc = KahanSum::new();
        let mut cursor = 0usize;
        let mut targets: Vec<usize> = n_list.to_vec();
        targets.sort_unstable();
        for (n, &(ln_h, sign)) in scan.iter().enumerate() {
            if sign != 0 {
                let nn = T::of_usize(n);
                let ln_term = ((nn + T::of(0.5)) / (nn + T::one())).ln()
                    + ln_normalization_constant(model, n)
                    + ln_h;
                let term = if sign < 0 { -ln_term.exp() } else { ln_term.exp() };
                if !term.is_finite() {
                    return Err(Error::Range(format!(
                        "supremum scan overflowed at n = {n}, x = {x}"
                    )));
                }
                acc.add(term);
            }
            while cursor < targets.len() && targets[cursor] == n {
                let magnitude = acc.value().abs();
                // map back to the caller's ordering
                for (slot, &want) in n_list.iter().enumerate() {
                    if want == n && magnitude > sups[slot] {
                        sups[slot] = magnitude;
                    }
                }
                cursor += 1;
            }
        }
    }
    Ok(n_list.iter().copied().zip(sups).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::hermite_eval;

    fn model() -> OscillatorModel<f64> {
        OscillatorModel::paper_units()
    }

    #[test]
    fn coefficient_printed_values() {
        let c0 = coefficient::<f64>(CoefficientRule::InverseLinear, 0);
        let c1 = coefficient::<f64>(CoefficientRule::InverseLinear, 1);
        assert!((c0 - 0.7796968).abs() < 1e-7);
        assert!((c1 - 0.3898484).abs() < 1e-7);
        assert!((c0 / c1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn partial_norm_and_tail_bounds() {
        // Σ C_n² = (6/π²)·Σ 1/(n+1)² → 1; the truncated tail obeys the
        // integral-test sandwich.
        for n_max in [1usize, 10, 100, 1000, 10_000] {
            let tail = 1.0 - partial_norm::<f64>(CoefficientRule::InverseLinear, n_max);
            let (lo, hi) = tail_bounds::<f64>(n_max);
            assert!(
                lo <= tail && tail <= hi,
                "N = {n_max}: tail {tail:e} outside [{lo:e}, {hi:e}]"
            );
        }
        let tail4 = 1.0 - partial_norm::<f64>(CoefficientRule::InverseLinear, 10_000);
        assert!((tail4 - 6.1e-5).abs() < 2e-6, "tail at 10⁴ is {tail4:e}");
    }

    #[test]
    fn hermite_log_scan_matches_direct_evaluation() {
        for &xi in &[0.3f64, 1.0, 2.7] {
            let scan = hermite_log_scan(20, xi);
            for n in 0..=20 {
                let direct = hermite_eval(n, xi).unwrap();
                let (ln_mag, sign) = scan[n];
                if direct == 0.0 {
                    assert_eq!(sign, 0);
                } else {
                    assert_eq!(sign as f64, direct.signum(), "n = {n}, xi = {xi}");
                    assert!(
                        (ln_mag - direct.abs().ln()).abs() < 1e-10,
                        "n = {n}, xi = {xi}"
                    );
                }
            }
        }
        // far beyond raw-recurrence overflow
        let scan = hermite_log_scan(600, 2.0f64);
        assert!(scan[600].0.is_finite());
    }

    #[test]
    fn differentiated_sum_hand_values() {
        let m = model();
        // single term: 0.5·N_0·H_0 = 0.5·π^(−1/4)
        let s0 = differentiated_partial_sum(&m, 0, 0.0, false).unwrap();
        assert!((s0 - 0.3755628).abs() < 1e-7);
        // H_1(0) = 0, so N = 1 adds nothing
        let s1 = differentiated_partial_sum(&m, 1, 0.0, false).unwrap();
        assert!((s1 - s0).abs() < 1e-15);
        // the Gaussian factor is 1 at x = 0
        let g = differentiated_partial_sum(&m, 4, 0.0, true).unwrap();
        let ng = differentiated_partial_sum(&m, 4, 0.0, false).unwrap();
        assert!((g - ng).abs() < 1e-15);
    }

    #[test]
    fn differentiated_sum_grows_with_truncation() {
        let m = model();
        let profile = sup_growth_profile(&m, &[4, 16, 64], 6.0).unwrap();
        assert!(profile[0].1 < profile[1].1);
        assert!(profile[1].1 < profile[2].1);
    }

    #[test]
    fn sup_profile_window_behaviour() {
        let m = model();
        let narrow = sup_growth_profile(&m, &[8, 64], 8.0).unwrap();
        // more terms dominate on the same window
        assert!(narrow[1].1 > narrow[0].1);
        // doubling the window at N = 64 grows the sup by well over 10×
        let wide = sup_growth_profile(&m, &[64], 16.0).unwrap();
        assert!(wide[0].1 > 10.0 * narrow[1].1, "sup went {} → {}", narrow[1].1, wide[0].1);
        // supremum over a larger window can never decrease
        assert!(wide[0].1 >= narrow[1].1);
    }

    #[test]
    fn comparison_series_values() {
        let m = model();
        for n in [0usize, 3, 50] {
            assert!((comparison_series(&m, n, 0.0) - 1.0).abs() < 1e-15);
        }
        // convergence at x = 1: the tail beyond n ≫ (2αx)² is negligible
        let a = comparison_series(&m, 60, 1.0);
        let b = comparison_series(&m, 120, 1.0);
        assert!((a - b).abs() < 1e-12);
        // terms decay super-geometrically once n ≫ (2αx)²
        let t40 = comparison_term_log(&m, 40, 1.0);
        let t41 = comparison_term_log(&m, 41, 1.0);
        assert!(t41 < t40 - 1.0);
        // growth faster than e^{2αx}: at x = 5 the sum tops e^10
        let big = comparison_series(&m, 100, 5.0);
        assert!(big > (10.0f64).exp(), "sum {big:e}");
    }

    #[test]
    fn term_ratio_bounded_at_large_argument() {
        // The differentiated term and the comparison term track each other
        // where 2αx ≫ n; checked in log space at x = 300 for n ≤ 200.
        let m = model();
        let bound = 100.0f64.ln();
        for n in (0..=200).step_by(10) {
            let (ln_d, sign) = differentiated_term_log(&m, n, 300.0);
            assert_eq!(sign, 1, "term sign flipped at n = {n}");
            let ln_c = comparison_term_log(&m, n, 300.0);
            let ln_ratio: f64 = ln_d - ln_c;
            assert!(
                ln_ratio.abs() < bound,
                "n = {n}: log-ratio {ln_ratio}"
            );
        }
    }

    #[test]
    fn sup_profile_rejects_bad_input() {
        let m = model();
        assert!(sup_growth_profile(&m, &[], 4.0).is_err());
        assert!(sup_growth_profile(&m, &[4], 0.0).is_err());
    }
}
