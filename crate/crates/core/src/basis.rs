//! Harmonic-oscillator eigenbasis: Hermite polynomials, normalized
//! eigenfunctions, eigenenergies, and the x²/2 matrix elements that couple
//! the expansion coefficients.

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, KahanSum, Real};

/// Physical constants of one harmonic oscillator, in the paper's dimensionless
/// units. The angular frequency ω = √(k/m) and the width parameter
/// α = (mk/ħ²)^(1/4) are always derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorModel<T> {
    mass: T,
    spring_constant: T,
    hbar: T,
}

impl<T: Real> OscillatorModel<T> {
    pub fn new(mass: T, spring_constant: T, hbar: T) -> Result<Self> {
        if !(mass > T::zero() && spring_constant > T::zero() && hbar > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "oscillator constants must be positive (m = {mass}, k = {spring_constant}, hbar = {hbar})"
            )));
        }
        Ok(OscillatorModel {
            mass,
            spring_constant,
            hbar,
        })
    }

    /// The paper's unit system: m = k = ħ = 1, hence ω = α = 1.
    pub fn paper_units() -> Self {
        OscillatorModel {
            mass: T::one(),
            spring_constant: T::one(),
            hbar: T::one(),
        }
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn spring_constant(&self) -> T {
        self.spring_constant
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn omega(&self) -> T {
        (self.spring_constant / self.mass).sqrt()
    }

    pub fn alpha(&self) -> T {
        (self.mass * self.spring_constant / (self.hbar * self.hbar)).powf(T::of(0.25))
    }

    /// E_n = (n + 1/2) ħω.
    pub fn eigenenergy(&self, n: usize) -> T {
        (T::of_usize(n) + T::of(0.5)) * self.hbar * self.omega()
    }

    /// Oscillator with the same mass and ħ but spring constant scaled by `factor`.
    pub fn with_spring_scaled(&self, factor: T) -> Result<Self> {
        OscillatorModel::new(self.mass, self.spring_constant * factor, self.hbar)
    }
}

/// One step of the Hermite three-term recurrence, kept with its neighbors so
/// the recurrence identity can be checked on the stored triple.
#[derive(Clone, Copy, Debug)]
pub struct HermiteEvaluation<T> {
    pub order: usize,
    pub argument: T,
    pub lower: T,
    pub value: T,
    pub upper: T,
}

impl<T: Real> HermiteEvaluation<T> {
    /// Residual of H_{n+1} = 2ξH_n − 2nH_{n−1} on the stored triple.
    pub fn recurrence_residual(&self) -> T {
        let two = T::of(2.0);
        self.upper - (two * self.argument * self.value - two * T::of_usize(self.order) * self.lower)
    }
}

/// H_n(ξ) by the forward recurrence H_{n+1} = 2ξH_n − 2nH_{n−1},
/// H_0 = 1, H_1 = 2ξ. Overflow surfaces as a range error, never as a
/// silent non-finite value.
pub fn hermite_eval<T: Real>(n: usize, xi: T) -> Result<T> {
    Ok(hermite_triple(n, xi)?.value)
}

/// Evaluates H_n together with its recurrence neighbors H_{n−1} and H_{n+1}.
pub fn hermite_triple<T: Real>(n: usize, xi: T) -> Result<HermiteEvaluation<T>> {
    let two = T::of(2.0);
    let mut lower = T::zero(); // H_{-1}, vanishes by convention
    let mut value = T::one(); // H_0
    for m in 0..n {
        let next = two * xi * value - two * T::of_usize(m) * lower;
        lower = value;
        value = next;
        if !value.is_finite() {
            return Err(Error::Range(format!(
                "Hermite recurrence overflowed at order {} (argument {xi})",
                m + 1
            )));
        }
    }
    let upper = two * xi * value - two * T::of_usize(n) * lower;
    if !upper.is_finite() {
        return Err(Error::Range(format!(
            "Hermite recurrence overflowed at order {} (argument {xi})",
            n + 1
        )));
    }
    Ok(HermiteEvaluation {
        order: n,
        argument: xi,
        lower,
        value,
        upper,
    })
}

/// ln N_n for N_n = [α/(√π 2ⁿ n!)]^(1/2); the log-space form stays finite
/// for any n, while N_n itself underflows double precision near n ≈ 280.
pub fn ln_normalization_constant<T: Real>(model: &OscillatorModel<T>, n: usize) -> T {
    let alpha = model.alpha();
    T::of(0.5)
        * (alpha.ln() - T::of(0.5) * T::PI().ln() - T::of_usize(n) * T::of(2.0).ln()
            - ln_factorial::<T>(n))
}

/// N_n = [α/(√π 2ⁿ n!)]^(1/2). Underflows to zero for large n; callers in
/// that regime combine `ln_normalization_constant` with the log of H_n.
pub fn normalization_constant<T: Real>(model: &OscillatorModel<T>, n: usize) -> T {
    ln_normalization_constant(model, n).exp()
}

/// ψ_n(x) = N_n H_n(αx) e^(−α²x²/2) for n = 0..=n_max, by the recurrence on
/// the normalized functions themselves. Raw H_n overflows near n ≈ 180; the
/// normalized recurrence is bounded and reaches n in the hundreds at any x.
pub fn eigenfunction_row<T: Real>(
    model: &OscillatorModel<T>,
    n_max: usize,
    x: T,
) -> Result<Vec<T>> {
    let alpha = model.alpha();
    let xi = alpha * x;
    let mut row = Vec::with_capacity(n_max + 1);
    let u0 = alpha.sqrt() * T::PI().powf(T::of(-0.25)) * (-xi * xi / T::of(2.0)).exp();
    row.push(u0);
    if n_max >= 1 {
        row.push(T::of(2.0).sqrt() * xi * u0);
    }
    for n in 1..n_max {
        let nn = T::of_usize(n);
        let next = xi * (T::of(2.0) / (nn + T::one())).sqrt() * row[n]
            - (nn / (nn + T::one())).sqrt() * row[n - 1];
        if !next.is_finite() {
            return Err(Error::Range(format!(
                "eigenfunction recurrence became non-finite at n = {} (x = {x})",
                n + 1
            )));
        }
        row.push(next);
    }
    Ok(row)
}

/// ψ_n(x); see `eigenfunction_row` for the evaluation scheme.
pub fn eigenfunction_eval<T: Real>(model: &OscillatorModel<T>, n: usize, x: T) -> Result<T> {
    Ok(*eigenfunction_row(model, n, x)?.last().expect("row non-empty"))
}

/// ⟨row| x²/2 |col⟩ from the ladder algebra:
/// diagonal (n + 1/2)/2 · ħ/(mω), off-diagonal √((n+1)(n+2))/4 · ħ/(mω) for
/// |row − col| = 2, zero otherwise. Reduces to (j + 0.25) and
/// 0.5·[(j+0.5)(j+1)]^(1/2) at even indices n = 2j in the paper's units.
pub fn x2_half_matrix_element<T: Real>(model: &OscillatorModel<T>, row: usize, col: usize) -> T {
    let scale = model.hbar / (model.mass * model.omega());
    if row == col {
        (T::of_usize(row) + T::of(0.5)) / T::of(2.0) * scale
    } else if row.abs_diff(col) == 2 {
        let n = row.min(col);
        let nn = T::of_usize(n);
        ((nn + T::one()) * (nn + T::of(2.0))).sqrt() / T::of(4.0) * scale
    } else {
        T::zero()
    }
}

/// Uniform spatial grid: samples x_i = −L + iΔx, Δx = 2L/points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub half_width: T,
    pub points: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(half_width: T, points: usize) -> Result<Self> {
        if !(half_width > T::zero()) || points < 16 {
            return Err(Error::InvalidParameter(format!(
                "grid requires positive half-width and at least 16 points (L = {half_width}, points = {points})"
            )));
        }
        Ok(GridSpec { half_width, points })
    }

    /// Default quadrature grid for eigenfunctions up to `n_max`: the Hermite
    /// function support scales like √(2n+1)/α, so L = max(12, 3√(2n_max+1)/α)
    /// with enough points to resolve the fastest oscillation.
    pub fn for_modes(n_max: usize, alpha: T) -> Self {
        let span = (T::of(2.0) * T::of_usize(n_max) + T::one()).sqrt();
        let half_width = T::of(12.0).max(T::of(3.0) * span / alpha);
        let resolve = (T::of(3.0) * half_width * span * alpha).to_usize().unwrap_or(4096);
        GridSpec {
            half_width,
            points: resolve.max(4096),
        }
    }

    pub fn spacing(&self) -> T {
        T::of(2.0) * self.half_width / T::of_usize(self.points)
    }

    pub fn coordinate(&self, i: usize) -> T {
        -self.half_width + self.spacing() * T::of_usize(i)
    }
}

/// ∫ ψ_{n_a}^{(a)}(x) ψ_{n_b}^{(b)}(x) dx by composite quadrature. Errors out
/// when the integrand has not decayed at the grid boundary.
pub fn overlap_quadrature<T: Real>(
    model_a: &OscillatorModel<T>,
    n_a: usize,
    model_b: &OscillatorModel<T>,
    n_b: usize,
    grid: &GridSpec<T>,
) -> Result<T> {
    let dx = grid.spacing();
    let mut acc = KahanSum::new();
    let mut peak = T::zero();
    let mut boundary = T::zero();
    for i in 0..grid.points {
        let x = grid.coordinate(i);
        let a = eigenfunction_eval(model_a, n_a, x)?;
        let b = eigenfunction_eval(model_b, n_b, x)?;
        let f = a * b;
        let mag = f.abs();
        if mag > peak {
            peak = mag;
        }
        if i == 0 || i == grid.points - 1 {
            boundary = boundary.max(mag);
        }
        acc.add(f);
    }
    if boundary > T::of(1e-12) * peak {
        return Err(Error::GridTooSmall(format!(
            "integrand at boundary is {boundary:e} against peak {peak:e}"
        )));
    }
    Ok(acc.value() * dx)
}

/// ψ_n rows for n = 0..=n_max over every grid point; the workhorse behind
/// projections and overlap matrices. `rows[n][i]` = ψ_n(x_i).
pub fn eigenfunction_table<T: Real>(
    model: &OscillatorModel<T>,
    n_max: usize,
    grid: &GridSpec<T>,
) -> Result<Vec<Vec<T>>> {
    let mut rows = vec![Vec::with_capacity(grid.points); n_max + 1];
    for i in 0..grid.points {
        let col = eigenfunction_row(model, n_max, grid.coordinate(i))?;
        for (n, v) in col.into_iter().enumerate() {
            rows[n].push(v);
        }
    }
    Ok(rows)
}
