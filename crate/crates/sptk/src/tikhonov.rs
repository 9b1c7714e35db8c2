//! Approximation-error analysis: error variables against the reduced and
//! boundary-layer flows, epsilon sweeps checking the O(eps) scaling laws, and
//! the perturbed-generator growth bound.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::certificate::Certificate;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::{full_generator, CoupledSystem, Trajectory};
use crate::numerics::{
    eigvec_condition, integrate_lti_steps, is_normal, operator_norm, spectral_abscissa,
};
use crate::scalar::{cvt, RealScalar};

/// What an epsilon sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Sup-over-time of `‖z‖ + ‖w‖` of the full flow (state scaling).
    StateScaling,
    /// Sup-over-time of `‖z̃‖ + ‖w̃‖` of the error variables.
    TikhonovError,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::StateScaling => "state_scaling",
            SweepMode::TikhonovError => "tikhonov_error",
        }
    }
}

/// Result of an epsilon sweep: one metric per epsilon plus the log-log
/// least-squares slope.
#[derive(Debug, Clone)]
pub struct SweepResult<T: RealScalar> {
    pub eps_values: Vec<T>,
    pub metrics: Vec<T>,
    pub slope: T,
    pub intercept: T,
    pub mode: SweepMode,
}

/// Simulates the full system, the reduced-order flow and the boundary layer
/// from `(z0, w0)` and forms the error variables
///
/// ```text
///   z̃(t) = z(t) - quasi_steady_map·w(t) - z̄(t/eps)
///   w̃(t) = w(t) - w̄(t)
/// ```
///
/// on a shared time grid.
pub fn error_trajectories<T: RealScalar>(
    sys: &CoupledSystem<T>,
    dec: &Decomposition<T>,
    eps: T,
    z0: &DVector<T>,
    w0: &DVector<T>,
    t_final: T,
    dt: T,
) -> Result<(Trajectory<T>, Trajectory<T>)> {
    if eps <= T::zero() {
        return Err(Error::InvalidParameter("error_trajectories: eps must be positive".into()));
    }
    if z0.len() != sys.n_z() || w0.len() != sys.n_w() {
        return Err(Error::DimensionMismatch(format!(
            "error_trajectories: z0 has length {}, w0 has length {}, expected {} and {}",
            z0.len(),
            w0.len(),
            sys.n_z(),
            sys.n_w()
        )));
    }
    if dt <= T::zero() || t_final < dt {
        return Err(Error::InvalidParameter("error_trajectories: need 0 < dt ≤ t_final".into()));
    }

    let n_z = sys.n_z();
    let n_w = sys.n_w();
    let steps = {
        let raw = (t_final / dt).to_f64().expect("step count overflow");
        let rounded = raw.round();
        let s = if (raw - rounded).abs() < 1e-9 * rounded.max(1.0) { rounded } else { raw.ceil() };
        (s as usize).max(1)
    };

    let gen = full_generator(sys, eps)?;
    let mut eta0 = DVector::<T>::zeros(n_z + n_w);
    eta0.rows_mut(0, n_z).copy_from(z0);
    eta0.rows_mut(n_z, n_w).copy_from(w0);
    let full = integrate_lti_steps(&gen, &eta0, dt, steps)?;

    let reduced = integrate_lti_steps(&dec.a2_tilde, w0, dt, steps)?;

    let layer_ic = z0 - &dec.quasi_steady_map * w0;
    let layer = integrate_lti_steps(&sys.a1, &layer_ic, dt / eps, steps)?;

    if full.len() != reduced.len() || full.len() != layer.len() {
        return Err(Error::InvalidParameter(
            "internal grid mismatch between full, reduced and layer flows".into(),
        ));
    }

    let mut z_err = Vec::with_capacity(full.len());
    let mut w_err = Vec::with_capacity(full.len());
    for k in 0..full.len() {
        let z = full.states[k].rows(0, n_z).clone_owned();
        let w = full.states[k].rows(n_z, n_w).clone_owned();
        z_err.push(&z - &dec.quasi_steady_map * &w - &layer.states[k]);
        w_err.push(&w - &reduced.states[k]);
    }
    let times = full.times.clone();
    Ok((
        Trajectory::new(times.clone(), z_err, None)?,
        Trajectory::new(times, w_err, None)?,
    ))
}

/// Runs the sweep: per epsilon, simulate and record the sup-over-time metric
/// for the chosen mode, then fit the slope of `log metric` against
/// `log eps` by ordinary least squares.
///
/// `ic_rule` maps each epsilon to the physical initial conditions
/// `(z0, w0)`. To observe the expected rate, scale the ICs with epsilon in
/// [`SweepMode::StateScaling`] but keep them epsilon-independent in
/// [`SweepMode::TikhonovError`]: the error variables start at exactly zero
/// regardless of the ICs, so epsilon-proportional ICs push the whole metric
/// into the quadratic regime. `t_final` defaults to ten slow time constants,
/// `10/|spectral abscissa of Ã2|`. Points run in parallel; results are keyed
/// by epsilon order, not completion order.
pub fn epsilon_sweep<T: RealScalar + Send + Sync>(
    sys: &CoupledSystem<T>,
    dec: &Decomposition<T>,
    cert: &Certificate<T>,
    eps_values: &[T],
    ic_rule: &(dyn Fn(T) -> (DVector<T>, DVector<T>) + Sync),
    t_final: Option<T>,
    mode: SweepMode,
) -> Result<SweepResult<T>> {
    if eps_values.len() < 3 {
        return Err(Error::InvalidParameter(
            "epsilon_sweep: need at least 3 epsilon values for a robust slope".into(),
        ));
    }
    for pair in eps_values.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidParameter(
                "epsilon_sweep: eps_values must be strictly decreasing".into(),
            ));
        }
    }
    if eps_values[eps_values.len() - 1] <= T::zero() {
        return Err(Error::InvalidParameter("epsilon_sweep: eps_values must be positive".into()));
    }
    if eps_values[0] >= cert.eps_star {
        return Err(Error::InvalidParameter(format!(
            "epsilon_sweep: all eps must lie below eps_star = {:?}",
            cert.eps_star.to_f64()
        )));
    }

    let horizon = match t_final {
        Some(t) if t > T::zero() => t,
        Some(_) => {
            return Err(Error::InvalidParameter("epsilon_sweep: t_final must be positive".into()))
        }
        None => {
            let rate = spectral_abscissa(&dec.a2_tilde).abs();
            if rate <= T::zero() {
                return Err(Error::InvalidParameter(
                    "epsilon_sweep: reduced generator has zero decay rate; pass t_final".into(),
                ));
            }
            cvt::<T>(10.0) / rate
        }
    };

    let metrics: Vec<T> = eps_values
        .par_iter()
        .map(|&eps| -> Result<T> {
            let (z0, w0) = ic_rule(eps);
            let dt_layer = eps / cvt::<T>(20.0);
            let dt_grid = horizon / cvt::<T>(2000.0);
            let dt = if dt_layer < dt_grid { dt_layer } else { dt_grid };
            match mode {
                SweepMode::StateScaling => {
                    let gen = full_generator(sys, eps)?;
                    let n_z = sys.n_z();
                    let n_w = sys.n_w();
                    let mut eta0 = DVector::<T>::zeros(n_z + n_w);
                    eta0.rows_mut(0, n_z).copy_from(&z0);
                    eta0.rows_mut(n_z, n_w).copy_from(&w0);
                    let traj = crate::numerics::integrate_lti(&gen, &eta0, horizon, dt)?;
                    Ok(traj
                        .states
                        .iter()
                        .map(|s| s.rows(0, n_z).norm() + s.rows(n_z, n_w).norm())
                        .fold(T::zero(), |acc, v| if v > acc { v } else { acc }))
                }
                SweepMode::TikhonovError => {
                    let (z_err, w_err) =
                        error_trajectories(sys, dec, eps, &z0, &w0, horizon, dt)?;
                    Ok(z_err
                        .states
                        .iter()
                        .zip(&w_err.states)
                        .map(|(ze, we)| ze.norm() + we.norm())
                        .fold(T::zero(), |acc, v| if v > acc { v } else { acc }))
                }
            }
        })
        .collect::<Result<Vec<T>>>()?;

    let (slope, intercept) = loglog_fit(eps_values, &metrics);
    Ok(SweepResult {
        eps_values: eps_values.to_vec(),
        metrics,
        slope,
        intercept,
        mode,
    })
}

/// Ordinary least squares on `(log eps, log metric)`, with metrics clipped
/// below at 1e-14 so degenerate decoupled cases stay finite.
fn loglog_fit<T: RealScalar>(eps_values: &[T], metrics: &[T]) -> (T, T) {
    let floor = cvt::<T>(1e-14);
    let n = cvt::<T>(eps_values.len() as f64);
    let xs: Vec<T> = eps_values.iter().map(|&e| e.ln()).collect();
    let ys: Vec<T> = metrics
        .iter()
        .map(|&m| if m > floor { m.ln() } else { floor.ln() })
        .collect();
    let sx = xs.iter().fold(T::zero(), |a, &x| a + x);
    let sy = ys.iter().fold(T::zero(), |a, &y| a + y);
    let sxx = xs.iter().fold(T::zero(), |a, &x| a + x * x);
    let sxy = xs.iter().zip(&ys).fold(T::zero(), |a, (&x, &y)| a + x * y);
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Growth bound of the perturbed fast generator
/// `A1 + eps·A1⁻¹B1C1B2C2`:
///
/// ```text
///   alpha   = -omega1 + K1·eps·‖A1⁻¹B1C1B2C2‖
///   eps_max = omega1 / (K1·‖A1⁻¹B1C1B2C2‖)
/// ```
///
/// with `omega1` the decay rate of `A1` and `K1 = 1` for normal `A1`, the
/// eigenvector-matrix condition number otherwise. `eps_max` is `+inf` when
/// the perturbation vanishes.
pub fn perturbed_growth_bound<T: RealScalar>(
    sys: &CoupledSystem<T>,
    dec: &Decomposition<T>,
    eps: T,
) -> Result<(T, T, T, T)> {
    if eps < T::zero() {
        return Err(Error::InvalidParameter("perturbed_growth_bound: eps must be nonnegative".into()));
    }
    let omega1 = -spectral_abscissa(&sys.a1);
    if omega1 <= T::zero() {
        return Err(Error::NotHurwitz {
            abscissa: (-omega1).to_f64().unwrap_or(f64::NAN),
        });
    }
    let k1 = if is_normal(&sys.a1, cvt::<T>(1e-10)) {
        T::one()
    } else {
        eigvec_condition(&sys.a1)?
    };
    // A1⁻¹B1C1 = -quasi_steady_map.
    let pert = -(&dec.quasi_steady_map) * &sys.b2 * &sys.c2;
    let pert_norm = operator_norm(&pert);
    let alpha = -omega1 + k1 * eps * pert_norm;
    let eps_max = if pert_norm > T::zero() {
        omega1 / (k1 * pert_norm)
    } else {
        cvt::<T>(f64::INFINITY)
    };
    Ok((alpha, eps_max, k1, omega1))
}
