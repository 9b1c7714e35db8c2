//! Slow/fast decomposition: quasi-steady state, reduced-order generator and
//! the boundary-layer system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{CoupledSystem, Trajectory};
use crate::numerics::{integrate_lti, spectral_abscissa};
use crate::scalar::{cvt, RealScalar};

/// Decomposition artifacts:
///
/// * `m` — the coupling map `M = B2 C2 A1⁻¹`;
/// * `a2_tilde` — reduced-order generator `A2 - B2 C2 A1⁻¹ B1 C1`;
/// * `quasi_steady_map` — `-A1⁻¹ B1 C1`, sending the slow state to the fast
///   quasi-steady state.
#[derive(Debug, Clone)]
pub struct Decomposition<T: RealScalar> {
    pub m: DMatrix<T>,
    pub a2_tilde: DMatrix<T>,
    pub quasi_steady_map: DMatrix<T>,
}

/// Computes the decomposition. `A1⁻¹` is applied through LU solves, one
/// factorization reused for all columns.
pub fn decompose<T: RealScalar>(sys: &CoupledSystem<T>) -> Result<Decomposition<T>> {
    let lu = sys.a1.clone().lu();

    // Condition estimate: ‖A1‖·‖A1⁻¹‖ via solves against the identity.
    let n = sys.n_z();
    let inv = lu.solve(&DMatrix::<T>::identity(n, n)).ok_or_else(|| {
        Error::SingularSolve("A1 is singular; decomposition undefined".into())
    })?;
    let cond = crate::numerics::operator_norm(&sys.a1) * crate::numerics::operator_norm(&inv);
    if cond > cvt::<T>(1e12) {
        return Err(Error::SingularSolve(format!(
            "A1 is near-singular (condition estimate {:?})",
            cond.to_f64()
        )));
    }

    let a1_inv_b1 = lu
        .solve(&sys.b1)
        .ok_or_else(|| Error::SingularSolve("A1 solve failed".into()))?;
    let quasi_steady_map = -(&a1_inv_b1 * &sys.c1);

    // M = B2 C2 A1⁻¹, computed as (A1⁻ᵀ (B2 C2)ᵀ)ᵀ.
    let b2c2 = &sys.b2 * &sys.c2;
    let m = sys
        .a1
        .transpose()
        .lu()
        .solve(&b2c2.transpose())
        .ok_or_else(|| Error::SingularSolve("A1ᵀ solve failed".into()))?
        .transpose();

    let a2_tilde = &sys.a2 - &m * &sys.b1 * &sys.c1;
    Ok(Decomposition { m, a2_tilde, quasi_steady_map })
}

/// Trajectory of the reduced-order system `dw̄/dt = Ã2 w̄`.
///
/// Returns the trajectory even when `Ã2` is not Hurwitz; stability of the
/// reduced system is a hypothesis checked by the certificate layer.
pub fn reduced_trajectory<T: RealScalar>(
    dec: &Decomposition<T>,
    w0: &DVector<T>,
    t_final: T,
    dt: T,
) -> Result<Trajectory<T>> {
    integrate_lti(&dec.a2_tilde, w0, t_final, dt)
}

/// Whether the reduced-order generator is Hurwitz.
pub fn reduced_is_stable<T: RealScalar>(dec: &Decomposition<T>) -> bool {
    spectral_abscissa(&dec.a2_tilde) < cvt(crate::numerics::HURWITZ_MARGIN)
}

/// Boundary-layer trajectory in the stretched time `τ = t/eps`:
/// `dz̄/dτ = A1 z̄` started from `z̄(0) = z0 - quasi_steady_map · w0`.
pub fn boundary_layer_trajectory<T: RealScalar>(
    sys: &CoupledSystem<T>,
    dec: &Decomposition<T>,
    z0: &DVector<T>,
    w0: &DVector<T>,
    tau_final: T,
    dtau: T,
) -> Result<Trajectory<T>> {
    if z0.len() != sys.n_z() || w0.len() != sys.n_w() {
        return Err(Error::DimensionMismatch(format!(
            "boundary layer: z0 has length {}, w0 has length {}, expected {} and {}",
            z0.len(),
            w0.len(),
            sys.n_z(),
            sys.n_w()
        )));
    }
    let z_init = z0 - &dec.quasi_steady_map * w0;
    integrate_lti(&sys.a1, &z_init, tau_final, dtau)
}
