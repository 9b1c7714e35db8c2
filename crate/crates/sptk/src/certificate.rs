//! Composite Lyapunov certificate synthesis for the coupled system.
//!
//! The fast block gets `V(z) = zᵀP1 z` with dissipation constants `a1..a4`;
//! the reduced-order block gets `P2` from a Lyapunov solve against `Q2`. Both
//! combine into the forwarding functional
//!
//! ```text
//!   Wfun(z, w) = eps·V(z) + (w - eps·M z)ᵀ P2 (w - eps·M z)
//! ```
//!
//! which certifies exponential stability of the full system for every
//! `eps` below the explicit threshold `eps_star`.

use nalgebra::{DMatrix, DVector};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::CoupledSystem;
use crate::numerics::{operator_norm, solve_lyapunov, sym_eig_extrema};
use crate::scalar::{cvt, RealScalar};
use crate::tikhonov::perturbed_growth_bound;

/// Fast-block certificate: `A1ᵀP1 + P1A1 = -Q1` plus the dissipation
/// constants certifying
/// `2⟨P1(A1 z + B1 v), z⟩ ≤ -a3‖z‖² + a4‖v‖²` and
/// `a1‖z‖² ≤ zᵀP1z ≤ a2‖z‖²`.
#[derive(Debug, Clone)]
pub struct FastCertificate<T: RealScalar> {
    pub p1: DMatrix<T>,
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
}

/// Slow-block certificate: `Ã2ᵀP2 + P2Ã2 = -Q2`, `beta = λmin(Q2)`,
/// `lambda = λmin(P2)`.
#[derive(Debug, Clone)]
pub struct SlowCertificate<T: RealScalar> {
    pub p2: DMatrix<T>,
    pub beta: T,
    pub lambda: T,
}

/// Full certificate with every constant entering the threshold formula.
#[derive(Debug, Clone)]
pub struct Certificate<T: RealScalar> {
    pub p1: DMatrix<T>,
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub p2: DMatrix<T>,
    pub q2: DMatrix<T>,
    pub beta: T,
    pub lambda: T,
    pub mu: T,
    pub eps_star: T,
    pub m_norm: T,
    pub c1_norm: T,
    /// λmax(P2) = ‖P2‖ (P2 is symmetric positive definite).
    pub p2_norm: T,
    /// ‖P2 Ã2‖ in the induced 2-norm.
    pub p2_a2t_norm: T,
    /// Growth-bound cap on eps from the perturbed fast generator
    /// (`+inf` when the perturbation vanishes).
    pub eps_max: T,
}

/// Builds the fast certificate from a user-chosen `Q1`.
///
/// The Young split uses `θ = λmin(Q1)/2`, giving `a3 = λmin(Q1)/2` and
/// `a4 = ‖P1 B1‖²/θ`.
pub fn synthesize_fast_certificate<T: RealScalar>(
    sys: &CoupledSystem<T>,
    q1: &DMatrix<T>,
) -> Result<FastCertificate<T>> {
    let sol = solve_lyapunov(&sys.a1, q1)?;
    let (a1, a2) = sym_eig_extrema(&sol.p)?;
    let (q1_min, _) = sym_eig_extrema(q1)?;
    let theta = q1_min * cvt::<T>(0.5);
    let a3 = theta;
    let p1b1 = &sol.p * &sys.b1;
    let p1b1_norm = operator_norm(&p1b1);
    let a4 = p1b1_norm * p1b1_norm / theta;
    Ok(FastCertificate { p1: sol.p, a1, a2, a3, a4 })
}

/// Builds the slow certificate; fails when the reduced-order generator is
/// not Hurwitz (the stability hypothesis on the reduced system).
pub fn synthesize_slow_certificate<T: RealScalar>(
    dec: &Decomposition<T>,
    q2: &DMatrix<T>,
) -> Result<SlowCertificate<T>> {
    let sol = solve_lyapunov(&dec.a2_tilde, q2).map_err(|e| match e {
        Error::NotHurwitz { abscissa } => Error::AssumptionViolated(format!(
            "reduced-order generator is not Hurwitz (spectral abscissa {abscissa}); \
             no slow certificate exists"
        )),
        other => other,
    })?;
    let (beta, _) = sym_eig_extrema(q2)?;
    let (lambda, _) = sym_eig_extrema(&sol.p)?;
    Ok(SlowCertificate { p2: sol.p, beta, lambda })
}

/// Default `Q2 = 4·a4·‖C1‖²·I`, which clears the threshold
/// `λmin(Q2) > 2·a4·‖C1‖²` with 100% margin. Falls back to the identity in
/// the decoupled case `a4 = 0`.
pub fn default_q2<T: RealScalar>(sys: &CoupledSystem<T>, fast: &FastCertificate<T>) -> DMatrix<T> {
    let n = sys.n_w();
    let c1n = operator_norm(&sys.c1);
    let scale = cvt::<T>(4.0) * fast.a4 * c1n * c1n;
    if scale > T::zero() {
        DMatrix::identity(n, n) * scale
    } else {
        DMatrix::identity(n, n)
    }
}

/// Stability threshold `eps_star = sqrt(mu·beta / (2‖P2Ã2‖²))` with
/// `mu = a3 / (2‖M‖²)`.
pub fn epsilon_star<T: RealScalar>(cert: &Certificate<T>, dec: &Decomposition<T>) -> Result<T> {
    let m_norm = operator_norm(&dec.m);
    let c1n = cert.c1_norm;
    let threshold = cvt::<T>(2.0) * cert.a4 * c1n * c1n;
    if cert.beta <= threshold {
        return Err(Error::CertificateUnusable(format!(
            "beta = {:?} does not strictly exceed 2·a4·‖C1‖² = {:?}",
            cert.beta.to_f64(),
            threshold.to_f64()
        )));
    }
    let p2a2t = operator_norm(&(&cert.p2 * &dec.a2_tilde));
    Ok(eps_star_from_parts(cert.a3, cert.beta, m_norm, p2a2t, cert.eps_max))
}

fn eps_star_from_parts<T: RealScalar>(a3: T, beta: T, m_norm: T, p2a2t: T, eps_max: T) -> T {
    if m_norm <= cvt::<T>(1e-300) {
        // mu is unbounded; the growth-bound cap is all that remains.
        return eps_max;
    }
    let mu = a3 / (cvt::<T>(2.0) * m_norm * m_norm);
    (mu * beta / (cvt::<T>(2.0) * p2a2t * p2a2t)).sqrt()
}

impl<T: RealScalar> Certificate<T> {
    /// Runs the whole synthesis chain: fast certificate from `Q1` (identity
    /// by default), `Q2` defaulted to clear the beta threshold, slow
    /// certificate, and the threshold constants.
    pub fn synthesize(
        sys: &CoupledSystem<T>,
        dec: &Decomposition<T>,
        q1: Option<DMatrix<T>>,
        q2: Option<DMatrix<T>>,
    ) -> Result<Self> {
        let q1 = q1.unwrap_or_else(|| DMatrix::identity(sys.n_z(), sys.n_z()));
        let fast = synthesize_fast_certificate(sys, &q1)?;
        let q2 = q2.unwrap_or_else(|| default_q2(sys, &fast));
        let slow = synthesize_slow_certificate(dec, &q2)?;

        let m_norm = operator_norm(&dec.m);
        let c1_norm = operator_norm(&sys.c1);
        let threshold = cvt::<T>(2.0) * fast.a4 * c1_norm * c1_norm;
        if slow.beta <= threshold {
            return Err(Error::CertificateUnusable(format!(
                "beta = {:?} does not strictly exceed 2·a4·‖C1‖² = {:?}; choose a larger Q2",
                slow.beta.to_f64(),
                threshold.to_f64()
            )));
        }
        let (_, p2_norm) = sym_eig_extrema(&slow.p2)?;
        let p2_a2t_norm = operator_norm(&(&slow.p2 * &dec.a2_tilde));

        let (_, eps_max, _, _) = perturbed_growth_bound(sys, dec, T::zero())?;

        let mu = if m_norm <= cvt::<T>(1e-300) {
            cvt::<T>(f64::INFINITY)
        } else {
            fast.a3 / (cvt::<T>(2.0) * m_norm * m_norm)
        };
        let eps_star = eps_star_from_parts(fast.a3, slow.beta, m_norm, p2_a2t_norm, eps_max);

        Ok(Certificate {
            p1: fast.p1,
            a1: fast.a1,
            a2: fast.a2,
            a3: fast.a3,
            a4: fast.a4,
            p2: slow.p2,
            q2,
            beta: slow.beta,
            lambda: slow.lambda,
            mu,
            eps_star,
            m_norm,
            c1_norm,
            p2_norm,
            p2_a2t_norm,
            eps_max,
        })
    }
}

/// Evaluates the forwarding functional
/// `eps·zᵀP1z + (w - eps·Mz)ᵀP2(w - eps·Mz)`.
pub fn forwarding_functional<T: RealScalar>(
    cert: &Certificate<T>,
    dec: &Decomposition<T>,
    eps: T,
    z: &DVector<T>,
    w: &DVector<T>,
) -> Result<T> {
    if eps <= T::zero() {
        return Err(Error::InvalidParameter("forwarding_functional: eps must be positive".into()));
    }
    if z.len() != cert.p1.nrows() || w.len() != cert.p2.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "forwarding_functional: z has length {}, w has length {}, expected {} and {}",
            z.len(),
            w.len(),
            cert.p1.nrows(),
            cert.p2.nrows()
        )));
    }
    let v = (z.transpose() * &cert.p1 * z)[(0, 0)];
    let shifted = w - &dec.m * z * eps;
    let slow = (shifted.transpose() * &cert.p2 * &shifted)[(0, 0)];
    Ok(eps * v + slow)
}

/// Coercivity bounds `nu_under·(‖z‖²+‖w‖²) ≤ Wfun ≤ nu_bar·(‖z‖²+‖w‖²)`:
///
/// ```text
///   nu_bar   = max(eps·a2 + 2·eps²‖M‖²‖P2‖, 2‖P2‖)
///   nu_under = min(a1·eps/2, λ·a1·eps / (2λ·eps²‖M‖² + a1·eps))
/// ```
///
/// The upper constant carries the Young factor 2 from splitting
/// `‖w - eps·Mz‖² ≤ 2‖w‖² + 2·eps²‖Mz‖²`; the lower one comes from the
/// split that leaves exactly `a1·eps/2` on the `z` term.
pub fn sandwich_bounds<T: RealScalar>(cert: &Certificate<T>, eps: T) -> Result<(T, T)> {
    if eps <= T::zero() {
        return Err(Error::InvalidParameter("sandwich_bounds: eps must be positive".into()));
    }
    let two = cvt::<T>(2.0);
    let half = cvt::<T>(0.5);
    let m2 = cert.m_norm * cert.m_norm;
    let upper_a = eps * cert.a2 + two * eps * eps * m2 * cert.p2_norm;
    let upper_b = two * cert.p2_norm;
    let nu_bar = if upper_a > upper_b { upper_a } else { upper_b };
    let lower_a = cert.a1 * eps * half;
    let lower_b =
        cert.lambda * cert.a1 * eps / (two * cert.lambda * eps * eps * m2 + cert.a1 * eps);
    let nu_under = if lower_a < lower_b { lower_a } else { lower_b };
    Ok((nu_under, nu_bar))
}

/// Dissipation margins from the threshold analysis: for `eps ≤ eps_star`
/// the functional derivative satisfies
/// `dWfun/dt ≤ -c_z‖z‖² - c_w‖w‖²` with `c_z = a3/2` and
/// `c_w = beta/2 - a4‖C1‖²`.
pub fn dissipation_margin<T: RealScalar>(cert: &Certificate<T>, eps: T) -> Result<(T, T)> {
    if eps <= T::zero() {
        return Err(Error::InvalidParameter("dissipation_margin: eps must be positive".into()));
    }
    if eps > cert.eps_star {
        return Err(Error::CertificateUnusable(format!(
            "eps = {:?} exceeds eps_star = {:?}; the dissipation margin is not guaranteed",
            eps.to_f64(),
            cert.eps_star.to_f64()
        )));
    }
    let c_z = cert.a3 * cvt::<T>(0.5);
    let c_w = cert.beta * cvt::<T>(0.5) - cert.a4 * cert.c1_norm * cert.c1_norm;
    Ok((c_z, c_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::decompose;
    use crate::model::{build_from_matrices, build_heat1d, build_scalar_exemplar};
    use approx::assert_relative_eq;

    fn scalar1(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    fn scalar_setup() -> (crate::CoupledSystem64, crate::Decomposition64, crate::Certificate64) {
        let sys = build_scalar_exemplar::<f64>();
        let dec = decompose(&sys).unwrap();
        let cert =
            Certificate::synthesize(&sys, &dec, Some(scalar1(1.0)), Some(scalar1(2.0))).unwrap();
        (sys, dec, cert)
    }

    #[test]
    fn fast_certificate_scalar() {
        let sys = build_scalar_exemplar::<f64>();
        let fast = synthesize_fast_certificate(&sys, &scalar1(1.0)).unwrap();
        assert_relative_eq!(fast.p1[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(fast.a1, 0.5, epsilon = 1e-12);
        assert_relative_eq!(fast.a2, 0.5, epsilon = 1e-12);
        assert_relative_eq!(fast.a3, 0.5, epsilon = 1e-12);
        assert_relative_eq!(fast.a4, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fast_certificate_zero_b1_has_zero_a4() {
        let sys = build_from_matrices(
            scalar1(-1.0),
            scalar1(0.0),
            scalar1(1.0),
            scalar1(-2.0),
            scalar1(1.0),
            scalar1(1.0),
        )
        .unwrap();
        let fast = synthesize_fast_certificate(&sys, &scalar1(1.0)).unwrap();
        assert_eq!(fast.a4, 0.0);
    }

    #[test]
    fn fast_certificate_inequality_on_random_states() {
        // Direct evaluation oracle: 2<P1(A1 z + B1 v), z> ≤ -a3‖z‖² + a4‖v‖².
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 8;
        let raw = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let shift = crate::numerics::spectral_abscissa(&raw) + 0.5;
        let a1 = &raw - DMatrix::identity(n, n) * shift;
        let b1 = DMatrix::<f64>::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
        let c1 = DMatrix::<f64>::from_fn(2, 1, |_, _| rng.random_range(-1.0..1.0));
        let sys = build_from_matrices(
            a1,
            b1,
            c1,
            scalar1(-2.0),
            scalar1(1.0),
            DMatrix::<f64>::from_fn(1, n, |_, _| rng.random_range(-1.0..1.0)),
        )
        .unwrap();
        let fast = synthesize_fast_certificate(&sys, &DMatrix::identity(n, n)).unwrap();
        for _ in 0..10_000 {
            let z = DVector::<f64>::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let v = DVector::<f64>::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            let lhs = 2.0
                * (z.transpose() * &fast.p1 * (&sys.a1 * &z + &sys.b1 * &v))[(0, 0)];
            let rhs = -fast.a3 * z.norm_squared() + fast.a4 * v.norm_squared();
            assert!(lhs <= rhs + 1e-10, "lhs={lhs}, rhs={rhs}");
        }
    }

    #[test]
    fn slow_certificate_scalar() {
        let dec = decompose(&build_scalar_exemplar::<f64>()).unwrap();
        let slow = synthesize_slow_certificate(&dec, &scalar1(2.0)).unwrap();
        assert_relative_eq!(slow.p2[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(slow.beta, 2.0, epsilon = 1e-12);
        assert_relative_eq!(slow.lambda, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slow_certificate_decoupled_diagonal() {
        let dec = crate::decomposition::Decomposition {
            m: DMatrix::zeros(2, 1),
            a2_tilde: DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            quasi_steady_map: DMatrix::zeros(1, 2),
        };
        let slow = synthesize_slow_certificate(&dec, &DMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(slow.p2[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(slow.p2[(1, 1)], 0.25, epsilon = 1e-12);
        assert_relative_eq!(slow.beta, 1.0, epsilon = 1e-12);
        assert_relative_eq!(slow.lambda, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn slow_certificate_rejects_unstable_reduced_generator() {
        let dec = crate::decomposition::Decomposition {
            m: scalar1(0.0),
            a2_tilde: scalar1(1.0),
            quasi_steady_map: scalar1(0.0),
        };
        assert!(matches!(
            synthesize_slow_certificate(&dec, &scalar1(1.0)),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn default_q2_scalar() {
        let sys = build_scalar_exemplar::<f64>();
        let fast = synthesize_fast_certificate(&sys, &scalar1(1.0)).unwrap();
        let q2 = default_q2(&sys, &fast);
        assert_relative_eq!(q2[(0, 0)], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn default_q2_falls_back_to_identity_when_decoupled() {
        let sys = build_from_matrices(
            scalar1(-1.0),
            scalar1(0.0),
            scalar1(1.0),
            scalar1(-2.0),
            scalar1(1.0),
            scalar1(1.0),
        )
        .unwrap();
        let fast = synthesize_fast_certificate(&sys, &scalar1(1.0)).unwrap();
        let q2 = default_q2(&sys, &fast);
        assert_relative_eq!(q2[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eps_star_scalar_chain() {
        let (_, _, cert) = scalar_setup();
        assert_relative_eq!(cert.mu, 0.25, epsilon = 1e-12);
        assert_relative_eq!(cert.beta, 2.0, epsilon = 1e-12);
        assert_relative_eq!(cert.p2_a2t_norm, 1.0, epsilon = 1e-12);
        assert_relative_eq!(cert.eps_star, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eps_star_scales_as_inverse_sqrt_of_q2() {
        let sys = build_scalar_exemplar::<f64>();
        let dec = decompose(&sys).unwrap();
        let base =
            Certificate::synthesize(&sys, &dec, Some(scalar1(1.0)), Some(scalar1(2.0))).unwrap();
        for s in [2.0, 4.0, 9.0] {
            let scaled =
                Certificate::synthesize(&sys, &dec, Some(scalar1(1.0)), Some(scalar1(2.0 * s)))
                    .unwrap();
            assert_relative_eq!(
                scaled.eps_star,
                base.eps_star / s.sqrt(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn eps_star_rejects_boundary_beta() {
        let sys = build_scalar_exemplar::<f64>();
        let dec = decompose(&sys).unwrap();
        // beta = 2·a4·‖C1‖² = 1 exactly: non-strict, must fail.
        let res = Certificate::synthesize(&sys, &dec, Some(scalar1(1.0)), Some(scalar1(1.0)));
        assert!(matches!(res, Err(Error::CertificateUnusable(_))));
    }

    #[test]
    fn eps_star_unbounded_when_coupling_vanishes() {
        let sys = build_from_matrices(
            scalar1(-1.0),
            scalar1(1.0),
            scalar1(1.0),
            scalar1(-2.0),
            scalar1(0.0),
            scalar1(0.0),
        )
        .unwrap();
        let dec = decompose(&sys).unwrap();
        let cert = Certificate::synthesize(&sys, &dec, None, None).unwrap();
        assert!(cert.m_norm == 0.0);
        assert!(cert.eps_star.is_infinite());
    }

    #[test]
    fn forwarding_functional_values() {
        let (_, dec, cert) = scalar_setup();
        let z0 = DVector::from_row_slice(&[0.0]);
        let w0 = DVector::from_row_slice(&[0.0]);
        assert_eq!(forwarding_functional(&cert, &dec, 0.25, &z0, &w0).unwrap(), 0.0);

        let z = DVector::from_row_slice(&[1.0]);
        let w = DVector::from_row_slice(&[1.0]);
        // 0.25·0.5 + (1 + 0.25)² = 1.6875
        assert_relative_eq!(
            forwarding_functional(&cert, &dec, 0.25, &z, &w).unwrap(),
            1.6875,
            epsilon = 1e-12
        );

        // w = eps·Mz kills the slow term.
        let w_on = DVector::from_row_slice(&[-0.25]);
        assert_relative_eq!(
            forwarding_functional(&cert, &dec, 0.25, &z, &w_on).unwrap(),
            0.25 * 0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sandwich_bounds_scalar() {
        let (_, _, cert) = scalar_setup();
        let (lo, hi) = sandwich_bounds(&cert, 0.25).unwrap();
        // lower: min(0.5·0.25/2, 1·0.5·0.25/(2·0.0625 + 0.125)) = 0.0625
        assert_relative_eq!(lo, 0.0625, epsilon = 1e-12);
        // upper: max(0.25·0.5 + 2·0.0625·1, 2·1) = 2
        assert_relative_eq!(hi, 2.0, epsilon = 1e-12);
        // nu_under vanishes with eps.
        let (lo_small, _) = sandwich_bounds(&cert, 1e-9).unwrap();
        assert!(lo_small < 1e-8);
    }

    #[test]
    fn sandwich_holds_on_random_states() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = build_heat1d(
            4,
            1.0,
            |_x: f64| 1.0,
            |_x: f64| 1.0,
            DMatrix::from_row_slice(2, 2, &[-2.0, 0.1, 0.0, -1.0]),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.5]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.25]),
        )
        .unwrap();
        let dec = decompose(&sys).unwrap();
        let cert = Certificate::synthesize(&sys, &dec, None, None).unwrap();
        for frac in [0.25, 0.5, 0.99] {
            let eps = cert.eps_star * frac;
            let (lo, hi) = sandwich_bounds(&cert, eps).unwrap();
            for _ in 0..10_000 {
                let z = DVector::<f64>::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
                let w = DVector::<f64>::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
                let wf = forwarding_functional(&cert, &dec, eps, &z, &w).unwrap();
                let ns = z.norm_squared() + w.norm_squared();
                assert!(lo * ns <= wf + 1e-12 && wf <= hi * ns + 1e-12);
            }
        }
    }

    #[test]
    fn dissipation_margin_scalar() {
        let (_, _, cert) = scalar_setup();
        let (c_z, c_w) = dissipation_margin(&cert, 0.25).unwrap();
        assert_relative_eq!(c_z, 0.25, epsilon = 1e-12);
        assert_relative_eq!(c_w, 0.5, epsilon = 1e-12);
        assert!(dissipation_margin(&cert, 0.6).is_err());
    }

    #[test]
    fn heat_exemplar_margins_positive() {
        let sys = build_heat1d(
            16,
            1.0,
            |_x: f64| 1.0,
            |_x: f64| 1.0,
            scalar1(-2.0),
            scalar1(1.0),
            scalar1(1.0),
        )
        .unwrap();
        let dec = decompose(&sys).unwrap();
        let cert = Certificate::synthesize(&sys, &dec, None, None).unwrap();
        assert!(cert.q2[(0, 0)] > 0.0);
        let (c_z, c_w) = dissipation_margin(&cert, cert.eps_star * 0.5).unwrap();
        assert!(c_z > 0.0 && c_w > 0.0);
    }

    #[test]
    fn epsilon_star_op_matches_synthesized_value() {
        let (_, dec, cert) = scalar_setup();
        assert_relative_eq!(epsilon_star(&cert, &dec).unwrap(), cert.eps_star, epsilon = 1e-12);
    }
}
