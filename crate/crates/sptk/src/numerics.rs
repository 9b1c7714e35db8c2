//! Numerical kernels: Lyapunov-equation solves, eigen/norm utilities and an
//! A-stable trapezoidal integrator for LTI dynamics.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::Trajectory;
use crate::scalar::{cvt, RealScalar};

/// Matrices up to this size go through the Kronecker-product linearization;
/// larger ones use the Schur-based (Bartels-Stewart style) solver.
const KRONECKER_MAX_DIM: usize = 50;

/// Spectral abscissa below which a matrix is accepted as Hurwitz.
pub const HURWITZ_MARGIN: f64 = -1e-12;

/// Solution of `AᵀP + PA = -Q` together with its reconstruction residual.
#[derive(Debug, Clone)]
pub struct LyapunovSolution<T: RealScalar> {
    /// Symmetric positive-definite solution.
    pub p: DMatrix<T>,
    /// Frobenius norm of `AᵀP + PA + Q`.
    pub residual_norm: T,
}

/// Largest real part over the eigenvalues of `a`.
pub fn spectral_abscissa<T: RealScalar>(a: &DMatrix<T>) -> T {
    assert!(a.is_square(), "spectral_abscissa needs a square matrix");
    a.complex_eigenvalues()
        .iter()
        .map(|ev| ev.re)
        .fold(cvt::<T>(f64::NEG_INFINITY), |acc, re| if re > acc { re } else { acc })
}

/// Induced 2-norm (largest singular value).
pub fn operator_norm<T: RealScalar>(a: &DMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    let sv = a.clone().svd(false, false).singular_values;
    sv.iter().fold(T::zero(), |acc, &s| if s > acc { s } else { acc })
}

/// Smallest and largest eigenvalues of a symmetric matrix.
pub fn sym_eig_extrema<T: RealScalar>(p: &DMatrix<T>) -> Result<(T, T)> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch("sym_eig_extrema needs a square matrix".into()));
    }
    let asym = (p - p.transpose()).norm();
    let scale = T::one() + p.norm();
    if asym > cvt::<T>(1e-10) * scale {
        return Err(Error::InvalidParameter(
            "sym_eig_extrema: input is not symmetric".into(),
        ));
    }
    let eigs = p.clone().symmetric_eigen().eigenvalues;
    let mut min = eigs[0];
    let mut max = eigs[0];
    for &e in eigs.iter() {
        if e < min {
            min = e;
        }
        if e > max {
            max = e;
        }
    }
    Ok((min, max))
}

/// Whether `‖AAᵀ - AᵀA‖_F` vanishes to the given tolerance.
pub fn is_normal<T: RealScalar>(a: &DMatrix<T>, tol: T) -> bool {
    (a * a.transpose() - a.transpose() * a).norm() <= tol
}

/// Condition number (in the 2-norm) of an eigenvector matrix of `a`,
/// computed from the complex Schur form.
pub fn eigvec_condition<T: RealScalar>(a: &DMatrix<T>) -> Result<T> {
    let n = a.nrows();
    let ac = a.map(|x| Complex::new(x, T::zero()));
    let (q, t) = ac.schur().unpack();
    // Eigenvectors of the triangular factor by back substitution.
    let mut x = DMatrix::<Complex<T>>::zeros(n, n);
    for j in 0..n {
        x[(j, j)] = Complex::new(T::one(), T::zero());
        for i in (0..j).rev() {
            let mut s = Complex::new(T::zero(), T::zero());
            for k in i + 1..=j {
                s += t[(i, k)] * x[(k, j)];
            }
            let mut d = t[(j, j)] - t[(i, i)];
            // Repeated eigenvalues make the system singular; nudge the pivot.
            let floor = cvt::<T>(1e-300);
            if d.modulus() < floor {
                d = Complex::new(floor, T::zero());
            }
            x[(i, j)] = s / d;
        }
        let nrm = x.column(j).norm();
        for i in 0..=j {
            x[(i, j)] /= Complex::new(nrm, T::zero());
        }
    }
    let v = q * x;
    let sv = v.svd(false, false).singular_values;
    let mut smax = T::zero();
    let mut smin = cvt::<T>(f64::INFINITY);
    for &s in sv.iter() {
        if s > smax {
            smax = s;
        }
        if s < smin {
            smin = s;
        }
    }
    if smin <= T::zero() {
        return Err(Error::SingularSolve(
            "eigenvector matrix is numerically singular".into(),
        ));
    }
    Ok(smax / smin)
}

/// Solves `AᵀP + PA = -Q` for Hurwitz `A` and symmetric positive-definite `Q`.
///
/// Small systems use the direct Kronecker linearization
/// `(I⊗Aᵀ + Aᵀ⊗I) vec(P) = -vec(Q)`; larger ones a complex-Schur
/// Bartels-Stewart substitution. The result is symmetrized and the
/// reconstruction residual is checked before returning.
pub fn solve_lyapunov<T: RealScalar>(
    a: &DMatrix<T>,
    q: &DMatrix<T>,
) -> Result<LyapunovSolution<T>> {
    let n = a.nrows();
    if !a.is_square() || !q.is_square() || q.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_lyapunov: A is {}x{}, Q is {}x{}",
            a.nrows(),
            a.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    let abscissa = spectral_abscissa(a);
    if abscissa >= cvt(HURWITZ_MARGIN) {
        return Err(Error::NotHurwitz {
            abscissa: abscissa.to_f64().unwrap_or(f64::NAN),
        });
    }
    let asym = (q - q.transpose()).norm();
    if asym > cvt::<T>(1e-10) * (T::one() + q.norm()) {
        return Err(Error::NotPositiveDefinite("Q is not symmetric".into()));
    }
    let (qmin, _) = sym_eig_extrema(q)?;
    if qmin <= T::zero() {
        return Err(Error::NotPositiveDefinite(format!(
            "Q has a non-positive eigenvalue ({:?})",
            qmin.to_f64()
        )));
    }

    let mut p = if n <= KRONECKER_MAX_DIM {
        lyapunov_kronecker(a, q)?
    } else {
        lyapunov_schur(a, q)?
    };
    p = (&p + p.transpose()) * cvt::<T>(0.5);

    let residual_norm = (a.transpose() * &p + &p * a + q).norm();
    let budget = cvt::<T>(1e-8) * (T::one() + q.norm());
    if residual_norm > budget {
        return Err(Error::SingularSolve(format!(
            "Lyapunov residual {:?} exceeds tolerance",
            residual_norm.to_f64()
        )));
    }
    Ok(LyapunovSolution { p, residual_norm })
}

fn lyapunov_kronecker<T: RealScalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let at = a.transpose();
    let eye = DMatrix::<T>::identity(n, n);
    let k = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, q.iter().map(|&x| -x));
    let lu = k.lu();
    let x = lu.solve(&rhs).ok_or_else(|| {
        Error::SingularSolve("Kronecker Lyapunov system is singular (λi + λj ≈ 0)".into())
    })?;
    Ok(DMatrix::from_iterator(n, n, x.iter().copied()))
}

fn lyapunov_schur<T: RealScalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let ac = a.map(|x| Complex::new(x, T::zero()));
    let qc = q.map(|x| Complex::new(x, T::zero()));
    // A = U T U*, T upper triangular; with P̃ = U* P U the equation becomes
    // T* P̃ + P̃ T = -U* Q U, solvable column by column.
    let (u, t) = ac.schur().unpack();
    let uh = u.adjoint();
    let qt = &uh * qc * &u;
    let mut pt = DMatrix::<Complex<T>>::zeros(n, n);
    for j in 0..n {
        let mut rhs = -qt.column(j).clone_owned();
        for k in 0..j {
            rhs -= pt.column(k) * t[(k, j)];
        }
        // (T* + t_jj I) x = rhs, lower triangular forward substitution.
        let mut x = DVector::<Complex<T>>::zeros(n);
        for i in 0..n {
            let mut s = rhs[i];
            for m in 0..i {
                s -= t[(m, i)].conj() * x[m];
            }
            let d = t[(i, i)].conj() + t[(j, j)];
            if d.modulus() < cvt::<T>(1e-14) {
                return Err(Error::SingularSolve(
                    "Schur Lyapunov solve hit λi + λj ≈ 0".into(),
                ));
            }
            x[i] = s / d;
        }
        pt.set_column(j, &x);
    }
    let p = u * pt * uh;
    Ok(p.map(|c| c.re))
}

/// Integrates `dx/dt = Ax` by the implicit trapezoidal rule
/// `x_{k+1} = (I - (dt/2)A)⁻¹ (I + (dt/2)A) x_k`.
///
/// A-stable, so stiff blocks do not constrain `dt` for stability; accuracy
/// still requires resolving the fastest transient of interest.
pub fn integrate_lti<T: RealScalar>(
    a: &DMatrix<T>,
    x0: &DVector<T>,
    t_final: T,
    dt: T,
) -> Result<Trajectory<T>> {
    if dt <= T::zero() || t_final <= T::zero() {
        return Err(Error::InvalidParameter("integrate_lti: dt and t_final must be positive".into()));
    }
    if dt > t_final {
        return Err(Error::InvalidParameter("integrate_lti: dt exceeds t_final".into()));
    }
    integrate_lti_steps(a, x0, dt, step_count(t_final, dt))
}

/// Same trapezoidal scheme with an explicit step count, for callers that
/// need several flows sampled on exactly matching grids.
pub fn integrate_lti_steps<T: RealScalar>(
    a: &DMatrix<T>,
    x0: &DVector<T>,
    dt: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    let n = a.nrows();
    if !a.is_square() || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "integrate_lti: A is {}x{}, x0 has length {}",
            a.nrows(),
            a.ncols(),
            x0.len()
        )));
    }
    if dt <= T::zero() || steps == 0 {
        return Err(Error::InvalidParameter("integrate_lti: dt and steps must be positive".into()));
    }

    let half = dt * cvt::<T>(0.5);
    let eye = DMatrix::<T>::identity(n, n);
    let minus = &eye - a * half;
    let plus = &eye + a * half;
    let lu = minus.lu();

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    times.push(T::zero());
    states.push(x.clone());
    for k in 1..=steps {
        let rhs = &plus * &x;
        x = lu.solve(&rhs).ok_or_else(|| {
            Error::SingularSolve(
                "trapezoidal step matrix I - (dt/2)A is singular (dt·λ = 2 for some eigenvalue)"
                    .into(),
            )
        })?;
        times.push(cvt::<T>(k as f64) * dt);
        states.push(x.clone());
    }
    Trajectory::new(times, states, None)
}

/// Number of trapezoidal steps covering `[0, t_final]`; snaps to an integer
/// multiple when `t_final/dt` is one up to round-off.
fn step_count<T: RealScalar>(t_final: T, dt: T) -> usize {
    let raw = (t_final / dt).to_f64().expect("step count overflow");
    let rounded = raw.round();
    let steps = if (raw - rounded).abs() < 1e-9 * rounded.max(1.0) {
        rounded
    } else {
        raw.ceil()
    };
    (steps as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn abscissa_diagonal() {
        assert_relative_eq!(spectral_abscissa(&m(2, 2, &[-1.0, 0.0, 0.0, -3.0])), -1.0);
    }

    #[test]
    fn abscissa_rotation_is_zero() {
        let a = m(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(spectral_abscissa(&a).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_identity_and_diagonal() {
        assert_relative_eq!(operator_norm(&DMatrix::<f64>::identity(5, 5)), 1.0);
        assert_relative_eq!(operator_norm(&m(2, 2, &[3.0, 0.0, 0.0, 4.0])), 4.0);
    }

    #[test]
    fn operator_norm_rank_one() {
        // ‖uvᵀ‖ = ‖u‖·‖v‖, checked against the singular-value oracle.
        let u = DVector::from_row_slice(&[1.0, -2.0, 0.5]);
        let v = DVector::from_row_slice(&[0.3, 4.0]);
        let a = &u * v.transpose();
        assert_relative_eq!(operator_norm(&a), u.norm() * v.norm(), epsilon = 1e-12);
    }

    #[test]
    fn sym_eig_extrema_diagonal() {
        let (lo, hi) = sym_eig_extrema(&m(3, 3, &[1., 0., 0., 0., 2., 0., 0., 0., 3.])).unwrap();
        assert_relative_eq!(lo, 1.0);
        assert_relative_eq!(hi, 3.0);
        let (lo, hi) = sym_eig_extrema(&DMatrix::<f64>::identity(4, 4)).unwrap();
        assert_relative_eq!(lo, 1.0);
        assert_relative_eq!(hi, 1.0);
    }

    #[test]
    fn sym_eig_extrema_rejects_asymmetric() {
        assert!(sym_eig_extrema(&m(2, 2, &[0.0, 1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn lyapunov_scalar() {
        let sol = solve_lyapunov(&m(1, 1, &[-1.0]), &m(1, 1, &[2.0])).unwrap();
        assert_relative_eq!(sol.p[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_decoupled_diagonal() {
        let a = m(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let sol = solve_lyapunov(&a, &DMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(sol.p[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(sol.p[(1, 1)], 0.25, epsilon = 1e-12);
        assert_relative_eq!(sol.p[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        assert!(matches!(
            solve_lyapunov(&m(1, 1, &[1.0]), &m(1, 1, &[1.0])),
            Err(Error::NotHurwitz { .. })
        ));
    }

    #[test]
    fn lyapunov_rejects_indefinite_q() {
        let a = m(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        let q = m(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(solve_lyapunov(&a, &q), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn lyapunov_schur_path_matches_residual_contract() {
        // n > 50 exercises the Bartels-Stewart branch.
        let n = 60;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = -1.0 - i as f64 * 0.1;
            if i + 1 < n {
                a[(i, i + 1)] = 0.3;
                a[(i + 1, i)] = -0.2;
            }
        }
        let q = DMatrix::<f64>::identity(n, n);
        let sol = solve_lyapunov(&a, &q).unwrap();
        assert!(sol.residual_norm <= 1e-8 * (1.0 + q.norm()));
        let (pmin, _) = sym_eig_extrema(&sol.p).unwrap();
        assert!(pmin > 0.0);
    }

    #[test]
    fn trapezoid_matches_exponential() {
        let traj = integrate_lti(
            &m(1, 1, &[-1.0]),
            &DVector::from_row_slice(&[1.0]),
            1.0,
            1e-3,
        )
        .unwrap();
        let last = traj.states.last().unwrap()[0];
        assert!((last - (-1.0f64).exp()).abs() <= 1e-6);
        assert_relative_eq!(*traj.times.last().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trapezoid_zero_matrix_is_constant() {
        let traj = integrate_lti(
            &m(1, 1, &[0.0]),
            &DVector::from_row_slice(&[3.5]),
            1.0,
            0.1,
        )
        .unwrap();
        for s in &traj.states {
            assert_relative_eq!(s[0], 3.5);
        }
    }

    #[test]
    fn trapezoid_a_stable_on_stiff_scalar() {
        let traj = integrate_lti(
            &m(1, 1, &[-1e4]),
            &DVector::from_row_slice(&[1.0]),
            1.0,
            0.1,
        )
        .unwrap();
        for w in traj.states.windows(2) {
            assert!(w[1][0].abs() <= w[0][0].abs());
        }
    }

    #[test]
    fn trapezoid_rejects_singular_step() {
        // dt·λ = 2 makes I - (dt/2)A singular.
        let res = integrate_lti(
            &m(1, 1, &[2.0]),
            &DVector::from_row_slice(&[1.0]),
            10.0,
            1.0,
        );
        assert!(matches!(res, Err(Error::SingularSolve(_))));
    }

    #[test]
    fn eigvec_condition_of_normal_matrix_is_one() {
        let a = m(2, 2, &[-1.0, 0.0, 0.0, -4.0]);
        assert_relative_eq!(eigvec_condition(&a).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn eigvec_condition_grows_for_defective_like_matrices() {
        let a = m(2, 2, &[-1.0, 100.0, 0.0, -1.001]);
        assert!(eigvec_condition(&a).unwrap() > 1e3);
    }
}
