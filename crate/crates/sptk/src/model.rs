//! Coupled fast/slow system instances and the full closed-loop generator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{spectral_abscissa, HURWITZ_MARGIN};
use crate::scalar::{cvt, RealScalar};

/// Number of panels for the composite-Simpson inner products of the heat
/// builder; spectral profiles are smooth, so this reaches ~1e-9 accuracy.
const SIMPSON_PANELS: usize = 1024;

/// Coupled system
///
/// ```text
///   eps * dz/dt = A1 z + B1 C1 w      z ∈ R^{n_z}
///         dw/dt = A2 w + B2 C2 z      w ∈ R^{n_w}
/// ```
///
/// `A1` is required to be Hurwitz at construction; the decomposition and
/// certificate layers rely on its invertibility.
#[derive(Debug, Clone)]
pub struct CoupledSystem<T: RealScalar> {
    pub a1: DMatrix<T>,
    pub b1: DMatrix<T>,
    pub c1: DMatrix<T>,
    pub a2: DMatrix<T>,
    pub b2: DMatrix<T>,
    pub c2: DMatrix<T>,
    pub label: Option<String>,
}

impl<T: RealScalar> CoupledSystem<T> {
    pub fn n_z(&self) -> usize {
        self.a1.nrows()
    }

    pub fn n_w(&self) -> usize {
        self.a2.nrows()
    }
}

/// Sampled trajectory: a strictly increasing time grid, one state per sample
/// and an optional scalar functional per sample.
#[derive(Debug, Clone)]
pub struct Trajectory<T: RealScalar> {
    pub times: Vec<T>,
    pub states: Vec<DVector<T>>,
    pub functional: Option<Vec<T>>,
}

impl<T: RealScalar> Trajectory<T> {
    pub fn new(
        times: Vec<T>,
        states: Vec<DVector<T>>,
        functional: Option<Vec<T>>,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "trajectory has {} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::InvalidParameter("trajectory needs at least one sample".into()));
        }
        for pair in times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::InvalidParameter("trajectory times must be strictly increasing".into()));
            }
        }
        let dim = states[0].len();
        if states.iter().any(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch("trajectory states have mixed dimensions".into()));
        }
        if let Some(f) = &functional {
            if f.len() != times.len() {
                return Err(Error::DimensionMismatch("trajectory functional length mismatch".into()));
            }
        }
        Ok(Self { times, states, functional })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }
}

/// Validates dimensions and the Hurwitz requirement on `A1`, then builds the
/// system.
pub fn build_from_matrices<T: RealScalar>(
    a1: DMatrix<T>,
    b1: DMatrix<T>,
    c1: DMatrix<T>,
    a2: DMatrix<T>,
    b2: DMatrix<T>,
    c2: DMatrix<T>,
) -> Result<CoupledSystem<T>> {
    let n_z = a1.nrows();
    let n_w = a2.nrows();
    if !a1.is_square() {
        return Err(Error::DimensionMismatch("A1 must be square".into()));
    }
    if !a2.is_square() {
        return Err(Error::DimensionMismatch("A2 must be square".into()));
    }
    if n_z == 0 || n_w == 0 {
        return Err(Error::DimensionMismatch("state dimensions must be at least 1".into()));
    }
    let m1 = b1.ncols();
    let m2 = b2.ncols();
    if m1 == 0 || m2 == 0 {
        return Err(Error::DimensionMismatch("input dimensions must be at least 1".into()));
    }
    if b1.nrows() != n_z {
        return Err(Error::DimensionMismatch(format!(
            "B1 has {} rows, expected n_z = {}",
            b1.nrows(),
            n_z
        )));
    }
    if c1.nrows() != m1 || c1.ncols() != n_w {
        return Err(Error::DimensionMismatch(format!(
            "C1 is {}x{}, expected {}x{}",
            c1.nrows(),
            c1.ncols(),
            m1,
            n_w
        )));
    }
    if b2.nrows() != n_w {
        return Err(Error::DimensionMismatch(format!(
            "B2 has {} rows, expected n_w = {}",
            b2.nrows(),
            n_w
        )));
    }
    if c2.nrows() != m2 || c2.ncols() != n_z {
        return Err(Error::DimensionMismatch(format!(
            "C2 is {}x{}, expected {}x{}",
            c2.nrows(),
            c2.ncols(),
            m2,
            n_z
        )));
    }
    let abscissa = spectral_abscissa(&a1);
    if abscissa >= cvt(HURWITZ_MARGIN) {
        return Err(Error::NotHurwitz {
            abscissa: abscissa.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(CoupledSystem { a1, b1, c1, a2, b2, c2, label: None })
}

/// Profile on (0,1) used by the spectral heat builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// b(x) = 1
    Constant,
    /// b(x) = exp(-100 (x - 1/2)²), a smooth bump exciting all sine modes.
    Bump,
}

impl Profile {
    pub fn eval<T: RealScalar>(self, x: T) -> T {
        match self {
            Profile::Constant => T::one(),
            Profile::Bump => {
                let d = x - cvt::<T>(0.5);
                (-cvt::<T>(100.0) * d * d).exp()
            }
        }
    }
}

/// Spectral Galerkin truncation of the 1-D Dirichlet heat equation coupled to
/// a given slow system.
///
/// In the orthonormal sine basis `√2 sin(kπx)` the fast block is
/// `A1 = diag(-ν k² π²)`; `B1` holds the modal coefficients of the input
/// profile and `C2` those of the output weight, both by composite Simpson
/// quadrature.
pub fn build_heat1d<T: RealScalar>(
    modes: usize,
    diffusion: T,
    input_profile: impl Fn(T) -> T,
    output_weight: impl Fn(T) -> T,
    a2: DMatrix<T>,
    b2: DMatrix<T>,
    c1: DMatrix<T>,
) -> Result<CoupledSystem<T>> {
    if modes == 0 {
        return Err(Error::InvalidParameter("build_heat1d: modes must be at least 1".into()));
    }
    if diffusion <= T::zero() {
        return Err(Error::InvalidParameter("build_heat1d: diffusion must be positive".into()));
    }
    let pi = T::pi();
    let mut a1 = DMatrix::<T>::zeros(modes, modes);
    let mut b1 = DMatrix::<T>::zeros(modes, 1);
    let mut c2 = DMatrix::<T>::zeros(1, modes);
    let sqrt2 = cvt::<T>(2.0).sqrt();
    for k in 1..=modes {
        let kf = cvt::<T>(k as f64);
        a1[(k - 1, k - 1)] = -diffusion * kf * kf * pi * pi;
        b1[(k - 1, 0)] = simpson(|x| input_profile(x) * sqrt2 * (kf * pi * x).sin());
        c2[(0, k - 1)] = simpson(|x| output_weight(x) * sqrt2 * (kf * pi * x).sin());
    }
    let mut sys = build_from_matrices(a1, b1, c1, a2, b2, c2)?;
    sys.label = Some(format!("heat1d(modes={modes})"));
    Ok(sys)
}

/// Canonical scalar test instance: A1=[-1], B1=[1], C1=[1], A2=[-2], B2=[1],
/// C2=[1].
pub fn build_scalar_exemplar<T: RealScalar>() -> CoupledSystem<T> {
    let one = DMatrix::from_element(1, 1, T::one());
    let mut sys = build_from_matrices(
        DMatrix::from_element(1, 1, -T::one()),
        one.clone(),
        one.clone(),
        DMatrix::from_element(1, 1, cvt::<T>(-2.0)),
        one.clone(),
        one,
    )
    .expect("scalar exemplar is always valid");
    sys.label = Some("scalar".into());
    sys
}

/// Full closed-loop generator `[[A1/eps, B1 C1/eps], [B2 C2, A2]]`.
pub fn full_generator<T: RealScalar>(sys: &CoupledSystem<T>, eps: T) -> Result<DMatrix<T>> {
    if eps <= T::zero() {
        return Err(Error::InvalidParameter("full_generator: eps must be positive".into()));
    }
    let n_z = sys.n_z();
    let n_w = sys.n_w();
    let inv = T::one() / eps;
    let mut g = DMatrix::<T>::zeros(n_z + n_w, n_z + n_w);
    g.view_mut((0, 0), (n_z, n_z)).copy_from(&(&sys.a1 * inv));
    g.view_mut((0, n_z), (n_z, n_w))
        .copy_from(&(&sys.b1 * &sys.c1 * inv));
    g.view_mut((n_z, 0), (n_w, n_z))
        .copy_from(&(&sys.b2 * &sys.c2));
    g.view_mut((n_z, n_z), (n_w, n_w)).copy_from(&sys.a2);
    Ok(g)
}

/// Composite Simpson quadrature of `f` over [0,1] with a fixed uniform grid.
fn simpson<T: RealScalar>(f: impl Fn(T) -> T) -> T {
    let n = SIMPSON_PANELS;
    let h = T::one() / cvt::<T>(n as f64);
    let mut acc = f(T::zero()) + f(T::one());
    for i in 1..n {
        let x = cvt::<T>(i as f64) * h;
        let w = if i % 2 == 1 { cvt::<T>(4.0) } else { cvt::<T>(2.0) };
        acc += w * f(x);
    }
    acc * h / cvt::<T>(3.0)
}
