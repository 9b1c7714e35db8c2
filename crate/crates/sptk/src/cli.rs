//! JSON-config command front end: `decompose`, `certify`, `simulate`,
//! `sweep`.
//!
//! Reports go to stdout as JSON; trajectory and sweep data are CSV. With
//! `--out DIR` the artifacts are also written to files, atomically
//! (write-to-temp, rename-on-success). Exit codes: 0 success, 1 I/O or
//! validation error, 2 assumption violation or failed scaling verdict.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::certificate::{forwarding_functional, Certificate};
use crate::decomposition::{decompose, reduced_is_stable, Decomposition};
use crate::error::{Error, Result};
use crate::model::{
    build_from_matrices, build_heat1d, build_scalar_exemplar, full_generator, CoupledSystem,
    Profile,
};
use crate::numerics::integrate_lti;
use crate::tikhonov::{epsilon_sweep, perturbed_growth_bound, SweepMode};
use crate::{Matrix, Vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;

/// Slope band accepted as "O(eps)" by the sweep verdict.
pub const SLOPE_BAND: (f64, f64) = (0.75, 1.25);

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemConfig,
    #[serde(default)]
    pub certificate: Option<CertificateConfig>,
    #[serde(default)]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Scalar,
    Heat1d {
        modes: usize,
        diffusion: f64,
        input_profile: ProfileName,
        output_weight: ProfileName,
        #[serde(rename = "A2")]
        a2: Vec<Vec<f64>>,
        #[serde(rename = "B2")]
        b2: Vec<Vec<f64>>,
        #[serde(rename = "C1")]
        c1: Vec<Vec<f64>>,
    },
    Explicit {
        #[serde(rename = "A1")]
        a1: Vec<Vec<f64>>,
        #[serde(rename = "B1")]
        b1: Vec<Vec<f64>>,
        #[serde(rename = "C1")]
        c1: Vec<Vec<f64>>,
        #[serde(rename = "A2")]
        a2: Vec<Vec<f64>>,
        #[serde(rename = "B2")]
        b2: Vec<Vec<f64>>,
        #[serde(rename = "C2")]
        c2: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Constant,
    Bump,
}

impl From<ProfileName> for Profile {
    fn from(p: ProfileName) -> Profile {
        match p {
            ProfileName::Constant => Profile::Constant,
            ProfileName::Bump => Profile::Bump,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    #[serde(rename = "Q1", default)]
    pub q1: Option<Vec<Vec<f64>>>,
    #[serde(rename = "Q2", default)]
    pub q2: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub eps: f64,
    pub t_final: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    pub z0: Vec<f64>,
    pub w0: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub eps_values: Vec<f64>,
    pub mode: SweepModeName,
    #[serde(default = "default_ic_scale")]
    pub ic_scale: f64,
}

fn default_ic_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepModeName {
    StateScaling,
    TikhonovError,
}

impl From<SweepModeName> for SweepMode {
    fn from(m: SweepModeName) -> SweepMode {
        match m {
            SweepModeName::StateScaling => SweepMode::StateScaling,
            SweepModeName::TikhonovError => SweepMode::TikhonovError,
        }
    }
}

fn to_matrix(rows: &[Vec<f64>], name: &str) -> Result<Matrix> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Config(format!("matrix {name} must be non-empty")));
    }
    let ncols = rows[0].len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::Config(format!(
                "matrix {name}: row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        for &x in r {
            if !x.is_finite() {
                return Err(Error::Config(format!("matrix {name} contains a non-finite entry")));
            }
        }
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn mat_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

fn spectrum_json(m: &Matrix) -> Value {
    let mut eigs: Vec<(f64, f64)> =
        m.complex_eigenvalues().iter().map(|e| (e.re, e.im)).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Value::Array(eigs.iter().map(|(re, im)| json!([re, im])).collect())
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    let cfg: Config =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

pub fn build_system(cfg: &SystemConfig) -> Result<CoupledSystem<f64>> {
    match cfg {
        SystemConfig::Scalar => Ok(build_scalar_exemplar()),
        SystemConfig::Heat1d { modes, diffusion, input_profile, output_weight, a2, b2, c1 } => {
            let input: Profile = (*input_profile).into();
            let output: Profile = (*output_weight).into();
            build_heat1d(
                *modes,
                *diffusion,
                move |x| input.eval(x),
                move |x| output.eval(x),
                to_matrix(a2, "A2")?,
                to_matrix(b2, "B2")?,
                to_matrix(c1, "C1")?,
            )
        }
        SystemConfig::Explicit { a1, b1, c1, a2, b2, c2 } => build_from_matrices(
            to_matrix(a1, "A1")?,
            to_matrix(b1, "B1")?,
            to_matrix(c1, "C1")?,
            to_matrix(a2, "A2")?,
            to_matrix(b2, "B2")?,
            to_matrix(c2, "C2")?,
        ),
    }
}

fn certificate_inputs(cfg: &Config) -> Result<(Option<Matrix>, Option<Matrix>)> {
    match &cfg.certificate {
        None => Ok((None, None)),
        Some(c) => {
            let q1 = c.q1.as_ref().map(|m| to_matrix(m, "Q1")).transpose()?;
            let q2 = c.q2.as_ref().map(|m| to_matrix(m, "Q2")).transpose()?;
            Ok((q1, q2))
        }
    }
}

/// Maps an error to the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotHurwitz { .. }
        | Error::AssumptionViolated(_)
        | Error::CertificateUnusable(_) => EXIT_ASSUMPTION,
        _ => EXIT_ERROR,
    }
}

/// Formats a float with 17 significant digits, round-trip exact for f64.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    Ok(target)
}

fn emit_report(report: &Value, out: Option<&Path>, name: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    println!("{text}");
    if let Some(dir) = out {
        write_atomic(dir, name, &format!("{text}\n"))?;
    }
    Ok(())
}

/// `decompose`: prints M, Ã2, the quasi-steady map, both spectra and the
/// stability verdicts. Exit 2 when the reduced-order generator is unstable.
pub fn cmd_decompose(config_path: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let sys = build_system(&cfg.system)?;
    let dec = decompose(&sys)?;
    let assumption1 = reduced_is_stable(&dec);

    let mut report = json!({
        "M": mat_json(&dec.m),
        "A2_tilde": mat_json(&dec.a2_tilde),
        "quasi_steady_map": mat_json(&dec.quasi_steady_map),
        "spectrum_A1": spectrum_json(&sys.a1),
        "spectrum_A2_tilde": spectrum_json(&dec.a2_tilde),
        "assumption_reduced_order_stable": assumption1,
        "assumption_fast_block_stable": true,
    });
    if sys.b1.ncols() == 1 && sys.c2.nrows() == 1 {
        let gain = (&sys.c2
            * sys
                .a1
                .clone()
                .lu()
                .solve(&sys.b1)
                .ok_or_else(|| Error::SingularSolve("A1 solve failed".into()))?)[(0, 0)];
        report["coupling_scalar"] = json!(gain);
    }
    emit_report(&report, out, "report.json")?;
    Ok(if assumption1 { EXIT_OK } else { EXIT_ASSUMPTION })
}

/// `certify`: full certificate chain; prints `a1..a4`, `mu`, `beta`,
/// `lambda`, `eps_star` and the growth-bound cap `eps_max`.
pub fn cmd_certify(config_path: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let sys = build_system(&cfg.system)?;
    let dec = decompose(&sys)?;
    let (q1, q2) = certificate_inputs(&cfg)?;
    let cert = Certificate::synthesize(&sys, &dec, q1, q2)?;
    let (_, eps_max, k1, omega1) = perturbed_growth_bound(&sys, &dec, 0.0)?;

    let report = json!({
        "a1": cert.a1,
        "a2": cert.a2,
        "a3": cert.a3,
        "a4": cert.a4,
        "mu": cert.mu,
        "beta": cert.beta,
        "lambda": cert.lambda,
        "eps_star": cert.eps_star,
        "eps_max": if eps_max.is_finite() { json!(eps_max) } else { json!("inf") },
        "K1": k1,
        "omega1": omega1,
        "M_norm": cert.m_norm,
        "C1_norm": cert.c1_norm,
        "P2_A2_tilde_norm": cert.p2_a2t_norm,
        "P1": mat_json(&cert.p1),
        "P2": mat_json(&cert.p2),
        "Q2": mat_json(&cert.q2),
    });
    emit_report(&report, out, "report.json")?;
    Ok(EXIT_OK)
}

/// `simulate`: integrates the full closed loop and prints the trajectory as
/// CSV with the forwarding-functional column.
pub fn cmd_simulate(config_path: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let sim = cfg
        .simulation
        .as_ref()
        .ok_or_else(|| Error::Config("simulate requires a \"simulation\" section".into()))?;
    if sim.t_final <= 0.0 {
        return Err(Error::Config("simulation.t_final must be positive".into()));
    }
    if sim.eps <= 0.0 {
        return Err(Error::Config("simulation.eps must be positive".into()));
    }
    let sys = build_system(&cfg.system)?;
    let dec = decompose(&sys)?;
    let (q1, q2) = certificate_inputs(&cfg)?;
    let cert = Certificate::synthesize(&sys, &dec, q1, q2)?;
    if sim.eps >= cert.eps_star {
        eprintln!(
            "warning: eps = {} is not below eps_star = {}; stability is not certified",
            sim.eps, cert.eps_star
        );
    }

    let n_z = sys.n_z();
    let n_w = sys.n_w();
    if sim.z0.len() != n_z || sim.w0.len() != n_w {
        return Err(Error::Config(format!(
            "simulation ICs have dimensions ({}, {}), system expects ({}, {})",
            sim.z0.len(),
            sim.w0.len(),
            n_z,
            n_w
        )));
    }
    let dt = match sim.dt {
        Some(d) if d > 0.0 => d,
        Some(_) => return Err(Error::Config("simulation.dt must be positive".into())),
        None => (sim.eps / 20.0).min(sim.t_final / 2000.0),
    };

    let gen = full_generator(&sys, sim.eps)?;
    let mut eta0 = Vector::zeros(n_z + n_w);
    for (i, &v) in sim.z0.iter().enumerate() {
        eta0[i] = v;
    }
    for (i, &v) in sim.w0.iter().enumerate() {
        eta0[n_z + i] = v;
    }
    let traj = integrate_lti(&gen, &eta0, sim.t_final, dt)?;

    let mut csv = String::new();
    csv.push('t');
    for i in 1..=n_z {
        csv.push_str(&format!(",z_{i}"));
    }
    for i in 1..=n_w {
        csv.push_str(&format!(",w_{i}"));
    }
    csv.push_str(",Wfun\n");
    for k in 0..traj.len() {
        let z = traj.states[k].rows(0, n_z).clone_owned();
        let w = traj.states[k].rows(n_z, n_w).clone_owned();
        let wf = forwarding_functional(&cert, &dec, sim.eps, &z, &w)?;
        csv.push_str(&fmt17(traj.times[k]));
        for v in z.iter().chain(w.iter()) {
            csv.push(',');
            csv.push_str(&fmt17(*v));
        }
        csv.push(',');
        csv.push_str(&fmt17(wf));
        csv.push('\n');
    }

    match out {
        Some(dir) => {
            let path = write_atomic(dir, "trajectory.csv", &csv)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

/// `sweep`: runs the epsilon sweep and prints the JSON verdict; the per-eps
/// CSV goes to `--out DIR` (or stdout before the JSON when no directory is
/// given). Exit 2 when the fitted slope leaves the O(eps) band.
pub fn cmd_sweep(config_path: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep requires a \"sweep\" section".into()))?;
    if sw.eps_values.len() < 3 {
        return Err(Error::Config(
            "sweep.eps_values needs at least 3 entries (slope undefined otherwise)".into(),
        ));
    }
    let sys = build_system(&cfg.system)?;
    let dec = decompose(&sys)?;
    let (q1, q2) = certificate_inputs(&cfg)?;
    let cert = Certificate::synthesize(&sys, &dec, q1, q2)?;

    let n_z = sys.n_z();
    let n_w = sys.n_w();
    let scale = sw.ic_scale;
    let mode = sw.mode;
    // State-scaling mode probes how trajectories shrink with eps-proportional
    // ICs; the error mode keeps ICs fixed because the error variables start
    // at zero for any IC and eps-scaled ICs would double the observed rate.
    let ic_rule = move |eps: f64| {
        let amp = match mode {
            SweepModeName::StateScaling => eps * scale,
            SweepModeName::TikhonovError => scale,
        };
        (
            DVector::from_element(n_z, amp),
            DVector::from_element(n_w, amp),
        )
    };
    let result = epsilon_sweep(
        &sys,
        &dec,
        &cert,
        &sw.eps_values,
        &ic_rule,
        None,
        sw.mode.into(),
    )?;

    let mut csv = String::from("eps,metric\n");
    for (e, m) in result.eps_values.iter().zip(&result.metrics) {
        csv.push_str(&format!("{},{}\n", fmt17(*e), fmt17(*m)));
    }
    let pass = result.slope >= SLOPE_BAND.0 && result.slope <= SLOPE_BAND.1;
    let summary = json!({
        "slope": result.slope,
        "intercept": result.intercept,
        "mode": result.mode.as_str(),
        "pass": pass,
    });

    match out {
        Some(dir) => {
            write_atomic(dir, "sweep.csv", &csv)?;
            write_atomic(
                dir,
                "sweep_summary.json",
                &format!("{}\n", serde_json::to_string_pretty(&summary)?),
            )?;
        }
        None => print!("{csv}"),
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if pass { EXIT_OK } else { EXIT_ASSUMPTION })
}

/// Helpers shared with integration tests.
pub fn certificate_for(cfg: &Config) -> Result<(CoupledSystem<f64>, Decomposition<f64>, Certificate<f64>)> {
    let sys = build_system(&cfg.system)?;
    let dec = decompose(&sys)?;
    let (q1, q2) = certificate_inputs(cfg)?;
    let cert = Certificate::synthesize(&sys, &dec, q1, q2)?;
    Ok((sys, dec, cert))
}
