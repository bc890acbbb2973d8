//! Scenario execution and run directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::artifacts::{self, emit_plotdata, emit_spectrum, emit_trajectory, to_json, Table, CSV_SCHEMA};
use super::scenario::{RunKind, Scenario, VelocityPreset};
use crate::coupling::{assemble_a0, CoupledGenerator, RhoConstants};
use crate::error::{FsiError, Result};
use crate::evolution::data::INITIAL_DATA_TOL;
use crate::evolution::{
    linear_estimate, nonlinear_residual, solve_linear, solve_nonlinear, validate_initial_data,
    z_map_norm_at_zero, ForcingPair, InitialData, LinearEstimate, InitialDiagnostics,
    NonlinearResidual, TrajectoryRecord,
};
use crate::geometry::{FluidField, CONTACT_TOL};
use crate::lab::sweeps::{GEVREY_SLOPE_TOL, V_SLOPE_TOL, BOUNDED_SLOPE};
use crate::lab::{
    battery_wkp, check_commutator, sweep_gevrey, sweep_v, sweep_vtilde, SweepReport, REPORT_SCHEMA,
};
use crate::stokes::ReferenceDomain;
use crate::C64;

pub const MANIFEST_SCHEMA: &str = "fsi-strip.manifest/1";
pub const ERROR_SCHEMA: &str = "fsi-strip.error/1";
pub const RUN_REPORT_SCHEMA: &str = "fsi-strip.run/1";
/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "FSI_THREADS";

/// Command-line overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub kind: Option<RunKind>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub package: String,
    pub version: String,
    pub schemas: BTreeMap<String, String>,
    pub kind: Option<RunKind>,
    pub seed: Option<u64>,
    /// Hash of the resolved scenario as written to `scenario.toml`.
    pub scenario_sha256: String,
    pub tolerances: BTreeMap<String, f64>,
    pub status: String,
    pub files: Vec<FileRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub schema: String,
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
    pub details: serde_json::Value,
}

impl ErrorRecord {
    pub fn from_error(e: &FsiError) -> Self {
        let details = match e {
            FsiError::Contact { min_gap, at_s, time } => serde_json::json!({
                "min_gap": min_gap,
                "at_s": if at_s.is_finite() { Some(*at_s) } else { None },
                "time": time,
            }),
            FsiError::NonConvergence {
                iterations,
                last,
                history,
            } => serde_json::json!({
                "iterations": iterations,
                "last": last,
                "history": history,
            }),
            _ => serde_json::Value::Null,
        };
        ErrorRecord {
            schema: ERROR_SCHEMA.into(),
            kind: e.kind().into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
            details,
        }
    }
}

/// Result of a finished run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    /// Overall pass/fail of the embedded checks, when the run kind has any.
    pub verdict: Option<bool>,
    pub exit_code: i32,
    pub error: Option<ErrorRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn tolerances(sc: Option<&Scenario>) -> BTreeMap<String, f64> {
    let mut t = BTreeMap::from([
        ("gevrey_slope".to_string(), GEVREY_SLOPE_TOL),
        ("v_slope".to_string(), V_SLOPE_TOL),
        ("bounded_slope".to_string(), BOUNDED_SLOPE),
        ("contact".to_string(), CONTACT_TOL),
        ("initial_data".to_string(), INITIAL_DATA_TOL),
    ]);
    if let Some(sc) = sc {
        t.insert("fp_tol".into(), sc.evolution.fp_tol);
    }
    t
}

/// Files of a run, held in memory until written.
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    verdict: Option<bool>,
}

impl Artifacts {
    fn new() -> Self {
        Artifacts {
            files: vec![],
            verdict: None,
        }
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        self.files.push((name.into(), to_json(v)?.into_bytes()));
        Ok(())
    }

    fn table(&mut self, t: &Table) -> Result<()> {
        self.files.push((format!("{}.csv", t.name), t.to_csv()?.into_bytes()));
        Ok(())
    }
}

#[derive(Serialize)]
struct LinearReport<'a> {
    schema: &'a str,
    kind: &'a str,
    steps: usize,
    dt: f64,
    horizon: f64,
    initial: InitialDiagnostics,
    final_energy: f64,
    energy_nonincreasing: Option<bool>,
    max_mass: f64,
    min_gap: f64,
    max_divergence: f64,
    estimate: LinearEstimate,
    verdict: bool,
}

#[derive(Serialize)]
struct NonlinearReport<'a> {
    schema: &'a str,
    kind: &'a str,
    steps: usize,
    horizon: f64,
    requested_horizon: f64,
    halvings: usize,
    iterations: usize,
    history: Vec<f64>,
    forcing_norm: f64,
    z_map_norm_at_zero: f64,
    residual: NonlinearResidual,
    min_gap: f64,
    verdict: bool,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    schema: &'a str,
    kind: &'a str,
    dim: usize,
    spectral_abscissa: f64,
    max_abs: f64,
    verdict: bool,
}

fn build_domain(sc: &Scenario) -> Result<ReferenceDomain> {
    ReferenceDomain::new(&sc.config, &sc.reference_deflection())
}

fn initial_data(sc: &Scenario, rd: &ReferenceDomain) -> Result<InitialData> {
    let cfg = &sc.config;
    let eta1 = match &sc.initial.eta1 {
        Some(p) => p.build(cfg, sc.seed),
        None => sc.reference_deflection(),
    };
    let eta2 = sc.initial.eta2.build(cfg, sc.seed);
    match sc.initial.velocity {
        VelocityPreset::Lifted => InitialData::with_lifted_velocity(rd, eta1, eta2),
        VelocityPreset::Zero => Ok(InitialData {
            w0: FluidField::zeros(rd.grid()),
            eta1,
            eta2,
        }),
    }
}

fn trajectory_summary(traj: &TrajectoryRecord) -> (f64, f64, f64) {
    let mass = traj.mass.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = traj.min_gap.iter().copied().fold(f64::INFINITY, f64::min);
    let div = traj.divergence.iter().fold(0.0f64, |m, x| m.max(*x));
    (mass, gap, div)
}

fn energy_nonincreasing(traj: &TrajectoryRecord) -> bool {
    traj.energy
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300)
}

fn run_linear(sc: &Scenario, rd: &ReferenceDomain, gen: &CoupledGenerator, a: &mut Artifacts) -> Result<()> {
    let data = initial_data(sc, rd)?;
    let initial = validate_initial_data(rd, &data)?;
    let cfg = &sc.evolution;
    let forcing = match &sc.initial.beam_forcing {
        Some(p) => {
            let g = p.build(&sc.config, sc.seed);
            let zero = FluidField::zeros(rd.grid());
            ForcingPair {
                times: vec![0.0, cfg.horizon],
                fluid: vec![zero.clone(), zero],
                beam: vec![g.clone(), g],
            }
        }
        None => ForcingPair::zero(),
    };
    let traj = solve_linear(rd, gen, &data, &forcing, cfg)?;
    let (steps, dt) = cfg.steps_for(cfg.horizon);
    let (max_mass, min_gap, max_div) = trajectory_summary(&traj);
    let mono = forcing.is_zero().then(|| energy_nonincreasing(&traj));
    let verdict = mono.unwrap_or(true) && min_gap >= CONTACT_TOL;
    let report = LinearReport {
        schema: RUN_REPORT_SCHEMA,
        kind: sc.kind.name(),
        steps,
        dt,
        horizon: cfg.horizon,
        initial,
        final_energy: *traj.energy.last().unwrap_or(&0.0),
        energy_nonincreasing: mono,
        max_mass,
        min_gap,
        max_divergence: max_div,
        estimate: linear_estimate(rd, &traj, &data),
        verdict,
    };
    a.verdict = Some(verdict);
    a.json("report.json", &report)?;
    for t in emit_trajectory(&traj) {
        a.table(&t)?;
    }
    a.files.push((
        "state.bin".into(),
        artifacts::encode_state(*traj.times.last().unwrap_or(&0.0), traj.final_state()),
    ));
    Ok(())
}

fn run_nonlinear(sc: &Scenario, rd: &ReferenceDomain, gen: &CoupledGenerator, a: &mut Artifacts) -> Result<()> {
    let data = initial_data(sc, rd)?;
    let cfg = &sc.evolution;
    let out = solve_nonlinear(rd, gen, &data, cfg)?;
    let residual = nonlinear_residual(rd, gen, &out.trajectory, cfg.nonlinear)?;
    let z0 = z_map_norm_at_zero(rd, gen, &data, cfg, out.horizon)?;
    let (_, min_gap, _) = trajectory_summary(&out.trajectory);
    let verdict = out.iterations <= cfg.fp_max_iter;
    let report = NonlinearReport {
        schema: RUN_REPORT_SCHEMA,
        kind: sc.kind.name(),
        steps: out.trajectory.len().saturating_sub(1),
        horizon: out.horizon,
        requested_horizon: cfg.horizon,
        halvings: out.halvings,
        iterations: out.iterations,
        history: out.history.clone(),
        forcing_norm: out.forcing_norm,
        z_map_norm_at_zero: z0,
        residual,
        min_gap,
        verdict,
    };
    a.verdict = Some(verdict);
    a.json("report.json", &report)?;
    for t in emit_trajectory(&out.trajectory) {
        a.table(&t)?;
    }
    a.files.push((
        "state.bin".into(),
        artifacts::encode_state(out.horizon, out.trajectory.final_state()),
    ));
    Ok(())
}

fn run_sweep(sc: &Scenario, rd: &ReferenceDomain, a: &mut Artifacts) -> Result<()> {
    let sw = &sc.sweep;
    let report: SweepReport = match sc.kind {
        RunKind::SweepGevrey => {
            let gen = assemble_a0(rd)?;
            sweep_gevrey(&gen, rd, sw.line, sw.band, sw.samples)?
        }
        RunKind::SweepV | RunKind::SweepVtilde => {
            let rho = RhoConstants::estimate(
                &rd.sys,
                C64::new(0.0, sw.rho_tau),
                &[sw.line.point(sw.band.lo), sw.line.point(sw.band.hi)],
            )?;
            if sc.kind == RunKind::SweepV {
                sweep_v(rd, &rho, &sw.pairs(), sw.line, sw.band, sw.samples)?
            } else {
                sweep_vtilde(rd, &rho, &sw.pairs(), sw.line, sw.band, sw.samples)?
            }
        }
        RunKind::CheckCommutator => {
            check_commutator(rd, sw.line, sw.band, sw.samples, sw.epsilon, sc.seed)?
        }
        RunKind::Battery => battery_wkp(rd, &sw.battery, sw.line, sw.band, sw.samples)?,
        _ => unreachable!("not a sweep kind"),
    };
    a.verdict = Some(report.verdict);
    a.json("report.json", &report)?;
    for t in emit_plotdata(&report) {
        a.table(&t)?;
    }
    Ok(())
}

fn run_spectrum(sc: &Scenario, rd: &ReferenceDomain, a: &mut Artifacts) -> Result<()> {
    let gen = assemble_a0(rd)?;
    let eigs = gen.spectrum()?;
    let abscissa = eigs.first().map_or(f64::NEG_INFINITY, |z| z.re);
    let report = SpectrumReport {
        schema: RUN_REPORT_SCHEMA,
        kind: sc.kind.name(),
        dim: gen.dim(),
        spectral_abscissa: abscissa,
        max_abs: eigs.iter().fold(0.0f64, |m, z| m.max(z.norm())),
        verdict: abscissa < 0.0,
    };
    a.verdict = Some(report.verdict);
    a.json("report.json", &report)?;
    a.table(&emit_spectrum(&eigs))?;
    a.files.push(("a0.bin".into(), artifacts::encode_matrix(&gen.a0.entries)));
    Ok(())
}

/// Compute every artifact of a validated scenario in memory.
fn execute(sc: &Scenario) -> Result<Artifacts> {
    let mut a = Artifacts::new();
    let rd = build_domain(sc)?;
    match sc.kind {
        RunKind::SimulateLinear | RunKind::SimulateNonlinear => {
            let gen = assemble_a0(&rd)?;
            if sc.kind == RunKind::SimulateLinear {
                run_linear(sc, &rd, &gen, &mut a)?;
            } else {
                run_nonlinear(sc, &rd, &gen, &mut a)?;
            }
        }
        RunKind::Spectrum => run_spectrum(sc, &rd, &mut a)?,
        _ => run_sweep(sc, &rd, &mut a)?,
    }
    Ok(a)
}

/// Create a fresh directory `root/stem`, `root/stem-2`, ... without ever
/// reusing an existing one.
pub fn fresh_dir(root: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(root).map_err(|e| FsiError::io(root, e))?;
    for i in 1.. {
        let name = if i == 1 {
            stem.to_string()
        } else {
            format!("{stem}-{i}")
        };
        let p = root.join(name);
        match std::fs::create_dir(&p) {
            Ok(()) => return Ok(p),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(FsiError::io(&p, e)),
        }
    }
    unreachable!()
}

fn write_run(
    dir: &Path,
    sc: Option<&Scenario>,
    scenario_text: &[u8],
    files: &[(String, Vec<u8>)],
    status: &str,
) -> Result<()> {
    let mut records = vec![];
    for (name, bytes) in files {
        artifacts::write_bytes(&dir.join(name), bytes)?;
        records.push(FileRecord {
            name: name.clone(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        package: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schemas: BTreeMap::from([
            ("report".to_string(), REPORT_SCHEMA.to_string()),
            ("run".to_string(), RUN_REPORT_SCHEMA.to_string()),
            ("csv".to_string(), CSV_SCHEMA.to_string()),
            ("error".to_string(), ERROR_SCHEMA.to_string()),
            ("binary".to_string(), artifacts::BINARY_VERSION.to_string()),
        ]),
        kind: sc.map(|s| s.kind),
        seed: sc.map(|s| s.seed),
        scenario_sha256: sha256_hex(scenario_text),
        tolerances: tolerances(sc),
        status: status.into(),
        files: records,
    };
    artifacts::write_bytes(&dir.join("manifest.json"), to_json(&manifest)?.as_bytes())
}

fn resolve(text: &str, opts: &RunOptions) -> Result<Scenario> {
    let mut sc: Scenario = toml::from_str(text).map_err(|e| FsiError::Parse(e.to_string()))?;
    if let Some(k) = opts.kind {
        sc.kind = k;
    }
    if let Some(s) = opts.seed {
        sc.seed = s;
    }
    if let Some(o) = &opts.out {
        sc.out = Some(o.clone());
    }
    sc.validate()?;
    Ok(sc)
}

/// Parse, validate and execute a scenario given as TOML text. Artifacts go
/// to a new directory under the scenario's (or the overriding) output root;
/// failures leave `error.json` there and return the matching exit code.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<RunOutcome> {
    let default_root = PathBuf::from("runs");
    let sc = match resolve(text, opts) {
        Ok(sc) => sc,
        Err(e) => {
            let root = opts.out.clone().unwrap_or(default_root);
            let dir = fresh_dir(&root, &format!("invalid-{}", &sha256_hex(text.as_bytes())[..12]))?;
            let rec = ErrorRecord::from_error(&e);
            let files = vec![
                ("scenario.toml".to_string(), text.as_bytes().to_vec()),
                ("error.json".to_string(), to_json(&rec)?.into_bytes()),
            ];
            write_run(&dir, None, text.as_bytes(), &files, "error")?;
            return Ok(RunOutcome {
                dir,
                verdict: None,
                exit_code: rec.exit_code,
                error: Some(rec),
            });
        }
    };
    let resolved = sc.to_toml_string()?;
    let hash = sha256_hex(resolved.as_bytes());
    let root = sc.out.clone().unwrap_or(default_root);
    let dir = fresh_dir(&root, &format!("{}-{}-s{}", sc.kind, &hash[..12], sc.seed))?;
    let mut files = vec![("scenario.toml".to_string(), resolved.clone().into_bytes())];
    match execute(&sc) {
        Ok(a) => {
            files.extend(a.files);
            write_run(&dir, Some(&sc), resolved.as_bytes(), &files, "ok")?;
            Ok(RunOutcome {
                dir,
                verdict: a.verdict,
                exit_code: 0,
                error: None,
            })
        }
        Err(e) => {
            let rec = ErrorRecord::from_error(&e);
            files.push(("error.json".to_string(), to_json(&rec)?.into_bytes()));
            write_run(&dir, Some(&sc), resolved.as_bytes(), &files, "error")?;
            Ok(RunOutcome {
                dir,
                verdict: None,
                exit_code: rec.exit_code,
                error: Some(rec),
            })
        }
    }
}

/// [`run_text`] on a scenario file.
pub fn run_file(path: impl AsRef<Path>, opts: &RunOptions) -> Result<RunOutcome> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| FsiError::io(path, e))?;
    run_text(&text, opts)
}
