//! End-to-end runs: configuration, per-sample evolution and amplification,
//! classical comparison, resource accounting and artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplification::{
    amplify_and_measure, reflection_zero, schedule_for, state_preparation, RoaaMode, RoaaSchedule, SUCCESS_FLOOR,
};
use crate::circuit::{Circuit, CostModel};
use crate::error::{Error, Result};
use crate::evolution::{be_exp_with, EvolutionEncoding, ALPHA_HS};
use crate::hamiltonian::{be_hamiltonian, be_shifted, HamiltonianEncoding, ShiftedEncoding, HAMILTONIAN_LABEL};
use crate::incidence::be_b;
use crate::oscillator::{
    build_matrices, encode_initial, read_velocities, recover_displacement, relative_error, rescale, rk4_solve,
    Boundary, ClassicalState, EncodedState, OscillatorSystem, ScaleFactors, Trajectory,
};
use crate::qsvt::{DegreePlan, PhaseCache};

fn default_epsilon() -> f64 {
    0.01
}
fn default_rk4_step() -> f64 {
    1e-3
}
fn default_floor() -> f64 {
    SUCCESS_FLOOR
}

/// Chain description. Masses in kg, springs in N/m; either list may be
/// omitted for unit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    #[serde(default)]
    pub masses: Option<Vec<f64>>,
    /// `n − 1` entries for open chains, `n` for closed ones.
    #[serde(default)]
    pub springs: Option<Vec<f64>>,
    pub boundary: Boundary,
}

/// Run description; times in seconds, displacements in metres, velocities
/// in m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub system: SystemSpec,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
    #[serde(default)]
    pub t_i: f64,
    pub t_f: f64,
    pub dt: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub roaa: RoaaMode,
    #[serde(default = "default_floor")]
    pub success_floor: f64,
    /// Internal step of the classical reference integrator.
    #[serde(default = "default_rk4_step")]
    pub rk4_step: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Concurrent timesteps; `None` uses every core.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub phase_cache: Option<PathBuf>,
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SimulationConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.system.n;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if (self.t_f - self.t_i).is_nan() || self.t_f < self.t_i {
            return bad(format!("t_f = {} precedes t_i = {}", self.t_f, self.t_i));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if self.rk4_step.is_nan() || self.rk4_step <= 0.0 {
            return bad(format!("rk4_step must be positive, got {}", self.rk4_step));
        }
        if self.x0.len() != n || self.v0.as_ref().is_some_and(|v| v.len() != n) {
            return bad(format!("initial vectors must have {n} components"));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn masses(&self) -> Vec<f64> {
        self.system.masses.clone().unwrap_or_else(|| vec![1.0; self.system.n])
    }

    pub fn springs(&self) -> Vec<f64> {
        self.system.springs.clone().unwrap_or_else(|| {
            let count = match self.system.boundary {
                Boundary::Open => self.system.n.saturating_sub(1),
                Boundary::Closed => self.system.n,
            };
            vec![1.0; count]
        })
    }

    pub fn v0(&self) -> Vec<f64> {
        self.v0.clone().unwrap_or_else(|| vec![0.0; self.system.n])
    }

    /// `t_i + jΔt` for `j = 0..=M` with `M = ⌊(t_f − t_i)/Δt⌋`.
    pub fn sample_times(&self) -> Vec<f64> {
        let m = ((self.t_f - self.t_i) / self.dt + 1e-9).floor() as usize;
        (0..=m).map(|j| self.t_i + j as f64 * self.dt).collect()
    }
}

/// Gate counts keyed `KIND/controls`.
pub type Histogram = BTreeMap<String, usize>;

fn histogram(c: &Circuit) -> Histogram {
    c.count_gates().counts.into_iter().map(|((k, m), n)| (format!("{k}/{m}"), n)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StepResources {
    pub t: f64,
    pub plan: DegreePlan,
    pub cu_h_calls: usize,
    pub hadamards: usize,
    pub gates: Histogram,
    /// Elementary gates of one evolution query.
    pub evolution_estimate: f64,
    /// `Q_AA` queries plus reflections and state preparation.
    pub step_estimate: f64,
    pub cos_error: f64,
    pub sin_error: f64,
    pub wall_clock_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourceReport {
    pub signal_qubits: usize,
    /// Includes the LCU wire and the QSVT scratch wire.
    pub ancilla_qubits: usize,
    pub qubit_total: usize,
    pub alpha_h: f64,
    pub q_w: usize,
    pub q_aa: usize,
    pub predicted_success: f64,
    pub steps: Vec<StepResources>,
    /// Sum of per-step estimates over all samples.
    pub total_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepOutcome {
    pub t: f64,
    pub pre_probability: f64,
    pub probability: f64,
    pub predicted_success: f64,
    /// Largest amplitude on padded indices.
    pub padded_leak: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub trajectory: Trajectory,
    pub steps: Vec<StepOutcome>,
    pub resources: ResourceReport,
    pub scale: ScaleFactors,
}

/// Everything shared by the per-sample jobs.
struct Prepared {
    sys: OscillatorSystem,
    physical: OscillatorSystem,
    scale: ScaleFactors,
    h: HamiltonianEncoding,
    shifted: ShiftedEncoding,
    psi0: EncodedState,
    prep: Circuit,
    schedule: RoaaSchedule,
    cache: Option<PhaseCache>,
    cost: CostModel,
}

fn prepare(config: &SimulationConfig) -> Result<Prepared> {
    config.validate()?;
    let (masses, springs) = (config.masses(), config.springs());
    let physical = OscillatorSystem::new(masses.clone(), springs.clone(), config.system.boundary)?;
    let (sys, scale) = rescale(&masses, &springs, config.system.boundary)?;
    let mats = build_matrices(&sys);
    let tf = scale.time_factor();
    let v_scaled: Vec<f64> = config.v0().iter().map(|v| v / tf).collect();
    let psi0 = encode_initial(&sys, &mats, &ClassicalState { x: config.x0.clone(), v: v_scaled, t: 0.0 })?;
    let h = be_hamiltonian(&be_b(&sys)?)?;
    let shifted = be_shifted(&h)?;
    let prep = state_preparation(&psi0.amplitudes)?;
    let schedule = schedule_for(config.roaa, ALPHA_HS, 1.0)?;
    let cache = config.phase_cache.as_ref().map(PhaseCache::new).transpose()?;
    Ok(Prepared { sys, physical, scale, h, shifted, psi0, prep, schedule, cache, cost: CostModel::default() })
}

impl Prepared {
    fn evolution(&self, config: &SimulationConfig, t: f64) -> Result<EvolutionEncoding> {
        let s = (t - config.t_i) * self.scale.time_factor();
        be_exp_with(&self.h, &self.shifted, s, config.epsilon, self.cache.as_ref())
    }

    fn step_resources(&self, t: f64, ev: &EvolutionEncoding, wall: Option<f64>) -> StepResources {
        let a = ev.be.ancillas;
        let width = ev.be.width();
        let per_query = self.cost.estimate(&ev.be.circuit);
        let reflections = self.cost.estimate(&reflection_zero(a)) + self.cost.estimate(&reflection_zero(width));
        let prep = self.cost.estimate(&self.prep);
        let q_w = self.schedule.iterations as f64;
        let hist = ev.be.circuit.count_gates();
        StepResources {
            t,
            plan: ev.plan,
            cu_h_calls: ev.be.circuit.call_count(HAMILTONIAN_LABEL),
            hadamards: hist.total_of("H"),
            gates: histogram(&ev.be.circuit),
            evolution_estimate: per_query,
            step_estimate: self.schedule.queries() as f64 * per_query + q_w * (reflections + 2.0 * prep) + prep,
            cos_error: ev.cos_phases.achieved_error,
            sin_error: ev.sin_phases.achieved_error,
            wall_clock_s: wall,
        }
    }

    fn report(&self, steps: Vec<StepResources>) -> ResourceReport {
        let signal_qubits = self.psi0.qubits();
        let ancilla_qubits = self.h.be.ancillas + 3;
        ResourceReport {
            signal_qubits,
            ancilla_qubits,
            qubit_total: signal_qubits + ancilla_qubits,
            alpha_h: self.h.be.alpha,
            q_w: self.schedule.iterations,
            q_aa: self.schedule.queries(),
            predicted_success: self.schedule.predicted_success,
            total_estimate: steps.iter().map(|s| s.step_estimate).sum(),
            steps,
        }
    }
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn step_error(t: f64) -> impl Fn(Error) -> Error {
    move |e| Error::Step { time: t, source: Box::new(e) }
}

/// Builds every sample's circuits and evaluates the cost model without
/// simulating.
pub fn report_resources(config: &SimulationConfig) -> Result<ResourceReport> {
    let p = prepare(config)?;
    let times = config.sample_times();
    let steps = with_pool(config.workers, || {
        times
            .par_iter()
            .map(|&t| {
                let ev = p.evolution(config, t).map_err(step_error(t))?;
                Ok(p.step_resources(t, &ev, None))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(p.report(steps))
}

/// Runs every sample from the initial state and compares with RK4.
pub fn run(config: &SimulationConfig) -> Result<RunResult> {
    let p = prepare(config)?;
    let times = config.sample_times();
    let n = p.sys.len();
    let dim = p.sys.padded_len();
    let tf = p.scale.time_factor();
    let jobs = with_pool(config.workers, || {
        times
            .par_iter()
            .map(|&t| {
                let started = Instant::now();
                let ev = p.evolution(config, t).map_err(step_error(t))?;
                let out = amplify_and_measure(&ev, &p.prep, &p.schedule, config.success_floor, p.psi0.norm)
                    .map_err(step_error(t))?;
                let v: Vec<f64> = read_velocities(&p.sys, &out.state.amplitudes, p.psi0.norm)
                    .into_iter()
                    .map(|v| v * tf)
                    .collect();
                let padded_leak = (n..dim)
                    .flat_map(|j| [j, dim + j])
                    .map(|j| out.state.amplitudes[j].norm())
                    .fold(0.0, f64::max);
                let outcome = StepOutcome {
                    t,
                    pre_probability: out.pre_probability,
                    probability: out.probability,
                    predicted_success: out.predicted_success,
                    padded_leak,
                };
                let res = p.step_resources(t, &ev, Some(started.elapsed().as_secs_f64()));
                Ok((v, outcome, res))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut v_quantum = Vec::with_capacity(jobs.len());
    let mut steps = Vec::with_capacity(jobs.len());
    let mut resources = Vec::with_capacity(jobs.len());
    for (v, o, r) in jobs {
        v_quantum.push(v);
        steps.push(o);
        resources.push(r);
    }
    let cs0 = ClassicalState { x: config.x0.clone(), v: config.v0(), t: config.t_i };
    let classical = rk4_solve(&p.physical, &cs0, &times, config.rk4_step);
    let v_classical: Vec<Vec<f64>> = classical.iter().map(|c| c.v.clone()).collect();
    let x_classical: Vec<Vec<f64>> = classical.iter().map(|c| c.x.clone()).collect();
    let x_quantum = if times.len() >= 2 {
        recover_displacement(&v_quantum, &config.x0, config.dt)?
    } else {
        vec![config.x0.clone()]
    };
    let trajectory = Trajectory {
        rel_err_v: relative_error(&v_quantum, &v_classical),
        rel_err_x: relative_error(&x_quantum, &x_classical),
        times,
        v_quantum,
        v_classical,
        x_quantum,
        x_classical,
    };
    Ok(RunResult { trajectory, steps, resources: p.report(resources), scale: p.scale })
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    config: &'a SimulationConfig,
    scale: ScaleFactors,
    sample_count: usize,
    rk4_step: f64,
    roaa: RoaaMode,
}

/// Writes `trajectory.csv`, `errors.csv`, `resources.json` and
/// `config-echo.json` into `dir`.
pub fn write_artifacts(result: &RunResult, config: &SimulationConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut traj = Vec::new();
    result.trajectory.write_csv(&mut traj)?;
    fs::write(dir.join("trajectory.csv"), traj)?;

    let mut errors = String::from("t,rel_err_x,rel_err_v,pre_probability,probability,predicted_success,padded_leak\n");
    for (j, s) in result.steps.iter().enumerate() {
        errors.push_str(&format!(
            "{:?},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            s.t,
            result.trajectory.rel_err_x[j],
            result.trajectory.rel_err_v[j],
            s.pre_probability,
            s.probability,
            s.predicted_success,
            s.padded_leak
        ));
    }
    fs::write(dir.join("errors.csv"), errors)?;
    fs::write(dir.join("resources.json"), serde_json::to_string_pretty(&result.resources)?)?;
    let echo = ConfigEcho {
        config,
        scale: result.scale,
        sample_count: result.trajectory.times.len(),
        rk4_step: config.rk4_step,
        roaa: config.roaa,
    };
    fs::write(dir.join("config-echo.json"), serde_json::to_string_pretty(&echo)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SimulationConfig {
        SimulationConfig::from_json(
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0, 1.0], "t_f": 1.0, "dt": 0.5}"#,
        )
        .unwrap()
    }

    #[test]
    fn config_defaults_and_samples() {
        let c = small_config();
        assert_eq!(c.epsilon, 0.01);
        assert_eq!(c.roaa, RoaaMode::Auto);
        assert_eq!(c.springs(), vec![1.0]);
        assert_eq!(c.sample_times(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn config_rejects_bad_values() {
        let bad = [
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0, 1.0], "t_f": 1.0, "dt": 0.0}"#,
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0], "t_f": 1.0, "dt": 0.5}"#,
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0, 1.0], "t_f": 1.0, "dt": 0.5, "epsilon": 0.7}"#,
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0, 1.0], "t_f": -1.0, "dt": 0.5}"#,
            r#"{"system": {"n": 2, "boundary": "open"}, "x0": [0.0, 1.0], "t_f": 1.0, "dt": 0.5, "typo": 1}"#,
        ];
        for text in bad {
            assert!(SimulationConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn small_run_tracks_classical() {
        let result = run(&small_config()).unwrap();
        for (vq, vc) in result.trajectory.v_quantum.iter().zip(&result.trajectory.v_classical) {
            for (a, b) in vq.iter().zip(vc) {
                assert!((a - b).abs() < 5e-3, "{a} vs {b}");
            }
        }
        assert!(result.steps.iter().all(|s| s.probability > 0.9));
    }

    #[test]
    fn runs_are_deterministic() {
        let c = small_config();
        let a = run(&c).unwrap().trajectory;
        let b = run(&c).unwrap().trajectory;
        assert_eq!(a, b);
    }
}
