//! Command-line front end. Each subcommand renders its output to a string so
//! the binary only has to pick stdout or a file.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{
    commuting_split_report, xy_hamiltonian, xy_unitary_closed_form, ChainSpec, EvolutionAngle,
};
use crate::entanglement::{
    dynamics_sweep, one_tangle, pair_concurrence, phi_grid, three_tangle_density,
};
use crate::error::{Error, Result};
use crate::nmr::{
    attenuated_correlation, correlation_sweep, fidelity, make_pps, pauli_set, simulate_schedule,
    NoiseParams, SpinSystem,
};
use crate::pipeline::{run_protocol, Mode, Protocol};
use crate::pulses::{
    compile_xy_unitary, compile_z_rotation, compile_zzz, gate_unitary, lower_to_schedule,
    sequence_unitary, verify_equivalence, Gate, GateSequence, Program,
};
use crate::qlinalg::{
    embed_one, equal_up_to_global_phase, expectation, expm_hermitian, max_abs_diff, pauli,
    rotation, tensor_all, Axis, ComplexMatrix, DensityMatrix, PureState, QubitIndex, C64,
};

/// Seed used by `verify` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "xychain",
    version,
    about = "Three-spin XY chain simulator and NMR compiler"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Spin-system JSON config; the built-in H/C/F system when absent.
    #[arg(long, global = true)]
    pub spin_system: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_start: f64,
    #[arg(long, default_value_t = PI)]
    pub phi_end: f64,
    #[arg(long, default_value_t = PI / 628.0)]
    pub phi_step: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        phi_grid(self.phi_start, self.phi_end, self.phi_step)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement measures along the XY evolution (CSV).
    Dynamics {
        /// Three-bit basis label or "superposition".
        #[arg(long, default_value = "010")]
        initial: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Prepare a Bell, W or GHZ state and report it (JSON).
    Prepare {
        /// bell-010, bell-101, w or ghz.
        protocol: String,
        /// ideal, compiled, schedule or schedule-noise.
        #[arg(long, default_value = "ideal")]
        mode: Mode,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Relaxation slices per delay in schedule-noise mode.
        #[arg(long, default_value_t = 16)]
        slices: usize,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// The 64 three-qubit Pauli expectation values (CSV).
    PauliSet {
        /// Protocol whose output to analyze.
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        protocol: Option<String>,
        /// JSON report written by `prepare`.
        #[arg(long)]
        state: Option<PathBuf>,
        /// ideal, compiled, schedule or schedule-noise.
        #[arg(long, default_value = "ideal")]
        mode: Mode,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// <X1 X3> along the XY evolution (CSV).
    SweepCorrelation {
        #[arg(long, default_value = "010")]
        initial: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// ideal, compiled, schedule or schedule-noise.
        #[arg(long, default_value = "ideal")]
        mode: Mode,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Equivalence checks for the compiler and schedule lowering.
    Verify {
        #[arg(long, default_value_t = 50)]
        phi_samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Flip the sign of one compiled rotation (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        io: OutputArgs,
    },
}

/// Fixed-point with 12 digits after the decimal point; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Rounds to 12 significant digits for JSON output.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    // adding zero folds -0.0 into 0.0
    format!("{x:.11e}").parse::<f64>().unwrap_or(x) + 0.0
}

fn load_system(path: Option<&Path>) -> Result<SpinSystem> {
    match path {
        Some(p) => SpinSystem::load(p),
        None => Ok(SpinSystem::default()),
    }
}

fn initial_state(label: &str) -> Result<PureState> {
    if label == "superposition" {
        return PureState::equal_superposition(3);
    }
    if label.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "initial state must be a 3-bit label or \"superposition\", got {label:?}"
        )));
    }
    PureState::basis(label)
}

pub fn dynamics_csv(initial: &str, grid: &GridArgs) -> Result<String> {
    let psi = initial_state(initial)?;
    let rows = dynamics_sweep(&psi, &grid.grid()?)?;
    let mut out = String::from("phi,c12,c13,c23,c1_23,c123\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(r.phi),
            fmt_num(r.c12),
            fmt_num(r.c13),
            fmt_num(r.c23),
            fmt_num(r.c1_23),
            fmt_num(r.c123)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|k| round_sig(f(&m[(i, k)]))).collect())
                .collect()
        };
        MatrixJson {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.re.len();
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !square(&self.re) || !square(&self.im) {
            return Err(Error::InvalidState(
                "density matrix arrays must be square and equal-sized".into(),
            ));
        }
        Ok(ComplexMatrix::from_fn(n, n, |i, k| {
            C64::new(self.re[i][k], self.im[i][k])
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntanglementJson {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    pub c1_23: f64,
    /// Absent for mixed states, where the three-tangle is undefined.
    pub c123: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrepareReport {
    pub protocol: String,
    pub mode: String,
    pub epsilon: f64,
    pub density_matrix: MatrixJson,
    pub fidelity: f64,
    pub attenuated_correlation: f64,
    pub entanglement: EntanglementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_duration_s: Option<f64>,
}

fn entanglement_of(rho: &DensityMatrix) -> Result<EntanglementJson> {
    let q = QubitIndex::of;
    let c123 = if rho.purity() >= 1.0 - 1e-8 {
        Some(round_sig(three_tangle_density(rho)?))
    } else {
        None
    };
    Ok(EntanglementJson {
        c12: round_sig(pair_concurrence(rho, q(1), q(2))?),
        c13: round_sig(pair_concurrence(rho, q(1), q(3))?),
        c23: round_sig(pair_concurrence(rho, q(2), q(3))?),
        c1_23: round_sig(one_tangle(rho, q(1))?),
        c123,
    })
}

pub fn prepare_report(
    protocol: Protocol,
    mode: Mode,
    system: &SpinSystem,
    epsilon: f64,
    slices: usize,
) -> Result<PrepareReport> {
    let noise = NoiseParams::default().with_slices(slices);
    let out = run_protocol(protocol, mode, system, &noise, epsilon)?;
    Ok(PrepareReport {
        protocol: protocol.name().to_string(),
        mode: mode.name().to_string(),
        epsilon,
        density_matrix: MatrixJson::from_matrix(out.final_state.matrix()),
        fidelity: round_sig(fidelity(&out.ideal_state, &out.final_state)?),
        attenuated_correlation: round_sig(attenuated_correlation(
            &out.ideal_state,
            &out.final_state,
        )?),
        entanglement: entanglement_of(&out.final_state)?,
        total_duration_s: out.total_duration_s.map(round_sig),
    })
}

/// Density matrix stored in a `prepare` report.
pub fn density_from_report(text: &str) -> Result<DensityMatrix> {
    let report: PrepareReport = serde_json::from_str(text)?;
    DensityMatrix::new(report.density_matrix.to_matrix()?)
}

pub fn pauli_set_csv(rho: &DensityMatrix) -> Result<String> {
    let set = pauli_set(rho)?;
    let mut out = String::from("label,value\n");
    for (label, v) in set.iter() {
        let _ = writeln!(out, "{label},{}", fmt_num(v));
    }
    Ok(out)
}

fn x1x3() -> ComplexMatrix {
    tensor_all([&pauli::x(), &pauli::id(), &pauli::x()])
}

pub fn correlation_csv(
    initial: &str,
    epsilon: f64,
    mode: Mode,
    grid: &GridArgs,
    system: &SpinSystem,
    slices: usize,
) -> Result<String> {
    let pps = make_pps(initial, epsilon)?;
    if pps.matrix().n_qubits() != 3 {
        return Err(Error::InvalidArgument(
            "initial label must have 3 bits".into(),
        ));
    }
    let phis = grid.grid()?;
    let ideal = correlation_sweep(&pps, &phis)?;
    let obs = x1x3();
    let rho0 = pps.matrix();
    let column = |phi: f64, noise: NoiseParams| -> Result<f64> {
        let seq = compile_xy_unitary(phi);
        let rho = match mode {
            Mode::Compiled => rho0.evolve(&sequence_unitary(&seq, 3)?)?,
            _ => simulate_schedule(rho0, &lower_to_schedule(&seq, system)?, system, &noise)?,
        };
        expectation(&rho, &obs)
    };
    let mut out = String::new();
    match mode {
        Mode::Ideal => {
            out.push_str("phi,xx_corr\n");
            for (phi, v) in ideal {
                let _ = writeln!(out, "{},{}", fmt_num(phi), fmt_num(v));
            }
        }
        Mode::Compiled | Mode::Schedule => {
            out.push_str("phi,xx_corr\n");
            for phi in phis {
                let _ = writeln!(
                    out,
                    "{},{}",
                    fmt_num(phi),
                    fmt_num(column(phi, NoiseParams::off())?)
                );
            }
        }
        Mode::ScheduleNoise => {
            out.push_str("phi,xx_corr,xx_corr_noisy\n");
            let noise = NoiseParams::default().with_slices(slices);
            for (phi, v) in ideal {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_num(phi),
                    fmt_num(v),
                    fmt_num(column(phi, noise)?)
                );
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        let _ = writeln!(
            out,
            "{:<26} {:>7} {:>13} {:>9}  status",
            "check", "samples", "max_residual", "tol"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<26} {:>7} {:>13.3e} {:>9.0e}  {}",
                c.name,
                c.samples,
                c.max_residual,
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

fn compiled_xy(phi: f64, inject_fault: bool) -> GateSequence {
    let mut seq = compile_xy_unitary(phi);
    if inject_fault {
        if let Some(g) = seq
            .gates_mut()
            .iter_mut()
            .find(|g| matches!(g, Gate::Rotation { .. }))
        {
            *g = g.with_angle(-g.angle());
        }
    }
    seq
}

fn max_over<F>(samples: &[f64], mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    samples
        .iter()
        .try_fold(0.0f64, |acc, &x| Ok(acc.max(f(x)?)))
}

/// Runs every compiler soundness check over `phi_samples` seeded angles.
pub fn run_verification(phi_samples: usize, seed: u64, inject_fault: bool) -> Result<VerifyReport> {
    if phi_samples == 0 {
        return Err(Error::InvalidArgument(
            "--phi-samples must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phis: Vec<f64> = (0..phi_samples)
        .map(|_| rng.gen_range(0.0..2.0 * PI))
        .collect();
    let angles: Vec<f64> = (0..phi_samples).map(|_| rng.gen_range(-PI..PI)).collect();
    let system = SpinSystem::default();
    let h = xy_hamiltonian(&ChainSpec::three_spin());
    let zzz = tensor_all([&pauli::z(), &pauli::z(), &pauli::z()]);

    let mut checks = Vec::new();
    let mut add = |name, tolerance, max_residual: f64, samples| {
        checks.push(CheckResult {
            name,
            samples,
            max_residual,
            tolerance,
        })
    };

    let r = max_over(&phis, |phi| {
        let closed = xy_unitary_closed_form(EvolutionAngle(phi));
        Ok(max_abs_diff(
            &closed,
            &expm_hermitian(&h, EvolutionAngle(phi).to_time(1.0))?,
        ))
    })?;
    add("closed-form-vs-spectral", 1e-12, r, phis.len());

    let r = max_over(&phis, |phi| {
        let s = commuting_split_report(EvolutionAngle(phi));
        Ok(s.commutator_norm.max(s.product_residual))
    })?;
    add("commuting-split", 1e-12, r, phis.len());

    let r = max_over(&phis, |phi| {
        let target = xy_unitary_closed_form(EvolutionAngle(phi));
        Ok(verify_equivalence(&compiled_xy(phi, inject_fault), &target, 1e-9)?.max_residual)
    })?;
    add("xy-compiler", 1e-9, r, phis.len());

    let r = max_over(&phis, |phi| {
        let target = xy_unitary_closed_form(EvolutionAngle(phi));
        let native = compiled_xy(phi, inject_fault).inline_zzz();
        Ok(verify_equivalence(&native, &target, 1e-9)?.max_residual)
    })?;
    add("xy-compiler-native", 1e-9, r, phis.len());

    let r = max_over(&angles, |a| {
        Ok(verify_equivalence(&compile_zzz(a), &expm_hermitian(&zzz, a)?, 1e-9)?.max_residual)
    })?;
    add("zzz-synthesis", 1e-9, r, angles.len());

    let q2 = QubitIndex::of(2);
    let direct = embed_one(&rotation(Axis::Z, PI / 2.0), q2, 3)?;
    let r = verify_equivalence(&compile_z_rotation(q2, PI / 2.0), &direct, 1e-10)?.max_residual;
    add("composite-z", 1e-10, r, 1);

    let r = max_over(&phis, |phi| {
        let target = xy_unitary_closed_form(EvolutionAngle(phi));
        let schedule = lower_to_schedule(&compiled_xy(phi, inject_fault), &system)?;
        Ok(verify_equivalence(Program::Schedule(&schedule, &system), &target, 1e-8)?.max_residual)
    })?;
    add("schedule-lowering", 1e-8, r, phis.len());

    let r = Protocol::ALL
        .iter()
        .try_fold(0.0f64, |acc, &p| -> Result<f64> {
            let schedule = p.schedule(&system)?;
            let seq = sequence_unitary(&p.gate_sequence(), 3)?;
            let report = verify_equivalence(Program::Schedule(&schedule, &system), &seq, 1e-8)?;
            Ok(acc.max(report.max_residual))
        })?;
    add("protocol-schedules", 1e-8, r, Protocol::ALL.len());

    // sanity: the ZZ gate and its schedule agree on a fixed pair
    let pair = (QubitIndex::of(1), QubitIndex::of(2));
    let zz = gate_unitary(
        &Gate::Zz {
            pair,
            angle: PI / 4.0,
        },
        3,
    )?;
    let block = crate::pulses::expand_zz_to_schedule(pair, PI / 4.0, &system)?;
    let r = equal_up_to_global_phase(
        &crate::pulses::schedule_unitary(&block, &system)?,
        &zz,
        1e-9,
    )?
    .max_residual;
    add("zz-refocusing", 1e-9, r, 1);

    Ok(VerifyReport { seed, checks })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Executes a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Dynamics { initial, grid, io } => {
            emit(&dynamics_csv(&initial, &grid)?, io.out.as_deref())?;
        }
        Command::Prepare {
            protocol,
            mode,
            epsilon,
            slices,
            io,
        } => {
            let system = load_system(io.spin_system.as_deref())?;
            let report = prepare_report(protocol.parse()?, mode, &system, epsilon, slices)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(&text, io.out.as_deref())?;
        }
        Command::PauliSet {
            protocol,
            state,
            mode,
            io,
        } => {
            let rho = match (protocol, state) {
                (_, Some(path)) => density_from_report(&std::fs::read_to_string(path)?)?,
                (Some(name), None) => {
                    let system = load_system(io.spin_system.as_deref())?;
                    run_protocol(name.parse()?, mode, &system, &NoiseParams::default(), 1.0)?
                        .final_state
                }
                (None, None) => {
                    return Err(Error::InvalidArgument("pass --protocol or --state".into()))
                }
            };
            emit(&pauli_set_csv(&rho)?, io.out.as_deref())?;
        }
        Command::SweepCorrelation {
            initial,
            epsilon,
            mode,
            grid,
            io,
        } => {
            let system = load_system(io.spin_system.as_deref())?;
            let csv = correlation_csv(&initial, epsilon, mode, &grid, &system, 16)?;
            emit(&csv, io.out.as_deref())?;
        }
        Command::Verify {
            phi_samples,
            seed,
            inject_fault,
            io,
        } => {
            let report = run_verification(phi_samples, seed, inject_fault)?;
            emit(&report.render(), io.out.as_deref())?;
            if !report.passed() {
                eprintln!("failing checks: {}", report.failing().join(", "));
                return Ok(1);
            }
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(1.0), "1.000000000000");
        assert_eq!(fmt_num(-1e-17), "0.000000000000");
        assert_eq!(fmt_num(-0.5), "-0.500000000000");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(-0.0), 0.0);
    }

    #[test]
    fn initial_labels() {
        assert!(initial_state("superposition").is_ok());
        assert!(initial_state("01").is_err());
        assert!(initial_state("0102").is_err());
    }

    #[test]
    fn cli_parses_common_flags() {
        let cli = Cli::try_parse_from([
            "xychain",
            "prepare",
            "ghz",
            "--mode",
            "schedule-noise",
            "--out",
            "x.json",
        ])
        .unwrap();
        match cli.command {
            Command::Prepare { mode, io, .. } => {
                assert_eq!(mode, Mode::ScheduleNoise);
                assert_eq!(io.out.unwrap(), PathBuf::from("x.json"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Cli::try_parse_from(["xychain", "prepare", "w", "--mode", "bogus"]).is_err());
        assert!(Cli::try_parse_from(["xychain", "pauli-set"]).is_err());
    }
}
