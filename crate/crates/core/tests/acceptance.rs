//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xychain::chain::{
    commuting_split_report, ghz_state, w_angle, w_state, xy_hamiltonian, xy_unitary_closed_form,
    ChainSpec, EvolutionAngle,
};
use xychain::cli::prepare_report;
use xychain::entanglement::{
    default_phi_grid, dynamics_sweep, one_tangle, pair_concurrence, three_tangle,
    three_tangle_with_focus,
};
use xychain::nmr::{
    apply_decoherence, correlation_sweep, decoherence_estimate, decoherence_estimate_with,
    fidelity, make_pps, pauli_set, reconstruct_from_pauli_set, simulate_schedule, NoiseParams,
    SpinSystem,
};
use xychain::pipeline::{Mode, Protocol};
use xychain::pulses::{
    compile_xy_unitary, compile_z_rotation, compile_zzz, expand_zz_to_schedule, verify_equivalence,
};
use xychain::qlinalg::{
    embed_one, expm_hermitian, hermitian_eigenvalues, is_hermitian, max_abs_diff, pauli, rotation,
    tensor_all, Axis,
};
use xychain::{DensityMatrix, PureState, QubitIndex, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

const SEED: u64 = 7;
const RANDOM_STATES: usize = 1000;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(i: usize) -> QubitIndex {
    QubitIndex::of(i)
}

/// `|<target|psi>|` for a (numerically) pure density matrix.
fn overlap_modulus(rho: &DensityMatrix, target: &PureState) -> f64 {
    let v = target.amplitudes();
    let value = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    value.max(0.0).sqrt()
}

fn report_density(protocol: Protocol) -> Result<DensityMatrix, String> {
    let report = prepare_report(protocol, Mode::Ideal, &SpinSystem::default(), 1.0, 16)
        .map_err(|e| e.to_string())?;
    let text = serde_json::to_string(&report).map_err(|e| e.to_string())?;
    xychain::cli::density_from_report(&text).map_err(|e| e.to_string())
}

fn ac1() -> Outcome {
    let rho = report_density(Protocol::Bell010)?;
    let target = PureState::new(vec![
        C64::new(0.0, 0.0),
        C64::new(0.0, -FRAC_1_SQRT_2),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, -FRAC_1_SQRT_2),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ])
    .map_err(|e| e.to_string())?;
    let ov = overlap_modulus(&rho, &target);
    ensure((ov - 1.0).abs() < 1e-10, || format!("overlap {ov}"))?;

    let exact = Protocol::Bell010
        .ideal()
        .map_err(|e| e.to_string())?
        .final_state;
    let inner = exact.inner(&target).map_err(|e| e.to_string())?;
    ensure((inner - C64::new(1.0, 0.0)).norm() < 1e-10, || {
        format!("phase {inner}")
    })?;
    let c13 = pair_concurrence(&exact.to_density(), q(1), q(3)).map_err(|e| e.to_string())?;
    ensure((c13 - 1.0).abs() < 1e-10, || format!("C13 {c13}"))?;
    Ok(format!("overlap {ov:.12}, C13 {c13:.12}"))
}

fn ac2() -> Outcome {
    let psi = Protocol::W.ideal().map_err(|e| e.to_string())?.final_state;
    let ov = psi.overlap(&w_state()).map_err(|e| e.to_string())?;
    ensure((ov - 1.0).abs() < 1e-10, || format!("overlap {ov}"))?;
    let tau = three_tangle(&psi).map_err(|e| e.to_string())?;
    ensure(tau < 1e-9, || format!("three-tangle {tau}"))?;
    let rho = psi.to_density();
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        let cab = pair_concurrence(&rho, q(a), q(b)).map_err(|e| e.to_string())?;
        ensure((cab - 2.0 / 3.0).abs() < 1e-9, || format!("C{a}{b} {cab}"))?;
    }
    Ok(format!("overlap {ov:.12}, three-tangle {tau:.1e}"))
}

fn ac3() -> Outcome {
    let psi = Protocol::Ghz
        .ideal()
        .map_err(|e| e.to_string())?
        .final_state;
    let ov = psi.overlap(&ghz_state()).map_err(|e| e.to_string())?;
    ensure((ov - 1.0).abs() < 1e-10, || format!("overlap {ov}"))?;
    let tau = three_tangle(&psi).map_err(|e| e.to_string())?;
    ensure((tau - 1.0).abs() < 1e-9, || format!("three-tangle {tau}"))?;
    let rho = psi.to_density();
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        let cab = pair_concurrence(&rho, q(a), q(b)).map_err(|e| e.to_string())?;
        ensure(cab < 1e-9, || format!("C{a}{b} {cab}"))?;
    }
    Ok(format!("overlap {ov:.12}, three-tangle {tau:.12}"))
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = xy_hamiltonian(&ChainSpec::three_spin());
    let (mut worst, mut worst_comm) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let phi = rand::Rng::gen_range(&mut rng, -2.0 * PI..2.0 * PI);
        let closed = xy_unitary_closed_form(EvolutionAngle(phi));
        let spectral =
            expm_hermitian(&h, EvolutionAngle(phi).to_time(1.0)).map_err(|e| e.to_string())?;
        worst = worst.max(max_abs_diff(&closed, &spectral));
        worst_comm = worst_comm.max(commuting_split_report(EvolutionAngle(phi)).commutator_norm);
    }
    ensure(worst < 1e-12, || format!("max entry error {worst:e}"))?;
    ensure(worst_comm < 1e-13, || format!("commutator {worst_comm:e}"))?;
    Ok(format!(
        "max entry error {worst:.2e}, commutator {worst_comm:.2e}"
    ))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst_xy = 0.0f64;
    for _ in 0..50 {
        let phi = rand::Rng::gen_range(&mut rng, 0.0..2.0 * PI);
        let target = xy_unitary_closed_form(EvolutionAngle(phi));
        let seq = compile_xy_unitary(phi);
        for program in [seq.clone(), seq.inline_zzz()] {
            let r = verify_equivalence(&program, &target, 1e-9).map_err(|e| e.to_string())?;
            worst_xy = worst_xy.max(r.max_residual);
        }
    }
    ensure(worst_xy < 1e-9, || {
        format!("compiler residual {worst_xy:e}")
    })?;

    let zzz = tensor_all([&pauli::z(), &pauli::z(), &pauli::z()]);
    let mut worst_zzz = 0.0f64;
    for _ in 0..20 {
        let a = rand::Rng::gen_range(&mut rng, -PI..PI);
        let target = expm_hermitian(&zzz, a).map_err(|e| e.to_string())?;
        let r = verify_equivalence(&compile_zzz(a), &target, 1e-9).map_err(|e| e.to_string())?;
        worst_zzz = worst_zzz.max(r.max_residual);
    }
    ensure(worst_zzz < 1e-9, || format!("ZZZ residual {worst_zzz:e}"))?;

    let mut worst_z = 0.0f64;
    for k in 1..=3 {
        let direct = embed_one(&rotation(Axis::Z, PI / 2.0), q(k), 3).map_err(|e| e.to_string())?;
        let r = verify_equivalence(&compile_z_rotation(q(k), PI / 2.0), &direct, 1e-10)
            .map_err(|e| e.to_string())?;
        worst_z = worst_z.max(r.max_residual);
    }
    ensure(worst_z < 1e-10, || {
        format!("composite Z residual {worst_z:e}")
    })?;
    Ok(format!(
        "compiler {worst_xy:.1e}, ZZZ {worst_zzz:.1e}, composite Z {worst_z:.1e}"
    ))
}

fn ac6() -> Outcome {
    let system = SpinSystem::default();
    let mut worst = 1.0f64;
    for p in Protocol::ALL {
        let rho0 = p
            .initial_pps(1.0)
            .map_err(|e| e.to_string())?
            .into_density();
        let schedule = p.schedule(&system).map_err(|e| e.to_string())?;
        let out = simulate_schedule(&rho0, &schedule, &system, &NoiseParams::off())
            .map_err(|e| e.to_string())?;
        let f = fidelity(&out, &p.target().to_density()).map_err(|e| e.to_string())?;
        ensure(f >= 1.0 - 1e-6, || format!("{p} fidelity {f}"))?;
        worst = worst.min(f);
    }

    let j12 = system.coupling(q(1), q(2)).map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let bell = expand_zz_to_schedule((q(1), q(2)), PI / 4.0, &system).map_err(|e| e.to_string())?;
    let d2 = bell.total_duration();
    ensure(rel(d2, 1.0 / (2.0 * j12)) < 1e-3, || {
        format!("Bell d2 {d2}")
    })?;

    let identity = 2.0 * w_angle() / PI;
    ensure(rel(identity, 0.3041) < 1e-3, || {
        format!("2 w / pi = {identity}")
    })?;
    for pair in [(q(1), q(2)), (q(2), q(3))] {
        let j = system
            .coupling(pair.0, pair.1)
            .map_err(|e| e.to_string())?
            .abs();
        let block = expand_zz_to_schedule(pair, w_angle(), &system).map_err(|e| e.to_string())?;
        let d = block.total_duration();
        ensure(rel(d, 0.3041 / j) < 1e-3, || {
            format!("W delay {d} for J={j}")
        })?;
    }
    Ok(format!(
        "min fidelity {worst:.12}, Bell d2 {:.4} ms, 2w/pi {identity:.6}",
        d2 * 1e3
    ))
}

fn ac7() -> Outcome {
    let e = |x: xychain::Error| x.to_string();
    let s010 = PureState::basis("010").map_err(e)?;
    let marks = dynamics_sweep(&s010, &[PI / 8.0, PI / 4.0, 3.0 * PI / 4.0]).map_err(e)?;
    for p in &marks[1..] {
        ensure((p.c13 - 1.0).abs() < 1e-9, || {
            format!("C13({}) = {}", p.phi, p.c13)
        })?;
    }
    let c12 = marks[0].c12;
    ensure((c12 - FRAC_1_SQRT_2).abs() < 1e-9, || {
        format!("C12(pi/8) = {c12}")
    })?;

    let sup = PureState::equal_superposition(3).map_err(e)?;
    let grid = default_phi_grid();
    let mut c12_max = 0.0f64;
    for a in dynamics_sweep(&s010, &grid).map_err(e)? {
        ensure(a.c123 < 1e-9, || {
            format!("|010> C123({}) = {}", a.phi, a.c123)
        })?;
        c12_max = c12_max.max(a.c12);
    }
    for b in dynamics_sweep(&sup, &grid).map_err(e)? {
        ensure(b.c13 < 1e-9, || {
            format!("superposition C13({}) = {}", b.phi, b.c13)
        })?;
    }
    ensure(c12_max <= FRAC_1_SQRT_2 + 1e-9, || {
        format!("C12 exceeds peak: {c12_max}")
    })?;
    let b = dynamics_sweep(&sup, &[PI / 2.0]).map_err(e)?[0];
    ensure((b.c123 - 1.0).abs() < 1e-9, || {
        format!("C123(pi/2) = {}", b.c123)
    })?;
    Ok(format!("C12 peak {c12_max:.12} on grid"))
}

fn w_class(label: &str) -> f64 {
    let count = |c: char| label.chars().filter(|&x| x == c).count();
    let (ni, nx, ny, nz) = (count('I'), count('X'), count('Y'), count('Z'));
    match (ni, nx, ny, nz) {
        (3, 0, 0, 0) => 1.0,
        (2, 0, 0, 1) | (1, 0, 0, 2) => -1.0 / 3.0,
        (1, 2, 0, 0) | (1, 0, 2, 0) => 2.0 / 3.0,
        (0, 2, 0, 1) | (0, 0, 2, 1) => -2.0 / 3.0,
        (0, 0, 0, 3) => 1.0,
        _ => 0.0,
    }
}

fn ac8() -> Outcome {
    let rho = Protocol::W
        .ideal()
        .map_err(|e| e.to_string())?
        .final_state
        .to_density();
    let set = pauli_set(&rho).map_err(|e| e.to_string())?;
    let mut counts = [0usize; 5];
    for (label, v) in set.iter() {
        let expected = w_class(&label);
        let tol = if expected == 0.0 { 1e-10 } else { 1e-9 };
        ensure((v - expected).abs() < tol, || {
            format!("{label}: {v} vs {expected}")
        })?;
        if label == "III" {
            continue;
        }
        let slot = if expected == 0.0 {
            0
        } else if expected == 1.0 {
            1
        } else if expected > 0.0 {
            2
        } else if expected < -0.5 {
            3
        } else {
            4
        };
        counts[slot] += 1;
    }
    ensure(counts == [44, 1, 6, 6, 6], || {
        format!("class sizes {counts:?}")
    })?;
    Ok("6 x -1/3, 6 x 2/3, 6 x -2/3, ZZZ = 1, 44 zeros".into())
}

fn ac9() -> Outcome {
    let pps = make_pps("010", 1.0).map_err(|e| e.to_string())?;
    let marks = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI];
    let rows = correlation_sweep(&pps, &marks).map_err(|e| e.to_string())?;
    let expected = [0.0, 1.0, 0.0, 1.0, 0.0];
    for ((phi, v), want) in rows.iter().zip(expected) {
        ensure((v - want).abs() < 1e-9, || format!("<X1X3>({phi}) = {v}"))?;
    }
    let grid = correlation_sweep(&pps, &default_phi_grid()).map_err(|e| e.to_string())?;
    let peak = grid.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    ensure(peak <= 1.0 + 1e-9, || format!("grid maximum {peak}"))?;
    Ok(format!("grid maximum {peak:.12}"))
}

fn ac10() -> Outcome {
    let e = |x: xychain::Error| x.to_string();
    let system = SpinSystem::default();
    let c = decoherence_estimate(Protocol::Bell010, &system).map_err(e)?;
    ensure((0.89..=0.99).contains(&c), || format!("Bell estimate {c}"))?;

    let frozen =
        decoherence_estimate(Protocol::Bell010, &system.without_relaxation()).map_err(e)?;
    ensure((frozen - 1.0).abs() < 1e-10, || {
        format!("no-relaxation estimate {frozen}")
    })?;

    let noise = NoiseParams::default();
    let doubled = decoherence_estimate_with(Protocol::Bell010, &system, &noise, 2.0).map_err(e)?;
    ensure(doubled < c, || format!("doubling delays: {c} -> {doubled}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst_trace = 0.0f64;
    let mut worst_eig = 0.0f64;
    for k in 0..RANDOM_STATES {
        let rho = if k % 2 == 0 {
            common::random_mixed(&mut rng, 3)
        } else {
            common::random_pure(&mut rng, 3).to_density()
        };
        let t = rand::Rng::gen_range(&mut rng, 0.0..2.0);
        let out = apply_decoherence(&rho, t, &system).map_err(e)?;
        let m = out.matrix();
        ensure(is_hermitian(m, 1e-12), || "output not Hermitian".into())?;
        worst_trace = worst_trace.max((m.trace().re - 1.0).abs());
        worst_eig = worst_eig.min(hermitian_eigenvalues(m)[0]);
    }
    ensure(worst_trace < 1e-12, || {
        format!("trace error {worst_trace:e}")
    })?;
    ensure(worst_eig > -1e-12, || {
        format!("negative eigenvalue {worst_eig:e}")
    })?;
    Ok(format!(
        "Bell estimate {c:.4}, doubled delays {doubled:.4}, CPTP on {RANDOM_STATES} states"
    ))
}

fn ac11() -> Outcome {
    let e = |x: xychain::Error| x.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let (mut worst_ckw, mut worst_lu, mut worst_rt) = (f64::MAX, 0.0f64, 0.0f64);
    let measures = |psi: &PureState| -> Result<Vec<f64>, String> {
        let rho = psi.to_density();
        let mut v = Vec::with_capacity(10);
        for (a, b) in pairs {
            v.push(pair_concurrence(&rho, q(a), q(b)).map_err(e)?);
        }
        for k in 1..=3 {
            v.push(one_tangle(&rho, q(k)).map_err(e)?);
        }
        for k in 1..=3 {
            v.push(three_tangle_with_focus(psi, q(k)).map_err(e)?);
        }
        Ok(v)
    };
    for _ in 0..RANDOM_STATES {
        let psi = common::random_pure(&mut rng, 3);
        let m = measures(&psi)?;
        for &x in &m {
            ensure((-1e-10..=1.0 + 1e-10).contains(&x), || {
                format!("measure {x} out of range")
            })?;
        }
        let ckw = m[3] * m[3] - m[0] * m[0] - m[1] * m[1];
        worst_ckw = worst_ckw.min(ckw);
        ensure(ckw >= -1e-8, || format!("CKW residual {ckw}"))?;

        let u = common::random_local_unitary(&mut rng, 3);
        let moved = measures(&psi.apply(&u).map_err(e)?)?;
        let diff = m
            .iter()
            .zip(&moved)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_lu = worst_lu.max(diff);
        ensure(diff < 1e-9, || format!("local-unitary drift {diff:e}"))?;

        let rho = psi.to_density();
        let back = reconstruct_from_pauli_set(&pauli_set(&rho).map_err(e)?).map_err(e)?;
        let rt = max_abs_diff(back.matrix(), rho.matrix());
        worst_rt = worst_rt.max(rt);
        ensure(rt < 1e-12, || format!("round-trip error {rt:e}"))?;
    }
    Ok(format!(
        "{RANDOM_STATES} states: min CKW residual {worst_ckw:.1e}, LU drift {worst_lu:.1e}, round trip {worst_rt:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1", "Bell protocol exactness", ac1),
        ("AC2", "W protocol", ac2),
        ("AC3", "GHZ protocol", ac3),
        ("AC4", "closed-form propagator", ac4),
        ("AC5", "compiler soundness", ac5),
        ("AC6", "schedule lowering with refocusing", ac6),
        ("AC7", "dynamics curves", ac7),
        ("AC8", "W-state Pauli set", ac8),
        ("AC9", "end-spin correlation sweep", ac9),
        ("AC10", "noise model", ac10),
        ("AC11", "measure properties", ac11),
    ];
    let mut failures = 0;
    for (id, title, run) in criteria {
        match run() {
            Ok(detail) => println!("{id:<5} PASS  {title}: {detail}"),
            Err(reason) => {
                failures += 1;
                println!("{id:<5} FAIL  {title}: {reason}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
