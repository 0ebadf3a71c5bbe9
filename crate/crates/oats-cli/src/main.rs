//! `oats` — command-line front end for the collective-spin echo simulator.
//!
//! Subcommands cover the echo protocol itself, the two cat-state procedures,
//! the rotation-sum decomposition table, quadratic Gauss-sum checks, Husimi
//! grid export and the brute-force oracle battery. Outputs are JSON or CSV
//! files; contract violations exit nonzero with a one-line error JSON on
//! stderr.

mod mu;

use std::env;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mu::{parse_two_m, MuArg};
use oats_core::decomposition::{
    build_decomposition, max_operator_error, quadratic_gauss_sum, GaussSumQuery,
};
use oats_core::echo::{closed_form_final, echo_protocol, BipartiteState};
use oats_core::husimi::{
    css_perimeter, equatorial_maxima, husimi_grid, husimi_grid_conditional, HusimiGrid,
    QNormalization,
};
use oats_core::oracle::{oracle_run, OracleProtocol};
use oats_core::protocols::{
    entangled_cat, entangled_cat_with_parity, transfer_cat, FinalState, OutcomeLabel,
};
use oats_core::spin::{BlochDirection, CollectiveSpinState};
use oats_core::Complex64;

#[derive(Parser)]
#[command(
    name = "oats",
    version,
    about = "One-axis-twist squeezing of collective atomic spins in an echo configuration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-step echo and write the joint control-target state
    Echo(EchoArgs),
    /// Deterministic entangled-cat protocol report
    Cat(CatArgs),
    /// Measurement-conditioned cat transfer, both branches
    Transfer(TransferArgs),
    /// Rotation-sum decomposition table or operator-error check
    Decompose(DecomposeArgs),
    /// Direct quadratic Gauss-sum evaluation
    GaussSum(GaussSumArgs),
    /// Husimi grid export for a stored state
    Husimi(HusimiArgs),
    /// Product-space oracle battery
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct EchoArgs {
    /// Target group size N
    #[arg(long)]
    n_target: usize,
    /// Control group size N'
    #[arg(long)]
    n_control: usize,
    /// Squeezing parameter ("pi/2", "2pi/5", or decimal radians)
    #[arg(long, value_parser = MuArg::parse_cli, allow_hyphen_values = true)]
    mu: MuArg,
    /// Target polar angle in radians
    #[arg(long, default_value_t = FRAC_PI_2)]
    theta: f64,
    /// Target azimuth in radians
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Control preparation: "cat", "up", "down", or a projection like "3/2"
    #[arg(long, default_value = "cat", allow_hyphen_values = true)]
    control: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CatArgs {
    #[arg(long)]
    n_target: usize,
    #[arg(long, default_value_t = 1)]
    n_control: usize,
    /// Squeezing parameter; mu N' = pi/2 gives the ideal cat
    #[arg(long, value_parser = MuArg::parse_cli, allow_hyphen_values = true)]
    mu: MuArg,
    /// Also run at N+1 targets and record the parity comparison
    #[arg(long)]
    parity_sweep: bool,
    /// Embed the final joint state in the report
    #[arg(long)]
    embed_state: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransferArgs {
    #[arg(long)]
    n_target: usize,
    #[arg(long)]
    embed_state: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Decomposition order n (propagator exp(-i (pi/n) S_z^2))
    #[arg(long, conflicts_with = "mu")]
    n: Option<u32>,
    /// Alternative to --n: a squeezing parameter that must be exactly pi/n
    #[arg(long, value_parser = MuArg::parse_cli, allow_hyphen_values = true)]
    mu: Option<MuArg>,
    /// Atom count N the operator acts on
    #[arg(long)]
    n_atoms: usize,
    /// Check the decomposition against the direct propagator on random states
    #[arg(long)]
    check: bool,
    /// Random states per check
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GaussSumArgs {
    /// Order n of the sum
    #[arg(long)]
    n: u32,
    /// Start point k0 ("0", "1/2", "-3/2"); defaults to the smallest valid
    #[arg(long, allow_hyphen_values = true)]
    k0: Option<String>,
    /// Sweep orders 1..=SWEEP into a CSV instead of a single JSON
    #[arg(long)]
    sweep: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    /// Peak scaled to 1
    Max,
    /// (N+1)/(4 pi) density
    Quasi,
}

#[derive(Args)]
struct HusimiArgs {
    /// State JSON (single-group, or joint when --control-m is given)
    #[arg(long)]
    state: PathBuf,
    /// Control projection selecting a conditional target state
    #[arg(long, allow_hyphen_values = true)]
    control_m: Option<String>,
    #[arg(long, default_value_t = 181)]
    ntheta: usize,
    #[arg(long, default_value_t = 360)]
    nphi: usize,
    #[arg(long, value_enum, default_value_t = NormalizationArg::Max)]
    normalization: NormalizationArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metadata sidecar path (defaults to the CSV path with .meta.json)
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Largest control+target atom total to exercise (max 14)
    #[arg(long, default_value_t = 10)]
    max_total: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprintln!("{}", json!({ "error": err.to_string() }));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{}", json!({ "error": message }));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Echo(args) => run_echo(args),
        Command::Cat(args) => run_cat(args),
        Command::Transfer(args) => run_transfer(args),
        Command::Decompose(args) => run_decompose(args),
        Command::GaussSum(args) => run_gauss_sum(args),
        Command::Husimi(args) => run_husimi(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    }
}

fn resolve_out(out: Option<PathBuf>, default_name: &str) -> PathBuf {
    out.unwrap_or_else(|| {
        let dir = env::var_os("OATS_OUT_DIR").unwrap_or_else(|| ".".into());
        PathBuf::from(dir).join(default_name)
    })
}

fn write_file(path: &PathBuf, contents: &[u8]) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn control_state(preparation: &str, n_control: usize) -> Result<CollectiveSpinState, String> {
    match preparation {
        "cat" => Ok(CollectiveSpinState::polar_cat(n_control)),
        "up" => Ok(CollectiveSpinState::all_up(n_control)),
        "down" => Ok(CollectiveSpinState::all_down(n_control)),
        other => {
            let two_m = parse_two_m(other)?;
            CollectiveSpinState::basis_state(n_control, two_m).map_err(|e| e.to_string())
        }
    }
}

fn run_echo(args: EchoArgs) -> Result<(), String> {
    if args.n_target < 1 || args.n_control < 1 {
        return Err("group sizes must be at least 1".into());
    }
    let control = control_state(&args.control, args.n_control)?;
    let direction = BlochDirection::new(args.theta, args.phi).map_err(|e| e.to_string())?;
    let target = CollectiveSpinState::coherent(args.n_target, direction);
    let mu = args.mu.radians();
    let joint = echo_protocol(&control, &target, mu);

    // cross-check against the closed form before writing anything
    let closed = closed_form_final(&control, direction, args.n_target, mu);
    let deviation = joint
        .amplitudes()
        .iter()
        .zip(closed.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(format!(
            "echo and closed form disagree by {deviation:.3e}; refusing to write"
        ));
    }

    let path = resolve_out(args.out, "echo_state.json");
    let text = serde_json::to_string(&joint).map_err(|e| e.to_string())?;
    write_file(&path, text.as_bytes())?;
    println!(
        "echo: wrote {} (closed-form deviation {deviation:.3e})",
        path.display()
    );
    Ok(())
}

fn strip_state(value: &mut serde_json::Value, embed: bool) {
    if !embed {
        if let Some(map) = value.as_object_mut() {
            map.remove("final_state");
        }
    }
}

fn run_cat(args: CatArgs) -> Result<(), String> {
    if args.n_target < 1 || args.n_control < 1 {
        return Err("group sizes must be at least 1".into());
    }
    let mu = args.mu.radians();
    let report = if args.parity_sweep {
        entangled_cat_with_parity(args.n_target, args.n_control, mu)
    } else {
        entangled_cat(args.n_target, args.n_control, mu)
    };
    let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    strip_state(&mut value, args.embed_state);
    let path = resolve_out(args.out, "cat_report.json");
    let text = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?;
    write_file(&path, text.as_bytes())?;

    let worst_fidelity = report
        .conditional_fidelities
        .values()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    println!(
        "cat: wrote {} (branches {}, worst fidelity {worst_fidelity:.12})",
        path.display(),
        report.branch_weights.len()
    );
    Ok(())
}

fn run_transfer(args: TransferArgs) -> Result<(), String> {
    if args.n_target < 1 {
        return Err("target size must be at least 1".into());
    }
    let reports = transfer_cat(args.n_target);
    let mut up = serde_json::to_value(&reports.up).map_err(|e| e.to_string())?;
    let mut down = serde_json::to_value(&reports.down).map_err(|e| e.to_string())?;
    strip_state(&mut up, args.embed_state);
    strip_state(&mut down, args.embed_state);
    let value = json!({ "up": up, "down": down });
    let path = resolve_out(args.out, "transfer_report.json");
    let text = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?;
    write_file(&path, text.as_bytes())?;
    println!(
        "transfer: wrote {} (cat fidelities up {:.12}, down {:.12})",
        path.display(),
        reports.up.conditional_fidelities["up"],
        reports.down.conditional_fidelities["down"]
    );
    Ok(())
}

fn run_decompose(args: DecomposeArgs) -> Result<(), String> {
    let order = match (args.n, args.mu) {
        (Some(n), _) if n >= 1 => n,
        (Some(_), _) => return Err("decomposition order must be at least 1".into()),
        (None, Some(mu)) => mu.exact_pi_over().ok_or_else(|| {
            "mu is not exactly pi/n: no rotation-sum decomposition exists for this value"
                .to_string()
        })?,
        (None, None) => return Err("provide either --n or --mu pi/<n>".into()),
    };

    let path = resolve_out(args.out, "decomposition.csv");
    let mut csv = String::new();
    if args.check {
        let error = max_operator_error(order, args.n_atoms, args.samples, args.seed);
        csv.push_str("n,n_atoms,alpha,max_operator_error\n");
        let d = build_decomposition(order, args.n_atoms);
        csv.push_str(&format!(
            "{},{},{},{:.5e}\n",
            order,
            args.n_atoms,
            d.alpha(),
            error
        ));
        println!(
            "decompose: wrote {} (n {}, N {}, max operator error {error:.3e})",
            path.display(),
            order,
            args.n_atoms
        );
    } else {
        let d = build_decomposition(order, args.n_atoms);
        csv.push_str("l,coefficient_re,coefficient_im,z_angle\n");
        for term in d.terms() {
            csv.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                if term.two_l % 2 == 0 {
                    (term.two_l / 2).to_string()
                } else {
                    format!("{}/2", term.two_l)
                },
                term.coefficient.re,
                term.coefficient.im,
                term.z_angle
            ));
        }
        println!(
            "decompose: wrote {} ({} terms, alpha {})",
            path.display(),
            d.terms().len(),
            d.alpha()
        );
    }
    write_file(&path, csv.as_bytes())
}

fn run_gauss_sum(args: GaussSumArgs) -> Result<(), String> {
    if let Some(max_order) = args.sweep {
        let path = resolve_out(args.out, "gauss_sums.csv");
        let mut csv = String::from("n,two_k0,sum_re,sum_im,abs_error\n");
        for n in 1..=max_order {
            let two_k0 = n as i64 % 2;
            let query = GaussSumQuery::new(n, two_k0).map_err(|e| e.to_string())?;
            let sum = quadratic_gauss_sum(&query);
            let expected =
                Complex64::cis(std::f64::consts::FRAC_PI_4).scale((n as f64).sqrt());
            csv.push_str(&format!(
                "{n},{two_k0},{:.17e},{:.17e},{:.5e}\n",
                sum.re,
                sum.im,
                (sum - expected).norm()
            ));
        }
        write_file(&path, csv.as_bytes())?;
        println!("gauss-sum: wrote {} (orders 1..={max_order})", path.display());
        return Ok(());
    }

    let two_k0 = match &args.k0 {
        Some(text) => parse_two_m(text)?,
        None => args.n as i64 % 2,
    };
    let query = GaussSumQuery::new(args.n, two_k0).map_err(|e| e.to_string())?;
    let sum = quadratic_gauss_sum(&query);
    let expected = Complex64::cis(std::f64::consts::FRAC_PI_4).scale((args.n as f64).sqrt());
    let abs_error = (sum - expected).norm();
    let value = json!({
        "order": args.n,
        "two_k0": two_k0,
        "sum": [sum.re, sum.im],
        "expected": [expected.re, expected.im],
        "abs_error": abs_error,
    });
    let path = resolve_out(args.out, "gauss_sum.json");
    write_file(
        &path,
        serde_json::to_string_pretty(&value)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    println!(
        "gauss-sum: wrote {} (n {}, error {abs_error:.3e})",
        path.display(),
        args.n
    );
    Ok(())
}

fn run_husimi(args: HusimiArgs) -> Result<(), String> {
    let raw = std::fs::read_to_string(&args.state)
        .map_err(|e| format!("cannot read {}: {e}", args.state.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| format!("bad state JSON: {e}"))?;
    let is_bipartite = value
        .as_object()
        .is_some_and(|map| map.contains_key("n_control"));

    let normalization = match args.normalization {
        NormalizationArg::Max => QNormalization::MaxOne,
        NormalizationArg::Quasi => QNormalization::QuasiProbability,
    };

    let (grid, n_atoms): (HusimiGrid, usize) = if is_bipartite {
        let state: BipartiteState =
            serde_json::from_value(value).map_err(|e| format!("bad joint state JSON: {e}"))?;
        let control_m = args
            .control_m
            .as_deref()
            .ok_or("joint state input requires --control-m")?;
        let two_m = parse_two_m(control_m)?;
        let row_index = two_m + state.control_count() as i64;
        if row_index < 0 || row_index % 2 != 0 {
            return Err(format!("projection {control_m} invalid for this control group"));
        }
        let grid = husimi_grid_conditional(
            &state,
            (row_index / 2) as usize,
            args.ntheta,
            args.nphi,
            normalization,
        )
        .map_err(|e| e.to_string())?;
        (grid, state.target_count())
    } else {
        if args.control_m.is_some() {
            return Err("--control-m only applies to joint states".into());
        }
        let state: CollectiveSpinState =
            serde_json::from_value(value).map_err(|e| format!("bad state JSON: {e}"))?;
        let grid = husimi_grid(&state, args.ntheta, args.nphi, normalization)
            .map_err(|e| e.to_string())?;
        (grid, state.atom_count())
    };

    let path = resolve_out(args.out, "husimi.csv");
    let mut csv = Vec::new();
    grid.write_csv(&mut csv).map_err(|e| e.to_string())?;
    write_file(&path, &csv)?;

    // sidecar: metadata plus 1/e^2 circles centered on the equatorial peaks
    let maxima = equatorial_maxima(&grid);
    let circles: Vec<_> = if n_atoms >= 1 {
        maxima
            .iter()
            .map(|&phi| {
                css_perimeter(
                    n_atoms,
                    BlochDirection::new(FRAC_PI_2, phi).expect("equator point"),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    let sidecar_value = json!({
        "source": args.state.display().to_string(),
        "n_atoms": n_atoms,
        "n_theta": grid.n_theta(),
        "n_phi": grid.n_phi(),
        "normalization": match args.normalization {
            NormalizationArg::Max => "max",
            NormalizationArg::Quasi => "quasi_probability",
        },
        "max_value": grid.max_value(),
        "equatorial_maxima": maxima,
        "perimeter_circles": circles,
    });
    let sidecar_path = args
        .sidecar
        .unwrap_or_else(|| path.with_extension("meta.json"));
    write_file(
        &sidecar_path,
        serde_json::to_string_pretty(&sidecar_value)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    println!(
        "husimi: wrote {} and {} ({} equatorial maxima)",
        path.display(),
        sidecar_path.display(),
        maxima.len()
    );
    Ok(())
}

fn run_oracle_check(args: OracleCheckArgs) -> Result<(), String> {
    if args.max_total > 14 {
        return Err("oracle capped at 14 atoms total".into());
    }
    if args.max_total < 3 {
        return Err("need at least 3 atoms total for the battery".into());
    }
    let mut worst_amp = 0.0_f64;
    let mut worst_leak = 0.0_f64;
    let mut worst_obs = 0.0_f64;
    let mut cases = 0usize;

    for nc in 1usize..=3 {
        if args.max_total < nc + 2 {
            continue;
        }
        for n in 2..=(args.max_total - nc) {
            for &mu in &[FRAC_PI_2, 0.37] {
                let run = oracle_run(OracleProtocol::Echo, n, nc, mu)
                    .map_err(|e| e.to_string())?;
                let control = CollectiveSpinState::polar_cat(nc);
                let target = CollectiveSpinState::coherent(
                    n,
                    BlochDirection::new(FRAC_PI_2, 0.0).expect("equator"),
                );
                let engine = echo_protocol(&control, &target, mu);
                worst_amp = worst_amp.max(max_dev(
                    run.projected.amplitudes(),
                    engine.amplitudes(),
                ));
                worst_leak = worst_leak.max(run.leakage.abs());

                let run = oracle_run(OracleProtocol::EntangledCat, n, nc, mu)
                    .map_err(|e| e.to_string())?;
                let report = entangled_cat(n, nc, mu);
                let engine_state = match &report.final_state {
                    FinalState::Bipartite(s) => s.clone(),
                    FinalState::Collective(_) => unreachable!("cat run ends bipartite"),
                };
                worst_amp = worst_amp.max(max_dev(
                    run.projected.amplitudes(),
                    engine_state.amplitudes(),
                ));
                worst_leak = worst_leak.max(run.leakage.abs());
                cases += 2;
            }
        }
    }

    for n in 2..=(args.max_total - 1).min(9) {
        let run = oracle_run(OracleProtocol::TransferCat, n, 1, FRAC_PI_2)
            .map_err(|e| e.to_string())?;
        let engine = transfer_cat(n);
        worst_leak = worst_leak.max(run.leakage.abs());
        for branch in &run.branches {
            worst_leak = worst_leak.max(branch.target_leakage.abs());
            let (report, label) = match branch.label {
                OutcomeLabel::Up => (&engine.up, "up"),
                OutcomeLabel::Down => (&engine.down, "down"),
            };
            worst_obs = worst_obs
                .max((branch.probability - report.branch_weights[label]).abs());
            worst_obs = worst_obs
                .max((branch.cat_fidelity - report.conditional_fidelities[label]).abs());
            let engine_target = match &report.final_state {
                FinalState::Collective(s) => s.clone(),
                FinalState::Bipartite(_) => unreachable!("transfer ends collective"),
            };
            worst_amp = worst_amp.max(max_dev(
                branch.target.amplitudes(),
                engine_target.amplitudes(),
            ));
        }
        cases += 1;
    }

    let passed = worst_amp < 1e-10 && worst_leak < 1e-12 && worst_obs < 1e-10;
    let value = json!({
        "max_total": args.max_total,
        "cases": cases,
        "max_amplitude_deviation": worst_amp,
        "max_leakage": worst_leak,
        "max_observable_deviation": worst_obs,
        "tolerances": {
            "amplitude": 1e-10,
            "leakage": 1e-12,
            "observable": 1e-10,
        },
        "passed": passed,
    });
    let path = resolve_out(args.out, "oracle_check.json");
    write_file(
        &path,
        serde_json::to_string_pretty(&value)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    println!(
        "oracle-check: wrote {} ({cases} cases, amplitude {worst_amp:.3e}, leakage {worst_leak:.3e})",
        path.display()
    );
    if passed {
        Ok(())
    } else {
        Err(format!(
            "oracle disagreement: amplitude {worst_amp:.3e}, leakage {worst_leak:.3e}, \
             observables {worst_obs:.3e}"
        ))
    }
}

fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
