//! `mvl`: verify, benchmark and compare multi-valued CNTFET adders.
//!
//! Exit status: 0 success, 1 verification failure, 2 design or parse error,
//! 3 solver non-convergence or conflict.

mod compare;
mod design_spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvl_core::adders::{build_cpa, build_full_adder, verify_exhaustive, CpaConfig};
use mvl_core::analysis::{sweep_load, to_csv, Bench, Design, DELAY_COLUMNS, SWEEP_LOADS_FF};
use mvl_core::netlist::{self, Netlist};
use mvl_core::solver::{solve_dc, stimulus_from_digits, SolveError};
use mvl_core::Timing;

use compare::Comparison;
use design_spec::DesignSpec;

const MODEL_NOTE: &str = "note: absolute delays and powers are calibrated-model values, not physical measurements";

#[derive(Parser)]
#[command(name = "mvl", version, about = "Switch-level multi-valued CNTFET adder workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively check a design against integer addition.
    Verify {
        /// Design such as `tfa2`, `tfa2,swing=reduced`, `bfa1,vdd=0.45` or `qfa2,digits=3`.
        design: DesignSpec,
    },
    /// Worst-case delays, power, PDP and area at one load, as CSV.
    Bench {
        /// Design such as `tfa2`, `tfa2,swing=reduced`, `bfa1,vdd=0.45` or `qfa2,digits=3`.
        design: DesignSpec,
        /// Load per output in fF.
        #[arg(long, default_value_t = 2.0)]
        cl: f64,
    },
    /// Benchmark over several loads with a linear fit per delay column.
    Sweep {
        /// Design such as `tfa2`, `tfa2,swing=reduced`, `bfa1,vdd=0.45` or `qfa2,digits=3`.
        design: DesignSpec,
        /// Comma-separated loads in fF.
        #[arg(long, value_delimiter = ',', default_values_t = SWEEP_LOADS_FF.to_vec())]
        cl: Vec<f64>,
    },
    /// Compare the 6-bit, 4-trit and 3-quit ripple-carry adders.
    CompareCpa {
        /// Load per output in fF.
        #[arg(long, default_value_t = 2.0)]
        cl: f64,
        /// Directory for the CSV, markdown summary and plot data files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a design's netlist text.
    Dump {
        /// Design such as `tfa2`, `tfa2,swing=reduced`, `bfa1,vdd=0.45` or `qfa2,digits=3`.
        design: DesignSpec,
    },
    /// Solve a netlist file for one input vector.
    Run {
        /// Netlist text file.
        file: PathBuf,
        /// Digit assignment such as `a=0,b=2`.
        #[arg(long, default_value = "")]
        inputs: String,
    },
}

struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn verification(message: impl Into<String>) -> Self {
        Self {
            status: 1,
            message: message.into(),
        }
    }
    fn design(message: impl ToString) -> Self {
        Self {
            status: 2,
            message: message.to_string(),
        }
    }
    fn solver(message: impl ToString) -> Self {
        Self {
            status: 3,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { design } => verify(design.0),
        Command::Bench { design, cl } => bench(design.0, cl),
        Command::Sweep { design, cl } => sweep(design.0, &cl),
        Command::CompareCpa { cl, out } => compare_cpa(cl, out.as_deref()),
        Command::Dump { design } => dump(design.0),
        Command::Run { file, inputs } => run(&file, &inputs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var("MVL_SEED_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring MVL_SEED_THREADS={raw:?}; expected a positive integer"),
    }
}

fn check_load(cl: f64) -> Outcome {
    if cl.is_finite() && cl >= 0.0 {
        Ok(())
    } else {
        Err(Failure::design(format!(
            "load must be a non-negative number of fF, got {cl}"
        )))
    }
}

fn build(design: &Design) -> Result<Netlist, Failure> {
    if design.digits == 1 {
        build_full_adder(design.variant, design.swing, design.vdd).map_err(Failure::design)
    } else {
        let config = CpaConfig::new(design.variant, design.digits)
            .with_swing(design.swing)
            .with_vdd(design.vdd);
        build_cpa(&config).map_err(Failure::design)
    }
}

fn verified(design: &Design) -> Outcome {
    let nl = build(design)?;
    let report = verify_exhaustive(&nl, design.radix(), design.digits).map_err(Failure::design)?;
    println!(
        "{design}: {}/{} vectors pass, {} with conflicts",
        report.vectors - report.failures,
        report.vectors,
        report.conflicts
    );
    for f in &report.examples {
        println!("  A={} B={} Cin={}: {}", f.a, f.b, f.cin, f.reason);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::verification(format!(
            "{design} failed {} vectors",
            report.failures
        )))
    }
}

fn verify(design: Design) -> Outcome {
    verified(&design)
}

fn bench_of(design: Design) -> Result<Bench, Failure> {
    Bench::new(design).map_err(Failure::solver)
}

fn bench(design: Design, cl: f64) -> Outcome {
    check_load(cl)?;
    let report = bench_of(design)?
        .report(&Timing::default(), cl)
        .map_err(Failure::solver)?;
    eprintln!("{MODEL_NOTE}");
    print!("{}", to_csv(&[report]));
    Ok(())
}

fn sweep(design: Design, loads: &[f64]) -> Outcome {
    if loads.len() < 2 {
        return Err(Failure::design("a sweep needs at least two loads"));
    }
    for &cl in loads {
        check_load(cl)?;
    }
    let sweep = sweep_load(design, &Timing::default(), loads).map_err(Failure::solver)?;
    eprintln!("{MODEL_NOTE}");
    print!("{}", to_csv(&sweep.reports));
    for (name, fit) in DELAY_COLUMNS.iter().zip(&sweep.fits) {
        println!(
            "# fit {name}: slope={:.6e} s/fF intercept={:.6e} s r2={:.4}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(())
}

fn compare_cpa(cl: f64, out: Option<&Path>) -> Outcome {
    check_load(cl)?;
    let designs = Design::comparison();
    for d in &designs {
        verified(d)?;
    }
    let model = Timing::default();
    let reports = designs
        .iter()
        .map(|&d| bench_of(d)?.report(&model, cl).map_err(Failure::solver))
        .collect::<Result<Vec<_>, _>>()?;
    let cmp = Comparison { designs, reports };
    let csv = to_csv(&cmp.reports);
    let md = cmp.markdown();
    match out {
        Some(dir) => {
            let write = |name: &str, body: &str| {
                fs::write(dir.join(name), body)
                    .map_err(|e| Failure::design(format!("{}: {e}", dir.join(name).display())))
            };
            fs::create_dir_all(dir).map_err(|e| Failure::design(format!("{}: {e}", dir.display())))?;
            write("compare_cpa.csv", &csv)?;
            write("compare_cpa.md", &md)?;
            for (name, body) in cmp.plot_data() {
                write(&name, &body)?;
            }
            print!("{md}");
        }
        None => {
            print!("{csv}\n{md}");
        }
    }
    Ok(())
}

fn dump(design: Design) -> Outcome {
    print!("{}", netlist::serialize(&build(&design)?));
    Ok(())
}

fn parse_assignment(nl: &Netlist, text: &str) -> Result<Vec<(mvl_core::netlist::NetId, u32)>, Failure> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, digit) = item
            .split_once('=')
            .ok_or_else(|| Failure::design(format!("expected net=digit, got `{item}`")))?;
        let id = nl
            .lookup(name.trim())
            .ok_or_else(|| Failure::design(format!("no net named `{}`", name.trim())))?;
        let digit = digit
            .trim()
            .parse()
            .map_err(|_| Failure::design(format!("bad digit in `{item}`")))?;
        out.push((id, digit));
    }
    Ok(out)
}

fn run(file: &Path, inputs: &str) -> Outcome {
    let text = fs::read_to_string(file).map_err(|e| Failure::design(format!("{}: {e}", file.display())))?;
    let parsed = netlist::parse(&text).map_err(|e| Failure::design(format!("{}: {e}", file.display())))?;
    let nl = parsed.flatten().map_err(Failure::design)?;
    let assignment = parse_assignment(&nl, inputs)?;
    let stim = stimulus_from_digits(&nl, assignment).map_err(Failure::design)?;
    let state = solve_dc(&nl, &stim).map_err(|e| match e {
        SolveError::NonConvergence(_) => Failure::solver(e),
        other => Failure::design(other),
    })?;
    for id in nl.outputs() {
        let net = nl.net(id);
        let value = state.value(id);
        let digit = value
            .driven()
            .and_then(|v| nl.voltage_map(id).and_then(|m| m.decode(v)));
        match (value.driven(), digit) {
            (Some(v), Some(d)) => println!("{} {v} V digit {d}", net.name),
            (Some(v), None) => println!("{} {v} V (no level)", net.name),
            (None, _) => println!("{} {value:?}", net.name),
        }
    }
    if !state.is_conflict_free() {
        let names: Vec<String> = state
            .conflicts()
            .iter()
            .flat_map(|c| c.nets.iter().map(|&n| nl.net(n).name.clone()))
            .collect();
        return Err(Failure::solver(format!("conflicting drivers on {}", names.join(", "))));
    }
    Ok(())
}
