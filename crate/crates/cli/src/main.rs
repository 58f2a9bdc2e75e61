use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gatevm::bench::{default_fleet, run_experiment, ExperimentConfig};
use gatevm::runtime::{
    default_workers, evaluate, fragment_metrics, load_fleet, schedule, ExecMode, QpuModel,
    WORKERS_ENV,
};
use gatevm::transpile::{cnot_count, depth, esp, map_and_route};
use gatevm::{
    compile, parse_qasm, run_exact, Circuit, Compiled, CompiledProgram, Error, PassConfig, PassKind,
};

const EXIT_PIPELINE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gatevm",
    version,
    about = "Gate-virtualization compiler and runtime"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an OpenQASM 2 file and print a summary.
    Parse {
        file: PathBuf,
        /// Print the normalised QASM instead of the summary.
        #[arg(long)]
        emit: bool,
    },
    /// Virtualize gates and extract fragments into a program file.
    Compile {
        file: PathBuf,
        #[arg(short, long, default_value = "program.json")]
        output: PathBuf,
        #[command(flatten)]
        passes: PassArgs,
        /// Write the operation and qubit graphs as DOT files into this directory.
        #[arg(long)]
        dump_graphs: Option<PathBuf>,
    },
    /// Schedule, execute and knit a compiled program.
    Run {
        program: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        /// Fleet description; a 27-qubit heavy-hex device when absent.
        #[arg(long)]
        fleet: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Depth, CNOT count, ESP and dependency count as JSON rows.
    Stats {
        /// A QASM circuit, or a compiled program (`.json`).
        file: PathBuf,
        #[command(flatten)]
        passes: PassArgs,
        #[arg(long)]
        fleet: Option<PathBuf>,
    },
    /// Run an experiment config and write the CSV report.
    Bench {
        config: PathBuf,
        /// CSV report path; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-case stage timings as JSON.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Compile, knit exactly and compare with full simulation.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        passes: PassArgs,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct PassArgs {
    /// Largest fragment width; half the circuit width, rounded up, by default.
    #[arg(long)]
    max_fragment_size: Option<usize>,
    /// Most gates to virtualize.
    #[arg(long, default_value_t = 3)]
    budget: usize,
    /// Use the exhaustive pass variants.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma separated passes out of cc, dr, qr.
    #[arg(long, default_value = "cc,dr,qr")]
    passes: String,
}

impl PassArgs {
    fn compile(&self, c: &Circuit) -> Result<Compiled> {
        let kinds = PassKind::parse_list(&self.passes)?;
        let cfg = PassConfig::new(
            self.max_fragment_size.unwrap_or(c.num_qubits.div_ceil(2)),
            self.budget,
        )
        .with_seed(self.seed)
        .with_exact(self.exact);
        Ok(compile(c, &kinds, &cfg)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args)]
struct ExecArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 20_000)]
    shots: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ExecArgs {
    fn mode(&self) -> ExecMode {
        match self.mode {
            Mode::Exact => ExecMode::Exact,
            Mode::Sampled => ExecMode::Sampled { shots: self.shots },
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    Ok(parse_qasm(&read(path)?)?)
}

fn read_fleet(path: Option<&Path>) -> Result<Vec<QpuModel>> {
    match path {
        Some(p) => Ok(load_fleet(&read(p)?)?),
        None => Ok(default_fleet()),
    }
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse(file: &Path, emit: bool) -> Result<()> {
    let c = read_circuit(file)?;
    if emit {
        print!("{}", gatevm::emit_qasm(&c));
        return Ok(());
    }
    print_json(&json!({
        "name": c.name,
        "num_qubits": c.num_qubits,
        "num_clbits": c.num_clbits,
        "instructions": c.len(),
        "two_qubit_gates": c.two_qubit_count(),
        "depth": depth(&c),
    }))
}

fn compile_cmd(file: &Path, output: &Path, passes: &PassArgs, dump: Option<&Path>) -> Result<()> {
    let c = read_circuit(file)?;
    let compiled = passes.compile(&c)?;
    fs::write(output, compiled.program.to_json()?)
        .with_context(|| format!("writing {}", output.display()))?;
    if let Some(dir) = dump {
        fs::create_dir_all(dir)?;
        fs::write(
            dir.join("op_graph.dot"),
            compiled.virtual_circuit.op_graph_dot(),
        )?;
        fs::write(
            dir.join("qubit_graph.dot"),
            compiled.virtual_circuit.qubit_graph_dot(),
        )?;
    }
    let vc = &compiled.virtual_circuit;
    print_json(&json!({
        "program": output,
        "passes": compiled.records,
        "virtual_gates": vc.virtual_gates().len(),
        "fragment_widths": compiled.program.fragments.iter().map(|f| f.width()).collect::<Vec<_>>(),
        "dependencies": vc.dependency_count(),
        "instances": compiled.program.fragments.iter().map(|f| f.num_instances()).sum::<u128>(),
    }))
}

fn run(program: &Path, exec: &ExecArgs, fleet: Option<&Path>, alpha: f64, beta: f64) -> Result<()> {
    let program = CompiledProgram::from_json(&read(program)?)?;
    let mut fleet = read_fleet(fleet)?;
    let assignments = schedule(&program, &mut fleet, alpha, beta)?;
    let workers = exec.workers.unwrap_or_else(default_workers);
    let dist = evaluate(&program, exec.mode(), exec.seed, workers)?;
    print_json(&json!({ "schedule": assignments, "distribution": dist }))
}

#[derive(Serialize)]
struct StatsRow {
    circuit: String,
    qpu: String,
    width: usize,
    depth: usize,
    cnots: usize,
    esp: f64,
    dependencies: Option<usize>,
}

fn stats(file: &Path, passes: &PassArgs, fleet: Option<&Path>) -> Result<()> {
    let fleet = read_fleet(fleet)?;
    let qpu = |width: usize| -> Result<&QpuModel> {
        fleet
            .iter()
            .filter(|q| q.num_qubits >= width)
            .max_by(|a, b| {
                a.num_qubits
                    .cmp(&b.num_qubits)
                    .then_with(|| b.name.cmp(&a.name))
            })
            .with_context(|| format!("no QPU in the fleet has {width} qubits"))
    };
    let mut rows = Vec::new();
    let fragment_rows =
        |program: &CompiledProgram, deps: Option<usize>, rows: &mut Vec<StatsRow>| -> Result<()> {
            for (j, f) in program.fragments.iter().enumerate() {
                let q = qpu(f.width())?;
                let (d, cx, e) = fragment_metrics(f, q)?;
                rows.push(StatsRow {
                    circuit: format!("fragment_{j}"),
                    qpu: q.name.clone(),
                    width: f.width(),
                    depth: d,
                    cnots: cx,
                    esp: e,
                    dependencies: deps,
                });
            }
            Ok(())
        };
    if file.extension().is_some_and(|e| e == "json") {
        let program = CompiledProgram::from_json(&read(file)?)?;
        fragment_rows(&program, None, &mut rows)?;
    } else {
        let c = read_circuit(file)?;
        let q = qpu(c.num_qubits)?;
        let pc = map_and_route(&c, q)?;
        let uncut = gatevm::VirtualCircuit::from_circuit(&c)?;
        rows.push(StatsRow {
            circuit: "original".into(),
            qpu: q.name.clone(),
            width: c.num_qubits,
            depth: depth(&pc.circuit),
            cnots: cnot_count(&pc.circuit),
            esp: esp(&pc.circuit, &q.errors),
            dependencies: Some(uncut.dependency_count()),
        });
        if !passes.passes.trim().is_empty() {
            let compiled = passes.compile(&c)?;
            fragment_rows(
                &compiled.program,
                Some(compiled.virtual_circuit.dependency_count()),
                &mut rows,
            )?;
        }
    }
    print_json(&rows)
}

fn bench(config: &Path, output: Option<&Path>, timings: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::from_json(&read(config)?)?;
    let report = run_experiment(&cfg)?;
    let csv = report.to_csv()?;
    match output {
        Some(p) => fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{csv}"),
    }
    if let Some(p) = timings {
        fs::write(p, report.timings_json()?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn verify(file: &Path, passes: &PassArgs, tolerance: f64, workers: Option<usize>) -> Result<bool> {
    let c = read_circuit(file)?;
    let compiled = passes.compile(&c)?;
    let workers = workers.unwrap_or_else(default_workers);
    let knitted = evaluate(&compiled.program, ExecMode::Exact, 0, workers)?;
    let ideal = run_exact(&c)?;
    let err = knitted.l_inf_distance(&ideal);
    let ok = err <= tolerance;
    print_json(&json!({
        "virtual_gates": compiled.virtual_circuit.virtual_gates().len(),
        "fragments": compiled.program.fragments.len(),
        "l_inf": err,
        "tolerance": tolerance,
        "ok": ok,
    }))?;
    Ok(ok)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse { file, emit } => parse(&file, emit)?,
        Command::Compile {
            file,
            output,
            passes,
            dump_graphs,
        } => compile_cmd(&file, &output, &passes, dump_graphs.as_deref())?,
        Command::Run {
            program,
            exec,
            fleet,
            alpha,
            beta,
        } => run(&program, &exec, fleet.as_deref(), alpha, beta)?,
        Command::Stats {
            file,
            passes,
            fleet,
        } => stats(&file, &passes, fleet.as_deref())?,
        Command::Bench {
            config,
            output,
            timings,
        } => bench(&config, output.as_deref(), timings.as_deref())?,
        Command::Verify {
            file,
            passes,
            tolerance,
            workers,
        } => {
            if tolerance.is_nan() || tolerance < 0.0 {
                bail!("tolerance must be non-negative");
            }
            if !verify(&file, &passes, tolerance, workers)? {
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::WidthUnreachable { .. }) => ExitCode::from(EXIT_PIPELINE),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
