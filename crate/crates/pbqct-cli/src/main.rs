//! `pbqct`: fidelities, sweeps, classification, channel simulation, and
//! signal-sum distances for the port-based quantum-correction teleportation
//! family, with deterministic CSV/JSON output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbqct_core::analysis::{
    classify, closed_form_fidelity, default_class_tolerance, has_closed_form, label_subsets, sweep,
    McSettings, Method, SweepPoint, DEFAULT_SEED,
};
use pbqct_core::protocol::{
    ent_from_tel_fidelity, signal_distance, signal_distance_min, signal_distance_numeric,
    tel_fidelity, tel_fidelity_monte_carlo, teleport_channel, OutcomeSet, SetFamily,
};
use pbqct_core::{haar, Error, StateVector, C64};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Environment variable naming the directory relative output paths resolve
/// against.
const OUT_DIR_ENV: &str = "PBQCT_OUT_DIR";

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "pbqct",
    version,
    about = "Port-based quantum-correction teleportation numerics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one fidelity record and print it as JSON.
    Fidelity(FidelityArgs),
    /// Evaluate a grid of protocols and write a CSV file.
    Sweep(SweepArgs),
    /// Bucket all size-k label subsets by brute-force fidelity.
    Classify(ClassifyArgs),
    /// Run the teleportation channel on a chosen input state.
    Simulate(SimulateArgs),
    /// Signal-sum distance to the scaled identity: closed form and check.
    Distance(DistanceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyTag {
    Pbt,
    Pbqct2,
    Pbqct3,
    ParallelSt,
    GenPbqct2,
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Closed form when the family has one, brute force otherwise.
    Auto,
    Closedform,
    Bruteforce,
    Montecarlo,
}

#[derive(Args)]
struct FidelityArgs {
    #[arg(long, value_enum)]
    family: FamilyTag,
    /// Qudit dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Number of ports.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Label list for --family custom, e.g. "0,0;1,2".
    #[arg(long)]
    pairs: Option<String>,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Qudit dimension; repeat for several.
    #[arg(long, required = true)]
    d: Vec<usize>,
    /// Port range, inclusive: "1..10" or a single value.
    #[arg(long)]
    n: NRange,
    /// Protocol family; repeat for several.
    #[arg(long, value_enum)]
    family: Vec<FamilyTag>,
    /// Sweep every label subset of this size (repeatable).
    #[arg(long = "subset-size")]
    subset_size: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Output CSV path (relative paths resolve against $PBQCT_OUT_DIR).
    #[arg(long)]
    out: PathBuf,
    /// Extra derived column: "inv-gap" emits 1/(1-F).
    #[arg(long)]
    transform: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: machine parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Subset size.
    #[arg(long)]
    k: usize,
    /// Fidelity bucketing tolerance (default 1e-9 for d=2, 1e-6 above).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    family: FamilyTag,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    pairs: Option<String>,
    /// Input state: zero | one | plus | haar.
    #[arg(long, default_value = "plus")]
    state: String,
    /// Seed for --state haar.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Per-port label-set size.
    #[arg(long)]
    p: usize,
    /// Also evaluate the distance at this alpha.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Clone)]
struct NRange {
    lo: usize,
    hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| format!("invalid port count '{t}'"))
        };
        if let Some((a, b)) = s.split_once("..") {
            let lo = parse(a)?;
            let hi = parse(b)?;
            if lo < 1 || hi < lo {
                return Err(format!("invalid port range '{s}'"));
            }
            Ok(NRange { lo, hi })
        } else {
            let v = parse(s)?;
            Ok(NRange { lo: v, hi: v })
        }
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    let mut pairs = Vec::new();
    for chunk in text.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (x, y) = chunk
            .split_once(',')
            .ok_or_else(|| Error::usage(format!("bad label '{chunk}', expected x,y")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::usage(format!("bad label component '{t}'")))
        };
        pairs.push((parse(x)?, parse(y)?));
    }
    if pairs.is_empty() {
        return Err(Error::usage("label list is empty"));
    }
    Ok(pairs)
}

fn resolve_family(tag: FamilyTag, pairs: &Option<String>) -> Result<SetFamily, Error> {
    Ok(match tag {
        FamilyTag::Pbt => SetFamily::Pbt,
        FamilyTag::Pbqct2 => SetFamily::Pbqct2,
        FamilyTag::Pbqct3 => SetFamily::Pbqct3,
        FamilyTag::ParallelSt => SetFamily::ParallelSt,
        FamilyTag::GenPbqct2 => SetFamily::GenPbqct2,
        FamilyTag::Custom => {
            let text = pairs
                .as_deref()
                .ok_or_else(|| Error::usage("--family custom requires --pairs"))?;
            SetFamily::Custom(parse_pairs(text)?)
        }
    })
}

fn resolve_method(arg: MethodArg, family: &SetFamily, d: usize) -> Method {
    match arg {
        MethodArg::Closedform => Method::ClosedForm,
        MethodArg::Bruteforce => Method::BruteForce,
        MethodArg::Montecarlo => Method::MonteCarlo,
        MethodArg::Auto => {
            if has_closed_form(family, d) {
                Method::ClosedForm
            } else {
                Method::BruteForce
            }
        }
    }
}

/// 12 significant digits, locale-independent.
fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn resolve_out_path(path: &PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path.clone();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.clone(),
    }
}

fn install_thread_pool(jobs: Option<usize>) {
    if let Some(j) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global();
    }
}

#[derive(Serialize)]
struct FidelityOut {
    schema_version: u32,
    d: usize,
    n: usize,
    family: String,
    set: String,
    method: String,
    #[serde(rename = "F")]
    ent_fidelity: f64,
    f: f64,
}

fn cmd_fidelity(args: &FidelityArgs) -> Result<(), Error> {
    let family = resolve_family(args.family, &args.pairs)?;
    let set = OutcomeSet::family(&family, args.d, args.n)?;
    let method = resolve_method(args.method, &family, args.d);
    let (ent, tel) = match method {
        Method::ClosedForm => {
            let f = closed_form_fidelity(&family, args.d, args.n)?;
            (f, tel_fidelity(f, args.d))
        }
        Method::BruteForce => {
            let f = pbqct_core::protocol::ent_fidelity_bruteforce(&set)?;
            (f, tel_fidelity(f, args.d))
        }
        Method::MonteCarlo => {
            let est = tel_fidelity_monte_carlo(&set, args.samples, args.seed)?;
            (ent_from_tel_fidelity(est.mean, args.d), est.mean)
        }
    };
    let out = FidelityOut {
        schema_version: SCHEMA_VERSION,
        d: args.d,
        n: args.n,
        family: family.tag().to_string(),
        set: set.descriptor(),
        method: method.tag().to_string(),
        ent_fidelity: ent,
        f: tel,
    };
    println!("{}", serde_json::to_string(&out).expect("serializable"));
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    install_thread_pool(args.jobs);
    if args.family.is_empty() && args.subset_size.is_empty() {
        return Err(Error::usage(
            "sweep needs at least one --family or --subset-size",
        ));
    }
    let inv_gap = match args.transform.as_deref() {
        None => false,
        Some("inv-gap") => true,
        Some(other) => {
            return Err(Error::usage(format!(
                "unknown transform '{other}' (supported: inv-gap)"
            )))
        }
    };

    let mut points = Vec::new();
    for &d in &args.d {
        for n in args.n.lo..=args.n.hi {
            for &tag in &args.family {
                if tag == FamilyTag::Custom {
                    return Err(Error::usage(
                        "custom sets are not sweepable; use --subset-size or the fidelity command",
                    ));
                }
                let family = resolve_family(tag, &None)?;
                let method = resolve_method(args.method, &family, d);
                points.push(SweepPoint {
                    d,
                    n_ports: n,
                    family,
                    method,
                });
            }
            for &k in &args.subset_size {
                for pairs in label_subsets(d, k)? {
                    let family = SetFamily::Custom(pairs);
                    let method = match args.method {
                        MethodArg::Auto => Method::BruteForce,
                        other => resolve_method(other, &family, d),
                    };
                    points.push(SweepPoint {
                        d,
                        n_ports: n,
                        family,
                        method,
                    });
                }
            }
        }
    }

    let (records, errors) = sweep(
        &points,
        McSettings {
            samples: args.samples,
            seed: args.seed,
        },
    );

    let out_path = resolve_out_path(&args.out);
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_usage)?;
        }
    }
    let mut csv = String::new();
    csv.push_str("d,n,set,method,F,f");
    if inv_gap {
        csv.push_str(",inv_gap");
    }
    csv.push('\n');
    for r in &records {
        csv.push_str(&format!(
            "{},{},{},{},{},{}",
            r.d,
            r.n_ports,
            r.set,
            r.method,
            fmt_sig(r.ent_fidelity),
            fmt_sig(r.tel_fidelity)
        ));
        if inv_gap {
            csv.push(',');
            csv.push_str(&fmt_sig(1.0 / (1.0 - r.ent_fidelity)));
        }
        csv.push('\n');
    }
    std::fs::write(&out_path, csv).map_err(io_usage)?;

    if !errors.is_empty() {
        let mut sidecar = String::new();
        for e in &errors {
            sidecar.push_str(&format!(
                "{},{},{},{},{}\n",
                e.d,
                e.n_ports,
                e.set,
                e.method,
                e.error.to_string().replace(',', ";")
            ));
        }
        let mut err_path = out_path.clone();
        err_path.set_extension("errors");
        std::fs::write(&err_path, sidecar).map_err(io_usage)?;
    }

    eprintln!(
        "wrote {} rows to {} ({} failed)",
        records.len(),
        out_path.display(),
        errors.len()
    );
    if records.is_empty() {
        if let Some(first) = errors.first() {
            return Err(first.error.clone());
        }
        return Err(Error::usage("sweep produced no points"));
    }
    Ok(())
}

fn io_usage(e: std::io::Error) -> Error {
    Error::usage(format!("io error: {e}"))
}

#[derive(Serialize)]
struct ClassifyOut {
    schema_version: u32,
    d: usize,
    n: usize,
    k: usize,
    tolerance: f64,
    classes: Vec<ClassOut>,
}

#[derive(Serialize)]
struct ClassOut {
    #[serde(rename = "F")]
    ent_fidelity: f64,
    f: f64,
    spread: f64,
    size: usize,
    members: Vec<String>,
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Error> {
    install_thread_pool(args.jobs);
    let tol = args.tol.unwrap_or_else(|| default_class_tolerance(args.d));
    let report = classify(args.d, args.n, args.k, tol)?;
    let out = ClassifyOut {
        schema_version: SCHEMA_VERSION,
        d: report.d,
        n: report.n_ports,
        k: report.subset_size,
        tolerance: report.tolerance,
        classes: report
            .classes
            .iter()
            .map(|c| ClassOut {
                ent_fidelity: c.fidelity,
                f: tel_fidelity(c.fidelity, report.d),
                spread: c.spread,
                size: c.members.len(),
                members: c.members.clone(),
            })
            .collect(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulateOut {
    schema_version: u32,
    d: usize,
    n: usize,
    family: String,
    set: String,
    state: String,
    weights: Vec<WeightOut>,
    /// Output density matrix, row-major, entries as [re, im].
    rho_out: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct WeightOut {
    port: usize,
    label: String,
    weight: f64,
}

fn input_state(name: &str, d: usize, seed: u64) -> Result<StateVector, Error> {
    match name {
        "zero" => StateVector::basis(d, 0),
        "one" => StateVector::basis(d, 1),
        "plus" => {
            let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
            StateVector::unit(vec![amp; d], None)
        }
        "haar" => haar::haar_state(d, seed),
        other => Err(Error::usage(format!(
            "unknown state '{other}' (zero | one | plus | haar)"
        ))),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let family = resolve_family(args.family, &args.pairs)?;
    let set = OutcomeSet::family(&family, args.d, args.n)?;
    let rho = input_state(&args.state, args.d, args.seed)?.projector();
    let result = teleport_channel(&set, &rho)?;
    let dim = result.output.dim();
    let rho_out: Vec<Vec<[f64; 2]>> = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    let z = result.output.entry(r, c);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let out = SimulateOut {
        schema_version: SCHEMA_VERSION,
        d: args.d,
        n: args.n,
        family: family.tag().to_string(),
        set: set.descriptor(),
        state: args.state.clone(),
        weights: result
            .weights
            .iter()
            .map(|w| WeightOut {
                port: w.port,
                label: format!("{}.{}", w.label.0, w.label.1),
                weight: w.weight,
            })
            .collect(),
        rho_out,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

#[derive(Serialize)]
struct DistanceOut {
    schema_version: u32,
    d: usize,
    n: usize,
    p: usize,
    alpha_star: f64,
    minimum: f64,
    /// Direct dense evaluation at alpha_star.
    numeric_check: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

fn cmd_distance(args: &DistanceArgs) -> Result<(), Error> {
    let (alpha_star, minimum) = signal_distance_min(args.d, args.n, args.p)?;
    let numeric_check = signal_distance_numeric(args.d, args.n, args.p, alpha_star)?;
    let value = match args.alpha {
        Some(a) => Some(signal_distance(args.d, args.n, args.p, a)?),
        None => None,
    };
    let out = DistanceOut {
        schema_version: SCHEMA_VERSION,
        d: args.d,
        n: args.n,
        p: args.p,
        alpha_star,
        minimum,
        numeric_check,
        alpha: args.alpha,
        value,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Usage(_) => 2,
        Error::Capacity { .. } => 3,
        Error::Domain(_) | Error::DimensionMismatch { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fidelity(args) => cmd_fidelity(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Distance(args) => cmd_distance(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut stderr = std::io::stderr();
            let _ = writeln!(stderr, "error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
