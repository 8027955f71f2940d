//! Command-line front end: certificates, the rubber-band pipeline, volume
//! bounds, embroidery, half-twist filling, PD export and corpus
//! generation. Reports are JSON on standard output; a human summary goes to
//! standard error. Exit codes: 0 pass, 1 certified fail, 2 input or usage
//! error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};

use altcert::augment::{certify_hyperbolic, insert_half_twists, CheckItem, Witness};
use altcert::cage::{validate_cage, volume_bounds, CageGraph};
use altcert::corpus;
use altcert::embroidery::{embroider_annulus, embroider_disk, random_annular_tangle};
use altcert::io;
use altcert::report::RunReport;

#[derive(Parser)]
#[command(name = "altcert", version, about = "certificates for alternating links on surfaces")]
struct Cli {
    /// Suppress timing fields for byte-reproducible reports.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the hyperbolicity hypotheses of a diagram (optionally with
    /// an augmentation file).
    Check {
        diagram: PathBuf,
        augs: Option<PathBuf>,
    },
    /// Run the rubber-band pipeline on cage graphs: validate, derive the
    /// augmented alternating diagram, certify, and print volume bounds.
    Rubber {
        cages: Vec<PathBuf>,
        /// Use the mirror alternating assignment.
        #[arg(long)]
        mirror: bool,
        /// Write the derived augmented diagram next to the report.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Volume bounds of a cage graph's rubber band link.
    Bounds { cages: Vec<PathBuf> },
    /// Close a tangle by embroidery (disk, or annulus with a core
    /// augmentation).
    Embroider {
        tangle: PathBuf,
        #[arg(long)]
        annulus: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove an augmentation and splice half twists along it.
    Twist {
        augmented: PathBuf,
        #[arg(long)]
        aug_index: usize,
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the planar-diagram-style code of a diagram.
    ExportPd { diagram: PathBuf },
    /// Generate a random alternating tangle for the test corpus.
    GenTangle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        strands: usize,
        #[arg(long)]
        annulus: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Outcome {
    report: RunReport,
    code: u8,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn input_error(command: &str, input: &str, msg: String) -> Outcome {
    let mut report = RunReport::new(command, input, msg.as_bytes());
    report.checks.push(CheckItem::fail("input", Witness::Note { note: msg }));
    report.overall = Some(false);
    Outcome { report, code: 2 }
}

fn run_check(path: &PathBuf, augs: Option<&PathBuf>) -> Outcome {
    let name = path.display().to_string();
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return input_error("check", &name, e),
    };
    let augmented = match io::load_augmented(&text) {
        Ok(a) => a,
        Err(e) => return input_error("check", &name, e.to_string()),
    };
    let augmented = match augs {
        None => augmented,
        Some(ap) => {
            let atext = match read(ap) {
                Ok(t) => t,
                Err(e) => return input_error("check", &name, e),
            };
            match io::attach_augs(augmented.base, &atext) {
                Ok(a) => a,
                Err(e) => return input_error("check", &name, e.to_string()),
            }
        }
    };
    let cert = certify_hyperbolic(&augmented);
    let report = RunReport::new("check", &name, text.as_bytes()).with_certificate(&cert);
    Outcome { report, code: if cert.overall { 0 } else { 1 } }
}

fn run_rubber(path: &PathBuf, mirror: bool, export: Option<&PathBuf>) -> Outcome {
    let name = path.display().to_string();
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return input_error("rubber", &name, e),
    };
    let map = match io::load_map(&text) {
        Ok(m) => m,
        Err(e) => return input_error("rubber", &name, e.to_string()),
    };
    let mut report = RunReport::new("rubber", &name, text.as_bytes());
    let item = validate_cage(&map);
    report.checks.push(item.clone());
    if !item.passed() {
        report.overall = Some(false);
        return Outcome { report, code: 1 };
    }
    let cage = CageGraph::new(map).expect("validated");
    let derived = match altcert::cage::derived_augmented(&cage, mirror) {
        Ok(d) => d,
        Err(e) => return input_error("rubber", &name, e.to_string()),
    };
    if let Some(patch) = &derived.two_braid_patch {
        report.note(format!(
            "2-braid patch applied: replaced the half twist at cage edge {} with a full twist",
            patch.edge.0
        ));
    }
    let cert = certify_hyperbolic(&derived.augmented);
    let mut report = report.with_certificate(&cert);
    report.bounds = Some(volume_bounds(&cage));
    if let Some(out) = export {
        if let Err(e) = std::fs::write(out, io::augmented_to_json(&derived.augmented)) {
            return input_error("rubber", &name, format!("{}: {e}", out.display()));
        }
    }
    Outcome { report, code: if cert.overall { 0 } else { 1 } }
}

fn run_bounds(path: &PathBuf) -> Outcome {
    let name = path.display().to_string();
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return input_error("bounds", &name, e),
    };
    let map = match io::load_map(&text) {
        Ok(m) => m,
        Err(e) => return input_error("bounds", &name, e.to_string()),
    };
    let mut report = RunReport::new("bounds", &name, text.as_bytes());
    let item = validate_cage(&map);
    report.checks.push(item.clone());
    if !item.passed() {
        report.overall = Some(false);
        return Outcome { report, code: 1 };
    }
    let cage = CageGraph::new(map).expect("validated");
    report.bounds = Some(volume_bounds(&cage));
    report.overall = Some(true);
    Outcome { report, code: 0 }
}

fn run_embroider(path: &PathBuf, annulus: bool, out: Option<&PathBuf>) -> Outcome {
    let name = path.display().to_string();
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return input_error("embroider", &name, e),
    };
    let tangle = match io::load_tangle(&text) {
        Ok(t) => t,
        Err(e) => return input_error("embroider", &name, e.to_string()),
    };
    let mut report = RunReport::new("embroider", &name, text.as_bytes());
    let (artifact, cert) = if annulus {
        match embroider_annulus(&tangle) {
            Ok(result) => {
                report.note(format!(
                    "outer embroidery: {} new crossings; inner: {}; core augmentation punctures {} strands",
                    result.new_crossings_outer, result.new_crossings_inner, result.core_punctures
                ));
                let cert = certify_hyperbolic(&result.augmented);
                (io::augmented_to_json(&result.augmented), cert)
            }
            Err(e) => return input_error("embroider", &name, e.to_string()),
        }
    } else {
        match embroider_disk(&tangle) {
            Ok(result) => {
                report.note(format!(
                    "{} embroidery arcs, {} new crossings",
                    result.arcs, result.new_crossings
                ));
                let plain = altcert::AugmentedDiagram::plain(result.diagram.clone());
                let cert = certify_hyperbolic(&plain);
                (io::diagram_to_json(&result.diagram), cert)
            }
            Err(e) => return input_error("embroider", &name, e.to_string()),
        }
    };
    let mut report = report.with_certificate(&cert);
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &artifact) {
                return input_error("embroider", &name, format!("{}: {e}", p.display()));
            }
        }
        None => report.note(artifact),
    }
    Outcome { report, code: if cert.overall { 0 } else { 1 } }
}

fn run_twist(path: &PathBuf, aug_index: usize, k: i64, out: Option<&PathBuf>) -> Outcome {
    let name = path.display().to_string();
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return input_error("twist", &name, e),
    };
    let augmented = match io::load_augmented(&text) {
        Ok(a) => a,
        Err(e) => return input_error("twist", &name, e.to_string()),
    };
    let fill = match insert_half_twists(&augmented, aug_index, k) {
        Ok(f) => f,
        Err(e) => return input_error("twist", &name, e.to_string()),
    };
    let mut report = RunReport::new("twist", &name, text.as_bytes());
    report.note(format!(
        "spliced {} crossings; parity over_flag={} conflict={}",
        k.unsigned_abs(),
        fill.parity.over_flag,
        fill.parity.conflict
    ));
    report.overall = Some(!fill.parity.conflict);
    let artifact = io::augmented_to_json(&fill.augmented);
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &artifact) {
                return input_error("twist", &name, format!("{}: {e}", p.display()));
            }
        }
        None => report.note(artifact),
    }
    Outcome { report, code: if fill.parity.conflict { 1 } else { 0 } }
}

fn run_export_pd(path: &PathBuf) -> Result<String, Outcome> {
    let name = path.display().to_string();
    let text = read(path).map_err(|e| input_error("export-pd", &name, e))?;
    let d = io::load_diagram(&text)
        .map_err(|e| input_error("export-pd", &name, e.to_string()))?;
    Ok(d.export_pd())
}

fn thread_cap() -> usize {
    std::env::var("ALTCERT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Fan independent inputs across worker threads; output order follows input
/// order.
fn run_many<F>(inputs: &[PathBuf], f: F) -> Vec<Outcome>
where
    F: Fn(&PathBuf) -> Outcome + Sync,
{
    let n = inputs.len();
    let results: Vec<Mutex<Option<Outcome>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    let workers = thread_cap().min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = {
                    let mut guard = next.lock().unwrap();
                    if *guard >= n {
                        return;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let out = f(&inputs[i]);
                *results[i].lock().unwrap() = Some(out);
            });
        }
    });
    results.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

fn emit(mut outcomes: Vec<Outcome>, started: Instant, no_timing: bool) -> ExitCode {
    let mut code = 0u8;
    let n = outcomes.len();
    for o in &mut outcomes {
        if !no_timing {
            o.report.timing_ms = Some(started.elapsed().as_millis() / n.max(1) as u128);
        }
        println!("{}", o.report.to_json());
        eprint!("{}", o.report.summary());
        code = code.max(o.code);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Check { diagram, augs } => {
            emit(vec![run_check(&diagram, augs.as_ref())], started, cli.no_timing)
        }
        Command::Rubber { cages, mirror, export } => {
            if cages.is_empty() {
                eprintln!("rubber: no input files");
                return ExitCode::from(2);
            }
            let export = export.as_ref();
            let outcomes = if cages.len() == 1 {
                vec![run_rubber(&cages[0], mirror, export)]
            } else {
                run_many(&cages, |p| run_rubber(p, mirror, None))
            };
            emit(outcomes, started, cli.no_timing)
        }
        Command::Bounds { cages } => {
            if cages.is_empty() {
                eprintln!("bounds: no input files");
                return ExitCode::from(2);
            }
            emit(run_many(&cages, run_bounds), started, cli.no_timing)
        }
        Command::Embroider { tangle, annulus, out } => {
            emit(vec![run_embroider(&tangle, annulus, out.as_ref())], started, cli.no_timing)
        }
        Command::Twist { augmented, aug_index, k, out } => {
            if k == 0 {
                eprintln!("twist: k = 0 is not a twist");
                return ExitCode::from(2);
            }
            emit(vec![run_twist(&augmented, aug_index, k, out.as_ref())], started, cli.no_timing)
        }
        Command::ExportPd { diagram } => match run_export_pd(&diagram) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(outcome) => emit(vec![outcome], started, cli.no_timing),
        },
        Command::GenTangle { seed, strands, annulus, out } => {
            let tangle = if annulus {
                let mut rng = corpus::seeded_rng(seed);
                random_annular_tangle(&mut rng, strands.max(8))
            } else {
                corpus::random_tangle(seed, strands.max(4))
            };
            let text = io::tangle_to_json(&tangle);
            match out {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &text) {
                        eprintln!("gen-tangle: {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
    }
}
