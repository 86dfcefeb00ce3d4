//! The `gramsey` command line.
//!
//! Exit codes: 0 success (solution, found, accepted), 1 input error,
//! 2 obstruction, 3 no monochromatic image or exhausted search,
//! 4 certificate rejected by `--verify`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::format::{self, ColoringFile, IprCertificateFile, SearchReportFile, SetFile};
use crate::gaussian::GaussInt;
use crate::largeness::{self, Family};
use crate::linalg::{self, IprCertificate, MatrixQi};
use crate::search::{self, PreservationFamily, PreservationParams, SearchOutcome, SCOPE};
use crate::window::GaussSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_OBSTRUCTION: i32 = 2;
pub const EXIT_ABSENT: i32 = 3;
pub const EXIT_REJECTED: i32 = 4;

pub const THREADS_ENV: &str = "GRAMSEY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "gramsey", version, about = "Image partition regularity experiments over the Gaussian integers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether A·s = 1 is solvable and emit the certificate.
    Certify(CertifyArgs),
    /// Search for a monochromatic image A·z under a coloring.
    Search(SearchArgs),
    /// Run every largeness detector on a set.
    Classify(ClassifyArgs),
    /// Finite re-enactments of the abundance, preservation and congruence arguments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Print built-in matrices in the matrix file format.
    #[command(subcommand)]
    Matrix(MatrixCommand),
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(required_unless_present = "verify")]
    pub matrix: Option<PathBuf>,
    /// Re-check a certificate file instead.
    #[arg(long, conflicts_with = "matrix")]
    pub verify: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(required_unless_present = "verify")]
    pub matrix: Option<PathBuf>,
    #[arg(required_unless_present = "verify")]
    pub coloring: Option<PathBuf>,
    #[arg(long, required_unless_present = "verify", value_parser = clap::value_parser!(u32).range(1..))]
    pub search_radius: Option<u32>,
    /// Window radius, overriding the coloring file.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Re-check a search report instead.
    #[arg(long, conflicts_with_all = ["matrix", "coloring"])]
    pub verify: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SetInput {
    pub set: PathBuf,
    /// Window radius, overriding the set file.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: SetInput,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub g_radius: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub f_radius: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Share of the image set landing in C^u, with IP and Δ evidence.
    Abundance {
        matrix: PathBuf,
        #[command(flatten)]
        input: SetInput,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        search_radius: u32,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Classify C, then the preimage W = {z : A·z ∈ C^u} for one family.
    Preservation {
        matrix: PathBuf,
        #[command(flatten)]
        input: SetInput,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        search_radius: u32,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        g_radius: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        f_radius: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Congruence check against the obstruction of A.
    Proofcheck {
        matrix: PathBuf,
        #[arg(long)]
        l: GaussInt,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        search_radius: u32,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum FamilyArg {
    Ip,
    Delta,
    Ps,
    Thick,
}

impl From<FamilyArg> for PreservationFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Ip => PreservationFamily::Ip,
            FamilyArg::Delta => PreservationFamily::Delta,
            FamilyArg::Ps => PreservationFamily::Ps,
            FamilyArg::Thick => PreservationFamily::Thick,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum MatrixCommand {
    /// The (l+1)×2 matrix whose images are progressions a, a+d, …, a+ld.
    Progression {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        length: u32,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn context(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

fn load_matrix(path: &Path) -> Result<MatrixQi> {
    format::parse_matrix(&read(path)?).map_err(|e| context(path, e))
}

fn load_set(input: &SetInput) -> Result<GaussSet> {
    let file = SetFile::parse(&read(&input.set)?).map_err(|e| context(&input.set, e))?;
    file.build(input.radius, input.seed)
}

fn emit<T: Serialize>(output: &Output, value: &T) -> Result<()> {
    let text = format::to_json(value);
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn certify(args: &CertifyArgs) -> Result<i32> {
    if let Some(path) = &args.verify {
        let file: IprCertificateFile = format::from_json(&read(path)?).map_err(|e| context(path, e))?;
        let cert = file.certificate()?;
        let accepted = linalg::verify_certificate(&file.matrix, &cert);
        emit(
            &args.output,
            &json!({ "kind": cert.kind(), "accepted": accepted }),
        )?;
        return Ok(if accepted { EXIT_OK } else { EXIT_REJECTED });
    }
    let a = load_matrix(args.matrix.as_deref().expect("clap requires MATRIX"))?;
    let cert = linalg::certify(&a);
    let verified = linalg::verify_certificate(&a, &cert);
    emit(&args.output, &IprCertificateFile::new(&a, &cert, verified))?;
    if !verified {
        return Err(Error::Invalid("internal certificate failed re-verification".into()));
    }
    Ok(match cert {
        IprCertificate::Solution(_) => EXIT_OK,
        IprCertificate::Obstruction(_) => EXIT_OBSTRUCTION,
    })
}

fn verify_search(path: &Path, output: &Output) -> Result<i32> {
    let file: SearchReportFile = format::from_json(&read(path)?).map_err(|e| context(path, e))?;
    let coloring = file.coloring.build(None, file.seed)?;
    let accepted = match (&file.status[..], &file.certificate) {
        ("found", Some(cert)) => search::verify_image_certificate(&file.matrix, &coloring, cert),
        _ => false,
    };
    emit(output, &json!({ "status": file.status, "accepted": accepted }))?;
    Ok(if accepted { EXIT_OK } else { EXIT_REJECTED })
}

fn search_cmd(args: &SearchArgs) -> Result<i32> {
    if let Some(path) = &args.verify {
        return verify_search(path, &args.output);
    }
    let a = load_matrix(args.matrix.as_deref().expect("clap requires MATRIX"))?;
    let cpath = args.coloring.as_deref().expect("clap requires COLORING");
    let cfile = ColoringFile::parse(&read(cpath)?)
        .map_err(|e| context(cpath, e))?
        .resolved(args.radius)?;
    let coloring = cfile.build(None, args.seed)?;
    let search_radius = args.search_radius.expect("clap requires --search-radius");
    let outcome = search::search_monochromatic(&a, &coloring, search_radius)?;
    let mut report = SearchReportFile {
        scope: SCOPE.into(),
        matrix: a.clone(),
        coloring: cfile,
        seed: args.seed,
        search_radius,
        status: String::new(),
        scanned: None,
        in_window: None,
        certificate: None,
        verified: false,
    };
    let code = match outcome {
        SearchOutcome::Found(cert) => {
            report.status = "found".into();
            report.verified = search::verify_image_certificate(&a, &coloring, &cert);
            report.certificate = Some(cert);
            EXIT_OK
        }
        SearchOutcome::NoMonochromatic { in_window, scanned } => {
            report.status = "no-monochromatic".into();
            report.in_window = Some(in_window);
            report.scanned = Some(scanned);
            EXIT_ABSENT
        }
        SearchOutcome::Exhausted { scanned } => {
            report.status = "exhausted".into();
            report.in_window = Some(0);
            report.scanned = Some(scanned);
            EXIT_ABSENT
        }
    };
    emit(&args.output, &report)?;
    if code == EXIT_OK && !report.verified {
        return Err(Error::Invalid("internal certificate failed re-verification".into()));
    }
    Ok(code)
}

#[derive(Serialize)]
struct Notion {
    notion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn notion(name: &'static str, holds: bool, witness: Option<Value>) -> Notion {
    Notion {
        notion: name,
        holds: Some(holds),
        witness,
        note: None,
    }
}

fn out_of_scope(name: &'static str) -> Notion {
    Notion {
        notion: name,
        holds: None,
        witness: None,
        note: Some("out of scope: non-constructive"),
    }
}

fn star(set: &GaussSet, name: &'static str, family: Family, k: usize) -> Result<Notion> {
    let w = family.witness(&set.complement(), k)?;
    Ok(notion(
        name,
        w.is_none(),
        w.map(|seq| json!({ "complement_contains": seq })),
    ))
}

fn classify_report(set: &GaussSet, k: usize, g: u32, f: u32) -> Result<Value> {
    let syn = largeness::is_syndetic(set, g)?;
    let ps = largeness::is_piecewise_syndetic(set, g, f)?;
    let ps_complement = largeness::is_piecewise_syndetic(&set.complement(), g, f)?;
    let thick = largeness::is_thick(set, f)?;
    let ip = largeness::contains_ip(set, k)?;
    let delta = largeness::contains_delta(set, k)?;
    let notions = vec![
        notion("syndetic", syn.is_some(), syn.map(|w| json!(w))),
        notion("piecewise_syndetic", ps.is_some(), ps.map(|w| json!(w))),
        notion("thick", thick.is_some(), thick.map(|x| json!({ "offset": x }))),
        notion("ip", ip.is_some(), ip.map(|s| json!({ "sequence": s }))),
        notion("delta", delta.is_some(), delta.map(|s| json!({ "sequence": s }))),
        star(set, "ip_star", Family::Ip, k)?,
        star(set, "delta_star", Family::Delta, k)?,
        notion(
            "ps_star",
            ps_complement.is_none(),
            ps_complement.map(|w| json!({ "complement_piecewise_syndetic": w })),
        ),
        out_of_scope("central"),
        out_of_scope("central_star"),
    ];
    Ok(json!({
        "scope": SCOPE,
        "window": set.window(),
        "members": set.len(),
        "depth": k,
        "g_radius": g,
        "f_radius": f,
        "notions": notions,
    }))
}

fn classify(args: &ClassifyArgs) -> Result<i32> {
    let set = load_set(&args.input)?;
    let report = classify_report(&set, args.depth, args.g_radius, args.f_radius)?;
    emit(&args.output, &report)?;
    Ok(EXIT_OK)
}

fn experiment(kind: &Experiment) -> Result<i32> {
    match kind {
        Experiment::Abundance {
            matrix,
            input,
            search_radius,
            depth,
            output,
        } => {
            let a = load_matrix(matrix)?;
            let c = load_set(input)?;
            emit(output, &search::abundance_report(&a, &c, *search_radius, *depth)?)?;
        }
        Experiment::Preservation {
            matrix,
            input,
            family,
            search_radius,
            depth,
            g_radius,
            f_radius,
            output,
        } => {
            let a = load_matrix(matrix)?;
            let c = load_set(input)?;
            let params = PreservationParams {
                family: (*family).into(),
                depth: *depth,
                search_radius: *search_radius,
                g_radius: *g_radius,
                f_radius: *f_radius,
            };
            emit(output, &search::preservation_experiment(&a, &c, params)?)?;
        }
        Experiment::Proofcheck {
            matrix,
            l,
            search_radius,
            output,
        } => {
            let a = load_matrix(matrix)?;
            emit(output, &search::congruence_proofcheck(&a, l, *search_radius)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn matrix_cmd(cmd: &MatrixCommand) -> Result<i32> {
    match cmd {
        MatrixCommand::Progression { length } => {
            print!("{}", format::format_matrix(&MatrixQi::progression(*length as usize)));
        }
    }
    Ok(EXIT_OK)
}

/// Size the global thread pool from `GRAMSEY_THREADS` (unset or 0 = auto).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`")))?;
    // A second initialization (e.g. in tests) keeps the existing pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Certify(args) => certify(args),
        Command::Search(args) => search_cmd(args),
        Command::Classify(args) => classify(args),
        Command::Experiment(kind) => experiment(kind),
        Command::Matrix(cmd) => matrix_cmd(cmd),
    }
}

/// Parse arguments, run, and map every outcome to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
