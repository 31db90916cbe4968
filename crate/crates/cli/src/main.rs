use clap::{Args, Parser, Subcommand, ValueEnum};
use evasion::complexes::{build_complex, detect_events_with, DetectOptions};
use evasion::fixtures::{all_fixtures, fixture, FIXTURES};
use evasion::model::{load_scenario, Scenario};
use evasion::oracle::{default_resolution, evasion_oracle, refine_until_stable};
use evasion::report::{analyze, barcode_svg, complex_svg, implication_table, AnalysisOptions};
use evasion::rotation::decide_evasion;
use evasion::stacked::{build_stacked_complex, dsg_criterion};
use evasion::stream::{ComplexKind, SimplicialEventStream};
use evasion::zigzag::{full_length_criterion, stream_barcode};
use evasion::{Error, ErrorClass, PrimeField};
use serde_json::json;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  file could not be read or written
  2  bad command line
  3  input could not be parsed or a parameter is invalid
  4  input violates a model requirement
  5  a change is not generic or is ambiguous within the tolerance
  6  coverage is disconnected (rotation decider only)
  7  the oracle did not stabilise under refinement
  8  algebraic inconsistency or size limit

Environment:
  EVASION_FIXTURES  directory searched by --fixture before the built-in set";

/// Decide whether an intruder can evade a moving sensor network.
#[derive(Parser)]
#[command(name = "evasion", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect the events of a scenario and print the event stream.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "cech")]
        complex: Kind,
        #[command(flatten)]
        common: Common,
    },
    /// Zigzag barcode and the full-length criterion.
    Zigzag {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Relative criterion on the stacked complex.
    Dsg {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Exact planar decision from the rotation system of the alpha complex.
    Evade {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Rasterised ground truth.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Halve the grid until the verdict repeats, at most this many times.
        #[arg(long)]
        refine: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every decider and check the implications between them.
    Report {
        #[command(flatten)]
        input: Input,
        /// Analyse every built-in fixture instead of one input.
        #[arg(long)]
        all_fixtures: bool,
        /// Skip the oracle.
        #[arg(long)]
        no_oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a barcode, a slice of the complex or the Reeb graph.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "barcode")]
        what: Picture,
        /// Time of the slice to draw.
        #[arg(long, default_value_t = 0.0)]
        at: f64,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in fixtures.
    Fixtures,
}

#[derive(Args)]
struct Input {
    /// Scenario or event-stream JSON; `-` reads standard input.
    path: Option<PathBuf>,
    /// Use a named fixture.
    #[arg(long, conflicts_with = "path")]
    fixture: Option<String>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    field: u32,
    /// Homology degree of the criterion.
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Time tolerance for simultaneous changes.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Oracle cell size.
    #[arg(long)]
    grid_h: Option<f64>,
    /// Oracle time step.
    #[arg(long)]
    grid_dt: Option<f64>,
    /// Leave timings out so output is reproducible.
    #[arg(long)]
    no_timings: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to a file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cech,
    Vr,
    Alpha,
}

impl From<Kind> for ComplexKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Cech => ComplexKind::Cech,
            Kind::Vr => ComplexKind::Vr,
            Kind::Alpha => ComplexKind::Alpha,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Svg,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Picture {
    Barcode,
    Slice,
    Reeb,
}

enum Failure {
    Io(String),
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Lib(e) => match e.class() {
                ErrorClass::Input => 3,
                ErrorClass::Validation => 4,
                ErrorClass::Genericity => 5,
                ErrorClass::Connectivity => 6,
                ErrorClass::Convergence => 7,
                ErrorClass::Algebra => 8,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(m) | Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

enum Loaded {
    Scenario(Scenario),
    Stream(SimplicialEventStream),
}

fn read_text(input: &Input) -> Out<String> {
    if let Some(name) = &input.fixture {
        if let Ok(dir) = std::env::var("EVASION_FIXTURES") {
            let p = PathBuf::from(dir).join(format!("{name}.json"));
            if p.exists() {
                return std::fs::read_to_string(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())));
            }
        }
        return Ok(fixture(name)?.to_json());
    }
    match input.path.as_deref() {
        None => Err(Failure::Usage("an input path or --fixture is required".into())),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn load(input: &Input) -> Out<Loaded> {
    let text = read_text(input)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    if value.get("sensors").is_some() {
        Ok(Loaded::Scenario(load_scenario(&text)?))
    } else {
        Ok(Loaded::Stream(SimplicialEventStream::from_json(&text)?))
    }
}

fn scenario(input: &Input) -> Out<Scenario> {
    match load(input)? {
        Loaded::Scenario(s) => Ok(s),
        Loaded::Stream(_) => Err(Failure::Lib(Error::InvalidParameter("this command needs a scenario, not an event stream".into()))),
    }
}

fn stream(input: &Input, kind: ComplexKind, c: &Common) -> Out<SimplicialEventStream> {
    match load(input)? {
        Loaded::Scenario(s) => Ok(detect_events_with(&s, kind, &detect(c))?),
        Loaded::Stream(es) if es.kind == kind || kind == ComplexKind::Cech => Ok(es),
        Loaded::Stream(es) => Err(Failure::Lib(Error::InvalidStream(format!("expected a {kind:?} stream, found {:?}", es.kind)))),
    }
}

fn detect(c: &Common) -> DetectOptions {
    DetectOptions { tol: c.tol, ..DetectOptions::default() }
}

fn emit(c: &Common, text: &str) -> Out<()> {
    match &c.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn only_json(c: &Common) -> Out<()> {
    if c.format == Format::Json {
        Ok(())
    } else {
        Err(Failure::Usage("this command only writes JSON".into()))
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn options(c: &Common, oracle: bool) -> AnalysisOptions {
    AnalysisOptions {
        field: c.field,
        degree: c.degree,
        tol: c.tol,
        oracle,
        grid_h: c.grid_h,
        grid_dt: c.grid_dt,
        timings: !c.no_timings,
    }
}

fn run(cli: Cli) -> Out<()> {
    match cli.command {
        Command::Simulate { input, complex, common } => {
            only_json(&common)?;
            let s = scenario(&input)?;
            let es = detect_events_with(&s, complex.into(), &detect(&common))?;
            emit(&common, &(es.to_json() + "\n"))
        }
        Command::Zigzag { input, common } => {
            only_json(&common)?;
            let f = PrimeField::new(common.field)?;
            let es = stream(&input, ComplexKind::Cech, &common)?;
            let barcode = stream_barcode(&es, common.degree, f)?;
            let verdict = full_length_criterion(&barcode, es.n());
            emit(&common, &pretty(&json!({ "events": es.n(), "degree": common.degree, "verdict": verdict, "barcode": barcode })))
        }
        Command::Dsg { input, common } => {
            only_json(&common)?;
            let f = PrimeField::new(common.field)?;
            let es = stream(&input, ComplexKind::Cech, &common)?;
            let sc = build_stacked_complex(&es)?;
            emit(&common, &pretty(&dsg_criterion(&sc, common.degree + 1, f)?))
        }
        Command::Evade { input, common } => {
            let es = stream(&input, ComplexKind::Alpha, &common)?;
            let d = decide_evasion(&es)?;
            match common.format {
                Format::Dot => emit(&common, &d.reeb.to_dot()),
                Format::Json => emit(&common, &pretty(&d)),
                Format::Svg => Err(Failure::Usage("evade writes json or dot".into())),
            }
        }
        Command::Oracle { input, refine, common } => {
            only_json(&common)?;
            let s = scenario(&input)?;
            let (h0, dt0) = default_resolution(&s);
            let (h, dt) = (common.grid_h.unwrap_or(h0), common.grid_dt.unwrap_or(dt0));
            let r = match refine {
                Some(k) => refine_until_stable(&s, h, dt, k)?,
                None => evasion_oracle(&s, h, dt)?,
            };
            emit(&common, &pretty(&r))
        }
        Command::Report { input, all_fixtures: all, no_oracle, common } => {
            only_json(&common)?;
            let opts = options(&common, !no_oracle);
            if all {
                let mut reports = Vec::new();
                for (info, s) in all_fixtures()? {
                    if info.suite {
                        reports.push((info.name.to_string(), analyze(&s, &opts)?));
                    }
                }
                eprint!("{}", implication_table(&reports));
                let map: serde_json::Map<String, serde_json::Value> =
                    reports.into_iter().map(|(n, r)| (n, serde_json::to_value(r).expect("report serializes"))).collect();
                emit(&common, &pretty(&map))
            } else {
                let report = analyze(&scenario(&input)?, &opts)?;
                emit(&common, &(report.to_json() + "\n"))
            }
        }
        Command::Render { input, what, at, common } => render(&input, what, at, &common),
        Command::Fixtures => {
            let mut text = String::new();
            for f in FIXTURES {
                text.push_str(&format!("{:28} {}\n", f.name, f.summary));
            }
            emit(&Common::parse_default(), &text)
        }
    }
}

fn render(input: &Input, what: Picture, at: f64, c: &Common) -> Out<()> {
    match what {
        Picture::Barcode => {
            let f = PrimeField::new(c.field)?;
            let es = stream(input, ComplexKind::Cech, c)?;
            let barcode = stream_barcode(&es, c.degree, f)?;
            match c.format {
                Format::Svg => emit(c, &barcode_svg(&barcode, &es.grid.sample_times, &format!("degree {} over F_{}", c.degree, c.field))),
                Format::Json => emit(c, &pretty(&barcode)),
                Format::Dot => Err(Failure::Usage("a barcode renders as svg or json".into())),
            }
        }
        Picture::Slice => {
            if c.format != Format::Svg {
                return Err(Failure::Usage("a slice renders as svg".into()));
            }
            let s = scenario(input)?;
            let points = s.positions(at)?;
            let k = build_complex(ComplexKind::Cech, &points, s.sensor_radius, 2)?;
            emit(c, &complex_svg(&points, s.sensor_radius, &k, s.domain.bounding_box(), &format!("t = {at}")))
        }
        Picture::Reeb => {
            if c.format != Format::Dot {
                return Err(Failure::Usage("a Reeb graph renders as dot".into()));
            }
            let es = stream(input, ComplexKind::Alpha, c)?;
            emit(c, &decide_evasion(&es)?.reeb.to_dot())
        }
    }
}

impl Common {
    fn parse_default() -> Self {
        Common {
            field: 2,
            degree: 1,
            tol: 1e-9,
            grid_h: None,
            grid_dt: None,
            no_timings: true,
            format: Format::Json,
            output: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
