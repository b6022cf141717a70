use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use isoperimetry::fk::{chord, is_fk_convex, transformed_test, SampledFunction, Sense};
use isoperimetry::manifold::cutlocus::polyline_rows;
use isoperimetry::manifold::{build_ambient, point_cut_locus, Point};
use isoperimetry::scenario::{
    emit_csv, emit_json, emit_plotdata, exit_code, load_scenario, parse_range, parse_report_document, run,
    tabulate_kernels, write_reports, Format,
};
use isoperimetry::suite::Status;
use isoperimetry::{CurvatureContext, Error, Result};

/// Exit status for engine, parse and I/O errors.
const ERROR_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "isoperimetry", version, about = "Numerical checks of sharp isoperimetric-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Plotdata,
}

impl From<ReportFormat> for Format {
    fn from(f: ReportFormat) -> Self {
        match f {
            ReportFormat::Json => Format::Json,
            ReportFormat::Csv => Format::Csv,
            ReportFormat::Plotdata => Format::Plotdata,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Convex,
    Concave,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verifier of a scenario file.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's inequality tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Boundary quadrature points per parameter (rounded up to whole panels).
        #[arg(long)]
        samples: Option<usize>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write reports.json, reports.csv and plot data here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the space-form kernels as CSV.
    Kernels {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long)]
        n: usize,
        /// Grid as A:B:STEP.
        #[arg(long)]
        range: String,
        /// Tube radius for a j_k column; may be repeated.
        #[arg(long)]
        rho: Vec<f64>,
    },
    /// Cut locus of a point on the scenario's closed surface, as CSV polylines.
    Cutlocus {
        #[arg(long)]
        scenario: PathBuf,
        /// Chart coordinates X,Y.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Override the scenario's direction count.
        #[arg(long)]
        directions: Option<usize>,
    },
    /// Convert a saved JSON report document.
    Report {
        #[arg(long, value_enum)]
        format: ReportFormat,
        #[arg(long)]
        input: PathBuf,
        /// Write files here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// F_k chords and convexity tests.
    #[command(subcommand)]
    Fk(FkCommand),
}

#[derive(Subcommand)]
enum FkCommand {
    /// Coefficients of the chord α s_k + β c_k through two points.
    Chord {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, allow_hyphen_values = true)]
        y1: f64,
        #[arg(long, allow_hyphen_values = true)]
        x2: f64,
        #[arg(long, allow_hyphen_values = true)]
        y2: f64,
    },
    /// Test a sampled function (CSV with columns t,value) for F_k-convexity.
    Convexity {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "convex")]
        sense: SenseArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Verify { scenario, tol, samples, jobs, out } => verify(&scenario, tol, samples, jobs, out.as_deref()),
        Command::Kernels { k, n, range, rho } => {
            let grid = parse_range(&range)?;
            print(&tabulate_kernels(k, n, &grid, &rho)?)?;
            Ok(0)
        }
        Command::Cutlocus { scenario, point, directions } => cutlocus(&scenario, &point, directions),
        Command::Report { format, input, out } => report(format.into(), &input, out.as_deref()),
        Command::Fk(cmd) => fk(cmd),
    }
}

/// Writes to standard output; a closed pipe ends output quietly.
fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn verify(path: &Path, tol: Option<f64>, samples: Option<usize>, jobs: usize, out: Option<&Path>) -> Result<u8> {
    let mut scenario = load_scenario(path)?;
    if let Some(t) = tol {
        scenario.tolerances.inequality = t;
    }
    if let Some(n) = samples {
        let order = scenario.resolution.order;
        scenario.resolution.boundary_panels = n.div_ceil(order).max(1);
    }
    scenario.validate()?;
    let reports = run(&scenario, jobs)?;
    let mut text = String::new();
    for r in &reports {
        let status = match r.status {
            Status::Pass => "pass",
            Status::InequalityFailure => "FAIL",
            Status::HypothesisFailure => "hypothesis-failure",
            Status::NotApplicable => "not-applicable",
            Status::EngineError => "ERROR",
        };
        text += &format!(
            "{:<20} {:<18} margin {:>+.6e}  lhs {:.9e}  rhs {:.9e}  [{}]\n",
            r.theorem_id, status, r.margin, r.lhs, r.rhs, r.binding_check
        );
        if r.status != Status::Pass {
            for n in r.notes.iter().chain(std::iter::once(&r.hypothesis.detail).filter(|d| !d.is_empty())) {
                text += &format!("    {n}\n");
            }
        }
    }
    print(&text)?;
    if let Some(dir) = out {
        for f in [Format::Json, Format::Csv, Format::Plotdata] {
            write_reports(&reports, f, dir)?;
        }
    }
    Ok(exit_code(&reports) as u8)
}

fn parse_point(s: &str) -> Result<Point> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("point \"{s}\": {e}"))))
        .collect::<Result<_>>()?;
    if coords.len() != 2 {
        return Err(Error::Parse(format!("point \"{s}\" must be X,Y")));
    }
    Ok(Point::from_vec(coords))
}

fn cutlocus(path: &Path, point: &str, directions: Option<usize>) -> Result<u8> {
    let scenario = load_scenario(path)?;
    let spec = scenario.ambient.as_ref().unwrap_or(&scenario.manifold);
    let amb = build_ambient(spec)?;
    if amb.dim() != 2 {
        return Err(Error::Validation("cut loci are computed on surfaces only".into()));
    }
    let x0 = parse_point(point)?;
    let locus = point_cut_locus(amb.as_ref(), &x0, directions.unwrap_or(scenario.resolution.directions))?;
    let mut text = String::from("direction_index,t,chart_x,chart_y\n");
    for (i, t, x, y) in polyline_rows(&locus) {
        text.push_str(&format!("{i},{t:.8e},{x:.8e},{y:.8e}\n"));
    }
    print(&text)?;
    eprintln!("rad {:.9e}  measure {:.9e}  tolerance {:.3e}", locus.rad, locus.measure, locus.tolerance);
    Ok(0)
}

fn report(format: Format, input: &Path, out: Option<&Path>) -> Result<u8> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let reports = parse_report_document(&text)?;
    if let Some(dir) = out {
        for p in write_reports(&reports, format, dir)? {
            eprintln!("wrote {}", p.display());
        }
        return Ok(0);
    }
    match format {
        Format::Json => print(&emit_json(&reports)?)?,
        Format::Csv => print(&emit_csv(&reports)?)?,
        Format::Plotdata => {
            let blocks: Vec<String> = emit_plotdata(&reports)?.into_iter().map(|(_, t)| t).collect();
            print(&blocks.join("\n\n"))?;
        }
    }
    Ok(0)
}

fn read_samples(path: &Path) -> Result<SampledFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let (Some(t), Some(v)) = (rec.get(0), rec.get(1)) else {
            return Err(Error::Parse(format!("{}: rows need two columns", path.display())));
        };
        // a text header row is skipped
        let (Ok(t), Ok(v)) = (t.parse::<f64>(), v.parse::<f64>()) else {
            if grid.is_empty() {
                continue;
            }
            return Err(Error::Parse(format!("{}: bad row {t},{v}", path.display())));
        };
        grid.push(t);
        values.push(v);
    }
    SampledFunction::new(grid, values)
}

fn fk(cmd: FkCommand) -> Result<u8> {
    match cmd {
        FkCommand::Chord { k, x1, y1, x2, y2 } => {
            let ctx = CurvatureContext::new(k, 2)?;
            let h = chord(&ctx, x1, y1, x2, y2)?;
            print(&format!("alpha {:.16e}\nbeta {:.16e}\n", h.alpha, h.beta))?;
            Ok(0)
        }
        FkCommand::Convexity { k, input, sense } => {
            let ctx = CurvatureContext::new(k, 2)?;
            let phi = read_samples(&input)?;
            let sense = match sense {
                SenseArg::Convex => Sense::Convex,
                SenseArg::Concave => Sense::Concave,
            };
            let chords = is_fk_convex(&ctx, &phi, sense);
            let transformed = transformed_test(&ctx, &phi, sense).ok();
            let doc = serde_json::json!({ "chord_test": chords, "transformed_test": transformed });
            print(&(serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))? + "\n"))?;
            Ok(if chords.ok { 0 } else { 1 })
        }
    }
}
