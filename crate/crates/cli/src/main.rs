//! `coarsekit`: subdivisions, cone triangulations, entourage checks,
//! radialization and simplicial approximation from the command line.
//!
//! Scenario commands print a JSON report (or write it to `--report`) and exit
//! with status 1 when any assertion row fails. Errors exit with status 2.

mod config;
mod report;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use coarsekit::geom::to_off;
use config::RunConfig;
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "coarsekit", version, about = "Coarse homotopy constructions on triangulated metric cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterated standard subdivision of a complex.
    Subdivide {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Cone(ConeCommand),
    #[command(subcommand)]
    Coarse(CoarseCommand),
    #[command(subcommand)]
    Radialize(RadializeCommand),
    #[command(subcommand)]
    Approx(ApproxCommand),
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Off,
}

#[derive(Subcommand, Debug)]
enum ConeCommand {
    /// Triangulate the cone over a complex up to height K.
    Build {
        /// Base complex; the triangle boundary when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        height: i64,
        /// Add the tip fan below height 1 (bases of dimension at most 2).
        #[arg(long)]
        tip: bool,
        /// Cone complex as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cone complex as an OFF mesh.
        #[arg(long)]
        off: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum CoarseCommand {
    /// `Z(Z(M)) = Z(M)` on seeded random entourages of grids on the half line.
    ZCheck {
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Number of random entourages.
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Control profile `R ↦ S(R)` of a map on a seeded net of the ray `[0, K]`.
    Profile {
        #[arg(long, default_value = "spiral")]
        map: String,
        #[arg(long, default_value_t = 64)]
        height: i64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Excision profiles of half planes and of two parallel rays.
    Excisive {
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum RadializeCommand {
    /// The three homotopies from a cone map to its radialization.
    Run {
        /// spiral, twisted (seeded) or spun.
        #[arg(long, default_value = "spiral")]
        map: String,
        #[arg(long, default_value_t = 64)]
        height: i64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum ApproxCommand {
    /// Simplicial approximation of the spun loop map and its straight-line homotopy.
    Run {
        #[arg(long, default_value = "spiral")]
        phi: String,
        #[arg(long, requires = "codomain")]
        domain: Option<PathBuf>,
        #[arg(long, requires = "domain")]
        codomain: Option<PathBuf>,
        /// Cone height of the built-in fixture, used without --domain/--codomain.
        #[arg(long, default_value_t = 16)]
        height: i64,
        #[arg(long, default_value_t = 0.05)]
        twist: f64,
        /// Barycentric grid denominator for the star condition.
        #[arg(long, default_value_t = 4)]
        density: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    /// Radialize the spiral and profile it along the ray.
    Spiral {
        #[arg(long, default_value_t = 64)]
        height: i64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Report file; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
    /// Relative slack on measured ratios.
    #[arg(long)]
    tol: Option<f64>,
    /// Absolute tolerance on identities between maps.
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn config(&self, scenario: &str, height: i64, inputs: Vec<PathBuf>) -> Result<RunConfig> {
        let d = RunConfig::default();
        RunConfig {
            scenario: scenario.to_string(),
            inputs,
            height,
            radii: self.radii.clone(),
            tol: self.tol.unwrap_or(d.tol),
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            seed: self.seed,
            samples: self.samples.unwrap_or(d.samples),
            outputs: self.report.iter().cloned().collect(),
            ..d
        }
        .validate()
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(report: &Report, common: &Common) -> Result<bool> {
    write_or_print(common.report.as_deref(), &report.to_json())?;
    if common.report.is_some() {
        for row in &report.rows {
            println!("[{}] {}", if row.pass { "PASS" } else { "FAIL" }, row.name);
        }
    }
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Subdivide { input, iterations, format, out } => {
            let c = scenarios::subdivided(&input, iterations)?;
            let text = match format {
                Format::Json => c.to_json(),
                Format::Off => to_off(&c)?,
            };
            write_or_print(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Cone(ConeCommand::Build { input, height, tip, out, off, common }) => {
            let cfg = common.config("cone-build", height, input.into_iter().collect())?;
            let (t, report) = scenarios::cone_build(&cfg, tip)?;
            if let Some(p) = &out {
                fs::write(p, t.complex.to_json()).with_context(|| format!("writing {}", p.display()))?;
            }
            if let Some(p) = &off {
                fs::write(p, to_off(&t.complex)?).with_context(|| format!("writing {}", p.display()))?;
            }
            emit(&report, &common)
        }
        Command::Coarse(CoarseCommand::ZCheck { points, iterations, common }) => {
            let cfg = common.config("z-idempotence", 1, Vec::new())?;
            emit(&scenarios::z_check(&cfg, points, iterations)?, &common)
        }
        Command::Coarse(CoarseCommand::Profile { map, height, points, common }) => {
            let cfg = common.config("coarse-profile", height, Vec::new())?;
            emit(&scenarios::coarse_profile(&cfg, &map, points)?, &common)
        }
        Command::Coarse(CoarseCommand::Excisive { size, common }) => {
            let cfg = common.config("coarse-excisive", 1, Vec::new())?;
            emit(&scenarios::coarse_excisive(&cfg, size)?, &common)
        }
        Command::Radialize(RadializeCommand::Run { map, height, common }) => {
            let cfg = common.config("radialize", height, Vec::new())?;
            emit(&scenarios::radialize(&cfg, &map)?, &common)
        }
        Command::Approx(ApproxCommand::Run { phi, domain, codomain, height, twist, density, common }) => {
            let inputs = domain.into_iter().chain(codomain).collect();
            let cfg = RunConfig { density, ..common.config("approx", height, inputs)? }.validate()?;
            emit(&scenarios::approx(&cfg, &phi, twist)?, &common)
        }
        Command::Demo(DemoCommand::Spiral { height, common }) => {
            let cfg = common.config("demo-spiral", height, Vec::new())?;
            emit(&scenarios::demo_spiral(&cfg)?, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
