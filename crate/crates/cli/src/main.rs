//! `mzi`: interacting particles in a two-arm interferometer from the
//! command line.
//!
//! Subcommands map onto the library's stages: `branches` prints the
//! post-selected companion-structure expansion, `density` and `sweep`
//! write the figures' data files, `feasibility` runs the electron
//! design-point calculator and `verify` runs the self-check suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 infeasible design.

mod gnuplot;

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mzi_core::export;
use mzi_core::feasibility::{electron_design_point, PhysicalConstants};
use mzi_core::modes::{InteractionConfig, PhaseModel};
use mzi_core::observables::{d_grid, default_d_grid, sweep};
use mzi_core::verify;
use mzi_core::{
    build_terms, expand_postselected, incoherent_density, probability_density, DetectorPattern,
    Error, GridSpec,
};

#[derive(Parser)]
#[command(
    name = "mzi",
    version,
    about = "Interacting distinguishable particles in a two-arm Mach-Zehnder \
             interferometer with post-selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhaseArg {
    /// Real Gaussian packets, no phases.
    None,
    /// Beam-tilt phase across each deflected packet.
    Geometric,
    /// Geometric plus interaction phase (scale k).
    Full,
}

impl From<PhaseArg> for PhaseModel {
    fn from(p: PhaseArg) -> PhaseModel {
        match p {
            PhaseArg::None => PhaseModel::None,
            PhaseArg::Geometric => PhaseModel::Geometric,
            PhaseArg::Full => PhaseModel::GeometricPlusInteraction,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityFormat {
    Csv,
    Pgm,
    Gnuplot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
    Gnuplot,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a detector post-selection into companion-structure groups
    /// with their net complex coefficients.
    Branches {
        /// Detector pattern, one letter (A or B) per particle, e.g. AAA or ABB.
        #[arg(long, default_value = "AAA")]
        pattern: String,
        /// Particle count; must match the pattern length when given.
        #[arg(long)]
        n: Option<usize>,
        /// Phase-shifter angle in radians (applied to the R arm).
        #[arg(long, default_value_t = FRAC_PI_2)]
        chi: f64,
        /// Emit JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Sample the marginal probability density of one particle and
    /// write it to disk.
    Density {
        #[arg(long, default_value = "AAA")]
        pattern: String,
        #[arg(long, default_value_t = FRAC_PI_2)]
        chi: f64,
        /// Interaction strength (expected pairwise deflection / sigma).
        #[arg(long)]
        d: f64,
        /// Interaction-phase scale r/sigma.
        #[arg(long, default_value_t = 5.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t = PhaseArg::None)]
        phases: PhaseArg,
        /// Damp cross terms by the ensemble spread of the interaction phase.
        #[arg(long)]
        ensemble: bool,
        /// Drop all interference cross terms (incoherent baseline).
        #[arg(long)]
        incoherent: bool,
        /// Which particle's marginal to compute (1-based).
        #[arg(long, default_value_t = 1)]
        particle: usize,
        /// Grid points per axis.
        #[arg(long, default_value_t = 257)]
        points: usize,
        /// Half-width of the square grid in units of sigma.
        #[arg(long, default_value_t = 8.0)]
        range: f64,
        /// Output path stem (extension added per format).
        #[arg(long, default_value = "density")]
        out: PathBuf,
        /// Output formats (repeat or comma-separate).
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [DensityFormat::Csv])]
        format: Vec<DensityFormat>,
    },
    /// Sweep displacement expectation values over interaction strength
    /// and write the curves to disk.
    Sweep {
        #[arg(long, default_value = "AAA")]
        pattern: String,
        #[arg(long, default_value_t = FRAC_PI_2)]
        chi: f64,
        #[arg(long, default_value_t = 5.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t = PhaseArg::None)]
        phases: PhaseArg,
        #[arg(long)]
        ensemble: bool,
        /// Largest interaction strength (default 3.0, or 1.5 with full phases).
        #[arg(long)]
        d_max: Option<f64>,
        /// Grid step (default 0.01, or 0.002 with full phases).
        #[arg(long)]
        d_step: Option<f64>,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SweepFormat::Csv])]
        format: Vec<SweepFormat>,
    },
    /// Electron design point: beam width, deflection, phases and a
    /// consistent wavelength / path-length pair, as JSON.
    Feasibility {
        /// Beam separation over beam width.
        #[arg(long, default_value_t = 5.0)]
        r_over_sigma: f64,
        /// Largest tolerable interaction strength.
        #[arg(long, default_value_t = 0.005)]
        d_max: f64,
        /// Electron kinetic energy (keV) fixing the default wavelength.
        #[arg(long, default_value_t = 40.0)]
        kev: f64,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle-equivalence and invariant suites.
    Verify {
        /// Branch and overlap checks only (fast).
        #[arg(long)]
        quick: bool,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        // A reader closing the pipe early (branches | head) is not an error.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::UnsupportedCase(_) | Error::Io(_) => 2,
                Error::InfeasibleDesign(_) => 3,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Branches {
            pattern,
            n,
            chi,
            json,
        } => cmd_branches(&pattern, n, chi, json),
        Command::Density {
            pattern,
            chi,
            d,
            k,
            phases,
            ensemble,
            incoherent,
            particle,
            points,
            range,
            out,
            format,
        } => cmd_density(
            &pattern, chi, d, k, phases, ensemble, incoherent, particle, points, range, &out,
            &format,
        ),
        Command::Sweep {
            pattern,
            chi,
            k,
            phases,
            ensemble,
            d_max,
            d_step,
            out,
            format,
        } => cmd_sweep(
            &pattern, chi, k, phases, ensemble, d_max, d_step, &out, &format,
        ),
        Command::Feasibility {
            r_over_sigma,
            d_max,
            kev,
            out,
        } => cmd_feasibility(r_over_sigma, d_max, kev, out.as_deref()),
        Command::Verify { quick, json } => cmd_verify(quick, json),
    }
}

fn config_for(d: f64, k: f64, phases: PhaseArg, ensemble: bool) -> InteractionConfig {
    InteractionConfig {
        d,
        k,
        phase_model: phases.into(),
        ensemble_spread: ensemble,
    }
}

fn cmd_branches(pattern: &str, n: Option<usize>, chi: f64, json: bool) -> Result<i32, Error> {
    let pattern = DetectorPattern::parse(pattern)?;
    if let Some(n) = n {
        if n != pattern.len() {
            return Err(Error::InvalidInput(format!(
                "--n {n} does not match the {}-particle pattern",
                pattern.len()
            )));
        }
    }
    let state = expand_postselected(pattern.len(), &pattern, chi)?;
    // Write through a fallible handle: a 20-particle expansion has half
    // a million groups and is routinely piped into head.
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if json {
        let groups: Vec<serde_json::Value> = state
            .groups()
            .iter()
            .map(|g| {
                let (a, b) = g.structure.representatives();
                serde_json::json!({
                    "structure": g.structure.to_string(),
                    "coefficient": [g.coefficient.re, g.coefficient.im],
                    "branches": [a.to_string(), b.to_string()],
                    "classical_php": [
                        mzi_core::verify_classical_php(&a),
                        mzi_core::verify_classical_php(&b),
                    ],
                })
            })
            .collect();
        let doc = serde_json::json!({
            "pattern": pattern.to_string(),
            "chi": chi,
            "groups": groups,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
    } else {
        write!(out, "{state}")?;
        if state.nonzero_group_count() < state.groups().len() {
            writeln!(
                out,
                "(zero coefficients mark complete destructive interference)"
            )?;
        }
    }
    out.flush()?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    pattern: &str,
    chi: f64,
    d: f64,
    k: f64,
    phases: PhaseArg,
    ensemble: bool,
    incoherent: bool,
    particle: usize,
    points: usize,
    range: f64,
    out: &std::path::Path,
    formats: &[DensityFormat],
) -> Result<i32, Error> {
    let pattern = DetectorPattern::parse(pattern)?;
    if particle == 0 || particle > pattern.len() {
        return Err(Error::InvalidInput(format!(
            "--particle must be between 1 and {}",
            pattern.len()
        )));
    }
    let state = expand_postselected(pattern.len(), &pattern, chi)?;
    let config = config_for(d, k, phases, ensemble);
    let terms = build_terms(&state, &config, particle - 1)?;
    let spec = GridSpec::square(range, points);
    let grid = if incoherent {
        incoherent_density(&terms, &spec)?
    } else {
        probability_density(&terms, &spec)?
    };
    if grid.coverage_warning {
        eprintln!(
            "warning: the grid window captured less than 1 - 1e-6 of the probability mass; \
             increase --range"
        );
    }
    for format in formats {
        match format {
            DensityFormat::Csv => {
                let path = out.with_extension("csv");
                let mut file = BufWriter::new(File::create(&path)?);
                export::write_density_csv(&grid, &mut file)?;
                file.flush()?;
                println!("wrote {}", path.display());
            }
            DensityFormat::Pgm => {
                let path = out.with_extension("pgm");
                let mut file = BufWriter::new(File::create(&path)?);
                export::write_density_pgm(&grid, &mut file)?;
                file.flush()?;
                println!("wrote {}", path.display());
            }
            DensityFormat::Gnuplot => {
                let csv = out.with_extension("csv");
                let path = out.with_extension("gp");
                let csv_name = csv
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "density.csv".into());
                let title = format!(
                    "pattern {pattern}, d = {d}{}{}",
                    match phases {
                        PhaseArg::None => String::new(),
                        PhaseArg::Geometric => ", geometric phases".into(),
                        PhaseArg::Full => format!(", full phases (k = {k})"),
                    },
                    if incoherent { ", incoherent" } else { "" }
                );
                std::fs::write(&path, gnuplot::density_script(&csv_name, &title))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    pattern: &str,
    chi: f64,
    k: f64,
    phases: PhaseArg,
    ensemble: bool,
    d_max: Option<f64>,
    d_step: Option<f64>,
    out: &std::path::Path,
    formats: &[SweepFormat],
) -> Result<i32, Error> {
    let pattern = DetectorPattern::parse(pattern)?;
    let base = config_for(0.0, k, phases, ensemble);
    let grid = match (d_max, d_step) {
        (None, None) => default_d_grid(base.phase_model),
        (max, step) => {
            let defaults = match base.phase_model {
                PhaseModel::GeometricPlusInteraction => (1.5, 0.002),
                _ => (3.0, 0.01),
            };
            d_grid(max.unwrap_or(defaults.0), step.unwrap_or(defaults.1))?
        }
    };
    let curve = sweep(&pattern, chi, &base, &grid)?;
    for format in formats {
        match format {
            SweepFormat::Csv => {
                let path = out.with_extension("csv");
                let mut file = BufWriter::new(File::create(&path)?);
                export::write_sweep_csv(&curve, &mut file)?;
                file.flush()?;
                println!("wrote {}", path.display());
            }
            SweepFormat::Json => {
                let path = out.with_extension("json");
                let mut file = BufWriter::new(File::create(&path)?);
                export::write_sweep_json(&curve, &mut file)?;
                file.flush()?;
                println!("wrote {}", path.display());
            }
            SweepFormat::Gnuplot => {
                let csv = out.with_extension("csv");
                let path = out.with_extension("gp");
                let csv_name = csv
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "sweep.csv".into());
                let title = format!(
                    "pattern {pattern}{}",
                    match phases {
                        PhaseArg::None => ", no phases".into(),
                        PhaseArg::Geometric => ", geometric phases".into(),
                        PhaseArg::Full => format!(", full phases (k = {k})"),
                    }
                );
                let d_max = curve.d.last().copied().unwrap_or(1.0);
                std::fs::write(
                    &path,
                    gnuplot::sweep_script(&csv_name, curve.particle_count(), &title, d_max),
                )?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}

fn cmd_feasibility(
    r_over_sigma: f64,
    d_max: f64,
    kev: f64,
    out: Option<&std::path::Path>,
) -> Result<i32, Error> {
    let constants = PhysicalConstants::default();
    let report = electron_design_point(r_over_sigma, d_max, Some(kev * 1e3), &constants)?;
    let json = serde_json::to_string_pretty(&report).expect("json");
    match out {
        Some(path) => {
            std::fs::write(path, json + "\n")?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(0)
}

fn cmd_verify(quick: bool, json: bool) -> Result<i32, Error> {
    let report = if quick {
        verify::quick_checks()
    } else {
        verify::full_checks()
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        for c in &report.checks {
            println!(
                "{} {} - {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!("{} passed, {} failed", report.passed, report.failed);
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}
