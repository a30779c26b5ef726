//! Command-line front end: spectra, configuration characters, and
//! zero-field splittings from the bundled NV model or AFI/coupling files.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use casdefect_core::ci::compute_spectrum;
use casdefect_core::coupling::SscMode;
use casdefect_core::integrals::{parse_afi, parse_coupling, ActiveSpaceIntegrals, CouplingData};
use casdefect_core::nv::{build_nv_coupling, build_nv_integrals, default_calibration};
use casdefect_core::report::{
    character_report, fine_structure, spectrum_report, CharacterReport, SpectrumReport, ZfsReport,
};
use casdefect_core::Error;

#[derive(Parser)]
#[command(
    name = "casdefect",
    version,
    about = "Defect active-space CI with C3v symmetry, SOC, and SSC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-free excitation spectrum with term labels.
    Spectrum(CommonArgs),
    /// Configuration character tables (occupation patterns and weights).
    Character(CharacterArgs),
    /// Fine structure: SOC/SSC level splittings and ZFS parameters.
    Zfs(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Use a bundled model (only "nv" ships).
    #[arg(long, conflicts_with_all = ["afi", "coupling"])]
    model: Option<String>,
    /// Integral file in AFI format.
    #[arg(long)]
    afi: Option<std::path::PathBuf>,
    /// Coupling-data file (SOC and SSC).
    #[arg(long)]
    coupling: Option<std::path::PathBuf>,
    /// Roots per spin sector as "T,S" (triplets,singlets).
    #[arg(long, default_value = "6,4", value_parser = parse_roots)]
    roots: (usize, usize),
    /// Eigensolver residual tolerance (eV).
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Disable spin-orbit coupling.
    #[arg(long)]
    no_soc: bool,
    /// Disable spin-spin coupling.
    #[arg(long)]
    no_ssc: bool,
    /// Configuration weight cutoff as a fraction (0.05 = 5%).
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct CharacterArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// State selector, e.g. "3A2" or "1E" (default: every computed state).
    #[arg(long)]
    state: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn json_pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

fn parse_roots(s: &str) -> Result<(usize, usize), String> {
    let (t, si) = s
        .split_once(',')
        .ok_or_else(|| "expected T,S (e.g. 6,4)".to_string())?;
    let t: usize = t
        .trim()
        .parse()
        .map_err(|e| format!("bad triplet count: {e}"))?;
    let si: usize = si
        .trim()
        .parse()
        .map_err(|e| format!("bad singlet count: {e}"))?;
    if t == 0 && si == 0 {
        return Err("at least one root required".into());
    }
    Ok((t, si))
}

/// Pretty term label for table mode: "3A2" -> "³A₂".
fn pretty_label(label: &str) -> String {
    let mut chars = label.chars();
    let sup = match chars.next() {
        Some('1') => "\u{b9}",
        Some('2') => "\u{b2}",
        Some('3') => "\u{b3}",
        _ => return label.to_string(),
    };
    let rest: String = chars.collect();
    format!(
        "{sup}{}",
        rest.replace('1', "\u{2081}").replace('2', "\u{2082}")
    )
}

fn load_integrals(args: &CommonArgs) -> Result<ActiveSpaceIntegrals, Error> {
    match (&args.model, &args.afi) {
        (Some(name), _) if name == "nv" => build_nv_integrals(&default_calibration()),
        (Some(name), _) => Err(Error::UnknownState(format!("unknown model '{name}'"))),
        (None, Some(path)) => parse_afi(&std::fs::read_to_string(path)?),
        (None, None) => Err(Error::MissingHeader(
            "no input: pass --model nv or --afi PATH".into(),
        )),
    }
}

fn load_coupling(args: &CommonArgs, n_orb: usize) -> Result<CouplingData, Error> {
    if args.model.as_deref() == Some("nv") {
        return Ok(build_nv_coupling(&default_calibration()));
    }
    match &args.coupling {
        Some(path) => parse_coupling(&std::fs::read_to_string(path)?),
        None if args.no_soc && args.no_ssc => Ok(CouplingData::empty(n_orb)),
        None => Err(Error::MissingHeader(
            "no coupling data: pass --coupling PATH (or --no-soc --no-ssc)".into(),
        )),
    }
}

fn print_spectrum_table(report: &SpectrumReport) {
    println!("{:<6} {:>8} {:>5}", "State", "E (eV)", "Deg");
    for lvl in &report.levels {
        println!(
            "{:<6} {:>8.2} {:>5}",
            pretty_label(&lvl.label.to_string()),
            lvl.excitation_ev,
            lvl.degeneracy
        );
    }
}

fn print_character_tables(reports: &[CharacterReport]) {
    for (i, rep) in reports.iter().enumerate() {
        if i > 0 {
            println!();
        }
        println!("{} ({:.2} eV)", pretty_label(&rep.state), rep.excitation_ev);
        for row in &rep.rows {
            println!("  {}  {:>5.1}%", row.occupation, row.weight * 100.0);
        }
    }
}

fn print_zfs_table(report: &ZfsReport) {
    for (i, m) in report.manifolds.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!(
            "{} ({:.2} eV)",
            pretty_label(&m.label.to_string()),
            m.excitation_ev
        );
        if let (Some(d), Some(e)) = (m.d_ghz, m.e_ghz) {
            let z = |x: f64| if x.abs() < 1e-4 { 0.0 } else { x };
            print!("  D = {:.3} GHz, E = {:.3} GHz", z(d), z(e));
        }
        println!();
        println!(
            "  {:<10} {:>4} {:>10} {:>10} {:>10} {:>14}",
            "Level", "Deg", "SOC (GHz)", "SSC (GHz)", "Tot (GHz)", "<Lz>"
        );
        for lvl in &m.levels {
            let psi = lvl
                .psi
                .iter()
                .map(|k| format!("\u{3a8}{k}"))
                .collect::<Vec<_>>()
                .join(",");
            // Snap solver noise to exact zero so signed zeros render stably.
            let snap = |x: f64, eps: f64| if x.abs() < eps { 0.0 } else { x };
            let fmt_opt = |v: Option<f64>| match v {
                Some(x) => format!("{:.3}", snap(x, 1e-4)),
                None => "-".to_string(),
            };
            let lz = lvl
                .lz
                .iter()
                .map(|v| format!("{:+.2}", snap(*v, 1e-3)))
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "  {:<10} {:>4} {:>10} {:>10} {:>10.3} {:>14}",
                psi,
                lvl.degeneracy,
                fmt_opt(lvl.soc_ghz),
                fmt_opt(lvl.ssc_ghz),
                snap(lvl.total_ghz, 1e-4),
                lz
            );
        }
    }
}

fn run_spectrum(args: &CommonArgs) -> Result<(), Error> {
    let ints = load_integrals(args)?;
    let spectrum = compute_spectrum(&ints, args.roots.0, args.roots.1, args.tol)?;
    let report = spectrum_report(&spectrum.states)?;
    match args.format {
        Format::Table => print_spectrum_table(&report),
        Format::Json => {
            // Full-precision document with per-level configuration weights;
            // one representative state per degenerate level.
            let mut levels = Vec::new();
            let mut cursor = 0usize;
            for lvl in &report.levels {
                let st = &spectrum.states[cursor];
                cursor += lvl.degeneracy;
                let chars = character_report(
                    st,
                    ints.n_orb,
                    &lvl.label.to_string(),
                    lvl.excitation_ev,
                    args.threshold,
                )?;
                levels.push(serde_json::json!({
                    "label": lvl.label.to_string(),
                    "excitation_ev": lvl.excitation_ev,
                    "energy_ev": lvl.energy_ev,
                    "degeneracy": lvl.degeneracy,
                    "s": lvl.s,
                    "configurations": chars.rows,
                }));
            }
            println!("{}", json_pretty(&serde_json::json!({ "levels": levels })));
        }
    }
    Ok(())
}

fn run_character(args: &CharacterArgs) -> Result<(), Error> {
    let common = &args.common;
    let ints = load_integrals(common)?;
    let spectrum = compute_spectrum(&ints, common.roots.0, common.roots.1, common.tol)?;
    let report = spectrum_report(&spectrum.states)?;

    // One representative state per level, tagged with the level label.
    let mut reps: Vec<(&casdefect_core::ci::SpinFreeState, String, f64)> = Vec::new();
    let mut cursor = 0usize;
    for lvl in &report.levels {
        let st = &spectrum.states[cursor];
        reps.push((st, lvl.label.to_string(), lvl.excitation_ev));
        cursor += lvl.degeneracy;
    }
    if let Some(sel) = &args.state {
        reps.retain(|(_, label, _)| label.eq_ignore_ascii_case(sel));
        if reps.is_empty() {
            return Err(Error::UnknownState(sel.clone()));
        }
    }
    let tables: Vec<CharacterReport> = reps
        .iter()
        .map(|(st, label, exc)| character_report(st, ints.n_orb, label, *exc, common.threshold))
        .collect::<Result<_, _>>()?;
    match common.format {
        Format::Table => print_character_tables(&tables),
        Format::Json => {
            let value = serde_json::to_value(&tables).expect("report serialization cannot fail");
            println!("{}", json_pretty(&value));
        }
    }
    Ok(())
}

fn run_zfs(args: &CommonArgs) -> Result<(), Error> {
    let ints = load_integrals(args)?;
    let coupling = load_coupling(args, ints.n_orb)?;
    let fs = fine_structure(
        &ints,
        &coupling,
        args.roots.0,
        args.roots.1,
        args.tol,
        !args.no_soc,
        !args.no_ssc,
        SscMode::Perturbative,
    )?;
    match args.format {
        Format::Table => print_zfs_table(&fs.report),
        Format::Json => {
            let value = serde_json::to_value(&fs.report).expect("report serialization cannot fail");
            println!("{}", json_pretty(&value));
        }
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NonConvergence { .. } => 1,
        Error::Malformed { .. }
        | Error::IndexOutOfRange { .. }
        | Error::ConflictingDuplicate { .. }
        | Error::MissingHeader(_)
        | Error::DanglingPartner { .. }
        | Error::TooManyElectrons { .. }
        | Error::UnknownAxis { .. }
        | Error::SymmetryViolation { .. }
        | Error::TraceViolation { .. }
        | Error::BadCounts { .. }
        | Error::ModelParams(_)
        | Error::UnknownState(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Character(args) => run_character(args),
        Command::Zfs(args) => run_zfs(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
