use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nsbox::audit::{self, SuiteSizes};
use nsbox::decompose::{
    bell_canonical, full_canonical, local_content, local_membership, Decomposition, LpResult,
};
use nsbox::error::{exit, Error, Result};
use nsbox::input::{parse_box, parse_settings, parse_state};
use nsbox::measures::MeasureReport;
use nsbox::ns::{indices, NsBox, Vertex};
use nsbox::numfmt::{fmt_sig, round_json};
use nsbox::quantum::{born_box, Paulis};
use nsbox::scenarios::{self, SweepRow, SWEEP_COLUMNS};

#[derive(Parser)]
#[command(
    name = "nsbox",
    version,
    about = "Correlation measures for two-party binary nonsignaling boxes"
)]
struct Cli {
    /// Validation and inequality tolerance.
    #[arg(long, global = true, env = "NSBOX_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Output format (default: csv for sweep, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Grid points for sweep and verify.
    #[arg(long, global = true, default_value_t = 11)]
    points: usize,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bell,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Bell/Mermin strengths, G, Q, T, C and inequality flags.
    Measure {
        /// Box JSON or state+settings JSON ("-" for stdin).
        input: PathBuf,
    },
    /// Canonical convex decomposition.
    Decompose {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        mode: Mode,
    },
    /// Largest weight of a local component (linear program).
    LocalContent { input: PathBuf },
    /// Membership in the local polytope (linear program).
    Membership { input: PathBuf },
    /// Evaluate a named scenario on an evenly spaced parameter grid.
    Sweep {
        #[arg(long)]
        scenario: String,
    },
    /// Check every scenario, decomposition and randomized property.
    Verify {
        /// Samples for the large property suites (small ones use a tenth).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Use a sign-flipped sigma_y for Alice (self-test of the audit).
        #[arg(long, hide = true)]
        flip_sigma_y: bool,
    },
    /// List the registered scenarios.
    Scenarios,
    /// Construct boxes.
    #[command(subcommand)]
    Box(BoxCommand),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Pr,
    Deterministic,
    Mermin,
    WhiteNoise,
}

#[derive(Args)]
struct Bits {
    #[arg(long, default_value_t = 0)]
    alpha: u8,
    #[arg(long, default_value_t = 0)]
    beta: u8,
    #[arg(long, default_value_t = 0)]
    gamma: u8,
    #[arg(long, default_value_t = 0)]
    epsilon: u8,
}

#[derive(Subcommand)]
enum BoxCommand {
    /// An extremal box or white noise.
    Vertex {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        bits: Bits,
    },
    /// Convex mixture of box files.
    Mix {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated weights, one per input.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
    },
    /// `p * V + (1 - p) * white noise` for a vertex `V` (default PR 000).
    Isotropic {
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value = "pr")]
        kind: Kind,
        #[command(flatten)]
        bits: Bits,
    },
    /// Born-rule box from a state file and a settings file.
    Born {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        settings: PathBuf,
    },
    /// The box of a scenario at one parameter value.
    Scenario {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        param: f64,
        /// Print the state and settings instead of the box.
        #[arg(long)]
        source: bool,
    },
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn load_box(path: &Path, tol: f64) -> Result<NsBox> {
    parse_box(&read_input(path)?, tol)
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn table_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header) + "\n";
    for r in rows {
        out += &line(r);
        out.push('\n');
    }
    out
}

fn tabular(format: Format, header: &[String], rows: &[Vec<String>]) -> Result<String> {
    match format {
        Format::Csv => csv_text(header, rows),
        _ => Ok(table_text(header, rows)),
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn report_fields(r: &MeasureReport) -> (Vec<String>, Vec<String>) {
    let mut h = Vec::new();
    let mut v = Vec::new();
    for (name, grid) in [("B", &r.bell), ("M", &r.mermin), ("Bprod", &r.bell_prod)] {
        for (a, row) in grid.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                h.push(format!("{name}{a}{b}"));
                v.push(fmt_sig(*x));
            }
        }
    }
    for (name, x) in [
        ("G", r.g),
        ("Q", r.q),
        ("T", r.t),
        ("C_signed", r.c_signed),
        ("C", r.c),
    ] {
        h.push(name.to_string());
        v.push(fmt_sig(x));
    }
    h.extend(strings(&[
        "chsh_violated",
        "steering_violated",
        "monogamy_lhs",
    ]));
    v.push(r.chsh_violated.to_string());
    v.push(r.steering_violated.to_string());
    v.push(fmt_sig(r.monogamy_lhs));
    (h, v)
}

fn render_report(r: &MeasureReport, format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(r),
        Format::Csv => {
            let (h, v) = report_fields(r);
            csv_text(&h, &[v])
        }
        Format::Table => {
            let (h, v) = report_fields(r);
            let rows: Vec<Vec<String>> = h.into_iter().zip(v).map(|(a, b)| vec![a, b]).collect();
            Ok(table_text(&strings(&["field", "value"]), &rows))
        }
    }
}

fn probs_header() -> Vec<String> {
    indices()
        .map(|[i, j, m, n]| format!("p{i}{j}{m}{n}"))
        .collect()
}

fn probs_cells(b: &NsBox) -> Vec<String> {
    b.flat().iter().map(|p| fmt_sig(*p)).collect()
}

fn render_decomposition(d: &Decomposition, format: Format) -> Result<String> {
    if format == Format::Json {
        return json_text(d);
    }
    let mut header = strings(&["tag", "weight"]);
    header.extend(probs_header());
    let rows: Vec<Vec<String>> = d
        .terms
        .iter()
        .map(|t| {
            let mut r = vec![format!("{:?}", t.tag), fmt_sig(t.weight)];
            r.extend(probs_cells(&t.component));
            r
        })
        .collect();
    let mut out = tabular(format, &header, &rows)?;
    if format == Format::Table {
        out += &format!(
            "degenerate: {}\norientation code: {}\n",
            d.degenerate,
            d.orientation.code()
        );
        if let Some(g) = d.mermin_gamma {
            out += &format!("mermin gamma: {g}\n");
        }
    }
    Ok(out)
}

fn render_lp(r: &LpResult, format: Format) -> Result<String> {
    if format == Format::Json {
        return json_text(r);
    }
    let mut header = strings(&["feasible", "objective", "iterations"]);
    header.extend((0..16).map(|l| format!("q{:04b}", l)));
    let mut row = vec![
        r.feasible.to_string(),
        fmt_sig(r.objective),
        r.iterations.to_string(),
    ];
    row.extend(r.weights.iter().map(|w| fmt_sig(*w)));
    tabular(format, &header, &[row])
}

fn render_box(b: &NsBox, format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(b),
        _ => {
            let rows: Vec<Vec<String>> = indices()
                .map(|[i, j, m, n]| {
                    vec![
                        i.to_string(),
                        j.to_string(),
                        m.to_string(),
                        n.to_string(),
                        fmt_sig(b.p(i, j, m, n)),
                    ]
                })
                .collect();
            tabular(format, &strings(&["i", "j", "m", "n", "p"]), &rows)
        }
    }
}

fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(&rows),
        _ => {
            let cells: Vec<Vec<String>> = rows.iter().map(|r| r.cells()).collect();
            tabular(format, &strings(&SWEEP_COLUMNS), &cells)
        }
    }
}

fn vertex(kind: Kind, b: &Bits) -> Result<Vertex> {
    for (name, v) in [
        ("alpha", b.alpha),
        ("beta", b.beta),
        ("gamma", b.gamma),
        ("epsilon", b.epsilon),
    ] {
        if v > 1 {
            return Err(Error::Parse(format!("{name} must be 0 or 1, got {v}")));
        }
    }
    Ok(match kind {
        Kind::Pr => Vertex::Pr {
            alpha: b.alpha,
            beta: b.beta,
            gamma: b.gamma,
        },
        Kind::Deterministic => Vertex::Deterministic {
            alpha: b.alpha,
            beta: b.beta,
            gamma: b.gamma,
            epsilon: b.epsilon,
        },
        Kind::Mermin => Vertex::Mermin {
            alpha: b.alpha,
            beta: b.beta,
            gamma: b.gamma,
        },
        Kind::WhiteNoise => Vertex::WhiteNoise,
    })
}

#[derive(Serialize)]
struct VerifyReport {
    scenarios: Vec<audit::ScenarioAudit>,
    decompositions: Vec<audit::DecompositionAudit>,
    properties: Vec<audit::PropertyCheck>,
    pass: bool,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify(cli: &Cli, samples: usize, flip: bool, format: Format) -> Result<(String, bool)> {
    let alice = if flip {
        Paulis::flipped_y()
    } else {
        Paulis::standard()
    };
    let scenarios = audit::scenario_audit(cli.points, cli.tol, &alice, &Paulis::standard())?;
    let decompositions = audit::decomposition_audit(cli.points)?;
    let sizes = SuiteSizes {
        large: samples,
        small: (samples / 10).max(1),
    };
    let properties = audit::property_suite(cli.seed, sizes)?;
    let pass = scenarios.iter().all(|s| s.pass)
        && decompositions.iter().all(|d| d.pass)
        && properties.iter().all(|p| p.pass);
    let report = VerifyReport {
        scenarios,
        decompositions,
        properties,
        pass,
    };
    if format == Format::Json {
        return Ok((json_text(&report)?, pass));
    }
    let mut out = String::new();
    for s in &report.scenarios {
        out += &format!(
            "{} scenario {} points={} max_abs_deviation={} additivity={}\n",
            verdict(s.pass),
            s.scenario,
            s.points,
            fmt_sig(s.max_abs_deviation),
            fmt_sig(s.additivity_deviation)
        );
    }
    for d in &report.decompositions {
        out += &format!(
            "{} decomposition {} weight_deviation={} residual_g={} residual_q={} reconstruction={} residual_min={} valid_points={}/{}\n",
            verdict(d.pass),
            d.scenario,
            fmt_sig(d.weight_deviation),
            fmt_sig(d.residual_g),
            fmt_sig(d.residual_q),
            fmt_sig(d.reconstruction_error),
            fmt_sig(d.residual_min),
            d.valid_points,
            d.points
        );
    }
    for p in &report.properties {
        out += &format!(
            "{} property {} samples={} worst={} failures={}\n",
            verdict(p.pass),
            p.name,
            p.samples,
            fmt_sig(p.worst),
            p.failures
        );
    }
    let total = report.scenarios.len() + report.decompositions.len() + report.properties.len();
    let passed = report.scenarios.iter().filter(|s| s.pass).count()
        + report.decompositions.iter().filter(|d| d.pass).count()
        + report.properties.iter().filter(|p| p.pass).count();
    out += &format!("{} {passed}/{total} checks passed\n", verdict(pass));
    Ok((out, pass))
}

fn run(cli: &Cli) -> Result<(String, i32)> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::Parse(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    if cli.points < 2 {
        return Err(Error::Parse(format!(
            "--points must be at least 2, got {}",
            cli.points
        )));
    }
    let fmt = |default: Format| cli.format.unwrap_or(default);
    let out = match &cli.command {
        Command::Measure { input } => {
            let b = load_box(input, cli.tol)?;
            render_report(
                &MeasureReport::with_tolerance(&b, cli.tol),
                fmt(Format::Json),
            )?
        }
        Command::Decompose { input, mode } => {
            let b = load_box(input, cli.tol)?;
            let d = match mode {
                Mode::Bell => bell_canonical(&b)?,
                Mode::Full => full_canonical(&b)?,
            };
            render_decomposition(&d, fmt(Format::Json))?
        }
        Command::LocalContent { input } => render_lp(
            &local_content(&load_box(input, cli.tol)?)?,
            fmt(Format::Json),
        )?,
        Command::Membership { input } => render_lp(
            &local_membership(&load_box(input, cli.tol)?)?,
            fmt(Format::Json),
        )?,
        Command::Sweep { scenario } => {
            let spec = scenarios::find(scenario)?;
            render_sweep(
                &scenarios::sweep(&spec, cli.points, cli.tol)?,
                fmt(Format::Csv),
            )?
        }
        Command::Verify {
            samples,
            flip_sigma_y,
        } => {
            let (text, pass) = verify(cli, *samples, *flip_sigma_y, fmt(Format::Table))?;
            return Ok((text, if pass { exit::OK } else { exit::FAILED }));
        }
        Command::Scenarios => {
            let rows: Vec<Vec<String>> = scenarios::registry()
                .iter()
                .map(|s| {
                    vec![
                        s.name.to_string(),
                        s.param_name.to_string(),
                        fmt_sig(s.range.0),
                        fmt_sig(s.range.1),
                        s.notes.to_string(),
                    ]
                })
                .collect();
            let header = strings(&["name", "param", "lo", "hi", "notes"]);
            match fmt(Format::Table) {
                Format::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|r| serde_json::json!({"name": r[0], "param": r[1], "range": [r[2].parse::<f64>().unwrap_or(0.0), r[3].parse::<f64>().unwrap_or(0.0)], "notes": r[4]}))
                        .collect();
                    json_text(&v)?
                }
                f => tabular(f, &header, &rows)?,
            }
        }
        Command::Box(cmd) => {
            let b = match cmd {
                BoxCommand::Vertex { kind, bits } => NsBox::vertex(&vertex(*kind, bits)?),
                BoxCommand::Mix { inputs, weights } => {
                    let boxes = inputs
                        .iter()
                        .map(|p| load_box(p, cli.tol))
                        .collect::<Result<Vec<_>>>()?;
                    NsBox::mix(&boxes, weights)?
                }
                BoxCommand::Isotropic { p, kind, bits } => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(Error::OutOfRange {
                            name: "p".into(),
                            value: *p,
                            lo: 0.0,
                            hi: 1.0,
                        });
                    }
                    NsBox::vertex(&vertex(*kind, bits)?).with_noise(*p)?
                }
                BoxCommand::Born { state, settings } => {
                    let st = parse_state(&read_input(state)?)?;
                    let se = parse_settings(&read_input(settings)?)?;
                    born_box(&st, &se)?
                }
                BoxCommand::Scenario {
                    scenario,
                    param,
                    source,
                } => {
                    let spec = scenarios::find(scenario)?;
                    if *source {
                        let (state, settings) = spec.generate(*param)?;
                        let doc = serde_json::json!({ "state": state, "settings": settings });
                        let out = serde_json::to_string_pretty(&doc)? + "\n";
                        return Ok((out, exit::OK));
                    }
                    spec.born_box(*param)?
                }
            };
            render_box(&b, fmt(Format::Json))?
        }
    };
    Ok((out, exit::OK))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(exit::PARSE as u8);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
