use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gfl_core::error::{Error, Result};
use gfl_core::field::FieldSpec;
use gfl_core::flags::enumerate_flags;
use gfl_core::harness::{
    phi_matrix_json, run_lemma_battery, run_ring_of_lines, run_stabilization, run_theorem_sweep, run_tightness,
    Format, Mode, Report, SweepConfig, EXIT_OK, EXIT_USAGE,
};
use gfl_core::SeqS;

/// Divided powers, flag modules and Crabb–Hubbuck morphisms over GF(q).
#[derive(Parser)]
#[command(name = "gfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of φ_s̲ on every cell, against the per-step criterion.
    VerifyTheorem(Common),
    /// The lemma battery.
    Lemmas(Common),
    /// Injectivity of the shifted sequence s̲⁺ and the η diagram.
    Stabilize(Common),
    /// Injectivity of the line maps and of constant sequences near the threshold.
    Tightness(Common),
    /// Dimensions of the span of all images of φ_s̲ by degree.
    RingOfLines(Common),
    /// Emit the matrix of φ_s̲ or of the line map.
    Phi(PhiArgs),
    /// List the complete flags of length r in F^d.
    Flags(FlagsArgs),
}

#[derive(Args)]
struct Common {
    /// Field as p,m[,c0,...,cm] or an order q; repeatable.
    #[arg(long = "field", value_name = "SPEC")]
    fields: Vec<String>,
    #[arg(long)]
    dmax: Option<usize>,
    #[arg(long)]
    rmax: Option<usize>,
    #[arg(long)]
    smax: Option<u32>,
    /// Largest dim Γ^{[s̲]_q}(F^d) computed; larger cells are skipped.
    #[arg(long)]
    cap: Option<u64>,
    /// Largest dim Γ computed for a shifted sequence.
    #[arg(long)]
    plus_cap: Option<u64>,
    /// Degree bound for the lemma battery and the ring of lines.
    #[arg(long)]
    degmax: Option<u32>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also sweep weakly decreasing sequences.
    #[arg(long)]
    weak: bool,
    /// Skip the key-step diagram check.
    #[arg(long)]
    no_key_step: bool,
}

#[derive(Args)]
struct PhiArgs {
    /// Required; only the matrix output is supported.
    #[arg(long, required = true)]
    emit_matrix: bool,
    #[arg(long = "field", value_name = "SPEC", default_value = "2,1")]
    field: String,
    #[arg(long)]
    d: usize,
    /// Sequence such as 4,2.
    #[arg(long, conflicts_with = "line", required_unless_present = "line")]
    seq: Option<String>,
    /// Degree n of the line map v ↦ v^{(n)}.
    #[arg(long)]
    line: Option<u32>,
    /// Pack GF(2) rows as hex.
    #[arg(long)]
    packed: bool,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlagsArgs {
    /// Required; only listing is supported.
    #[arg(long, required = true)]
    list: bool,
    #[arg(long = "field", value_name = "SPEC", default_value = "2,1")]
    field: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn parse_field(text: &str) -> Result<FieldSpec> {
    if text.contains(',') {
        FieldSpec::parse(text)
    } else {
        let q = text.trim().parse().map_err(|_| Error::InvalidField(format!("cannot parse {text:?}")))?;
        FieldSpec::with_order(q)
    }
}

fn config(mode: Mode, c: &Common) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::new(mode);
    if !c.fields.is_empty() {
        cfg.fields = c.fields.iter().map(|f| parse_field(f)).collect::<Result<_>>()?;
    }
    if let Some(v) = c.dmax {
        cfg.d_max = v;
    }
    if let Some(v) = c.rmax {
        cfg.r_max = v;
    }
    if let Some(v) = c.smax {
        cfg.s_max = v;
    }
    if let Some(v) = c.cap {
        cfg.cap = v;
    }
    if let Some(v) = c.plus_cap {
        cfg.plus_cap = v;
    }
    if let Some(v) = c.degmax {
        cfg.deg_max = v;
    }
    cfg.format = c.format.parse()?;
    cfg.weak = c.weak;
    cfg.key_step = !c.no_key_step;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_report(report: &impl Report, cfg: &SweepConfig, out: &Option<PathBuf>) -> Result<i32> {
    emit(out, &report.render(cfg.format))?;
    Ok(report.exit_code())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::VerifyTheorem(c) => {
            let cfg = config(Mode::Theorem, &c)?;
            emit_report(&run_theorem_sweep(&cfg)?, &cfg, &c.out)
        }
        Command::Lemmas(c) => {
            let cfg = config(Mode::Lemmas, &c)?;
            emit_report(&run_lemma_battery(&cfg)?, &cfg, &c.out)
        }
        Command::Stabilize(c) => {
            let cfg = config(Mode::Stabilize, &c)?;
            emit_report(&run_stabilization(&cfg)?, &cfg, &c.out)
        }
        Command::Tightness(c) => {
            let cfg = config(Mode::Tightness, &c)?;
            emit_report(&run_tightness(&cfg)?, &cfg, &c.out)
        }
        Command::RingOfLines(c) => {
            let cfg = config(Mode::RingOfLines, &c)?;
            emit_report(&run_ring_of_lines(&cfg)?, &cfg, &c.out)
        }
        Command::Phi(a) => {
            let field = parse_field(&a.field)?;
            let seq = a.seq.as_deref().map(SeqS::parse).transpose()?;
            let mut v = phi_matrix_json(&field, a.d, seq.as_ref(), a.line, a.packed)?;
            if let Value::Object(map) = &mut v {
                map.insert("field".into(), serde_json::to_value(field.descriptor())?);
            }
            emit(&a.out, &json_text(&v))?;
            Ok(EXIT_OK)
        }
        Command::Flags(a) => {
            let field = parse_field(&a.field)?;
            let format: Format = a.format.parse()?;
            let flags = enumerate_flags(&field, a.d, a.r);
            let text = match format {
                Format::Json => json_text(&json!({
                    "field": field.descriptor(),
                    "d": a.d,
                    "r": a.r,
                    "count": flags.len(),
                    "flags": flags.iter().map(|f| f.to_json(&field)).collect::<Vec<_>>(),
                })),
                Format::Csv | Format::Table => {
                    let sep = if format == Format::Csv { "," } else { "  " };
                    let mut s = String::new();
                    if format == Format::Csv {
                        s.push_str("index,rows\n");
                    }
                    for (i, f) in flags.iter().enumerate() {
                        let rows: Vec<String> = f
                            .rows()
                            .map(|row| {
                                let cells: Vec<String> = row.iter().map(|x| x.0.to_string()).collect();
                                format!("[{}]", cells.join(" "))
                            })
                            .collect();
                        s.push_str(&format!("{i}{sep}{}\n", rows.join(" ")));
                    }
                    s
                }
            };
            emit(&a.out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gfl: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
