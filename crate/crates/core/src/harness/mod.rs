//! Sweeps over `(q, d, s̲)` cells, the lemma battery, and report output.
//!
//! Reports contain no timestamps and cells are ordered by key, so the same
//! configuration always produces byte-identical output.

pub mod lemmas;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chmorph::{
    criterion_report, eta_diagram_check, phi_line, phi_rank, ring_of_lines_dim, sequences_of_degree, CellStatus,
    CheckScope, CriterionReport, DiagramCheck, ReportOptions, SeqS,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::flags::flag_count;
use crate::gamma::gamma_dim;

pub use lemmas::{run_lemma_battery, LemmaReport};

/// Exit status when no falsification was found.
pub const EXIT_OK: i32 = 0;
/// Exit status when some check failed.
pub const EXIT_FALSIFIED: i32 = 1;
/// Exit status for invalid invocations.
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Theorem,
    Tightness,
    Stabilize,
    Lemmas,
    RingOfLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" | "text" => Ok(Format::Table),
            _ => Err(Error::Usage(format!("unknown format {s:?}"))),
        }
    }
}

/// Bounds and options shared by every mode.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub fields: Vec<FieldSpec>,
    pub d_max: usize,
    pub r_max: usize,
    pub s_max: u32,
    pub cap: u64,
    pub mode: Mode,
    pub format: Format,
    /// Also sweep weakly decreasing sequences.
    pub weak: bool,
    /// Check the key-step diagram in theorem sweeps.
    pub key_step: bool,
    /// Degree bound for the lemma battery and the ring of lines.
    pub deg_max: u32,
    /// Largest `dim Γ` computed for a shifted sequence `s̲⁺`.
    pub plus_cap: u64,
}

impl SweepConfig {
    pub fn new(mode: Mode) -> Self {
        let fields = [2, 3, 4].iter().map(|&q| FieldSpec::with_order(q).expect("default field")).collect();
        let (d_max, deg_max) = match mode {
            Mode::Lemmas => (3, 20),
            Mode::RingOfLines => (3, 30),
            _ => (4, 20),
        };
        SweepConfig {
            fields,
            d_max,
            r_max: 3,
            s_max: 6,
            cap: 100_000,
            mode,
            format: Format::Json,
            weak: false,
            key_step: true,
            deg_max,
            plus_cap: 3_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fields.is_empty() {
            return Err(Error::Usage("at least one field is required".into()));
        }
        if self.d_max == 0 || self.r_max == 0 || self.s_max == 0 || self.cap == 0 {
            return Err(Error::Usage("bounds must be positive".into()));
        }
        Ok(())
    }

    fn report_options(&self) -> ReportOptions {
        ReportOptions { cap: self.cap, key_step: self.key_step, ..ReportOptions::default() }
    }
}

/// Worker pool bounded by `GFL_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GFL_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Usage(format!("GFL_THREADS={v:?} is not a count")))?;
        if n == 0 {
            return Err(Error::Usage("GFL_THREADS must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Usage(format!("thread pool: {e}")))
}

/// Sequences of length `r` with entries in `1..=s_max`, decreasing
/// lexicographically.
pub fn sequences(r: usize, s_max: u32, strict: bool) -> Vec<SeqS> {
    fn rec(r: usize, top: u32, strict: bool, cur: &mut Vec<u32>, out: &mut Vec<SeqS>) {
        if cur.len() == r {
            out.push(SeqS::new(cur.clone()).expect("valid by construction"));
            return;
        }
        let left = (r - cur.len()) as u32;
        let lo = if strict { left } else { 1 };
        let mut x = top;
        while x >= lo {
            cur.push(x);
            rec(r, if strict { x - 1 } else { x }, strict, cur, out);
            cur.pop();
            x -= 1;
        }
    }
    let mut out = Vec::new();
    rec(r, s_max, strict, &mut Vec::new(), &mut out);
    out
}

/// A sweep cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub field: FieldSpec,
    pub d: usize,
    pub seq: SeqS,
}

/// Cells in key order: field, then `d`, then `r`, then sequence. Cells with
/// `r > d` have no flags and are omitted.
pub fn cells(cfg: &SweepConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for field in &cfg.fields {
        for d in 1..=cfg.d_max {
            for r in 1..=cfg.r_max.min(d) {
                let mut seqs = sequences(r, cfg.s_max, true);
                if cfg.weak {
                    seqs.extend(sequences(r, cfg.s_max, false).into_iter().filter(|s| !s.is_strict()));
                    seqs.sort_by(|a, b| b.cmp(a));
                }
                out.extend(seqs.into_iter().map(|seq| Cell { field: field.clone(), d, seq }));
            }
        }
    }
    out
}

fn fields_json(cfg: &SweepConfig) -> Vec<String> {
    cfg.fields.iter().map(|f| f.to_string()).collect()
}

fn seq_text(s: &[u32]) -> String {
    let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    parts.join(";")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Aligns whitespace-separated columns.
fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A report that can be rendered in every output format.
pub trait Report {
    fn to_json(&self) -> Value;
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
    fn summary(&self) -> String;
    fn exit_code(&self) -> i32;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => render_csv(&self.header(), &self.rows()),
            Format::Table => {
                let mut s = render_table(&self.header(), &self.rows());
                s.push_str(&self.summary());
                s
            }
        }
    }
}

const CELL_HEADER: [&str; 13] = [
    "q",
    "d",
    "seq",
    "strict",
    "degree",
    "flag_dim",
    "gamma_dim",
    "rank",
    "injective",
    "criterion_holds",
    "psi_rank",
    "key_step",
    "status",
];

fn cell_row(r: &CriterionReport) -> Vec<String> {
    let status = serde_json::to_value(r.status).expect("enum").as_str().expect("string").to_string();
    vec![
        r.q.to_string(),
        r.d.to_string(),
        seq_text(&r.seq),
        r.strict.to_string(),
        r.degree.to_string(),
        r.flag_dim.to_string(),
        r.gamma_dim.to_string(),
        opt(&r.rank),
        opt(&r.injective),
        r.criterion_holds.to_string(),
        opt(&r.psi_rank),
        opt(&r.key_step.as_ref().map(|k| k.holds)),
        status,
    ]
}

/// Counts over a list of cell reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub cells: usize,
    pub criterion_cells: usize,
    pub verified: usize,
    pub falsified: usize,
    pub observed: usize,
    pub skipped: usize,
    pub skipped_criterion_cells: usize,
    pub key_step_checked: usize,
    pub key_step_failed: usize,
    pub psi_inconsistent: usize,
    /// Weakly decreasing, criterion holds, not injective. Recorded as data.
    pub weak_counterexamples: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremSweep {
    pub fields: Vec<String>,
    pub d_max: usize,
    pub r_max: usize,
    pub s_max: u32,
    pub cap: u64,
    pub weak: bool,
    pub cells: Vec<CriterionReport>,
    pub summary: TheoremSummary,
}

fn summarize(cells: &[CriterionReport]) -> TheoremSummary {
    let mut s = TheoremSummary { cells: cells.len(), ..Default::default() };
    for c in cells {
        s.criterion_cells += c.criterion_holds as usize;
        match c.status {
            CellStatus::Verified => s.verified += 1,
            CellStatus::Falsified if c.strict => s.falsified += 1,
            CellStatus::Falsified => s.weak_counterexamples += 1,
            CellStatus::Observed => s.observed += 1,
            CellStatus::Skipped => {
                s.skipped += 1;
                s.skipped_criterion_cells += c.criterion_holds as usize;
            }
        }
        if let Some(k) = &c.key_step {
            s.key_step_checked += 1;
            s.key_step_failed += !k.holds as usize;
        }
        if let (Some(psi), Some(rank)) = (c.psi_rank, c.rank) {
            let full = c.flag_dim as usize;
            if psi > rank || (psi == full && rank != full) {
                s.psi_inconsistent += 1;
            }
        }
    }
    s
}

/// Computes one report per cell, in cell order.
pub fn run_theorem_sweep(cfg: &SweepConfig) -> Result<TheoremSweep> {
    cfg.validate()?;
    let opts = cfg.report_options();
    let cells = cells(cfg);
    let pool = thread_pool()?;
    let reports: Vec<CriterionReport> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| criterion_report(&c.field, &c.seq, c.d, &opts))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TheoremSweep {
        fields: fields_json(cfg),
        d_max: cfg.d_max,
        r_max: cfg.r_max,
        s_max: cfg.s_max,
        cap: cfg.cap,
        weak: cfg.weak,
        summary: summarize(&reports),
        cells: reports,
    })
}

impl Report for TheoremSweep {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    fn header(&self) -> Vec<&'static str> {
        CELL_HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.cells.iter().map(cell_row).collect()
    }

    fn summary(&self) -> String {
        let s = &self.summary;
        format!(
            "\ncells {}  criterion {}  verified {}  falsified {}  observed {}  skipped {} ({} criterion)\n\
             key step checked {} failed {}  psi inconsistencies {}  weak counterexamples {}\n",
            s.cells,
            s.criterion_cells,
            s.verified,
            s.falsified,
            s.observed,
            s.skipped,
            s.skipped_criterion_cells,
            s.key_step_checked,
            s.key_step_failed,
            s.psi_inconsistent,
            s.weak_counterexamples
        )
    }

    fn exit_code(&self) -> i32 {
        let s = &self.summary;
        if s.falsified + s.key_step_failed + s.psi_inconsistent > 0 {
            EXIT_FALSIFIED
        } else {
            EXIT_OK
        }
    }
}

/// `φ_n` on lines at `q = 2`: injective exactly when `n ≥ d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRow {
    pub q: u32,
    pub d: usize,
    pub n: u32,
    pub rank: usize,
    pub lines: u64,
    pub injective: bool,
    /// `n ≥ (q - 1) d`, sufficient for injectivity.
    pub threshold_met: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TightnessReport {
    pub fields: Vec<String>,
    pub lines: Vec<LineRow>,
    /// Rows with `q = 2` where injectivity and `n ≥ d` disagree.
    pub sharpness_violations: usize,
    /// Rows where the sufficient threshold holds but the map is not injective.
    pub threshold_violations: usize,
    /// Sweep cells where the criterion fails.
    pub below_threshold: Vec<CriterionReport>,
    pub injective_below_threshold: usize,
    pub not_injective_below_threshold: usize,
}

/// Line maps `φ_n` for `(q - 1) | n ≤ line_max(q)`, and the observed ranks
/// of every sweep cell where the criterion fails.
pub fn run_tightness(cfg: &SweepConfig) -> Result<TightnessReport> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let mut line_jobs = Vec::new();
    for field in &cfg.fields {
        let q = field.q();
        let n_max = if q == 2 { 7 } else { (q - 1) * (cfg.d_max as u32 + 1) };
        for d in 1..=cfg.d_max {
            let mut n = q - 1;
            while n <= n_max {
                if gamma_dim(n as u64, d) <= cfg.cap {
                    line_jobs.push((field.clone(), d, n));
                }
                n += q - 1;
            }
        }
    }
    let lines: Vec<LineRow> = pool.install(|| {
        line_jobs
            .par_iter()
            .map(|(field, d, n)| {
                let rank = crate::chmorph::span_rank(field, &[vec![*n]], *d)?;
                let lines = flag_count(field.q(), *d, 1);
                Ok(LineRow {
                    q: field.q(),
                    d: *d,
                    n: *n,
                    rank,
                    lines,
                    injective: rank as u64 == lines,
                    threshold_met: *n as u64 >= (field.q() as u64 - 1) * *d as u64,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let sharpness_violations =
        lines.iter().filter(|l| l.q == 2 && l.injective != (l.n as usize >= l.d)).count();
    let threshold_violations = lines.iter().filter(|l| l.threshold_met && !l.injective).count();

    let mut sweep_cfg = cfg.clone();
    sweep_cfg.key_step = false;
    let sweep = run_theorem_sweep(&sweep_cfg)?;
    let below: Vec<CriterionReport> = sweep.cells.into_iter().filter(|c| !c.criterion_holds).collect();
    let injective_below_threshold = below.iter().filter(|c| c.injective == Some(true)).count();
    let not_injective_below_threshold = below.iter().filter(|c| c.injective == Some(false)).count();
    Ok(TightnessReport {
        fields: fields_json(cfg),
        lines,
        sharpness_violations,
        threshold_violations,
        below_threshold: below,
        injective_below_threshold,
        not_injective_below_threshold,
    })
}

impl Report for TightnessReport {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    fn header(&self) -> Vec<&'static str> {
        CELL_HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.below_threshold.iter().map(cell_row).collect()
    }

    fn summary(&self) -> String {
        let mut s = String::from("\nline maps (q, d, n, rank/lines, injective, threshold)\n");
        for l in &self.lines {
            let _ = writeln!(
                s,
                "  {} {} {:>3}  {}/{}  {}  {}",
                l.q, l.d, l.n, l.rank, l.lines, l.injective, l.threshold_met
            );
        }
        let _ = writeln!(
            s,
            "q=2 sharpness violations {}  threshold violations {}  below threshold: injective {} not injective {}",
            self.sharpness_violations,
            self.threshold_violations,
            self.injective_below_threshold,
            self.not_injective_below_threshold
        );
        s
    }

    fn exit_code(&self) -> i32 {
        if self.sharpness_violations + self.threshold_violations > 0 {
            EXIT_FALSIFIED
        } else {
            EXIT_OK
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizedCell {
    pub q: u32,
    pub d: usize,
    pub seq: Vec<u32>,
    pub plus: Vec<u32>,
    pub flag_dim: u64,
    pub gamma_dim_plus: u64,
    pub rank_plus: Option<usize>,
    pub injective_plus: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaCell {
    pub q: u32,
    pub d: usize,
    pub seq: Vec<u32>,
    pub check: DiagramCheck,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub fields: Vec<String>,
    pub cap: u64,
    pub plus_cap: u64,
    pub cells: Vec<StabilizedCell>,
    pub eta: Vec<EtaCell>,
    pub checked: usize,
    pub failures: usize,
    pub skipped: usize,
    pub eta_failures: usize,
}

/// Work bound for the `η` diagram: flags times both tensor factor sizes.
const ETA_BUDGET: u64 = 20_000_000;

/// Checks `φ_{s̲⁺}` for every injective cell of `sweep`, and the `η`
/// diagram on every cell whose check fits the work bound.
pub fn stabilization_from(cfg: &SweepConfig, sweep: &[CriterionReport]) -> Result<StabilizationReport> {
    let pool = thread_pool()?;
    let field_of = |q: u32| cfg.fields.iter().find(|f| f.q() == q).cloned();
    let injective: Vec<&CriterionReport> = sweep.iter().filter(|c| c.injective == Some(true)).collect();
    let cells: Vec<StabilizedCell> = pool.install(|| {
        injective
            .par_iter()
            .map(|c| {
                let field = field_of(c.q).ok_or_else(|| Error::Usage(format!("no field of order {}", c.q)))?;
                let s = SeqS::new(c.seq.clone())?;
                let plus = s.plus();
                let gdim = gamma_dim(plus.degree(c.q)?, c.d);
                let rank_plus = if gdim <= cfg.plus_cap { Some(phi_rank(&field, &plus, c.d)?) } else { None };
                Ok(StabilizedCell {
                    q: c.q,
                    d: c.d,
                    seq: c.seq.clone(),
                    plus: plus.entries().to_vec(),
                    flag_dim: c.flag_dim,
                    gamma_dim_plus: gdim,
                    rank_plus,
                    injective_plus: rank_plus.map(|r| r as u64 == c.flag_dim),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut eta_jobs = Vec::new();
    for c in sweep.iter().filter(|c| c.flag_dim > 0) {
        let s = SeqS::new(c.seq.clone())?;
        let low = gamma_dim(c.degree, c.d);
        let tail = gamma_dim((c.q as u64 - 1) * c.seq.len() as u64, c.d);
        let high = gamma_dim(s.plus().degree(c.q)?, c.d);
        let work = c.flag_dim.saturating_mul(low.saturating_mul(tail).max(high));
        if work <= ETA_BUDGET && high <= cfg.cap {
            eta_jobs.push((c.q, c.d, s));
        }
    }
    let eta: Vec<EtaCell> = pool.install(|| {
        eta_jobs
            .par_iter()
            .map(|(q, d, s)| {
                let field = field_of(*q).expect("field present");
                let check = eta_diagram_check(&field, s, *d, CheckScope::All)?;
                Ok(EtaCell { q: *q, d: *d, seq: s.entries().to_vec(), check })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(StabilizationReport {
        fields: fields_json(cfg),
        cap: cfg.cap,
        plus_cap: cfg.plus_cap,
        checked: cells.iter().filter(|c| c.injective_plus.is_some()).count(),
        failures: cells.iter().filter(|c| c.injective_plus == Some(false)).count(),
        skipped: cells.iter().filter(|c| c.injective_plus.is_none()).count(),
        eta_failures: eta.iter().filter(|e| !e.check.holds).count(),
        cells,
        eta,
    })
}

/// Runs the theorem sweep without the key step, then [`stabilization_from`].
pub fn run_stabilization(cfg: &SweepConfig) -> Result<StabilizationReport> {
    let mut sweep_cfg = cfg.clone();
    sweep_cfg.key_step = false;
    let sweep = run_theorem_sweep(&sweep_cfg)?;
    stabilization_from(cfg, &sweep.cells)
}

impl Report for StabilizationReport {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["q", "d", "seq", "plus", "flag_dim", "gamma_dim_plus", "rank_plus", "injective_plus"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                vec![
                    c.q.to_string(),
                    c.d.to_string(),
                    seq_text(&c.seq),
                    seq_text(&c.plus),
                    c.flag_dim.to_string(),
                    c.gamma_dim_plus.to_string(),
                    opt(&c.rank_plus),
                    opt(&c.injective_plus),
                ]
            })
            .collect()
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "\nshifted cells checked {}  failures {}  skipped {}\neta diagram (q, d, seq, holds, flags)\n",
            self.checked, self.failures, self.skipped
        );
        for e in &self.eta {
            let _ = writeln!(s, "  {} {} {}  {}  {}", e.q, e.d, seq_text(&e.seq), e.check.holds, e.check.flags_checked);
        }
        let _ = writeln!(s, "eta failures {}", self.eta_failures);
        s
    }

    fn exit_code(&self) -> i32 {
        if self.failures + self.eta_failures > 0 {
            EXIT_FALSIFIED
        } else {
            EXIT_OK
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingRow {
    pub q: u32,
    pub d: usize,
    pub n: u32,
    pub sequences: Vec<Vec<u32>>,
    pub gamma_dim: u64,
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingReport {
    pub fields: Vec<String>,
    pub rows: Vec<RingRow>,
    /// `(q, n, d)` where the dimension drops from `d` to `d + 1`.
    pub monotonicity_violations: Vec<(u32, u32, usize)>,
}

/// Degree-`n` dimensions of the ring of lines for `n ≤ deg_max`, `d ≤ d_max`.
/// Degrees not of the form `[s̲]_q` are omitted.
pub fn run_ring_of_lines(cfg: &SweepConfig) -> Result<RingReport> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let mut jobs = Vec::new();
    for field in &cfg.fields {
        for n in 1..=cfg.deg_max {
            for d in 1..=cfg.d_max {
                let seqs = sequences_of_degree(field.q(), n as u64, d);
                if !seqs.is_empty() {
                    jobs.push((field.clone(), n, d, seqs));
                }
            }
        }
    }
    let rows: Vec<RingRow> = pool.install(|| {
        jobs.par_iter()
            .map(|(field, n, d, seqs)| {
                let gdim = gamma_dim(*n as u64, *d);
                let dim = if gdim <= cfg.cap { Some(ring_of_lines_dim(field, *n, *d)?) } else { None };
                Ok(RingRow { q: field.q(), d: *d, n: *n, sequences: seqs.clone(), gamma_dim: gdim, dim })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut violations = Vec::new();
    for a in &rows {
        if let Some(b) = rows.iter().find(|b| b.q == a.q && b.n == a.n && b.d == a.d + 1) {
            if let (Some(x), Some(y)) = (a.dim, b.dim) {
                if y < x {
                    violations.push((a.q, a.n, a.d));
                }
            }
        }
    }
    Ok(RingReport { fields: fields_json(cfg), rows, monotonicity_violations: violations })
}

impl Report for RingReport {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["q", "d", "n", "sequences", "gamma_dim", "dim"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let seqs: Vec<String> = r.sequences.iter().map(|s| seq_text(s)).collect();
                vec![
                    r.q.to_string(),
                    r.d.to_string(),
                    r.n.to_string(),
                    seqs.join(" "),
                    r.gamma_dim.to_string(),
                    opt(&r.dim),
                ]
            })
            .collect()
    }

    fn summary(&self) -> String {
        format!("\nmonotonicity violations {}\n", self.monotonicity_violations.len())
    }

    fn exit_code(&self) -> i32 {
        if self.monotonicity_violations.is_empty() {
            EXIT_OK
        } else {
            EXIT_FALSIFIED
        }
    }
}

/// Matrix of `φ_s̲` or of the line map `φ_n`, as JSON.
pub fn phi_matrix_json(field: &FieldSpec, d: usize, seq: Option<&SeqS>, line: Option<u32>, packed: bool) -> Result<Value> {
    let m = match (seq, line) {
        (Some(s), None) => crate::chmorph::phi_seq(field, s, d)?,
        (None, Some(n)) => phi_line(field, n, d)?,
        _ => return Err(Error::Usage("give exactly one of a sequence or a line degree".into())),
    };
    let degree = match (seq, line) {
        (Some(s), _) => s.degree(field.q())?,
        (_, Some(n)) => n as u64,
        _ => unreachable!(),
    };
    let mut v = serde_json::to_value(m.to_json(packed && field.q() == 2))?;
    if let Value::Object(map) = &mut v {
        map.insert("d".into(), d.into());
        map.insert("degree".into(), degree.into());
        if let Some(s) = seq {
            map.insert("seq".into(), s.entries().to_vec().into());
        }
    }
    Ok(v)
}
