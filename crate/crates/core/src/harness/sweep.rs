//! Parameter sweeps: numeric matrices and analytic formulas side by side.

use super::config::{RunConfig, SweepConfig};
use crate::asymptotics::BiasContext;
use crate::error::{Error, Result};
use crate::measures::{evaluate, Diagnostics, MeasureKind, MeasureSpec};
use crate::physics::{ScatteringModel, SubsystemPair};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

/// Significant digits written to CSV.
pub const CSV_DIGITS: usize = 12;

/// One measure in one row; `None` where a pipeline was not requested or the
/// row failed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasureCell {
    pub numeric: Option<f64>,
    pub analytic: Option<f64>,
    pub numeric_norm: Option<f64>,
    pub analytic_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Bias value for bias sweeps.
    pub bias: Option<f64>,
    pub delta_d: i64,
    pub ell_mirror: i64,
    pub cells: Vec<MeasureCell>,
    pub diagnostics: Diagnostics<f64>,
    pub error: Option<String>,
}

/// Rows of a sweep with the header metadata needed to write them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub bias_column: Option<String>,
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Largest possible value of a measure for intervals of the given lengths,
/// one mode per site.
pub fn normalization(kind: MeasureKind, ell_left: i64, ell_right: i64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let small = ell_left.min(ell_right) as f64;
    match kind {
        MeasureKind::MutualInformation | MeasureKind::RenyiMutualInformation | MeasureKind::PetzRenyiMutualInformation => {
            2.0 * small * ln2
        }
        MeasureKind::Negativity | MeasureKind::RenyiNegativity => small * ln2,
        MeasureKind::VonNeumannEntropy | MeasureKind::RenyiEntropy => (ell_left + ell_right) as f64 * ln2,
    }
}

/// Geometry of one row.
fn geometry(cfg: &RunConfig, delta_d: i64) -> Result<SubsystemPair> {
    let g = &cfg.geometry;
    SubsystemPair::with_offset(delta_d, g.d_min.unwrap_or(0), g.ell_left, g.ell_right, cfg.impurity_halfwidth)
}

fn row_delta_d(cfg: &RunConfig, value: f64) -> i64 {
    match cfg.sweep {
        SweepConfig::Distance { .. } => value as i64,
        SweepConfig::Bias { delta_d, .. } => delta_d,
    }
}

/// Runs every row of the sweep. Configuration problems fail the whole sweep;
/// numerical failures are recorded on their row.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let specs = cfg.measure_specs()?;
    let model = cfg.scattering_model().map_err(|e| Error::Config(e.to_string()))?;
    cfg.quadrature_spec().map_err(|e| Error::Config(e.to_string()))?;
    let values = cfg.sweep_values();
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| {
            let delta_d = row_delta_d(cfg, v);
            let bias = cfg.bias_column().map(|_| v);
            let ell_mirror = geometry(cfg, delta_d).map(|g| g.mirror_overlap_length()).unwrap_or(0);
            match evaluate_row(cfg, &specs, &model, v, delta_d) {
                Ok((cells, diagnostics)) => SweepRow {
                    bias,
                    delta_d,
                    ell_mirror,
                    cells,
                    diagnostics,
                    error: None,
                },
                Err(e) => SweepRow {
                    bias,
                    delta_d,
                    ell_mirror,
                    cells: vec![MeasureCell::default(); specs.len()],
                    diagnostics: Diagnostics::default(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepTable {
        bias_column: cfg.bias_column().map(str::to_string),
        labels: specs.iter().map(|s| s.label()).collect(),
        rows,
    })
}

fn evaluate_row(
    cfg: &RunConfig,
    specs: &[MeasureSpec<f64>],
    model: &ScatteringModel<f64>,
    value: f64,
    delta_d: i64,
) -> Result<(Vec<MeasureCell>, Diagnostics<f64>)> {
    let geom = geometry(cfg, delta_d)?;
    let state = cfg.state_at(value, model)?;
    let quad = cfg.quadrature_spec()?;
    let (ll, lr) = (cfg.geometry.ell_left, cfg.geometry.ell_right);
    let mut diag = Diagnostics::<f64>::default();
    let mut cells = vec![MeasureCell::default(); specs.len()];

    if cfg.pipeline.numeric() {
        let c = state.build_subsystems(&geom, cfg.build_mode(), &quad)?;
        for (cell, spec) in cells.iter_mut().zip(specs) {
            let v = evaluate(spec, &c, ll as usize)?;
            cell.numeric = Some(v.value);
            cell.numeric_norm = Some(v.value / normalization(spec.kind, ll, lr));
            diag.spectrum_excursion = diag.spectrum_excursion.max(v.diagnostics.spectrum_excursion);
            diag.imag_residue = diag.imag_residue.max(v.diagnostics.imag_residue);
        }
    }
    if cfg.pipeline.analytic() {
        let ctx = BiasContext::new(state, quad);
        for (cell, spec) in cells.iter_mut().zip(specs) {
            let a = ctx.bipartite(spec.kind, spec.n, &geom)?.total;
            cell.analytic = Some(a);
            cell.analytic_norm = Some(a / normalization(spec.kind, ll, lr));
        }
    }
    Ok((cells, diag))
}

/// Column names in output order.
pub fn header(table: &SweepTable) -> Vec<String> {
    let mut h = Vec::new();
    if let Some(b) = &table.bias_column {
        h.push(b.clone());
    }
    h.push("delta_d".into());
    h.push("ell_mirror".into());
    for l in &table.labels {
        for suffix in ["numeric", "analytic", "numeric_norm", "analytic_norm"] {
            h.push(format!("{l}_{suffix}"));
        }
    }
    h
}

/// `v` with [`CSV_DIGITS`] significant digits.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        // keep the sign bit out of the file
        return format!("{:.*e}", CSV_DIGITS - 1, 0.0);
    }
    format!("{:.*e}", CSV_DIGITS - 1, v)
}

fn cell_text(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

/// Writes the table as CSV to any sink.
pub fn write_csv(table: &SweepTable, sink: impl Write) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header(table))?;
    for row in &table.rows {
        let mut rec = Vec::with_capacity(2 + 4 * row.cells.len() + 1);
        if let Some(b) = row.bias {
            rec.push(format_value(b));
        }
        rec.push(row.delta_d.to_string());
        rec.push(row.ell_mirror.to_string());
        for c in &row.cells {
            rec.push(cell_text(c.numeric));
            rec.push(cell_text(c.analytic));
            rec.push(cell_text(c.numeric_norm));
            rec.push(cell_text(c.analytic_norm));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the table to `path`.
pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Parsed CSV: header plus rows of optional values.
pub fn read_csv(reader: impl std::io::Read) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse::<f64>().map(Some).map_err(|e| Error::Io(format!("bad number `{f}`: {e}")))
                }
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
