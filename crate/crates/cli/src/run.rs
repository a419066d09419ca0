//! Executes a resolved [`ExperimentSpec`] and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use rabi_core::entanglement::{entropy_sweep, EntropyPoint};
use rabi_core::model::ModelKind;
use rabi_core::phasespace::{ground_state_wigner, WignerGrid};
use rabi_core::spectra::{
    find_avoided_crossings, gap_minima, sweep_spectrum, CrossingReport, SpectrumSweep,
};
use serde::Serialize;

use crate::config::{CommandKind, ExperimentSpec, Format, ModelParams, DEFAULT_WIGNER_COUPLINGS};
use crate::error::CliError;
use crate::format::{Cell, Table};
use crate::plot::{emit_plot, PlotData};

const CROSSINGS_DEFAULT_LEVELS: usize = 8;
const CROSSINGS_PRESET_G_MAX: f64 = 2.0;
const SURFACE_COUPLING: f64 = 10.0;

/// Collects artifacts in memory order and writes them one at a time.
struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn table(&mut self, spec: &ExperimentSpec, stem: &str, table: &Table) -> Result<(), CliError> {
        if spec.wants(Format::Csv) {
            self.write(&format!("{stem}.csv"), &table.to_csv())?;
        }
        if spec.wants(Format::Json) {
            self.write(&format!("{stem}.json"), &table.to_json(spec))?;
        }
        Ok(())
    }

    fn plots(
        &mut self,
        spec: &ExperimentSpec,
        data: PlotData<'_>,
        formats: &[Format],
        stem: &str,
        title: &str,
    ) -> Result<(), CliError> {
        for &format in formats {
            if spec.wants(format) {
                for file in emit_plot(data, format, stem, title)? {
                    self.write(&file.name, &file.contents)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a ExperimentSpec,
    artifacts: &'a [String],
}

fn require_formats(spec: &ExperimentSpec, allowed: &[Format]) -> Result<(), CliError> {
    match spec.formats.iter().find(|f| !allowed.contains(f)) {
        Some(f) => Err(CliError::Config(format!(
            "format {f:?} is not supported by the {:?} command",
            spec.command
        ))),
        None => Ok(()),
    }
}

/// Runs the experiment and returns the names of the files written, `manifest.json` last.
pub fn run(spec: &ExperimentSpec) -> Result<Vec<String>, CliError> {
    use Format::*;
    match spec.command {
        CommandKind::Spectrum | CommandKind::Entropy => require_formats(spec, &[Csv, Json, Svg])?,
        CommandKind::Crossings => require_formats(spec, &[Csv, Json])?,
        CommandKind::Wigner | CommandKind::ReproducePaper => {}
    }
    let mut sink = Sink::new(&spec.out)?;
    match spec.command {
        CommandKind::Spectrum => {
            let kind = kind_of(&spec.model);
            spectrum(
                &mut sink,
                spec,
                "spectrum",
                &format!("{} spectrum, N = {}", kind.label(), spec.model.n_max),
            )?
        }
        CommandKind::Entropy => entropy(&mut sink, spec, "entropy")?,
        CommandKind::Wigner => {
            for &g in &spec.g_grid {
                wigner(
                    &mut sink,
                    spec,
                    g,
                    &format!("wigner_g{}", tag(g)),
                    &[Svg, Gnuplot],
                )?;
            }
        }
        CommandKind::Crossings => crossings(&mut sink, spec, "crossings")?,
        CommandKind::ReproducePaper => reproduce(&mut sink, spec)?,
    }
    let manifest = Manifest {
        spec,
        artifacts: &sink.written,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    sink.write("manifest.json", &text)?;
    Ok(sink.written)
}

fn kind_of(model: &ModelParams) -> ModelKind {
    if model.diamagnetic {
        ModelKind::Qrma
    } else {
        ModelKind::Qrm
    }
}

/// Coupling as it appears in file names: `0`, `0.5`, `10`.
fn tag(g: f64) -> String {
    format!("{g}")
}

fn spectrum_table(sweep: &SpectrumSweep) -> Table {
    let mut columns = vec!["g_over_wc".to_string()];
    columns.extend((0..sweep.k_levels()).map(|j| format!("E{j}")));
    let mut table = Table::new(columns);
    for (g, levels) in sweep.g_grid.iter().zip(&sweep.levels) {
        let mut row = vec![Cell::Float(*g)];
        row.extend(levels.iter().map(|&e| Cell::Float(e)));
        table.push(row);
    }
    table
}

fn spectrum(
    sink: &mut Sink,
    spec: &ExperimentSpec,
    stem: &str,
    title: &str,
) -> Result<(), CliError> {
    let base = spec.model.config(spec.g_grid[0])?;
    let k = spec.levels.unwrap_or(2 * spec.model.n_max);
    let sweep = sweep_spectrum(&base, &spec.g_grid, k)?;
    sink.table(spec, stem, &spectrum_table(&sweep))?;
    sink.plots(
        spec,
        PlotData::Spectrum(&sweep),
        &[Format::Svg],
        stem,
        title,
    )
}

fn entropy_table(points: &[EntropyPoint]) -> Table {
    let mut table = Table::new(vec![
        "g_over_wc".into(),
        "S_qrm_bits".into(),
        "S_qrma_bits".into(),
    ]);
    for p in points {
        table.push(vec![
            Cell::Float(p.g),
            Cell::Float(p.s_qrm),
            Cell::Float(p.s_qrma),
        ]);
    }
    table
}

fn entropy(sink: &mut Sink, spec: &ExperimentSpec, stem: &str) -> Result<(), CliError> {
    let base = spec.model.config(0.0)?;
    let points = entropy_sweep(&base, &spec.g_grid)?;
    sink.table(spec, stem, &entropy_table(&points))?;
    let title = format!(
        "Qubit entropy, N = {} (QRM solid, QRMA dashed)",
        spec.model.n_max
    );
    sink.plots(
        spec,
        PlotData::Entropy(&points),
        &[Format::Svg],
        stem,
        &title,
    )
}

fn wigner_table(w: &WignerGrid) -> Table {
    let mut table = Table::new(vec!["q".into(), "p".into(), "w".into()]);
    let (qs, ps) = (w.grid.q_values(), w.grid.p_values());
    for (ip, &p) in ps.iter().enumerate() {
        for (iq, &q) in qs.iter().enumerate() {
            table.push(vec![
                Cell::Float(q),
                Cell::Float(p),
                Cell::Float(w.at(ip, iq)),
            ]);
        }
    }
    table
}

fn wigner(
    sink: &mut Sink,
    spec: &ExperimentSpec,
    g: f64,
    stem: &str,
    plots: &[Format],
) -> Result<(), CliError> {
    let cfg = spec.model.config(g)?;
    let w =
        ground_state_wigner(&cfg, &spec.quadrature).map_err(|e| rabi_core::Error::AtCoupling {
            g,
            source: Box::new(e),
        })?;
    sink.table(spec, stem, &wigner_table(&w))?;
    let title = format!(
        "{} ground-state Wigner function, g = {}, N = {}",
        kind_of(&spec.model).label(),
        tag(g),
        spec.model.n_max
    );
    sink.plots(spec, PlotData::Wigner(&w), plots, stem, &title)
}

fn crossing_table(reports: &[CrossingReport]) -> Table {
    let mut table = Table::new(
        ["level_lo", "level_hi", "g_at_min", "min_gap", "at_boundary"]
            .map(String::from)
            .to_vec(),
    );
    for r in reports {
        table.push(vec![
            Cell::Int(r.level_pair.0),
            Cell::Int(r.level_pair.1),
            Cell::Float(r.g_at_min),
            Cell::Float(r.min_gap),
            Cell::Bool(r.at_boundary),
        ]);
    }
    table
}

/// Interior gap minima of each adjacent pair; pairs without one report their global minimum.
pub fn crossing_reports(sweep: &SpectrumSweep) -> Result<Vec<CrossingReport>, CliError> {
    let mut reports = Vec::new();
    for k in 0..sweep.k_levels() - 1 {
        let minima = gap_minima(sweep, k)?;
        if minima.is_empty() {
            reports.push(find_avoided_crossings(sweep, k)?);
        } else {
            reports.extend(minima);
        }
    }
    Ok(reports)
}

fn crossings(sink: &mut Sink, spec: &ExperimentSpec, stem: &str) -> Result<(), CliError> {
    let base = spec.model.config(spec.g_grid[0])?;
    let k = spec
        .levels
        .unwrap_or(CROSSINGS_DEFAULT_LEVELS.min(2 * spec.model.n_max));
    if k < 2 {
        return Err(CliError::Config("crossings needs at least 2 levels".into()));
    }
    if spec.g_grid.len() < 3 {
        return Err(CliError::Config(
            "crossings needs at least 3 grid points".into(),
        ));
    }
    let sweep = sweep_spectrum(&base, &spec.g_grid, k)?;
    sink.table(spec, stem, &crossing_table(&crossing_reports(&sweep)?))
}

fn uniform(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

/// The full figure set: resonant QRM and QRMA at N = 2 and N = 15.
fn reproduce(sink: &mut Sink, spec: &ExperimentSpec) -> Result<(), CliError> {
    let derive = |command, n_max, kind, g_grid: Vec<f64>, levels| ExperimentSpec {
        command,
        model: spec.model.with(n_max, kind),
        g_grid,
        levels,
        ..spec.clone()
    };
    let table_formats: Vec<Format> = spec
        .formats
        .iter()
        .copied()
        .filter(|f| matches!(f, Format::Csv | Format::Json))
        .collect();
    let models = [(ModelKind::Qrm, 'a'), (ModelKind::Qrma, 'b')];

    for (fig, n_max) in [(1, 2), (2, 15)] {
        for (kind, panel) in models {
            let sub = derive(
                CommandKind::Spectrum,
                n_max,
                kind,
                spec.g_grid.clone(),
                None,
            );
            let title = format!("{} spectrum, N = {n_max}", kind.label());
            spectrum(sink, &sub, &format!("fig{fig}{panel}"), &title)?;
        }
    }

    let mut sub = derive(
        CommandKind::Crossings,
        15,
        ModelKind::Qrm,
        uniform(0.0, CROSSINGS_PRESET_G_MAX, 201),
        Some(CROSSINGS_DEFAULT_LEVELS),
    );
    sub.formats = table_formats;
    if !sub.formats.is_empty() {
        crossings(sink, &sub, "fig3")?;
    }

    for (fig, n_max) in [(4, 2), (5, 15)] {
        for (kind, panel) in models {
            let sub = derive(
                CommandKind::Wigner,
                n_max,
                kind,
                DEFAULT_WIGNER_COUPLINGS.to_vec(),
                None,
            );
            for &g in &sub.g_grid {
                wigner(
                    sink,
                    &sub,
                    g,
                    &format!("fig{fig}{panel}_g{}", tag(g)),
                    &[Format::Svg],
                )?;
            }
        }
    }
    for (fig, n_max) in [(6, 2), (7, 15)] {
        for (kind, panel) in models {
            let sub = derive(
                CommandKind::Wigner,
                n_max,
                kind,
                vec![SURFACE_COUPLING],
                None,
            );
            wigner(
                sink,
                &sub,
                SURFACE_COUPLING,
                &format!("fig{fig}{panel}"),
                &[Format::Gnuplot],
            )?;
        }
    }

    for (n_max, panel) in [(2, 'a'), (15, 'b')] {
        let sub = derive(
            CommandKind::Entropy,
            n_max,
            ModelKind::Qrm,
            spec.g_grid.clone(),
            None,
        );
        entropy(sink, &sub, &format!("fig8{panel}"))?;
    }
    Ok(())
}
