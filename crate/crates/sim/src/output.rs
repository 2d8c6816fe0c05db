//! CSV results, valuation histograms and graph edge lists.
//!
//! Results CSV columns: the sweep-axis names in sorted order, then `period`,
//! `statistic`, `mean`, `std`, `n_runs`. Floats carry 9 significant digits.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use misfit_core::metrics::LogHistogram;
use misfit_core::{Graph, Statistic};

use crate::error::HarnessError;
use crate::format::format_sig9;
use crate::plan::{Axis, AxisValue, GridPoint};
use crate::sweep::RunRecord;

const FIXED_COLUMNS: [&str; 5] = ["period", "statistic", "mean", "std", "n_runs"];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

pub fn write_records<W: Write>(
    records: &[RunRecord],
    axes: &[Axis],
    out: W,
) -> Result<(), HarnessError> {
    let mut axes = axes.to_vec();
    axes.sort_unstable();
    let mut writer = csv::Writer::from_writer(out);
    let header: Vec<&str> = axes.iter().map(|a| a.name()).chain(FIXED_COLUMNS).collect();
    writer.write_record(&header)?;
    for record in records {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for axis in &axes {
            let value = record.point.get(*axis).ok_or_else(|| {
                HarnessError::Malformed(format!("record is missing sweep axis `{axis}`"))
            })?;
            row.push(value.to_string());
        }
        row.push(record.period.to_string());
        row.push(record.statistic.name().to_string());
        row.push(format_sig9(record.mean));
        row.push(format_sig9(record.std));
        row.push(record.n_runs.to_string());
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

/// Writes `records` as CSV to `path`.
pub fn write_csv(records: &[RunRecord], axes: &[Axis], path: &Path) -> Result<(), HarnessError> {
    let mut file = create(path)?;
    write_records(records, axes, &mut file)?;
    file.flush().map_err(io_err(path))
}

/// Parses a results CSV produced by [`write_csv`].
pub fn read_records<R: Read>(input: R) -> Result<(Vec<Axis>, Vec<RunRecord>), HarnessError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    let n_axes = header.len().saturating_sub(FIXED_COLUMNS.len());
    if header.iter().skip(n_axes).ne(FIXED_COLUMNS) {
        return Err(HarnessError::Malformed(format!(
            "unexpected header {header:?}"
        )));
    }
    let axes = header
        .iter()
        .take(n_axes)
        .map(|name| {
            Axis::from_name(name)
                .ok_or_else(|| HarnessError::Malformed(format!("unknown axis column `{name}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let bad = |what: &str, value: &str| HarnessError::Malformed(format!("bad {what} `{value}`"));
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let values = axes
            .iter()
            .zip(row.iter())
            .map(|(&axis, v)| {
                let value = if axis == Axis::Tax {
                    AxisValue::Name(v.to_string())
                } else {
                    AxisValue::Number(v.parse().map_err(|_| bad(axis.name(), v))?)
                };
                Ok((axis, value))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let field = |i: usize| row.get(n_axes + i).unwrap_or("");
        records.push(RunRecord {
            point: GridPoint { values },
            period: field(0).parse().map_err(|_| bad("period", field(0)))?,
            statistic: Statistic::from_name(field(1)).ok_or_else(|| bad("statistic", field(1)))?,
            mean: field(2).parse().map_err(|_| bad("mean", field(2)))?,
            std: field(3).parse().map_err(|_| bad("std", field(3)))?,
            n_runs: field(4).parse().map_err(|_| bad("n_runs", field(4)))?,
        });
    }
    Ok((axes, records))
}

pub fn read_csv(path: &Path) -> Result<(Vec<Axis>, Vec<RunRecord>), HarnessError> {
    read_records(File::open(path).map_err(io_err(path))?)
}

/// `results.csv` -> `results.hist.csv`.
pub fn histogram_path(results: &Path) -> PathBuf {
    let stem = results
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    results.with_file_name(format!("{stem}.hist.csv"))
}

/// Final-valuation histograms, one block of rows per grid point. The first
/// line is a `#` comment listing the bin edges.
pub fn write_histograms<W: Write>(
    points: &[GridPoint],
    histograms: &[LogHistogram],
    axes: &[Axis],
    mut out: W,
) -> Result<(), HarnessError> {
    let mut axes = axes.to_vec();
    axes.sort_unstable();
    let edges = histograms
        .first()
        .map(|h| h.edges().to_vec())
        .unwrap_or_else(|| LogHistogram::valuations().edges().to_vec());
    let edge_list: Vec<String> = edges.iter().map(|e| format_sig9(*e)).collect();
    writeln!(out, "# bin_edges: {}", edge_list.join(","))
        .map_err(|e| HarnessError::Csv(e.into()))?;

    let mut writer = csv::Writer::from_writer(out);
    let header: Vec<&str> = axes
        .iter()
        .map(|a| a.name())
        .chain(["bin", "lower", "upper", "count"])
        .collect();
    writer.write_record(&header)?;
    for (point, hist) in points.iter().zip(histograms) {
        for (bin, count) in hist.counts().iter().enumerate() {
            let mut row: Vec<String> = axes
                .iter()
                .map(|a| point.get(*a).map(ToString::to_string).unwrap_or_default())
                .collect();
            row.push(bin.to_string());
            row.push(format_sig9(hist.edges()[bin]));
            row.push(format_sig9(hist.edges()[bin + 1]));
            row.push(count.to_string());
            writer.write_record(&row)?;
        }
    }
    writer.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

/// One `i j` pair per line with `i < j`, ascending.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    for (i, j) in graph.edges() {
        writeln!(out, "{i} {j}")?;
    }
    out.flush()
}

pub fn write_histograms_file(
    points: &[GridPoint],
    histograms: &[LogHistogram],
    axes: &[Axis],
    path: &Path,
) -> Result<(), HarnessError> {
    let mut file = create(path)?;
    write_histograms(points, histograms, axes, &mut file)?;
    file.flush().map_err(io_err(path))
}
