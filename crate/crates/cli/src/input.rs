//! Returns-CSV ingestion.
//!
//! Layout: one header row of asset labels, then one row per period, oldest
//! first. If the first cell of the first data row does not parse as a
//! number, the first column is taken to be opaque date strings (and the
//! first header cell their column title). Parsing is locale-independent:
//! dot decimal separator only, as produced by `f64::from_str`.

use std::collections::HashSet;
use std::path::Path;

use bayesmv_core::ReturnsWindow;
use csv::StringRecord;

use crate::error::{CliError, Result};

/// A raw record plus the 1-based line it started on.
struct Line {
    row: usize,
    record: StringRecord,
}

pub fn parse_returns_csv(path: &Path, prices: bool) -> Result<ReturnsWindow> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|err| map_csv_error(path, err))?;

    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|err| map_csv_error(path, err))?;
        let row = record
            .position()
            .map_or(lines.len() + 1, |p| p.line() as usize);
        lines.push(Line { row, record });
    }
    let Some((header, data)) = lines.split_first() else {
        return Err(CliError::EmptyInput { path: path.into() });
    };
    if data.is_empty() {
        return Err(CliError::EmptyInput { path: path.into() });
    }

    // A non-numeric first cell in the first data row marks a date column.
    let has_dates = data[0]
        .record
        .get(0)
        .is_none_or(|cell| parse_cell(cell).is_none());
    let offset = usize::from(has_dates);

    let labels: Vec<String> = header
        .record
        .iter()
        .skip(offset)
        .map(|cell| cell.trim().to_string())
        .collect();
    if labels.is_empty() {
        return Err(CliError::MalformedCsv {
            path: path.into(),
            row: header.row,
            col: None,
            detail: "header has no asset columns".into(),
        });
    }
    let mut seen = HashSet::new();
    for label in &labels {
        if !seen.insert(label.as_str()) {
            return Err(CliError::DuplicateLabels {
                label: label.clone(),
            });
        }
    }

    let width = header.record.len();
    let mut rows = Vec::with_capacity(data.len());
    let mut periods = Vec::with_capacity(data.len());
    for line in data {
        if line.record.len() != width {
            return Err(CliError::MalformedCsv {
                path: path.into(),
                row: line.row,
                col: None,
                detail: format!("expected {} fields, found {}", width, line.record.len()),
            });
        }
        if has_dates {
            periods.push(line.record[0].trim().to_string());
        }
        let mut row = Vec::with_capacity(labels.len());
        for (j, cell) in line.record.iter().enumerate().skip(offset) {
            let value = parse_cell(cell).ok_or_else(|| CliError::MalformedCsv {
                path: path.into(),
                row: line.row,
                col: Some(j + 1),
                detail: format!("expected a finite number, found {:?}", cell.trim()),
            })?;
            row.push(value);
        }
        rows.push(row);
    }

    if prices {
        convert_prices(path, &mut rows, &mut periods, &data.iter().map(|l| l.row).collect::<Vec<_>>(), offset)?;
    }
    if rows.is_empty() {
        return Err(CliError::EmptyInput { path: path.into() });
    }

    let mut window = ReturnsWindow::from_rows(&rows)?.with_labels(labels)?;
    if has_dates {
        window = window.with_periods(periods)?;
    }
    Ok(window)
}

/// Trimmed, finite f64 or None.
fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Replace price rows with simple returns p_t/p_{t-1} - 1 in place. Each
/// return carries the date of the period it ends on.
fn convert_prices(
    path: &Path,
    rows: &mut Vec<Vec<f64>>,
    periods: &mut Vec<String>,
    file_rows: &[usize],
    offset: usize,
) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p <= 0.0 {
                return Err(CliError::MalformedCsv {
                    path: path.into(),
                    row: file_rows[i],
                    col: Some(offset + j + 1),
                    detail: format!("prices must be positive, found {p}"),
                });
            }
        }
    }
    let returns: Vec<Vec<f64>> = rows
        .windows(2)
        .map(|pair| {
            pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(prev, next)| next / prev - 1.0)
                .collect()
        })
        .collect();
    *rows = returns;
    if !periods.is_empty() {
        periods.remove(0);
    }
    Ok(())
}

fn map_csv_error(path: &Path, err: csv::Error) -> CliError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io {
                context: format!("reading {}", path.display()),
                source,
            },
            _ => unreachable!("is_io_error() guarantees an Io kind"),
        }
    } else {
        let row = err
            .position()
            .map_or(0, |p| p.line() as usize);
        CliError::MalformedCsv {
            path: path.into(),
            row,
            col: None,
            detail: err.to_string(),
        }
    }
}
