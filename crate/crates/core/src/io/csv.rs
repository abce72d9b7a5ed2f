//! Scanner data as comma-separated text.
//!
//! The header is `period,item,price,quantity` or
//! `period,item,expenditure,quantity`. Fields are not quoted, so item ids may
//! not contain commas; such rows are rejected. Floats are written in Rust's
//! shortest round-trip form, so emitting and re-reading a dataset is exact.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use crate::model::{Dataset, ItemId, Observation, Period, PeriodData, Violation};

pub const PRICE_HEADER: &str = "period,item,price,quantity";
pub const EXPENDITURE_HEADER: &str = "period,item,expenditure,quantity";

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("read error: {0}")]
    Io(#[from] io::Error),
    #[error("empty input: expected header {PRICE_HEADER:?} or {EXPENDITURE_HEADER:?}")]
    Empty,
    #[error("line 1: both price and expenditure columns present")]
    PriceAndExpenditure,
    #[error("line 1: unrecognized header {0:?}; expected {PRICE_HEADER:?} or {EXPENDITURE_HEADER:?}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("line {line}: duplicate observation for period {period}, item {item} (first on line {first})")]
    Duplicate {
        line: usize,
        first: usize,
        period: Period,
        item: ItemId,
    },
    #[error("invalid dataset: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ValueColumn {
    Price,
    Expenditure,
}

/// A parsed file and the number of zero-quantity rows dropped from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dataset: Dataset,
    pub dropped_zero_quantity: usize,
}

fn parse_header(line: &str) -> Result<ValueColumn, CsvError> {
    match line {
        PRICE_HEADER => Ok(ValueColumn::Price),
        EXPENDITURE_HEADER => Ok(ValueColumn::Expenditure),
        _ => {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.contains(&"price") && cols.contains(&"expenditure") {
                Err(CsvError::PriceAndExpenditure)
            } else {
                Err(CsvError::Header(line.to_string()))
            }
        }
    }
}

fn number(field: &str, name: &str, line: usize) -> Result<f64, CsvError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CsvError::Row {
            line,
            message: format!("{name} {field:?} is not a finite number"),
        })
}

/// Parses a dataset, validating it as a whole at the end.
pub fn ingest_csv<R: BufRead>(reader: R) -> Result<Ingested, CsvError> {
    let mut lines = reader.lines();
    let header = loop {
        match lines.next() {
            None => return Err(CsvError::Empty),
            Some(l) => {
                let l = l?;
                let l = l.trim_end_matches('\r');
                if !l.is_empty() {
                    break l.to_string();
                }
            }
        }
    };
    let column = parse_header(&header)?;

    let mut periods: BTreeMap<Period, PeriodData> = BTreeMap::new();
    let mut seen: BTreeMap<(Period, ItemId), usize> = BTreeMap::new();
    let mut dropped = 0;
    for (idx, raw) in lines.enumerate() {
        let line = idx + 2;
        let raw = raw?;
        let text = raw.trim_end_matches('\r');
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 4 {
            return Err(CsvError::Row {
                line,
                message: format!("expected 4 fields, found {} (item ids may not contain commas)", fields.len()),
            });
        }
        let period: Period = fields[0].parse().map_err(|_| CsvError::Row {
            line,
            message: format!("period {:?} is not a non-negative integer", fields[0]),
        })?;
        if fields[1].is_empty() {
            return Err(CsvError::Row {
                line,
                message: "empty item id".into(),
            });
        }
        let item = ItemId::new(fields[1]);
        let value = number(fields[2], if column == ValueColumn::Price { "price" } else { "expenditure" }, line)?;
        let quantity = number(fields[3], "quantity", line)?;
        if let Some(&first) = seen.get(&(period, item.clone())) {
            return Err(CsvError::Duplicate {
                line,
                first,
                period,
                item,
            });
        }
        seen.insert((period, item.clone()), line);
        if quantity < 0.0 {
            return Err(CsvError::Row {
                line,
                message: format!("negative quantity {quantity}"),
            });
        }
        if quantity == 0.0 {
            dropped += 1;
            continue;
        }
        if value <= 0.0 {
            return Err(CsvError::Row {
                line,
                message: format!("non-positive {}", fields[2]),
            });
        }
        let obs = match column {
            ValueColumn::Price => Observation::new(value, quantity),
            ValueColumn::Expenditure => Observation::from_expenditure(value, quantity),
        };
        periods
            .entry(period)
            .or_insert_with(|| PeriodData::new(period))
            .items
            .insert(item, obs);
    }
    let dataset = Dataset::new(periods.into_values().collect()).map_err(CsvError::Invalid)?;
    Ok(Ingested {
        dataset,
        dropped_zero_quantity: dropped,
    })
}

/// Writes `dataset` with the price header. Fails on item ids that cannot be
/// written unquoted.
pub fn emit_csv<W: Write>(dataset: &Dataset, mut out: W) -> io::Result<()> {
    writeln!(out, "{PRICE_HEADER}")?;
    for pd in dataset.periods() {
        for (id, obs) in &pd.items {
            if id.as_str().contains([',', '\n', '\r']) || id.as_str().is_empty() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("item id {:?} cannot be written unquoted", id.as_str()),
                ));
            }
            writeln!(out, "{},{},{},{}", pd.period, id, obs.price, obs.quantity)?;
        }
    }
    Ok(())
}
