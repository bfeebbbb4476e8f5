//! Experiment records, CSV exchange, filtering, and the on-disk store.
//!
//! The exchange format is a plain CSV file with a mandatory header:
//!
//! ```text
//! po_material,to_material,machine,operation,regime,voltage_v,current_a,power_w,time_s
//! PC52,OL37,MEC-50,debiting,I,16,30,480,152
//! ```
//!
//! Lines whose first non-blank character is `#` are comments. The store file
//! uses the same field order prefixed by a record id and a `erode-store v1`
//! header line; floats are written with Rust's shortest round-trip formatting
//! so that save followed by load reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, RecordError, Result};

/// Header line required at the top of every record CSV file.
pub const CSV_HEADER: &str =
    "po_material,to_material,machine,operation,regime,voltage_v,current_a,power_w,time_s";

/// Header line of the store file format.
pub const STORE_HEADER: &str = "erode-store v1";

/// Largest tolerated difference between the recorded power and the product
/// of voltage and current, in watts.
pub const POWER_TOLERANCE_W: f64 = 0.5;

const CSV_FIELDS: usize = 9;
const STORE_FIELDS: usize = 10;

/// One debiting measurement: what was machined, on what, how it was driven,
/// and how long the cut took.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    /// Store-assigned identifier; 0 means "not stored yet".
    pub id: u64,
    pub po_material: String,
    pub to_material: String,
    pub machine: String,
    pub operation: String,
    pub regime: String,
    pub voltage_v: f64,
    pub current_a: f64,
    pub power_w: f64,
    pub time_s: f64,
}

impl ExperimentRecord {
    /// Checks every invariant a record must satisfy before it may enter a
    /// store: positive finite numerics, non-empty delimiter-free text fields,
    /// and consistency of power with voltage times current.
    pub fn validate(&self) -> std::result::Result<(), RecordError> {
        let numerics = [
            ("voltage_v", self.voltage_v),
            ("current_a", self.current_a),
            ("power_w", self.power_w),
            ("time_s", self.time_s),
        ];
        for (field, value) in numerics {
            if !value.is_finite() {
                return Err(RecordError::NotFinite { field, value });
            }
            if value <= 0.0 {
                return Err(RecordError::NotPositive { field, value });
            }
        }
        let texts = [
            ("po_material", &self.po_material),
            ("to_material", &self.to_material),
            ("machine", &self.machine),
            ("operation", &self.operation),
            ("regime", &self.regime),
        ];
        for (field, text) in texts {
            if text.is_empty() {
                return Err(RecordError::EmptyField { field });
            }
            if text.contains([',', '\n', '\r']) || text.trim() != text {
                return Err(RecordError::ReservedText {
                    field,
                    text: text.clone(),
                });
            }
        }
        let product = self.voltage_v * self.current_a;
        if (self.power_w - product).abs() > POWER_TOLERANCE_W {
            return Err(RecordError::PowerMismatch {
                power_w: self.power_w,
                product,
                tolerance: POWER_TOLERANCE_W,
            });
        }
        Ok(())
    }
}

/// Conjunctive exact-match filter; `None` fields match everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryFilter {
    pub po_material: Option<String>,
    pub to_material: Option<String>,
    pub machine: Option<String>,
    pub operation: Option<String>,
    pub regime: Option<String>,
}

impl QueryFilter {
    pub fn matches(&self, record: &ExperimentRecord) -> bool {
        let field_matches =
            |want: &Option<String>, have: &str| want.as_deref().is_none_or(|w| w == have);
        field_matches(&self.po_material, &record.po_material)
            && field_matches(&self.to_material, &record.to_material)
            && field_matches(&self.machine, &record.machine)
            && field_matches(&self.operation, &record.operation)
            && field_matches(&self.regime, &record.regime)
    }

    pub fn is_empty(&self) -> bool {
        *self == QueryFilter::default()
    }
}

/// (power, time) pairs ready for fitting, with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// (power_w, time_s) pairs, ordered by record id.
    pub points: Vec<(f64, f64)>,
    pub label: String,
}

/// Builds a fitting dataset from records: x = power_w, y = time_s, ordered
/// by record id. The label names the common workpiece material and
/// operation, or `mixed` where the records disagree.
pub fn extract_dataset<'a, I>(records: I) -> Result<Dataset>
where
    I: IntoIterator<Item = &'a ExperimentRecord>,
{
    let mut records: Vec<&ExperimentRecord> = records.into_iter().collect();
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    records.sort_by_key(|r| r.id);

    let common = |field: fn(&ExperimentRecord) -> &str| -> &str {
        let first = field(records[0]);
        if records.iter().all(|r| field(r) == first) {
            first
        } else {
            "mixed"
        }
    };
    let label = format!(
        "{} {}",
        common(|r| &r.po_material),
        common(|r| &r.operation)
    );
    let points = records
        .iter()
        .map(|r| (r.power_w, r.time_s))
        .collect();
    Ok(Dataset { points, label })
}

fn split_fields(line: &str, line_no: usize, expected: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != expected {
        return Err(Error::FieldCount {
            line: line_no,
            expected,
            found: fields.len(),
        });
    }
    Ok(fields)
}

fn parse_float(text: &str, field: &'static str, line_no: usize) -> Result<f64> {
    let value: f64 = text.parse().map_err(|_| Error::NumberParse {
        line: line_no,
        field,
        text: text.to_string(),
    })?;
    if !value.is_finite() {
        return Err(Error::NumberParse {
            line: line_no,
            field,
            text: text.to_string(),
        });
    }
    Ok(value)
}

fn parse_csv_row(line: &str, line_no: usize) -> Result<ExperimentRecord> {
    let f = split_fields(line, line_no, CSV_FIELDS)?;
    let record = ExperimentRecord {
        id: 0,
        po_material: f[0].to_string(),
        to_material: f[1].to_string(),
        machine: f[2].to_string(),
        operation: f[3].to_string(),
        regime: f[4].to_string(),
        voltage_v: parse_float(f[5], "voltage_v", line_no)?,
        current_a: parse_float(f[6], "current_a", line_no)?,
        power_w: parse_float(f[7], "power_w", line_no)?,
        time_s: parse_float(f[8], "time_s", line_no)?,
    };
    record.validate().map_err(|source| Error::InvalidRow {
        line: line_no,
        source,
    })?;
    Ok(record)
}

/// Yields (physical line number, content) for data lines, skipping blanks
/// and `#` comments.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| {
            let t = line.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn check_csv_header(line: &str, line_no: usize) -> Result<()> {
    if line.trim() != CSV_HEADER {
        return Err(Error::BadHeader {
            expected: CSV_HEADER.to_string(),
            found: line.trim().to_string(),
        });
    }
    let _ = line_no;
    Ok(())
}

/// Parses a record CSV document. Any malformed row fails the whole parse;
/// use [`parse_csv_lossy`] to collect per-row errors instead.
///
/// Returned records carry id 0; ids are assigned when records enter a store.
pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = data_lines(text);
    match lines.next() {
        None => Ok(Vec::new()),
        Some((line_no, header)) => {
            check_csv_header(header, line_no)?;
            lines
                .map(|(line_no, line)| parse_csv_row(line, line_no))
                .collect()
        }
    }
}

/// Like [`parse_csv`] but keeps going after row errors, returning the good
/// records and the per-row failures. A bad or missing header still rejects
/// the whole document.
pub fn parse_csv_lossy(text: &str) -> (Vec<ExperimentRecord>, Vec<Error>) {
    let mut lines = data_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return (Vec::new(), Vec::new());
    };
    if let Err(e) = check_csv_header(header, line_no) {
        return (Vec::new(), vec![e]);
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (line_no, line) in lines {
        match parse_csv_row(line, line_no) {
            Ok(r) => records.push(r),
            Err(e) => errors.push(e),
        }
    }
    (records, errors)
}

/// Writes records back out as a CSV document with the standard header.
/// Floats use shortest round-trip formatting, so
/// `parse_csv(&serialize_csv(&records))` reproduces the records exactly
/// (ids excepted: the CSV format does not carry them).
pub fn serialize_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.po_material,
            r.to_material,
            r.machine,
            r.operation,
            r.regime,
            r.voltage_v,
            r.current_a,
            r.power_w,
            r.time_s
        ));
    }
    out
}

/// In-memory collection of validated records with stable, strictly
/// increasing ids.
#[derive(Debug, Clone)]
pub struct Store {
    records: Vec<ExperimentRecord>,
    next_id: u64,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store {
            records: Vec::new(),
            next_id: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    /// Validates and stores a record, assigning the next id. Whatever id the
    /// input carried is ignored. Returns the assigned id; on error the store
    /// is unchanged.
    pub fn add(&mut self, record: ExperimentRecord) -> Result<u64> {
        record.validate()?;
        let id = self.next_id;
        self.next_id += 1;
        self.records.push(ExperimentRecord { id, ..record });
        Ok(id)
    }

    /// Records matching the filter, in id order.
    pub fn query(&self, filter: &QueryFilter) -> Vec<&ExperimentRecord> {
        self.records.iter().filter(|r| filter.matches(r)).collect()
    }

    /// Convenience: query then [`extract_dataset`].
    pub fn dataset(&self, filter: &QueryFilter) -> Result<Dataset> {
        extract_dataset(self.query(filter))
    }

    pub fn save_to_writer(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{STORE_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.id,
                r.po_material,
                r.to_material,
                r.machine,
                r.operation,
                r.regime,
                r.voltage_v,
                r.current_a,
                r.power_w,
                r.time_s
            )?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let attach = |e| Error::io(path.display().to_string(), e);
        let mut w = BufWriter::new(File::create(path).map_err(attach)?);
        self.save_to_writer(&mut w).map_err(attach)?;
        w.flush().map_err(attach)
    }

    /// Reads a store file. An empty (or all-whitespace) input is an empty
    /// store; anything else must start with the [`STORE_HEADER`] line.
    pub fn load_from_reader(r: impl Read) -> Result<Store> {
        let mut text = String::new();
        BufReader::new(r).read_to_string(&mut text)?;
        let mut store = Store::new();
        let mut lines = data_lines(&text);
        let Some((_, header)) = lines.next() else {
            return Ok(store);
        };
        if header.trim() != STORE_HEADER {
            let found = header.trim().to_string();
            return Err(if found.starts_with("erode-store") {
                Error::VersionMismatch {
                    expected: STORE_HEADER.to_string(),
                    found,
                }
            } else {
                Error::BadHeader {
                    expected: STORE_HEADER.to_string(),
                    found,
                }
            });
        }
        let mut previous = 0u64;
        for (line_no, line) in lines {
            let f = split_fields(line, line_no, STORE_FIELDS)?;
            let id: u64 = f[0].parse().map_err(|_| Error::IdParse {
                line: line_no,
                field: "id",
                text: f[0].to_string(),
            })?;
            if id <= previous {
                return Err(Error::IdOrder {
                    line: line_no,
                    id,
                    previous,
                });
            }
            previous = id;
            let record = ExperimentRecord {
                id,
                po_material: f[1].to_string(),
                to_material: f[2].to_string(),
                machine: f[3].to_string(),
                operation: f[4].to_string(),
                regime: f[5].to_string(),
                voltage_v: parse_float(f[6], "voltage_v", line_no)?,
                current_a: parse_float(f[7], "current_a", line_no)?,
                power_w: parse_float(f[8], "power_w", line_no)?,
                time_s: parse_float(f[9], "time_s", line_no)?,
            };
            record.validate().map_err(|source| Error::InvalidRow {
                line: line_no,
                source,
            })?;
            store.records.push(record);
        }
        store.next_id = previous + 1;
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Store> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Store::load_from_reader(file)
    }
}
