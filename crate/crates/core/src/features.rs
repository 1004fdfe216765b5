//! Feature vectors and the `features.csv` table.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::dictionary::{feature_dictionary, SchemaId};
use crate::error::{CoreError, Result};

pub const BOOKKEEPING_COLUMNS: [&str; 3] = ["label", "hashtag", "instance_id"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub schema: SchemaId,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(schema: SchemaId, values: Vec<f64>) -> Result<Self> {
        if values.len() != schema.len() {
            return Err(CoreError::Table(format!(
                "{} vector needs {} values, got {}",
                schema,
                schema.len(),
                values.len()
            )));
        }
        Ok(FeatureVector { schema, values })
    }

    /// Restricts an `ALL` vector to a sub-schema.
    pub fn project(&self, schema: SchemaId) -> Result<FeatureVector> {
        if self.schema != SchemaId::All {
            return Err(CoreError::Table(format!(
                "can only project from ALL, not {}",
                self.schema
            )));
        }
        FeatureVector::new(schema, self.values[schema.range()].to_vec())
    }
}

/// Dense instance × feature table plus the bookkeeping columns of `features.csv`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub hashtags: Vec<String>,
    pub instance_ids: Vec<String>,
}

impl FeatureTable {
    pub fn with_schema(schema: SchemaId) -> Self {
        FeatureTable {
            names: feature_dictionary(schema),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, values: Vec<f64>, label: u8, hashtag: &str, instance_id: &str) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(CoreError::Table(format!(
                "row for `{instance_id}` has {} values, table has {} columns",
                values.len(),
                self.names.len()
            )));
        }
        self.rows.push(values);
        self.labels.push(label);
        self.hashtags.push(hashtag.to_string());
        self.instance_ids.push(instance_id.to_string());
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Column positions of `names`, failing on the first one that is absent.
    pub fn column_indices(&self, names: &[String]) -> Result<Vec<usize>> {
        let lookup: HashMap<&str, usize> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        names
            .iter()
            .map(|n| {
                lookup
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| CoreError::Table(format!("feature `{n}` missing from table")))
            })
            .collect()
    }

    /// Keeps only the named columns, in the given order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureTable> {
        let idx = self.column_indices(names)?;
        Ok(FeatureTable {
            names: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
            labels: self.labels.clone(),
            hashtags: self.hashtags.clone(),
            instance_ids: self.instance_ids.clone(),
        })
    }

    pub fn select_schema(&self, schema: SchemaId) -> Result<FeatureTable> {
        self.select_columns(&feature_dictionary(schema))
    }

    /// Keeps the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureTable {
        FeatureTable {
            names: self.names.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            hashtags: rows.iter().map(|&i| self.hashtags[i].clone()).collect(),
            instance_ids: rows.iter().map(|&i| self.instance_ids[i].clone()).collect(),
        }
    }

    pub fn row_index(&self) -> HashMap<&str, usize> {
        self.instance_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        let header: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .chain(BOOKKEEPING_COLUMNS)
            .collect();
        w.write_record(&header)?;
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for i in 0..self.rows.len() {
            record.clear();
            record.extend(self.rows[i].iter().map(|v| format_value(*v)));
            record.push(self.labels[i].to_string());
            record.push(self.hashtags[i].clone());
            record.push(self.instance_ids[i].clone());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| CoreError::Table(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<FeatureTable> {
        let mut r = csv::ReaderBuilder::new().from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let n = header.len();
        if n < BOOKKEEPING_COLUMNS.len() || header[n - 3..] != BOOKKEEPING_COLUMNS {
            return Err(CoreError::Table(
                "header must end with label,hashtag,instance_id".into(),
            ));
        }
        let width = n - 3;
        let mut table = FeatureTable {
            names: header[..width].to_vec(),
            ..Default::default()
        };
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| CoreError::Table(format!("row {}: {what}", line + 2));
            let mut values = Vec::with_capacity(width);
            for field in rec.iter().take(width) {
                values.push(field.parse::<f64>().map_err(|_| bad(&format!("`{field}` is not a number")))?);
            }
            let label: u8 = rec[width].parse().map_err(|_| bad("label is not 0/1"))?;
            let hashtag = rec[width + 1].to_string();
            let id = rec[width + 2].to_string();
            table.push(values, label, &hashtag, &id)?;
        }
        Ok(table)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| CoreError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv_file(path: &Path) -> Result<FeatureTable> {
        let f = std::fs::File::open(path).map_err(|e| CoreError::io(path, e))?;
        FeatureTable::read_csv(std::io::BufReader::new(f))
    }
}

/// Shortest round-trip decimal; NaN is spelled `NaN`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}
