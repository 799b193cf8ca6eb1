//! Tab-separated database ingestion.
//!
//! Format: first row is the header, one row per individual, one column per
//! locus. Row order becomes the 1-based index order of the partition.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::{ProfileRecord, SetPartition};

/// The seven-locus subset used by default when none is configured.
pub const DEFAULT_LOCI: [&str; 7] = [
    "DYS19", "DYS389I", "DYS389II", "DYS390", "DYS391", "DYS392", "DYS393",
];

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Locus columns joined into the profile key, in this order.
    pub loci: Vec<String>,
    /// Name of the identifier column; falls back to the row number when the
    /// column is absent.
    pub id_column: String,
    /// Separator between locus values in the key. Only equality of keys
    /// matters, so any character absent from allele notation works.
    pub key_separator: char,
    /// Keep only rows whose `column` equals `value`.
    pub row_filter: Option<(String, String)>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            loci: DEFAULT_LOCI.iter().map(|s| s.to_string()).collect(),
            id_column: "id".into(),
            key_separator: '|',
            row_filter: None,
        }
    }
}

/// Read a TSV database and reduce it to (records, partition of row indexes).
///
/// The partition equals `SetPartition::from_labels` over the canonical
/// profile keys, with row order preserved as index order.
pub fn ingest_database(
    path: impl AsRef<Path>,
    opts: &IngestOptions,
) -> Result<(Vec<ProfileRecord>, SetPartition)> {
    let path = path.as_ref();
    let pathname = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: pathname.clone(),
        source,
    })?;

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .filter(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::EmptyDatabase {
            path: pathname.clone(),
        })?;
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();

    let locus_idx: Vec<usize> = opts
        .loci
        .iter()
        .map(|name| {
            columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::MissingColumn {
                    column: name.clone(),
                    path: pathname.clone(),
                })
        })
        .collect::<Result<_>>()?;
    let id_idx = columns.iter().position(|c| *c == opts.id_column);
    let filter_idx =
        match &opts.row_filter {
            Some((column, value)) => {
                let idx = columns.iter().position(|c| c == column).ok_or_else(|| {
                    Error::MissingColumn {
                        column: column.clone(),
                        path: pathname.clone(),
                    }
                })?;
                Some((idx, value.as_str()))
            }
            None => None,
        };

    let mut records = Vec::new();
    let mut keys = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::RaggedRow {
                path: pathname,
                line: lineno + 1,
                expected: columns.len(),
                found: fields.len(),
            });
        }
        if let Some((idx, value)) = filter_idx {
            if fields[idx] != value {
                continue;
            }
        }
        for &li in &locus_idx {
            if fields[li].is_empty() {
                return Err(Error::Parse {
                    path: pathname,
                    line: lineno + 1,
                    message: format!("empty value for locus '{}'", columns[li]),
                });
            }
        }
        let key = locus_idx
            .iter()
            .map(|&li| fields[li])
            .collect::<Vec<_>>()
            .join(&opts.key_separator.to_string());
        let id = id_idx
            .map(|i| fields[i].to_string())
            .unwrap_or_else(|| format!("row{}", records.len() + 1));
        records.push(ProfileRecord {
            id,
            key: key.clone(),
        });
        keys.push(key);
    }
    if records.is_empty() {
        return Err(Error::EmptyDatabase { path: pathname });
    }
    let partition = SetPartition::from_labels(&keys)?;
    Ok((records, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tsv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn two_locus_opts() -> IngestOptions {
        IngestOptions {
            loci: vec!["L1".into(), "L2".into()],
            ..IngestOptions::default()
        }
    }

    #[test]
    fn reduces_by_key_equality() {
        let f = write_tsv("id\tL1\tL2\na\t10\t21\nb\t11\t21\nc\t10\t21\n");
        let (records, p) = ingest_database(f.path(), &two_locus_opts()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].key, "10|21");
        assert_eq!(p.blocks(), &[vec![1, 3], vec![2]]);
    }

    #[test]
    fn ragged_row_names_line() {
        let f = write_tsv("id\tL1\tL2\na\t10\t21\nb\t11\n");
        let err = ingest_database(f.path(), &two_locus_opts()).unwrap_err();
        match err {
            Error::RaggedRow {
                line,
                expected,
                found,
                ..
            } => {
                assert_eq!((line, expected, found), (3, 3, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_column_and_empty_file() {
        let f = write_tsv("id\tL1\na\t10\n");
        assert!(matches!(
            ingest_database(f.path(), &two_locus_opts()),
            Err(Error::MissingColumn { .. })
        ));
        let f = write_tsv("");
        assert!(matches!(
            ingest_database(f.path(), &two_locus_opts()),
            Err(Error::EmptyDatabase { .. })
        ));
    }

    #[test]
    fn row_filter_restricts_population() {
        let f = write_tsv(
            "id\tsite\tL1\tL2\na\tNL\t10\t21\nb\tDE\t11\t21\nc\tNL\t10\t21\nd\tNL\t12\t22\n",
        );
        let opts = IngestOptions {
            row_filter: Some(("site".into(), "NL".into())),
            ..two_locus_opts()
        };
        let (records, p) = ingest_database(f.path(), &opts).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(p.blocks(), &[vec![1, 2], vec![3]]);
    }

    #[test]
    fn key_separator_prevents_column_bleed() {
        // "1|23" vs "12|3" must be distinct keys.
        let f = write_tsv("id\tL1\tL2\na\t1\t23\nb\t12\t3\n");
        let (records, p) = ingest_database(f.path(), &two_locus_opts()).unwrap();
        assert_ne!(records[0].key, records[1].key);
        assert_eq!(p.num_blocks(), 2);
    }
}
