//! Row-per-sample CSV, optionally with a trailing integer label column.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// First line is a header (`f0,f1,...[,label]`).
    pub header: bool,
    /// Last column holds integer class labels.
    pub labels: bool,
}

pub fn write_csv<W: Write>(m: &DataMatrix, w: W, opts: CsvOptions) -> Result<()> {
    let labels =
        if opts.labels {
            Some(m.labels().ok_or_else(|| {
                Error::InvalidData("labels requested but dataset has none".into())
            })?)
        } else {
            None
        };
    let mut w = BufWriter::new(w);
    if opts.header {
        let mut names: Vec<String> = (0..m.dim()).map(|i| format!("f{i}")).collect();
        if labels.is_some() {
            names.push("label".into());
        }
        writeln!(w, "{}", names.join(","))?;
    }
    let mut line = String::new();
    for j in 0..m.len() {
        line.clear();
        for (i, v) in m.column(j).iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            // 17 significant digits: lossless for f64.
            line.push_str(&format!("{v:.16e}"));
        }
        if let Some(l) = labels {
            line.push_str(&format!(",{}", l[j]));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R, opts: CsvOptions) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::RaggedRows {
                line,
                found: rec.len(),
                expected,
            });
        }
        let nfeat = if opts.labels { expected - 1 } else { expected };
        if nfeat == 0 {
            return Err(Error::Parse {
                line,
                msg: "no feature columns".into(),
            });
        }
        let row = rec
            .iter()
            .take(nfeat)
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if opts.labels {
            let s = &rec[nfeat];
            let l = s.parse::<usize>().map_err(|e| Error::Parse {
                line,
                msg: format!("label {s:?}: {e}"),
            })?;
            labels.push(l);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData("no rows".into()));
    }
    let d = rows[0].len();
    let points = DMatrix::from_fn(d, rows.len(), |i, j| rows[j][i]);
    DataMatrix::new(points, opts.labels.then_some(labels))
}

pub fn save_csv(m: &DataMatrix, path: impl AsRef<Path>, opts: CsvOptions) -> Result<()> {
    write_csv(m, File::create(path)?, opts)
}

pub fn load_csv(path: impl AsRef<Path>, opts: CsvOptions) -> Result<DataMatrix> {
    read_csv(BufReader::new(File::open(path)?), opts)
}
