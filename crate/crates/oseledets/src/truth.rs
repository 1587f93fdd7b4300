//! Ground-truth vector tables: CSV with header `time,j,x1,…,xd`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use oseledets_core::exact_model::{exact_vector, ExactGroundTruth};
use oseledets_core::method::Approximator;
use oseledets_core::{CocycleWindow, DVector, Error};

use crate::error::{CliError, CliResult};
use crate::output::{csv_writer, real};

#[derive(Clone, Debug, PartialEq)]
pub struct TruthTable {
    dim: usize,
    vectors: BTreeMap<(i64, usize), DVector<f64>>,
}

impl TruthTable {
    pub fn from_ground_truth(gt: &ExactGroundTruth) -> Self {
        let dim = gt.dim();
        let mut vectors = BTreeMap::new();
        for t in gt.start()..=gt.end() {
            for j in 1..=dim {
                vectors.insert((t, j), exact_vector(gt, t, j).expect("in range"));
            }
        }
        Self { dim, vectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, time: i64, j: usize) -> Option<&DVector<f64>> {
        self.vectors.get(&(time, j))
    }

    pub fn approximator(&self, j: usize) -> TableApproximator<'_> {
        TableApproximator { table: self, j }
    }

    pub fn write<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv_writer(out);
        let mut header = vec!["time".to_string(), "j".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        for (&(t, j), v) in &self.vectors {
            let mut row = vec![t.to_string(), j.to_string()];
            row.extend(v.iter().map(|&x| real(x)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self, String> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| e.to_string())?.clone();
        if header.len() < 3 || &header[0] != "time" || &header[1] != "j" {
            return Err("expected header `time,j,x1,…`".into());
        }
        let dim = header.len() - 2;
        let mut vectors = BTreeMap::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let bad = |what: &str| format!("record {}: bad {what}", line + 1);
            let t: i64 = rec[0].parse().map_err(|_| bad("time"))?;
            let j: usize = rec[1].parse().map_err(|_| bad("index"))?;
            let xs = (2..rec.len())
                .map(|i| rec[i].parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad("component"))?;
            if xs.len() != dim || j == 0 || j > dim {
                return Err(bad("shape"));
            }
            vectors.insert((t, j), DVector::from_vec(xs));
        }
        Ok(Self { dim, vectors })
    }

    pub fn read_file(path: &Path) -> CliResult<Self> {
        let f =
            std::fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::read(f).map_err(|m| CliError::format(path.display().to_string(), m))
    }
}

/// Table lookup as an approximation method.
pub struct TableApproximator<'a> {
    table: &'a TruthTable,
    j: usize,
}

impl Approximator for TableApproximator<'_> {
    fn approximate(
        &self,
        _window: &CocycleWindow,
        at: i64,
    ) -> oseledets_core::Result<DVector<f64>> {
        self.table
            .vector(at, self.j)
            .cloned()
            .ok_or(Error::OutOfWindow {
                requested: (at, at),
                available: self
                    .table
                    .vectors
                    .keys()
                    .next()
                    .zip(self.table.vectors.keys().next_back())
                    .map(|(a, b)| (a.0, b.0))
                    .unwrap_or((0, -1)),
            })
    }
}
