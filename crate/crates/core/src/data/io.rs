//! JSON-lines dataset files.
//!
//! The first line is a header object; every following line is one trace:
//!
//! ```text
//! {"props":["a","b","c"],"target":"F a","seed":7,"noise":0.0,"char_count":4,"flipped":[]}
//! {"label":1,"steps":[[1,0,0],[0,0,0]]}
//! ```
//!
//! Bits in `steps` follow the header's proposition order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, LabeledTrace, Provenance, Trace};
use crate::ltl::PropSet;

#[derive(Serialize, Deserialize)]
struct Header {
    props: Vec<String>,
    target: Option<String>,
    seed: u64,
    noise: f64,
    #[serde(default)]
    char_count: usize,
    #[serde(default)]
    flipped: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    label: u8,
    steps: Vec<Vec<u8>>,
}

fn io_err(e: std::io::Error) -> DataError {
    DataError::Io(e.to_string())
}

pub fn write_dataset(d: &Dataset, mut out: impl Write) -> Result<(), DataError> {
    let header = Header {
        props: d.props.names().to_vec(),
        target: d.provenance.target.clone(),
        seed: d.provenance.seed,
        noise: d.provenance.noise,
        char_count: d.provenance.char_count,
        flipped: d.provenance.flipped.clone(),
    };
    let line = serde_json::to_string(&header).map_err(|e| DataError::Io(e.to_string()))?;
    writeln!(out, "{line}").map_err(io_err)?;
    for lt in &d.traces {
        let row = Row {
            label: lt.label as u8,
            steps: lt.trace.to_bools().into_iter().map(|s| s.into_iter().map(u8::from).collect()).collect(),
        };
        let line = serde_json::to_string(&row).map_err(|e| DataError::Io(e.to_string()))?;
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn read_dataset(input: impl BufRead) -> Result<Dataset, DataError> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
    let format = |line: usize, message: String| DataError::Format { line: line + 1, message };
    let (hline, header) = lines.next().ok_or_else(|| format(0, "missing header".into()))?;
    let header: Header = serde_json::from_str(&header.map_err(io_err)?).map_err(|e| format(hline, e.to_string()))?;
    let props = PropSet::new(header.props).map_err(|e| format(hline, e.to_string()))?;
    let mut traces = Vec::new();
    for (i, line) in lines {
        let row: Row = serde_json::from_str(&line.map_err(io_err)?).map_err(|e| format(i, e.to_string()))?;
        if row.label > 1 || row.steps.iter().flatten().any(|&b| b > 1) {
            return Err(format(i, "labels and bits must be 0 or 1".into()));
        }
        let steps = row.steps.into_iter().map(|s| s.into_iter().map(|b| b == 1).collect()).collect();
        let trace = Trace::from_bools(steps).map_err(|e| format(i, e.to_string()))?;
        traces.push(LabeledTrace { trace, label: row.label == 1 });
    }
    let provenance = Provenance {
        target: header.target,
        seed: header.seed,
        noise: header.noise,
        char_count: header.char_count,
        flipped: header.flipped,
    };
    Dataset::new(props, traces, provenance)
}

impl Dataset {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        write_dataset(self, BufWriter::new(File::create(path).map_err(io_err)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
        read_dataset(BufReader::new(File::open(path).map_err(io_err)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_dataset, inject_noise, DatasetSpec};
    use crate::ltl::parse;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let props = PropSet::alphabetic(2);
        let d = Dataset::new(
            props,
            vec![LabeledTrace { trace: Trace::new(2, vec![1, 2]).unwrap(), label: true }],
            Provenance { target: Some("F a".into()), seed: 7, noise: 0.01, ..Default::default() },
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            r#"{"props":["a","b"],"target":"F a","seed":7,"noise":0.01,"char_count":0,"flipped":[]}"#
        );
        assert_eq!(lines.next().unwrap(), r#"{"label":1,"steps":[[1,0],[0,1]]}"#);
    }

    #[test]
    fn malformed_rows_are_reported_with_line_numbers() {
        let text = "{\"props\":[\"a\"],\"target\":null,\"seed\":0,\"noise\":0.0}\n{\"label\":2,\"steps\":[[1]]}\n";
        assert!(matches!(read_dataset(text.as_bytes()), Err(DataError::Format { line: 2, .. })));
        assert!(matches!(read_dataset("".as_bytes()), Err(DataError::Format { line: 1, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_exact(seed in any::<u64>(), rate in 0.0f64..0.2) {
            let props = PropSet::alphabetic(3);
            let f = parse("a U (b | c)", &props).unwrap();
            let d = build_dataset(&f, &props, &[], DatasetSpec { n_pos: 10, n_neg: 12, length: 6, seed }).unwrap();
            let d = inject_noise(&d, rate, seed ^ 1).unwrap();
            let mut buf = Vec::new();
            write_dataset(&d, &mut buf).unwrap();
            prop_assert_eq!(read_dataset(buf.as_slice()).unwrap(), d);
        }
    }
}
