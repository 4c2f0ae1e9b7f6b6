use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::SweepRecord;
use crate::error::{Error, Result};

const HEADER: [&str; 14] = [
    "experiment",
    "modes",
    "nbar1",
    "nbar2",
    "r",
    "phi",
    "sigma",
    "method",
    "fidelity",
    "nonclassicality",
    "angle_deviation",
    "y",
    "physical",
    "error",
];

/// Writes a header row and one line per record, `\n` terminated.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for rec in records {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(records, BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses CSV text written by [`write_csv`]. Columns are matched by header name.
pub fn read_csv<R: Read>(input: R) -> std::result::Result<Vec<SweepRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Reads records written by [`emit_csv`]. Wall times are not stored and load as zero.
pub fn load_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(std::io::BufReader::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Experiment, Method};

    fn record(error: Option<&str>) -> SweepRecord {
        SweepRecord {
            experiment: Experiment::Fig5,
            modes: 2,
            nbar1: 0.0,
            nbar2: Some(1.0),
            r: 1.0,
            phi: 0.1 + 0.2,
            sigma: 1e-3,
            method: Method::Mle,
            fidelity: error.is_none().then_some(0.987_654_321_012_345_6),
            nonclassicality: error.is_none().then_some(2.885_390_081_777_926_8),
            angle_deviation: Some(-1.5e-12),
            y: None,
            physical: error.is_none().then_some(true),
            error: error.map(String::from),
            wall_time: 0.0,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "experiment,modes,nbar1,nbar2,r,phi,sigma,method,fidelity,nonclassicality,angle_deviation,y,physical,error\n"
        );
    }

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let recs = vec![record(None), record(Some("bad cell, \"quoted\""))];
        emit_csv(&recs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.contains("\"bad cell, \"\"quoted\"\"\""));
        assert_eq!(load_csv(&path).unwrap(), recs);
    }

    #[test]
    fn missing_column_is_rejected() {
        let text = "experiment,modes\nfig4,1\n";
        assert!(read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn io_errors_carry_path() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
