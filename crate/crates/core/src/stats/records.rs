use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const RECORDS_HEADER: [&str; 6] = ["target", "surrogate", "dataset", "AA", "H", "flags"];

const TABLE3_CSV: &str = include_str!("../../assets/table3.csv");
const TABLE3_SHA256: &str = include_str!("../../assets/table3.csv.sha256");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    /// Attack accuracy reported for a target that never trained well.
    SuppressedAa,
    /// No Hausdorff value available.
    MissingH,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::SuppressedAa => "suppressed_AA",
            Flag::MissingH => "missing_H",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRecord {
    pub target: String,
    pub surrogate: String,
    pub dataset: String,
    /// Average accuracy of the target under attack, in `[0, 1]`.
    pub aa: f64,
    /// Normalized Hausdorff distance, in `[0, 1]`.
    pub h: Option<f64>,
    pub suppressed_aa: bool,
}

impl AnalysisRecord {
    pub fn new(target: &str, surrogate: &str, dataset: &str, aa: f64, h: Option<f64>) -> Result<Self> {
        let r = Self {
            target: target.to_owned(),
            surrogate: surrogate.to_owned(),
            dataset: dataset.to_owned(),
            aa,
            h,
            suppressed_aa: false,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn suppressed(mut self) -> Self {
        self.suppressed_aa = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.aa) {
            return Err(Error::InvalidParameter(format!("AA {} outside [0, 1]", self.aa)));
        }
        if let Some(h) = self.h {
            if !(0.0..=1.0).contains(&h) {
                return Err(Error::InvalidParameter(format!("H {h} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn flags(&self) -> Vec<Flag> {
        let mut f = Vec::new();
        if self.suppressed_aa {
            f.push(Flag::SuppressedAa);
        }
        if self.h.is_none() {
            f.push(Flag::MissingH);
        }
        f
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags().contains(&flag)
    }
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv { line, message: e.to_string() }
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<AnalysisRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records_from(file)
}

pub fn read_records_from(reader: impl Read) -> Result<Vec<AnalysisRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(&e))?.clone();
    if header.iter().ne(RECORDS_HEADER) {
        return Err(Error::Csv { line: 1, message: format!("expected header {}", RECORDS_HEADER.join(",")) });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Csv { line, message };
        let aa: f64 = rec[3].parse().map_err(|_| bad(format!("AA {:?} is not a number", &rec[3])))?;
        let h = match &rec[4] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| bad(format!("H {s:?} is not a number")))?),
        };
        let mut suppressed = false;
        for flag in rec[5].split(';').map(str::trim).filter(|s| !s.is_empty()) {
            match flag {
                "suppressed_AA" => suppressed = true,
                "missing_H" if h.is_some() => return Err(bad("missing_H flagged but H is present".into())),
                "missing_H" => {}
                other => return Err(bad(format!("unknown flag {other:?}"))),
            }
        }
        let mut r = AnalysisRecord::new(&rec[0], &rec[1], &rec[2], aa, h).map_err(|e| bad(e.to_string()))?;
        r.suppressed_aa = suppressed;
        out.push(r);
    }
    Ok(out)
}

pub fn write_records<W: Write>(out: W, records: &[AnalysisRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Csv { line: 0, message: e.to_string() };
    w.write_record(RECORDS_HEADER).map_err(io)?;
    for r in records {
        let flags: Vec<&str> = r.flags().iter().map(|f| f.name()).collect();
        let h = r.h.map(|h| h.to_string()).unwrap_or_default();
        w.write_record([&r.target, &r.surrogate, &r.dataset, &r.aa.to_string(), &h, &flags.join(";")])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<records csv>", e))
}

fn load_checked(text: &str, expected: &str) -> Result<Vec<AnalysisRecord>> {
    let computed = hex::encode(Sha256::digest(text.as_bytes()));
    let expected = expected.split_whitespace().next().unwrap_or_default();
    if computed != expected {
        return Err(Error::Checksum { expected: expected.to_owned(), computed });
    }
    read_records_from(text.as_bytes())
}

/// The 60 published (target, surrogate, dataset) results, checksum-verified.
pub fn load_table3() -> Result<Vec<AnalysisRecord>> {
    load_checked(TABLE3_CSV, TABLE3_SHA256)
}

/// Raw bytes of the bundled table, for export.
pub fn table3_csv() -> &'static str {
    TABLE3_CSV
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(rs: &'a [AnalysisRecord], t: &str, s: &str, d: &str) -> &'a AnalysisRecord {
        rs.iter().find(|r| r.target == t && r.surrogate == s && r.dataset == d).unwrap()
    }

    #[test]
    fn table3_shape() {
        let rs = load_table3().unwrap();
        assert_eq!(rs.len(), 60);
        assert_eq!(rs.iter().filter(|r| r.has_flag(Flag::MissingH)).count(), 7);
        assert_eq!(rs.iter().filter(|r| r.suppressed_aa).count(), 4);
        assert!(rs.iter().filter(|r| r.suppressed_aa).all(|r| r.target == "IncepNet v3"));
    }

    #[test]
    fn table3_entries() {
        let rs = load_table3().unwrap();
        let r = find(&rs, "MobileNet", "ResNet", "SISCORE");
        assert_eq!((r.aa, r.h), (0.88, Some(0.09)));
        let r = find(&rs, "EfficientNet B0", "IncepNetRes", "RESISC");
        assert_eq!((r.aa, r.h), (0.79, None));
    }

    #[test]
    fn checksum_mismatch_is_detected() {
        let tampered = TABLE3_CSV.replacen("0.88", "0.87", 1);
        assert!(matches!(load_checked(&tampered, TABLE3_SHA256), Err(Error::Checksum { .. })));
    }

    #[test]
    fn round_trip() {
        let rs = load_table3().unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &rs).unwrap();
        assert_eq!(read_records_from(&buf[..]).unwrap(), rs);
    }

    #[test]
    fn rejects_bad_rows() {
        let head = "target,surrogate,dataset,AA,H,flags\n";
        for (body, line) in [
            ("a,b,c,1.5,0.1,\n", 2),
            ("a,b,c,0.5,0.1,\na,b,c,x,0.1,\n", 3),
            ("a,b,c,0.5,0.1,missing_H\n", 2),
            ("a,b,c,0.5,,bogus\n", 2),
        ] {
            match read_records_from(format!("{head}{body}").as_bytes()) {
                Err(Error::Csv { line: l, .. }) => assert_eq!(l, line, "{body}"),
                other => panic!("{body}: {other:?}"),
            }
        }
        assert!(matches!(read_records_from("a,b\n".as_bytes()), Err(Error::Csv { line: 1, .. })));
    }

    #[test]
    fn empty_h_means_missing() {
        let rs = read_records_from("target,surrogate,dataset,AA,H,flags\na,b,c,0.5,,\n".as_bytes()).unwrap();
        assert_eq!(rs[0].flags(), vec![Flag::MissingH]);
    }
}
