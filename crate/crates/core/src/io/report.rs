//! CSV and JSON report tables.
//!
//! Column sets are fixed:
//!
//! | file            | columns |
//! |-----------------|---------|
//! | `records.csv`   | `set_id,image_id,method_id,abstained,iou,relative_area,ecc_pred,ecc_truth,ecc_diff,sol_pred,sol_truth,sol_diff` |
//! | `mean_iou.csv`  | `set_id,method_id,mean_iou,count` |
//! | `curve_*.csv`   | `metric,method_id,set_id,threshold,passed,total,fraction` |
//! | `iov_*.csv`     | `metric,method_id,annotator_id,set_id,threshold,method_fraction,annotator_fraction,difference` |
//!
//! Abstained records leave every score column empty. Reals are written with
//! 9 significant digits.

use std::io::{Read, Write};

use csv::{ReaderBuilder, Terminator, WriterBuilder};

use crate::error::{Error, Result};
use crate::evaluation::{
    AgreementCurve, EvaluationRecord, MeanIouTable, PairedCurveTable, RecordKey, Scores,
};
use crate::io::float::fmt_sig9;

pub const RECORD_COLUMNS: [&str; 12] = [
    "set_id",
    "image_id",
    "method_id",
    "abstained",
    "iou",
    "relative_area",
    "ecc_pred",
    "ecc_truth",
    "ecc_diff",
    "sol_pred",
    "sol_truth",
    "sol_diff",
];

pub const MEAN_IOU_COLUMNS: [&str; 4] = ["set_id", "method_id", "mean_iou", "count"];

pub const CURVE_COLUMNS: [&str; 7] = [
    "metric",
    "method_id",
    "set_id",
    "threshold",
    "passed",
    "total",
    "fraction",
];

pub const IOV_COLUMNS: [&str; 8] = [
    "metric",
    "method_id",
    "annotator_id",
    "set_id",
    "threshold",
    "method_fraction",
    "annotator_fraction",
    "difference",
];

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_records_csv<W: Write>(records: &[EvaluationRecord], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let mut row = vec![
            r.key.set_id.clone(),
            r.key.image_id.clone(),
            r.key.method_id.clone(),
            r.is_abstained().to_string(),
        ];
        match &r.scores {
            Some(s) => row.extend(
                [
                    s.iou,
                    s.relative_area,
                    s.ecc_pred,
                    s.ecc_truth,
                    s.ecc_diff,
                    s.sol_pred,
                    s.sol_truth,
                    s.sol_diff,
                ]
                .map(fmt_sig9),
            ),
            None => row.extend(std::iter::repeat_n(String::new(), 8)),
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// Reads a records table written by [`write_records_csv`].
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<EvaluationRecord>> {
    let mut rdr = ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(RECORD_COLUMNS) {
        return Err(Error::InvalidRecords(format!(
            "unexpected header `{}` (expected `{}`)",
            headers.iter().collect::<Vec<_>>().join(","),
            RECORD_COLUMNS.join(",")
        )));
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let key = RecordKey::new(&row[0], &row[1], &row[2]);
        let abstained = match &row[3] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::InvalidRecords(format!(
                    "line {line}: abstained must be true or false, found `{other}`"
                )))
            }
        };
        if abstained {
            records.push(EvaluationRecord::abstained(key));
            continue;
        }
        let mut v = [0.0f64; 8];
        for (j, slot) in v.iter_mut().enumerate() {
            let field = &row[4 + j];
            *slot = field.trim().parse::<f64>().map_err(|_| {
                Error::InvalidRecords(format!(
                    "line {line}: column {} is not a number: `{field}`",
                    RECORD_COLUMNS[4 + j]
                ))
            })?;
        }
        records.push(EvaluationRecord {
            key,
            scores: Some(Scores {
                iou: v[0],
                relative_area: v[1],
                ecc_pred: v[2],
                ecc_truth: v[3],
                ecc_diff: v[4],
                sol_pred: v[5],
                sol_truth: v[6],
                sol_diff: v[7],
            }),
        });
    }
    Ok(records)
}

pub fn write_mean_iou_csv<W: Write>(table: &MeanIouTable, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(MEAN_IOU_COLUMNS)?;
    for r in &table.rows {
        w.write_record([
            r.set_id.as_str(),
            r.method_id.as_str(),
            &fmt_sig9(r.mean_iou),
            &r.count.to_string(),
        ])?;
    }
    finish(w)
}

/// A curve together with the image set it was computed over (a set id, or
/// [`crate::io::manifest::ALL_SETS`] for the pooled curve).
#[derive(Debug, Clone, PartialEq)]
pub struct ScopedCurve {
    pub set_id: String,
    pub curve: AgreementCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScopedPairedTable {
    pub set_id: String,
    pub table: PairedCurveTable,
}

pub fn write_curves_csv<W: Write>(curves: &[ScopedCurve], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(CURVE_COLUMNS)?;
    for sc in curves {
        for p in &sc.curve.points {
            w.write_record([
                sc.curve.kind.short_name(),
                sc.curve.method_id.as_str(),
                sc.set_id.as_str(),
                &fmt_sig9(p.threshold),
                &p.passed.to_string(),
                &p.total.to_string(),
                &fmt_sig9(p.fraction),
            ])?;
        }
    }
    finish(w)
}

pub fn write_iov_csv<W: Write>(tables: &[ScopedPairedTable], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(IOV_COLUMNS)?;
    for st in tables {
        for p in &st.table.points {
            w.write_record([
                st.table.kind.short_name(),
                st.table.method_id.as_str(),
                st.table.annotator_id.as_str(),
                st.set_id.as_str(),
                &fmt_sig9(p.threshold),
                &fmt_sig9(p.method_fraction),
                &fmt_sig9(p.annotator_fraction),
                &fmt_sig9(p.difference),
            ])?;
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{agreement_curve, AbstentionPolicy, Grid, MetricKind};

    fn rec(image: &str, iou: f64) -> EvaluationRecord {
        EvaluationRecord {
            key: RecordKey::new("A", image, "M"),
            scores: Some(Scores {
                iou,
                relative_area: 1.25,
                ecc_pred: 0.3,
                ecc_truth: 0.2,
                ecc_diff: 0.1,
                sol_pred: 0.9,
                sol_truth: 0.95,
                sol_diff: -0.05,
            }),
        }
    }

    #[test]
    fn records_round_trip() {
        let records = vec![
            rec("1", 2.0 / 3.0),
            EvaluationRecord::abstained(RecordKey::new("A", "2", "M")),
            rec("3, with comma", 1.0),
        ];
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("set_id,image_id,method_id,abstained,iou,"));
        assert!(text.contains("A,2,M,true,,,,,,,,\n"));
        assert!(text.contains("0.666666667"));
        let back = read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[1], records[1]);
        assert_eq!(back[2], records[2]);
        assert_eq!(back[0].scores.unwrap().iou, 0.666666667);
    }

    #[test]
    fn rejects_malformed_records() {
        assert!(read_records_csv(&b"a,b\n1,2\n"[..]).is_err());
        let header = RECORD_COLUMNS.join(",");
        let bad_flag = format!("{header}\nA,1,M,maybe,,,,,,,,\n");
        assert!(read_records_csv(bad_flag.as_bytes()).is_err());
        let bad_num = format!("{header}\nA,1,M,false,x,1,1,1,1,1,1,1\n");
        let err = read_records_csv(bad_num.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("iou"), "{err}");
        let short = format!("{header}\nA,1,M\n");
        assert!(read_records_csv(short.as_bytes()).is_err());
    }

    #[test]
    fn curve_csv_shape() {
        let records = vec![rec("1", 1.0), rec("2", 0.8), rec("3", 0.0)];
        let curve = agreement_curve(
            &records,
            MetricKind::Iou,
            &Grid::new(vec![0.5]).unwrap(),
            AbstentionPolicy::Exclude,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_curves_csv(
            &[ScopedCurve {
                set_id: "A".into(),
                curve,
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "metric,method_id,set_id,threshold,passed,total,fraction\niou,M,A,0.5,2,3,0.666666667\n"
        );
    }
}
