//! Result rows and their CSV form.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::phasetime::PhaseTimeReport;

pub const HEADER: [&str; 11] = [
    "lambda[k_M L]",
    "w[sqrt(V0/E_M)]",
    "tau_spm[hbar/E_M]",
    "tau_spm_full[hbar/E_M]",
    "tau_new[hbar/E_M]",
    "tau_num[hbar/E_M]",
    "v_transit[sqrt(V0/2m)]",
    "ratio_ana_num[1]",
    "panels",
    "refine_steps",
    "note",
];

pub const DIVERGES: &str = "diverges";

/// One sweep point. Missing values are undefined (τ_SPM at `a = 0`) or
/// were not computed because the point failed; `note` says which.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub lambda: f64,
    pub w: f64,
    pub tau_spm: Option<f64>,
    pub tau_spm_full: Option<f64>,
    pub tau_new: Option<f64>,
    pub tau_num: Option<f64>,
    pub v_transit: Option<f64>,
    pub ratio_ana_num: Option<f64>,
    pub panels: Option<usize>,
    pub refine_steps: Option<usize>,
    pub note: String,
}

impl ResultRow {
    pub fn from_report(lambda: f64, w: f64, r: &PhaseTimeReport) -> Self {
        Self {
            lambda,
            w,
            tau_spm: r.tau_spm,
            tau_spm_full: r.tau_spm_full,
            tau_new: Some(r.tau_new),
            tau_num: Some(r.tau_numeric),
            v_transit: Some(r.v_transit),
            ratio_ana_num: Some(r.ratio_ana_num),
            panels: Some(r.panels),
            refine_steps: Some(r.refine_steps),
            note: if r.tau_spm.is_none() {
                DIVERGES.into()
            } else {
                String::new()
            },
        }
    }

    /// A point whose numerical evaluation failed.
    pub fn failed(lambda: f64, w: f64, error: &Error) -> Self {
        Self {
            lambda,
            w,
            tau_spm: None,
            tau_spm_full: None,
            tau_new: None,
            tau_num: None,
            v_transit: None,
            ratio_ana_num: None,
            panels: None,
            refine_steps: None,
            note: format!("error: {error}"),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.tau_num.is_none()
    }

    fn fields(&self) -> [String; 11] {
        [
            fmt_f(Some(self.lambda)),
            fmt_f(Some(self.w)),
            fmt_f(self.tau_spm),
            fmt_f(self.tau_spm_full),
            fmt_f(self.tau_new),
            fmt_f(self.tau_num),
            fmt_f(self.v_transit),
            fmt_f(self.ratio_ana_num),
            fmt_u(self.panels),
            fmt_u(self.refine_steps),
            self.note.clone(),
        ]
    }

    fn from_fields(rec: &csv::StringRecord, line: usize) -> Result<Self> {
        if rec.len() != HEADER.len() {
            return Err(Error::Csv {
                line,
                message: format!("expected {} fields, got {}", HEADER.len(), rec.len()),
            });
        }
        let f = |i: usize| parse_f(&rec[i], HEADER[i], line);
        let u = |i: usize| parse_u(&rec[i], HEADER[i], line);
        let required = |i: usize| {
            f(i)?.ok_or_else(|| Error::Csv {
                line,
                message: format!("{} must not be empty", HEADER[i]),
            })
        };
        Ok(Self {
            lambda: required(0)?,
            w: required(1)?,
            tau_spm: f(2)?,
            tau_spm_full: f(3)?,
            tau_new: f(4)?,
            tau_num: f(5)?,
            v_transit: f(6)?,
            ratio_ana_num: f(7)?,
            panels: u(8)?,
            refine_steps: u(9)?,
            note: rec[10].to_string(),
        })
    }
}

/// Ten significant digits in scientific notation.
pub fn fmt_f(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.9e}"),
        None => String::new(),
    }
}

fn fmt_u(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_f(s: &str, col: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Csv {
        line,
        message: format!("bad number '{s}' in {col}"),
    })
}

fn parse_u(s: &str, col: &str, line: usize) -> Result<Option<usize>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Csv {
        line,
        message: format!("bad integer '{s}' in {col}"),
    })
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv {
        line: 0,
        message: e.to_string(),
    })
}

pub fn rows_to_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Csv {
            line: 1,
            message: format!("unexpected header: {}", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push(ResultRow::from_fields(&rec, line)?);
    }
    Ok(rows)
}

/// One point of the exit-density time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub tau: f64,
    /// `|Φ_T(L, τ)|²`.
    pub density: f64,
    /// `|Φ_T(L, τ)|² e^{2aΛ}`.
    pub density_scaled: f64,
}

pub const TRACE_HEADER: [&str; 3] = ["tau[hbar/E_M]", "density[1]", "density_scaled[1]"];

pub fn write_trace<W: Write>(out: W, trace: &[TracePoint]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for p in trace {
        w.write_record([
            fmt_f(Some(p.tau)),
            fmt_f(Some(p.density)),
            fmt_f(Some(p.density_scaled)),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv {
        line: 0,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ResultRow {
        ResultRow {
            lambda: 100.0,
            w: 1.0,
            tau_spm: None,
            tau_spm_full: Some(43.004_276_834_571_17),
            tau_new: Some(200.0 / 9.0),
            tau_num: Some(21.406_6),
            v_transit: Some(4.671_5),
            ratio_ana_num: Some(0.963_297),
            panels: Some(82),
            refine_steps: Some(24),
            note: DIVERGES.into(),
        }
    }

    #[test]
    fn header_and_formatting() {
        let s = rows_to_string(&[sample()]).unwrap();
        let mut lines = s.lines();
        assert_eq!(
            lines.next().unwrap(),
            "lambda[k_M L],w[sqrt(V0/E_M)],tau_spm[hbar/E_M],tau_spm_full[hbar/E_M],tau_new[hbar/E_M],tau_num[hbar/E_M],v_transit[sqrt(V0/2m)],ratio_ana_num[1],panels,refine_steps,note"
        );
        assert_eq!(
            lines.next().unwrap(),
            "1.000000000e2,1.000000000e0,,4.300427683e1,2.222222222e1,2.140660000e1,4.671500000e0,9.632970000e-1,82,24,diverges"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn failure_rows_quote_notes() {
        let e = Error::NonConvergence {
            what: "wave packet synthesis",
            panels: 8,
            error: 0.5,
        };
        let row = ResultRow::failed(50.0, 1.5, &e);
        assert!(row.is_failure());
        let s = rows_to_string(std::slice::from_ref(&row)).unwrap();
        let back = read_rows(s.as_bytes()).unwrap();
        assert_eq!(back, vec![row]);
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(matches!(
            read_rows("a,b\n1,2\n".as_bytes()),
            Err(Error::Csv { line: 1, .. })
        ));
        let mut s = rows_to_string(&[sample()]).unwrap();
        s = s.replace("4.671500000e0", "fast");
        assert!(matches!(read_rows(s.as_bytes()), Err(Error::Csv { line: 2, .. })));
        let s = rows_to_string(&[sample()]).unwrap().replacen("1.000000000e2", "", 1);
        assert!(read_rows(s.as_bytes()).is_err());
    }

    #[test]
    fn trace_output() {
        let mut buf = Vec::new();
        write_trace(
            &mut buf,
            &[TracePoint {
                tau: 0.5,
                density: 0.25,
                density_scaled: 0.25,
            }],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "tau[hbar/E_M],density[1],density_scaled[1]\n5.000000000e-1,2.500000000e-1,2.500000000e-1\n"
        );
    }

    fn opt_f() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![Just(None), (-1e300f64..1e300).prop_map(Some)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn round_trip_at_ten_digits(
            lambda in 1e-3f64..1e6,
            w in 1f64..10.0,
            vals in proptest::collection::vec(opt_f(), 6),
            panels in proptest::option::of(0usize..1_000_000),
            note in "[ -~]{0,40}",
        ) {
            let row = ResultRow {
                lambda, w,
                tau_spm: vals[0], tau_spm_full: vals[1], tau_new: vals[2],
                tau_num: vals[3], v_transit: vals[4], ratio_ana_num: vals[5],
                panels, refine_steps: panels.map(|p| p % 97),
                note: note.clone(),
            };
            let s = rows_to_string(std::slice::from_ref(&row)).unwrap();
            let back = read_rows(s.as_bytes()).unwrap();
            prop_assert_eq!(back.len(), 1);
            let b = &back[0];
            let close = |x: f64, y: f64| (x - y).abs() <= 5e-10 * x.abs();
            prop_assert!(close(row.lambda, b.lambda) && close(row.w, b.w));
            let pairs = [
                (row.tau_spm, b.tau_spm), (row.tau_spm_full, b.tau_spm_full),
                (row.tau_new, b.tau_new), (row.tau_num, b.tau_num),
                (row.v_transit, b.v_transit), (row.ratio_ana_num, b.ratio_ana_num),
            ];
            for (x, y) in pairs {
                match (x, y) {
                    (None, None) => {}
                    (Some(x), Some(y)) => prop_assert!(close(x, y), "{} vs {}", x, y),
                    _ => prop_assert!(false, "definedness changed"),
                }
            }
            prop_assert_eq!(b.panels, row.panels);
            prop_assert_eq!(&b.note, &note);
            // formatting the parsed row again is a fixed point
            prop_assert_eq!(rows_to_string(&back).unwrap(), s);
        }
    }
}
