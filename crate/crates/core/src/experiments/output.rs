//! CSV serialization of experiment rows.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so a rerun with
//! the same inputs reproduces every file byte for byte. Missing values are
//! empty fields. Headers:
//!
//! | study | columns |
//! |---|---|
//! | quantity-vs-n | `n,V,P,C,reservoir_C,outcome_probability,closure_residual,angles` |
//! | uniform-sweep | `n,theta,phi,V,P,C,outcome_probability` |
//! | distinguishability | `i,D_qA_qi,D_qA_qB` |
//! | delta-d | `n,V,delta_D_T,delta_D_F` |
//! | table | `objective,regime,n,c00_re,c00_im,c01_re,c01_im,c10_re,c10_im,`<br>`ref_c00_re,ref_c00_im,ref_c01_re,ref_c01_im,ref_c10_re,ref_c10_im,`<br>`V,P,C,deviation,match` |
//! | continuous-limit | `N,gap` |
//!
//! `angles` holds `theta_1 phi_1 ... theta_n phi_n` separated by spaces.

use std::io::Write;

use num_complex::Complex64;

use super::{CurveRecord, DeltaDRow, LimitRow, ProfileRow, SweepCell, TableRow};

pub const CURVE_HEADER: [&str; 8] = [
    "n",
    "V",
    "P",
    "C",
    "reservoir_C",
    "outcome_probability",
    "closure_residual",
    "angles",
];
pub const SWEEP_HEADER: [&str; 7] = ["n", "theta", "phi", "V", "P", "C", "outcome_probability"];
pub const PROFILE_HEADER: [&str; 3] = ["i", "D_qA_qi", "D_qA_qB"];
pub const DELTA_D_HEADER: [&str; 4] = ["n", "V", "delta_D_T", "delta_D_F"];
pub const TABLE_HEADER: [&str; 20] = [
    "objective",
    "regime",
    "n",
    "c00_re",
    "c00_im",
    "c01_re",
    "c01_im",
    "c10_re",
    "c10_im",
    "ref_c00_re",
    "ref_c00_im",
    "ref_c01_re",
    "ref_c01_im",
    "ref_c10_re",
    "ref_c10_im",
    "V",
    "P",
    "C",
    "deviation",
    "match",
];
pub const LIMIT_HEADER: [&str; 2] = ["N", "gap"];

/// A float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn complex_fields(z: Complex64) -> [String; 2] {
    [fmt_float(z.re), fmt_float(z.im)]
}

fn write_rows<W: Write, const K: usize>(
    out: W,
    header: [&str; K],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), K);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRecord]) -> csv::Result<()> {
    write_rows(
        out,
        CURVE_HEADER,
        rows.iter().map(|r| {
            let angles: Vec<String> = r.angles.iter().copied().map(fmt_float).collect();
            vec![
                r.n.to_string(),
                fmt_float(r.visibility),
                fmt_float(r.predictability),
                fmt_float(r.concurrence),
                fmt_float(r.reservoir_concurrence),
                fmt_float(r.outcome_probability),
                fmt_float(r.closure_residual),
                angles.join(" "),
            ]
        }),
    )
}

pub fn write_sweep<W: Write>(out: W, cells: &[SweepCell]) -> csv::Result<()> {
    write_rows(
        out,
        SWEEP_HEADER,
        cells.iter().map(|c| {
            vec![
                c.n.to_string(),
                fmt_float(c.theta),
                fmt_float(c.phi),
                fmt_opt(c.triple.map(|t| t.visibility)),
                fmt_opt(c.triple.map(|t| t.predictability)),
                fmt_opt(c.triple.map(|t| t.concurrence)),
                fmt_opt(c.outcome_probability),
            ]
        }),
    )
}

pub fn write_profile<W: Write>(out: W, rows: &[ProfileRow]) -> csv::Result<()> {
    write_rows(
        out,
        PROFILE_HEADER,
        rows.iter()
            .map(|r| vec![r.i.to_string(), fmt_float(r.d_qa_qi), fmt_float(r.d_qa_qb)]),
    )
}

pub fn write_delta_d<W: Write>(out: W, rows: &[DeltaDRow]) -> csv::Result<()> {
    write_rows(
        out,
        DELTA_D_HEADER,
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt_float(r.visibility),
                fmt_float(r.delta_d_total),
                fmt_float(r.delta_d_f),
            ]
        }),
    )
}

pub fn write_table<W: Write>(out: W, rows: &[TableRow]) -> csv::Result<()> {
    write_rows(
        out,
        TABLE_HEADER,
        rows.iter().map(|r| {
            let mut fields = vec![
                r.reference.objective.as_str().to_string(),
                r.reference.regime.as_str().to_string(),
                r.reference.n.to_string(),
            ];
            for z in [r.state.c00, r.state.c01, r.state.c10] {
                fields.extend(complex_fields(z));
            }
            for z in r.reference.amplitudes {
                fields.extend(complex_fields(z));
            }
            fields.extend([
                fmt_float(r.achieved.visibility),
                fmt_float(r.achieved.predictability),
                fmt_float(r.achieved.concurrence),
                fmt_float(r.deviation),
                r.matches().to_string(),
            ]);
            fields
        }),
    )
}

pub fn write_limit<W: Write>(out: W, rows: &[LimitRow]) -> csv::Result<()> {
    write_rows(
        out,
        LIMIT_HEADER,
        rows.iter().map(|r| vec![r.n.to_string(), fmt_float(r.gap)]),
    )
}
