//! CSV and JSON-lines renderings of reports and experiment records.
//!
//! Every CSV starts with the schema line [`CSV_SCHEMA`] and a header row.
//! Reals are written with 6 significant digits, counts as integers, absent
//! values as empty fields. Timings never go into CSV so that runs are
//! byte-comparable.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::ensemble::{Concentration, LayerRecord, LengthRun, RankProbEstimate, SampleRecord};

pub const CSV_SCHEMA: &str = "# nullcover-csv v1";

/// `%g`-style formatting with 6 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mant));
    }
    trim_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_real(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

/// Serde name of a unit enum variant.
fn label<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

/// `rank:count` pairs joined by `;`.
pub fn fmt_histogram(h: &BTreeMap<usize, usize>) -> String {
    h.iter().map(|(r, c)| format!("{r}:{c}")).collect::<Vec<_>>().join(";")
}

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    let body = String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input");
    format!("{CSV_SCHEMA}\n{body}")
}

/// One JSON object per line.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn bounds_csv(r: &BoundReport) -> String {
    render(
        &["n", "k", "name", "kind", "scope", "quantity", "value", "applicable", "source", "note"],
        r.entries.iter().map(|e| {
            vec![
                r.n.to_string(),
                r.k.to_string(),
                e.name.into(),
                label(&e.kind),
                label(&e.scope),
                label(&e.quantity),
                fmt_real(e.value),
                e.applicable.to_string(),
                e.source.into(),
                e.note.into(),
            ]
        }),
    )
}

const RECORD_COLUMNS: [&str; 12] = [
    "sample_index",
    "seed",
    "n",
    "k",
    "prime_count",
    "greedy_length",
    "lp_bound",
    "near_zero_bound",
    "exact_length",
    "exact_rank",
    "rank_histogram",
    "failure",
];

fn record_fields(r: &SampleRecord) -> Vec<String> {
    vec![
        r.sample_index.to_string(),
        r.seed.to_string(),
        r.n.to_string(),
        r.k.to_string(),
        opt(r.prime_count),
        opt(r.greedy_length),
        opt_real(r.lp_bound),
        opt(r.near_zero_bound),
        opt(r.exact_length),
        opt(r.exact_rank),
        fmt_histogram(&r.rank_histogram),
        r.failure.clone().unwrap_or_default(),
    ]
}

pub fn length_csv(run: &LengthRun) -> String {
    let mut header = RECORD_COLUMNS.to_vec();
    header.extend(["nk_over_ln_nk", "nk_over_log2_n"]);
    render(
        &header,
        run.records.iter().map(|r| {
            let mut f = record_fields(r);
            f.push(opt_real(run.nk_over_ln_nk));
            f.push(opt_real(run.nk_over_log2_n));
            f
        }),
    )
}

/// Rank-probability rows, each with the analytic bound it is compared to.
pub fn rank_prob_csv(n: usize, k: usize, rows: &[(RankProbEstimate, Option<f64>)]) -> String {
    render(
        &["n", "k", "d", "hits", "used", "skipped", "fraction", "wilson_lo", "wilson_hi", "bound"],
        rows.iter().map(|(e, bound)| {
            vec![
                n.to_string(),
                k.to_string(),
                e.d.to_string(),
                e.hits.to_string(),
                e.used.to_string(),
                e.skipped.to_string(),
                fmt_real(e.fraction),
                fmt_real(e.lo),
                fmt_real(e.hi),
                opt_real(*bound),
            ]
        }),
    )
}

pub fn concentration_csv(n: usize, k: usize, rows: &[(&str, Concentration)]) -> String {
    render(
        &["n", "k", "measure", "count", "mean", "stddev", "cv", "min", "max"],
        rows.iter().map(|(measure, c)| {
            vec![
                n.to_string(),
                k.to_string(),
                measure.to_string(),
                c.count.to_string(),
                fmt_real(c.mean),
                fmt_real(c.stddev),
                fmt_real(c.cv),
                c.min.to_string(),
                c.max.to_string(),
            ]
        }),
    )
}

pub fn layer_csv(rows: &[LayerRecord]) -> String {
    let mut header = RECORD_COLUMNS.to_vec();
    header.extend(["w", "layer_bound"]);
    render(
        &header,
        rows.iter().map(|l| {
            let mut f = record_fields(&l.record);
            f.push(l.w.to_string());
            f.push(opt_real(l.layer_bound));
            f
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::table_bounds;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(5.728442), "5.72844");
        assert_eq!(fmt_real(3.0), "3");
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(123456.7), "123457");
        assert_eq!(fmt_real(1234567.0), "1.23457e6");
        assert_eq!(fmt_real(5.7730e-11), "5.773e-11");
        assert_eq!(fmt_real(0.0001), "0.0001");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(999999.5), "1e6");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
    }

    #[test]
    fn bounds_table() {
        let text = bounds_csv(&table_bounds(16, 4).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_SCHEMA);
        assert!(lines[1].starts_with("n,k,name,kind"));
        assert!(lines.iter().any(|l| l.starts_with("16,4,nk,upper,any-function,length,64,")));
        assert!(lines.iter().any(|l| l.starts_with("16,4,nk/log2(n),upper,almost-all,length,16,")));
    }

    #[test]
    fn histogram_text() {
        let h: BTreeMap<usize, usize> = [(1, 3), (2, 10)].into();
        assert_eq!(fmt_histogram(&h), "1:3;2:10");
    }
}
