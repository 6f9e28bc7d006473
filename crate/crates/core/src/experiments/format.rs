use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

use super::ExperimentReport;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..17).contains(&exp) {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).into()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Compact JSON whose floats go through [`fmt_g17`]; non-finite floats
/// become `null`.
struct G17;

impl Formatter for G17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any value as one line of JSON with 17-digit floats.
pub fn write_json<T: Serialize + ?Sized>(value: &T, out: &mut impl Write) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, G17);
    value.serialize(&mut ser).map_err(io::Error::other)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    write_json(value, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn to_json_value(report: &ExperimentReport) -> serde_json::Value {
    serde_json::to_value(report).expect("reports serialize")
}

#[derive(Serialize)]
struct Row<'a> {
    experiment: &'a str,
    params: &'a BTreeMap<String, f64>,
    trials: u64,
    seed: Option<u64>,
    exceed_count: u64,
    empirical_prob: f64,
    bound: f64,
    threshold: Option<f64>,
    mc_stderr: f64,
    asymptotic: bool,
    verdict: &'a str,
    wall_ms: u64,
    theorem: &'a str,
    savings: f64,
    clamped: bool,
    exhaustive: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    stats: &'a BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    histogram: &'a BTreeMap<u64, u64>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
}

impl Serialize for ExperimentReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Row {
            experiment: &self.experiment,
            params: &self.params,
            trials: self.trials,
            seed: self.seed,
            exceed_count: self.exceed_count,
            empirical_prob: self.empirical_prob,
            bound: self.bound.probability,
            threshold: self.bound.threshold,
            mc_stderr: self.mc_stderr,
            asymptotic: self.bound.asymptotic,
            verdict: self.verdict.as_str(),
            wall_ms: self.wall_ms,
            theorem: &self.bound.theorem,
            savings: self.bound.savings,
            clamped: self.bound.clamped,
            exhaustive: self.exhaustive,
            stats: &self.stats,
            histogram: &self.histogram,
            notes: &self.notes,
        }
        .serialize(serializer)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.into()
    }
}

/// One header row, then one row per report. Parameters, stats and histogram
/// bins become `param.*`, `stat.*` and `hist.*` columns over the union of
/// names; notes are joined with `; `.
pub fn to_csv(reports: &[ExperimentReport]) -> String {
    let fixed = [
        "experiment",
        "trials",
        "seed",
        "exceed_count",
        "empirical_prob",
        "bound",
        "threshold",
        "mc_stderr",
        "asymptotic",
        "verdict",
        "wall_ms",
        "theorem",
        "savings",
        "clamped",
        "exhaustive",
    ];
    let mut params = std::collections::BTreeSet::new();
    let mut stats = std::collections::BTreeSet::new();
    let mut bins = std::collections::BTreeSet::new();
    for r in reports {
        params.extend(r.params.keys().cloned());
        stats.extend(r.stats.keys().cloned());
        bins.extend(r.histogram.keys().copied());
    }
    let mut header: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    header.extend(params.iter().map(|k| format!("param.{k}")));
    header.extend(stats.iter().map(|k| format!("stat.{k}")));
    header.extend(bins.iter().map(|k| format!("hist.{k}")));
    header.push("notes".into());
    let mut out = header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in reports {
        let opt = |v: Option<f64>| v.map(fmt_g17).unwrap_or_default();
        let mut row = vec![
            csv_field(&r.experiment),
            r.trials.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.exceed_count.to_string(),
            fmt_g17(r.empirical_prob),
            fmt_g17(r.bound.probability),
            opt(r.bound.threshold),
            fmt_g17(r.mc_stderr),
            r.bound.asymptotic.to_string(),
            r.verdict.to_string(),
            r.wall_ms.to_string(),
            csv_field(&r.bound.theorem),
            fmt_g17(r.bound.savings),
            r.bound.clamped.to_string(),
            r.exhaustive.to_string(),
        ];
        row.extend(params.iter().map(|k| opt(r.params.get(k).copied())));
        row.extend(stats.iter().map(|k| opt(r.stats.get(k).copied())));
        row.extend(bins.iter().map(|k| r.histogram.get(k).map(|c| c.to_string()).unwrap_or_default()));
        row.push(csv_field(&r.notes.join("; ")));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.125, "0.125"),
            (6.0, "6"),
            (0.1, "0.10000000000000001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (1e20, "1e+20"),
            (1e-5, "1.0000000000000001e-05"),
            (0.0001, "0.0001"),
            (123456789.0, "123456789"),
            (2f64.powi(-10), "0.0009765625"),
            (-2.5, "-2.5"),
            (1e16, "10000000000000000"),
            (1e17, "1e+17"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x}");
        }
    }

    #[test]
    fn g17_roundtrips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 5e-324, f64::MAX, 0.008] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_uses_g17_and_null() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: f64,
            c: u64,
        }
        assert_eq!(to_json(&T { a: 0.1, b: f64::INFINITY, c: 7 }), r#"{"a":0.10000000000000001,"b":null,"c":7}"#);
    }
}
