use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use schur_cyclic::cyclic::BoundsReport;
use schur_cyclic::linear::DistanceResult;
use schur_cyclic::restricted::TableRow;
use schur_cyclic::Provenance;

pub const SCHEMA: &str = "schur-cyclic/1";

/// Longer values are cut in text output; csv and json keep them whole.
const TEXT_WIDTH: usize = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Everything a command produced, in emission order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: Vec<String>,
    pub parameters: serde_json::Value,
    pub results: Vec<Item>,
    pub checks: Vec<CheckOutcome>,
    pub seeds: Vec<u64>,
    pub timings_us: Vec<(String, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Item {
    Code {
        label: String,
        q: u64,
        n: usize,
        dim: usize,
        generating_set: Vec<usize>,
        generator: String,
        provenance: Provenance,
    },
    Bounds {
        label: String,
        bounds: BoundsReport,
        provenance: Provenance,
    },
    Row {
        row: TableRow,
    },
    Distance {
        label: String,
        result: DistanceResult,
        provenance: Provenance,
    },
    Graph {
        q: u64,
        s: u32,
        m: u32,
        vertices: Vec<String>,
        charpoly: Vec<String>,
        counts: Vec<String>,
        provenance: Provenance,
    },
    Value {
        label: String,
        value: String,
        provenance: Provenance,
    },
}

/// One verification suite or oracle comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// First counterexample, when failed.
    pub detail: Option<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>, parameters: serde_json::Value) -> Self {
        RunReport {
            schema: SCHEMA.into(),
            command,
            parameters,
            results: Vec::new(),
            checks: Vec::new(),
            seeds: Vec::new(),
            timings_us: Vec::new(),
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn rows(&self) -> impl Iterator<Item = &TableRow> {
        self.results.iter().filter_map(|i| match i {
            Item::Row { row } => Some(row),
            _ => None,
        })
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        if self.rows().next().is_some() {
            out.push_str("k,n,dim_c,d_c_lb,dim_csq,d_csq_lb,exact_flags\n");
            for r in self.rows() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.k,
                    r.n,
                    r.dim_c,
                    r.d_c_lower,
                    r.dim_csq,
                    r.d_csq_lower,
                    r.exact_flags()
                );
            }
        }
        let rest: Vec<&Item> = self
            .results
            .iter()
            .filter(|i| !matches!(i, Item::Row { .. }))
            .collect();
        if !rest.is_empty() || !self.checks.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str("kind,label,value,provenance\n");
            for item in rest {
                let (kind, label, value, prov) = summarize(item);
                let _ = writeln!(out, "{kind},{label},\"{value}\",{}", prov_name(prov));
            }
            for c in &self.checks {
                let verdict = if c.passed { "pass" } else { "fail" };
                let _ = writeln!(out, "check,{},{verdict} ({} cases),-", c.name, c.cases);
            }
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        if self.rows().next().is_some() {
            let _ = writeln!(
                out,
                "{:>3}  {:>6}  {:>6}  {:>8}  {:>8}  {:>10}  exact",
                "k", "n", "dim C", "d(C) >=", "dim C^2", "d(C^2) >="
            );
            for r in self.rows() {
                let _ = writeln!(
                    out,
                    "{:>3}  {:>6}  {:>6}  {:>8}  {:>8}  {:>10}  {}",
                    r.k,
                    r.n,
                    r.dim_c,
                    r.d_c_lower,
                    r.dim_csq,
                    r.d_csq_lower,
                    r.exact_flags()
                );
            }
        }
        for item in self.results.iter().filter(|i| !matches!(i, Item::Row { .. })) {
            let (kind, label, mut value, prov) = summarize(item);
            if value.len() > TEXT_WIDTH {
                let cut = (0..=TEXT_WIDTH).rev().find(|&i| value.is_char_boundary(i)).unwrap_or(0);
                value.truncate(cut);
                value.push_str(" ...");
            }
            let _ = writeln!(out, "{kind:<9} {label:<16} {value}  [{}]", prov_name(prov));
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(out, "{verdict} {} ({} cases)", c.name, c.cases);
            if let Some(d) = &c.detail {
                let _ = write!(out, ": {d}");
            }
            out.push('\n');
        }
        out
    }
}

fn prov_name(p: Provenance) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn summarize(item: &Item) -> (&'static str, String, String, Provenance) {
    match item {
        Item::Code {
            label,
            q,
            n,
            dim,
            generating_set,
            generator,
            provenance,
        } => (
            "code",
            label.clone(),
            format!("q={q} n={n} dim={dim} I={generating_set:?} g={generator}"),
            *provenance,
        ),
        Item::Bounds {
            label,
            bounds: b,
            provenance,
        } => (
            "bounds",
            label.clone(),
            format!(
                "n={} dim={} d>={} dim_sq={} d_sq>={} singleton_cap={}",
                b.n, b.dim_c, b.d_c_lower, b.dim_csq, b.d_csq_lower, b.singleton_cap
            ),
            *provenance,
        ),
        Item::Row { row } => ("row", row.k.to_string(), format!("{:?}", row.numbers()), row.dim_c_source),
        Item::Distance {
            label,
            result,
            provenance,
        } => (
            "distance",
            label.clone(),
            format!(
                "d={} exact={} method={:?}{}",
                result.value,
                result.exact,
                result.method,
                result.seed.map(|s| format!(" seed={s}")).unwrap_or_default()
            ),
            *provenance,
        ),
        Item::Graph {
            q,
            s,
            m,
            vertices,
            charpoly,
            counts,
            provenance,
        } => (
            "graph",
            format!("q={q},s={s},m={m}"),
            format!(
                "{} vertices; charpoly (p_0..p_g) = [{}]; N' = [{}]",
                vertices.len(),
                charpoly.join(" "),
                counts.join(" ")
            ),
            *provenance,
        ),
        Item::Value {
            label,
            value,
            provenance,
        } => ("value", label.clone(), value.clone(), *provenance),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use schur_cyclic::linear::DistanceMethod;

    fn sample() -> RunReport {
        let mut r = RunReport::new(
            vec!["table".into(), "t1".into()],
            serde_json::json!({ "kmax": 4, "nested": { "b": 1, "a": [1, 2] } }),
        );
        r.results.push(Item::Row {
            row: TableRow {
                k: 4,
                n: 15,
                dim_c: 5,
                d_c_lower: 7,
                dim_csq: 11,
                d_csq_lower: 3,
                dim_c_source: Provenance::Recurrence,
                dim_csq_source: Provenance::RankOracle,
                d_c_source: Provenance::ExhaustiveDistance,
                d_csq_source: Provenance::BoundOnly,
            },
        });
        r.results.push(Item::Distance {
            label: "C".into(),
            result: DistanceResult {
                value: 7,
                exact: true,
                method: DistanceMethod::Witness,
                witness: Some(vec![1, 0, 1]),
                seed: Some(9),
            },
            provenance: Provenance::ExhaustiveDistance,
        });
        r.results.push(Item::Value {
            label: "x".into(),
            value: "1".into(),
            provenance: Provenance::Enumeration,
        });
        r.checks.push(CheckOutcome {
            name: "srw".into(),
            passed: false,
            cases: 3,
            detail: Some("k = 1".into()),
        });
        r.seeds.push(9);
        r.timings_us.push(("rows".into(), 12));
        r
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let back: RunReport = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_header_and_row() {
        let csv = sample().render(Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,n,dim_c,d_c_lb,dim_csq,d_csq_lb,exact_flags"));
        assert_eq!(lines.next(), Some("4,15,5,7,11,3,d_c"));
    }

    #[test]
    fn text_reports_failures() {
        let r = sample();
        assert_eq!(r.failures(), 1);
        assert!(r.render(Format::Text).contains("FAIL srw (3 cases): k = 1"));
    }

    #[test]
    fn text_truncates_long_values() {
        let mut r = RunReport::new(vec![], serde_json::Value::Null);
        r.results.push(Item::Value {
            label: "g".into(),
            value: "X".repeat(1000),
            provenance: Provenance::Enumeration,
        });
        let text = r.render(Format::Text);
        assert!(text.len() < 300 && text.contains(" ..."));
        assert!(r.render(Format::Csv).contains(&"X".repeat(1000)));
    }
}
