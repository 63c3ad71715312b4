//! Cross-system summary tables: per-metric means over a shared book set,
//! with a closest-to-reference mark per metric.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};

/// The metrics a summary row can carry, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Ttr,
    YulesI,
    Mtld,
    Ptf,
    Cdu,
    SynTtr,
    Bleu,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Ttr,
        Metric::YulesI,
        Metric::Mtld,
        Metric::Ptf,
        Metric::Cdu,
        Metric::SynTtr,
        Metric::Bleu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ttr => "ttr",
            Metric::YulesI => "yules_i",
            Metric::Mtld => "mtld",
            Metric::Ptf => "ptf",
            Metric::Cdu => "cdu",
            Metric::SynTtr => "syn_ttr",
            Metric::Bleu => "bleu",
        }
    }
}

/// Per-book (or per-row) metric values; absent cells stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricValues {
    pub ttr: Option<f64>,
    pub yules_i: Option<f64>,
    pub mtld: Option<f64>,
    pub ptf: Option<f64>,
    pub cdu: Option<f64>,
    pub syn_ttr: Option<f64>,
    pub bleu: Option<f64>,
}

impl MetricValues {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Ttr => self.ttr,
            Metric::YulesI => self.yules_i,
            Metric::Mtld => self.mtld,
            Metric::Ptf => self.ptf,
            Metric::Cdu => self.cdu,
            Metric::SynTtr => self.syn_ttr,
            Metric::Bleu => self.bleu,
        }
    }

    pub fn set(&mut self, metric: Metric, value: Option<f64>) {
        let slot = match metric {
            Metric::Ttr => &mut self.ttr,
            Metric::YulesI => &mut self.yules_i,
            Metric::Mtld => &mut self.mtld,
            Metric::Ptf => &mut self.ptf,
            Metric::Cdu => &mut self.cdu,
            Metric::SynTtr => &mut self.syn_ttr,
            Metric::Bleu => &mut self.bleu,
        };
        *slot = value;
    }
}

/// Per-book metric table for one system.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemTable {
    pub system: String,
    pub books: BTreeMap<String, MetricValues>,
}

/// One summary row: unweighted means across books.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub system: String,
    pub means: MetricValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// For each metric name, the non-reference system whose mean is closest
    /// to the reference row's mean.
    pub closest_to_reference: BTreeMap<&'static str, String>,
    pub reference: Option<String>,
}

/// Average every system's metrics across the shared book set and mark, per
/// metric, which non-reference system lands closest to the reference row.
///
/// A metric's mean is taken over the books where it is defined and left
/// empty when it is defined nowhere (Table rows like a reference translation
/// have no BLEU against themselves). With a single candidate system the mark
/// is trivially its own.
pub fn summarize(tables: &[SystemTable], reference: Option<&str>) -> Result<Summary> {
    if tables.is_empty() {
        return Err(Error::EmptyInput("no system tables to summarize"));
    }
    if let Some(name) = reference {
        if !tables.iter().any(|t| t.system == name) {
            return Err(Error::InvalidArgument(format!(
                "reference system `{name}` is not among the tables"
            )));
        }
    }

    // Every system must cover the same book set.
    let base: Vec<&String> = tables[0].books.keys().collect();
    for table in &tables[1..] {
        let missing: Vec<&str> = base
            .iter()
            .filter(|id| !table.books.contains_key(id.as_str()))
            .map(|id| id.as_str())
            .collect();
        let extra: Vec<&str> = table
            .books
            .keys()
            .filter(|id| !tables[0].books.contains_key(id.as_str()))
            .map(|id| id.as_str())
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            let mut parts = Vec::new();
            if !missing.is_empty() {
                parts.push(format!(
                    "system `{}` is missing books [{}]",
                    table.system,
                    missing.join(", ")
                ));
            }
            if !extra.is_empty() {
                parts.push(format!(
                    "system `{}` has extra books [{}]",
                    table.system,
                    extra.join(", ")
                ));
            }
            return Err(Error::BookSetMismatch {
                detail: parts.join("; "),
            });
        }
    }

    let rows: Vec<SummaryRow> = tables
        .iter()
        .map(|table| {
            let mut means = MetricValues::default();
            for metric in Metric::ALL {
                let values: Vec<f64> = table
                    .books
                    .values()
                    .filter_map(|v| v.get(metric))
                    .collect();
                if !values.is_empty() {
                    means.set(metric, Some(values.iter().sum::<f64>() / values.len() as f64));
                }
            }
            SummaryRow {
                system: table.system.clone(),
                means,
            }
        })
        .collect();

    let mut closest_to_reference = BTreeMap::new();
    let candidates: Vec<&SummaryRow> = rows
        .iter()
        .filter(|r| Some(r.system.as_str()) != reference)
        .collect();
    let reference_row = reference.and_then(|name| rows.iter().find(|r| r.system == name));
    for metric in Metric::ALL {
        let with_mean: Vec<&&SummaryRow> = candidates
            .iter()
            .filter(|r| r.means.get(metric).is_some())
            .collect();
        let mark = match (with_mean.as_slice(), reference_row.and_then(|r| r.means.get(metric))) {
            ([only], _) => Some(only.system.clone()),
            (many, Some(ref_mean)) if !many.is_empty() => many
                .iter()
                .min_by(|a, b| {
                    let da = (a.means.get(metric).unwrap() - ref_mean).abs();
                    let db = (b.means.get(metric).unwrap() - ref_mean).abs();
                    da.partial_cmp(&db).expect("finite means")
                })
                .map(|r| r.system.clone()),
            _ => None,
        };
        if let Some(system) = mark {
            closest_to_reference.insert(metric.name(), system);
        }
    }

    Ok(Summary {
        rows,
        closest_to_reference,
        reference: reference.map(str::to_string),
    })
}

impl Summary {
    /// CSV mirror of the cross-system table:
    /// `system,ttr,yules_i,mtld,ptf,cdu,syn_ttr,bleu`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "system,ttr,yules_i,mtld,ptf,cdu,syn_ttr,bleu")?;
        for row in &self.rows {
            let cells: Vec<String> = Metric::ALL
                .iter()
                .map(|&m| {
                    row.means
                        .get(m)
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or_default()
                })
                .collect();
            writeln!(w, "{},{}", row.system, cells.join(","))?;
        }
        Ok(())
    }

    /// CSV of the closest-to-reference marks: `metric,system`.
    pub fn write_closest_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "metric,system")?;
        for metric in Metric::ALL {
            if let Some(system) = self.closest_to_reference.get(metric.name()) {
                writeln!(w, "{},{system}", metric.name())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(system: &str, books: &[(&str, Option<f64>)]) -> SystemTable {
        SystemTable {
            system: system.to_string(),
            books: books
                .iter()
                .map(|(id, mtld)| {
                    (
                        id.to_string(),
                        MetricValues {
                            mtld: *mtld,
                            ..MetricValues::default()
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn means_are_unweighted() {
        let t = table("sys", &[("b1", Some(90.0)), ("b2", Some(100.0))]);
        let summary = summarize(&[t], None).unwrap();
        assert_eq!(summary.rows[0].means.mtld, Some(95.0));
    }

    #[test]
    fn closest_to_reference_mark() {
        // Reference MTLD mean 96.05 with candidates at 90.21 and 94.08.
        let tables = vec![
            table("ht", &[("b1", Some(96.05))]),
            table("vanilla", &[("b1", Some(90.21))]),
            table("tagging", &[("b1", Some(94.08))]),
        ];
        let summary = summarize(&tables, Some("ht")).unwrap();
        assert_eq!(summary.closest_to_reference["mtld"], "tagging");
    }

    #[test]
    fn single_candidate_marked_trivially() {
        let tables = vec![table("only", &[("b1", Some(50.0))])];
        let summary = summarize(&tables, None).unwrap();
        assert_eq!(summary.closest_to_reference["mtld"], "only");
    }

    #[test]
    fn book_set_mismatch_lists_books() {
        let tables = vec![
            table("a", &[("b1", Some(1.0)), ("b2", Some(2.0))]),
            table("b", &[("b1", Some(1.0))]),
        ];
        let err = summarize(&tables, None).unwrap_err();
        assert!(matches!(err, Error::BookSetMismatch { .. }));
        assert!(err.to_string().contains("b2"), "{err}");
    }

    #[test]
    fn undefined_reference_cells_stay_empty() {
        // The reference has no BLEU; candidate rows do.
        let mut ht = table("ht", &[("b1", Some(96.0))]);
        let mut mt = table("mt", &[("b1", Some(90.0))]);
        ht.books.get_mut("b1").unwrap().bleu = None;
        mt.books.get_mut("b1").unwrap().bleu = Some(32.0);
        let summary = summarize(&[ht, mt], Some("ht")).unwrap();
        let ht_row = &summary.rows[0];
        assert_eq!(ht_row.means.bleu, None);
        // Single candidate: marked trivially even without a reference mean.
        assert_eq!(summary.closest_to_reference["bleu"], "mt");
        let mut csv = Vec::new();
        summary.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.contains("ht,,,96.000000,,,,\n"), "{text}");
    }

    #[test]
    fn unknown_reference_rejected() {
        let tables = vec![table("a", &[("b1", Some(1.0))])];
        assert!(summarize(&tables, Some("missing")).is_err());
    }
}
