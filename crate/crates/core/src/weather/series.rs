//! Numeric series ingestion and threshold discretization.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::WeatherError;
use crate::syntax::{Atom, Program, Rule, Term};

/// A validated numeric time series: strictly increasing integer timestamps
/// and equally long numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub timestamp_column: String,
    pub timestamps: Vec<i64>,
    pub columns: Vec<String>,
    /// `values[c][row]`.
    pub values: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.values[i].as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.timestamp_column.clone()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (r, t) in self.timestamps.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(self.values.iter().map(|col| col[r].to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Parses CSV text whose first column holds the timestamps. Lines are
/// numbered from 1 with the header on line 1.
pub fn ingest(csv_text: &str) -> Result<SeriesTable, WeatherError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| WeatherError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < 2 {
        return Err(WeatherError::MissingColumn(
            "need a timestamp column and at least one variable column".into(),
        ));
    }
    let columns = header[1..].to_vec();
    let mut timestamps: Vec<i64> = Vec::new();
    let mut values = vec![Vec::new(); columns.len()];
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| WeatherError::Csv(format!("line {line}: {e}")))?;
        let ts = rec.get(0).unwrap_or("");
        let t: i64 = ts.parse().map_err(|_| WeatherError::NonNumeric {
            line,
            column: header[0].clone(),
            value: ts.to_string(),
        })?;
        if let Some(&prev) = timestamps.last() {
            if t <= prev {
                return Err(WeatherError::NonMonotonic { line, timestamp: t });
            }
        }
        timestamps.push(t);
        for (c, name) in columns.iter().enumerate() {
            let cell = rec.get(c + 1).unwrap_or("");
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| WeatherError::NonNumeric {
                    line,
                    column: name.clone(),
                    value: cell.to_string(),
                })?;
            values[c].push(v);
        }
    }
    Ok(SeriesTable {
        timestamp_column: header[0].clone(),
        timestamps,
        columns,
        values,
    })
}

/// Thresholds for one column: `levels[i]` covers `[thresholds[i-1], thresholds[i])`,
/// so a value equal to a threshold takes the higher level.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub thresholds: Vec<f64>,
    pub levels: Vec<String>,
    /// Start of the lowest range; values below it are rejected.
    #[serde(default)]
    pub min: Option<f64>,
    /// End of the highest range, used only when sampling synthetic values.
    #[serde(default)]
    pub max: Option<f64>,
    /// Level assumed when no rule derives another one.
    #[serde(default)]
    pub default: Option<String>,
}

fn valid_constant(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ColumnSpec {
    fn validate(&self, name: &str) -> Result<(), WeatherError> {
        let bad = |reason: String| Err(WeatherError::Spec(format!("column {name}: {reason}")));
        if self.levels.len() != self.thresholds.len() + 1 {
            return bad(format!(
                "{} thresholds need {} levels, found {}",
                self.thresholds.len(),
                self.thresholds.len() + 1,
                self.levels.len()
            ));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return bad("thresholds must be finite".into());
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return bad("thresholds must be strictly increasing".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !valid_constant(l)) {
            return bad(format!("level {l:?} is not a valid constant"));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if self.levels[..i].contains(l) {
                return bad(format!("level {l} declared twice"));
            }
        }
        if let (Some(min), Some(first)) = (self.min, self.thresholds.first()) {
            if min > *first {
                return bad("min lies above the first threshold".into());
            }
        }
        if let (Some(max), Some(last)) = (self.max, self.thresholds.last()) {
            if max <= *last {
                return bad("max must lie above the last threshold".into());
            }
        }
        if let Some(d) = &self.default {
            if !self.levels.contains(d) {
                return bad(format!("default {d} is not a level"));
            }
        }
        Ok(())
    }

    /// Index of the level containing `v`, or `None` below `min`.
    pub fn level_of(&self, v: f64) -> Option<usize> {
        if self.min.is_some_and(|m| v < m) {
            return None;
        }
        Some(self.thresholds.iter().take_while(|&&t| t <= v).count())
    }

    /// Half-open numeric range `[lo, hi)` of a level, with open ends closed
    /// off by `min`/`max` or by one threshold span beyond the extremes.
    pub fn range(&self, level: usize) -> (f64, f64) {
        let first = self.thresholds.first().copied().unwrap_or(0.0);
        let last = self.thresholds.last().copied().unwrap_or(0.0);
        let span = (last - first).max(1.0);
        let lo = if level == 0 {
            self.min.unwrap_or(first - span)
        } else {
            self.thresholds[level - 1]
        };
        let hi = if level == self.thresholds.len() {
            self.max.unwrap_or(last + span)
        } else {
            self.thresholds[level]
        };
        (lo, hi)
    }

    pub fn default_index(&self) -> Option<usize> {
        let d = self.default.as_ref()?;
        self.levels.iter().position(|l| l == d)
    }
}

/// Per-column discretization, read from TOML:
///
/// ```toml
/// [columns.rain]
/// thresholds = [0.1, 5.0]
/// levels = ["none", "low", "high"]
/// default = "none"
/// ```
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSpec {
    pub columns: BTreeMap<String, ColumnSpec>,
}

impl DiscretizationSpec {
    pub fn from_toml(text: &str) -> Result<DiscretizationSpec, WeatherError> {
        let spec: DiscretizationSpec = toml::from_str(text).map_err(|e| WeatherError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), WeatherError> {
        if self.columns.is_empty() {
            return Err(WeatherError::Spec("no columns declared".into()));
        }
        for (name, c) in &self.columns {
            if !valid_constant(name) {
                return Err(WeatherError::Spec(format!("column name {name:?} is not a valid constant")));
            }
            c.validate(name)?;
        }
        Ok(())
    }
}

/// A discretized column: level names and the level index of every row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteColumn {
    pub name: String,
    pub levels: Vec<String>,
    pub default: Option<usize>,
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTable {
    pub timestamps: Vec<i64>,
    /// In the order of the discretization spec.
    pub columns: Vec<DiscreteColumn>,
}

impl LevelTable {
    pub fn rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn column(&self, name: &str) -> Option<&DiscreteColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// `level(column, level, t)` for every row and column.
    pub fn facts(&self) -> Result<Program, WeatherError> {
        let mut rules = Vec::new();
        for (r, &t) in self.timestamps.iter().enumerate() {
            let t = i32::try_from(t).map_err(|_| WeatherError::TimestampRange(t))?;
            for c in &self.columns {
                rules.push(Rule::fact(level_atom(&c.name, &c.levels[c.values[r]], Term::Int(t))));
            }
        }
        Ok(Program::new(rules))
    }
}

pub(crate) fn level_atom(column: &str, level: &str, time: Term) -> Atom {
    Atom::new("level", vec![Term::constant(column), Term::constant(level), time])
}

/// Maps every spec column of the table to its levels. Table columns absent
/// from the spec are dropped.
pub fn discretize(table: &SeriesTable, spec: &DiscretizationSpec) -> Result<LevelTable, WeatherError> {
    let mut columns = Vec::new();
    for (name, cs) in &spec.columns {
        let values = table
            .column(name)
            .ok_or_else(|| WeatherError::MissingColumn(name.clone()))?;
        let levels = values
            .iter()
            .enumerate()
            .map(|(r, &v)| {
                cs.level_of(v).ok_or(WeatherError::BelowRange {
                    line: r + 2,
                    column: name.clone(),
                    value: v,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        columns.push(DiscreteColumn {
            name: name.clone(),
            levels: cs.levels.clone(),
            default: cs.default_index(),
            values: levels,
        });
    }
    Ok(LevelTable {
        timestamps: table.timestamps.clone(),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
[columns.rain]
thresholds = [0.1, 5.0]
levels = ["none", "low", "high"]
min = 0.0

[columns.humidity]
thresholds = [40.0, 80.0]
levels = ["low", "mid", "high"]
"#;

    #[test]
    fn ingest_well_formed() {
        let t = ingest("time,rain\n1,0.0\n2,0.5\n3,7\n").unwrap();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.timestamps, vec![1, 2, 3]);
        assert_eq!(t.column("rain").unwrap(), &[0.0, 0.5, 7.0]);
    }

    #[test]
    fn ingest_errors() {
        assert!(matches!(
            ingest("time,rain\n1,0\n1,0\n"),
            Err(WeatherError::NonMonotonic { line: 3, .. })
        ));
        assert!(matches!(
            ingest("time,rain\n1,NaN\n"),
            Err(WeatherError::NonNumeric { line: 2, .. })
        ));
        assert!(matches!(
            ingest("time,rain\n1,\n"),
            Err(WeatherError::NonNumeric { .. })
        ));
        assert!(matches!(ingest("time\n1\n"), Err(WeatherError::MissingColumn(_))));
        assert!(matches!(ingest("time,rain\n1\n"), Err(WeatherError::Csv(_))));
    }

    #[test]
    fn csv_round_trip() {
        let t = ingest("time,rain,humidity\n1,0.25,50\n5,3,99.5\n").unwrap();
        assert_eq!(ingest(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn boundaries_take_the_higher_level() {
        let spec = DiscretizationSpec::from_toml(SPEC).unwrap();
        let rain = &spec.columns["rain"];
        assert_eq!(rain.level_of(0.0), Some(0));
        assert_eq!(rain.level_of(0.1), Some(1));
        assert_eq!(rain.level_of(5.0), Some(2));
        assert_eq!(rain.level_of(-0.5), None);
        assert_eq!(spec.columns["humidity"].level_of(101.0), Some(2));
    }

    #[test]
    fn discretize_and_facts() {
        let spec = DiscretizationSpec::from_toml(SPEC).unwrap();
        let t = ingest("time,rain,humidity\n1,0.0,10\n2,0.1,90\n").unwrap();
        let lv = discretize(&t, &spec).unwrap();
        assert_eq!(lv.column("rain").unwrap().values, vec![0, 1]);
        let text = lv.facts().unwrap().to_string();
        assert!(text.contains("level(rain,low,2)."));
        assert!(text.contains("level(humidity,high,2)."));
    }

    #[test]
    fn below_range_and_missing_column() {
        let spec = DiscretizationSpec::from_toml(SPEC).unwrap();
        let t = ingest("time,rain,humidity\n1,-1,10\n").unwrap();
        assert!(matches!(discretize(&t, &spec), Err(WeatherError::BelowRange { .. })));
        let t = ingest("time,rain\n1,0\n").unwrap();
        assert!(matches!(discretize(&t, &spec), Err(WeatherError::MissingColumn(c)) if c == "humidity"));
    }

    #[test]
    fn spec_validation() {
        let bad = |s: &str| DiscretizationSpec::from_toml(s).is_err();
        assert!(bad("[columns.x]\nthresholds = [2.0, 1.0]\nlevels = [\"a\",\"b\",\"c\"]\n"));
        assert!(bad("[columns.x]\nthresholds = [1.0]\nlevels = [\"a\"]\n"));
        assert!(bad("[columns.x]\nthresholds = [1.0]\nlevels = [\"A\",\"b\"]\n"));
        assert!(bad("[columns.x]\nthresholds = [1.0]\nlevels = [\"a\",\"b\"]\ndefault = \"c\"\n"));
        assert!(bad("[columns.x]\nthresholds = [1.0]\nlevels = [\"a\",\"b\"]\nextra = 1\n"));
    }

    #[test]
    fn ranges_cover_levels() {
        let spec = DiscretizationSpec::from_toml(SPEC).unwrap();
        let rain = &spec.columns["rain"];
        assert_eq!(rain.range(0), (0.0, 0.1));
        assert_eq!(rain.range(1), (0.1, 5.0));
        let (lo, hi) = rain.range(2);
        assert_eq!(lo, 5.0);
        assert!(hi > 5.0);
    }
}
