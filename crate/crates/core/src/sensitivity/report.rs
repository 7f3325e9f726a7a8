use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::surrogate::DerivativeSpace;
use crate::transform::TransformKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    SobolFirst,
    SobolTotal,
    Derivative,
}

impl IndexKind {
    pub fn name(self) -> &'static str {
        match self {
            IndexKind::SobolFirst => "sobol_first",
            IndexKind::SobolTotal => "sobol_total",
            IndexKind::Derivative => "derivative",
        }
    }
}

/// How correlation is accounted for in an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Uncorrelated,
    /// First in its ordering; includes everything shared with the others.
    Full,
    /// Strictly between first and last.
    Marginal,
    /// Last in its ordering; all correlated contributions removed.
    Independent,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Uncorrelated => "uncorrelated",
            Provenance::Full => "full",
            Provenance::Marginal => "marginal",
            Provenance::Independent => "independent",
        }
    }

    /// Labels for position `pos` in an ordering of `dim` parameters. A lone
    /// parameter is both first and last.
    pub fn for_position(pos: usize, dim: usize) -> Vec<Provenance> {
        if dim == 1 {
            vec![Provenance::Full, Provenance::Independent]
        } else if pos == 0 {
            vec![Provenance::Full]
        } else if pos + 1 == dim {
            vec![Provenance::Independent]
        } else {
            vec![Provenance::Marginal]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub time_index: usize,
    /// Grid abscissa of `time_index` (minutes for time series).
    pub time: f64,
    /// Original (unpermuted) parameter id.
    pub parameter: usize,
    pub kind: IndexKind,
    pub provenance: Provenance,
    pub permutation_id: usize,
    pub value: f64,
}

impl IndexRecord {
    fn sort_key(&self) -> (usize, usize, IndexKind, Provenance, usize) {
        (
            self.time_index,
            self.parameter,
            self.kind,
            self.provenance,
            self.permutation_id,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pce,
    Qmc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub model: String,
    pub method: Method,
    pub parameters: Vec<String>,
    pub polynomial_order: Option<u32>,
    pub node_count: Option<usize>,
    pub lambda: Option<f64>,
    pub correlation: Vec<Vec<f64>>,
    pub transform: TransformKind,
    pub derivative_space: Option<DerivativeSpace>,
    pub qmc_n: Option<usize>,
    pub seed: Option<u64>,
    /// Output indices whose variance is zero; no Sobol records exist there.
    pub undefined_times: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub meta: ReportMeta,
    pub records: Vec<IndexRecord>,
}

pub const CSV_HEADER: &str = "t_min,parameter,kind,provenance,permutation,value";

impl SensitivityReport {
    /// Puts records in canonical order and deduplicates `undefined_times`.
    pub fn normalize(&mut self) {
        self.records.sort_by_key(|a| a.sort_key());
        self.meta.undefined_times.sort_unstable();
        self.meta.undefined_times.dedup();
    }

    /// Records matching every given filter.
    pub fn select(
        &self,
        parameter: Option<usize>,
        kind: Option<IndexKind>,
        provenance: Option<Provenance>,
    ) -> impl Iterator<Item = &IndexRecord> {
        self.records.iter().filter(move |r| {
            parameter.is_none_or(|p| r.parameter == p)
                && kind.is_none_or(|k| r.kind == k)
                && provenance.is_none_or(|p| r.provenance == p)
        })
    }

    /// Values of one series ordered by time index, as `(time_index, value)`.
    pub fn series(
        &self,
        parameter: usize,
        kind: IndexKind,
        provenance: Provenance,
    ) -> Vec<(usize, f64)> {
        let mut s: Vec<_> = self
            .select(Some(parameter), Some(kind), Some(provenance))
            .map(|r| (r.time_index, r.value))
            .collect();
        s.sort_by_key(|p| p.0);
        s
    }

    /// Value at a time index, if recorded.
    pub fn value(
        &self,
        time_index: usize,
        parameter: usize,
        kind: IndexKind,
        provenance: Provenance,
    ) -> Option<f64> {
        self.select(Some(parameter), Some(kind), Some(provenance))
            .find(|r| r.time_index == time_index)
            .map(|r| r.value)
    }

    fn parameter_name(&self, p: usize) -> String {
        self.meta
            .parameters
            .get(p)
            .cloned()
            .unwrap_or_else(|| p.to_string())
    }

    /// `t_min,parameter,kind,provenance,permutation,value`, one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_number(r.time),
                self.parameter_name(r.parameter),
                r.kind.name(),
                r.provenance.name(),
                r.permutation_id,
                format_number(r.value)
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Locale-free rendering with 12 significant digits.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}
