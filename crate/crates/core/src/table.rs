//! Grid error tables and their CSV / JSON export.

use std::fmt::Write as _;

use serde::Serialize;

/// Per-branch diagnostics of a composed approximation (maxima over the grid).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchDiagnostic {
    pub branch: usize,
    /// `max |Σ_j λ_j h_i(x_j) - Σ_j λ_j ψ_i(x_j)|`.
    pub inner_discrepancy: f64,
    /// `max |g(s) - φ̃(s)|` at the realized outer arguments `s`.
    pub outer_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub x: Vec<f64>,
    pub f: f64,
    pub phi: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub points: usize,
    pub sup: f64,
    pub mean: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    pub branches: Vec<BranchDiagnostic>,
    /// Smallest and largest outer-network argument seen, when applicable.
    pub outer_arg_range: Option<(f64, f64)>,
}

impl ErrorTable {
    pub fn push(&mut self, x: Vec<f64>, f: f64, phi: f64) {
        self.rows.push(ErrorRow {
            x,
            f,
            phi,
            abs_err: (f - phi).abs(),
        });
    }

    pub fn sup(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> ErrorSummary {
        let mut argmax = Vec::new();
        let mut sup = 0.0_f64;
        for r in &self.rows {
            if r.abs_err > sup || argmax.is_empty() {
                sup = sup.max(r.abs_err);
                argmax = r.x.clone();
            }
        }
        let mean = if self.rows.is_empty() {
            0.0
        } else {
            self.rows.iter().map(|r| r.abs_err).sum::<f64>() / self.rows.len() as f64
        };
        ErrorSummary {
            points: self.rows.len(),
            sup,
            mean,
            argmax,
        }
    }

    /// Comma-separated table: coordinates (`x` or `x1..xd`), `f`, `phi`, `abs_err`.
    pub fn to_csv(&self) -> String {
        let dim = self.rows.first().map_or(1, |r| r.x.len());
        let mut out = String::new();
        if dim == 1 {
            out.push_str("x");
        } else {
            let names: Vec<String> = (1..=dim).map(|j| format!("x{j}")).collect();
            out.push_str(&names.join(","));
        }
        out.push_str(",f,phi,abs_err\n");
        for r in &self.rows {
            for v in &r.x {
                let _ = write!(out, "{v:?},");
            }
            let _ = writeln!(out, "{:?},{:?},{:?}", r.f, r.phi, r.abs_err);
        }
        out
    }

    /// Summary record with diagnostics.
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            #[serde(flatten)]
            summary: ErrorSummary,
            outer_arg_range: Option<[f64; 2]>,
            branches: &'a [BranchDiagnostic],
        }
        let rec = Record {
            summary: self.summary(),
            outer_arg_range: self.outer_arg_range.map(|(a, b)| [a, b]),
            branches: &self.branches,
        };
        serde_json::to_string_pretty(&rec).expect("serializable record")
    }
}
