// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::penalty::Penalty;

/// How segment costs combine into the reported cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sum,
    Max,
}

impl Objective {
    pub fn aggregate(self, costs: &[f64]) -> f64 {
        match self {
            Objective::Sum => costs.iter().fold(0.0, |acc, c| acc + c),
            Objective::Max => costs.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Costs of one prefix across levels `1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub prefix: usize,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub m: usize,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub cost: f64,
    pub boundaries: Vec<usize>,
    pub segment_costs: Vec<f64>,
    pub wall_time_ms: f64,
    pub eval_count: u64,
    pub estimate_iterations: Option<usize>,
    pub objective: Objective,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<Vec<TableRow>>,
}

impl RunReport {
    /// Re-evaluates the boundaries and compares with the reported costs.
    pub fn verify<P: Penalty + ?Sized>(&self, p: &P, rel_tol: f64) -> Result<(), String> {
        let b = &self.boundaries;
        if b.len() != self.k + 1 || b.first() != Some(&0) || b.last() != Some(&p.num_points()) {
            return Err(format!("boundaries {b:?} do not cover 0..{}", p.num_points()));
        }
        if b.windows(2).any(|w| w[0] > w[1]) {
            return Err(format!("boundaries {b:?} are not sorted"));
        }
        let costs: Vec<f64> = b.windows(2).map(|w| p.cost(w[0], w[1])).collect();
        let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs());
        if costs.len() != self.segment_costs.len()
            || costs.iter().zip(&self.segment_costs).any(|(&x, &y)| !close(x, y))
        {
            return Err(format!("segment costs {:?} differ from recomputed {costs:?}", self.segment_costs));
        }
        let total = self.objective.aggregate(&costs);
        if !close(total, self.cost) {
            return Err(format!("cost {} differs from recomputed {total}", self.cost));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_tsv(&self) -> String {
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = String::from(
            "algorithm\tm\tk\tepsilon\tcost\tboundaries\tsegment_costs\twall_time_ms\teval_count\testimate_iterations\n",
        );
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.algorithm,
            self.m,
            self.k,
            opt(self.epsilon.map(|e| e.to_string())),
            self.cost,
            join(&mut self.boundaries.iter().map(|b| b.to_string())),
            join(&mut self.segment_costs.iter().map(|c| c.to_string())),
            self.wall_time_ms,
            self.eval_count,
            opt(self.estimate_iterations.map(|e| e.to_string())),
        );
        if let Some(rows) = &self.table {
            out.push('\n');
            out.push_str("prefix");
            for l in 1..=self.k {
                let _ = write!(out, "\tlevel_{l}");
            }
            out.push('\n');
            for row in rows {
                let _ = write!(out, "{}", row.prefix);
                for c in &row.costs {
                    let _ = write!(out, "\t{c}");
                }
                out.push('\n');
            }
        }
        out
    }
}
