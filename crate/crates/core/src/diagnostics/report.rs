use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::fmt17;

/// Outcome of one identification-condition probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub statistics: BTreeMap<String, f64>,
    pub pass: bool,
    pub details: String,
}

impl ConditionReport {
    pub(crate) fn new(condition: u8) -> Self {
        ConditionReport {
            condition,
            statistics: BTreeMap::new(),
            pass: false,
            details: String::new(),
        }
    }

    pub(crate) fn stat(&mut self, name: &str, value: f64) -> &mut Self {
        self.statistics.insert(name.to_string(), value);
        self
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.get(name).copied()
    }
}

/// Result of a log-log rate experiment over a bandwidth ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    pub sigmas: Vec<f64>,
    /// Signed Monte-Carlo estimate of the gap at each bandwidth.
    pub gaps: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// `None` when every gap vanishes and no slope is defined.
    pub slope: Option<f64>,
    pub exact_match: bool,
    pub pass: bool,
}

/// Componentwise comparison of a prediction with a noisy observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub z_levels: Vec<f64>,
    pub predicted: Vec<f64>,
    pub observed: Vec<f64>,
    pub noise_scale: Vec<f64>,
    /// Pass threshold in units of `noise_scale`.
    pub tolerance: f64,
    pub max_abs_score: f64,
    pub pass: bool,
}

impl ConsistencyCheck {
    pub(crate) fn new(
        z_levels: Vec<f64>,
        predicted: Vec<f64>,
        observed: Vec<f64>,
        noise_scale: Vec<f64>,
        tolerance: f64,
    ) -> Self {
        let mut max_abs_score: f64 = 0.0;
        let mut pass = true;
        for ((p, o), s) in predicted.iter().zip(&observed).zip(&noise_scale) {
            let gap = (p - o).abs();
            if !(gap <= tolerance * s) {
                pass = false;
            }
            let score = if gap == 0.0 { 0.0 } else { gap / s };
            max_abs_score = max_abs_score.max(if score.is_nan() { f64::INFINITY } else { score });
        }
        ConsistencyCheck {
            z_levels,
            predicted,
            observed,
            noise_scale,
            tolerance,
            max_abs_score,
            pass,
        }
    }
}

/// Writes `check,pass,statistic,value` rows, one per named statistic.
pub fn write_summary_csv<W: Write>(mut w: W, reports: &[ConditionReport]) -> Result<()> {
    writeln!(w, "check,pass,statistic,value")?;
    for r in reports {
        for (name, value) in &r.statistics {
            writeln!(
                w,
                "condition{},{},{},{}",
                r.condition,
                r.pass,
                name,
                fmt17(*value)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_scores() {
        let c = ConsistencyCheck::new(
            vec![1.0, 2.0],
            vec![1.0, 2.0],
            vec![1.2, 2.0],
            vec![0.1, 0.0],
            3.0,
        );
        assert!(c.pass);
        assert!((c.max_abs_score - 2.0).abs() < 1e-12);
        let c = ConsistencyCheck::new(vec![1.0], vec![1.0], vec![1.5], vec![0.1], 3.0);
        assert!(!c.pass);
        let c = ConsistencyCheck::new(vec![1.0], vec![1.0], vec![1.5], vec![0.0], 3.0);
        assert!(!c.pass);
        assert!(c.max_abs_score.is_infinite());
    }

    #[test]
    fn summary_csv_lists_statistics() {
        let mut r = ConditionReport::new(6);
        r.stat("rank", 5.0).stat("condition_number", 12.5);
        r.pass = true;
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("condition6,true,condition_number,"));
        assert!(lines[2].starts_with("condition6,true,rank,5"));
    }
}
