//! Observed `(z, x, y)` records grouped by instrument level.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::numerics::fmt17;
use crate::rng::{substream, Stream};

/// All records observed at one instrument level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGroup {
    pub z: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl LevelGroup {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Provenance carried in the comment line of a samples CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub scenario_id: String,
    pub seed: u64,
    pub baseline_z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub scenario_id: String,
    pub seed: u64,
    pub baseline_z: f64,
    /// Sorted by `z`, one entry per level.
    pub groups: Vec<LevelGroup>,
}

impl SampleSet {
    /// Builds a sample set from groups, sorting them by level.
    pub fn new(
        scenario_id: impl Into<String>,
        seed: u64,
        baseline_z: f64,
        mut groups: Vec<LevelGroup>,
    ) -> Result<Self> {
        groups.sort_by(|a, b| a.z.total_cmp(&b.z));
        if groups.windows(2).any(|w| w[0].z == w[1].z) {
            return Err(Error::validation(
                "sample set",
                "duplicate instrument level",
            ));
        }
        for g in &groups {
            if g.x.len() != g.y.len() || g.is_empty() {
                return Err(Error::validation(
                    "sample set",
                    format!("level z = {} needs matching, nonempty x and y columns", g.z),
                ));
            }
        }
        Ok(SampleSet {
            scenario_id: scenario_id.into(),
            seed,
            baseline_z,
            groups,
        })
    }

    pub fn levels(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.z).collect()
    }

    pub fn group(&self, z: f64) -> Result<&LevelGroup> {
        self.groups
            .iter()
            .find(|g| g.z == z)
            .ok_or_else(|| Error::UnknownLevel {
                z,
                available: self.levels(),
            })
    }

    pub fn baseline(&self) -> Result<&LevelGroup> {
        self.groups
            .iter()
            .find(|g| g.z == self.baseline_z)
            .ok_or(Error::MissingBaseline(self.baseline_z))
    }

    /// Non-baseline groups in level order.
    pub fn non_baseline(&self) -> impl Iterator<Item = &LevelGroup> {
        self.groups.iter().filter(move |g| g.z != self.baseline_z)
    }

    /// Common group size, or `None` when groups are unbalanced.
    pub fn n_per_level(&self) -> Option<usize> {
        let n = self.groups.first()?.len();
        self.groups.iter().all(|g| g.len() == n).then_some(n)
    }

    pub fn pooled_x(&self) -> Vec<f64> {
        self.groups
            .iter()
            .flat_map(|g| g.x.iter().copied())
            .collect()
    }

    pub fn meta(&self, config_hash: Option<String>) -> SampleMeta {
        SampleMeta {
            scenario_id: self.scenario_id.clone(),
            seed: self.seed,
            baseline_z: self.baseline_z,
            config_hash,
        }
    }

    /// Writes `# {meta}` followed by the `z,x,y` table.
    pub fn write_csv<W: Write>(&self, mut w: W, config_hash: Option<String>) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.meta(config_hash))?)?;
        writeln!(w, "z,x,y")?;
        for g in &self.groups {
            let z = fmt17(g.z);
            for (x, y) in g.x.iter().zip(&g.y) {
                writeln!(w, "{z},{},{}", fmt17(*x), fmt17(*y))?;
            }
        }
        Ok(())
    }

    /// Reads a `z,x,y` table. Leading `#` lines are comments; the first one may
    /// carry a JSON [`SampleMeta`]. Without it, `default_baseline` is used.
    pub fn read_csv<R: BufRead>(r: R, source_name: &str, default_baseline: f64) -> Result<Self> {
        let mut meta: Option<SampleMeta> = None;
        let mut header_seen = false;
        let mut groups: Vec<LevelGroup> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if !header_seen && meta.is_none() {
                    meta = serde_json::from_str(comment.trim()).ok();
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["z", "x", "y"] {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        format!("expected header `z,x,y`, found `{line}`"),
                    ));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected 3 fields, found {}", fields.len()),
                ));
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        Error::parse(
                            source_name,
                            lineno,
                            format!("not a finite number: `{}`", f.trim()),
                        )
                    })?;
            }
            let [z, x, y] = vals;
            match groups.iter_mut().find(|g| g.z == z) {
                Some(g) => {
                    g.x.push(x);
                    g.y.push(y);
                }
                None => groups.push(LevelGroup {
                    z,
                    x: vec![x],
                    y: vec![y],
                }),
            }
        }
        if !header_seen {
            return Err(Error::parse(source_name, 0, "missing `z,x,y` header"));
        }
        if groups.is_empty() {
            return Err(Error::parse(source_name, 0, "no records"));
        }
        let (scenario_id, seed, baseline) = match meta {
            Some(m) => (m.scenario_id, m.seed, m.baseline_z),
            None => ("external".to_string(), 0, default_baseline),
        };
        SampleSet::new(scenario_id, seed, baseline, groups)
    }
}

/// Simulates `n_per_level` independent subjects at every instrument level.
///
/// Record `r` of level index `l` uses its own substream keyed by
/// `(seed, l, r)`, so the result does not depend on evaluation order.
pub fn draw_sample_set(scenario: &Scenario, n_per_level: usize, seed: u64) -> Result<SampleSet> {
    scenario.validate()?;
    if n_per_level == 0 {
        return Err(Error::validation(
            "sample size",
            "n_per_level must be at least 1",
        ));
    }
    let groups = scenario
        .z_levels
        .iter()
        .enumerate()
        .map(|(level, &z)| {
            let (x, y): (Vec<f64>, Vec<f64>) = (0..n_per_level as u64)
                .into_par_iter()
                .map(|r| {
                    let unit =
                        scenario.draw_unit(&mut substream(seed, Stream::Sample, level as u64, r));
                    let x = scenario.x_of(z, &unit);
                    (x, scenario.y_of(x, &unit))
                })
                .unzip();
            LevelGroup { z, x, y }
        })
        .collect();
    SampleSet::new(scenario.id.clone(), seed, scenario.baseline_z, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::scenario::DistSpec;

    fn tanh_only() -> Scenario {
        let mut s = Scenario::s1();
        s.u1_dist = DistSpec::point_mass(1.0);
        s.u2_dist = DistSpec::point_mass(0.0);
        s
    }

    #[test]
    fn degenerate_noise_gives_exact_tanh() {
        let set = draw_sample_set(&tanh_only(), 500, 9).unwrap();
        for g in &set.groups {
            for (x, y) in g.x.iter().zip(&g.y) {
                assert_eq!(*y, x.tanh());
            }
        }
    }

    #[test]
    fn same_inputs_same_bits() {
        let a = draw_sample_set(&Scenario::s1(), 300, 17).unwrap();
        let b = draw_sample_set(&Scenario::s1(), 300, 17).unwrap();
        assert_eq!(a, b);
        let c = draw_sample_set(&Scenario::s1(), 300, 18).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn groups_match_levels_and_size() {
        let s = Scenario::s1();
        let set = draw_sample_set(&s, 40, 1).unwrap();
        assert_eq!(set.levels(), s.z_levels);
        assert_eq!(set.n_per_level(), Some(40));
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let mut s = Scenario::s1();
        s.baseline_z = 0.25;
        assert!(matches!(
            draw_sample_set(&s, 10, 1),
            Err(Error::Validation { .. })
        ));
        assert!(draw_sample_set(&Scenario::s1(), 0, 1).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = draw_sample_set(&Scenario::s1(), 25, 5).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf, Some("abc".into())).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1) == Some("z,x,y"));
        let back = SampleSet::read_csv(&buf[..], "mem", 0.0).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let data = "z,x,y\n0,1,2\n0,abc,3\n";
        let err = SampleSet::read_csv(data.as_bytes(), "data.csv", 0.0).unwrap_err();
        assert_eq!(err.to_string(), "data.csv:3: not a finite number: `abc`");
        let err = SampleSet::read_csv("a,b\n".as_bytes(), "d.csv", 0.0).unwrap_err();
        assert!(err.to_string().starts_with("d.csv:1:"));
    }

    #[test]
    fn external_csv_without_meta() {
        let data = "z,x,y\n0,1,2\n1,2,3\n0,1.5,2.5\n";
        let set = SampleSet::read_csv(data.as_bytes(), "ext", 0.0).unwrap();
        assert_eq!(set.scenario_id, "external");
        assert_eq!(set.levels(), vec![0.0, 1.0]);
        assert_eq!(set.n_per_level(), None);
        assert_eq!(set.baseline().unwrap().x, vec![1.0, 1.5]);
    }
}
