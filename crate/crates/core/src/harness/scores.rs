//! Score tables for the `score` command and the shipped HumanoidBench
//! reference values.

use std::fmt;
use std::str::FromStr;

use crate::harness::{baseline_normalized, human_normalized, iqm, median_aggregate, success_normalized};
use crate::{Error, Result};

const HUMANOIDBENCH_CSV: &str = include_str!("../../data/humanoidbench_targets.csv");

/// Random-policy and success-threshold returns of one task.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskReference {
    pub task: String,
    pub random: f64,
    pub target: f64,
}

/// The 14 HumanoidBench tasks with their random and success-target returns.
pub fn humanoidbench_references() -> Vec<TaskReference> {
    let mut reader = csv::Reader::from_reader(HUMANOIDBENCH_CSV.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("bundled reference table is valid");
            TaskReference {
                task: r[0].to_string(),
                random: r[1].parse().expect("numeric random score"),
                target: r[2].parse().expect("numeric target score"),
            }
        })
        .collect()
}

pub fn humanoidbench_reference(task: &str) -> Option<TaskReference> {
    humanoidbench_references().into_iter().find(|r| r.task == task)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizationMethod {
    Baseline,
    Human,
    Success,
}

impl FromStr for NormalizationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Self::Baseline),
            "human" => Ok(Self::Human),
            "success" => Ok(Self::Success),
            other => Err(Error::InvalidInput(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    /// Seed-average per task, then median over tasks.
    Median,
    /// Interquartile mean over all (task, seed) scores.
    Iqm,
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Self::Median),
            "iqm" => Ok(Self::Iqm),
            other => Err(Error::InvalidInput(format!("unknown aggregate `{other}`"))),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Median => "median",
            Self::Iqm => "iqm",
        })
    }
}

/// One raw score with whatever references are known for its task.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub task: String,
    pub seed: u64,
    pub score: f64,
    pub random: Option<f64>,
    pub human: Option<f64>,
    pub target: Option<f64>,
    pub baseline_min: Option<f64>,
    pub baseline_max: Option<f64>,
}

impl ScoreRow {
    pub fn normalized(&self, method: NormalizationMethod) -> Result<f64> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                Error::InvalidReference(format!("task `{}` has no `{name}` reference", self.task))
            })
        };
        match method {
            NormalizationMethod::Baseline => baseline_normalized(
                self.score,
                need(self.baseline_min, "min")?,
                need(self.baseline_max, "max")?,
            ),
            NormalizationMethod::Human => {
                human_normalized(self.score, need(self.random, "random")?, need(self.human, "human")?)
            }
            NormalizationMethod::Success => {
                success_normalized(self.score, need(self.random, "random")?, need(self.target, "target")?)
            }
        }
    }
}

/// Rows of `task,seed,score,random,human,target,min,max`; reference columns
/// may be empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

/// Per-task seed means and the suite aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSummary {
    pub per_task: Vec<(String, f64)>,
    pub aggregate: f64,
}

impl ScoreTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("score table header: {e}")))?
            .clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (Some(task_i), Some(score_i)) = (col("task"), col("score")) else {
            return Err(Error::InvalidInput("score table needs `task` and `score` columns".into()));
        };
        let seed_i = col("seed");
        let opt_cols = ["random", "human", "target", "min", "max"].map(col);
        for h in headers.iter() {
            if !["task", "seed", "score", "random", "human", "target", "min", "max"].contains(&h) {
                return Err(Error::InvalidInput(format!("unknown score table column `{h}`")));
            }
        }

        let mut rows = Vec::new();
        for (n, rec) in reader.records().enumerate() {
            let line = n + 2;
            let rec = rec.map_err(|e| Error::InvalidInput(format!("score table line {line}: {e}")))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i).unwrap_or("").parse().map_err(|_| {
                    Error::InvalidInput(format!("score table line {line}: bad number in column {}", i + 1))
                })
            };
            let opt = |i: Option<usize>| -> Result<Option<f64>> {
                match i.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()) {
                    None => Ok(None),
                    Some(s) => s.parse().map(Some).map_err(|_| {
                        Error::InvalidInput(format!("score table line {line}: bad number `{s}`"))
                    }),
                }
            };
            rows.push(ScoreRow {
                task: rec.get(task_i).unwrap_or("").to_string(),
                seed: match seed_i {
                    Some(i) => num(i)? as u64,
                    None => 0,
                },
                score: num(score_i)?,
                random: opt(opt_cols[0])?,
                human: opt(opt_cols[1])?,
                target: opt(opt_cols[2])?,
                baseline_min: opt(opt_cols[3])?,
                baseline_max: opt(opt_cols[4])?,
            });
        }
        Ok(Self { rows })
    }

    /// Normalizes every row and aggregates across tasks.
    pub fn summarize(&self, method: NormalizationMethod, aggregate: Aggregate) -> Result<ScoreSummary> {
        if self.rows.is_empty() {
            return Err(Error::InvalidInput("score table is empty".into()));
        }
        let mut tasks: Vec<(String, Vec<f64>)> = Vec::new();
        let mut all = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let v = row.normalized(method)?;
            all.push(v);
            match tasks.iter_mut().find(|(t, _)| *t == row.task) {
                Some((_, vs)) => vs.push(v),
                None => tasks.push((row.task.clone(), vec![v])),
            }
        }
        let aggregate = match aggregate {
            Aggregate::Median => {
                median_aggregate(&tasks.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())?
            }
            Aggregate::Iqm => iqm(&all)?,
        };
        let per_task = tasks
            .into_iter()
            .map(|(t, v)| {
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                (t, mean)
            })
            .collect();
        Ok(ScoreSummary { per_task, aggregate })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_references() {
        let refs = humanoidbench_references();
        assert_eq!(refs.len(), 14);
        let walk = humanoidbench_reference("h1-walk").unwrap();
        assert_eq!((walk.random, walk.target), (2.38, 700.0));
        assert_eq!(humanoidbench_reference("h1-reach").unwrap().target, 12000.0);
    }

    #[test]
    fn summarize_success() {
        let t = ScoreTable::parse(
            "task,seed,score,random,target\nh1-walk,0,700,2.38,700\nh1-walk,1,2.38,2.38,700\nh1-crawl,0,272.66,272.66,700\n",
        )
        .unwrap();
        let s = t.summarize(NormalizationMethod::Success, Aggregate::Median).unwrap();
        assert_eq!(s.per_task, vec![("h1-walk".into(), 0.5), ("h1-crawl".into(), 0.0)]);
        assert_eq!(s.aggregate, 0.25);
        let s = t.summarize(NormalizationMethod::Success, Aggregate::Iqm).unwrap();
        assert!((s.aggregate - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn missing_reference() {
        let t = ScoreTable::parse("task,score,random\na,1,0\n").unwrap();
        assert!(matches!(
            t.summarize(NormalizationMethod::Human, Aggregate::Median),
            Err(Error::InvalidReference(_))
        ));
        assert!(ScoreTable::parse("task,score,bogus\na,1,0\n").is_err());
    }
}
