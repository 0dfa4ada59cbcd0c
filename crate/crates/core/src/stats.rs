//! Corpus statistics: sizes and times of simplifications, one row per
//! algorithm set.

use std::fmt::Write as _;
use std::time::Instant;

use crate::background::{Counters, ExprId};
use crate::error::Result;
use crate::pipeline::{PipelineConfig, Simplifier};
use crate::syntax::parse;

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub algorithms: String,
    /// Mean size of the normalized inputs.
    pub mean_normalized: f64,
    /// Inputs simplified to the star of the union of all their letters.
    pub n_min: usize,
    pub size_avg: f64,
    pub size_quartiles: [f64; 3],
    /// Seconds.
    pub time_avg: f64,
    pub time_quartiles: [f64; 3],
    pub gc: u64,
    pub gc_failed: u64,
}

pub const COLUMNS: [&str; 13] = [
    "algorithms", "l_N", "n_min", "l_avg", "l_1/4", "l_1/2", "l_3/4", "t_avg", "t_1/4", "t_1/2",
    "t_3/4", "gc", "gc_f",
];

impl StatsRow {
    fn cells(&self) -> [String; 13] {
        let [l1, l2, l3] = self.size_quartiles;
        let [t1, t2, t3] = self.time_quartiles;
        [
            self.algorithms.clone(),
            format!("{:.0}", self.mean_normalized),
            self.n_min.to_string(),
            format!("{:.0}", self.size_avg),
            format!("{l1:.0}"),
            format!("{l2:.0}"),
            format!("{l3:.0}"),
            format!("{:.3}", self.time_avg),
            format!("{t1:.3}"),
            format!("{t2:.3}"),
            format!("{t3:.3}"),
            self.gc.to_string(),
            self.gc_failed.to_string(),
        ]
    }
}

/// Lines of a corpus file that hold expressions.
pub fn corpus_lines(text: &str) -> Vec<&str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Quartiles by linear interpolation between closest ranks.
pub fn quartiles(values: &[f64]) -> [f64; 3] {
    if values.is_empty() {
        return [0.0; 3];
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    [at(0.25), at(0.5), at(0.75)]
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Measurements of one expression.
#[derive(Debug, Clone, Copy)]
struct Sample {
    normalized: usize,
    size: usize,
    seconds: f64,
    full: bool,
}

fn run_shard(lines: &[&str], cfg: PipelineConfig, capacity: usize) -> Result<(Vec<Sample>, Counters)> {
    let mut s = Simplifier::with_capacity(cfg, capacity);
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        let (raw, map) = parse(line)?;
        let start = Instant::now();
        let root = s.intern(&raw, &map)?;
        let normalized = s.background().size(root);
        let r = s.simplify_id(root)?;
        let seconds = start.elapsed().as_secs_f64();
        let size = s.background().size(r);
        let full = !map.is_empty() && r == full_language_of(&mut s, map.len())?;
        out.push(Sample {
            normalized,
            size,
            seconds,
            full,
        });
    }
    Ok((out, s.background().counters()))
}

fn full_language_of(s: &mut Simplifier, k: usize) -> Result<ExprId> {
    let bg = s.background_mut();
    let letters: Vec<ExprId> = bg.letters()[..k].to_vec();
    let u = bg.union_many(&letters)?;
    bg.star_of(u)
}

/// Simplifies the whole corpus with one algorithm set. With `jobs > 1` the
/// corpus is split round-robin across independent backgrounds and the
/// counters are summed.
pub fn run_row(lines: &[&str], algorithms: &str, capacity: usize, jobs: usize) -> Result<StatsRow> {
    let cfg = PipelineConfig::parse(algorithms)?;
    let jobs = jobs.clamp(1, lines.len().max(1));
    let shards: Vec<Vec<&str>> = (0..jobs)
        .map(|j| lines.iter().skip(j).step_by(jobs).copied().collect())
        .collect();
    let results: Vec<Result<(Vec<Sample>, Counters)>> = if jobs == 1 {
        vec![run_shard(&shards[0], cfg, capacity)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = shards
                .iter()
                .map(|sh| scope.spawn(move || run_shard(sh, cfg, capacity)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("stats worker panicked"))
                .collect()
        })
    };
    let mut samples = Vec::with_capacity(lines.len());
    let (mut gc, mut gc_failed) = (0, 0);
    for r in results {
        let (s, c) = r?;
        samples.extend(s);
        gc += c.gc;
        gc_failed += c.gc_failed;
    }
    let sizes: Vec<f64> = samples.iter().map(|s| s.size as f64).collect();
    let times: Vec<f64> = samples.iter().map(|s| s.seconds).collect();
    let normalized: Vec<f64> = samples.iter().map(|s| s.normalized as f64).collect();
    Ok(StatsRow {
        algorithms: algorithms.to_string(),
        mean_normalized: mean(&normalized),
        n_min: samples.iter().filter(|s| s.full).count(),
        size_avg: mean(&sizes),
        size_quartiles: quartiles(&sizes),
        time_avg: mean(&times),
        time_quartiles: quartiles(&times),
        gc,
        gc_failed,
    })
}

/// Aligned text table, columns in the order of [`COLUMNS`].
pub fn format_table(rows: &[StatsRow]) -> String {
    let cells: Vec<[String; 13]> = rows.iter().map(StatsRow::cells).collect();
    let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.chars().count()).collect();
    for r in &cells {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, items: &[&str]| {
        let parts: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(&mut out, &COLUMNS);
    for r in &cells {
        let items: Vec<&str> = r.iter().map(String::as_str).collect();
        line(&mut out, &items);
    }
    out
}

/// Comma-separated values with a header row.
pub fn format_csv(rows: &[StatsRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.cells().join(","));
        out.push('\n');
    }
    out
}
