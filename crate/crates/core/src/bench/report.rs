use std::io;

use serde::Serialize;

use super::{BenchError, BenchRecord};

pub const RESULTS_HEADER: [&str; 10] = [
    "instance_id",
    "solver_id",
    "params_json",
    "total_samples",
    "success_count",
    "p",
    "t_per_sample_s",
    "tts_s",
    "best_energy",
    "gap",
];

/// Results CSV, one row per record in the given order. Undefined TTS is an empty field.
pub fn write_results_csv(records: &[BenchRecord], w: impl io::Write) -> Result<(), BenchError> {
    let err = |e: csv::Error| BenchError::Csv(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULTS_HEADER).map_err(err)?;
    for r in records {
        out.write_record([
            r.instance_id.clone(),
            r.solver_id.clone(),
            serde_json::to_string(&r.params).expect("params serialize"),
            r.total_samples.to_string(),
            r.success_count.to_string(),
            r.p().to_string(),
            r.t_per_sample.to_string(),
            r.tts.map(|t| t.to_string()).unwrap_or_default(),
            r.best_energy.to_string(),
            r.gap.to_string(),
        ])
        .map_err(err)?;
    }
    out.flush().map_err(|e| BenchError::Csv(e.to_string()))
}

/// Ensemble statistics for one solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub solver_id: String,
    pub params_json: String,
    pub instances: usize,
    /// Instances where the planted optimum was sampled at least once.
    pub solved: usize,
    pub percent_solved: f64,
    pub mean_p: f64,
    pub median_p: f64,
    /// Over the solved instances only.
    pub tts_min: Option<f64>,
    pub tts_mean: Option<f64>,
    pub tts_max: Option<f64>,
    /// `"<percent>%"` followed by `min/mean/max` TTS when any instance was solved.
    pub cell: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub success_criterion: String,
    pub tts_convention: String,
    pub configs: Vec<ConfigSummary>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Group records by `(solver_id, params)` in first-appearance order.
pub fn summarize(records: &[BenchRecord]) -> Summary {
    let mut groups: Vec<(String, String, Vec<&BenchRecord>)> = Vec::new();
    for r in records {
        let params = serde_json::to_string(&r.params).expect("params serialize");
        // Pooled records list their sources; group them by solver id alone.
        let key = if r.solver_id.ends_with(":pooled") { String::new() } else { params };
        match groups.iter_mut().find(|(s, p, _)| *s == r.solver_id && *p == key) {
            Some(g) => g.2.push(r),
            None => groups.push((r.solver_id.clone(), key, vec![r])),
        }
    }
    let configs = groups
        .into_iter()
        .map(|(solver_id, params_json, rs)| {
            let tts: Vec<f64> = rs.iter().filter_map(|r| r.tts).collect();
            let solved = tts.len();
            let percent = 100.0 * solved as f64 / rs.len() as f64;
            let (tts_min, tts_mean, tts_max) = if tts.is_empty() {
                (None, None, None)
            } else {
                (
                    tts.iter().copied().reduce(f64::min),
                    Some(tts.iter().sum::<f64>() / solved as f64),
                    tts.iter().copied().reduce(f64::max),
                )
            };
            let mut cell = format!("{}%", percent.round());
            if let (Some(a), Some(b), Some(c)) = (tts_min, tts_mean, tts_max) {
                cell.push_str(&format!(" {a:.3e}/{b:.3e}/{c:.3e}"));
            }
            let ps: Vec<f64> = rs.iter().map(|r| r.p()).collect();
            ConfigSummary {
                solver_id,
                params_json,
                instances: rs.len(),
                solved,
                percent_solved: percent,
                mean_p: ps.iter().sum::<f64>() / ps.len() as f64,
                median_p: median(ps),
                tts_min,
                tts_mean,
                tts_max,
                cell,
            }
        })
        .collect();
    Summary {
        success_criterion: "exact match of the planted bitstring".into(),
        tts_convention: "t*ln(0.01)/ln(1-p); undefined at p=0; t_per_sample at p=1".into(),
        configs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{tts, Proportion};
    use crate::fixed::Milli;
    use std::collections::BTreeMap;

    fn rec(id: &str, succ: u64) -> BenchRecord {
        let p = Proportion::new(succ, 100).unwrap();
        BenchRecord {
            instance_id: id.into(),
            solver_id: "sa:sweeps=10".into(),
            params: BTreeMap::from([("num_sweeps".to_string(), serde_json::json!(10))]),
            total_samples: 100,
            success_count: succ,
            t_per_sample: 0.001,
            tts: tts(p, 0.001),
            best_energy: Milli(-3000),
            gap: Milli(if succ > 0 { 0 } else { 100 }),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_results_csv(&[rec("a", 0), rec("b", 100)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER.join(","));
        assert_eq!(lines[1], r#"a,sa:sweeps=10,"{""num_sweeps"":10}",100,0,0,0.001,,-3.000,0.100"#);
        assert_eq!(lines[2], r#"b,sa:sweeps=10,"{""num_sweeps"":10}",100,100,1,0.001,0.001,-3.000,0.000"#);
        let mut again = Vec::new();
        write_results_csv(&[rec("a", 0), rec("b", 100)], &mut again).unwrap();
        assert_eq!(s.as_bytes(), &again[..]);
    }

    #[test]
    fn percent_and_tts_triple() {
        let recs: Vec<BenchRecord> =
            (0..10).map(|i| rec(&format!("i{i}"), if i < 8 { 10 * (i + 1) } else { 0 })).collect();
        let s = summarize(&recs);
        assert_eq!(s.configs.len(), 1);
        let c = &s.configs[0];
        assert_eq!((c.instances, c.solved), (10, 8));
        assert_eq!(c.percent_solved, 80.0);
        assert!(c.cell.starts_with("80% "));
        let solved: Vec<f64> = recs.iter().filter_map(|r| r.tts).collect();
        assert_eq!(c.tts_max, solved.iter().copied().reduce(f64::max));
        assert_eq!(c.tts_min, solved.iter().copied().reduce(f64::min));
        assert!(c.tts_min.unwrap() > 0.001);
    }

    #[test]
    fn unsolved_and_single() {
        let s = summarize(&[rec("a", 0), rec("b", 0)]);
        assert_eq!(s.configs[0].percent_solved, 0.0);
        assert_eq!(s.configs[0].cell, "0%");
        assert_eq!(s.configs[0].tts_mean, None);

        let r = rec("x", 40);
        let s = summarize(std::slice::from_ref(&r));
        let c = &s.configs[0];
        assert_eq!(c.tts_min, r.tts);
        assert_eq!(c.tts_mean, r.tts);
        assert_eq!(c.tts_max, r.tts);
        assert_eq!(c.mean_p, r.p());
        assert_eq!(c.median_p, r.p());
    }
}
