//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs every preset once for its criterion and once more for the
//! determinism check.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use grc_core::harness::{fit_rounds, preset, run_batch, ExperimentResult, FitModel, RunRow};

const C2_MAX_OUTSIDE: f64 = 0.05;
const C3_MIN_SUCCESS: f64 = 0.99;
const C4_MIN_STRETCH_OK: f64 = 0.95;
const C6_MIN_AGREEMENT: f64 = 0.99;
const FIT_MAX_RELATIVE_RESIDUAL: f64 = 0.25;
const MST_MAX_WEIGHT: u64 = 16;
const SPANNER_KAPPA: u32 = 3;

struct Verdict {
    id: &'static str,
    ok: bool,
    detail: String,
}

fn run_preset(name: &str) -> (Vec<ExperimentResult>, Duration) {
    let start = Instant::now();
    let results = preset(name)
        .unwrap()
        .iter()
        .map(|cfg| run_batch(cfg).unwrap())
        .collect();
    (results, start.elapsed())
}

fn rate(rows: &[RunRow], pred: impl Fn(&RunRow) -> bool) -> f64 {
    rows.iter().filter(|r| pred(r)).count() as f64 / rows.len() as f64
}

fn by_n(rows: &[RunRow]) -> BTreeMap<usize, Vec<RunRow>> {
    let mut m: BTreeMap<usize, Vec<RunRow>> = BTreeMap::new();
    for r in rows {
        m.entry(r.n).or_default().push(r.clone());
    }
    m
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

fn c1(res: &[ExperimentResult], t: Duration) -> Verdict {
    let rows = &res[0].rows;
    let bad = rows.iter().filter(|r| !r.oracle_ok).count();
    Verdict {
        id: "C1 circuit formation equals brute-force closure",
        ok: rows.len() == 10_000 && bad == 0 && within(t, 60),
        detail: format!(
            "{} cases, {bad} mismatches, {:.1}s",
            rows.len(),
            t.as_secs_f64()
        ),
    }
}

fn c2(res: &[ExperimentResult], t: Duration) -> Verdict {
    let mut ok = within(t, 120);
    let mut parts = Vec::new();
    for (n, rows) in by_n(&res[0].rows) {
        let outside = rate(&rows, |r| !r.oracle_ok);
        ok &= rows.len() == 1000 && outside <= C2_MAX_OUTSIDE;
        parts.push(format!("n={n}: outside {outside:.4}"));
    }
    Verdict {
        id: "C2 counting concentration",
        ok,
        detail: format!("{}, {:.1}s", parts.join(", "), t.as_secs_f64()),
    }
}

fn c3(res: &[ExperimentResult], t: Duration) -> Verdict {
    let rows = &res[0].rows;
    let success = rate(rows, |r| {
        r.oracle_ok && r.output_weight.map(|w| w as f64) == r.reference
    });
    let fit = fit_rounds(rows, FitModel::LogNLogNW { w: MST_MAX_WEIGHT }).unwrap();
    Verdict {
        id: "C3 MST weight equals Kruskal",
        ok: success >= C3_MIN_SUCCESS
            && fit.relative_residual <= FIT_MAX_RELATIVE_RESIDUAL
            && within(t, 600),
        detail: format!(
            "success {success:.4}, fit a={:.2} b={:.1} rel.res {:.3}, {:.1}s",
            fit.a,
            fit.b,
            fit.relative_residual,
            t.as_secs_f64()
        ),
    }
}

fn c4(res: &[ExperimentResult], t: Duration) -> Verdict {
    let plain = &res[0].rows;
    let low = &res[1].rows;
    let stretch = rate(plain, |r| r.oracle_ok);
    let mean_size = plain
        .iter()
        .map(|r| r.output_size.unwrap() as f64)
        .sum::<f64>()
        / plain.len() as f64;
    let bound = plain[0].reference.unwrap();
    let low_128: Vec<RunRow> = low.iter().filter(|r| r.n == 128).cloned().collect();
    let low_stretch = rate(&low_128, |r| r.oracle_ok);
    let low_all = rate(low, |r| r.oracle_ok);
    let fit = fit_rounds(
        low,
        FitModel::KappaLogN {
            kappa: SPANNER_KAPPA,
        },
    )
    .unwrap();
    Verdict {
        id: "C4 spanner stretch and size",
        ok: stretch >= C4_MIN_STRETCH_OK
            && mean_size <= bound
            && low_stretch >= C4_MIN_STRETCH_OK
            && low_all >= C4_MIN_STRETCH_OK
            && fit.relative_residual <= FIT_MAX_RELATIVE_RESIDUAL
            && within(t, 600),
        detail: format!(
            "stretch ok {stretch:.3}, mean |H| {mean_size:.1} <= {bound:.1}, low-memory stretch ok {low_stretch:.3} \
             (all sizes {low_all:.3}), fit rel.res {:.3}, {:.1}s",
            fit.relative_residual,
            t.as_secs_f64()
        ),
    }
}

fn c5(res: &[ExperimentResult], t: Duration) -> Verdict {
    let mut ok = within(t, 60);
    let mut parts = Vec::new();
    for r in res {
        let xs: Vec<f64> = r.rows.iter().map(|row| row.value.unwrap()).collect();
        let len = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / len;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
        let sigma = (var / len).sqrt();
        let bound = r.rows[0].reference.unwrap();
        ok &= xs.len() == 10_000 && mean <= bound + 3.0 * sigma;
        parts.push(format!(
            "{}: mean {mean:.3} <= {bound:.1} + 3*{sigma:.3}",
            r.summary.experiment
        ));
    }
    Verdict {
        id: "C5 capped-geometric set size",
        ok,
        detail: format!("{}, {:.1}s", parts.join(", "), t.as_secs_f64()),
    }
}

fn c6(res: &[ExperimentResult], t: Duration) -> Verdict {
    let mut ok = within(t, 900);
    let mut parts = Vec::new();
    let mut worst_fit: f64 = 0.0;
    for r in res {
        let rows = &r.rows;
        let agree = rate(rows, |row| {
            row.decision == row.expected && !row.flag_list().any(|f| f == "instance")
        });
        let unanimous = rate(rows, |row| !row.flag_list().any(|f| f == "split-decision"));
        let yes = rows.iter().filter(|row| row.expected == Some(true)).count();
        let balanced =
            rows.len() == 200 && yes * 2 == rows.len() && rows.iter().all(|row| row.n <= 64);
        let mst = r.summary.experiment.ends_with("-mst");
        let fit_ok = if mst {
            true
        } else {
            let fit = fit_rounds(rows, FitModel::LogN).unwrap();
            worst_fit = worst_fit.max(fit.relative_residual);
            fit.relative_residual <= FIT_MAX_RELATIVE_RESIDUAL
        };
        let task_ok = balanced && agree >= C6_MIN_AGREEMENT && unanimous == 1.0 && fit_ok;
        ok &= task_ok;
        parts.push(format!(
            "{} agree {agree:.3} unanimous {unanimous:.3}{}",
            r.summary.experiment.trim_start_matches("c6-"),
            if task_ok { "" } else { " FAILED" }
        ));
    }
    Verdict {
        id: "C6 verification predicates",
        ok,
        detail: format!(
            "{}; log fit worst rel.res {worst_fit:.3}; {:.1}s",
            parts.join("; "),
            t.as_secs_f64()
        ),
    }
}

fn c7(res: &[ExperimentResult], t: Duration) -> Verdict {
    let mut ok = within(t, 300);
    let mut parts = Vec::new();
    for r in res {
        let mismatches: usize = r.rows.iter().map(|row| row.output_size.unwrap()).sum();
        let over = r
            .rows
            .iter()
            .filter(|row| row.value.unwrap() > row.reference.unwrap())
            .count();
        ok &= r.rows.len() == 10 && mismatches == 0 && over == 0;
        parts.push(format!(
            "{}: {mismatches} mismatches, {over} cuts over bound",
            r.summary.experiment
        ));
    }
    Verdict {
        id: "C7 cut simulation exact and within bound",
        ok,
        detail: format!("{}, {:.1}s", parts.join(", "), t.as_secs_f64()),
    }
}

fn c8(first: &BTreeMap<&str, Vec<ExperimentResult>>) -> Verdict {
    let mut differing = Vec::new();
    for (name, results) in first {
        let (again, _) = run_preset(name);
        for (a, b) in results.iter().zip(&again) {
            if a.to_csv().unwrap() != b.to_csv().unwrap() {
                differing.push(a.summary.experiment.clone());
            }
        }
    }
    Verdict {
        id: "C8 presets rerun byte-identical",
        ok: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} presets compared", first.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    }
}

fn main() {
    type Check = fn(&[ExperimentResult], Duration) -> Verdict;
    let checks: [(&str, Check); 7] = [
        ("c1", c1),
        ("c2", c2),
        ("c3", c3),
        ("c4", c4),
        ("c5", c5),
        ("c6", c6),
        ("c7", c7),
    ];
    let mut first = BTreeMap::new();
    let mut verdicts = Vec::new();
    for (name, check) in checks {
        let (res, t) = run_preset(name);
        let v = check(&res, t);
        println!(
            "{} {}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            v.id,
            v.detail
        );
        verdicts.push(v);
        first.insert(name, res);
    }
    let (c8_res, _) = run_preset("c8");
    first.insert("c8", c8_res);
    let v = c8(&first);
    println!(
        "{} {}: {}",
        if v.ok { "PASS" } else { "FAIL" },
        v.id,
        v.detail
    );
    verdicts.push(v);

    let failed = verdicts.iter().filter(|v| !v.ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        verdicts.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
