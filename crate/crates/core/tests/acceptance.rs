//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use memsdg::category::{stationary, TransitionParams};
use memsdg::config::{preset, ExperimentConfig, ExperimentKind, SweepAxis, SweepParam};
use memsdg::engine::{init, run_ensemble, EnsembleSummary, ParamValues};
use memsdg::experiment::run_plan;
use memsdg::game::{memory_payoff, MemoryParams, PayoffHistory, Strategy};
use memsdg::rng::run_seeds;
use memsdg::topology::{gen_square_lattice, NetworkSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Data rows of a CSV file as field vectors, header included, comments dropped.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let idx = rows[0]
        .iter()
        .position(|h| h == name)
        .expect("column present");
    rows[1..].iter().map(|r| r[idx].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn lattice_ensemble(
    side: usize,
    values: ParamValues,
    seeds: usize,
    steps: u64,
    tail: usize,
) -> EnsembleSummary {
    let params = values.build().unwrap();
    run_ensemble(
        &NetworkSpec::Lattice { side },
        &params,
        &run_seeds(42, seeds),
        steps,
        tail,
    )
    .unwrap()
}

fn stationary_learner_counts() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfgs = preset("table1").unwrap();
    for c in &mut cfgs {
        c.out = dir.path().to_path_buf();
    }
    run_plan("table1", &cfgs).map_err(|e| e.to_string())?;
    let rows = csv_rows(&dir.path().join("table1_theory.csv"));
    let expected = [961.538, 1250.0, 1538.462];
    let exp = column(&rows, "expected_learners");
    let sim = column(&rows, "simulated_learners");
    let err = column(&rows, "relative_error");
    let mut ok = rows.len() == 4;
    let mut parts = Vec::new();
    for k in 0..exp.len() {
        let (e, s, re) = (num(&exp[k]), num(&sim[k]), num(&err[k]));
        ok &= (e - expected[k]).abs() < 1e-3 && re < 0.01;
        parts.push(format!("{s:.3} vs {e:.3} ({:.3}%)", re * 100.0));
    }
    check(ok, parts.join(", "))
}

fn stationary_fixed_point() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 50 {
        let (p, q) = (rng.gen::<f64>(), rng.gen::<f64>());
        if p + q == 0.0 {
            continue;
        }
        count += 1;
        let tp = TransitionParams::new(p, q).unwrap();
        let d = stationary(tp).unwrap();
        let b = tp.matrix();
        let x = [d.pi_learner, d.pi_profiteer];
        for col in 0..2 {
            let y = x[0] * b[0][col] + x[1] * b[1][col];
            worst = worst.max((y - x[col]).abs());
        }
        worst = worst.max((x[0] + x[1] - 1.0).abs());
    }
    check(worst <= 1e-12, format!("50 pairs, max deviation {worst:e}"))
}

fn memory_oracle() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        prop::collection::vec(-10.0f64..10.0, 1..=20),
        1usize..=20,
        0.0f64..=1.0,
    );
    let result = runner.run(&strategy, |(rounds, m, beta)| {
        let mut hist = PayoffHistory::new(m);
        rounds.iter().for_each(|&v| hist.push_round(v));
        let got = memory_payoff(&hist, MemoryParams::new(m, beta).unwrap()).unwrap();
        let t = rounds.len();
        let mut want = 0.0;
        for a in 0..m.min(t) {
            want += beta.powi(a as i32) * rounds[t - 1 - a];
        }
        prop_assert!((got - want).abs() <= 1e-12, "got {got}, want {want}");
        Ok(())
    });
    match result {
        Ok(()) => Ok("1000 random histories within 1e-12".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Straight-line reference of one trajectory on a 3×3 periodic lattice.
struct Reference {
    nb: Vec<Vec<usize>>,
    coop: Vec<bool>,
    learner: Vec<bool>,
    hist: Vec<Vec<f64>>,
    q: Vec<[f64; 5]>,
    q_def: Vec<[f64; 5]>,
    last: Vec<Option<(usize, bool)>>,
    rng: ChaCha8Rng,
    v: ParamValues,
}

impl Reference {
    fn new(seed: u64, v: ParamValues) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        let nb = (0..9)
            .map(|id: usize| {
                let (x, y) = (id % 3, id / 3);
                let mut l = vec![
                    y * 3 + (x + 2) % 3,
                    y * 3 + (x + 1) % 3,
                    (y + 2) % 3 * 3 + x,
                    (y + 1) % 3 * 3 + x,
                ];
                l.sort();
                l
            })
            .collect();
        let mut coop = Vec::new();
        for _ in 0..9 {
            coop.push(rng.gen::<bool>());
        }
        let mut learner = Vec::new();
        for _ in 0..9 {
            learner.push(rng.gen::<bool>());
        }
        Reference {
            nb,
            coop,
            learner,
            hist: vec![Vec::new(); 9],
            q: vec![[v.q_init; 5]; 9],
            q_def: vec![[v.q_init; 5]; 9],
            last: vec![None; 9],
            rng,
            v,
        }
    }

    fn payoff(&self, me: bool, other: bool) -> f64 {
        match (me, other) {
            (true, true) => 1.0,
            (true, false) => 1.0 - self.v.r,
            (false, true) => 1.0 + self.v.r,
            (false, false) => 0.0,
        }
    }

    fn step(&mut self) {
        let old = self.coop.clone();
        for i in 0..9 {
            let mut pi = 0.0;
            for &j in &self.nb[i] {
                pi += self.payoff(old[i], old[j]);
            }
            self.hist[i].push(pi);
        }
        let mut u = [0.0; 9];
        for i in 0..9 {
            let h = &self.hist[i];
            let start = h.len().saturating_sub(self.v.m);
            let mut acc = 0.0;
            for &x in &h[start..] {
                acc = acc * self.v.beta + x;
            }
            u[i] = acc;
        }
        let mut next = vec![false; 9];
        for i in 0..9 {
            if !self.learner[i] {
                let j = self.nb[i][self.rng.gen_range(0..self.nb[i].len())];
                let prob = 1.0 / (1.0 + ((u[i] - u[j]) / self.v.kappa).exp());
                next[i] = if self.rng.gen::<f64>() < prob {
                    old[j]
                } else {
                    old[i]
                };
                self.last[i] = None;
            } else {
                let s = self.nb[i].iter().filter(|&&j| old[j]).count();
                if let Some((ps, pa)) = self.last[i] {
                    let best = self.q[i][s].max(self.q_def[i][s]);
                    let cell = if pa {
                        &mut self.q[i][ps]
                    } else {
                        &mut self.q_def[i][ps]
                    };
                    let target = u[i] + self.v.gamma * best;
                    *cell += self.v.alpha * (target - *cell);
                }
                let (qc, qd) = (self.q[i][s], self.q_def[i][s]);
                let explore = self.rng.gen::<f64>() < self.v.epsilon;
                let a = if explore || qc == qd {
                    self.rng.gen::<bool>()
                } else {
                    qc > qd
                };
                self.last[i] = Some((s, a));
                next[i] = a;
            }
        }
        self.coop = next;
        for i in 0..9 {
            let x = self.rng.gen::<f64>();
            if self.learner[i] && x < self.v.p {
                self.learner[i] = false;
            } else if !self.learner[i] && x < self.v.q {
                self.learner[i] = true;
            }
        }
    }
}

fn engine_equivalence() -> Outcome {
    let net = Arc::new(gen_square_lattice(3).unwrap());
    let mut steps = 0;
    for seed in 0..20u64 {
        let k = seed as f64;
        let v = ParamValues {
            r: 0.05 * k,
            m: 1 + seed as usize % 6,
            beta: 0.05 * k,
            epsilon: 0.02 * k,
            p: 0.3 + 0.02 * k,
            q: 0.6 - 0.02 * k,
            ..ParamValues::default()
        };
        let params = v.build().unwrap();
        let mut state = init(Arc::clone(&net), &params, seed);
        let mut reference = Reference::new(seed, v);
        for t in 1..=25u64 {
            let record = state.step(&params).unwrap();
            reference.step();
            steps += 1;
            let strategies: Vec<bool> = state
                .strategies()
                .iter()
                .map(|s| *s == Strategy::Cooperate)
                .collect();
            let learners: Vec<bool> = state
                .agents()
                .iter()
                .map(|a| a.category == memsdg::agents::Category::Learner)
                .collect();
            let coop_ref = reference.coop.iter().filter(|&&c| c).count();
            let learn_ref = reference.learner.iter().filter(|&&l| l).count();
            if strategies != reference.coop
                || learners != reference.learner
                || record.t != t
                || record.cooperators != coop_ref
                || record.learners != learn_ref
                || record.n != 9
            {
                return Err(format!("seed {seed} diverged at t={t}"));
            }
        }
    }
    Ok(format!("20 seeds, {steps} steps identical"))
}

fn distribution_moments() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("table2").unwrap().remove(0);
    cfg.out = dir.path().to_path_buf();
    if (
        cfg.params.p,
        cfg.params.q,
        cfg.network.side,
        cfg.moments_tail,
    ) != (0.8, 0.5, 50, Some(4000))
    {
        return Err("table2 preset does not pin p=0.8, q=0.5, n=2500, tail 4000".into());
    }
    let label = cfg.label.clone();
    run_plan("table2", &[cfg]).map_err(|e| e.to_string())?;
    let rows = csv_rows(&dir.path().join(format!("{label}_moments.csv")));
    let get = |who: &str, col: &str| {
        let idx = rows[0].iter().position(|h| h == col).unwrap();
        num(&rows.iter().find(|r| r[0] == who).unwrap()[idx])
    };
    let (std_l, skew_l, kurt_l) = (
        get("learners", "std"),
        get("learners", "skewness"),
        get("learners", "kurtosis"),
    );
    let (std_p, skew_p, kurt_p) = (
        get("profiteers", "std"),
        get("profiteers", "skewness"),
        get("profiteers", "kurtosis"),
    );
    let ok = (20.0..=30.0).contains(&std_l)
        && skew_l.abs() < 0.3
        && (std_l - std_p).abs() < 1e-9
        && (kurt_l - kurt_p).abs() < 1e-9
        && (skew_l + skew_p).abs() < 1e-9;
    check(
        ok,
        format!("std {std_l:.3}, skewness {skew_l:.4}, kurtosis {kurt_l:.4}; profiteer std {std_p:.3}, skewness {skew_p:.4}"),
    )
}

fn cooperation_trend_in_q() -> Outcome {
    let at = |q| {
        lattice_ensemble(
            30,
            ParamValues {
                r: 0.6,
                beta: 0.5,
                m: 5,
                p: 0.5,
                q,
                ..ParamValues::default()
            },
            10,
            5000,
            500,
        )
    };
    let (low, high) = (at(0.1), at(0.9));
    let margin = high.mean_fc - low.mean_fc;
    let se = low.fc_standard_error().hypot(high.fc_standard_error());
    check(
        margin > se,
        format!(
            "f_c(q=0.9) {:.4} - f_c(q=0.1) {:.4} = {margin:.4}, combined se {se:.4}",
            high.mean_fc, low.mean_fc
        ),
    )
}

fn memory_promotes_cooperation() -> Outcome {
    let at = |m, beta| {
        let v = ParamValues {
            p: 1.0,
            q: 0.0,
            r: 0.3,
            m,
            beta,
            ..ParamValues::default()
        };
        lattice_ensemble(30, v, 5, 2000, 500).mean_fc
    };
    let (main, long, short) = (at(10, 0.9), at(15, 0.9), at(1, 0.1));
    check(
        main >= 0.95 && long > short,
        format!("f_c(M=10, beta=0.9) {main:.4}; f_c(M=15, beta=0.9) {long:.4} vs f_c(M=1, beta=0.1) {short:.4}"),
    )
}

fn size_robustness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("fig9")
        .unwrap()
        .into_iter()
        .find(|c| c.label == "fig9_r0.5_p0.6_sl")
        .expect("fig9 lattice set for r=0.5, p=0.6");
    cfg.out = dir.path().to_path_buf();
    cfg.seeds = 10;
    let label = cfg.label.clone();
    run_plan("fig9", &[cfg]).map_err(|e| e.to_string())?;
    let rows = csv_rows(&dir.path().join(format!("{label}_size_sweep.csv")));
    let ns = column(&rows, "n");
    let means: Vec<f64> = column(&rows, "mean_fc").iter().map(|s| num(s)).collect();
    let spread = num(&column(&rows, "range")[0]);
    let std = num(&column(&rows, "std")[0]);
    check(
        ns == ["400", "900", "1600", "2500"] && spread <= 0.05,
        format!("means {means:.4?}, range {spread:.4}, std {std:.4}"),
    )
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let mut files = 0;
    for name in memsdg::config::PRESETS {
        let name = format!("{name}-desk");
        let outputs: Vec<_> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let mut cfgs = preset(&name).unwrap();
                for c in &mut cfgs {
                    c.out = dir.path().to_path_buf();
                }
                run_plan(&name, &cfgs).unwrap();
                read_dir(dir.path())
            })
            .collect();
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            return Err(format!("{name} outputs differ between reruns"));
        }
        files += outputs[0].len();
    }
    Ok(format!(
        "{} desk presets, {files} files identical",
        memsdg::config::PRESETS.len()
    ))
}

fn smoke_sweep() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        label: "smoke".into(),
        kind: ExperimentKind::Sweep2d,
        steps: 300,
        tail: 100,
        seeds: 2,
        out: dir.path().to_path_buf(),
        axes: vec![
            SweepAxis {
                name: SweepParam::P,
                min: 0.0,
                max: 1.0,
                points: 3,
            },
            SweepAxis {
                name: SweepParam::Q,
                min: 0.0,
                max: 1.0,
                points: 3,
            },
        ],
        network: memsdg::config::NetworkConfig {
            side: 10,
            ..Default::default()
        },
        ..ExperimentConfig::default()
    };
    run_plan("smoke", &[cfg]).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(dir.path().join("smoke_sweep.csv")).unwrap();
    let rows = csv_rows(&dir.path().join("smoke_sweep.csv"));
    let well_formed = !text.contains('\r')
        && rows[0] == ["p", "q", "mean_fc"]
        && rows.len() == 10
        && rows[1..]
            .iter()
            .all(|r| r.len() == 3 && r.iter().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)))
        && rows[1..].iter().all(|r| (0.0..=1.0).contains(&num(&r[2])));
    check(well_formed, format!("{} data rows", rows.len() - 1))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("stationary learner counts", stationary_learner_counts),
        ("stationary fixed point", stationary_fixed_point),
        ("memory payoff oracle", memory_oracle),
        ("engine equivalence", engine_equivalence),
        ("distribution moments", distribution_moments),
        ("cooperation rises with q", cooperation_trend_in_q),
        ("memory promotes cooperation", memory_promotes_cooperation),
        ("size robustness", size_robustness),
        ("determinism", determinism),
        ("sweep smoke test", smoke_sweep),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
