//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use beamsm_core::bound::{BoundMode, BoundTracker};
use beamsm_core::harness::config::AlgorithmKind;
use beamsm_core::harness::{run_experiment, write_csv, ExperimentConfig, LONG_CSV, SUMMARY_CSV};
use beamsm_core::jio::{JioParams, JioSmRls, Selection};
use beamsm_core::bound::init_bound;
use beamsm_core::Complex64;
use common::{
    always_adaptive, constraint_residual, inverse, random_scenario, rank_one_defect, rel_err,
    snapshots, vec_to_na,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNS: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, outcome: &Outcome) {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id} ({name}): {}", outcome.detail);
}

fn user_comparison() -> beamsm_core::harness::ExperimentResults {
    let mut cfg = ExperimentConfig::user_comparison();
    cfg.runs = RUNS;
    run_experiment(&cfg).expect("user comparison runs")
}

fn update_rate(res: &beamsm_core::harness::ExperimentResults) -> Outcome {
    let rate = res.get("jio_sm_rls").unwrap().mean_update_rate;
    Outcome {
        pass: (0.10..=0.20).contains(&rate),
        detail: format!("JIO-SM-RLS update rate {:.4} (required [0.10, 0.20])", rate),
    }
}

fn near_mvdr(res: &beamsm_core::harness::ExperimentResults) -> Outcome {
    let jio = res.get("jio_sm_rls").unwrap().sinr_at(1000);
    let mvdr = res.get("mvdr").unwrap().sinr_at(1000);
    Outcome {
        pass: (mvdr - jio).abs() <= 2.5,
        detail: format!("SINR(1000) JIO-SM-RLS {jio:.3} dB, MVDR {mvdr:.3} dB, gap {:.3} dB (required ≤ 2.5)", mvdr - jio),
    }
}

fn convergence_ordering(res: &beamsm_core::harness::ExperimentResults) -> Outcome {
    let jio = res.get("jio_sm_rls").unwrap().sinr_at(250);
    let fr = res.get("fr_rls").unwrap().sinr_at(250);
    Outcome {
        pass: jio > fr + 0.5,
        detail: format!("SINR(250) JIO-SM-RLS {jio:.3} dB vs FR-RLS {fr:.3} dB (required margin > 0.5 dB)"),
    }
}

fn bound_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::bound_comparison(AlgorithmKind::FrSmRls);
    cfg.runs = RUNS;
    let res = run_experiment(&cfg).expect("bound comparison runs");
    let tv = res.get("fr_sm_rls_tv").unwrap();
    let f10 = res.get("fr_sm_rls_fixed_1.0").unwrap();
    let f14 = res.get("fr_sm_rls_fixed_1.4").unwrap();
    let f08 = res.get("fr_sm_rls_fixed_0.8").unwrap();
    let rate_ok = tv.mean_update_rate < f10.mean_update_rate;
    let hi_ok = f14.final_sinr_db() <= tv.final_sinr_db();
    let lo_ok = f08.final_sinr_db() <= tv.final_sinr_db();
    Outcome {
        pass: rate_ok && hi_ok && lo_ok,
        detail: format!(
            "rate tv {:.4} vs δ=1.0 {:.4} [{}]; SINR(1000) tv {:.3}, δ=1.4 {:.3} [{}], δ=0.8 {:.3} [{}]",
            tv.mean_update_rate,
            f10.mean_update_rate,
            ok(rate_ok),
            tv.final_sinr_db(),
            f14.final_sinr_db(),
            ok(hi_ok),
            f08.final_sinr_db(),
            ok(lo_ok)
        ),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

fn constraint_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut updates = 0usize;
    let mut worst_constraint: f64 = 0.0;
    let mut worst_rank: f64 = 0.0;
    let mut scenario_count = 0u64;
    while updates < 10_000 {
        let m = [4usize, 8, 16][updates % 3];
        let scenario = random_scenario(&mut rng, m, 100);
        let rank = rng.random_range(1..=m);
        let gamma = rng.random_range(0.5..2.0);
        let mut f = always_adaptive(scenario.desired_steering().unwrap(), rank, gamma);
        for x in snapshots(&scenario, scenario_count) {
            let delta = rng.random_range(0.0..2.0);
            if f.update(&x, delta).expect("randomised update").updated {
                updates += 1;
                worst_constraint = worst_constraint.max(constraint_residual(&f));
                worst_rank = worst_rank.max(rank_one_defect(f.projection()));
            }
        }
        scenario_count += 1;
    }
    Outcome {
        pass: worst_constraint <= 1e-8 && worst_rank <= 1e-10,
        detail: format!(
            "{updates} updates over {scenario_count} scenarios; max |w̄ᴴā − γ| {worst_constraint:.2e} (≤ 1e-8), max rank-1 defect {worst_rank:.2e} (≤ 1e-10)"
        ),
    }
}

fn recursion_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let scenario = random_scenario(&mut rng, 8, 100);
    let params = JioParams {
        selection: Selection::Always,
        ..JioParams::set_membership(3)
    };
    let mut f = JioSmRls::new(params, scenario.desired_steering().unwrap()).unwrap();
    let mut tracker = init_bound(
        BoundMode::TimeVarying { alpha: 26.0, beta: 0.992 },
        scenario.noise_power(),
        f.full_weight().norm_sqr(),
    )
    .unwrap();
    let mut r = DMatrix::<Complex64>::identity(8, 8) * Complex64::from(1.0 / params.rho);
    let mut r_bar = DMatrix::<Complex64>::identity(3, 3) * Complex64::from(1.0 / params.varrho);
    let (mut worst_p, mut worst_pbar): (f64, f64) = (0.0, 0.0);
    for x in snapshots(&scenario, 8) {
        let delta = tracker.update(f.full_weight().norm_sqr()).unwrap();
        let ev = f.update(&x, delta).unwrap();
        let lam = Complex64::from(ev.lambda1);
        let xn = vec_to_na(&x);
        r += &xn * xn.adjoint() * lam;
        let x_bar = vec_to_na(&f.projection().adjoint_mul_vec(&x).unwrap());
        r_bar += &x_bar * x_bar.adjoint() * lam;
        worst_p = worst_p.max(rel_err(f.inverse_correlation(), &inverse(&r)));
        worst_pbar = worst_pbar.max(rel_err(f.reduced_inverse_correlation(), &inverse(&r_bar)));
    }
    Outcome {
        pass: f.update_count() == 100 && worst_p <= 1e-6 && worst_pbar <= 1e-6,
        detail: format!(
            "{} updates at m=8, r=3; max relative error P {worst_p:.2e}, P̄ {worst_pbar:.2e} (≤ 1e-6)",
            f.update_count()
        ),
    }
}

fn bound_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = rng.random_range(1.0..50.0);
        let beta = rng.random_range(0.0..1.0);
        let w = rng.random_range(0.0..2.0);
        let sigma = rng.random_range(0.01..2.0);
        let delta0 = rng.random_range(0.0..3.0);
        let mode = BoundMode::TimeVarying { alpha, beta };
        let mut t = BoundTracker::from_state(mode, sigma, delta0).unwrap();
        let target = (alpha * w * sigma).sqrt();
        for n in 1..=1000i32 {
            let iterated = t.update(w).unwrap();
            let closed = beta.powi(n) * delta0 + (1.0 - beta.powi(n)) * target;
            worst = worst.max((iterated - closed).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("20 (α, β, W) triples × 1000 steps; max |iterated − closed form| {worst:.2e} (≤ 1e-10)"),
    }
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::user_comparison();
    cfg.runs = 4;
    cfg.scenario.num_snapshots = 200;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_csv(&run_experiment(&cfg).unwrap(), a.path()).unwrap();
    write_csv(&run_experiment(&cfg).unwrap(), b.path()).unwrap();
    let mut same = true;
    let mut bytes = 0;
    for name in [LONG_CSV, SUMMARY_CSV] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        bytes += x.len();
        same &= x == y;
    }
    Outcome {
        pass: same,
        detail: format!("two runs with identical config and seed, {bytes} bytes compared, identical: {same}"),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let fig1 = user_comparison();
    let outcomes = [
        (1, "update rate", update_rate(&fig1)),
        (2, "near-MVDR steady state", near_mvdr(&fig1)),
        (3, "convergence ordering", convergence_ordering(&fig1)),
        (4, "fixed vs time-varying bound", bound_ordering()),
        (5, "constraint invariants", constraint_suite()),
        (6, "recursion vs oracle", recursion_oracle()),
        (7, "bound closed form", bound_closed_form()),
        (8, "determinism", determinism()),
    ];
    for (id, name, outcome) in &outcomes {
        report(*id, name, outcome);
    }
    let failed = outcomes.iter().filter(|(_, _, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
