//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aerial_placement::channel::{atg_pathloss, p_los, AtgEnvironment, RadioParams};
use aerial_placement::deployment::{
    drop_users_ppp, hex_layout, GroundBS, PlacementGrid, Position2D, Position3D, ServiceArea,
};
use aerial_placement::mobility::{advance_for, spawn_users, step, MobilityParams};
use aerial_placement::oracle::exhaustive_search;
use aerial_placement::placement::{
    episodes_to_target, learn_placement, LearningConfig, QTable, QosLandscape,
};
use aerial_placement::radio::{
    aggregate_qos, qos_for_association, AerialBS, AssociationMap, BsId, NetworkState,
};
use aerial_placement::simctl::{
    compare_seeds, emit_outputs, pooled_sinr_medians, run_scenario, BaselineMode, Preset,
    ScenarioConfig, REWARD_TRACE_CSV, SINR_CDF_CSV, SUMMARY_TOML, TIMESLOTS_CSV, USER_SINR_CSV,
};
use aerial_placement::stats::{ks_uniform, median};
use aerial_placement::ExecMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 20;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Desk snapshot: 7 active ground BSs, 50 users, aerial in the grid corner.
fn desk_snapshot(seed: u64) -> (NetworkState, PlacementGrid) {
    let area = ServiceArea::default();
    let grid = PlacementGrid::new(area, 5, 5, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = hex_layout(1, &area, 25.0, 46.0).unwrap();
    let users = drop_users_ppp(50, &area, &mut rng);
    let aerial = AerialBS {
        pos: grid.index_to_position(0).unwrap(),
        tx_power: 36.0,
    };
    let net = NetworkState::new(ground, Some(aerial), users, AtgEnvironment::urban(), RadioParams::default()).unwrap();
    (net, grid)
}

fn learn_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1ea2)
}

fn channel_hand_values() -> Verdict {
    let env = AtgEnvironment::urban();
    // 1 / (1 + 9.61 exp(-0.16 (90 - 9.61)))
    let want_90 = 1.0 / (1.0 + 9.61 * (-0.16f64 * (90.0 - 9.61)).exp());
    // theta -> 0: 1 / (1 + 9.61 exp(0.16 * 9.61))
    let want_0 = 1.0 / (1.0 + 9.61 * (0.16f64 * 9.61).exp());
    // 20 log10(4 pi f d / c) at 100 m, plus eta_los p + eta_nlos (1 - p) with p ~ 1
    let fspl = 20.0 * (4.0 * PI * 2.0e9 * 100.0 / 299_792_458.0f64).log10();
    let want_pl = fspl + want_90 * 1.0 + (1.0 - want_90) * 20.0;

    let got_90 = p_los(FRAC_PI_2, &env);
    let got_0 = p_los(1e-12, &env);
    let got_pl = atg_pathloss(
        &Position3D::new(0.0, 0.0, 100.0),
        &Position2D::new(0.0, 0.0),
        &env,
        &RadioParams::default(),
    )
    .unwrap();
    let ok = (got_90 - 0.999975).abs() <= 1e-6
        && (got_90 - want_90).abs() <= 1e-12
        && (got_0 - 0.02188).abs() <= 1e-4
        && (got_0 - want_0).abs() <= 1e-9
        && (got_pl - 79.47).abs() <= 0.01
        && (got_pl - want_pl).abs() <= 1e-9;
    verdict(
        ok,
        format!("p_los(90)={got_90:.6} p_los(0+)={got_0:.5} pl(100 m)={got_pl:.3} dB"),
    )
}

struct LearnedSeed {
    within: bool,
    ratio: f64,
    elapsed: Duration,
}

fn learned_seeds() -> Vec<LearnedSeed> {
    let cfg = LearningConfig::default();
    (0..SEEDS)
        .map(|seed| {
            let (net, grid) = desk_snapshot(seed);
            let t0 = Instant::now();
            let mut q = QTable::new(&grid, cfg.hyper).unwrap();
            let out = learn_placement(0, &net, &mut q, &cfg, &grid, &mut learn_rng(seed)).unwrap();
            let elapsed = t0.elapsed();
            let oracle = exhaustive_search(&net, &grid, ExecMode::Parallel).unwrap();
            let trace = &out.reward_trace;
            let k = trace.len() / 10;
            let mean_abs = |s: &[f64]| s.iter().map(|r| r.abs()).sum::<f64>() / s.len() as f64;
            let first = mean_abs(&trace[..k]);
            let last = mean_abs(&trace[trace.len() - k..]);
            LearnedSeed {
                within: out.best_qos >= oracle.best_qos * (1.0 - 0.01),
                ratio: if first > 0.0 { last / first } else { 0.0 },
                elapsed,
            }
        })
        .collect()
}

fn oracle_equivalence(seeds: &[LearnedSeed]) -> Verdict {
    let hits = seeds.iter().filter(|s| s.within).count();
    let slowest = seeds.iter().map(|s| s.elapsed).max().unwrap();
    let ok = hits as f64 >= 0.9 * seeds.len() as f64 && slowest < Duration::from_secs(60);
    verdict(
        ok,
        format!("{hits}/{} seeds within 1% of the optimum, slowest seed {slowest:.2?}", seeds.len()),
    )
}

fn reward_convergence(seeds: &[LearnedSeed]) -> Verdict {
    let worst = seeds.iter().map(|s| s.ratio).fold(0.0, f64::max);
    verdict(
        worst <= 0.10,
        format!("worst final/initial mean |reward| ratio {worst:.4} over {} seeds", seeds.len()),
    )
}

/// Cold versus warm learning on the snapshot one slot after a trained one.
/// The warm table is the one trained on the earlier snapshot. Both arms start
/// in the grid corner, as in the oracle-equivalence runs; the ratio when both
/// start at the earlier session's result is reported alongside.
fn warm_start_speedup() -> Verdict {
    let cfg = LearningConfig::default();
    let mob = MobilityParams::default();
    let cap = cfg.max_episodes + 1;
    let (mut cold, mut warm) = (Vec::new(), Vec::new());
    let (mut cold_prev, mut warm_prev) = (Vec::new(), Vec::new());
    for seed in 0..SEEDS {
        let (net, grid) = desk_snapshot(seed);
        let mut trained = QTable::new(&grid, cfg.hyper).unwrap();
        let first = learn_placement(0, &net, &mut trained, &cfg, &grid, &mut learn_rng(seed)).unwrap();

        let mut mob_rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let users = spawn_users(net.users(), &mob, &mut mob_rng);
        let moved = advance_for(&users, 10.0, &mob, &grid.area, &mut mob_rng);
        let mut next = net.clone();
        next.set_users(moved.iter().map(|u| u.pos).collect());
        let target = exhaustive_search(&next, &grid, ExecMode::Parallel).unwrap().best_qos;

        let run = |q: &mut QTable, start: usize| {
            let mut land = QosLandscape::new(&next, &grid).unwrap();
            let (n, _) = episodes_to_target(start, &mut land, q, &cfg, target, 0.01, &mut learn_rng(seed + 77)).unwrap();
            n.unwrap_or(cap) as f64
        };
        cold.push(run(&mut QTable::new(&grid, cfg.hyper).unwrap(), 0));
        warm.push(run(&mut trained.clone(), 0));
        cold_prev.push(run(&mut QTable::new(&grid, cfg.hyper).unwrap(), first.best_state));
        warm_prev.push(run(&mut trained.clone(), first.best_state));
    }
    let mc = median(&cold).unwrap();
    let mw = median(&warm).unwrap();
    let pc = median(&cold_prev).unwrap();
    let pw = median(&warm_prev).unwrap();
    verdict(
        mw <= 0.25 * mc,
        format!(
            "median episodes to 1%: warm {mw} vs cold {mc} (ratio {:.3}); from previous result: warm {pw} vs cold {pc} (ratio {:.3})",
            mw / mc,
            pw / pc
        ),
    )
}

fn directional_gain() -> Verdict {
    let cfg = ScenarioConfig::preset(Preset::Desk);
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let pairs = compare_seeds(&cfg, &seeds, ExecMode::Parallel).unwrap();
    let holds: Vec<bool> = pairs.iter().filter_map(|p| p.summary().aerial_holds()).collect();
    let wins = holds.iter().filter(|&&h| h).count();
    let (mb, ma) = pooled_sinr_medians(&pairs);
    let (mb, ma) = (mb.unwrap(), ma.unwrap());
    let ok = !holds.is_empty() && wins as f64 >= 0.8 * holds.len() as f64 && ma >= mb;
    verdict(
        ok,
        format!(
            "aerial >= baseline below threshold in {wins}/{} seeds ({} never dropped); median SINR {ma:.2} dB vs {mb:.2} dB",
            holds.len(),
            pairs.len() - holds.len()
        ),
    )
}

fn mobility_statistics() -> Verdict {
    let params = MobilityParams::default();
    let area = ServiceArea::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = drop_users_ppp(100, &area, &mut rng);
    let mut users = spawn_users(&start, &params, &mut rng);
    let mut speeds = Vec::with_capacity(100_000);
    let mut dirs = Vec::with_capacity(100_000);
    // one hold per step, so every step redraws every user once
    while speeds.len() < 100_000 {
        users = step(&users, params.hold_time, &params, &area, &mut rng);
        for u in &users {
            speeds.push(u.speed);
            dirs.push(u.direction);
        }
    }
    let (_, p_speed) = ks_uniform(&speeds, 0.0, params.c_max);
    let (_, p_dir) = ks_uniform(&dirs, 0.0, TAU);
    verdict(
        p_speed > 0.01 && p_dir > 0.01 && params.c_max == 1.3,
        format!("{} redraws, KS p speed {p_speed:.3}, direction {p_dir:.3}", speeds.len()),
    )
}

fn association_optimality() -> Verdict {
    let area = ServiceArea::default();
    let mut instances = 0;
    let mut worst_gap = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n_users in 1..=6 {
            for n_bs in 1..=3 {
                let with_aerial = rng.gen_bool(0.5);
                let n_ground = if with_aerial { n_bs - 1 } else { n_bs };
                let ground: Vec<GroundBS> = (0..n_ground)
                    .map(|id| GroundBS {
                        id,
                        pos: Position3D::new(rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), 25.0),
                        tx_power: rng.gen_range(30.0..46.0),
                        active: true,
                    })
                    .collect();
                let aerial = with_aerial.then(|| AerialBS {
                    pos: Position3D::new(rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), rng.gen_range(25.0..525.0)),
                    tx_power: 36.0,
                });
                let users = drop_users_ppp(n_users, &area, &mut rng);
                let net = NetworkState::new(ground, aerial, users, AtgEnvironment::urban(), RadioParams::default()).unwrap();
                let ids = net.active_ids();
                let mut best = f64::NEG_INFINITY;
                for code in 0..ids.len().pow(n_users as u32) {
                    let mut c = code;
                    let assign: Vec<BsId> = (0..n_users)
                        .map(|_| {
                            let id = ids[c % ids.len()];
                            c /= ids.len();
                            id
                        })
                        .collect();
                    best = best.max(qos_for_association(&net, &AssociationMap { assign }).unwrap());
                }
                let got = aggregate_qos(&net);
                worst_gap = worst_gap.max((best - got) / best.abs().max(1e-12));
                instances += 1;
            }
        }
    }
    verdict(
        worst_gap <= 1e-12,
        format!("{instances} instances, worst relative gap to enumeration {worst_gap:.2e}"),
    )
}

fn determinism() -> Verdict {
    let mut identical = true;
    let mut files = 0;
    for mode in [BaselineMode::Ground19, BaselineMode::Aerial18Plus1] {
        let cfg = ScenarioConfig {
            seed: 42,
            baseline_mode: mode,
            ..ScenarioConfig::preset(Preset::Desk)
        };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_outputs(&run_scenario(&cfg).unwrap(), &cfg, a.path()).unwrap();
        emit_outputs(&run_scenario(&cfg).unwrap(), &cfg, b.path()).unwrap();
        for name in [TIMESLOTS_CSV, SINR_CDF_CSV, REWARD_TRACE_CSV, USER_SINR_CSV, SUMMARY_TOML] {
            identical &= fs::read(a.path().join(name)).unwrap() == fs::read(b.path().join(name)).unwrap();
            files += 1;
        }
    }
    verdict(identical, format!("{files} output files compared byte for byte"))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Verdict) -> bool {
    let t0 = Instant::now();
    let v = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    });
    println!(
        "{} [{id}] {name}: {} ({:.1?})",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        t0.elapsed()
    );
    v.pass
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, "channel hand values", channel_hand_values);
    let learned = learned_seeds();
    ok &= run(2, "oracle equivalence", || oracle_equivalence(&learned));
    ok &= run(3, "warm-start speedup", warm_start_speedup);
    ok &= run(4, "reward convergence", || reward_convergence(&learned));
    ok &= run(5, "directional QoS gain", directional_gain);
    ok &= run(6, "mobility statistics", mobility_statistics);
    ok &= run(7, "association optimality", association_optimality);
    ok &= run(8, "determinism", determinism);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
