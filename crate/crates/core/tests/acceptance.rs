#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Acceptance suite. Runs every criterion in sequence, prints one
//! PASS/FAIL line each with its wall time, and exits non-zero if any
//! criterion fails or exceeds its time budget.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use lobimpact::bars::{sample_bars, BarKind, Trade};
use lobimpact::impact::{lag1_response, order_flow_imbalance, ResponseMode};
use lobimpact::ingest::{
    load_stream, merge_streams, parse_message_file, parse_orderbook_file, validate_stream, write_message_file,
    write_orderbook_file, EventType, MergedStream, Side, StreamMeta,
};
use lobimpact::preprocess::{clip_session, reconstruct_market_orders, MarketOrder, SessionWindow};
use lobimpact::regress::{
    best_split, kfold_cv, kfold_indices, kyle_lambda, ols_fit, power_law_fit, tree_fit, LinearRegion, ModelKind, Node,
    Regressor, TreeParams,
};
use lobimpact::synth::{generate_kyle_world, generate_zero_intelligence, write_lobster_files, KyleWorldConfig, ZiConfig};
use lobimpact::Mid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

fn track_alloc(size: usize) {
    let now = CURRENT.fetch_add(size, Ordering::Relaxed) + size;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            track_alloc(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    // counted as a fresh allocation followed by a free of the old block
    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            track_alloc(new_size);
            CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
        }
        p
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixture_exactness() -> Check {
    let s = common::load_fixture("SMPL");
    ensure!(s.len() == 10, "expected 10 rows, got {}", s.len());
    let e = s.events()[1];
    ensure!(
        (e.time_ns, e.event_type, e.order_id, e.size, e.price, e.direction)
            == (43_955_242_600_000, EventType::ExecVisible, 140_339_446, 10, 2_158_800, Side::Buy),
        "row 2 fields {e:?}"
    );
    let b = &s.books()[1];
    ensure!(
        (b.best_ask(), b.best_ask_volume(), b.best_bid(), b.best_bid_volume()) == (2_159_600, 100, 2_158_800, 75),
        "row 2 book {b:?}"
    );
    ensure!(validate_stream(&s).is_empty(), "fixture has violations");

    let mos = reconstruct_market_orders(&s);
    let sell: Vec<&MarketOrder> = mos.iter().filter(|m| m.time_ns == 43_955_242_600_000).collect();
    ensure!(sell.len() == 1, "fills at 43955.2426 formed {} orders", sell.len());
    ensure!(
        (sell[0].sign, sell[0].total_size, sell[0].n_fills) == (Side::Sell, 85, 2),
        "43955.2426 order {:?}",
        sell[0]
    );

    let mos = reconstruct_market_orders(&common::load_fixture("SPLT"));
    ensure!(mos.len() == 1, "split fills formed {} orders", mos.len());
    ensure!(
        (mos[0].sign, mos[0].total_size, mos[0].n_fills) == (Side::Buy, 100, 3),
        "split order {:?}",
        mos[0]
    );
    Ok(())
}

/// Reference lag-1 statistics recomputed from the mid path. Sums run over
/// integer half-units, which f64 holds exactly, and are converted to cents
/// at the end; the dispersion uses a two-pass variance.
fn naive_lag1(mos: &[MarketOrder], mode: ResponseMode) -> (f64, f64, f64) {
    let n = mos.len() as f64;
    let mut mids: Vec<f64> = mos.iter().map(|m| m.mid_before.half_units() as f64).collect();
    mids.push(mos.last().unwrap().mid_after_next.half_units() as f64);
    let moves: Vec<f64> = (0..mos.len()).map(|i| mids[i + 1] - mids[i]).collect();
    let resp: Vec<f64> = moves
        .iter()
        .zip(mos)
        .map(|(dm, m)| {
            let r = m.sign.sign() as f64 * dm;
            match mode {
                ResponseMode::Signed => r,
                ResponseMode::Clipped => r.max(0.0),
            }
        })
        .collect();
    let spread = mos.iter().map(|m| m.spread_before as f64).sum::<f64>() / n / 100.0;
    let r1 = resp.iter().sum::<f64>() / n;
    let excess = moves.iter().zip(&resp).map(|(d, r)| d * d - r * r).sum::<f64>() / n;
    let var = resp.iter().map(|r| (r - r1) * (r - r1)).sum::<f64>() / n;
    (spread, r1 / 200.0, (excess + var).sqrt() / 200.0)
}

fn algorithm_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let n = rng.random_range(1..=200);
        let mos = common::random_orders(&mut rng, n);
        for mode in [ResponseMode::Signed, ResponseMode::Clipped] {
            let got = lag1_response(&mos, mode).ok_or("no stats")?;
            let (s, r, sig) = naive_lag1(&mos, mode);
            let err = (got.avg_spread - s).abs().max((got.r1 - r).abs()).max((got.sigma_r - sig).abs());
            ensure!(err <= 1e-12, "case {case} {mode:?}: error {err:e}");
            ensure!(got.n_mo == n, "case {case}: n_mo {}", got.n_mo);
        }
    }
    Ok(())
}

fn imbalance_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..1000 {
        let n = rng.random_range(0..=300);
        let t = rng.random_range(1..=25);
        let mos = common::random_orders(&mut rng, n);
        let got = order_flow_imbalance(&mos, t, t).map_err(|e| e.to_string())?;
        ensure!(got.len() == n / t, "case {case}: {} windows, expected {}", got.len(), n / t);
        for (w, s) in got.iter().enumerate() {
            let start = w * t;
            let mut dv = 0i64;
            for m in &mos[start..start + t] {
                dv += if m.sign == Side::Buy { m.total_size as i64 } else { -(m.total_size as i64) };
            }
            let end_mid = if start + t < n { mos[start + t].mid_before } else { mos[n - 1].mid_after_next };
            let dm = end_mid.half_units() - mos[start].mid_before.half_units();
            ensure!(
                s.t_start == start && s.delta_v == dv && s.delta_mid == dm,
                "case {case} window {w}: {s:?} vs ({dv}, {dm})"
            );
        }
    }
    Ok(())
}

fn kyle_estimate(lambda: f64) -> Result<f64, String> {
    let world = generate_kyle_world(&KyleWorldConfig {
        lambda,
        noise_sd: 1.0,
        n_mo: 50_000,
        seed: 11,
        ..KyleWorldConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let samples = order_flow_imbalance(&world.orders, 10, 10).map_err(|e| e.to_string())?;
    Ok(kyle_lambda(&samples, LinearRegion::default()).map_err(|e| e.to_string())?.lambda)
}

fn kyle_recovery() -> Check {
    let hat = kyle_estimate(0.5)?;
    ensure!((hat - 0.5).abs() <= 0.02 * 0.5, "lambda-hat {hat} for 0.5");
    let hat = kyle_estimate(0.0)?;
    ensure!(hat.abs() < 0.005, "lambda-hat {hat} for 0");
    Ok(())
}

fn power_law_recovery() -> Check {
    let q: Vec<f64> = (0..200).map(|i| 10f64.powf(-4.0 + 3.5 * i as f64 / 199.0)).collect();
    let g: Vec<f64> = q.iter().map(|v| v.powf(0.5)).collect();
    let fit = power_law_fit(&q, &g).map_err(|e| e.to_string())?;
    ensure!((fit.exponent - 0.5).abs() <= 1e-9, "noiseless exponent {}", fit.exponent);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let noise: Normal<f64> = Normal::new(0.0, 0.3).unwrap();
    let q: Vec<f64> = (0..2000).map(|_| 10f64.powf(rng.random_range(-4.0..-0.5))).collect();
    let g: Vec<f64> = q.iter().map(|v| 0.2 * v.powf(0.6) * noise.sample(&mut rng).exp()).collect();
    let fit = power_law_fit(&q, &g).map_err(|e| e.to_string())?;
    ensure!((0.58..=0.62).contains(&fit.exponent), "noisy exponent {}", fit.exponent);
    Ok(())
}

fn rss(rows: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    rows.iter()
        .zip(y)
        .map(|(r, yi)| {
            let e = yi - beta[0] - r.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>();
            e * e
        })
        .sum()
}

/// Minimizes RSS over a grid of 9 points per coordinate, recentering on
/// the best point and halving the grid until the step is below 1e-10.
fn grid_search(rows: &[Vec<f64>], y: &[f64], dims: usize) -> Vec<f64> {
    let mut center = vec![0.0; dims];
    let mut step = 5.0;
    let mut trial = vec![0.0; dims];
    while step > 1e-10 {
        let mut best = (f64::INFINITY, center.clone());
        for code in 0..9usize.pow(dims as u32) {
            let mut c = code;
            for (d, t) in trial.iter_mut().enumerate() {
                *t = center[d] + ((c % 9) as f64 - 4.0) * step;
                c /= 9;
            }
            let v = rss(rows, y, &trial);
            if v < best.0 {
                best = (v, trial.clone());
            }
        }
        center = best.1;
        step /= 2.0;
    }
    center
}

fn random_problem(rng: &mut ChaCha8Rng, p: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let beta: Vec<f64> = (0..=p).map(|_| rng.random_range(-3.0..3.0)).collect();
    let noise = Normal::new(0.0, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
    let y = rows
        .iter()
        .map(|r| beta[0] + r.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>() + noise.sample(rng))
        .collect();
    (rows, y)
}

fn ols_correctness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..100 {
        let p = 1 + case % 2;
        let n = rng.random_range(15..60);
        let (rows, y) = random_problem(&mut rng, p, n);
        let m = ols_fit(&rows, &y).map_err(|e| e.to_string())?;
        let grid = grid_search(&rows, &y, p + 1);
        let err = m.beta().iter().zip(&grid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(err <= 1e-6, "case {case}: beta differs from grid minimizer by {err:e}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for case in 0..100 {
        let p = rng.random_range(1..=5);
        let n = rng.random_range(20..200);
        let (rows, y) = random_problem(&mut rng, p, n);
        let m = ols_fit(&rows, &y).map_err(|e| e.to_string())?;
        let resid: Vec<f64> = rows.iter().zip(&y).map(|(r, yi)| yi - m.predict(r)).collect();
        let e_norm = resid.iter().map(|e| e * e).sum::<f64>().sqrt();
        for j in 0..=p {
            let col: Vec<f64> = rows.iter().map(|r| if j == 0 { 1.0 } else { r[j - 1] }).collect();
            let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            let c_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            ensure!(
                dot.abs() <= 1e-8 * c_norm * e_norm,
                "case {case}: residual not orthogonal to column {j}"
            );
        }
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
        let ess: f64 = rows.iter().map(|r| (m.predict(r) - y_mean).powi(2)).sum();
        ensure!(
            (tss - m.rss - ess).abs() <= 1e-8 * tss,
            "case {case}: TSS {tss} != RSS {} + ESS {ess}",
            m.rss
        );
    }
    Ok(())
}

fn cv_laws() -> Check {
    for n in 10..=200 {
        for k in [2, 5, 10] {
            let seed = (n * 31 + k) as u64;
            let folds = kfold_indices(n, k, seed).map_err(|e| e.to_string())?;
            let mut seen = vec![false; n];
            for f in &folds {
                for &i in f {
                    ensure!(!seen[i], "n={n} k={k}: index {i} in two folds");
                    seen[i] = true;
                }
            }
            ensure!(seen.iter().all(|&s| s), "n={n} k={k}: folds not exhaustive");
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            let spread = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            ensure!(spread <= 1, "n={n} k={k}: fold sizes {sizes:?}");

            let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            let r = kfold_cv(&x, &y, k, ModelKind::Ols, seed).map_err(|e| e.to_string())?;
            ensure!(r.fold_mse.iter().all(|&m| m == 0.0), "n={n} k={k}: fold MSE {:?}", r.fold_mse);
        }
    }
    Ok(())
}

fn sse(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

fn tree_laws() -> Check {
    let x: Vec<f64> = (-10..10).map(|i| i as f64 * 0.5).collect();
    let y: Vec<f64> = x.iter().map(|&v| if v < 0.0 { 1.0 } else { 5.0 }).collect();
    let params = TreeParams {
        max_depth: 5,
        min_samples_leaf: 1,
    };
    let t = tree_fit(&x, &y, params).map_err(|e| e.to_string())?;
    ensure!(t.depth() == 1, "plateau depth {}", t.depth());
    ensure!(x.iter().zip(&y).all(|(a, b)| t.predict_one(*a) == *b), "plateau not fit exactly");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..300 {
        let n = rng.random_range(2..=50);
        let discrete = rng.random::<bool>();
        let x: Vec<f64> = (0..n)
            .map(|_| if discrete { rng.random_range(0..12) as f64 } else { rng.random_range(-3.0..3.0) })
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let params = TreeParams {
            max_depth: rng.random_range(1..=6),
            min_samples_leaf: rng.random_range(1..=5),
        };
        if n < params.min_samples_leaf {
            continue;
        }
        let t = tree_fit(&x, &y, params).map_err(|e| e.to_string())?;

        // every leaf value is the mean of the training samples routed to it
        for (id, node) in t.nodes().iter().enumerate() {
            if let Node::Leaf { value, count } = node {
                let routed: Vec<f64> = (0..n).filter(|&i| t.leaf_index(x[i]) == id).map(|i| y[i]).collect();
                ensure!(routed.len() == *count, "case {case}: leaf {id} count");
                let mean = routed.iter().sum::<f64>() / routed.len() as f64;
                ensure!(mean == *value, "case {case}: leaf {id} value {value} vs routed mean {mean}");
            }
        }

        // the root split matches an exhaustive search over thresholds
        let mut xs = x.clone();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut best = f64::INFINITY;
        for w in xs.windows(2) {
            let thr = (w[0] + w[1]) / 2.0;
            let l: Vec<f64> = (0..n).filter(|&i| x[i] <= thr).map(|i| y[i]).collect();
            let r: Vec<f64> = (0..n).filter(|&i| x[i] > thr).map(|i| y[i]).collect();
            if l.len() >= params.min_samples_leaf && r.len() >= params.min_samples_leaf {
                best = best.min(sse(&l) + sse(&r));
            }
        }
        let mut sorted: Vec<usize> = (0..n).collect();
        sorted.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        let greedy = best_split(&x, &y, &sorted, params.min_samples_leaf);
        match (greedy, best.is_finite()) {
            (None, false) => {}
            (Some(s), true) => {
                let l: Vec<f64> = (0..n).filter(|&i| x[i] <= s.threshold).map(|i| y[i]).collect();
                let r: Vec<f64> = (0..n).filter(|&i| x[i] > s.threshold).map(|i| y[i]).collect();
                let got = sse(&l) + sse(&r);
                ensure!(
                    got <= best + 1e-9 * (1.0 + best),
                    "case {case}: greedy root SSE {got} > exhaustive {best}"
                );
                let pure = y.iter().all(|v| *v == y[0]);
                if !pure {
                    ensure!(t.root_threshold() == Some(s.threshold), "case {case}: root threshold mismatch");
                }
            }
            (g, _) => return Err(format!("case {case}: greedy {g:?} vs exhaustive {best}")),
        }
    }
    Ok(())
}

fn emit(stream: &MergedStream) -> (Vec<u8>, Vec<u8>) {
    let mut m = Vec::new();
    write_message_file(&mut m, stream.events(), 9).unwrap();
    let mut b = Vec::new();
    write_orderbook_file(&mut b, stream.books()).unwrap();
    (m, b)
}

fn zi_round_trip() -> Check {
    for seed in 0..100 {
        let cfg = ZiConfig {
            session: SessionWindow::from_clock("10:30", "11:30").unwrap(),
            depth: 1 + (seed as usize % 3) * 2,
            seed,
            ..ZiConfig::default()
        };
        let s = generate_zero_intelligence(&cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let v = validate_stream(&s);
        ensure!(v.is_empty(), "seed {seed}: {} violations, first {:?}", v.len(), v[0]);
        let (m, b) = emit(&s);
        let events = parse_message_file(&m[..]).map_err(|e| format!("seed {seed}: {e}"))?;
        let books = parse_orderbook_file(&b[..], cfg.depth).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(events == s.events() && books == s.books(), "seed {seed}: re-parse differs");
        let back = merge_streams(events, books, s.meta().clone()).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(validate_stream(&back).is_empty(), "seed {seed}: re-parsed stream has violations");
        ensure!(emit(&back) == (m, b), "seed {seed}: re-emission differs");
    }
    Ok(())
}

fn bars_conservation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let n = rng.random_range(1..400);
        let trades = common::random_trades(&mut rng, n);
        let total: u64 = trades.iter().map(|t| t.size).sum();
        let kinds = [
            BarKind::Time(rng.random_range(1..120) * 1_000_000_000),
            BarKind::Tick(rng.random_range(1..30)),
            BarKind::Volume(rng.random_range(1..5000)),
            BarKind::Dollar(rng.random_range(1..5000) * 1_000_000),
        ];
        for kind in kinds {
            let bars = sample_bars(&trades, kind).map_err(|e| e.to_string())?;
            ensure!(
                bars.iter().map(|b| b.traded_volume).sum::<u64>() == total,
                "case {case} {kind:?}: volume not conserved"
            );
            let mut at = 0;
            for b in &bars {
                let slice = &trades[at..at + b.n_events];
                ensure!(
                    b.n_events > 0
                        && b.start_time == slice[0].time_ns
                        && b.end_time == slice[b.n_events - 1].time_ns
                        && b.traded_volume == slice.iter().map(|t| t.size).sum::<u64>()
                        && b.traded_dollar == slice.iter().map(|t| t.notional).sum::<i64>(),
                    "case {case} {kind:?}: bar does not cover a contiguous slice"
                );
                at += b.n_events;
            }
            ensure!(at == n, "case {case} {kind:?}: bars cover {at} of {n} trades");
        }

        let price = rng.random_range(100_000..2_000_000i64);
        let flat: Vec<Trade> = trades
            .iter()
            .map(|t| Trade {
                notional: price * t.size as i64,
                mid: Mid::from_price(price),
                ..*t
            })
            .collect();
        let v = rng.random_range(1..3000u64);
        let by_volume = sample_bars(&flat, BarKind::Volume(v)).map_err(|e| e.to_string())?;
        let by_dollar = sample_bars(&flat, BarKind::Dollar(v as i64 * price)).map_err(|e| e.to_string())?;
        ensure!(by_volume == by_dollar, "case {case}: dollar and volume bars differ at constant price");
    }
    Ok(())
}

fn performance() -> Check {
    const EVENTS: usize = 1_000_000;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (message, orderbook, input_bytes) = {
        let cfg = ZiConfig {
            lo_rate: 40.0,
            mo_rate: 8.0,
            cancel_rate: 25.0,
            session: SessionWindow::from_clock("09:30", "16:00").unwrap(),
            seed: 2015,
            ..ZiConfig::default()
        };
        let day = generate_zero_intelligence(&cfg).map_err(|e| e.to_string())?;
        ensure!(day.len() >= EVENTS, "generator produced only {} events", day.len());
        let (mut events, mut books, initial, meta) = day.into_parts();
        events.truncate(EVENTS);
        books.truncate(EVENTS);
        let day = MergedStream::from_parts_unchecked(events, books, initial, meta);
        let (m, b) = write_lobster_files(&day, dir.path(), 9).map_err(|e| e.to_string())?;
        let size = std::fs::metadata(&m).unwrap().len() + std::fs::metadata(&b).unwrap().len();
        (m, b, size as usize)
    };

    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let start = Instant::now();
    let stream = load_stream(
        &message,
        &orderbook,
        StreamMeta {
            ticker: "ZISIM".into(),
            date: "2015-01-02".into(),
            depth: 1,
        },
    )
    .map_err(|e| e.to_string())?;
    let n_events = stream.len();
    let stream = clip_session(stream, SessionWindow::default());
    let mos = reconstruct_market_orders(&stream);
    let stats = lag1_response(&mos, ResponseMode::Signed).ok_or("no market orders")?;
    let elapsed = start.elapsed();
    let peak = PEAK.load(Ordering::Relaxed) - base;
    drop(stream);

    ensure!(n_events == EVENTS, "loaded {n_events} events");
    ensure!(stats.n_mo > 0, "no market orders");
    ensure!(elapsed <= Duration::from_secs(5), "pipeline took {elapsed:.2?}");
    ensure!(
        peak < 2 * input_bytes,
        "peak heap {} MB vs input {} MB",
        peak >> 20,
        input_bytes >> 20
    );
    println!(
        "     pipeline {elapsed:.2?}, peak heap {:.1} MB for {:.1} MB of input, {} market orders",
        peak as f64 / 1048576.0,
        input_bytes as f64 / 1048576.0,
        stats.n_mo
    );
    Ok(())
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "fixture exactness", budget: secs(1), run: fixture_exactness },
        Criterion { name: "lag-1 response oracle equivalence", budget: secs(10), run: algorithm_oracle },
        Criterion { name: "order-flow imbalance oracle", budget: secs(5), run: imbalance_oracle },
        Criterion { name: "Kyle lambda recovery", budget: secs(5), run: kyle_recovery },
        Criterion { name: "power-law exponent recovery", budget: secs(5), run: power_law_recovery },
        Criterion { name: "OLS correctness", budget: secs(10), run: ols_correctness },
        Criterion { name: "cross-validation laws", budget: secs(5), run: cv_laws },
        Criterion { name: "regression tree laws", budget: secs(10), run: tree_laws },
        Criterion { name: "zero-intelligence round trip", budget: secs(30), run: zi_round_trip },
        Criterion { name: "bars conservation", budget: secs(5), run: bars_conservation },
        Criterion { name: "performance and memory", budget: secs(60), run: performance },
    ];

    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if took > c.budget {
                Err(format!("over the {:?} budget", c.budget))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("PASS  {:<36} {took:>10.2?}", c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<36} {took:>10.2?}  {why}", c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
