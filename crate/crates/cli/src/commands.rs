use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use lobimpact::bars::{sample_bars, trades_from_orders, trades_from_stream, BarKind};
use lobimpact::impact::{
    aggregate_impact_curve, average_daily, filter_imbalance_outliers, lag1_response, order_flow_imbalance,
    volume_conditioned_response, ImbalanceSample, ResponseMode,
};
use lobimpact::ingest::{load_stream, validate_stream, EventType, MergedStream, StreamMeta};
use lobimpact::preprocess::{clip_session, normalize_by_day, reconstruct_market_orders, MarketOrder, SessionWindow};
use lobimpact::regress::{
    evaluate_1d, kfold_cv, kyle_lambda_xy, t_statistics, train_test_split, FitMetrics, LinearRegion, ModelKind,
    Regressor, TreeParams,
};
use lobimpact::stats::{correlation, mean_std};
use lobimpact::synth::{embed_kyle_world, generate_kyle_world, generate_zero_intelligence, KyleWorldConfig, ZiConfig};
use lobimpact::ingest::{write_message_file, write_orderbook_file, NANOS_PER_SEC};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::inputs::{digest_days, discover, DayFiles, InputDigest};
use crate::output::{num, opt, Outputs};

/// Staged outputs plus the inputs they were computed from.
pub struct Run {
    pub outputs: Outputs,
    pub inputs: Vec<InputDigest>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot start worker threads")
}

fn session(s: &Session) -> Result<SessionWindow> {
    Ok(SessionWindow::from_clock(&s.session_start, &s.session_end)?)
}

fn load(day: &DayFiles) -> Result<MergedStream> {
    let meta = StreamMeta {
        ticker: day.ticker.clone(),
        date: day.date.clone(),
        depth: day.depth,
    };
    load_stream(&day.message, &day.orderbook, meta).with_context(|| format!("{}", day.message.display()))
}

/// Loads days in parallel, keeping input order.
fn per_day<T: Send>(days: &[DayFiles], jobs: usize, f: impl Fn(&DayFiles) -> Result<T> + Sync) -> Result<Vec<T>> {
    pool(jobs)?.install(|| days.par_iter().map(&f).collect())
}

struct Day {
    ticker: String,
    date: String,
    orders: Vec<MarketOrder>,
}

fn market_orders(days: &[DayFiles], window: SessionWindow, jobs: usize) -> Result<Vec<Day>> {
    per_day(days, jobs, |d| {
        let stream = clip_session(load(d)?, window);
        Ok(Day {
            ticker: d.ticker.clone(),
            date: d.date.clone(),
            orders: reconstruct_market_orders(&stream),
        })
    })
}

/// Days grouped by ticker, in ticker order.
fn by_ticker(days: &[Day]) -> BTreeMap<&str, Vec<&Day>> {
    let mut m: BTreeMap<&str, Vec<&Day>> = BTreeMap::new();
    for d in days {
        m.entry(d.ticker.as_str()).or_default().push(d);
    }
    m
}

pub fn ingest(a: &IngestArgs) -> Result<Run> {
    let days = discover(&a.inputs)?;
    let rows = per_day(&days, a.common.jobs, |d| {
        let s = load(d)?;
        let mut counts = [0usize; 7];
        for e in s.events() {
            counts[e.event_type.code() as usize - 1] += 1;
        }
        let violations = validate_stream(&s).len();
        let n_mo = reconstruct_market_orders(&s).len();
        let first = s.events().first().map(|e| e.time_ns).unwrap_or(0);
        let last = s.events().last().map(|e| e.time_ns).unwrap_or(0);
        let mut row = vec![d.ticker.clone(), d.date.clone(), d.depth.to_string(), s.len().to_string()];
        row.extend(counts.iter().map(|c| c.to_string()));
        row.extend([
            n_mo.to_string(),
            violations.to_string(),
            num(first as f64 / NANOS_PER_SEC as f64),
            num(last as f64 / NANOS_PER_SEC as f64),
        ]);
        Ok(row)
    })?;
    let mut outputs = Outputs::new(a.common.format);
    outputs.table(
        "ingest",
        &[
            "ticker", "date", "depth", "n_events", "n_submission", "n_cancellation", "n_deletion", "n_exec_visible",
            "n_exec_hidden", "n_cross", "n_halt", "n_mo", "n_violations", "first_time", "last_time",
        ],
        &rows,
    );
    debug_assert_eq!(EventType::Halt.code(), 7);
    Ok(Run {
        outputs,
        inputs: digest_days(&days)?,
    })
}

#[derive(Serialize)]
struct TickerImpact {
    ticker: String,
    mode: ResponseMode,
    days: usize,
    avg_spread: f64,
    r1: f64,
    sigma_r: f64,
    n_mo_per_day: f64,
}

pub fn impact(a: &ImpactArgs) -> Result<Run> {
    let files = discover(&a.inputs)?;
    let mode: ResponseMode = a.mode.into();
    let days = market_orders(&files, session(&a.session)?, a.common.jobs)?;

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut curve_rows = Vec::new();
    for (ticker, tdays) in by_ticker(&days) {
        let mut stats = Vec::new();
        for d in &tdays {
            match lag1_response(&d.orders, mode) {
                Some(s) => {
                    rows.push(vec![
                        d.ticker.clone(),
                        d.date.clone(),
                        num(s.avg_spread),
                        num(s.r1),
                        num(s.sigma_r),
                        s.n_mo.to_string(),
                    ]);
                    stats.push(s);
                }
                None => log::warn!("{} {}: no market orders in session", d.ticker, d.date),
            }
        }
        if let Some(avg) = average_daily(&stats) {
            summary.push(TickerImpact {
                ticker: ticker.to_string(),
                mode,
                days: avg.days,
                avg_spread: avg.avg_spread,
                r1: avg.r1,
                sigma_r: avg.sigma_r,
                n_mo_per_day: avg.n_mo_per_day,
            });
        }
        let day_orders: Vec<Vec<MarketOrder>> = tdays.iter().map(|d| d.orders.clone()).collect();
        let normalized: Vec<_> = normalize_by_day(&day_orders).into_iter().flatten().collect();
        for p in volume_conditioned_response(&normalized, mode).points {
            curve_rows.push(vec![
                ticker.to_string(),
                num(p.lo),
                num(p.hi),
                num(p.center),
                num(p.mean_x),
                num(p.mean_y),
                p.count.to_string(),
            ]);
        }
    }
    let mut outputs = Outputs::new(a.common.format);
    outputs.table("impact", &["ticker", "date", "avg_spread", "r1", "sigma_r", "n_mo"], &rows);
    outputs.table(
        "volume_response",
        &["ticker", "lo", "hi", "center", "mean_volume", "mean_response", "count"],
        &curve_rows,
    );
    outputs.json("impact_summary", &summary)?;
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}

/// Imbalance samples of one ticker, tagged with their day.
struct TickerSamples {
    ticker: String,
    samples: Vec<(String, ImbalanceSample)>,
    removed: usize,
}

fn imbalance_samples(days: &[Day], opts: &Imbalance) -> Result<Vec<TickerSamples>> {
    let stride = opts.stride.unwrap_or(opts.window);
    let mut out = Vec::new();
    for (ticker, tdays) in by_ticker(days) {
        let mut tagged = Vec::new();
        for d in tdays {
            for s in order_flow_imbalance(&d.orders, opts.window, stride)? {
                tagged.push((d.date.clone(), s));
            }
        }
        let before = tagged.len();
        if opts.outlier_k > 0.0 && tagged.len() >= 2 {
            let kept = filter_imbalance_outliers(&tagged.iter().map(|t| t.1).collect::<Vec<_>>(), opts.outlier_k)?;
            // filtering preserves order, so walk both lists together
            let mut k = kept.into_iter().peekable();
            tagged.retain(|(_, s)| {
                if k.peek() == Some(s) {
                    k.next();
                    true
                } else {
                    false
                }
            });
        }
        out.push(TickerSamples {
            ticker: ticker.to_string(),
            removed: before - tagged.len(),
            samples: tagged,
        });
    }
    Ok(out)
}

fn xy(t: &TickerSamples) -> (Vec<f64>, Vec<f64>) {
    t.samples.iter().map(|(_, s)| (s.delta_v as f64, s.delta_m_cents())).unzip()
}

#[derive(Serialize)]
struct ImbalanceSummary {
    ticker: String,
    window: usize,
    stride: usize,
    n_samples: usize,
    n_removed: usize,
    mean_delta_v: f64,
    std_delta_v: f64,
    mean_delta_m: f64,
    std_delta_m: f64,
    correlation: Option<f64>,
}

pub fn imbalance(a: &ImbalanceArgs) -> Result<Run> {
    let files = discover(&a.inputs)?;
    let days = market_orders(&files, session(&a.session)?, a.common.jobs)?;
    let per_ticker = imbalance_samples(&days, &a.imbalance)?;

    let mut sample_rows = Vec::new();
    let mut curve_rows = Vec::new();
    let mut summary = Vec::new();
    for t in &per_ticker {
        for (date, s) in &t.samples {
            sample_rows.push(vec![
                t.ticker.clone(),
                date.clone(),
                s.t_start.to_string(),
                s.delta_v.to_string(),
                num(s.delta_m_cents()),
            ]);
        }
        let (x, y) = xy(t);
        if !t.samples.is_empty() {
            let samples: Vec<ImbalanceSample> = t.samples.iter().map(|p| p.1).collect();
            for p in aggregate_impact_curve(&samples, a.bins)?.points {
                curve_rows.push(vec![
                    t.ticker.clone(),
                    num(p.lo),
                    num(p.hi),
                    num(p.center),
                    num(p.mean_x),
                    num(p.mean_y),
                    p.count.to_string(),
                ]);
            }
        }
        let (mv, sv) = mean_std(&x);
        let (mm, sm) = mean_std(&y);
        summary.push(ImbalanceSummary {
            ticker: t.ticker.clone(),
            window: a.imbalance.window,
            stride: a.imbalance.stride.unwrap_or(a.imbalance.window),
            n_samples: t.samples.len(),
            n_removed: t.removed,
            mean_delta_v: mv,
            std_delta_v: sv,
            mean_delta_m: mm,
            std_delta_m: sm,
            correlation: correlation(&x, &y),
        });
    }
    let mut outputs = Outputs::new(a.common.format);
    outputs.table("imbalance", &["ticker", "date", "t_start", "delta_v", "delta_m"], &sample_rows);
    outputs.table(
        "aggregate_impact",
        &["ticker", "lo", "hi", "center", "mean_delta_v", "mean_delta_m", "count"],
        &curve_rows,
    );
    outputs.json("imbalance_summary", &summary)?;
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}

fn bar_kind(kind: BarKindArg, threshold: f64) -> Result<BarKind> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        bail!("--threshold must be positive");
    }
    let whole = |what: &str| -> Result<u64> {
        if threshold.fract() != 0.0 {
            bail!("--threshold for {what} bars must be a whole number");
        }
        Ok(threshold as u64)
    };
    Ok(match kind {
        BarKindArg::Time => BarKind::Time((threshold * NANOS_PER_SEC as f64).round() as i64),
        BarKindArg::Tick => BarKind::Tick(whole("tick")?),
        BarKindArg::Volume => BarKind::Volume(whole("volume")?),
        BarKindArg::Dollar => BarKind::Dollar((threshold * 10_000.0).round() as i64),
    })
}

pub fn bars(a: &BarsArgs) -> Result<Run> {
    let kind = bar_kind(a.kind, a.threshold)?;
    let files = discover(&a.inputs)?;
    let window = session(&a.session)?;
    let per_day_rows = per_day(&files, a.common.jobs, |d| {
        let stream = clip_session(load(d)?, window);
        let trades = match a.source {
            TradeSource::Executions => trades_from_stream(&stream),
            TradeSource::Orders => trades_from_orders(&reconstruct_market_orders(&stream)),
        };
        let dollars = |units: f64| num(units / 10_000.0);
        Ok(sample_bars(&trades, kind)?
            .into_iter()
            .map(|b| {
                vec![
                    d.ticker.clone(),
                    d.date.clone(),
                    num(b.start_time as f64 / NANOS_PER_SEC as f64),
                    num(b.end_time as f64 / NANOS_PER_SEC as f64),
                    dollars(b.open.units()),
                    dollars(b.high.units()),
                    dollars(b.low.units()),
                    dollars(b.close.units()),
                    b.traded_volume.to_string(),
                    dollars(b.traded_dollar as f64),
                    b.n_events.to_string(),
                    dollars(b.vwap),
                    b.partial.to_string(),
                ]
            })
            .collect::<Vec<_>>())
    })?;
    let rows: Vec<Vec<String>> = per_day_rows.into_iter().flatten().collect();
    let mut outputs = Outputs::new(a.common.format);
    outputs.table(
        "bars",
        &[
            "ticker", "date", "start_time", "end_time", "open", "high", "low", "close", "volume", "dollar", "n_events",
            "vwap", "partial",
        ],
        &rows,
    );
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

#[derive(Serialize)]
struct ModelSummary {
    ticker: String,
    model: ModelKind,
    n_train: usize,
    n_test: usize,
    train: FitMetrics,
    test: FitMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_statistics: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_leaves: Option<usize>,
    kyle_lambda: Option<f64>,
    kyle_n_in_region: Option<usize>,
}

struct Holdout {
    summary: ModelSummary,
    predictions: Vec<Vec<String>>,
}

fn holdout(
    ticker: &str,
    x: &[f64],
    y: &[f64],
    model: ModelKind,
    region: LinearRegion,
    test_fraction: f64,
    seed: u64,
) -> Result<Holdout> {
    let (train, test) = train_test_split(x.len(), test_fraction, seed)?;
    let (xtr, ytr) = (pick(x, &train), pick(y, &train));
    let (xte, yte) = (pick(x, &test), pick(y, &test));
    let (fitted, intercept, slope, tstats, n_leaves): (Box<dyn Regressor>, _, _, _, _) = match model {
        ModelKind::Ols => {
            let m = lobimpact::regress::ols_fit_1d(&xtr, &ytr)?;
            let t = t_statistics(&m);
            (Box::new(m.clone()), Some(m.intercept), Some(m.slope()), Some(t), None)
        }
        ModelKind::Tree(p) => {
            let t = lobimpact::regress::tree_fit(&xtr, &ytr, p)?;
            let leaves = t.n_leaves();
            (Box::new(t), None, None, None, Some(leaves))
        }
    };
    let kyle = match kyle_lambda_xy(x, y, region) {
        Ok(k) => Some(k),
        Err(e) => {
            log::warn!("{ticker}: Kyle lambda unavailable: {e}");
            None
        }
    };
    let mut predictions = Vec::with_capacity(x.len());
    for (set, xs, ys) in [("train", &xtr, &ytr), ("test", &xte, &yte)] {
        for (xi, yi) in xs.iter().zip(ys.iter()) {
            predictions.push(vec![
                ticker.to_string(),
                set.to_string(),
                num(*xi),
                num(*yi),
                num(fitted.predict(&[*xi])),
            ]);
        }
    }
    Ok(Holdout {
        summary: ModelSummary {
            ticker: ticker.to_string(),
            model,
            n_train: train.len(),
            n_test: test.len(),
            train: evaluate_1d(fitted.as_ref(), &xtr, &ytr)?,
            test: evaluate_1d(fitted.as_ref(), &xte, &yte)?,
            intercept,
            slope,
            t_statistics: tstats,
            n_leaves,
            kyle_lambda: kyle.as_ref().map(|k| k.lambda),
            kyle_n_in_region: kyle.as_ref().map(|k| k.n_in_region),
        },
        predictions,
    })
}

pub fn fit(a: &FitArgs) -> Result<Run> {
    let files = discover(&a.inputs)?;
    let days = market_orders(&files, session(&a.session)?, a.common.jobs)?;
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for t in imbalance_samples(&days, &a.imbalance)? {
        let (x, y) = xy(&t);
        let h = holdout(&t.ticker, &x, &y, a.model.kind(), a.region.region(), a.test_fraction, a.seed)
            .with_context(|| t.ticker.clone())?;
        summaries.push(h.summary);
        rows.extend(h.predictions);
    }
    let mut outputs = Outputs::new(a.common.format);
    outputs.json("fit", &summaries)?;
    outputs.table("predictions", &["ticker", "set", "delta_v", "delta_m", "predicted"], &rows);
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}

fn model_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Ols => "ols",
        ModelKind::Tree(_) => "tree",
    }
}

pub fn cv(a: &CvArgs) -> Result<Run> {
    let files = discover(&a.inputs)?;
    let days = market_orders(&files, session(&a.session)?, a.common.jobs)?;
    let model = a.model.kind();
    let mut folds = Vec::new();
    let mut summary = Vec::new();
    for t in imbalance_samples(&days, &a.imbalance)? {
        let (x, y) = xy(&t);
        let r = kfold_cv(&x, &y, a.k, model, a.seed).with_context(|| t.ticker.clone())?;
        for f in 0..r.k {
            folds.push(vec![
                t.ticker.clone(),
                model_name(model).to_string(),
                (f + 1).to_string(),
                r.fold_sizes[f].to_string(),
                num(r.fold_mse[f]),
                opt(r.fold_r2[f]),
            ]);
        }
        summary.push(vec![
            t.ticker.clone(),
            model_name(model).to_string(),
            r.k.to_string(),
            x.len().to_string(),
            num(r.mean_mse),
            num(r.std_mse),
            opt(r.mean_r2),
            opt(r.std_r2),
        ]);
    }
    let mut outputs = Outputs::new(a.common.format);
    outputs.table("cv_folds", &["ticker", "model", "fold", "size", "mse", "r2"], &folds);
    outputs.table(
        "cv_summary",
        &["ticker", "model", "k", "n", "mean_mse", "std_mse", "mean_r2", "std_r2"],
        &summary,
    );
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}

pub fn synth(a: &SynthArgs) -> Result<Run> {
    let window = SessionWindow::from_clock(&a.start, &a.end)?;
    let stream = match a.generator {
        Generator::Zi => generate_zero_intelligence(&ZiConfig {
            lo_rate: a.lo_rate,
            mo_rate: a.mo_rate,
            cancel_rate: a.cancel_rate,
            depth: a.depth,
            session: window,
            seed: a.seed,
            ticker: a.ticker.clone(),
            date: a.date.clone(),
            ..ZiConfig::default()
        })?,
        Generator::Kyle => {
            if a.n_mo == 0 {
                bail!("--n-mo must be positive");
            }
            let spacing = (window.end_ns() - window.start_ns()) / a.n_mo as i64;
            let world = generate_kyle_world(&KyleWorldConfig {
                lambda: a.lambda,
                noise_sd: a.noise_sd,
                n_mo: a.n_mo,
                seed: a.seed,
                start_ns: window.start_ns(),
                spacing_ns: spacing,
                ..KyleWorldConfig::default()
            })?;
            embed_kyle_world(&world, &a.ticker, &a.date)
        }
    };
    let stem = format!("{}_{}", a.ticker, a.date);
    let mut message = Vec::new();
    write_message_file(&mut message, stream.events(), a.decimals)?;
    let mut orderbook = Vec::new();
    write_orderbook_file(&mut orderbook, stream.books())?;
    let mut outputs = Outputs::new(a.common.format);
    outputs.raw(&format!("{stem}_message.csv"), message);
    outputs.raw(&format!("{stem}_orderbook.csv"), orderbook);
    Ok(Run {
        outputs,
        inputs: Vec::new(),
    })
}

pub fn reproduce(a: &ReproduceArgs) -> Result<Run> {
    let files = discover(&a.inputs)?;
    let mode: ResponseMode = a.mode.into();
    let days = market_orders(&files, session(&a.session)?, a.common.jobs)?;

    let mut table6 = Vec::new();
    for (ticker, tdays) in by_ticker(&days) {
        let stats: Vec<_> = tdays.iter().filter_map(|d| lag1_response(&d.orders, mode)).collect();
        let avg = average_daily(&stats).ok_or_else(|| anyhow!("{ticker}: no market orders in any session"))?;
        table6.push(vec![
            ticker.to_string(),
            num(avg.avg_spread),
            num(avg.r1),
            num(avg.sigma_r),
            num(avg.n_mo_per_day),
            avg.days.to_string(),
        ]);
    }

    let tree = TreeParams {
        max_depth: a.max_depth,
        min_samples_leaf: a.min_samples_leaf,
    };
    let mut models = Vec::new();
    for t in imbalance_samples(&days, &a.imbalance)? {
        let (x, y) = xy(&t);
        let ctx = || t.ticker.clone();
        let ols = holdout(&t.ticker, &x, &y, ModelKind::Ols, a.region.region(), a.test_fraction, a.seed).with_context(ctx)?;
        let dt = holdout(&t.ticker, &x, &y, ModelKind::Tree(tree), a.region.region(), a.test_fraction, a.seed)
            .with_context(ctx)?;
        let ols_cv = kfold_cv(&x, &y, a.k, ModelKind::Ols, a.seed).with_context(ctx)?;
        let tree_cv = kfold_cv(&x, &y, a.k, ModelKind::Tree(tree), a.seed).with_context(ctx)?;
        models.push(vec![
            t.ticker.clone(),
            x.len().to_string(),
            t.removed.to_string(),
            opt(correlation(&x, &y)),
            opt(ols.summary.kyle_lambda),
            num(ols.summary.test.mse),
            num(dt.summary.test.mse),
            num(ols_cv.mean_mse),
            num(ols_cv.std_mse),
            num(tree_cv.mean_mse),
            num(tree_cv.std_mse),
        ]);
    }

    let mut outputs = Outputs::new(a.common.format);
    outputs.table("table6", &["ticker", "avg_spread", "r1", "sigma_r", "n_mo", "days"], &table6);
    outputs.table(
        "models",
        &[
            "ticker", "n_samples", "n_removed", "correlation", "kyle_lambda", "ols_test_mse", "tree_test_mse",
            "ols_cv_mean_mse", "ols_cv_std_mse", "tree_cv_mean_mse", "tree_cv_std_mse",
        ],
        &models,
    );
    Ok(Run {
        outputs,
        inputs: digest_days(&files)?,
    })
}
