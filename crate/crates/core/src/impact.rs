//! Quote-derived prices and market-impact response functions.
//!
//! All estimators work on reconstructed [`MarketOrder`]s. Mid-price moves
//! are summed in integer half-units and only converted to dollar cents at
//! the end, so per-day statistics are exact up to the final division.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::BookSnapshot;
use crate::preprocess::{outlier_mask, MarketOrder, NormalizedOrder};
use crate::price::{half_units_to_cents, units_to_cents, Mid, UNITS_PER_CENT};

pub fn mid_price(book: &BookSnapshot) -> Mid {
    book.mid()
}

/// Level-1 micro-price in 1e-4 dollar units: each quote weighted by the
/// volume on the opposite side, `(a*Vb + b*Va) / (Va + Vb)`.
pub fn micro_price(book: &BookSnapshot) -> f64 {
    let (a, b) = (book.best_ask() as f64, book.best_bid() as f64);
    let (va, vb) = (book.best_ask_volume() as f64, book.best_bid_volume() as f64);
    (a * vb + b * va) / (va + vb)
}

/// How a single order's response enters the lag-1 average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResponseMode {
    /// `eps * (m_{t+1} - m_t)`.
    Signed,
    /// `max(0, eps * (m_{t+1} - m_t))`.
    Clipped,
}

impl ResponseMode {
    fn apply(self, signed_move: i64) -> i64 {
        match self {
            ResponseMode::Signed => signed_move,
            ResponseMode::Clipped => signed_move.max(0),
        }
    }
}

/// Response of one market order in dollar cents.
pub fn order_response_cents(mo: &MarketOrder, mode: ResponseMode) -> f64 {
    half_units_to_cents(mode.apply(mo.signed_move_half_units()))
}

/// Lag-1 response statistics for one day, in dollar cents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseStats {
    pub avg_spread: f64,
    pub r1: f64,
    pub sigma_r: f64,
    pub n_mo: usize,
    pub mode: ResponseMode,
}

/// Running sums behind [`ResponseStats`]. Accumulators from disjoint
/// chunks combine with [`ResponseAccumulator::merge`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResponseAccumulator {
    n: usize,
    spread_sum: i64,
    response_sum: i64,
    square_sum: i128,
}

impl ResponseAccumulator {
    pub fn push(&mut self, mo: &MarketOrder, mode: ResponseMode) {
        let dm = mo.mid_move_half_units();
        self.n += 1;
        self.spread_sum += mo.spread_before;
        self.response_sum += mode.apply(mo.sign.sign() * dm);
        self.square_sum += dm as i128 * dm as i128;
    }

    pub fn merge(&mut self, other: &ResponseAccumulator) {
        self.n += other.n;
        self.spread_sum += other.spread_sum;
        self.response_sum += other.response_sum;
        self.square_sum += other.square_sum;
    }

    /// `None` for an empty day.
    pub fn finish(&self, mode: ResponseMode) -> Option<ResponseStats> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        let cents_per_half = (2 * UNITS_PER_CENT) as f64;
        let r1 = self.response_sum as f64 / n / cents_per_half;
        // n^2 (V - R^2) in squared half-units, exact in integers
        let excess = self.n as i128 * self.square_sum - self.response_sum as i128 * self.response_sum as i128;
        Some(ResponseStats {
            avg_spread: units_to_cents(self.spread_sum) / n,
            r1,
            sigma_r: (excess.max(0) as f64).sqrt() / n / cents_per_half,
            n_mo: self.n,
            mode,
        })
    }
}

/// Average pre-trade spread, lag-1 response R(1) and the dispersion
/// `sqrt(V(1) - R(1)^2)` where `V(1)` is the mean squared mid move between
/// consecutive orders. Returns `None` when there are no orders.
pub fn lag1_response(mos: &[MarketOrder], mode: ResponseMode) -> Option<ResponseStats> {
    let mut acc = ResponseAccumulator::default();
    for mo in mos {
        acc.push(mo, mode);
    }
    acc.finish(mode)
}

/// Across-day summary: plain means of the daily statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyAverage {
    pub avg_spread: f64,
    pub r1: f64,
    pub sigma_r: f64,
    pub n_mo_per_day: f64,
    pub days: usize,
}

pub fn average_daily(days: &[ResponseStats]) -> Option<DailyAverage> {
    if days.is_empty() {
        return None;
    }
    let n = days.len() as f64;
    let mean = |f: fn(&ResponseStats) -> f64| days.iter().map(f).sum::<f64>() / n;
    Some(DailyAverage {
        avg_spread: mean(|d| d.avg_spread),
        r1: mean(|d| d.r1),
        sigma_r: mean(|d| d.sigma_r),
        n_mo_per_day: mean(|d| d.n_mo as f64),
        days: days.len(),
    })
}

/// Mid-price path seen by the order sequence: the mid before each order
/// followed by the mid after the last one.
fn mid_path(mos: &[MarketOrder]) -> Vec<Mid> {
    let mut path: Vec<Mid> = mos.iter().map(|m| m.mid_before).collect();
    if let Some(last) = mos.last() {
        path.push(last.mid_after_next);
    }
    path
}

/// Mean squared mid-price change over `lag` orders, in cents squared.
pub fn diffusion(mos: &[MarketOrder], lag: usize) -> Result<f64> {
    if mos.len() < lag + 1 {
        return Err(Error::insufficient(format!(
            "diffusion at lag {lag} needs {} orders, got {}",
            lag + 1,
            mos.len()
        )));
    }
    let path = mid_path(mos);
    let terms = path.len() - lag;
    let sum: i128 = (0..terms)
        .map(|t| {
            let d = (path[t + lag] - path[t]) as i128;
            d * d
        })
        .sum();
    let per_cent = (2 * UNITS_PER_CENT) as f64;
    Ok(sum as f64 / terms as f64 / (per_cent * per_cent))
}

/// One bin of a conditioned response curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    /// Mean of the conditioning variable inside the bin.
    pub mean_x: f64,
    pub mean_y: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Binning {
    /// Width `fine` below `split`, width `coarse` from `split` upward.
    DensityAdaptive { split: f64, fine: f64, coarse: f64 },
    EqualWidth { n_bins: usize, min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedCurve {
    pub points: Vec<CurvePoint>,
    pub binning: Binning,
}

impl ConditionedCurve {
    pub fn total_count(&self) -> usize {
        self.points.iter().map(|p| p.count).sum()
    }
}

/// Bin index of `x` on a grid of `width` starting at zero, robust to the
/// representation error of decimal widths.
fn grid_index(x: f64, width: f64) -> i64 {
    let q = x / width;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as i64
    } else {
        q.floor() as i64
    }
}

/// Groups `(x, y)` pairs by integer bin key, returning bins in key order.
fn bin_pairs(pairs: impl Iterator<Item = (i64, f64, f64)>) -> Vec<(i64, f64, f64, usize)> {
    let mut v: Vec<(i64, f64, f64)> = pairs.collect();
    v.sort_by_key(|p| p.0);
    let mut out: Vec<(i64, f64, f64, usize)> = Vec::new();
    for (k, x, y) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => {
                last.1 += x;
                last.2 += y;
                last.3 += 1;
            }
            _ => out.push((k, x, y, 1)),
        }
    }
    out
}

/// Lag-1 response conditioned on normalized order volume. Volumes below
/// 0.1 are binned every 0.01, larger volumes every 0.1.
pub fn volume_conditioned_response(orders: &[NormalizedOrder], mode: ResponseMode) -> ConditionedCurve {
    const SPLIT: f64 = 0.1;
    const FINE: f64 = 0.01;
    const COARSE: f64 = 0.1;
    // fine bins get keys [0, 10), coarse bins are offset past them
    let fine_bins = grid_index(SPLIT, FINE);
    let key = |x: f64| {
        if x < SPLIT {
            grid_index(x, FINE)
        } else {
            fine_bins + grid_index(x, COARSE)
        }
    };
    let binned = bin_pairs(
        orders
            .iter()
            .map(|o| (key(o.normalized_volume), o.normalized_volume, order_response_cents(&o.order, mode))),
    );
    let points = binned
        .into_iter()
        .map(|(k, sx, sy, count)| {
            let (lo, width) = if k < fine_bins {
                (k as f64 * FINE, FINE)
            } else {
                ((k - fine_bins) as f64 * COARSE, COARSE)
            };
            CurvePoint {
                lo,
                hi: lo + width,
                center: lo + width / 2.0,
                mean_x: sx / count as f64,
                mean_y: sy / count as f64,
                count,
            }
        })
        .collect();
    ConditionedCurve {
        points,
        binning: Binning::DensityAdaptive {
            split: SPLIT,
            fine: FINE,
            coarse: COARSE,
        },
    }
}

/// Signed volume and mid move over a window of consecutive market orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImbalanceSample {
    pub t_start: usize,
    /// Sum of sign times size over the window, shares.
    pub delta_v: i64,
    /// Mid before the window's first order to mid before the next order
    /// after the window, in half-units of 1e-4 dollars.
    pub delta_mid: i64,
}

impl ImbalanceSample {
    pub fn delta_m_cents(&self) -> f64 {
        half_units_to_cents(self.delta_mid)
    }
}

/// Order-flow imbalance over windows of `window` orders starting every
/// `stride` orders. Incomplete trailing windows are dropped.
pub fn order_flow_imbalance(mos: &[MarketOrder], window: usize, stride: usize) -> Result<Vec<ImbalanceSample>> {
    if window == 0 || stride == 0 {
        return Err(Error::invalid("window and stride must be positive"));
    }
    if mos.len() < window {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity((mos.len() - window) / stride + 1);
    let mut t = 0;
    while t + window <= mos.len() {
        let w = &mos[t..t + window];
        let delta_v = w.iter().map(|m| m.sign.sign() * m.total_size as i64).sum();
        let delta_mid = w[window - 1].mid_after_next - w[0].mid_before;
        out.push(ImbalanceSample {
            t_start: t,
            delta_v,
            delta_mid,
        });
        t += stride;
    }
    Ok(out)
}

/// Drops samples lying more than `k` standard deviations from the mean
/// in either coordinate.
pub fn filter_imbalance_outliers(samples: &[ImbalanceSample], k: f64) -> Result<Vec<ImbalanceSample>> {
    let dv: Vec<f64> = samples.iter().map(|s| s.delta_v as f64).collect();
    let dm: Vec<f64> = samples.iter().map(|s| s.delta_m_cents()).collect();
    let mv = outlier_mask(&dv, k)?;
    let mm = outlier_mask(&dm, k)?;
    Ok(samples
        .iter()
        .zip(mv.iter().zip(&mm))
        .filter(|(_, (a, b))| **a && **b)
        .map(|(s, _)| *s)
        .collect())
}

/// Aggregate impact: mean mid move (cents) per equal-width imbalance bin.
/// Empty bins are omitted.
pub fn aggregate_impact_curve(samples: &[ImbalanceSample], n_bins: usize) -> Result<ConditionedCurve> {
    if samples.is_empty() {
        return Err(Error::insufficient("no imbalance samples"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("bin count must be positive"));
    }
    let min = samples.iter().map(|s| s.delta_v).min().unwrap_or(0) as f64;
    let max = samples.iter().map(|s| s.delta_v).max().unwrap_or(0) as f64;
    let n_bins = if max > min { n_bins } else { 1 };
    let width = if max > min { (max - min) / n_bins as f64 } else { 1.0 };
    let key = |x: f64| (((x - min) / width).floor() as i64).clamp(0, n_bins as i64 - 1);
    let binned = bin_pairs(samples.iter().map(|s| {
        let x = s.delta_v as f64;
        (key(x), x, s.delta_m_cents())
    }));
    let points = binned
        .into_iter()
        .map(|(k, sx, sy, count)| {
            let lo = min + k as f64 * width;
            CurvePoint {
                lo,
                hi: lo + width,
                center: lo + width / 2.0,
                mean_x: sx / count as f64,
                mean_y: sy / count as f64,
                count,
            }
        })
        .collect();
    Ok(ConditionedCurve {
        points,
        binning: Binning::EqualWidth { n_bins, min, max },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Side;

    fn mo(sign: Side, size: u64, before: i64, after: i64) -> MarketOrder {
        MarketOrder {
            time_ns: 0,
            sign,
            total_size: size,
            n_fills: 1,
            contains_hidden: false,
            price_changing: false,
            mid_before: Mid::from_price(before),
            mid_after_next: Mid::from_price(after),
            spread_before: 100,
            opposite_best_volume_before: 100,
            notional: 0,
            first_index: 0,
            pre_book_fallback: false,
            next_mid_fallback: false,
        }
    }

    /// Chains orders so each `mid_after_next` is the next `mid_before`.
    fn chain(signs: &[(Side, u64)], mids: &[i64]) -> Vec<MarketOrder> {
        signs
            .iter()
            .enumerate()
            .map(|(i, &(s, v))| mo(s, v, mids[i], mids[i + 1]))
            .collect()
    }

    #[test]
    fn mid_and_micro() {
        let b = BookSnapshot::level1(2_159_600, 100, 2_158_800, 85);
        assert_eq!(mid_price(&b), Mid::from_price(2_159_200));
        assert_eq!(mid_price(&BookSnapshot::level1(101, 1, 100, 1)).units(), 100.5);
        assert_eq!(micro_price(&BookSnapshot::level1(100, 7, 90, 7)), 95.0);
        assert_eq!(micro_price(&BookSnapshot::level1(100, 1, 90, 3)), 97.5);
        let d = 37;
        assert_eq!(
            mid_price(&BookSnapshot::level1(101 + d, 1, 100 + d, 1)) - mid_price(&BookSnapshot::level1(101, 1, 100, 1)),
            2 * d
        );
    }

    #[test]
    fn micro_price_zero_bid_volume_is_bid() {
        let b = BookSnapshot::level1(100, 4, 90, 0);
        assert_eq!(micro_price(&b), 90.0);
    }

    #[test]
    fn single_order_responses() {
        let up = [mo(Side::Buy, 10, 10_000, 10_100)];
        for mode in [ResponseMode::Signed, ResponseMode::Clipped] {
            assert_eq!(lag1_response(&up, mode).unwrap().r1, 1.0);
        }
        let down = [mo(Side::Buy, 10, 10_000, 9_900)];
        assert_eq!(lag1_response(&down, ResponseMode::Signed).unwrap().r1, -1.0);
        assert_eq!(lag1_response(&down, ResponseMode::Clipped).unwrap().r1, 0.0);
        assert!(lag1_response(&[], ResponseMode::Signed).is_none());
    }

    #[test]
    fn three_order_trace() {
        // (eps, dm in cents) = (+1,+2), (-1,+1), (+1,0)
        let mos = chain(&[(Side::Buy, 1), (Side::Sell, 1), (Side::Buy, 1)], &[10_000, 10_200, 10_300, 10_300]);
        let s = lag1_response(&mos, ResponseMode::Signed).unwrap();
        assert!((s.r1 - 1.0 / 3.0).abs() < 1e-15);
        let v1 = 5.0 / 3.0;
        assert!((s.sigma_r - (v1 - 1.0 / 9.0_f64).sqrt()).abs() < 1e-15);
        let c = lag1_response(&mos, ResponseMode::Clipped).unwrap();
        assert!((c.r1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.sigma_r - (v1 - 4.0 / 9.0_f64).sqrt()).abs() < 1e-15);
        assert_eq!(s.avg_spread, 1.0);
        assert_eq!(s.n_mo, 3);
    }

    #[test]
    fn accumulators_merge() {
        let mos = chain(
            &[(Side::Buy, 1), (Side::Sell, 1), (Side::Buy, 1), (Side::Sell, 1)],
            &[10_000, 10_200, 10_300, 10_300, 10_100],
        );
        let mut a = ResponseAccumulator::default();
        let mut b = ResponseAccumulator::default();
        mos[..1].iter().for_each(|m| a.push(m, ResponseMode::Signed));
        mos[1..].iter().for_each(|m| b.push(m, ResponseMode::Signed));
        a.merge(&b);
        assert_eq!(a.finish(ResponseMode::Signed), lag1_response(&mos, ResponseMode::Signed));
    }

    #[test]
    fn daily_average() {
        let d = |r1: f64, n: usize| ResponseStats {
            avg_spread: 1.0,
            r1,
            sigma_r: 2.0,
            n_mo: n,
            mode: ResponseMode::Signed,
        };
        let a = average_daily(&[d(1.0, 10), d(3.0, 20)]).unwrap();
        assert_eq!(a.r1, 2.0);
        assert_eq!(a.n_mo_per_day, 15.0);
        assert!(average_daily(&[]).is_none());
    }

    #[test]
    fn diffusion_cases() {
        let flat = chain(&[(Side::Buy, 1); 4], &[100; 5]);
        for l in 0..4 {
            assert_eq!(diffusion(&flat, l).unwrap(), 0.0);
        }
        // mid alternates +-1 cent around 100.00
        let alt = chain(&[(Side::Buy, 1); 6], &[10_000, 10_100, 10_000, 10_100, 10_000, 10_100, 10_000]);
        assert_eq!(diffusion(&alt, 1).unwrap(), 1.0);
        assert_eq!(diffusion(&alt, 2).unwrap(), 0.0);
        assert_eq!(diffusion(&alt, 0).unwrap(), 0.0);
        assert!(diffusion(&alt, 6).is_err());
    }

    fn norm(v: f64, response_cents: i64) -> NormalizedOrder {
        NormalizedOrder {
            order: mo(Side::Buy, 1, 10_000, 10_000 + response_cents * 100),
            normalized_volume: v,
        }
    }

    #[test]
    fn volume_curve_bins() {
        let orders: Vec<_> = (0..7).map(|_| norm(0.05, 2)).collect();
        let c = volume_conditioned_response(&orders, ResponseMode::Signed);
        assert_eq!(c.points.len(), 1);
        let p = c.points[0];
        assert!((p.center - 0.055).abs() < 1e-12);
        assert_eq!(p.mean_y, 2.0);
        assert_eq!(p.count, 7);

        let c = volume_conditioned_response(&[norm(0.05, 1), norm(0.15, 1)], ResponseMode::Signed);
        assert_eq!(c.points.len(), 2);
        assert!((c.points[0].hi - c.points[0].lo - 0.01).abs() < 1e-12);
        assert!((c.points[1].hi - c.points[1].lo - 0.1).abs() < 1e-12);
        assert!((c.points[1].lo - 0.1).abs() < 1e-12);
    }

    #[test]
    fn volume_curve_edges() {
        // values sitting exactly on decimal bin edges stay in their own bin
        let c = volume_conditioned_response(
            &[norm(0.07, 1), norm(0.29, 1), norm(0.1, 1), norm(0.3, 1)],
            ResponseMode::Signed,
        );
        let los: Vec<f64> = c.points.iter().map(|p| (p.lo * 100.0).round() / 100.0).collect();
        assert_eq!(los, vec![0.07, 0.1, 0.2, 0.3]);
        assert!(volume_conditioned_response(&[], ResponseMode::Signed).points.is_empty());
    }

    #[test]
    fn imbalance_example() {
        let mos = chain(&[(Side::Buy, 100), (Side::Sell, 40)], &[1_000_000, 1_000_500, 1_001_000]);
        let s = order_flow_imbalance(&mos, 2, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].delta_v, 60);
        assert_eq!(s[0].delta_m_cents(), 10.0);
    }

    #[test]
    fn imbalance_sign_coherence_and_short_input() {
        let mos = chain(&[(Side::Sell, 30); 5], &[100; 6]);
        let s = order_flow_imbalance(&mos, 5, 5).unwrap();
        assert_eq!(s[0].delta_v, -150);
        assert!(order_flow_imbalance(&mos, 6, 6).unwrap().is_empty());
        assert!(order_flow_imbalance(&mos, 0, 1).is_err());
        assert_eq!(order_flow_imbalance(&mos, 2, 1).unwrap().len(), 4);
    }

    #[test]
    fn aggregate_curve_single_bin_and_line() {
        let s = [
            ImbalanceSample {
                t_start: 0,
                delta_v: 10,
                delta_mid: 200,
            },
            ImbalanceSample {
                t_start: 1,
                delta_v: 10,
                delta_mid: 400,
            },
        ];
        let c = aggregate_impact_curve(&s, 5).unwrap();
        assert_eq!(c.points.len(), 1);
        assert_eq!(c.points[0].mean_x, 10.0);
        assert_eq!(c.points[0].mean_y, 1.5);

        // exact line: 0.01 cents per share = 2 half-units per share
        let line: Vec<_> = (-50..=50)
            .map(|v| ImbalanceSample {
                t_start: 0,
                delta_v: v * 10,
                delta_mid: v * 20,
            })
            .collect();
        let c = aggregate_impact_curve(&line, 10).unwrap();
        assert_eq!(c.total_count(), line.len());
        for p in &c.points {
            assert!((p.mean_y - 0.01 * p.mean_x).abs() < 1e-12);
        }
        assert!(aggregate_impact_curve(&[], 3).is_err());
    }
}
