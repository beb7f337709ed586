//! Monte Carlo simulation of the controlled process under a band policy.
//!
//! Jump times are drawn exactly as exponential interarrivals; between jumps
//! the diffusion part advances on a fixed time grid. With `sigma = 0` the
//! path is piecewise linear and barrier hits are resolved at their exact
//! crossing times (the process creeps down), so those paths carry no
//! discretization error in the state. Each path owns one counter-derived RNG
//! stream, and all aggregation is done in path order, so results are
//! bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exit::TransientQuery;
use crate::model::{CostParams, ModelParams};
use crate::numeric::pairwise_sum;
use crate::policy::BandPolicy;

/// Discretization, horizon, path count, seed and the optional diffusion
/// bridge correction for barrier crossings between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub paths: u64,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl SimConfig {
    pub fn validate(&self) {
        assert!(self.dt > 0.0, "dt must be positive");
        assert!(self.horizon > 0.0, "horizon must be positive");
        assert!(self.paths >= 1, "need at least one path");
    }
}

/// Everything recorded along one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub intervention_times: Vec<f64>,
    pub intervention_sizes: Vec<f64>,
    /// Total discounted cost: running cost by trapezoid plus discounted
    /// intervention charges.
    pub discounted_cost: f64,
    /// The trapezoid running-cost part alone.
    pub discounted_phi_cost: f64,
    pub grid_samples: Option<Vec<(f64, f64)>>,
}

/// Sample mean and error of the discounted policy cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    /// Deterministic bound on the truncation bias of the finite horizon:
    /// `exp(-lambda H) * sup phi on [a, b] / lambda`.
    pub truncation_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Time-weighted state histogram over the band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges spanning `[a, b]`.
    pub edges: Vec<f64>,
    /// Normalized mass per bin (sums to 1).
    pub mass: Vec<f64>,
    pub total_time: f64,
    /// Resets to the lower reset point observed (regeneration cycles).
    pub regeneration_cycles: u64,
}

impl Histogram {
    /// Empirical CDF evaluated at a bin edge index.
    pub fn cdf_at_edge(&self, idx: usize) -> f64 {
        self.mass[..idx].iter().sum()
    }
}

/// Kolmogorov-Smirnov distance between the histogram and a reference CDF,
/// evaluated at the bin edges.
pub fn ks_distance(hist: &Histogram, cdf: &dyn Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    for (i, edge) in hist.edges.iter().enumerate() {
        worst = worst.max((acc - cdf(*edge)).abs());
        if i < hist.mass.len() {
            acc += hist.mass[i];
        }
    }
    worst
}

trait PathObserver {
    fn on_segment(&mut self, t0: f64, x0: f64, t1: f64, x1: f64, grid_rhythm: bool);
    fn on_intervention(&mut self, t: f64, xi: f64);
    fn on_grid_sample(&mut self, _t: f64, _x: f64) {}
}

struct NullObserver;

impl PathObserver for NullObserver {
    fn on_segment(&mut self, _: f64, _: f64, _: f64, _: f64, _: bool) {}
    fn on_intervention(&mut self, _: f64, _: f64) {}
}

/// Discounted-cost bookkeeping along a path.
struct CostObserver<'a> {
    model: &'a ModelParams,
    costs: &'a CostParams,
    disc_dt: f64,
    cur_t: f64,
    cur_disc: f64,
    phi_acc: f64,
    g_acc: f64,
    times: Vec<f64>,
    sizes: Vec<f64>,
    samples: Option<Vec<(f64, f64)>>,
}

impl<'a> CostObserver<'a> {
    fn new(model: &'a ModelParams, costs: &'a CostParams, dt: f64, collect: bool) -> Self {
        CostObserver {
            model,
            costs,
            disc_dt: (-model.discount * dt).exp(),
            cur_t: 0.0,
            cur_disc: 1.0,
            phi_acc: 0.0,
            g_acc: 0.0,
            times: Vec::new(),
            sizes: Vec::new(),
            samples: collect.then(Vec::new),
        }
    }

    fn into_record(self) -> PathRecord {
        PathRecord {
            intervention_times: self.times,
            intervention_sizes: self.sizes,
            discounted_cost: self.phi_acc + self.g_acc,
            discounted_phi_cost: self.phi_acc,
            grid_samples: self.samples,
        }
    }
}

impl PathObserver for CostObserver<'_> {
    fn on_segment(&mut self, t0: f64, x0: f64, t1: f64, x1: f64, grid_rhythm: bool) {
        if t0 != self.cur_t {
            self.cur_disc = (-self.model.discount * t0).exp();
        }
        let disc0 = self.cur_disc;
        let disc1 = if grid_rhythm {
            disc0 * self.disc_dt
        } else {
            (-self.model.discount * t1).exp()
        };
        let phi0 = self.model.opportunity_cost(x0);
        let phi1 = self.model.opportunity_cost(x1);
        self.phi_acc += 0.5 * (disc0 * phi0 + disc1 * phi1) * (t1 - t0);
        self.cur_t = t1;
        self.cur_disc = disc1;
    }

    fn on_intervention(&mut self, t: f64, xi: f64) {
        self.g_acc += (-self.model.discount * t).exp() * self.costs.intervention_cost(xi);
        self.times.push(t);
        self.sizes.push(xi);
    }

    fn on_grid_sample(&mut self, t: f64, x: f64) {
        if let Some(samples) = &mut self.samples {
            samples.push((t, x));
        }
    }
}

/// Time-in-bin accumulation for the occupation histogram.
struct OccupationObserver {
    a: f64,
    inv_width: f64,
    bins: Vec<f64>,
    regenerations: u64,
}

impl OccupationObserver {
    fn new(bands: &BandPolicy, bins: usize) -> Self {
        OccupationObserver {
            a: bands.a,
            inv_width: bins as f64 / bands.width(),
            bins: vec![0.0; bins],
            regenerations: 0,
        }
    }
}

impl PathObserver for OccupationObserver {
    fn on_segment(&mut self, t0: f64, x0: f64, t1: f64, _x1: f64, _grid: bool) {
        let idx = ((x0 - self.a) * self.inv_width) as usize;
        let idx = idx.min(self.bins.len() - 1);
        self.bins[idx] += t1 - t0;
    }

    fn on_intervention(&mut self, _t: f64, xi: f64) {
        if xi > 0.0 {
            self.regenerations += 1;
        }
    }
}

fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Advances one controlled path to `t_end` and returns the terminal state.
fn walk<O: PathObserver>(
    model: &ModelParams,
    bands: &BandPolicy,
    x0: f64,
    t_end: f64,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
    obs: &mut O,
) -> f64 {
    let BandPolicy { a, alpha, beta, b } = *bands;
    let sigma = model.sigma;
    let sig2 = sigma * sigma;
    let jump_size = Exp::new(model.jump_scale).expect("positive jump scale");
    let interarrival = (model.jump_rate > 0.0).then(|| Exp::new(model.jump_rate).unwrap());

    let mut t = 0.0;
    let mut x = x0;
    if let Some(target) = bands.reset_target(x) {
        obs.on_intervention(0.0, target - x);
        x = target;
    }
    let mut grid_k: u64 = 1;
    let mut next_grid = cfg.dt;
    let mut next_jump = match &interarrival {
        Some(d) => rng.sample(d),
        None => f64::INFINITY,
    };
    let mut on_grid_rhythm = true;

    while t < t_end {
        let te = next_grid.min(next_jump).min(t_end);
        let is_jump = te == next_jump;

        let mut x_new;
        if sigma > 0.0 {
            let dtau = te - t;
            x_new = x + model.mu * dtau;
            if dtau > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                x_new += sigma * dtau.sqrt() * z;
            }
        } else {
            // Piecewise linear: resolve barrier hits at exact crossing times.
            loop {
                let crossing = if model.mu < 0.0 {
                    t + (a - x) / model.mu
                } else if model.mu > 0.0 {
                    t + (b - x) / model.mu
                } else {
                    f64::INFINITY
                };
                if crossing < te {
                    let (barrier, target) = if model.mu < 0.0 { (a, alpha) } else { (b, beta) };
                    obs.on_segment(t, x, crossing, barrier, false);
                    obs.on_intervention(crossing, target - barrier);
                    t = crossing;
                    x = target;
                    on_grid_rhythm = false;
                } else {
                    break;
                }
            }
            x_new = x + model.mu * (te - t);
        }

        let jump = if is_jump {
            let j: f64 = rng.sample(jump_size);
            debug_assert!(j >= 0.0, "spectral positivity");
            j
        } else {
            0.0
        };
        let x_pre = x_new + jump;

        let rhythm = on_grid_rhythm && !is_jump && te == next_grid;
        obs.on_segment(t, x, te, x_new, rhythm);

        if let Some(target) = bands.reset_target(x_pre) {
            obs.on_intervention(te, target - x_pre);
            x = target;
        } else if cfg.bridge_correction && sigma > 0.0 && !is_jump && te > t {
            // Brownian bridge probability of an unseen crossing inside the
            // step; the crossing is creeping, so the pre-reset state is the
            // barrier itself. Segments ending in a jump are left uncorrected
            // (one intervention per event instant).
            let dtau = te - t;
            let p_lo = (-2.0 * (x - a) * (x_new - a) / (sig2 * dtau)).exp();
            if rng.random::<f64>() < p_lo {
                obs.on_intervention(te, alpha - a);
                x = alpha;
            } else {
                let p_hi = (-2.0 * (b - x) * (b - x_new) / (sig2 * dtau)).exp();
                if rng.random::<f64>() < p_hi {
                    obs.on_intervention(te, beta - b);
                    x = beta;
                } else {
                    x = x_pre;
                }
            }
        } else {
            x = x_pre;
        }
        debug_assert!(x > a && x < b, "state confined to the open band");

        t = te;
        if is_jump {
            next_jump = te + rng.sample(interarrival.as_ref().unwrap());
            on_grid_rhythm = false;
        }
        if te >= next_grid {
            obs.on_grid_sample(te, x);
            grid_k += 1;
            next_grid = grid_k as f64 * cfg.dt;
            on_grid_rhythm = !is_jump;
        }
    }
    x
}

/// Simulates one path of the controlled process and its discounted cost.
/// `path_stream` selects the RNG stream under `cfg.seed`.
pub fn simulate_path(
    model: &ModelParams,
    bands: &BandPolicy,
    costs: &CostParams,
    x0: f64,
    cfg: &SimConfig,
    path_stream: u64,
) -> PathRecord {
    simulate_path_with(model, bands, costs, x0, cfg, path_stream, false)
}

/// As [`simulate_path`], optionally collecting `(t, X_t)` grid samples.
pub fn simulate_path_with(
    model: &ModelParams,
    bands: &BandPolicy,
    costs: &CostParams,
    x0: f64,
    cfg: &SimConfig,
    path_stream: u64,
    collect_grid: bool,
) -> PathRecord {
    cfg.validate();
    let mut rng = path_rng(cfg.seed, path_stream);
    let mut obs = CostObserver::new(model, costs, cfg.dt, collect_grid);
    walk(model, bands, x0, cfg.horizon, cfg, &mut rng, &mut obs);
    obs.into_record()
}

/// Upper bound on what the truncated horizon can leave out of the running
/// cost: the state is confined to the band, where `phi` is bounded.
pub fn truncation_bound(model: &ModelParams, bands: &BandPolicy, horizon: f64) -> f64 {
    let phi_max = model
        .opportunity_cost(bands.a)
        .max(model.opportunity_cost(bands.b));
    (-model.discount * horizon).exp() * phi_max / model.discount
}

/// Horizon making the truncation bound at most `bias_frac` of `value_scale`.
pub fn horizon_for_bias(
    model: &ModelParams,
    bands: &BandPolicy,
    value_scale: f64,
    bias_frac: f64,
) -> f64 {
    let phi_max = model
        .opportunity_cost(bands.a)
        .max(model.opportunity_cost(bands.b));
    let target = (bias_frac * value_scale * model.discount / phi_max).min(0.5);
    (-target.ln() / model.discount).max(1.0)
}

/// Mean and standard error of the discounted policy cost over independent
/// paths. Paths run in parallel on per-path RNG streams; the reduction is in
/// path order, so the estimate is reproducible for any thread count.
pub fn estimate_value(
    model: &ModelParams,
    bands: &BandPolicy,
    costs: &CostParams,
    x0: f64,
    cfg: &SimConfig,
) -> ValueEstimate {
    cfg.validate();
    let values: Vec<f64> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let mut obs = CostObserver::new(model, costs, cfg.dt, false);
            walk(model, bands, x0, cfg.horizon, cfg, &mut rng, &mut obs);
            obs.phi_acc + obs.g_acc
        })
        .collect();
    let n = values.len() as f64;
    let mean = pairwise_sum(&values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let stderr = if values.len() > 1 {
        (pairwise_sum(&sq) / (n * (n - 1.0))).sqrt()
    } else {
        0.0
    };
    ValueEstimate {
        mean,
        stderr,
        n: cfg.paths,
        truncation_bound: truncation_bound(model, bands, cfg.horizon),
    }
}

/// Estimates `P[X at exponential(q) time lies in the interval]` by killing
/// each path at an independent exponential clock.
pub fn estimate_transient_mc(
    model: &ModelParams,
    bands: &BandPolicy,
    query: &TransientQuery,
    cfg: &SimConfig,
) -> TransientEstimate {
    cfg.validate();
    assert!(query.q > 0.0, "killing rate must be positive");
    let clock = Exp::new(query.q).expect("positive rate");
    let (lo, hi) = query.interval;
    let hits: Vec<f64> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let t_kill: f64 = rng.sample(clock);
            let x_t = walk(
                model,
                bands,
                query.x,
                t_kill.min(cfg.horizon),
                cfg,
                &mut rng,
                &mut NullObserver,
            );
            if (lo..=hi).contains(&x_t) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let n = hits.len() as f64;
    let p_hat = pairwise_sum(&hits) / n;
    TransientEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
        n: cfg.paths,
    }
}

/// Time-weighted occupation histogram of the controlled state over `[a, b]`.
/// With fewer than 100 regeneration cycles the histogram is reported anyway;
/// callers should treat it as unconverged.
pub fn empirical_occupation(
    model: &ModelParams,
    bands: &BandPolicy,
    cfg: &SimConfig,
    bins: usize,
) -> Histogram {
    cfg.validate();
    assert!(bins >= 1);
    let partials: Vec<OccupationObserver> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let mut obs = OccupationObserver::new(bands, bins);
            walk(model, bands, bands.alpha, cfg.horizon, cfg, &mut rng, &mut obs);
            obs
        })
        .collect();
    let mut mass = vec![0.0; bins];
    let mut regenerations = 0;
    for part in &partials {
        for (m, v) in mass.iter_mut().zip(&part.bins) {
            *m += v;
        }
        regenerations += part.regenerations;
    }
    let total_time: f64 = pairwise_sum(&mass);
    for m in &mut mass {
        *m /= total_time;
    }
    let edges = (0..=bins)
        .map(|i| bands.a + bands.width() * i as f64 / bins as f64)
        .collect();
    Histogram {
        edges,
        mass,
        total_time,
        regeneration_cycles: regenerations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bands() -> BandPolicy {
        BandPolicy::new(0.0, 0.5, 1.5, 2.0).unwrap()
    }

    fn costs() -> CostParams {
        CostParams {
            fixed_up: 1.0,
            prop_up: 0.1,
            fixed_down: 1.0,
            prop_down: 0.1,
        }
    }

    fn drift_model() -> ModelParams {
        ModelParams {
            mu: -2.0,
            sigma: 0.0,
            jump_rate: 1.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        }
    }

    #[test]
    fn constant_path_costs_discounted_running_cost() {
        let model = ModelParams {
            mu: 0.0,
            sigma: 0.0,
            jump_rate: 0.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        };
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 25.0,
            paths: 1,
            seed: 7,
            bridge_correction: false,
        };
        let x0 = 1.0;
        let rec = simulate_path(&model, &bands(), &costs(), x0, &cfg, 0);
        assert!(rec.intervention_times.is_empty());
        let expect = model.opportunity_cost(x0) / model.discount;
        assert!(
            (rec.discounted_cost - expect).abs() < 1e-4 * expect,
            "{} vs {expect}",
            rec.discounted_cost
        );
        // Zero-variance estimate in the deterministic case.
        let cfg2 = SimConfig { paths: 4, ..cfg };
        let est = estimate_value(&model, &bands(), &costs(), x0, &cfg2);
        assert_eq!(est.stderr, 0.0);
        assert!((est.mean - rec.discounted_cost).abs() < 1e-12);
    }

    #[test]
    fn deterministic_drift_matches_geometric_series() {
        let model = ModelParams {
            mu: -2.0,
            sigma: 0.0,
            jump_rate: 0.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        };
        let bands = bands();
        let cfg = SimConfig {
            dt: 1e-4,
            horizon: 30.0,
            paths: 1,
            seed: 3,
            bridge_correction: false,
        };
        let x0 = 1.0;
        let rec = simulate_path(&model, &bands, &costs(), x0, &cfg, 0);

        // First hit of the lower threshold, then a periodic cycle from alpha.
        let t1 = (x0 - bands.a) / (-model.mu);
        let period = (bands.alpha - bands.a) / (-model.mu);
        assert!((rec.intervention_times[0] - t1).abs() < 1e-12);
        for w in rec.intervention_times.windows(2) {
            assert!((w[1] - w[0] - period).abs() < 1e-9);
        }
        for xi in &rec.intervention_sizes {
            assert_eq!(*xi, bands.alpha - bands.a);
        }

        // Quadrature oracle for the running cost plus the geometric series of
        // intervention charges.
        let lambda = model.discount;
        let phi_leg = |x_start: f64, len: f64| {
            crate::numeric::integrate(
                &|t: f64| {
                    (-lambda * t).exp() * model.opportunity_cost(x_start + model.mu * t)
                },
                0.0,
                len,
                1e-12,
            )
        };
        let g_each = costs().intervention_cost(bands.alpha - bands.a);
        let disc1 = (-lambda * t1).exp();
        let discp = (-lambda * period).exp();
        let expect = phi_leg(x0, t1)
            + disc1 * phi_leg(bands.alpha, period) / (1.0 - discp)
            + disc1 * g_each / (1.0 - discp);
        assert!(
            (rec.discounted_cost - expect).abs() < 2e-4 * expect,
            "{} vs {expect}",
            rec.discounted_cost
        );
    }

    #[test]
    fn creeping_hits_exact_below_jumpy_overshoots_above() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 200.0,
            paths: 1,
            seed: 11,
            bridge_correction: false,
        };
        let rec = simulate_path(&model, &bands(), &costs(), 1.0, &cfg, 0);
        let mut saw_down = false;
        let mut saw_up = false;
        for xi in &rec.intervention_sizes {
            if *xi > 0.0 {
                // Lower resets creep: the pre-reset state is exactly the
                // threshold, so the move is exactly alpha - a.
                assert_eq!(*xi, bands().alpha - bands().a);
                saw_down = true;
            } else {
                // Upper resets come from jumps and strictly overshoot.
                assert!(*xi < bands().beta - bands().b);
                saw_up = true;
            }
        }
        assert!(saw_down && saw_up, "expected both reset kinds");
    }

    #[test]
    fn bookkeeping_identity_holds_exactly() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 50.0,
            paths: 1,
            seed: 5,
            bridge_correction: false,
        };
        let rec = simulate_path(&model, &bands(), &costs(), 1.0, &cfg, 0);
        let g_sum: f64 = rec
            .intervention_times
            .iter()
            .zip(&rec.intervention_sizes)
            .map(|(t, xi)| (-model.discount * t).exp() * costs().intervention_cost(*xi))
            .sum();
        assert_eq!(rec.discounted_cost, rec.discounted_phi_cost + g_sum);
        let mut prev = -1.0;
        for t in &rec.intervention_times {
            assert!(*t > prev, "strictly increasing intervention times");
            prev = *t;
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 20.0,
            paths: 64,
            seed: 42,
            bridge_correction: false,
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let e1 = pool1.install(|| estimate_value(&model, &bands(), &costs(), 1.0, &cfg));
        let e4 = pool4.install(|| estimate_value(&model, &bands(), &costs(), 1.0, &cfg));
        assert_eq!(e1, e4);
        let h1 = pool1.install(|| empirical_occupation(&model, &bands(), &cfg, 37));
        let h4 = pool4.install(|| empirical_occupation(&model, &bands(), &cfg, 37));
        assert_eq!(h1, h4);
    }

    #[test]
    fn stderr_shrinks_with_path_count() {
        let model = drift_model();
        let base = SimConfig {
            dt: 2e-3,
            horizon: 15.0,
            paths: 4000,
            seed: 9,
            bridge_correction: false,
        };
        let e1 = estimate_value(&model, &bands(), &costs(), 1.0, &base);
        let e2 = estimate_value(
            &model,
            &bands(),
            &costs(),
            1.0,
            &SimConfig { paths: 8000, ..base },
        );
        let ratio = e2.stderr / e1.stderr;
        assert!(
            (ratio - 0.5_f64.sqrt()).abs() < 0.1 * 0.5_f64.sqrt(),
            "ratio {ratio}"
        );
    }

    #[test]
    fn occupation_confined_and_normalized() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 2000.0,
            paths: 1,
            seed: 1,
            bridge_correction: false,
        };
        let hist = empirical_occupation(&model, &bands(), &cfg, 40);
        let total: f64 = hist.mass.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(hist.regeneration_cycles > 100);
        assert_eq!(hist.edges.len(), 41);
    }

    #[test]
    fn transient_full_band_certain() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 100.0,
            paths: 200,
            seed: 2,
            bridge_correction: false,
        };
        let est = estimate_transient_mc(
            &model,
            &bands(),
            &TransientQuery { q: 1.0, x: 1.0, interval: (0.0, 2.0) },
            &cfg,
        );
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn instant_killing_reads_off_the_start() {
        let model = drift_model();
        let cfg = SimConfig {
            dt: 1e-3,
            horizon: 10.0,
            paths: 400,
            seed: 8,
            bridge_correction: false,
        };
        let est = estimate_transient_mc(
            &model,
            &bands(),
            &TransientQuery { q: 1e4, x: 1.0, interval: (0.9, 1.1) },
            &cfg,
        );
        assert!(est.p_hat > 1.0 - 3.0 * est.stderr - 0.05, "{}", est.p_hat);
    }
}
