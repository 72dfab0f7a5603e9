//! Power sweeps over channel draws and primary-receiver tilt angles.
//!
//! Every channel draw `c` owns three independent random streams derived from the
//! master seed: the secondary-link geometry and gains, the interference-link
//! geometry, and the interference-link gain redraws used to estimate its
//! correlation. Draws are processed in parallel and merged in index order, so
//! results do not depend on the worker count.
//!
//! The closed form does not depend on the power budget, so each
//! (draw, tilt, mode) instance is solved once and only the gate is re-evaluated
//! per power point.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::channel::{
    draw_paths, realize, redraw_gains, tilt_samples, LinkConfig, PathSet, Polarization, TiltedGram,
};
use crate::ostbc::{qpsk_demod, qpsk_mod, symbol_vector, CodeName, DispersionMatrix, OstbcCode};
use crate::precoder::{
    argmax_first, interference_power, Binding, LinkMode, MinVarianceDesign, PrecoderInputs, QForm,
};
use crate::realify::realify_channel;
use crate::{ComplexMat64, Error, RealMat64, Result};

const STREAM_SL: u64 = 1;
const STREAM_SPL: u64 = 2;
const STREAM_SPL_GAINS: u64 = 3;
const STREAM_SL_GAINS: u64 = 4;
const STREAM_NOISE: u64 = 5;

/// Seed for worker/stream `stream`, item `index` (splitmix64 finalizer).
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModePolicy {
    Fixed(LinkMode),
    SelectBest,
}

impl ModePolicy {
    fn modes(self) -> Vec<LinkMode> {
        match self {
            ModePolicy::Fixed(m) => vec![m],
            ModePolicy::SelectBest => LinkMode::ALL.to_vec(),
        }
    }
}

/// Domain in which per-instance SNRs are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    #[default]
    Linear,
    Db,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub code: CodeName,
    pub sl: LinkConfig,
    pub spl: LinkConfig,
    /// `P_maxSU / P_noise` grid in dB (noise power is 1).
    pub power_db: Vec<f64>,
    pub eta_db: f64,
    pub rho_sr: f64,
    pub n_tilt: usize,
    pub n_channel: usize,
    pub n_noise: usize,
    pub n_corr_samples: usize,
    pub epsilon_reg: f64,
    pub seed: u64,
    pub policy: ModePolicy,
    /// Polarization of the primary receiver before tilting.
    pub pr_mode: Polarization,
    /// Use the gain-averaged secondary correlation instead of the realization.
    pub average_rs: bool,
    pub averaging: Averaging,
    /// Channel draws per power point used by the BER simulation.
    pub ber_channels: usize,
}

impl SweepConfig {
    /// Defaults for everything but the scenario; `n_t` of both links follows `code`.
    pub fn new(
        code: CodeName,
        mut sl: LinkConfig,
        mut spl: LinkConfig,
        power_db: Vec<f64>,
        eta_db: f64,
    ) -> Self {
        let n_t = OstbcCode::<f64>::new(code).n_t;
        sl.n_t = n_t;
        spl.n_t = n_t;
        SweepConfig {
            code,
            sl,
            spl,
            power_db,
            eta_db,
            rho_sr: 1.0,
            n_tilt: 16,
            n_channel: 200,
            n_noise: 10_000,
            n_corr_samples: 2000,
            epsilon_reg: 1e-9,
            seed: 1,
            policy: ModePolicy::SelectBest,
            pr_mode: Polarization::V,
            average_rs: false,
            averaging: Averaging::Linear,
            ber_channels: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        self.sl.validate()?;
        self.spl.validate()?;
        let n_t = OstbcCode::<f64>::new(self.code).n_t;
        if self.sl.n_t != n_t || self.spl.n_t != n_t {
            return invalid("n_t", "transmit antenna count must match the code");
        }
        if self.power_db.is_empty() {
            return invalid("power_db", "power grid is empty");
        }
        if self.power_db.iter().any(|p| !p.is_finite()) {
            return invalid("power_db", "power grid values must be finite");
        }
        if self.eta_db.is_nan() || self.eta_db == f64::NEG_INFINITY {
            return invalid("eta_db", "interference cap must be a number above -inf");
        }
        if !(self.rho_sr > 0.0 && self.rho_sr.is_finite()) {
            return invalid("rho_sr", "must be positive and finite");
        }
        for (name, v) in [
            ("n_tilt", self.n_tilt),
            ("n_channel", self.n_channel),
            ("n_noise", self.n_noise),
            ("n_corr_samples", self.n_corr_samples),
        ] {
            if v == 0 {
                return invalid(name, "must be at least 1");
            }
        }
        if !(self.epsilon_reg >= 0.0 && self.epsilon_reg.is_finite()) {
            return invalid("epsilon_reg", "must be non-negative");
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        db_to_linear(self.eta_db)
    }
}

/// Per-instance scalars needed to evaluate any power point.
#[derive(Debug, Clone, Copy)]
struct InstanceStats {
    tr_q: f64,
    delta: f64,
    kappa: f64,
    /// post-detection SNR at alpha = 1
    snr_unit: f64,
    /// direct-trace interference at alpha = 1
    interference_unit: f64,
}

struct Gated {
    snr: f64,
    interference: f64,
    binding: Binding,
}

impl InstanceStats {
    fn gate(&self, cfg: &SweepConfig, p_tmax: f64, eta: f64) -> Gated {
        let (alpha, binding) = crate::precoder::gate_alpha(
            self.kappa, cfg.sl.n_t, cfg.rho_sr, p_tmax, eta, self.tr_q, self.delta,
        );
        let a2 = alpha * alpha;
        Gated {
            snr: self.snr_unit * a2,
            interference: self.interference_unit * a2,
            binding,
        }
    }
}

/// Channel state of one draw, shared by all tilts and modes.
struct ChannelDraw {
    /// Secondary-link channel per mode, in [`LinkMode::ALL`] order.
    sl_h: Vec<ComplexMat64>,
    r_s: Vec<RealMat64>,
    /// Interference-link Gram per transmit polarization (V, H).
    spl: [TiltedGram; 2],
}

fn gain_samples(
    geometry: &PathSet,
    cfg: &LinkConfig,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<PathSet> {
    (0..n).map(|_| redraw_gains(geometry, cfg, rng)).collect()
}

impl ChannelDraw {
    fn new(cfg: &SweepConfig, index: usize, t: usize) -> Self {
        let c = index as u64;
        let sl_paths = draw_paths(&cfg.sl, &mut stream_rng(cfg.seed, STREAM_SL, c));
        let spl_geometry = draw_paths(&cfg.spl, &mut stream_rng(cfg.seed, STREAM_SPL, c));
        let spl_samples = gain_samples(
            &spl_geometry,
            &cfg.spl,
            cfg.n_corr_samples,
            &mut stream_rng(cfg.seed, STREAM_SPL_GAINS, c),
        );
        let spl = Polarization::ALL
            .map(|qt| TiltedGram::from_samples(&spl_samples, &cfg.spl, qt, cfg.pr_mode));

        let sl_h: Vec<ComplexMat64> = LinkMode::ALL
            .iter()
            .map(|m| realize(&sl_paths, m.qt, m.qr, 0.0, &cfg.sl).h)
            .collect();
        let r_s = if cfg.average_rs {
            let samples = gain_samples(
                &sl_paths,
                &cfg.sl,
                cfg.n_corr_samples,
                &mut stream_rng(cfg.seed, STREAM_SL_GAINS, c),
            );
            LinkMode::ALL
                .iter()
                .map(|m| {
                    TiltedGram::from_samples(&samples, &cfg.sl, m.qt, m.qr)
                        .correlation_at(0.0, t)
                        .into_matrix()
                })
                .collect()
        } else {
            sl_h.iter()
                .map(|h| realify_channel(&(h.adjoint() * h), t))
                .collect()
        };
        ChannelDraw { sl_h, r_s, spl }
    }

    fn r_p(&self, qt: Polarization, tilt: f64, t: usize) -> RealMat64 {
        let idx = match qt {
            Polarization::V => 0,
            Polarization::H => 1,
        };
        self.spl[idx].correlation_at(tilt, t).into_matrix()
    }

    fn design(
        &self,
        cfg: &SweepConfig,
        a: &DispersionMatrix<f64>,
        mode: LinkMode,
        tilt: f64,
        t: usize,
    ) -> Result<MinVarianceDesign<f64>> {
        let inputs = PrecoderInputs {
            a: a.clone(),
            r_s: self.r_s[mode.index()].clone(),
            r_p: self.r_p(mode.qt, tilt, t),
            rho_sr: cfg.rho_sr,
            p_tmax: 1.0,
            eta: 1.0,
            n_t: cfg.sl.n_t,
            epsilon_reg: cfg.epsilon_reg,
            q_form: QForm::Corrected,
        };
        MinVarianceDesign::new(&inputs)
    }
}

fn instance_stats(cfg: &SweepConfig, design: &MinVarianceDesign<f64>) -> InstanceStats {
    let w = design.w(1.0);
    InstanceStats {
        tr_q: design.tr_q(),
        delta: design.delta(),
        kappa: design.kappa(),
        snr_unit: design.snr_at(1.0),
        interference_unit: interference_power(
            &w,
            design.regularized_interference_correlation(),
            cfg.rho_sr,
            cfg.sl.n_t,
        ),
    }
}

/// Aggregates over solved instances at one power point.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeStats {
    pub instances: usize,
    pub snr_db: f64,
    pub frac_interference_limited: f64,
    pub mean_interference: f64,
    pub max_interference: f64,
}

#[derive(Default)]
struct Accumulator {
    n: usize,
    snr: f64,
    limited: usize,
    interference: f64,
    max_interference: f64,
}

impl Accumulator {
    fn push(&mut self, g: &Gated, averaging: Averaging) {
        self.n += 1;
        self.snr += match averaging {
            Averaging::Linear => g.snr,
            Averaging::Db => linear_to_db(g.snr),
        };
        if g.binding == Binding::InterferenceLimited {
            self.limited += 1;
        }
        self.interference += g.interference;
        self.max_interference = self.max_interference.max(g.interference);
    }

    fn finish(&self, averaging: Averaging) -> Option<ModeStats> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        let mean = self.snr / n;
        Some(ModeStats {
            instances: self.n,
            snr_db: match averaging {
                Averaging::Linear => linear_to_db(mean),
                Averaging::Db => mean,
            },
            frac_interference_limited: self.limited as f64 / n,
            mean_interference: self.interference / n,
            max_interference: self.max_interference,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub power_db: f64,
    /// Statistics under the configured mode policy.
    pub policy: ModeStats,
    /// Per-mode statistics for every mode the policy evaluates.
    pub per_mode: Vec<(LinkMode, Option<ModeStats>)>,
    /// How often each mode was chosen, in [`LinkMode::ALL`] order.
    pub chosen_counts: [usize; 4],
    /// Linear mean SNR over tilts for each channel draw (`None` if all degenerate).
    pub per_draw_snr: Vec<Option<f64>>,
    pub ber: Option<f64>,
}

impl PowerPoint {
    pub fn modal_mode(&self) -> LinkMode {
        let i = argmax_first(self.chosen_counts.iter().copied()).unwrap_or(0);
        LinkMode::ALL[i]
    }

    pub fn mode_stats(&self, mode: LinkMode) -> Option<&ModeStats> {
        self.per_mode
            .iter()
            .find(|(m, _)| *m == mode)
            .and_then(|(_, s)| s.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub seed: u64,
    pub policy: ModePolicy,
    pub eta: f64,
    pub points: Vec<PowerPoint>,
    /// Instances (draw, tilt) per power point.
    pub instances: usize,
    /// Instances excluded because no policy mode could be solved.
    pub degenerate: usize,
}

impl SweepResult {
    pub fn snr_db(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.policy.snr_db).collect()
    }

    pub fn frac_interference_limited(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.policy.frac_interference_limited)
            .collect()
    }
}

/// Per-draw, per-tilt, per-mode solved stats (`None` where degenerate).
type DrawStats = Vec<Vec<Option<InstanceStats>>>;

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let code = OstbcCode::<f64>::new(cfg.code);
    let a = code.dispersion();
    let t = code.t;
    let tilts = tilt_samples(cfg.n_tilt);
    let modes = cfg.policy.modes();

    let draws: Vec<DrawStats> = (0..cfg.n_channel)
        .into_par_iter()
        .map(|c| {
            let draw = ChannelDraw::new(cfg, c, t);
            tilts
                .iter()
                .map(|&tilt| {
                    modes
                        .iter()
                        .map(|&m| {
                            draw.design(cfg, &a, m, tilt, t)
                                .ok()
                                .map(|d| instance_stats(cfg, &d))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let instances = cfg.n_channel * cfg.n_tilt;
    let degenerate = draws
        .iter()
        .flatten()
        .filter(|per_mode| per_mode.iter().all(Option::is_none))
        .count();
    if degenerate * 100 > instances {
        return Err(Error::TooManyDegenerate {
            degenerate,
            total: instances,
            hint: "the secondary link may carry no energy in the requested mode (e.g. infinite XPD with mismatched polarization)".into(),
        });
    }

    let eta = cfg.eta();
    let mut points = Vec::with_capacity(cfg.power_db.len());
    for &p_db in &cfg.power_db {
        let p_tmax = db_to_linear(p_db);
        let mut policy_acc = Accumulator::default();
        let mut mode_acc: Vec<Accumulator> = modes.iter().map(|_| Accumulator::default()).collect();
        let mut chosen_counts = [0usize; 4];
        let mut per_draw_snr = Vec::with_capacity(draws.len());
        for draw in &draws {
            let mut sum = 0.0;
            let mut n = 0usize;
            for per_mode in draw {
                let gated: Vec<Option<Gated>> = per_mode
                    .iter()
                    .map(|s| s.map(|s| s.gate(cfg, p_tmax, eta)))
                    .collect();
                for (acc, g) in mode_acc.iter_mut().zip(&gated) {
                    if let Some(g) = g {
                        acc.push(g, cfg.averaging);
                    }
                }
                let best = argmax_first(
                    gated
                        .iter()
                        .map(|g| g.as_ref().map_or(f64::NEG_INFINITY, |g| g.snr)),
                );
                if let Some(Some(g)) = best.map(|i| &gated[i]) {
                    policy_acc.push(g, cfg.averaging);
                    chosen_counts[modes[best.unwrap()].index()] += 1;
                    sum += g.snr;
                    n += 1;
                }
            }
            per_draw_snr.push((n > 0).then(|| sum / n as f64));
        }
        points.push(PowerPoint {
            power_db: p_db,
            policy: policy_acc
                .finish(cfg.averaging)
                .expect("degenerate fraction checked above"),
            per_mode: modes
                .iter()
                .zip(&mode_acc)
                .map(|(m, acc)| (*m, acc.finish(cfg.averaging)))
                .collect(),
            chosen_counts,
            per_draw_snr,
            ber: None,
        });
    }

    Ok(SweepResult {
        seed: cfg.seed,
        policy: cfg.policy,
        eta,
        points,
        instances,
        degenerate,
    })
}

/// Sweep plus a BER simulation at each power point over the first
/// `ber_channels` draws (tilt index cycling through the grid).
pub fn run_sweep_with_ber(cfg: &SweepConfig) -> Result<SweepResult> {
    let mut result = run_sweep(cfg)?;
    let code = OstbcCode::<f64>::new(cfg.code);
    let a = code.dispersion();
    let t = code.t;
    let tilts = tilt_samples(cfg.n_tilt);
    let eta = cfg.eta();
    let n_draws = cfg.ber_channels.min(cfg.n_channel);

    let per_draw: Vec<Vec<(u64, u64)>> = (0..n_draws)
        .into_par_iter()
        .map(|c| {
            let draw = ChannelDraw::new(cfg, c, t);
            let tilt = tilts[c % tilts.len()];
            let designs: Vec<(LinkMode, MinVarianceDesign<f64>)> = cfg
                .policy
                .modes()
                .into_iter()
                .filter_map(|m| draw.design(cfg, &a, m, tilt, t).ok().map(|d| (m, d)))
                .collect();
            cfg.power_db
                .iter()
                .enumerate()
                .map(|(pi, &p_db)| {
                    let p_tmax = db_to_linear(p_db);
                    let best = argmax_first(designs.iter().map(|(_, d)| {
                        let (alpha, _) = d.gate(p_tmax, eta);
                        d.snr_at(alpha)
                    }));
                    let Some(best) = best else { return (0, 0) };
                    let (mode, design) = &designs[best];
                    let (alpha, _) = design.gate(p_tmax, eta);
                    let snapshot = LinkSnapshot {
                        a: a.clone(),
                        heq: realify_channel(&draw.sl_h[mode.index()], t),
                        w: design.w(alpha),
                        alpha,
                        rho_sr: cfg.rho_sr,
                        n_t: cfg.sl.n_t,
                    };
                    let mut rng =
                        stream_rng(cfg.seed, STREAM_NOISE, (c * cfg.power_db.len() + pi) as u64);
                    let stats = simulate_link(&snapshot, cfg.n_noise, 1.0, &mut rng);
                    (stats.bit_errors, stats.bits)
                })
                .collect()
        })
        .collect();

    for (pi, point) in result.points.iter_mut().enumerate() {
        let (errs, bits) = per_draw
            .iter()
            .fold((0u64, 0u64), |(e, b), d| (e + d[pi].0, b + d[pi].1));
        point.ber = (bits > 0).then(|| errs as f64 / bits as f64);
    }
    Ok(result)
}

#[derive(Debug)]
pub struct ModeComparison {
    pub results: Vec<(LinkMode, Result<SweepResult>)>,
}

impl ModeComparison {
    /// Matched (VV, HH) minus mismatched (VH, HV) mean SNR in dB per power
    /// point; `None` if any mode failed.
    pub fn gap_db(&self) -> Option<Vec<f64>> {
        let ok: Vec<(LinkMode, &SweepResult)> = self
            .results
            .iter()
            .map(|(m, r)| r.as_ref().ok().map(|r| (*m, r)))
            .collect::<Option<_>>()?;
        let n = ok[0].1.points.len();
        Some(
            (0..n)
                .map(|i| {
                    let mean = |matched: bool| {
                        let v: Vec<f64> = ok
                            .iter()
                            .filter(|(m, _)| m.is_matched() == matched)
                            .map(|(_, r)| db_to_linear(r.points[i].policy.snr_db))
                            .collect();
                        v.iter().sum::<f64>() / v.len() as f64
                    };
                    linear_to_db(mean(true)) - linear_to_db(mean(false))
                })
                .collect(),
        )
    }
}

pub fn compare_modes(cfg: &SweepConfig) -> ModeComparison {
    let results = LinkMode::ALL
        .iter()
        .map(|&m| {
            let mut c = cfg.clone();
            c.policy = ModePolicy::Fixed(m);
            (m, run_sweep(&c))
        })
        .collect();
    ModeComparison { results }
}

/// A solved precoder on a fixed secondary-link channel.
#[derive(Debug, Clone)]
pub struct LinkSnapshot {
    pub a: DispersionMatrix<f64>,
    /// Real equivalent secondary channel.
    pub heq: RealMat64,
    pub w: RealMat64,
    pub alpha: f64,
    pub rho_sr: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Detector gain fitted by least squares against the sent symbols.
    pub fitted_gain: f64,
    /// Fitted signal power over residual power at the detector output.
    pub empirical_snr: f64,
}

/// Sends `blocks` random QPSK blocks through the precoded link with complex
/// Gaussian noise of variance `noise_scale^2`, detects with `A^T Heq^T y`, and
/// slices by sign.
pub fn simulate_link(
    snap: &LinkSnapshot,
    blocks: usize,
    noise_scale: f64,
    rng: &mut impl Rng,
) -> LinkStats {
    let am = snap.a.matrix();
    let k = snap.a.symbol_dim() / 2;
    let amp = (snap.rho_sr / snap.n_t as f64).sqrt();
    // s_hat = amp * A^T Heq^T Heq W A s + A^T Heq^T n
    let detector = am.tr_mul(&snap.heq.transpose());
    let through = &detector * &snap.heq * &snap.w * am * amp;
    let noise_std = noise_scale * std::f64::consts::FRAC_1_SQRT_2;
    let rows = snap.heq.nrows();

    let mut bits = vec![false; 2 * k];
    let mut bit_errors = 0u64;
    let (mut cross, mut energy, mut out_energy) = (0.0, 0.0, 0.0);
    for _ in 0..blocks {
        for b in bits.iter_mut() {
            *b = rng.random();
        }
        let s = symbol_vector(&qpsk_mod::<f64>(&bits).expect("even bit count"));
        let noise = DVector::from_fn(rows, |_, _| {
            noise_std * rng.sample::<f64, _>(StandardNormal)
        });
        let out = &through * &s + &detector * noise;
        bit_errors += qpsk_demod(&out)
            .iter()
            .zip(&bits)
            .filter(|(a, b)| a != b)
            .count() as u64;
        cross += out.dot(&s);
        energy += s.norm_squared();
        out_energy += out.norm_squared();
    }
    let gain = cross / energy;
    // sum ||out - g s||^2 = sum ||out||^2 - 2 g <out, s> + g^2 ||s||^2
    let residual = (out_energy - 2.0 * gain * cross + gain * gain * energy).max(0.0);
    let total_bits = (2 * k * blocks) as u64;
    LinkStats {
        bits: total_bits,
        bit_errors,
        ber: bit_errors as f64 / total_bits as f64,
        fitted_gain: gain,
        empirical_snr: if residual > 0.0 {
            gain * gain * energy / residual
        } else {
            f64::INFINITY
        },
    }
}

/// QPSK bit error rate at post-detection SNR `snr` (linear, per symbol):
/// `Q(sqrt(snr))`.
pub fn qpsk_ber(snr: f64) -> f64 {
    0.5 * erfc((snr / 2.0).sqrt())
}

pub fn run_ber(snap: &LinkSnapshot, blocks: usize, rng: &mut impl Rng) -> f64 {
    simulate_link(snap, blocks, 1.0, rng).ber
}

/// Flat output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub power_db: f64,
    pub qt: String,
    pub qr: String,
    pub snr_db: f64,
    pub frac_interf_limited: f64,
    pub interference: f64,
    pub ber: Option<f64>,
}

/// One row per power point; under mode selection the mode columns carry the most
/// frequently chosen mode.
pub fn summarize(result: &SweepResult) -> Vec<Row> {
    result
        .points
        .iter()
        .map(|p| {
            let mode = match result.policy {
                ModePolicy::Fixed(m) => m,
                ModePolicy::SelectBest => p.modal_mode(),
            };
            Row {
                power_db: p.power_db,
                qt: mode.qt.to_string(),
                qr: mode.qr.to_string(),
                snr_db: p.policy.snr_db,
                frac_interf_limited: p.policy.frac_interference_limited,
                interference: p.policy.mean_interference,
                ber: p.ber,
            }
        })
        .collect()
}

/// Rows of every mode that solved, mode-major.
pub fn summarize_comparison(cmp: &ModeComparison) -> Vec<Row> {
    cmp.results
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .flat_map(summarize)
        .collect()
}
