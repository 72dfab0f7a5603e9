//! Polarized multipath channel generator.
//!
//! Each path carries a 2x2 polarization matrix `[[g_vv, g_vh], [g_hv, g_hh]]`
//! (rows: receive polarization, columns: transmit polarization) with unit-variance
//! co-polar gains and cross-polar gains attenuated by the XPD. Arrays are uniform
//! linear with isotropic elements, one subpath per path, equal path powers and a
//! flat frequency response. The receive polarization projection can be rotated by
//! a tilt angle, which models the unknown orientation of the primary receiver.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::realify::realify_channel;
use crate::{ComplexMat64, Error, RealMat64, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    V,
    H,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::V, Polarization::H];

    fn index(self) -> usize {
        match self {
            Polarization::V => 0,
            Polarization::H => 1,
        }
    }

    /// Unit projection vector `(v, h)` of this mode rotated by `tilt` radians.
    pub fn projection(self, tilt: f64) -> [f64; 2] {
        let (s, c) = tilt.sin_cos();
        match self {
            Polarization::V => [c, s],
            Polarization::H => [-s, c],
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::V => "V",
            Polarization::H => "H",
        })
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "V" | "v" => Ok(Polarization::V),
            "H" | "h" => Ok(Polarization::H),
            other => Err(Error::InvalidParameter {
                name: "polarization",
                reason: format!("`{other}` is not V or H"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub n_path: usize,
    /// Cross-polar discrimination in dB; `+inf` removes all cross coupling.
    pub xpd_db: f64,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl LinkConfig {
    pub fn new(n_t: usize, n_r: usize, n_path: usize, xpd_db: f64) -> Self {
        LinkConfig {
            n_t,
            n_r,
            n_path,
            xpd_db,
            spacing: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_t", self.n_t),
            ("n_r", self.n_r),
            ("n_path", self.n_path),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be at least 1".into(),
                });
            }
        }
        if self.xpd_db.is_nan() || self.xpd_db == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter {
                name: "xpd_db",
                reason: format!("{} is not a usable XPD", self.xpd_db),
            });
        }
        if !self.spacing.is_finite() || self.spacing < 0.0 {
            return Err(Error::InvalidParameter {
                name: "spacing",
                reason: format!("{} is not a usable element spacing", self.spacing),
            });
        }
        Ok(())
    }

    /// Cross-polar power relative to co-polar power, `10^(-XPD/10)`.
    pub fn cross_polar_power(&self) -> f64 {
        10f64.powf(-self.xpd_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// `gains[rx][tx]` indexed by [`Polarization`] (V = 0, H = 1).
    pub gains: [[Complex64; 2]; 2],
    pub aod: f64,
    pub aoa: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

fn polarization_gains(rng: &mut impl Rng, cross: f64) -> [[Complex64; 2]; 2] {
    let vv = complex_gaussian(rng, 1.0);
    let vh = complex_gaussian(rng, cross);
    let hv = complex_gaussian(rng, cross);
    let hh = complex_gaussian(rng, 1.0);
    [[vv, vh], [hv, hh]]
}

pub fn draw_paths(cfg: &LinkConfig, rng: &mut impl Rng) -> PathSet {
    let cross = cfg.cross_polar_power();
    let power = 1.0 / cfg.n_path as f64;
    let paths = (0..cfg.n_path)
        .map(|_| {
            let gains = polarization_gains(rng, cross);
            let aod = rng.random_range(0.0..TAU);
            let aoa = rng.random_range(0.0..TAU);
            Path {
                gains,
                aod,
                aoa,
                power,
            }
        })
        .collect();
    PathSet { paths }
}

/// Same geometry (angles, powers), fresh polarization gains.
pub fn redraw_gains(paths: &PathSet, cfg: &LinkConfig, rng: &mut impl Rng) -> PathSet {
    let cross = cfg.cross_polar_power();
    PathSet {
        paths: paths
            .paths
            .iter()
            .map(|p| Path {
                gains: polarization_gains(rng, cross),
                ..p.clone()
            })
            .collect(),
    }
}

fn steering(n: usize, spacing: f64, angle: f64) -> impl Iterator<Item = Complex64> {
    let phase = TAU * spacing * angle.sin();
    (0..n).map(move |i| Complex64::from_polar(1.0, phase * i as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `n_r x n_t` complex gains.
    pub h: ComplexMat64,
    pub qt: Polarization,
    pub qr: Polarization,
    pub tilt: f64,
}

pub fn realize(
    paths: &PathSet,
    qt: Polarization,
    qr: Polarization,
    tilt: f64,
    cfg: &LinkConfig,
) -> ChannelRealization {
    let proj = qr.projection(tilt);
    let mut h = ComplexMat64::zeros(cfg.n_r, cfg.n_t);
    for p in &paths.paths {
        let g =
            (p.gains[0][qt.index()] * proj[0] + p.gains[1][qt.index()] * proj[1]) * p.power.sqrt();
        let a_r: Vec<Complex64> = steering(cfg.n_r, cfg.spacing, p.aoa).collect();
        let a_t: Vec<Complex64> = steering(cfg.n_t, cfg.spacing, p.aod).collect();
        for (u, ar) in a_r.iter().enumerate() {
            for (s, at) in a_t.iter().enumerate() {
                h[(u, s)] += g * ar * at;
            }
        }
    }
    ChannelRealization { h, qt, qr, tilt }
}

pub fn equivalent(h: &ChannelRealization, t: usize) -> RealMat64 {
    realify_channel(&h.h, t)
}

/// Real symmetric PSD equivalent transmit correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(RealMat64);

impl CorrelationMatrix {
    /// Symmetrizes its input.
    pub fn new(r: RealMat64) -> Self {
        let sym = (&r + r.transpose()) * 0.5;
        CorrelationMatrix(sym)
    }

    /// `Heq^T Heq` of a single realization.
    pub fn instantaneous(h: &ComplexMat64, t: usize) -> Self {
        Self::from_gram(&(h.adjoint() * h), t)
    }

    /// Realification of `I_T (x) G` for a Hermitian `n_t x n_t` Gram matrix `G`.
    pub fn from_gram(gram: &ComplexMat64, t: usize) -> Self {
        Self::new(realify_channel(gram, t))
    }

    pub fn matrix(&self) -> &RealMat64 {
        &self.0
    }

    pub fn into_matrix(self) -> RealMat64 {
        self.0
    }
}

/// Sample mean of `Heq^T Heq` over the given channel realizations.
pub fn correlation<I>(samples: I, t: usize) -> Result<CorrelationMatrix>
where
    I: IntoIterator<Item = ComplexMat64>,
{
    let mut acc: Option<ComplexMat64> = None;
    let mut n = 0usize;
    for h in samples {
        let g = h.adjoint() * &h;
        match acc.as_mut() {
            Some(a) => *a += g,
            None => acc = Some(g),
        }
        n += 1;
    }
    let acc = acc.ok_or(Error::InvalidParameter {
        name: "n_samples",
        reason: "must be at least 1".into(),
    })?;
    Ok(CorrelationMatrix::from_gram(&acc.unscale(n as f64), t))
}

/// Correlation over `n_samples` gain redraws of a fixed path geometry.
#[allow(clippy::too_many_arguments)]
pub fn spatial_correlation(
    paths: &PathSet,
    cfg: &LinkConfig,
    qt: Polarization,
    qr: Polarization,
    tilt: f64,
    t: usize,
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<CorrelationMatrix> {
    let samples = (0..n_samples).map(|_| {
        let fresh = redraw_gains(paths, cfg, rng);
        realize(&fresh, qt, qr, tilt, cfg).h
    });
    correlation(samples, t)
}

/// Transmit Gram sums of a link seen through a tilted receive polarization, split
/// so that any tilt can be evaluated without redrawing.
///
/// With `H(tilt) = p_v H_V + p_h H_H`, the Gram is
/// `p_v^2 G_vv + p_h^2 G_hh + p_v p_h G_cross`.
#[derive(Debug, Clone)]
pub struct TiltedGram {
    vv: ComplexMat64,
    hh: ComplexMat64,
    cross: ComplexMat64,
    qr: Polarization,
}

impl TiltedGram {
    /// Averages over `samples`, each a gain redraw of the same geometry.
    pub fn from_samples(
        samples: &[PathSet],
        cfg: &LinkConfig,
        qt: Polarization,
        qr: Polarization,
    ) -> Self {
        let n = cfg.n_t;
        let mut vv = ComplexMat64::zeros(n, n);
        let mut hh = ComplexMat64::zeros(n, n);
        let mut cross = ComplexMat64::zeros(n, n);
        for s in samples {
            let h_v = realize(s, qt, Polarization::V, 0.0, cfg).h;
            let h_h = realize(s, qt, Polarization::H, 0.0, cfg).h;
            vv += h_v.adjoint() * &h_v;
            hh += h_h.adjoint() * &h_h;
            let c = h_v.adjoint() * &h_h;
            cross += &c + c.adjoint();
        }
        let m = samples.len().max(1) as f64;
        TiltedGram {
            vv: vv.unscale(m),
            hh: hh.unscale(m),
            cross: cross.unscale(m),
            qr,
        }
    }

    pub fn gram_at(&self, tilt: f64) -> ComplexMat64 {
        let [pv, ph] = self.qr.projection(tilt);
        self.vv.scale(pv * pv) + self.hh.scale(ph * ph) + self.cross.scale(pv * ph)
    }

    pub fn correlation_at(&self, tilt: f64, t: usize) -> CorrelationMatrix {
        CorrelationMatrix::from_gram(&self.gram_at(tilt), t)
    }
}

/// Midpoint grid over `[0, pi/2)`.
pub fn tilt_samples(n_tilt: usize) -> Vec<f64> {
    let step = FRAC_PI_2 / n_tilt as f64;
    (0..n_tilt).map(|j| (j as f64 + 0.5) * step).collect()
}
