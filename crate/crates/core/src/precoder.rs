//! Minimum-variance OSTBC precoder.
//!
//! For a secondary-link correlation `R_S = Heq^T Heq` and an interference-link
//! correlation `R_P`, the precoder minimizing `tr(W^T R_P W)` subject to the code
//! structure constraint `A^T R_S W A = alpha I` is
//!
//! ```text
//! Q = (A^T R_S R_P^-1 R_S A)^-1
//! W = (alpha / kappa) R_P^-1 R_S A Q A^T
//! ```
//!
//! with `A^T A = kappa I`. Writing `Y = R_P^-1 R_S A Q`, the figures of merit are
//! quadratic in `alpha`:
//!
//! ```text
//! interference   = (rho / N_t) alpha^2 tr(Q) / kappa
//! transmit power = (rho / N_t) alpha^2 delta / kappa,   delta = tr(Y^T Y)
//! gamma          = tr(Y^T R_S Y)
//! ```
//!
//! `alpha` is then the largest gain meeting both the power budget and the
//! interference cap. `R_P` is always regularized by `eps * tr(R_P) / dim * I`
//! before inversion; the regularized matrix is what the precoder (and the
//! interference it reports) sees, which can only overstate true interference.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::channel::Polarization;
use crate::ostbc::DispersionMatrix;
use crate::{Error, Real, RealMat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Binding {
    PowerLimited,
    InterferenceLimited,
}

/// Form of `Q` used by the solver.
#[allow(clippy::manual_non_exhaustive)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QForm {
    /// `(A^T R_S R_P^-1 R_S A)^-1`, the stationary point of the Lagrangian.
    #[default]
    Corrected,
    /// `(A^T R_S R_P^-1 A)^-1`. Does not satisfy the structure constraint; kept
    /// as a negative control for the verification suite.
    #[doc(hidden)]
    Printed,
}

/// Polarization modes of the secondary transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkMode {
    pub qt: Polarization,
    pub qr: Polarization,
}

impl LinkMode {
    /// Tie-break order for mode selection: VV, VH, HV, HH.
    pub const ALL: [LinkMode; 4] = [
        LinkMode::new(Polarization::V, Polarization::V),
        LinkMode::new(Polarization::V, Polarization::H),
        LinkMode::new(Polarization::H, Polarization::V),
        LinkMode::new(Polarization::H, Polarization::H),
    ];

    pub const fn new(qt: Polarization, qr: Polarization) -> Self {
        LinkMode { qt, qr }
    }

    pub fn is_matched(self) -> bool {
        self.qt == self.qr
    }

    pub fn index(self) -> usize {
        LinkMode::ALL.iter().position(|m| *m == self).unwrap()
    }
}

impl fmt::Display for LinkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.qt, self.qr)
    }
}

impl FromStr for LinkMode {
    type Err = Error;

    /// Two letters, transmitter first: `"VH"` is a V-pol ST with an H-pol SR.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter {
            name: "mode",
            reason: format!("`{s}` is not one of VV, VH, HV, HH"),
        };
        let mut chars = s.trim().chars();
        let (Some(t), Some(r), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(bad());
        };
        let pol = |c: char| c.to_string().parse::<Polarization>().map_err(|_| bad());
        Ok(LinkMode::new(pol(t)?, pol(r)?))
    }
}

#[derive(Debug, Clone)]
pub struct PrecoderInputs<T: Real> {
    pub a: DispersionMatrix<T>,
    /// Secondary-link correlation `Heq^T Heq`.
    pub r_s: RealMat<T>,
    /// Interference-link (ST to PR) correlation.
    pub r_p: RealMat<T>,
    pub rho_sr: T,
    pub p_tmax: T,
    pub eta: T,
    pub n_t: usize,
    pub epsilon_reg: T,
    pub q_form: QForm,
}

impl<T: Real> PrecoderInputs<T> {
    pub fn validate(&self) -> Result<()> {
        let dim = self.a.block_dim();
        for (name, m) in [("r_s", &self.r_s), ("r_p", &self.r_p)] {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    what: name,
                    expected: dim,
                    got: m.nrows(),
                });
            }
        }
        for (name, v) in [
            ("rho_sr", self.rho_sr),
            ("p_tmax", self.p_tmax),
            ("eta", self.eta),
        ] {
            if v <= T::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive".into(),
                });
            }
        }
        if self.epsilon_reg < T::zero() {
            return Err(Error::InvalidParameter {
                name: "epsilon_reg",
                reason: "must be non-negative".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PrecoderSolution<T: Real> {
    pub w: RealMat<T>,
    pub alpha: T,
    pub tr_q: T,
    pub gamma: T,
    pub delta: T,
    /// Post-detection SNR of the linear soft detector.
    pub snr_est: T,
    /// `(rho / N_t) tr(W^T R_S W)`, the received signal power per unit noise
    /// before detection (`(rho / N_t) alpha^2 gamma / kappa`).
    pub receive_snr: T,
    pub transmit_power: T,
    pub interference: T,
    pub binding: Binding,
}

/// `R_P + eps * tr(R_P) / dim * I`.
pub fn regularize<T: Real>(r_p: &RealMat<T>, epsilon_reg: T) -> RealMat<T> {
    let dim = r_p.nrows();
    let shift = epsilon_reg * r_p.trace() / T::of_usize(dim);
    let mut out = r_p.clone();
    for i in 0..dim {
        out[(i, i)] += shift;
    }
    out
}

fn degenerate(msg: &str) -> Error {
    Error::DegenerateGeometry(msg.to_string())
}

fn cholesky<T: Real>(m: RealMat<T>, what: &str) -> Result<Cholesky<T, Dyn>> {
    let chol = Cholesky::new(m).ok_or_else(|| degenerate(what))?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = (diag.min(), diag.max());
    // pivot ratio squared bounds the condition number from below
    if hi <= T::zero() || (lo / hi) * (lo / hi) < T::default_epsilon() * T::lit(1e3) {
        return Err(degenerate(what));
    }
    Ok(chol)
}

/// Closed-form solution for a fixed channel state; gated per power budget by
/// [`MinVarianceDesign::solve`].
#[derive(Debug, Clone)]
pub struct MinVarianceDesign<T: Real> {
    a: DispersionMatrix<T>,
    r_s: RealMat<T>,
    r_p_reg: RealMat<T>,
    q: RealMat<T>,
    tr_q: T,
    gamma: T,
    delta: T,
    /// `W` at `alpha = 1`.
    shape: RealMat<T>,
    /// `tr(A^T R_S A)`, twice the post-detection noise power.
    detector_gain: T,
    rho_sr: T,
    n_t: usize,
}

impl<T: Real> MinVarianceDesign<T> {
    pub fn new(inputs: &PrecoderInputs<T>) -> Result<Self> {
        inputs.validate()?;
        let a = &inputs.a;
        let am = a.matrix();
        if inputs.r_s.trace() <= T::zero() {
            return Err(degenerate("secondary-link correlation is zero"));
        }
        let r_p_reg = regularize(&inputs.r_p, inputs.epsilon_reg);
        let chol_p = cholesky(r_p_reg.clone(), "interference correlation is singular")?;
        let rsa = &inputs.r_s * am;
        // X = R_P^-1 R_S A
        let x = chol_p.solve(&rsa);

        let q = match inputs.q_form {
            QForm::Corrected => {
                let g = chol_p
                    .l_dirty()
                    .solve_lower_triangular(&rsa)
                    .ok_or_else(|| degenerate("interference correlation is singular"))?;
                let q_inv = g.tr_mul(&g);
                cholesky(q_inv, "R_S A is rank deficient")?.inverse()
            }
            QForm::Printed => {
                let inner = x.tr_mul(am);
                inner
                    .try_inverse()
                    .ok_or_else(|| degenerate("R_S A is rank deficient"))?
            }
        };
        let y = &x * &q;
        let gamma = (y.tr_mul(&inputs.r_s) * &y).trace();
        let delta = y.norm_squared();
        let shape = (&y * am.transpose()) / a.kappa();
        let detector_gain = am.tr_mul(&rsa).trace();
        Ok(MinVarianceDesign {
            a: a.clone(),
            r_s: inputs.r_s.clone(),
            r_p_reg,
            tr_q: q.trace(),
            q,
            gamma,
            delta,
            shape,
            detector_gain,
            rho_sr: inputs.rho_sr,
            n_t: inputs.n_t,
        })
    }

    pub fn q(&self) -> &RealMat<T> {
        &self.q
    }

    pub fn tr_q(&self) -> T {
        self.tr_q
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn kappa(&self) -> T {
        self.a.kappa()
    }

    pub fn dispersion(&self) -> &DispersionMatrix<T> {
        &self.a
    }

    pub fn regularized_interference_correlation(&self) -> &RealMat<T> {
        &self.r_p_reg
    }

    pub fn w(&self, alpha: T) -> RealMat<T> {
        &self.shape * alpha
    }

    /// Closed-form interference at gain `alpha`.
    pub fn interference_at(&self, alpha: T) -> T {
        self.scale() * alpha * alpha * self.tr_q / self.kappa()
    }

    /// Closed-form transmit power at gain `alpha`.
    pub fn transmit_power_at(&self, alpha: T) -> T {
        self.scale() * alpha * alpha * self.delta / self.kappa()
    }

    pub fn snr_at(&self, alpha: T) -> T {
        snr_estimate(
            self.rho_sr,
            self.n_t,
            alpha,
            self.a.symbol_dim(),
            self.detector_gain,
        )
    }

    pub fn receive_snr_at(&self, alpha: T) -> T {
        self.scale() * alpha * alpha * self.gamma / self.kappa()
    }

    fn scale(&self) -> T {
        self.rho_sr / T::of_usize(self.n_t)
    }

    pub fn gate(&self, p_tmax: T, eta: T) -> (T, Binding) {
        gate_alpha(
            self.kappa(),
            self.n_t,
            self.rho_sr,
            p_tmax,
            eta,
            self.tr_q,
            self.delta,
        )
    }

    pub fn solve(&self, p_tmax: T, eta: T) -> PrecoderSolution<T> {
        let (alpha, binding) = self.gate(p_tmax, eta);
        PrecoderSolution {
            w: self.w(alpha),
            alpha,
            tr_q: self.tr_q,
            gamma: self.gamma,
            delta: self.delta,
            snr_est: self.snr_at(alpha),
            receive_snr: self.receive_snr_at(alpha),
            transmit_power: self.transmit_power_at(alpha),
            interference: self.interference_at(alpha),
            binding,
        }
    }

    /// `||A^T R_S W A - alpha I||_F / (alpha sqrt(2K))` at `alpha = 1`.
    pub fn structure_residual(&self) -> T {
        structure_residual(&self.a, &self.r_s, &self.shape, T::one())
    }
}

/// Solves the full problem: closed form, gate, and figures of merit.
pub fn solve<T: Real>(inputs: &PrecoderInputs<T>) -> Result<PrecoderSolution<T>> {
    Ok(MinVarianceDesign::new(inputs)?.solve(inputs.p_tmax, inputs.eta))
}

/// `Q` and `tr(Q)` for the corrected form.
pub fn compute_q<T: Real>(
    a: &DispersionMatrix<T>,
    r_s: &RealMat<T>,
    r_p: &RealMat<T>,
    epsilon_reg: T,
) -> Result<(RealMat<T>, T)> {
    let inputs = PrecoderInputs {
        a: a.clone(),
        r_s: r_s.clone(),
        r_p: r_p.clone(),
        rho_sr: T::one(),
        p_tmax: T::one(),
        eta: T::one(),
        n_t: 1,
        epsilon_reg,
        q_form: QForm::Corrected,
    };
    let d = MinVarianceDesign::new(&inputs)?;
    Ok((d.q, d.tr_q))
}

pub fn solve_w<T: Real>(inputs: &PrecoderInputs<T>, alpha: T) -> Result<RealMat<T>> {
    Ok(MinVarianceDesign::new(inputs)?.w(alpha))
}

/// `(rho / N_t) tr(W^T R W)` by direct evaluation.
pub fn interference_power<T: Real>(w: &RealMat<T>, r: &RealMat<T>, rho_sr: T, n_t: usize) -> T {
    rho_sr / T::of_usize(n_t) * (w.tr_mul(r) * w).trace()
}

/// `(rho / N_t) tr(W^T W)` by direct evaluation.
pub fn transmit_power<T: Real>(w: &RealMat<T>, rho_sr: T, n_t: usize) -> T {
    rho_sr / T::of_usize(n_t) * w.norm_squared()
}

/// `gamma` and `delta` evaluated literally from their trace definitions with an
/// explicit inverse of the regularized interference correlation.
pub fn gamma_delta<T: Real>(
    a: &DispersionMatrix<T>,
    r_s: &RealMat<T>,
    r_p: &RealMat<T>,
    q: &RealMat<T>,
    epsilon_reg: T,
) -> Result<(T, T)> {
    let am = a.matrix();
    let inv = regularize(r_p, epsilon_reg)
        .try_inverse()
        .ok_or_else(|| degenerate("interference correlation is singular"))?;
    let rs_inv = r_s * &inv;
    let gamma = (q * am.transpose() * &rs_inv * &rs_inv * r_s * am * q).trace();
    let delta = (q * am.transpose() * r_s * &inv * &inv * r_s * am * q).trace();
    Ok((gamma, delta))
}

/// Largest gain meeting both the power budget and the interference cap.
/// Ties resolve to [`Binding::InterferenceLimited`].
pub fn gate_alpha<T: Real>(
    kappa: T,
    n_t: usize,
    rho_sr: T,
    p_tmax: T,
    eta: T,
    tr_q: T,
    delta: T,
) -> (T, Binding) {
    let base = kappa * T::of_usize(n_t) / rho_sr;
    let power = (base * p_tmax / delta).sqrt();
    let interference = (base * eta / tr_q).sqrt();
    if interference <= power {
        (interference, Binding::InterferenceLimited)
    } else {
        (power, Binding::PowerLimited)
    }
}

/// Post-detection SNR of `A^T Heq^T y` given the structure constraint holds:
/// signal `(rho / N_t) alpha^2` per unit-energy symbol against noise
/// `tr(A^T R_S A) / 2K` per real coordinate.
pub fn snr_estimate<T: Real>(
    rho_sr: T,
    n_t: usize,
    alpha: T,
    symbol_dim: usize,
    detector_gain: T,
) -> T {
    rho_sr / T::of_usize(n_t) * alpha * alpha * T::of_usize(symbol_dim) / detector_gain
}

pub fn structure_residual<T: Real>(
    a: &DispersionMatrix<T>,
    r_s: &RealMat<T>,
    w: &RealMat<T>,
    alpha: T,
) -> T {
    let am = a.matrix();
    let m = am.tr_mul(r_s) * w * am;
    let n = m.nrows();
    (m - DMatrix::identity(n, n) * alpha).norm() / (alpha * T::of_usize(n).sqrt())
}

#[derive(Debug, Clone)]
pub struct ModeSelection<T: Real> {
    pub solutions: Vec<(LinkMode, PrecoderSolution<T>)>,
    pub chosen: LinkMode,
}

impl<T: Real> ModeSelection<T> {
    pub fn chosen_solution(&self) -> &PrecoderSolution<T> {
        &self
            .solutions
            .iter()
            .find(|(m, _)| *m == self.chosen)
            .expect("chosen mode present")
            .1
    }
}

/// Index of the largest value; earlier entries win ties.
pub fn argmax_first<T: PartialOrd + Copy>(values: impl IntoIterator<Item = T>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if v.partial_cmp(&b) != Some(std::cmp::Ordering::Greater) => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Picks the mode with the largest SNR estimate, ties broken in
/// [`LinkMode::ALL`] order.
pub fn select_mode<T: Real>(
    mut solutions: Vec<(LinkMode, PrecoderSolution<T>)>,
) -> Option<ModeSelection<T>> {
    solutions.sort_by_key(|(m, _)| m.index());
    let best = argmax_first(solutions.iter().map(|(_, s)| s.snr_est))?;
    let chosen = solutions[best].0;
    Some(ModeSelection { solutions, chosen })
}

/// Interference cap from a primary-link SINR threshold:
/// `eta = P_primary_rx / SINR_threshold - P_noise`.
pub fn eta_from_sinr(p_primary_rx: f64, sinr_threshold_db: f64, p_noise: f64) -> Result<f64> {
    let eta = p_primary_rx / 10f64.powf(sinr_threshold_db / 10.0) - p_noise;
    if eta > 0.0 && eta.is_finite() {
        Ok(eta)
    } else {
        Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("SINR threshold leaves no interference room ({eta})"),
        })
    }
}

/// Brute-force solution of `min tr(W^T R W) s.t. A^T R_S W A = alpha I` through
/// the dense KKT system over `vec(W)`. Intended for small codes only: the system
/// has `dim^2 + (2K)^2` unknowns.
pub fn oracle_solve<T: Real>(inputs: &PrecoderInputs<T>, alpha: T) -> Result<RealMat<T>> {
    inputs.validate()?;
    let am = inputs.a.matrix();
    let n = am.nrows();
    let m = am.ncols() * am.ncols();
    let r = regularize(&inputs.r_p, inputs.epsilon_reg);

    // vec(B W C) = (C^T (x) B) vec(W)
    let constraint = am.transpose().kronecker(&am.tr_mul(&inputs.r_s));
    let hessian = DMatrix::<T>::identity(n, n).kronecker(&r) * T::lit(2.0);

    let size = n * n + m;
    let mut kkt = DMatrix::<T>::zeros(size, size);
    kkt.view_mut((0, 0), (n * n, n * n)).copy_from(&hessian);
    kkt.view_mut((n * n, 0), (m, n * n)).copy_from(&constraint);
    kkt.view_mut((0, n * n), (n * n, m))
        .copy_from(&constraint.transpose());

    let mut rhs = nalgebra::DVector::<T>::zeros(size);
    let k2 = am.ncols();
    for i in 0..k2 {
        rhs[n * n + i * k2 + i] = alpha;
    }
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| degenerate("singular KKT system"))?;
    Ok(DMatrix::from_column_slice(n, n, &sol.as_slice()[..n * n]))
}
