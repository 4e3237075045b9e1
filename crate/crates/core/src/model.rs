//! Physical parameters of the ring, its physical channel and the phantom
//! (scattering-loss) channel, plus the damping rates derived from them.
//!
//! All quantities are SI. Decay rates are amplitude damping rates in s⁻¹;
//! a figure quoted as "10 GHz" is taken to mean 1e10 s⁻¹.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Default relative tolerance for flagging critical coupling.
pub const CRITICAL_COUPLING_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pump,
    Signal,
    Idler,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Pump, Mode::Signal, Mode::Idler];

    /// Signal and idler exchange roles; the pump maps to itself.
    pub fn partner(self) -> Mode {
        match self {
            Mode::Pump => Mode::Pump,
            Mode::Signal => Mode::Idler,
            Mode::Idler => Mode::Signal,
        }
    }
}

/// Output/input port of a ring mode: the physical bus waveguide or the
/// phantom channel that carries scattered photons away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Channel,
    Phantom,
}

impl Port {
    pub const ALL: [Port; 2] = [Port::Channel, Port::Phantom];

    pub(crate) fn index(self) -> usize {
        match self {
            Port::Channel => 0,
            Port::Phantom => 1,
        }
    }
}

/// Linear parameters of one ring resonance and its two continua.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    /// Reference angular frequency, rad/s.
    pub omega: f64,
    /// Group speed in the physical channel, m/s.
    pub v: f64,
    /// Group speed in the phantom channel, m/s.
    pub u: f64,
    /// Ring–channel coupling, (m/s)·s^(-1/2).
    pub gamma: Complex64,
    /// Ring–phantom coupling, same units as `gamma`.
    pub mu: Complex64,
}

impl ModeParams {
    /// Builds a mode from its channel and loss damping rates (s⁻¹), with
    /// real positive coupling constants.
    pub fn from_rates(omega: f64, v: f64, u: f64, channel_rate: f64, loss_rate: f64) -> Result<Self> {
        if !(channel_rate >= 0.0) || !channel_rate.is_finite() {
            return Err(Error::invalid("channel_rate", format!("{channel_rate} is not a finite non-negative rate")));
        }
        if !(loss_rate >= 0.0) || !loss_rate.is_finite() {
            return Err(Error::invalid("loss_rate", format!("{loss_rate} is not a finite non-negative rate")));
        }
        let mode = ModeParams {
            omega,
            v,
            u,
            gamma: Complex64::new((2.0 * v * channel_rate).sqrt(), 0.0),
            mu: Complex64::new((2.0 * u * loss_rate).sqrt(), 0.0),
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::invalid("v", format!("channel speed must be positive, got {}", self.v)));
        }
        if !(self.u > 0.0) || !self.u.is_finite() {
            return Err(Error::invalid("u", format!("phantom speed must be positive, got {}", self.u)));
        }
        if !self.omega.is_finite() {
            return Err(Error::invalid("omega", "reference frequency must be finite"));
        }
        if !(self.gamma.re.is_finite() && self.gamma.im.is_finite() && self.mu.re.is_finite() && self.mu.im.is_finite()) {
            return Err(Error::invalid("gamma/mu", "coupling constants must be finite"));
        }
        if self.total_rate() <= 0.0 {
            return Err(Error::invalid("gamma/mu", "total damping rate must be positive"));
        }
        Ok(())
    }

    /// Γ = |γ|²/(2v).
    pub fn channel_rate(&self) -> f64 {
        self.gamma.norm_sqr() / (2.0 * self.v)
    }

    /// M = |μ|²/(2u).
    pub fn loss_rate(&self) -> f64 {
        self.mu.norm_sqr() / (2.0 * self.u)
    }

    /// Γ̄ = Γ + M.
    pub fn total_rate(&self) -> f64 {
        self.channel_rate() + self.loss_rate()
    }

    /// Phantom coupling rescaled to the physical-channel speed, μ·√(v/u).
    ///
    /// With the phantom continuum relabelled onto the physical κ axis,
    /// every response function takes the same form for both ports with
    /// `gamma` replaced by this constant.
    pub fn phantom_coupling(&self) -> Complex64 {
        self.mu * (self.v / self.u).sqrt()
    }

    pub fn port_coupling(&self, port: Port) -> Complex64 {
        match port {
            Port::Channel => self.gamma,
            Port::Phantom => self.phantom_coupling(),
        }
    }

    /// Complex Lorentzian denominator −iκv + Γ̄ of the ring response.
    pub fn resonance_denominator(&self, kappa: f64) -> Complex64 {
        Complex64::new(self.total_rate(), -kappa * self.v)
    }
}

/// Full ring–channel–phantom system. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RingSystemRaw", into = "RingSystemRaw")]
pub struct RingSystem {
    pump: ModeParams,
    signal: ModeParams,
    idler: ModeParams,
    lambda: Complex64,
    eta: f64,
    zeta: f64,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct RingSystemRaw {
    pump: ModeParams,
    signal: ModeParams,
    idler: ModeParams,
    lambda: Complex64,
    eta: f64,
    zeta: f64,
}

impl TryFrom<RingSystemRaw> for RingSystem {
    type Error = Error;
    fn try_from(r: RingSystemRaw) -> Result<Self> {
        RingSystem::new(r.pump, r.signal, r.idler, r.lambda, r.eta, r.zeta)
    }
}

impl From<RingSystem> for RingSystemRaw {
    fn from(s: RingSystem) -> Self {
        RingSystemRaw {
            pump: s.pump,
            signal: s.signal,
            idler: s.idler,
            lambda: s.lambda,
            eta: s.eta,
            zeta: s.zeta,
        }
    }
}

impl RingSystem {
    pub fn new(
        pump: ModeParams,
        signal: ModeParams,
        idler: ModeParams,
        lambda: Complex64,
        eta: f64,
        zeta: f64,
    ) -> Result<Self> {
        pump.validate()?;
        signal.validate()?;
        idler.validate()?;
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        if !eta.is_finite() || !zeta.is_finite() {
            return Err(Error::invalid("eta/zeta", "must be finite"));
        }
        let delta = signal.omega + idler.omega - 2.0 * pump.omega;
        if !delta.is_finite() {
            return Err(Error::invalid("omega", "detuning is not finite"));
        }
        Ok(RingSystem {
            pump,
            signal,
            idler,
            lambda,
            eta,
            zeta,
            delta,
        })
    }

    pub fn pump(&self) -> &ModeParams {
        &self.pump
    }
    pub fn signal(&self) -> &ModeParams {
        &self.signal
    }
    pub fn idler(&self) -> &ModeParams {
        &self.idler
    }

    pub fn mode(&self, mode: Mode) -> &ModeParams {
        match mode {
            Mode::Pump => &self.pump,
            Mode::Signal => &self.signal,
            Mode::Idler => &self.idler,
        }
    }

    /// SFWM coupling λ, rad/s.
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }
    /// Pump self-phase modulation coefficient η, rad/s.
    pub fn eta(&self) -> f64 {
        self.eta
    }
    /// Pump–signal/idler cross-phase modulation coefficient ζ, rad/s.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Δ = ω_S + ω_I − 2ω_P.
    pub fn detuning(&self) -> f64 {
        self.delta
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Result<Self> {
        Self::new(self.pump, self.signal, self.idler, lambda, self.eta, self.zeta)
    }

    pub fn with_nonlinear(&self, lambda: Complex64, eta: f64, zeta: f64) -> Result<Self> {
        Self::new(self.pump, self.signal, self.idler, lambda, eta, zeta)
    }

    pub fn with_mode(&self, mode: Mode, params: ModeParams) -> Result<Self> {
        let mut next = self.clone();
        match mode {
            Mode::Pump => next.pump = params,
            Mode::Signal => next.signal = params,
            Mode::Idler => next.idler = params,
        }
        Self::new(next.pump, next.signal, next.idler, next.lambda, next.eta, next.zeta)
    }

    /// Exchanges the signal and idler resonances.
    pub fn swap_signal_idler(&self) -> Self {
        Self::new(self.pump, self.idler, self.signal, self.lambda, self.eta, self.zeta)
            .expect("swapping validated modes keeps them valid")
    }

    pub fn derive_rates(&self) -> DerivedRates {
        derive_rates_with_tol(self, CRITICAL_COUPLING_REL_TOL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRates {
    pub channel: f64,
    pub loss: f64,
    pub total: f64,
    pub critically_coupled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub pump: ModeRates,
    pub signal: ModeRates,
    pub idler: ModeRates,
}

impl DerivedRates {
    pub fn mode(&self, mode: Mode) -> &ModeRates {
        match mode {
            Mode::Pump => &self.pump,
            Mode::Signal => &self.signal,
            Mode::Idler => &self.idler,
        }
    }
}

pub fn mode_rates(mode: &ModeParams, rel_tol: f64) -> ModeRates {
    let channel = mode.channel_rate();
    let loss = mode.loss_rate();
    let total = channel + loss;
    ModeRates {
        channel,
        loss,
        total,
        critically_coupled: (channel - loss).abs() <= rel_tol * total,
    }
}

pub fn derive_rates_with_tol(sys: &RingSystem, rel_tol: f64) -> DerivedRates {
    DerivedRates {
        pump: mode_rates(&sys.pump, rel_tol),
        signal: mode_rates(&sys.signal, rel_tol),
        idler: mode_rates(&sys.idler, rel_tol),
    }
}

/// Singles-to-coincidences ratio in the weak-pump limit,
/// (Γ_S M_I + Γ_I M_S)/(Γ_S Γ_I). `None` when either channel rate vanishes.
pub fn singles_ratio_closed_form(rates: &DerivedRates) -> Option<f64> {
    let (gs, gi) = (rates.signal.channel, rates.idler.channel);
    if gs <= 0.0 || gi <= 0.0 {
        return None;
    }
    Some((gs * rates.idler.loss + gi * rates.signal.loss) / (gs * gi))
}

/// Crude material-level inputs for estimating the nonlinear couplings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialEstimate {
    /// χ⁽³⁾, m²/V².
    pub chi3: f64,
    /// Refractive index of the ring.
    pub n: f64,
    /// Ring mode volume, m³.
    pub mode_volume: f64,
    /// Pump angular frequency, rad/s.
    pub omega_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearCouplings {
    pub lambda: f64,
    pub eta: f64,
    pub zeta: f64,
}

/// λ ≈ 3ħω_P²χ⁽³⁾/(4ε₀n⁴Ω_ring), η = λ/2, ζ = 2λ, all in rad/s.
pub fn estimate_nonlinear_couplings(m: &MaterialEstimate) -> Result<NonlinearCouplings> {
    if !(m.n > 0.0) {
        return Err(Error::invalid("n", "refractive index must be positive"));
    }
    if !(m.mode_volume > 0.0) {
        return Err(Error::invalid("mode_volume", "mode volume must be positive"));
    }
    let lambda = 3.0 * HBAR * m.omega_p * m.omega_p * m.chi3 / (4.0 * EPSILON_0 * m.n.powi(4) * m.mode_volume);
    Ok(NonlinearCouplings {
        lambda,
        eta: lambda / 2.0,
        zeta: 2.0 * lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mode(gamma2: f64, v: f64, mu2: f64, u: f64) -> ModeParams {
        ModeParams {
            omega: 0.0,
            v,
            u,
            gamma: Complex64::new(gamma2.sqrt(), 0.0),
            mu: Complex64::new(mu2.sqrt(), 0.0),
        }
    }

    #[test]
    fn lossless_rates() {
        let m = mode(2.0, 1.0, 0.0, 1.0);
        let r = mode_rates(&m, CRITICAL_COUPLING_REL_TOL);
        assert_relative_eq!(r.channel, 1.0, epsilon = 1e-15);
        assert_eq!(r.loss, 0.0);
        assert_relative_eq!(r.total, 1.0, epsilon = 1e-15);
        assert!(!r.critically_coupled);
    }

    #[test]
    fn critical_coupling_flag() {
        let m = mode(4.0, 2.0, 4.0, 2.0);
        let r = mode_rates(&m, CRITICAL_COUPLING_REL_TOL);
        assert_relative_eq!(r.channel, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.loss, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.total, 2.0, epsilon = 1e-15);
        assert!(r.critically_coupled);
    }

    #[test]
    fn lossy_figure_rates_double() {
        let m = ModeParams::from_rates(0.0, 1.5e8, 1.5e8, 1e10, 1e10).unwrap();
        let r = mode_rates(&m, CRITICAL_COUPLING_REL_TOL);
        assert_relative_eq!(r.total, 2e10, max_relative = 1e-12);
        assert!(r.critically_coupled);
    }

    #[test]
    fn non_positive_speed_rejected() {
        let m = mode(1.0, 0.0, 1.0, 1.0);
        assert!(matches!(m.validate(), Err(Error::InvalidParameter { name: "v", .. })));
        let m = mode(1.0, 1.0, 1.0, -1.0);
        assert!(matches!(m.validate(), Err(Error::InvalidParameter { name: "u", .. })));
    }

    #[test]
    fn detuning_cases() {
        let base = |wp, ws, wi| {
            let m = |w| ModeParams { omega: w, ..mode(2.0, 1.0, 0.0, 1.0) };
            RingSystem::new(m(wp), m(ws), m(wi), Complex64::new(0.0, 0.0), 0.0, 0.0).unwrap()
        };
        assert_eq!(base(1.0, 1.0, 1.0).detuning(), 0.0);
        assert_eq!(base(1.2e15, 1.2e15 + 3e12, 1.2e15 - 3e12).detuning(), 0.0);
        assert_relative_eq!(base(1.9e15, 2.0e15, 2.0e15).detuning(), 2.0e14, max_relative = 1e-12);
    }

    #[test]
    fn coupling_estimate_ratios() {
        let c = estimate_nonlinear_couplings(&MaterialEstimate {
            chi3: 2.5e-21,
            n: 2.0,
            mode_volume: 1e-16,
            omega_p: 1.216e15,
        })
        .unwrap();
        assert_eq!(c.eta / c.lambda, 0.5);
        assert_eq!(c.zeta / c.lambda, 2.0);
        // Hand evaluation: 3·ħ·ω²·χ/(4·ε₀·n⁴·Ω) with CODATA 2018 constants.
        assert_relative_eq!(c.lambda, 20.638_392_624_29, max_relative = 1e-9);
    }

    #[test]
    fn coupling_estimate_zero_chi() {
        let c = estimate_nonlinear_couplings(&MaterialEstimate {
            chi3: 0.0,
            n: 3.4,
            mode_volume: 1e-17,
            omega_p: 1.2e15,
        })
        .unwrap();
        assert_eq!((c.lambda, c.eta, c.zeta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn coupling_estimate_rejects_bad_material() {
        let bad = MaterialEstimate {
            chi3: 1e-21,
            n: 0.0,
            mode_volume: 1e-16,
            omega_p: 1e15,
        };
        assert!(estimate_nonlinear_couplings(&bad).is_err());
    }

    #[test]
    fn closed_form_ratio() {
        let rates = |gs, ms, gi, mi| DerivedRates {
            pump: mode_rates(&mode(2.0, 1.0, 0.0, 1.0), 1e-9),
            signal: ModeRates { channel: gs, loss: ms, total: gs + ms, critically_coupled: false },
            idler: ModeRates { channel: gi, loss: mi, total: gi + mi, critically_coupled: false },
        };
        assert_eq!(singles_ratio_closed_form(&rates(2.0, 1.0, 3.0, 6.0)), Some(2.5));
        assert_eq!(singles_ratio_closed_form(&rates(1.0, 1.0, 1.0, 1.0)), Some(2.0));
        assert_eq!(singles_ratio_closed_form(&rates(1.0, 0.0, 1.0, 0.0)), Some(0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn phase_leaves_rate_unchanged(g in 0.1f64..10.0, theta in -6.3f64..6.3, s in 0.1f64..5.0, v in 0.5f64..3.0) {
                let base = ModeParams { omega: 0.0, v, u: v, gamma: Complex64::new(g, 0.0), mu: Complex64::new(0.0, 0.0) };
                let rotated = ModeParams { gamma: base.gamma * Complex64::from_polar(1.0, theta), ..base };
                let scaled = ModeParams { gamma: base.gamma * s, ..base };
                prop_assert!((rotated.channel_rate() - base.channel_rate()).abs() <= 1e-12 * base.channel_rate());
                prop_assert!((scaled.channel_rate() - s * s * base.channel_rate()).abs() <= 1e-12 * scaled.channel_rate());
                prop_assert_eq!(base.total_rate(), base.channel_rate());
            }
        }
    }
}
