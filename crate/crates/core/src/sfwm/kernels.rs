//! Weak-pump response functions relating outgoing to incoming fields.
//!
//! For mode X with partner Y and ports p, p′ ∈ {channel, phantom}, with
//! c_channel = γ and c_phantom = μ√(v/u):
//!
//!   linear     T^X_{pp′}(κ)     = δ_{pp′} − c_p c_{p′}*/v_X / (−iκv_X + Γ̄_X)
//!   conversion N^X_{pp′}(κ,κ′)  = −i c_{X,p} c_{Y,p′} λ F_X(κ,κ′)
//!                                 / ((−iκv_X + Γ̄_X)(iκ′v_Y + Γ̄_Y))
//!
//! so that c_{X,p}(κ) = Σ_{p′} T_{pp′}(κ) in_{X,p′}(κ) + ∫dκ′ Σ_{p′} N_{pp′}(κ,κ′) in†_{Y,p′}(κ′).
//! The Dirac factor of the linear part is kept implicit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModeParams, Port, RingSystem};
use crate::numerics::{Grid2D, SpectralGrid};
use crate::sfwm::PumpPairFunction;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

type PortMatrix<T> = [[T; 2]; 2];

#[derive(Clone, Debug)]
pub struct ResponseKernels {
    pub axis_s: SpectralGrid,
    pub axis_i: SpectralGrid,
    /// T^S[out][in] on the signal axis.
    pub signal_linear: PortMatrix<Vec<Complex64>>,
    /// T^I[out][in] on the idler axis.
    pub idler_linear: PortMatrix<Vec<Complex64>>,
    /// N^S[out][in](κ_s, κ_i), stored at [js][ji].
    pub signal_conversion: PortMatrix<Grid2D<Complex64>>,
    /// N^I[out][in](κ_i, κ_s), also stored at [js][ji].
    pub idler_conversion: PortMatrix<Grid2D<Complex64>>,
}

/// T_{pp′}(κ) for one mode.
pub fn linear_response(mode: &ModeParams, out: Port, input: Port, kappa: f64) -> Complex64 {
    let direct = if out == input { 1.0 } else { 0.0 };
    direct - mode.port_coupling(out) * mode.port_coupling(input).conj() / mode.v / mode.resonance_denominator(kappa)
}

fn linear_table(mode: &ModeParams, axis: &SpectralGrid) -> PortMatrix<Vec<Complex64>> {
    let col = |out, input| axis.points().into_iter().map(|k| linear_response(mode, out, input, k)).collect();
    [
        [col(Port::Channel, Port::Channel), col(Port::Channel, Port::Phantom)],
        [col(Port::Phantom, Port::Channel), col(Port::Phantom, Port::Phantom)],
    ]
}

pub fn response_kernels(sys: &RingSystem, f: &PumpPairFunction) -> ResponseKernels {
    let (axis_s, axis_i) = (*f.axis_s(), *f.axis_i());
    let (sig, idl) = (sys.signal(), sys.idler());
    let lambda = sys.lambda();
    let ks = axis_s.points();
    let ki = axis_i.points();
    // Denominators shared by every conversion kernel.
    let ds: Vec<Complex64> = ks.iter().map(|&k| sig.resonance_denominator(k)).collect();
    let di: Vec<Complex64> = ki.iter().map(|&k| idl.resonance_denominator(k)).collect();

    let conversion = |c_out: Complex64, c_in: Complex64, idler_out: bool| {
        let pref = -I * c_out * c_in * lambda;
        Grid2D::par_from_fn(axis_s, axis_i, |js, ji| {
            let den = if idler_out {
                di[ji] * ds[js].conj()
            } else {
                ds[js] * di[ji].conj()
            };
            pref * f.values.get(js, ji) / den
        })
    };
    let both = |x: &ModeParams, y: &ModeParams, idler_out: bool| -> PortMatrix<Grid2D<Complex64>> {
        let c = |m: &ModeParams, p: Port| m.port_coupling(p);
        [
            [
                conversion(c(x, Port::Channel), c(y, Port::Channel), idler_out),
                conversion(c(x, Port::Channel), c(y, Port::Phantom), idler_out),
            ],
            [
                conversion(c(x, Port::Phantom), c(y, Port::Channel), idler_out),
                conversion(c(x, Port::Phantom), c(y, Port::Phantom), idler_out),
            ],
        ]
    };

    ResponseKernels {
        axis_s,
        axis_i,
        signal_linear: linear_table(sig, &axis_s),
        idler_linear: linear_table(idl, &axis_i),
        signal_conversion: both(sig, idl, false),
        idler_conversion: both(idl, sig, true),
    }
}

impl ResponseKernels {
    pub fn q_tilde_ss(&self) -> &[Complex64] {
        &self.signal_linear[0][0]
    }
    pub fn p_tilde_ss(&self) -> &[Complex64] {
        &self.signal_linear[0][1]
    }
    pub fn q_tilde_ii(&self) -> &[Complex64] {
        &self.idler_linear[0][0]
    }
    pub fn p_tilde_ii(&self) -> &[Complex64] {
        &self.idler_linear[0][1]
    }
    pub fn q_si(&self) -> &Grid2D<Complex64> {
        &self.signal_conversion[0][0]
    }
    pub fn p_si(&self) -> &Grid2D<Complex64> {
        &self.signal_conversion[0][1]
    }
    /// q_IS(κ_i, κ_s) at [js][ji].
    pub fn q_is(&self) -> &Grid2D<Complex64> {
        &self.idler_conversion[0][0]
    }
    pub fn p_is(&self) -> &Grid2D<Complex64> {
        &self.idler_conversion[0][1]
    }

    pub fn all_finite(&self) -> bool {
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        self.signal_linear.iter().chain(&self.idler_linear).flatten().all(|v| finite(v))
            && self.signal_conversion.iter().chain(&self.idler_conversion).flatten().all(|g| g.all_finite())
    }
}

/// ⟨out_{S,p}(κ_s) out_{I,p′}(κ_i)⟩ in the vacuum, leading order in λ:
/// Σ_r T^S_{pr}(κ_s) N^I_{p′r}(κ_i, κ_s).
pub fn port_pair_amplitude(kernels: &ResponseKernels, signal_port: Port, idler_port: Port) -> Grid2D<Complex64> {
    let p = signal_port.index();
    let q = idler_port.index();
    let t = &kernels.signal_linear[p];
    let n = &kernels.idler_conversion[q];
    Grid2D::par_from_fn(kernels.axis_s, kernels.axis_i, |js, ji| {
        t[0][js] * n[0].get(js, ji) + t[1][js] * n[1].get(js, ji)
    })
}

/// S(κ,κ′) = ⟨c_S(κ) c_I(κ′)⟩ for both photons leaving through the bus.
pub fn pair_amplitude(kernels: &ResponseKernels) -> Grid2D<Complex64> {
    port_pair_amplitude(kernels, Port::Channel, Port::Channel)
}

/// Checks that two grids can be combined pointwise.
pub fn ensure_same_axes<T: Copy, U>(a: &Grid2D<T>, b: &Grid2D<U>) -> Result<()> {
    if a.same_axes(b) {
        Ok(())
    } else {
        Err(Error::Shape("kernels sampled on different grids".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfwm::jsi_closed_form;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const V: f64 = 1.5e8;

    fn mode(channel: f64, loss: f64) -> ModeParams {
        ModeParams::from_rates(1.2e15, V, V, channel, loss).unwrap()
    }

    #[test]
    fn critical_coupling_extinguishes_transmission() {
        let m = mode(1e10, 1e10);
        assert!(linear_response(&m, Port::Channel, Port::Channel, 0.0).norm() < 1e-15);
    }

    #[test]
    fn lossless_ring_is_all_pass() {
        let m = mode(1e10, 0.0);
        for k in [-300.0, -1.0, 0.0, 20.0, 1e4] {
            let t = linear_response(&m, Port::Channel, Port::Channel, k);
            let expect = Complex64::new(-m.total_rate(), -k * V) / Complex64::new(m.total_rate(), -k * V);
            assert!((t - expect).norm() < 1e-14);
            assert!((t.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn explicit_form_of_linear_kernels() {
        let m = ModeParams {
            gamma: Complex64::from_polar(2e9, 0.3),
            mu: Complex64::from_polar(1e9, -1.1),
            ..mode(1.0, 0.0)
        };
        let k = 37.0;
        let den = m.resonance_denominator(k);
        let q = Complex64::new(-m.channel_rate() + m.loss_rate(), -k * V) / den;
        let p = -m.gamma * m.mu.conj() / V / den;
        assert!((linear_response(&m, Port::Channel, Port::Channel, k) - q).norm() < 1e-14);
        assert!((linear_response(&m, Port::Channel, Port::Phantom, k) - p).norm() < 1e-14);
    }

    #[test]
    fn linear_response_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..64 {
            let m = ModeParams {
                gamma: Complex64::from_polar(rng.gen_range(1e8..1e10), rng.gen_range(0.0..6.3)),
                mu: Complex64::from_polar(rng.gen_range(0.0..1e10), rng.gen_range(0.0..6.3)),
                u: rng.gen_range(0.5..2.0) * V,
                ..mode(1.0, 0.0)
            };
            let k = rng.gen_range(-1e3..1e3);
            // Full 2×2 port matrix, not just the flat-top row.
            let t = |o, i| linear_response(&m, o, i, k);
            let (a, b, c, d) = (
                t(Port::Channel, Port::Channel),
                t(Port::Channel, Port::Phantom),
                t(Port::Phantom, Port::Channel),
                t(Port::Phantom, Port::Phantom),
            );
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((c.norm_sqr() + d.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((a * c.conj() + b * d.conj()).norm() < 1e-12);
        }
    }

    fn small_system(lambda: Complex64) -> RingSystem {
        RingSystem::new(mode(1e10, 0.0), mode(1e10, 5e9), mode(8e9, 1e10), lambda, 0.0, 0.0).unwrap()
    }

    fn pair_function(sys: &RingSystem, n: usize) -> PumpPairFunction {
        use crate::pump::{IntracavityPump, PumpSpec};
        let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), 1e-10).unwrap();
        let pump = IntracavityPump::filtered(sys, &spec);
        let g = SpectralGrid::new(400.0, n).unwrap();
        crate::sfwm::pump_pair_function(&pump, sys, &g, &g, 1e-10).unwrap()
    }

    #[test]
    fn zero_coupling_gives_no_pairs() {
        let sys = small_system(Complex64::new(0.0, 0.0));
        let k = response_kernels(&sys, &pair_function(&sys, 17));
        assert!(pair_amplitude(&k).values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn amplitude_modulus_matches_closed_form() {
        let sys = small_system(Complex64::from_polar(3.0, 0.4));
        let f = pair_function(&sys, 33);
        let s = pair_amplitude(&response_kernels(&sys, &f));
        let phi = jsi_closed_form(&sys, &f).raw;
        for (a, b) in s.values().iter().zip(phi.values()) {
            assert!((a.norm_sqr() - b).abs() <= 1e-8 * b);
        }
    }

    #[test]
    fn phantom_outputs_scale_by_rate_ratios() {
        let sys = small_system(Complex64::new(1.0, 0.0));
        let r = sys.derive_rates();
        let k = response_kernels(&sys, &pair_function(&sys, 17));
        let cc = port_pair_amplitude(&k, Port::Channel, Port::Channel);
        let cg = port_pair_amplitude(&k, Port::Channel, Port::Phantom);
        let gc = port_pair_amplitude(&k, Port::Phantom, Port::Channel);
        for ((a, b), c) in cc.values().iter().zip(cg.values()).zip(gc.values()) {
            let base = a.norm_sqr();
            assert!((b.norm_sqr() - base * r.idler.loss / r.idler.channel).abs() <= 1e-10 * base);
            assert!((c.norm_sqr() - base * r.signal.loss / r.signal.channel).abs() <= 1e-10 * base);
        }
    }
}
