use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::RingSystem;
use crate::numerics::TimeGrid;
use crate::pump::PumpField;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type C2 = Matrix2<Complex64>;

/// M(t) of d/dt (b̄_S, b̄_I†) = M(t)(b̄_S, b̄_I†) + D(t):
///
///   [ −Γ̄_S − iζ|β|²          −iλβ² e^{iΔt}     ]
///   [ iλ*β*² e^{−iΔt}        −Γ̄_I + iζ|β|²     ]
#[derive(Clone, Debug)]
pub struct DriveMatrix {
    gamma_s: f64,
    gamma_i: f64,
    zeta: f64,
    lambda: Complex64,
    detuning: f64,
    pump: PumpField,
    /// M at every pump-grid time.
    samples: Vec<C2>,
}

pub fn build_drive_matrix(sys: &RingSystem, pump: &PumpField) -> DriveMatrix {
    let mut d = DriveMatrix {
        gamma_s: sys.signal().total_rate(),
        gamma_i: sys.idler().total_rate(),
        zeta: sys.zeta(),
        lambda: sys.lambda(),
        detuning: sys.detuning(),
        pump: pump.clone(),
        samples: Vec::new(),
    };
    let grid = pump.time_grid;
    d.samples = pump.envelope.iter().enumerate().map(|(k, &b)| d.from_beta(grid.time(k), b)).collect();
    d
}

impl DriveMatrix {
    /// M(t) for a given intracavity pump amplitude β̄_P(t).
    pub fn from_beta(&self, t: f64, beta: Complex64) -> C2 {
        let n = beta.norm_sqr();
        let phase = Complex64::from_polar(1.0, self.detuning * t);
        let b2 = beta * beta;
        C2::new(
            Complex64::new(-self.gamma_s, -self.zeta * n),
            -I * self.lambda * b2 * phase,
            I * self.lambda.conj() * b2.conj() * phase.conj(),
            Complex64::new(-self.gamma_i, self.zeta * n),
        )
    }

    pub fn at(&self, t: f64) -> Result<C2> {
        Ok(self.from_beta(t, self.pump.envelope_at(t)?))
    }

    pub fn pump(&self) -> &PumpField {
        &self.pump
    }

    pub fn pump_grid(&self) -> &TimeGrid {
        &self.pump.time_grid
    }

    pub(crate) fn sample(&self, k: usize) -> &C2 {
        &self.samples[k]
    }

    /// max |λ||β̄_P|²/min(Γ̄_S, Γ̄_I): conversion per ring lifetime.
    pub fn peak_conversion_ratio(&self) -> f64 {
        self.lambda.norm() * self.pump.peak_photon_number() / self.gamma_s.min(self.gamma_i)
    }

    /// Pump-grid samples per propagator step, checking that `grid` starts
    /// on the pump grid and its midpoints land on pump samples.
    pub(crate) fn stride_for(&self, grid: &TimeGrid) -> Result<usize> {
        let pg = self.pump_grid();
        let ratio = grid.dt() / pg.dt();
        let stride = ratio.round() as usize;
        let aligned = (ratio - stride as f64).abs() < 1e-6
            && stride >= 2
            && stride.is_multiple_of(2)
            && (grid.t0() - pg.t0()).abs() <= 1e-9 * pg.dt()
            && grid.n_steps() * stride <= pg.n_steps();
        if !aligned {
            return Err(Error::Coverage {
                what: "pump samples at propagator midpoints (pump grid must refine the step by an even factor)",
                needed: grid.dt() / 2.0,
                available: pg.dt(),
            });
        }
        Ok(stride)
    }
}
