//! Physical constants, unit conversions and link-budget arithmetic.
//!
//! All quantities here are SI `f64` unless a field name says otherwise
//! (fiber parameters keep the customary km / dB / ps·nm⁻¹·km⁻¹ units and
//! expose SI accessors).

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const DEFAULT_WAVELENGTH: f64 = 1550e-9;

/// Relative mismatch allowed between `N·α` and `T0·B`.
pub const LAYOUT_TOLERANCE: f64 = 0.01;
/// Fraction by which the configured guard may undershoot the dispersion estimate.
pub const DEFAULT_GUARD_SLACK: f64 = 0.05;

/// Group-velocity dispersion β₂ (s²/m) from D (ps/(nm·km)) at `wavelength` (m).
pub fn dispersion_to_beta2(d_ps_nm_km: f64, wavelength: f64) -> f64 {
    let d_si = d_ps_nm_km * 1e-6; // s/m²
    -d_si * wavelength * wavelength / (2.0 * PI * SPEED_OF_LIGHT)
}

/// Dispersive spreading `2π·B·|β₂|·L` that the guard interval must absorb,
/// halved when pre-dispersion compensation splits the channel response.
pub fn guard_interval(bandwidth: f64, beta2: f64, length: f64, pdc: bool) -> f64 {
    let full = 2.0 * PI * bandwidth * beta2.abs() * length;
    if pdc {
        0.5 * full
    } else {
        full
    }
}

/// Upper-bound normalized SE (symbol/s/Hz) of an N-subcarrier burst whose
/// duration is `T0 = N·α/B` followed by the dispersion guard interval.
///
/// `1 / (α + c·π·B²|β₂|L / N)` with `c = 1` under PDC and `c = 2` without.
/// At `α = 1` this is the plain NFDM bound; it never reaches `1/α`.
pub fn normalized_se(
    n: usize,
    alpha: f64,
    bandwidth: f64,
    beta2: f64,
    length: f64,
    pdc: bool,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n_subcarriers", "must be at least 1"));
    }
    check_alpha(alpha)?;
    let c = if pdc { 1.0 } else { 2.0 };
    let spread = c * PI * bandwidth * bandwidth * beta2.abs() * length;
    Ok(1.0 / (alpha + spread / n as f64))
}

/// Realized SE of a block layout, `N / (T1·B)`.
pub fn layout_se(n: usize, bandwidth: f64, block_time: f64) -> f64 {
    n as f64 / (block_time * bandwidth)
}

/// Net bit rate `N·log2(M)/T1`.
pub fn net_rate(n: usize, qam_order: usize, block_time: f64) -> f64 {
    n as f64 * (qam_order as f64).log2() / block_time
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "compression_alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ))
    }
}

/// Transmit-side signal layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalPlan {
    /// Signal bandwidth B (Hz).
    pub bandwidth: f64,
    pub n_subcarriers: usize,
    pub compression_alpha: f64,
    pub qam_order: usize,
    /// Useful burst duration T0 (s).
    pub burst_time: f64,
    /// Block period T1 = T0 + T_GI (s).
    pub block_time: f64,
    /// NFT normalization time Ts (s).
    pub norm_time: f64,
    /// b-modulation amplitude A.
    pub amplitude: f64,
    pub pdc_enabled: bool,
}

impl SignalPlan {
    /// Layout with `T0 = N·α/B` and the default `Ts = T0/(2π)`.
    pub fn from_layout(
        bandwidth: f64,
        n_subcarriers: usize,
        compression_alpha: f64,
        qam_order: usize,
        block_time: f64,
    ) -> Result<Self> {
        let burst_time = n_subcarriers as f64 * compression_alpha / bandwidth;
        let plan = SignalPlan {
            bandwidth,
            n_subcarriers,
            compression_alpha,
            qam_order,
            burst_time,
            block_time,
            norm_time: burst_time / (2.0 * PI),
            amplitude: 0.3,
            pdc_enabled: true,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Guard interval T_GI = T1 − T0.
    pub fn guard_time(&self) -> f64 {
        self.block_time - self.burst_time
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    /// Subcarrier spacing in λ, `α·π·Ts/T0`.
    pub fn lambda_spacing(&self) -> f64 {
        self.compression_alpha * PI * self.norm_time / self.burst_time
    }

    /// Subcarrier index offset: position `p` carries `k = p − ⌊N/2⌋`.
    pub fn subcarrier_index(&self, p: usize) -> i64 {
        p as i64 - (self.n_subcarriers / 2) as i64
    }

    /// Center of subcarrier `k`, `λ_k = −k·α·π·Ts/T0`.
    pub fn subcarrier_center(&self, k: i64) -> f64 {
        -(k as f64) * self.lambda_spacing()
    }

    pub fn layout_se(&self) -> f64 {
        layout_se(self.n_subcarriers, self.bandwidth, self.block_time)
    }

    pub fn net_rate(&self) -> f64 {
        net_rate(self.n_subcarriers, self.qam_order, self.block_time)
    }

    /// Checks the self-contained invariants of the layout.
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::invalid("bandwidth", "must be positive"));
        }
        if self.n_subcarriers == 0 {
            return Err(Error::invalid("n_subcarriers", "must be at least 1"));
        }
        check_alpha(self.compression_alpha)?;
        if !matches!(self.qam_order, 4 | 16 | 64 | 256) {
            return Err(Error::invalid(
                "qam_order",
                format!("square Gray-mapped QAM 4/16/64/256 supported, got {}", self.qam_order),
            ));
        }
        if !(self.burst_time > 0.0) {
            return Err(Error::invalid("burst_time", "must be positive"));
        }
        if !(self.norm_time > 0.0) {
            return Err(Error::invalid("norm_time", "must be positive"));
        }
        if self.block_time < self.burst_time {
            return Err(Error::invalid(
                "block_time",
                format!(
                    "block {:.4e} s shorter than burst {:.4e} s",
                    self.block_time, self.burst_time
                ),
            ));
        }
        if !(self.amplitude > 0.0) {
            return Err(Error::invalid("amplitude", "must be positive"));
        }
        let packed = self.n_subcarriers as f64 * self.compression_alpha;
        let occupied = self.burst_time * self.bandwidth;
        if ((packed - occupied) / occupied).abs() > LAYOUT_TOLERANCE {
            return Err(Error::invalid(
                "n_subcarriers",
                format!("N·α = {packed:.4} does not match T0·B = {occupied:.4}"),
            ));
        }
        Ok(())
    }

    /// Checks the guard interval against the dispersion of `fiber`.
    pub fn validate_guard(&self, fiber: &FiberPlan, slack: f64) -> Result<()> {
        let required = guard_interval(
            self.bandwidth,
            fiber.beta2(),
            fiber.total_length(),
            self.pdc_enabled,
        );
        if self.guard_time() < (1.0 - slack) * required {
            return Err(Error::invalid(
                "guard_time",
                format!(
                    "guard {:.4e} s is below the required {:.4e} s",
                    self.guard_time(),
                    required
                ),
            ));
        }
        Ok(())
    }
}

/// Fiber link description (per span, repeated `n_spans` times).
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPlan {
    pub span_length_km: f64,
    pub n_spans: usize,
    pub loss_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub noise_figure_db: f64,
    /// Two-sided optical band-pass width (Hz).
    pub obpf_bandwidth: f64,
    pub wavelength: f64,
}

impl Default for FiberPlan {
    /// 12 × 80 km SSMF with 5 dB NF amplifiers and 40 GHz filters.
    fn default() -> Self {
        FiberPlan {
            span_length_km: 80.0,
            n_spans: 12,
            loss_db_per_km: 0.2,
            dispersion_ps_nm_km: 16.8,
            gamma_per_w_km: 1.3,
            noise_figure_db: 5.0,
            obpf_bandwidth: 40e9,
            wavelength: DEFAULT_WAVELENGTH,
        }
    }
}

impl FiberPlan {
    pub fn beta2(&self) -> f64 {
        dispersion_to_beta2(self.dispersion_ps_nm_km, self.wavelength)
    }

    pub fn span_length(&self) -> f64 {
        self.span_length_km * 1e3
    }

    pub fn total_length(&self) -> f64 {
        self.span_length() * self.n_spans as f64
    }

    /// Power attenuation coefficient (1/m).
    pub fn loss_per_m(&self) -> f64 {
        self.loss_db_per_km * std::f64::consts::LN_10 / 10.0 / 1e3
    }

    /// Kerr coefficient (1/(W·m)).
    pub fn gamma(&self) -> f64 {
        self.gamma_per_w_km * 1e-3
    }

    pub fn span_loss_db(&self) -> f64 {
        self.loss_db_per_km * self.span_length_km
    }

    pub fn carrier_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    /// Path-averaged Kerr coefficient of one lossy span (1/(W·m)).
    pub fn gamma_effective(&self) -> f64 {
        let al = self.loss_per_m() * self.span_length();
        if al < 1e-12 {
            self.gamma()
        } else {
            self.gamma() * (1.0 - (-al).exp()) / al
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.span_length_km >= 0.0) {
            return Err(Error::invalid("span_length", "must be non-negative"));
        }
        if !(self.loss_db_per_km >= 0.0) {
            return Err(Error::invalid("loss", "must be non-negative"));
        }
        if !(self.gamma_per_w_km >= 0.0) {
            return Err(Error::invalid("gamma", "must be non-negative"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::invalid("wavelength", "must be positive"));
        }
        if !(self.obpf_bandwidth > 0.0) {
            return Err(Error::invalid("obpf_bandwidth", "must be positive"));
        }
        Ok(())
    }
}

/// Scales mapping the physical link onto the dimensionless focusing NLSE
/// `j·q_z + q_tt + 2|q|²q = 0`:
/// `T = Ts·t`, `Z = Z0·z`, `A = √P0·q` with `Z0 = 2Ts²/|β₂|`, `P0 = 2/(γ_eff·Z0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationMap {
    pub time_scale: f64,
    pub distance_scale: f64,
    pub power_scale: f64,
    /// Path-averaged Kerr coefficient (1/(W·m)).
    pub gamma_effective: f64,
}

impl NormalizationMap {
    pub fn to_normalized_time(&self, t: f64) -> f64 {
        t / self.time_scale
    }
    pub fn to_physical_time(&self, t: f64) -> f64 {
        t * self.time_scale
    }
    pub fn to_normalized_distance(&self, z: f64) -> f64 {
        z / self.distance_scale
    }
    pub fn to_physical_distance(&self, z: f64) -> f64 {
        z * self.distance_scale
    }
    pub fn to_normalized_power(&self, p: f64) -> f64 {
        p / self.power_scale
    }
    pub fn to_physical_power(&self, p: f64) -> f64 {
        p * self.power_scale
    }
    /// Normalized λ corresponding to baseband frequency `f` (Hz): `λ = −π·f·Ts`.
    pub fn lambda_of_frequency(&self, f: f64) -> f64 {
        -PI * f * self.time_scale
    }
    pub fn frequency_of_lambda(&self, lambda: f64) -> f64 {
        -lambda / (PI * self.time_scale)
    }
}

/// Normalization for `signal` over `fiber` using the path-averaged Kerr
/// coefficient of one span.
pub fn build_normalization(signal: &SignalPlan, fiber: &FiberPlan) -> Result<NormalizationMap> {
    let ts = signal.norm_time;
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(Error::invalid("norm_time", "must be positive"));
    }
    let beta2 = fiber.beta2();
    if !(beta2 < 0.0) {
        return Err(Error::invalid(
            "dispersion",
            "focusing NFT needs anomalous dispersion (D > 0)",
        ));
    }
    let gamma_effective = fiber.gamma_effective();
    if !(gamma_effective > 0.0) {
        return Err(Error::invalid("gamma", "must be positive for the NFT model"));
    }
    let distance_scale = 2.0 * ts * ts / beta2.abs();
    let power_scale = 2.0 / (gamma_effective * distance_scale);
    Ok(NormalizationMap {
        time_scale: ts,
        distance_scale,
        power_scale,
        gamma_effective,
    })
}
