use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Cplx, Real};

/// Fraction of differing bits.
pub fn ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<f64> {
    Ok(bit_errors(tx_bits, rx_bits)? as f64 / tx_bits.len().max(1) as f64)
}

pub fn bit_errors(tx_bits: &[u8], rx_bits: &[u8]) -> Result<usize> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::LengthMismatch {
            what: "bit streams",
            left: tx_bits.len(),
            right: rx_bits.len(),
        });
    }
    Ok(tx_bits.iter().zip(rx_bits).filter(|(a, b)| a != b).count())
}

/// `Q = 20·log10(√2 · erfc⁻¹(2·BER))` in dB, defined for `0 < BER < 0.5`.
pub fn q_from_ber(ber: f64) -> Result<f64> {
    if !(ber > 0.0 && ber < 0.5) {
        return Err(Error::Domain(format!("Q factor undefined for BER {ber}")));
    }
    Ok(20.0 * (std::f64::consts::SQRT_2 * erfc_inv(2.0 * ber)).log10())
}

/// RMS error vector magnitude relative to the RMS reference, in percent.
pub fn evm<T: Real>(tx: &[Cplx<T>], rx: &[Cplx<T>]) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            what: "symbol streams",
            left: tx.len(),
            right: rx.len(),
        });
    }
    let (err, refp) = tx.iter().zip(rx).fold((0.0, 0.0), |(e, p), (t, r)| {
        (e + to_f64((r - t).norm_sqr()), p + to_f64(t.norm_sqr()))
    });
    if refp == 0.0 {
        return Err(Error::Domain("EVM reference has zero energy".into()));
    }
    Ok(100.0 * (err / refp).sqrt())
}

/// Performance at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMetrics {
    pub avg_power_dbm: f64,
    pub ber: f64,
    /// `None` when the BER is 0 or at least 0.5.
    pub q_db: Option<f64>,
    pub evm_pct: f64,
    pub n_bits: usize,
    pub se: f64,
    pub net_rate: f64,
}

impl LinkMetrics {
    pub fn new(
        avg_power_dbm: f64,
        bit_errors: usize,
        n_bits: usize,
        evm_pct: f64,
        se: f64,
        net_rate: f64,
    ) -> Result<Self> {
        if n_bits == 0 {
            return Err(Error::invalid("n_bits", "no bits were counted"));
        }
        let ber = bit_errors as f64 / n_bits as f64;
        Ok(LinkMetrics {
            avg_power_dbm,
            ber,
            q_db: q_from_ber(ber).ok(),
            evm_pct,
            n_bits,
            se,
            net_rate,
        })
    }
}

/// Watts to dBm.
pub fn dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}
