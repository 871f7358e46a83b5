//! Gray-mapped square QAM.
//!
//! Point index `p = i·L + q` where `i`, `q` index the in-phase and quadrature
//! PAM levels in ascending order and `L = √M`. Each axis carries half of the
//! label bits, MSB first, with the top level labeled `0…0`:
//!
//! | level (QPSK) | bit |   | level (16QAM) | bits |
//! |--------------|-----|---|---------------|------|
//! | +1/√2        | 0   |   | +3/√10        | 00   |
//! | −1/√2        | 1   |   | +1/√10        | 01   |
//! |              |     |   | −1/√10        | 11   |
//! |              |     |   | −3/√10        | 10   |
//!
//! so QPSK bits `00` map to `(1 + j)/√2`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Cplx, Real};

fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

/// Square QAM alphabet with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    order: usize,
    side: usize,
    bits_per_symbol: usize,
    levels: Vec<T>,
    points: Vec<Cplx<T>>,
    labels: Vec<usize>,
    index_of_label: Vec<usize>,
}

impl<T: Real> Constellation<T> {
    pub fn new(order: usize) -> Result<Self> {
        let side = (order as f64).sqrt().round() as usize;
        if order < 4 || side * side != order || !order.is_power_of_two() {
            return Err(Error::invalid(
                "qam_order",
                format!("square power-of-4 QAM required, got {order}"),
            ));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let half_bits = bits_per_symbol / 2;
        let norm = (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        let levels: Vec<T> = (0..side)
            .map(|i| lit((2.0 * i as f64 - (side as f64 - 1.0)) / norm))
            .collect();
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for i in 0..side {
            for q in 0..side {
                points.push(Cplx::new(levels[i], levels[q]));
                labels.push((gray(side - 1 - i) << half_bits) | gray(side - 1 - q));
            }
        }
        let mut index_of_label = vec![0; order];
        for (p, &l) in labels.iter().enumerate() {
            index_of_label[l] = p;
        }
        Ok(Constellation {
            order,
            side,
            bits_per_symbol,
            levels,
            points,
            labels,
            index_of_label,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Levels per axis (`√M`).
    pub fn side(&self) -> usize {
        self.side
    }

    /// Ascending PAM levels shared by both axes.
    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn points(&self) -> &[Cplx<T>] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Cplx<T> {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index]
    }

    /// Point index from the two per-axis level indices.
    pub fn compose(&self, i: usize, q: usize) -> usize {
        i * self.side + q
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.side, index % self.side)
    }

    /// Nearest level index on one axis; ties go to the lower index.
    pub fn slice_level(&self, x: T) -> usize {
        let mut best = 0;
        let mut best_d = (x - self.levels[0]).abs();
        for (i, &l) in self.levels.iter().enumerate().skip(1) {
            let d = (x - l).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Nearest constellation point; ties go to the lower index.
    pub fn slice(&self, z: Cplx<T>) -> usize {
        self.compose(self.slice_level(z.re), self.slice_level(z.im))
    }

    /// Maps a bit sequence (`0`/`1` bytes) to point indices.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<usize>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(Error::invalid(
                "bits",
                format!(
                    "{} bits is not a multiple of {} bits/symbol",
                    bits.len(),
                    self.bits_per_symbol
                ),
            ));
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|chunk| {
                let label = chunk
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.index_of_label[label]
            })
            .collect())
    }

    /// Appends the label bits of `index`, MSB first.
    pub fn push_bits(&self, index: usize, out: &mut Vec<u8>) {
        let label = self.labels[index];
        for s in (0..self.bits_per_symbol).rev() {
            out.push(((label >> s) & 1) as u8);
        }
    }

    pub fn bits_of(&self, indices: &[usize]) -> Vec<u8> {
        let mut out = Vec::with_capacity(indices.len() * self.bits_per_symbol);
        for &i in indices {
            self.push_bits(i, &mut out);
        }
        out
    }

    pub fn mean_energy(&self) -> T {
        self.points.iter().map(|p| p.norm_sqr()).sum::<T>() / from_usize(self.order)
    }
}

/// Symbols of `n_blocks` bursts with `n_subcarriers` each; block `m` occupies
/// `symbols[m·N .. (m+1)·N]`, subcarrier position `p` ↦ index `k = p − ⌊N/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock<T> {
    pub n_subcarriers: usize,
    pub n_blocks: usize,
    pub indices: Vec<usize>,
    pub symbols: Vec<Cplx<T>>,
    pub bits: Vec<u8>,
    pub constellation: Constellation<T>,
}

impl<T: Real> SymbolBlock<T> {
    fn from_indices(
        indices: Vec<usize>,
        bits: Vec<u8>,
        n_subcarriers: usize,
        constellation: Constellation<T>,
    ) -> Self {
        let n_blocks = indices.len() / n_subcarriers;
        let symbols = indices.iter().map(|&i| constellation.point(i)).collect();
        SymbolBlock {
            n_subcarriers,
            n_blocks,
            indices,
            symbols,
            bits,
            constellation,
        }
    }

    /// Uniform random symbols drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        constellation: &Constellation<T>,
        n_subcarriers: usize,
        n_blocks: usize,
    ) -> Self {
        let n = n_subcarriers * n_blocks * constellation.bits_per_symbol();
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let indices = constellation.map_bits(&bits).expect("whole symbols");
        Self::from_indices(indices, bits, n_subcarriers, constellation.clone())
    }

    pub fn block(&self, m: usize) -> &[Cplx<T>] {
        &self.symbols[m * self.n_subcarriers..(m + 1) * self.n_subcarriers]
    }

    pub fn block_indices(&self, m: usize) -> &[usize] {
        &self.indices[m * self.n_subcarriers..(m + 1) * self.n_subcarriers]
    }

    pub fn block_bits(&self, m: usize) -> &[u8] {
        let per = self.n_subcarriers * self.constellation.bits_per_symbol();
        &self.bits[m * per..(m + 1) * per]
    }
}

/// Gray-maps `bits` onto square `qam_order` QAM, filling bursts of
/// `n_subcarriers` symbols.
pub fn map_qam<T: Real>(
    bits: &[u8],
    qam_order: usize,
    n_subcarriers: usize,
) -> Result<SymbolBlock<T>> {
    let constellation = Constellation::<T>::new(qam_order)?;
    let indices = constellation.map_bits(bits)?;
    if n_subcarriers == 0 || indices.len() % n_subcarriers != 0 {
        return Err(Error::invalid(
            "bits",
            format!(
                "{} symbols do not fill whole bursts of {} subcarriers",
                indices.len(),
                n_subcarriers
            ),
        ));
    }
    Ok(SymbolBlock::from_indices(
        indices,
        bits.to_vec(),
        n_subcarriers,
        constellation,
    ))
}
