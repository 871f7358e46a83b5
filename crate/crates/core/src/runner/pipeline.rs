//! One burst through the whole link: synthesis, PDC, INFT, fiber, NFT,
//! equalization, demapping and detection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{run_link, LinkOptions, NoiseKey, StepControl};
use crate::error::{Error, Result};
use crate::grid::{LambdaGrid, TimeGrid};
use crate::nft::{inft_b_with, nft_forward_with, InftOptions, NftOptions, TimeSignal};
use crate::params::{build_normalization, FiberPlan, NormalizationMap, SignalPlan};
use crate::rxdsp::{
    center_grid, demap_projected, projected_gram, demap_subcarriers, equalize_nfd, ici_matrix, IciMatrix,
    IterativeConfig, SphereConfig, SphereDecoder, Whitener, WindowedDetector,
};
use crate::scalar::Cplx;
use crate::txdsp::{apply_pdc, check_b_feasibility, synth_b_spectrum, Constellation, SymbolBlock};

use super::config::{DecoderMode, ExperimentConfig};

/// Counts gathered from one burst.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlockOutcome {
    /// Launch energy (J).
    pub energy: f64,
    pub bit_errors: usize,
    pub n_bits: usize,
    pub symbol_errors: usize,
    /// `Σ|r − G·c|²` and `Σ|G·c|²` over the subcarriers.
    pub err_energy: f64,
    pub ref_energy: f64,
    pub timed_out: bool,
}

impl BlockOutcome {
    pub fn merge(mut self, o: &BlockOutcome) -> Self {
        self.energy += o.energy;
        self.bit_errors += o.bit_errors;
        self.n_bits += o.n_bits;
        self.symbol_errors += o.symbol_errors;
        self.err_energy += o.err_energy;
        self.ref_energy += o.ref_energy;
        self.timed_out |= o.timed_out;
        self
    }
}

/// Everything shared read-only by the bursts of one configuration.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub signal: SignalPlan,
    pub fiber: FiberPlan,
    pub norm: NormalizationMap,
    /// Normalized link length.
    pub distance: f64,
    pub constellation: Constellation<f64>,
    pub ici: IciMatrix<f64>,
    pub tx_time: TimeGrid<f64>,
    pub tx_grid: LambdaGrid<f64>,
    pub rx_grid: LambdaGrid<f64>,
    /// Samples kept around the burst center for the receiver NFT.
    pub rx_samples: usize,
    /// Receiver projects onto the subcarrier shapes (noise covariance `∝ G`).
    pub projection: bool,
    pub mode: DecoderMode,
    pub iterative: IterativeConfig,
    pub link: LinkOptions,
    pub inft: InftOptions,
    pub seed: u64,
}

/// Independent symbol stream of block `block`; identical at every power.
pub fn block_symbols(seed: u64, block: u64, c: &Constellation<f64>, n: usize) -> SymbolBlock<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5359_4d42_4f4c_5321);
    rng.set_stream(block);
    SymbolBlock::random(&mut rng, c, n, 1)
}

impl Pipeline {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let signal = cfg.signal.clone();
        let fiber = cfg.fiber.clone();
        let norm = build_normalization(&signal, &fiber)?;
        let distance = norm.to_normalized_distance(fiber.total_length());
        let s = &cfg.sampling;
        let n_win = s.samples_per_block * s.window_blocks;
        let dt = signal.block_time / s.samples_per_block as f64 / signal.norm_time;
        let tx_time = TimeGrid::centered(0.0, dt, n_win);
        // Finest useful spacing is π/W; the extent follows the occupied band.
        let step = std::f64::consts::PI / tx_time.span() / s.lambda_oversampling;
        let band = 0.5 * signal.n_subcarriers as f64 * signal.lambda_spacing();
        let tx_grid = LambdaGrid::covering(s.lambda_extent * band, step)?;
        let rx_samples = ((s.rx_window_blocks * s.samples_per_block as f64).round() as usize).min(n_win);
        let rx_grid = if s.rx_projection {
            let w = rx_samples as f64 * dt;
            LambdaGrid::covering(s.rx_lambda_extent * band, std::f64::consts::PI / w)?
        } else {
            center_grid(&signal)?
        };
        let ici = if s.rx_projection {
            projected_gram(&signal, &rx_grid)
        } else {
            ici_matrix(signal.n_subcarriers, signal.compression_alpha)
        };
        let sphere = SphereConfig {
            node_budget: cfg.decoder.node_budget,
            ..Default::default()
        };
        Ok(Pipeline {
            constellation: Constellation::new(signal.qam_order)?,
            ici,
            signal,
            fiber,
            norm,
            distance,
            tx_time,
            tx_grid,
            rx_grid,
            rx_samples,
            projection: s.rx_projection,
            mode: cfg.decoder.mode,
            iterative: IterativeConfig {
                n_iter: cfg.decoder.n_iter,
                band_width: cfg.decoder.band_width,
                sphere,
            },
            link: LinkOptions {
                noise: cfg.noise,
                obpf_every_span: true,
                step: StepControl::default(),
            },
            inft: InftOptions::default(),
            seed: cfg.seed,
        })
    }

    /// Plan with amplitude `a`.
    pub fn plan_at(&self, a: f64) -> SignalPlan {
        self.signal.clone().with_amplitude(a)
    }

    /// Launch field of block `block` at amplitude `a`.
    pub fn transmit(&self, a: f64, block: u64) -> Result<(SymbolBlock<f64>, TimeSignal<f64>)> {
        let plan = self.plan_at(a);
        let blk = block_symbols(self.seed, block, &self.constellation, plan.n_subcarriers);
        let spec = synth_b_spectrum(&blk, 0, &plan, &self.tx_grid)?;
        check_b_feasibility(&spec, crate::txdsp::DEFAULT_FEASIBILITY_MARGIN)?;
        let spec = if plan.pdc_enabled {
            apply_pdc(&spec, self.distance)
        } else {
            spec
        };
        let (q, _) = inft_b_with(&spec, &self.tx_time, &self.inft)?;
        Ok((blk, q.with_scales(self.norm.time_scale, self.norm.power_scale)))
    }

    /// Received subcarrier vector `r ≈ G·c` from a received field.
    pub fn receive(&self, a: f64, rx: &TimeSignal<f64>) -> Result<Vec<Cplx<f64>>> {
        let plan = self.plan_at(a);
        let start = (rx.len() - self.rx_samples) / 2;
        let window = TimeSignal {
            samples: rx.samples[start..start + self.rx_samples].to_vec(),
            t0: rx.t0 + start as f64 * rx.dt,
            ..rx.clone()
        };
        let opts = NftOptions {
            edge_threshold: None,
            ..Default::default()
        };
        let sd = nft_forward_with(&window, &self.rx_grid, &opts)?;
        let eq = equalize_nfd(&sd, self.distance, plan.pdc_enabled);
        if self.projection {
            demap_projected(&eq, &plan, 0)
        } else {
            demap_subcarriers(&eq, &plan, 0)
        }
    }

    /// Detects symbol indices from `r`.
    pub fn detect(&self, r: &[Cplx<f64>], decoder: Option<&mut Detector>) -> Result<(Vec<usize>, bool)> {
        let c = &self.constellation;
        match self.mode {
            DecoderMode::Slicing => Ok((r.iter().map(|&z| c.slice(z)).collect(), false)),
            _ => {
                let mut own;
                let d = match decoder {
                    Some(d) => d,
                    None => {
                        own = Detector::new(self)?;
                        &mut own
                    }
                };
                d.detect(r)
            }
        }
    }

    /// Full simulation of block `block` at sweep point `power_index`.
    pub fn run_block(
        &self,
        a: f64,
        power_index: u64,
        block: u64,
        detector: Option<&mut Detector>,
    ) -> Result<BlockOutcome> {
        let (blk, q) = self.transmit(a, block)?;
        let energy = q.energy();
        let key = NoiseKey {
            seed: self.seed,
            power_index,
            block,
        };
        let out = run_link(&q, &self.fiber, &key, &self.link)?;
        let r = self.receive(a, &out.signal)?;
        let (indices, timed_out) = self.detect(&r, detector)?;
        let c = &self.constellation;
        let bits = c.bits_of(&indices);
        let tx_bits = blk.block_bits(0);
        let bit_errors = crate::rxdsp::bit_errors(tx_bits, &bits)?;
        let want = self.ici.apply(blk.block(0));
        let (err_energy, ref_energy) = r
            .iter()
            .zip(&want)
            .fold((0.0, 0.0), |(e, p), (x, y)| (e + (x - y).norm_sqr(), p + y.norm_sqr()));
        if !err_energy.is_finite() {
            return Err(Error::Domain("non-finite receiver output".into()));
        }
        Ok(BlockOutcome {
            energy,
            bit_errors,
            n_bits: tx_bits.len(),
            symbol_errors: indices.iter().zip(blk.block_indices(0)).filter(|(x, y)| x != y).count(),
            err_energy,
            ref_energy,
            timed_out,
        })
    }
}

/// Per-worker detector state (decoders are factorized once).
pub enum Detector {
    /// With a whitener when the receiver noise is coloured by `G`.
    Sphere(SphereDecoder<f64>, Constellation<f64>, SphereConfig, Option<Whitener<f64>>),
    Iterative(WindowedDetector<f64>),
}

impl Detector {
    pub fn new(p: &Pipeline) -> Result<Self> {
        let cfg = p.iterative.sphere;
        match p.mode {
            DecoderMode::Iterative => Ok(Detector::Iterative(WindowedDetector::new(
                &p.ici,
                &p.constellation,
                &p.iterative,
            )?)),
            _ => {
                p.ici.check_condition(cfg.cond_cap)?;
                let n = p.ici.order;
                let levels = p.constellation.levels();
                if p.projection {
                    let w = Whitener::new(&p.ici)?;
                    let dec = SphereDecoder::new(&w.upper(), n, levels, cfg);
                    Ok(Detector::Sphere(dec, p.constellation.clone(), cfg, Some(w)))
                } else {
                    let dec = SphereDecoder::new(&p.ici.entries, n, levels, cfg);
                    Ok(Detector::Sphere(dec, p.constellation.clone(), cfg, None))
                }
            }
        }
    }

    pub fn detect(&mut self, r: &[Cplx<f64>]) -> Result<(Vec<usize>, bool)> {
        match self {
            Detector::Sphere(dec, c, cfg, w) => {
                let d = match w {
                    Some(w) => crate::rxdsp::decode_complex(dec, &w.whiten(r), c, 0.0, cfg)?,
                    None => crate::rxdsp::decode_complex(dec, r, c, 0.0, cfg)?,
                };
                Ok((d.indices, d.timed_out))
            }
            Detector::Iterative(w) => {
                let d = w.detect(r, 0.0)?;
                Ok((d.indices, d.timed_out))
            }
        }
    }
}
