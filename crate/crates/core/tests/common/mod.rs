//! Monte Carlo helpers shared by the integration suites.
#![allow(dead_code)]

use fso_dtat::channel::ChannelRealization;
use fso_dtat::config::LinkConfig;
use fso_dtat::digital::ldpc::MAX_ITERS;
use fso_dtat::digital::modem::hard_decisions;
use fso_dtat::digital::{
    demodulate_llr, ldpc_decode, ldpc_encode, modulate, BitBuffer, LdpcCode, ModFormat,
};
use fso_dtat::image::{synthetic_scene, ImageTensor};
use fso_dtat::link::{
    coherent_receive, coherent_transmit, merge_pols, run_coherent, split_pols, CoherentImpairments,
};
use fso_dtat::rng::{seeded_rng, seeded_rng_indexed, DATA, NOISE, PHASE_NOISE};
use fso_dtat::stream::SymbolStream;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

/// Outcome of BPSK/AWGN trials of an LDPC code.
pub struct Waterfall {
    pub frames: usize,
    pub frames_ok: usize,
    pub info_bits: usize,
    pub info_errors: usize,
}

impl Waterfall {
    pub fn success(&self) -> f64 {
        self.frames_ok as f64 / self.frames as f64
    }

    pub fn ber(&self) -> f64 {
        self.info_errors as f64 / self.info_bits as f64
    }
}

/// `blocks` independent codewords over BPSK/AWGN at `ebn0_db` per
/// information bit. Each block uses its own data and noise lanes.
pub fn bpsk_waterfall(code: &LdpcCode, ebn0_db: f64, blocks: usize, seed: u64) -> Waterfall {
    let esn0 = code.rate() * 10f64.powf(ebn0_db / 10.0);
    let sigma2 = 1.0 / (2.0 * esn0);
    let sigma = sigma2.sqrt();
    let mut w = Waterfall {
        frames: blocks,
        frames_ok: 0,
        info_bits: 0,
        info_errors: 0,
    };
    for b in 0..blocks as u64 {
        let mut data = seeded_rng_indexed(seed, DATA, b);
        let mut noise = seeded_rng_indexed(seed, NOISE, b);
        let info = BitBuffer::from_bits((0..code.k).map(|_| data.random::<bool>()));
        let cw = ldpc_encode(&info, code);
        let llrs: Vec<f64> = cw
            .iter()
            .map(|bit| {
                let n: f64 = noise.sample(StandardNormal);
                let y = if bit { -1.0 } else { 1.0 } + sigma * n;
                2.0 * y / sigma2
            })
            .collect();
        let out = ldpc_decode(&llrs, code, MAX_ITERS).unwrap();
        let errors = out.info.hamming_distance(&info);
        w.frames_ok += usize::from(out.converged && errors == 0);
        w.info_bits += code.k;
        w.info_errors += errors;
    }
    w
}

/// Gaussian tail inverse: `Q⁻¹(p)`.
pub fn q_inv(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}

pub fn fixtures(n: usize, height: usize, width: usize) -> Vec<ImageTensor> {
    (1..=n as u64)
        .map(|s| synthetic_scene(height, width, s).unwrap())
        .collect()
}

fn gamma_pdf(x: f64, shape: f64) -> f64 {
    // Gamma(shape, scale 1/shape), unit mean
    (shape * shape.ln() + (shape - 1.0) * x.ln() - shape * x - ln_gamma(shape)).exp()
}

/// Density of X·Y with unit-mean gamma factors, by direct quadrature of
/// ∫ f_X(x) f_Y(i/x) / x dx on a log grid.
pub fn mixture_pdf(i: f64, alpha: f64, beta: f64) -> f64 {
    let (lo, hi, n) = (-12.0f64, 4.0f64, 40_000);
    let h = (hi - lo) / n as f64;
    let f = |u: f64| {
        let x = u.exp();
        gamma_pdf(x, alpha) * gamma_pdf(i / x, beta)
    };
    // composite Simpson in u = ln x (dx/x = du)
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

pub fn random_bits(n: usize, seed: u64) -> BitBuffer {
    let mut rng = seeded_rng(seed, DATA);
    BitBuffer::from_bits((0..n).map(|_| rng.random::<bool>()))
}

pub fn bit_error_rate(rx: &SymbolStream, fmt: ModFormat, noise_var: f64, bits: &BitBuffer) -> f64 {
    let hard = hard_decisions(&demodulate_llr(rx, fmt, noise_var).unwrap());
    hard.hamming_distance(bits) as f64 / bits.len() as f64
}

/// QPSK pre-FEC BER over 2¹⁹ symbols through the coherent chain at symbol
/// SNR `snr_db`.
pub fn coherent_qpsk_ber(
    cfg: &LinkConfig,
    snr_db: f64,
    impairments: &CoherentImpairments,
    cpr: bool,
) -> f64 {
    let bits = random_bits(1 << 20, 3);
    let symbols = modulate(&bits, ModFormat::Qpsk).unwrap().to_complex();
    let tx = coherent_transmit(cfg, &split_pols(&symbols)).unwrap();
    let n0 = 10f64.powf(-snr_db / 10.0);
    let rx = run_coherent(
        cfg,
        &tx,
        &ChannelRealization::at_rop(0.0),
        n0,
        impairments,
        &mut seeded_rng(3, NOISE),
        &mut seeded_rng(3, PHASE_NOISE),
    )
    .unwrap();
    let out = coherent_receive(cfg, &rx, &tx, cpr).unwrap();
    let merged = merge_pols(&out.pols, symbols.len());
    bit_error_rate(
        &SymbolStream::from_complex(&merged).unwrap(),
        ModFormat::Qpsk,
        out.noise_var,
        &bits,
    )
}

/// Effective symbol SNR (dB) implied by a Gray QPSK BER: BER = Q(√SNR).
pub fn qpsk_snr_db(ber: f64) -> f64 {
    20.0 * q_inv(ber).log10()
}
