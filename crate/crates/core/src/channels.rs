//! Memoryless channels producing LLR vectors, with the convention that a
//! positive LLR favours bit 0.

use std::fmt;
use std::str::FromStr;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::codes::{BinaryWord, LlrVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// BPSK over AWGN at `snr_db` = Eb/N0 in dB for a code of the given rate.
    Biawgn { snr_db: f64, rate: f64 },
}

impl ChannelSpec {
    pub fn bsc(p: f64) -> Result<Self> {
        let ch = ChannelSpec::Bsc { p };
        ch.validate()?;
        Ok(ch)
    }

    pub fn biawgn(snr_db: f64, rate: f64) -> Result<Self> {
        let ch = ChannelSpec::Biawgn { snr_db, rate };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Bsc { p } => {
                if !(p > 0.0 && p < 0.5) {
                    return Err(Error::InvalidParameter(format!(
                        "BSC crossover {p} must lie in (0, 1/2)"
                    )));
                }
            }
            ChannelSpec::Biawgn { snr_db, rate } => {
                if !snr_db.is_finite() {
                    return Err(Error::InvalidParameter("SNR must be finite".into()));
                }
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "rate {rate} must lie in (0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Noise variance of the AWGN channel.
    pub fn sigma2(&self) -> Option<f64> {
        match *self {
            ChannelSpec::Biawgn { snr_db, rate } => {
                Some(1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0)))
            }
            ChannelSpec::Bsc { .. } => None,
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChannelSpec::Bsc { p } => write!(f, "bsc:{p}"),
            ChannelSpec::Biawgn { snr_db, rate } => write!(f, "awgn:{snr_db}:{rate}"),
        }
    }
}

/// `bsc:P`, `awgn:SNR_DB` or `awgn:SNR_DB:RATE` (rate defaults to 1).
impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{t}` in channel `{s}`")))
        };
        match parts.as_slice() {
            ["bsc", p] => ChannelSpec::bsc(num(p)?),
            ["awgn" | "biawgn", snr] => ChannelSpec::biawgn(num(snr)?, 1.0),
            ["awgn" | "biawgn", snr, rate] => ChannelSpec::biawgn(num(snr)?, num(rate)?),
            _ => Err(Error::InvalidParameter(format!(
                "unknown channel `{s}` (expected bsc:P or awgn:SNR[:RATE])"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Seed of trial `index` under this base seed; independent of scheduling.
    pub fn for_trial(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sends `c` through the channel and returns the LLRs of the output.
pub fn transmit_and_llr(c: &BinaryWord, ch: &ChannelSpec, seed: RngSeed) -> Result<LlrVector> {
    ch.validate()?;
    let mut rng = seed.rng();
    let values = match *ch {
        ChannelSpec::Bsc { p } => {
            let mag = ((1.0 - p) / p).ln();
            c.bits()
                .iter()
                .map(|&b| {
                    let y = b ^ u8::from(rng.random_bool(p));
                    if y == 0 {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect()
        }
        ChannelSpec::Biawgn { .. } => {
            let sigma2 = ch.sigma2().expect("awgn");
            let noise = Normal::new(0.0, sigma2.sqrt())
                .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;
            c.bits()
                .iter()
                .map(|&b| {
                    let y = 1.0 - 2.0 * f64::from(b) + noise.sample(&mut rng);
                    2.0 * y / sigma2
                })
                .collect()
        }
    };
    LlrVector::new(values)
}
