//! Versioned binary snapshot of a full simulation.
//!
//! Layout (all integers little-endian):
//!   magic "BBSIM" (5 bytes), format version u16,
//!   then length-prefixed fields (u32 byte length + payload) in this order:
//!     1. params      — JSON-encoded `ModelParams`
//!     2. t           — u64
//!     3. rng         — 4 x u64 state words
//!     4. live        — one byte per site (0/1)
//!     5. price       — N x f64
//!     6. capital     — N x f64
//!     7. label       — N x u32
//!     8. history     — N*m x f64 data, N x u32 len, N x u32 head
//!     9. ledger      — overheads u64, revenue f64, sales u64,
//!                      unsatisfied u64, debt_written_off f64
//!
//! The RNG state is included, so resuming from a checkpoint reproduces the
//! exact continuation of the original run.

use crate::market::{Ledger, Market, MarketState, SiteHistory};
use crate::params::ModelParams;
use crate::rng::SimRng;
use std::io::{self, Read, Write};

pub const MAGIC: &[u8; 5] = b"BBSIM";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes (not a checkpoint file)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    BadVersion(u16),
    #[error("malformed field `{field}`: {reason}")]
    Malformed { field: &'static str, reason: String },
    #[error("checkpoint parameters invalid: {0}")]
    BadParams(#[from] crate::params::ParamsError),
}

fn write_field<W: Write>(w: &mut W, payload: &[u8]) -> io::Result<()> {
    w.write_all(&(payload.len() as u32).to_le_bytes())?;
    w.write_all(payload)
}

fn f64s_to_bytes(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn u32s_to_bytes(values: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 4);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Serialize `market` to `w`.
pub fn save<W: Write>(w: &mut W, market: &Market) -> Result<(), CheckpointError> {
    let state = market.state();
    let params = market.params();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;

    let params_json = serde_json::to_vec(params).expect("params are serializable");
    write_field(w, &params_json)?;
    write_field(w, &state.t().to_le_bytes())?;

    let rng = state.rng_state();
    let mut rng_bytes = Vec::with_capacity(32);
    for word in rng {
        rng_bytes.extend_from_slice(&word.to_le_bytes());
    }
    write_field(w, &rng_bytes)?;

    let n = state.n();
    let live: Vec<u8> = (0..n).map(|i| state.is_live(i) as u8).collect();
    write_field(w, &live)?;
    write_field(w, &f64s_to_bytes(state.raw_prices()))?;
    write_field(w, &f64s_to_bytes(state.raw_capitals()))?;
    write_field(w, &u32s_to_bytes(state.raw_labels()))?;

    let (data, len, head) = state.history().raw_parts();
    let mut hist = Vec::with_capacity(data.len() * 8 + len.len() * 8);
    hist.extend_from_slice(&f64s_to_bytes(data));
    hist.extend_from_slice(&u32s_to_bytes(len));
    hist.extend_from_slice(&u32s_to_bytes(head));
    write_field(w, &hist)?;

    let ledger = state.ledger();
    let mut ledger_bytes = Vec::with_capacity(40);
    ledger_bytes.extend_from_slice(&ledger.overheads_paid.to_le_bytes());
    ledger_bytes.extend_from_slice(&ledger.revenue.to_le_bytes());
    ledger_bytes.extend_from_slice(&ledger.sales.to_le_bytes());
    ledger_bytes.extend_from_slice(&ledger.unsatisfied.to_le_bytes());
    ledger_bytes.extend_from_slice(&ledger.debt_written_off.to_le_bytes());
    write_field(w, &ledger_bytes)?;
    Ok(())
}

fn read_field<R: Read>(r: &mut R, field: &'static str) -> Result<Vec<u8>, CheckpointError> {
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes).map_err(CheckpointError::Io)?;
    let len = u32::from_le_bytes(len_bytes) as usize;
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload)
        .map_err(|e| CheckpointError::Malformed {
            field,
            reason: e.to_string(),
        })?;
    Ok(payload)
}

fn bytes_to_f64s(bytes: &[u8], field: &'static str) -> Result<Vec<f64>, CheckpointError> {
    if bytes.len() % 8 != 0 {
        return Err(CheckpointError::Malformed {
            field,
            reason: format!("length {} not a multiple of 8", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn bytes_to_u32s(bytes: &[u8], field: &'static str) -> Result<Vec<u32>, CheckpointError> {
    if bytes.len() % 4 != 0 {
        return Err(CheckpointError::Malformed {
            field,
            reason: format!("length {} not a multiple of 4", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Deserialize a market from `r`.
pub fn load<R: Read>(r: &mut R) -> Result<Market, CheckpointError> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut version_bytes = [0u8; 2];
    r.read_exact(&mut version_bytes)?;
    let version = u16::from_le_bytes(version_bytes);
    if version != FORMAT_VERSION {
        return Err(CheckpointError::BadVersion(version));
    }

    let params_bytes = read_field(r, "params")?;
    let params: ModelParams =
        serde_json::from_slice(&params_bytes).map_err(|e| CheckpointError::Malformed {
            field: "params",
            reason: e.to_string(),
        })?;
    params.validate()?;
    let n = params.n_sellers;
    let m = params.memory_length;

    let t_bytes = read_field(r, "t")?;
    let t = u64::from_le_bytes(
        t_bytes
            .as_slice()
            .try_into()
            .map_err(|_| CheckpointError::Malformed {
                field: "t",
                reason: format!("expected 8 bytes, got {}", t_bytes.len()),
            })?,
    );

    let rng_bytes = read_field(r, "rng")?;
    if rng_bytes.len() != 32 {
        return Err(CheckpointError::Malformed {
            field: "rng",
            reason: format!("expected 32 bytes, got {}", rng_bytes.len()),
        });
    }
    let mut rng_words = [0u64; 4];
    for (k, chunk) in rng_bytes.chunks_exact(8).enumerate() {
        rng_words[k] = u64::from_le_bytes(chunk.try_into().unwrap());
    }

    let live_bytes = read_field(r, "live")?;
    if live_bytes.len() != n {
        return Err(CheckpointError::Malformed {
            field: "live",
            reason: format!("expected {} sites, got {}", n, live_bytes.len()),
        });
    }
    let live: Vec<bool> = live_bytes.iter().map(|&b| b != 0).collect();

    let price = bytes_to_f64s(&read_field(r, "price")?, "price")?;
    let capital = bytes_to_f64s(&read_field(r, "capital")?, "capital")?;
    let label = bytes_to_u32s(&read_field(r, "label")?, "label")?;
    if price.len() != n || capital.len() != n || label.len() != n {
        return Err(CheckpointError::Malformed {
            field: "price",
            reason: "site array length mismatch".into(),
        });
    }

    let hist_bytes = read_field(r, "history")?;
    let expected = n * m * 8 + n * 4 + n * 4;
    if hist_bytes.len() != expected {
        return Err(CheckpointError::Malformed {
            field: "history",
            reason: format!("expected {expected} bytes, got {}", hist_bytes.len()),
        });
    }
    let data = bytes_to_f64s(&hist_bytes[..n * m * 8], "history")?;
    let len = bytes_to_u32s(&hist_bytes[n * m * 8..n * m * 8 + n * 4], "history")?;
    let head = bytes_to_u32s(&hist_bytes[n * m * 8 + n * 4..], "history")?;
    let history = SiteHistory::from_raw_parts(m, data, len, head);

    let ledger_bytes = read_field(r, "ledger")?;
    if ledger_bytes.len() != 40 {
        return Err(CheckpointError::Malformed {
            field: "ledger",
            reason: format!("expected 40 bytes, got {}", ledger_bytes.len()),
        });
    }
    let ledger = Ledger {
        overheads_paid: u64::from_le_bytes(ledger_bytes[0..8].try_into().unwrap()),
        revenue: f64::from_le_bytes(ledger_bytes[8..16].try_into().unwrap()),
        sales: u64::from_le_bytes(ledger_bytes[16..24].try_into().unwrap()),
        unsatisfied: u64::from_le_bytes(ledger_bytes[24..32].try_into().unwrap()),
        debt_written_off: f64::from_le_bytes(ledger_bytes[32..40].try_into().unwrap()),
    };

    let state = MarketState::from_checkpoint_parts(
        live,
        price,
        capital,
        label,
        history,
        t,
        SimRng::from_state(rng_words),
        ledger,
    );
    Ok(Market::from_parts(params, state)?)
}
