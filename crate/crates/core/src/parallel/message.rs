//! Wire format of one halo message.
//!
//! ```text
//! step        u64
//! slot count  u32
//! per slot:   k u32, delta 3 x i8, payload length u32 (values), payload f64...
//! ```
//!
//! All integers and floats little-endian.

use crate::error::{FksError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SlotPayload {
    pub k: u32,
    pub delta: [i8; 3],
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExchangeMessage {
    pub step: u64,
    pub slots: Vec<SlotPayload>,
}

impl ExchangeMessage {
    pub fn value_count(&self) -> usize {
        self.slots.iter().map(|s| s.values.len()).sum()
    }

    pub fn encoded_len(&self) -> usize {
        12 + self.slots.iter().map(|s| 11 + 8 * s.values.len()).sum::<usize>()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&(self.slots.len() as u32).to_le_bytes());
        for s in &self.slots {
            out.extend_from_slice(&s.k.to_le_bytes());
            out.extend(s.delta.iter().map(|d| *d as u8));
            out.extend_from_slice(&(s.values.len() as u32).to_le_bytes());
            for v in &s.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        let step = u64::from_le_bytes(r.take()?);
        let count = u32::from_le_bytes(r.take()?) as usize;
        let mut slots = Vec::with_capacity(count.min(bytes.len() / 11));
        for _ in 0..count {
            let k = u32::from_le_bytes(r.take()?);
            let d: [u8; 3] = r.take()?;
            let len = u32::from_le_bytes(r.take()?) as usize;
            if r.remaining() < 8 * len {
                return Err(r.short());
            }
            let values = (0..len)
                .map(|_| r.take().map(f64::from_le_bytes))
                .collect::<Result<_>>()?;
            slots.push(SlotPayload {
                k,
                delta: d.map(|b| b as i8),
                values,
            });
        }
        if r.remaining() != 0 {
            return Err(FksError::protocol(format!(
                "{} trailing bytes after halo message",
                r.remaining()
            )));
        }
        Ok(Self { step, slots })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.at
    }

    fn short(&self) -> FksError {
        FksError::protocol(format!("halo message truncated at byte {}", self.at))
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.at + N;
        let chunk = self.bytes.get(self.at..end).ok_or_else(|| self.short())?;
        self.at = end;
        Ok(chunk.try_into().expect("slice of length N"))
    }
}
