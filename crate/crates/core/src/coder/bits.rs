//! MSB-first bit packing.

use crate::error::{Error, Result};

#[derive(Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    acc: u64,
    filled: u32,
    bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn write(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        if count == 0 {
            return;
        }
        self.bits += count as u64;
        let mut remaining = count;
        while remaining > 0 {
            let take = remaining.min(56 - self.filled);
            let chunk = (value >> (remaining - take)) & ((1u64 << take) - 1);
            self.acc = (self.acc << take) | chunk;
            self.filled += take;
            remaining -= take;
            while self.filled >= 8 {
                self.filled -= 8;
                self.buf.push((self.acc >> self.filled) as u8);
            }
            self.acc &= (1u64 << self.filled) - 1;
        }
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.write(bit as u64, 1);
    }

    pub fn bit_len(&self) -> u64 {
        self.bits
    }

    /// Flushes with zero padding to a whole byte.
    pub fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.buf.push((self.acc << (8 - self.filled)) as u8);
        }
        self.buf
    }
}

pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0 }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.data.len() as u64 * 8 - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.data.len() as u64 * 8 {
            return Err(Error::corrupt(self.pos, "unexpected end of stream"));
        }
        let byte = self.data[(self.pos / 8) as usize];
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read(&mut self, count: u32) -> Result<u64> {
        debug_assert!(count <= 64);
        if self.remaining() < count as u64 {
            return Err(Error::corrupt(
                self.pos,
                format!("stream ends inside a {count}-bit field"),
            ));
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }
}
