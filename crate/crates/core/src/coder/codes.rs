//! Elias universal codes for positive integers.

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

fn floor_log2(x: u64) -> u32 {
    63 - x.leading_zeros()
}

/// Length in bits of the gamma code of `x >= 1`: `2*floor(log2 x) + 1`.
pub fn gamma_len(x: u64) -> u64 {
    2 * floor_log2(x) as u64 + 1
}

/// Length in bits of the delta code of `x >= 1`.
pub fn delta_len(x: u64) -> u64 {
    let nbits = floor_log2(x);
    gamma_len(nbits as u64 + 1) + nbits as u64
}

pub fn write_gamma(w: &mut BitWriter, x: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::usage("Elias codes cannot encode zero"));
    }
    let nbits = floor_log2(x);
    w.write(0, nbits);
    w.write(x, nbits + 1);
    Ok(())
}

pub fn read_gamma(r: &mut BitReader<'_>) -> Result<u64> {
    let start = r.position();
    let mut zeros = 0u32;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 63 {
            return Err(Error::corrupt(start, "gamma code longer than 64 bits"));
        }
    }
    let low = r.read(zeros)?;
    Ok((1u64 << zeros) | low)
}

pub fn write_delta(w: &mut BitWriter, x: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::usage("Elias codes cannot encode zero"));
    }
    let nbits = floor_log2(x);
    write_gamma(w, nbits as u64 + 1)?;
    w.write(x, nbits);
    Ok(())
}

pub fn read_delta(r: &mut BitReader<'_>) -> Result<u64> {
    let start = r.position();
    let len = read_gamma(r)?;
    if len > 64 {
        return Err(Error::corrupt(start, "delta code longer than 64 bits"));
    }
    let nbits = (len - 1) as u32;
    let low = r.read(nbits)?;
    Ok(if nbits == 64 {
        low
    } else {
        (1u64 << nbits) | low
    })
}

/// Gamma code as a `0`/`1` string.
pub fn elias_gamma(x: u64) -> Result<String> {
    let mut w = BitWriter::new();
    write_gamma(&mut w, x)?;
    Ok(bit_string(w))
}

/// Delta code as a `0`/`1` string.
pub fn elias_delta(x: u64) -> Result<String> {
    let mut w = BitWriter::new();
    write_delta(&mut w, x)?;
    Ok(bit_string(w))
}

pub fn elias_gamma_decode(bits: &str) -> Result<u64> {
    decode_str(bits, read_gamma)
}

pub fn elias_delta_decode(bits: &str) -> Result<u64> {
    decode_str(bits, read_delta)
}

fn bit_string(w: BitWriter) -> String {
    let n = w.bit_len() as usize;
    let bytes = w.finish();
    (0..n)
        .map(|i| {
            if (bytes[i / 8] >> (7 - i % 8)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn decode_str(bits: &str, read: fn(&mut BitReader<'_>) -> Result<u64>) -> Result<u64> {
    let mut w = BitWriter::new();
    for ch in bits.chars() {
        match ch {
            '0' => w.write_bit(false),
            '1' => w.write_bit(true),
            _ => return Err(Error::usage(format!("not a bit: {ch:?}"))),
        }
    }
    let n = w.bit_len();
    let bytes = w.finish();
    let mut r = BitReader::new(&bytes);
    let v = read(&mut r)?;
    if r.position() != n {
        return Err(Error::corrupt(r.position(), "trailing bits after code"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(elias_gamma(1).unwrap(), "1");
        assert_eq!(elias_gamma(2).unwrap(), "010");
        assert_eq!(elias_gamma(5).unwrap(), "00101");
        assert!(matches!(elias_gamma(0), Err(Error::Usage(_))));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(elias_delta(1).unwrap(), "1");
        assert_eq!(elias_delta(2).unwrap(), "0100");
        assert_eq!(elias_delta(17).unwrap(), "001010001");
        assert_eq!(elias_delta_decode("001010001").unwrap(), 17);
        assert!(elias_delta(0).is_err());
    }

    #[test]
    fn roundtrip_up_to_2_pow_20() {
        for x in 1..=(1u64 << 20) {
            let mut w = BitWriter::new();
            write_gamma(&mut w, x).unwrap();
            write_delta(&mut w, x).unwrap();
            assert_eq!(w.bit_len(), gamma_len(x) + delta_len(x));
            assert_eq!(gamma_len(x), 2 * (63 - x.leading_zeros() as u64) + 1);
            let bytes = w.finish();
            let mut r = BitReader::new(&bytes);
            assert_eq!(read_gamma(&mut r).unwrap(), x);
            assert_eq!(read_delta(&mut r).unwrap(), x);
        }
    }

    #[test]
    fn extremes() {
        for x in [u64::MAX, 1 << 63, (1 << 32) + 7] {
            let mut w = BitWriter::new();
            write_gamma(&mut w, x).unwrap();
            write_delta(&mut w, x).unwrap();
            let bytes = w.finish();
            let mut r = BitReader::new(&bytes);
            assert_eq!(read_gamma(&mut r).unwrap(), x);
            assert_eq!(read_delta(&mut r).unwrap(), x);
        }
    }

    #[test]
    fn truncated_gamma() {
        assert!(matches!(
            elias_gamma_decode("0010"),
            Err(Error::Corrupt { .. })
        ));
        assert!(matches!(
            elias_gamma_decode("000"),
            Err(Error::Corrupt { .. })
        ));
    }
}
