//! Small internals shared across modules: little-endian binary IO, CRC32,
//! and seed derivation.

use std::io::{Read, Write};

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// CRC32 (IEEE, reflected, poly 0xEDB88320) — used by the buffer and
// checkpoint file formats.
// ---------------------------------------------------------------------------

fn crc32_table() -> &'static [u32; 256] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[u32; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0u32; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let mut c = i as u32;
            for _ in 0..8 {
                c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
            }
            *entry = c;
        }
        table
    })
}

/// Running CRC32 checksum.
#[derive(Clone)]
pub struct Crc32 {
    state: u32,
}

impl Crc32 {
    pub fn new() -> Self {
        Self { state: 0xFFFF_FFFF }
    }

    pub fn update(&mut self, bytes: &[u8]) {
        let table = crc32_table();
        for &b in bytes {
            self.state = table[((self.state ^ b as u32) & 0xFF) as usize] ^ (self.state >> 8);
        }
    }

    pub fn finish(&self) -> u32 {
        self.state ^ 0xFFFF_FFFF
    }
}

pub fn crc32(bytes: &[u8]) -> u32 {
    let mut c = Crc32::new();
    c.update(bytes);
    c.finish()
}

// ---------------------------------------------------------------------------
// Little-endian writer/reader used by the RARBUF1 / RARMLP1 / RAREMB1 formats.
// The writer tracks a CRC over everything written after `start_crc`.
// ---------------------------------------------------------------------------

pub struct ByteWriter<W: Write> {
    inner: W,
    crc: Crc32,
}

impl<W: Write> ByteWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner, crc: Crc32::new() }
    }

    pub fn crc(&self) -> u32 {
        self.crc.finish()
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) -> Result<()> {
        self.crc.update(bytes);
        self.inner.write_all(bytes)?;
        Ok(())
    }

    /// Writes raw bytes without folding them into the CRC (for the trailing
    /// checksum itself).
    pub fn write_raw(&mut self, bytes: &[u8]) -> Result<()> {
        self.inner.write_all(bytes)?;
        Ok(())
    }

    pub fn write_u8(&mut self, v: u8) -> Result<()> {
        self.write_bytes(&[v])
    }

    pub fn write_u32(&mut self, v: u32) -> Result<()> {
        self.write_bytes(&v.to_le_bytes())
    }

    pub fn write_u64(&mut self, v: u64) -> Result<()> {
        self.write_bytes(&v.to_le_bytes())
    }

    pub fn write_f32(&mut self, v: f32) -> Result<()> {
        self.write_bytes(&v.to_le_bytes())
    }

    pub fn write_f64(&mut self, v: f64) -> Result<()> {
        self.write_bytes(&v.to_le_bytes())
    }

    pub fn write_str(&mut self, s: &str) -> Result<()> {
        self.write_u32(s.len() as u32)?;
        self.write_bytes(s.as_bytes())
    }

    pub fn write_f32_slice(&mut self, vs: &[f32]) -> Result<()> {
        for &v in vs {
            self.write_f32(v)?;
        }
        Ok(())
    }

    pub fn write_f64_slice(&mut self, vs: &[f64]) -> Result<()> {
        for &v in vs {
            self.write_f64(v)?;
        }
        Ok(())
    }
}

pub struct ByteReader<R: Read> {
    inner: R,
    crc: Crc32,
}

impl<R: Read> ByteReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, crc: Crc32::new() }
    }

    pub fn crc(&self) -> u32 {
        self.crc.finish()
    }

    pub fn read_bytes(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut buf = vec![0u8; n];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("unexpected end of file".into()))?;
        self.crc.update(&buf);
        Ok(buf)
    }

    /// Reads without updating the CRC (for the trailing checksum itself).
    pub fn read_raw_u32(&mut self) -> Result<u32> {
        let mut buf = [0u8; 4];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("unexpected end of file".into()))?;
        Ok(u32::from_le_bytes(buf))
    }

    pub fn read_u8(&mut self) -> Result<u8> {
        Ok(self.read_bytes(1)?[0])
    }

    pub fn read_u32(&mut self) -> Result<u32> {
        let b = self.read_bytes(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn read_u64(&mut self) -> Result<u64> {
        let b = self.read_bytes(8)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn read_f32(&mut self) -> Result<f32> {
        let b = self.read_bytes(4)?;
        Ok(f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn read_f64(&mut self) -> Result<f64> {
        let b = self.read_bytes(8)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn read_str(&mut self) -> Result<String> {
        let n = self.read_u32()? as usize;
        if n > 1 << 20 {
            return Err(Error::Format(format!("string length {n} is implausible")));
        }
        let bytes = self.read_bytes(n)?;
        String::from_utf8(bytes).map_err(|_| Error::Format("invalid utf-8 string".into()))
    }

    pub fn read_f32_vec(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = self.read_bytes(n * 4)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    }

    pub fn read_f64_vec(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.read_bytes(n * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// Seed derivation. Every randomized stage derives its own stream from the
// root seed plus a domain tag, so adding stages never shifts other streams
// and parallel evaluation order cannot change results.
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed, a domain tag, and indices.
pub fn derive_seed(root: u64, tag: &str, indices: &[u64]) -> u64 {
    let mut h = mix64(root ^ 0xA076_1D64_78BD_642F);
    for &b in tag.as_bytes() {
        h = mix64(h ^ b as u64);
    }
    for &i in indices {
        h = mix64(h ^ i);
    }
    h
}
