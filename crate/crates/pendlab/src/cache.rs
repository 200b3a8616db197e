//! On-disk coefficient-table cache.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  "PENDTAB\0"
//! version u32      currently 1
//! kind    u8       0 = pend, 1 = a, 2 = p
//! backend u8       0 = exact, 1 = parity, 2 = residue
//! modulus u64      0 for exact, 2 for parity, m for residue
//! order   u64      number of coefficients
//! payload          backend-specific, see below
//! ```
//!
//! Payloads: exact coefficients are length-prefixed limb strings (i32 signed
//! limb count — the sign carries the coefficient sign, 0 encodes zero — then
//! that many u32 limbs, least significant first); parity tables are
//! bit-packed LSB-first, ceil(order/8) bytes; residue tables are one u64 per
//! coefficient. A cache hit must reproduce the table bit-for-bit: any
//! structural doubt is an error, and callers fall back to recomputing.

use crate::partitions::TableKind;
use crate::ring::{Exact, Parity, Residue};
use crate::series::Series;
use num_bigint::{BigInt, Sign};
use std::fs;
use std::io::Write as _;
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"PENDTAB\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a coefficient-table cache (bad magic)")]
    BadMagic,
    #[error("unsupported cache format version {0}")]
    BadVersion(u32),
    #[error("unknown table kind tag {0}")]
    BadKind(u8),
    #[error("cache holds backend tag {found}, expected {expected}")]
    WrongBackend { found: u8, expected: u8 },
    #[error("cache declares modulus {0}, invalid for its backend")]
    BadModulus(u64),
    #[error("cache file is truncated")]
    Truncated,
    #[error("cache file has trailing bytes")]
    TrailingBytes,
    #[error("cache payload holds a value outside its declared modulus")]
    ValueOutOfRange,
    #[error("cache order {0} does not fit in memory addressing")]
    OrderOverflow(u64),
}

fn kind_tag(kind: TableKind) -> u8 {
    match kind {
        TableKind::Pend => 0,
        TableKind::A => 1,
        TableKind::P => 2,
    }
}

fn kind_from_tag(tag: u8) -> Result<TableKind, CacheError> {
    match tag {
        0 => Ok(TableKind::Pend),
        1 => Ok(TableKind::A),
        2 => Ok(TableKind::P),
        other => Err(CacheError::BadKind(other)),
    }
}

/// Series types that know how to lay themselves out in the cache payload.
pub trait Cacheable: Sized {
    const BACKEND_TAG: u8;

    /// Value of the header modulus field.
    fn modulus_field(&self) -> u64;

    /// Number of coefficients, written to the header order field.
    fn coeff_count(&self) -> usize;

    fn encode_payload(&self, out: &mut Vec<u8>);

    fn decode_payload(
        reader: &mut Reader<'_>,
        order: usize,
        modulus: u64,
    ) -> Result<Self, CacheError>;
}

/// Bounds-checked little-endian cursor over a cache file image.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CacheError> {
        let end = self.pos.checked_add(n).ok_or(CacheError::Truncated)?;
        if end > self.buf.len() {
            return Err(CacheError::Truncated);
        }
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, CacheError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CacheError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32, CacheError> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CacheError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<(), CacheError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(CacheError::TrailingBytes)
        }
    }
}

impl Cacheable for Series<Exact> {
    const BACKEND_TAG: u8 = 0;

    fn modulus_field(&self) -> u64 {
        0
    }

    fn coeff_count(&self) -> usize {
        self.order()
    }

    fn encode_payload(&self, out: &mut Vec<u8>) {
        for c in self.coeffs() {
            let (sign, digits) = c.to_u32_digits();
            let count = i32::try_from(digits.len()).expect("coefficient limb count fits i32");
            let signed = if sign == Sign::Minus { -count } else { count };
            out.extend_from_slice(&signed.to_le_bytes());
            for d in digits {
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }

    fn decode_payload(
        reader: &mut Reader<'_>,
        order: usize,
        modulus: u64,
    ) -> Result<Self, CacheError> {
        if modulus != 0 {
            return Err(CacheError::BadModulus(modulus));
        }
        let mut coeffs = Vec::with_capacity(order);
        for _ in 0..order {
            let signed = reader.i32()?;
            let count = signed.unsigned_abs() as usize;
            let mut digits = Vec::with_capacity(count);
            for _ in 0..count {
                digits.push(reader.u32()?);
            }
            let sign = match signed {
                0 => Sign::NoSign,
                s if s < 0 => Sign::Minus,
                _ => Sign::Plus,
            };
            coeffs.push(BigInt::new(sign, digits));
        }
        Ok(Series::from_coeffs(Exact, coeffs))
    }
}

impl Cacheable for Series<Parity> {
    const BACKEND_TAG: u8 = 1;

    fn modulus_field(&self) -> u64 {
        2
    }

    fn coeff_count(&self) -> usize {
        self.order()
    }

    fn encode_payload(&self, out: &mut Vec<u8>) {
        let coeffs = self.coeffs();
        out.reserve(coeffs.len().div_ceil(8));
        for chunk in coeffs.chunks(8) {
            let mut byte = 0u8;
            for (bit, &c) in chunk.iter().enumerate() {
                if c {
                    byte |= 1 << bit;
                }
            }
            out.push(byte);
        }
    }

    fn decode_payload(
        reader: &mut Reader<'_>,
        order: usize,
        modulus: u64,
    ) -> Result<Self, CacheError> {
        if modulus != 2 {
            return Err(CacheError::BadModulus(modulus));
        }
        let bytes = reader.take(order.div_ceil(8))?;
        let mut coeffs = Vec::with_capacity(order);
        for n in 0..order {
            coeffs.push(bytes[n / 8] >> (n % 8) & 1 == 1);
        }
        Ok(Series::from_coeffs(Parity, coeffs))
    }
}

impl Cacheable for Series<Residue> {
    const BACKEND_TAG: u8 = 2;

    fn modulus_field(&self) -> u64 {
        self.ring().modulus()
    }

    fn coeff_count(&self) -> usize {
        self.order()
    }

    fn encode_payload(&self, out: &mut Vec<u8>) {
        out.reserve(self.order() * 8);
        for c in self.coeffs() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }

    fn decode_payload(
        reader: &mut Reader<'_>,
        order: usize,
        modulus: u64,
    ) -> Result<Self, CacheError> {
        let ring = Residue::new(modulus).ok_or(CacheError::BadModulus(modulus))?;
        let mut coeffs = Vec::with_capacity(order);
        for _ in 0..order {
            let v = reader.u64()?;
            if v >= modulus {
                return Err(CacheError::ValueOutOfRange);
            }
            coeffs.push(v);
        }
        Ok(Series::from_coeffs(ring, coeffs))
    }
}

/// Serialize a table to `path`, writing through a sibling temp file so a
/// crash never leaves a half-written cache behind.
pub fn write_table<T: Cacheable>(
    path: &Path,
    kind: TableKind,
    table: &T,
) -> Result<(), CacheError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind_tag(kind));
    out.push(T::BACKEND_TAG);
    out.extend_from_slice(&table.modulus_field().to_le_bytes());
    out.extend_from_slice(&(table.coeff_count() as u64).to_le_bytes());
    table.encode_payload(&mut out);

    let tmp = path.with_extension("tbl.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&out)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Parse a cache file as a `T`-backed table, checking every structural
/// claim the header makes.
pub fn read_table<T: Cacheable>(path: &Path) -> Result<(TableKind, T), CacheError> {
    let buf = fs::read(path)?;
    let mut r = Reader::new(&buf);
    if r.take(8)? != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(CacheError::BadVersion(version));
    }
    let kind = kind_from_tag(r.u8()?)?;
    let backend = r.u8()?;
    if backend != T::BACKEND_TAG {
        return Err(CacheError::WrongBackend {
            found: backend,
            expected: T::BACKEND_TAG,
        });
    }
    let modulus = r.u64()?;
    let order_raw = r.u64()?;
    let order = usize::try_from(order_raw).map_err(|_| CacheError::OrderOverflow(order_raw))?;
    let table = T::decode_payload(&mut r, order, modulus)?;
    r.finish()?;
    Ok((kind, table))
}

/// Canonical cache file name for a table: `{kind}-{backend}-n{order}.tbl`,
/// where backend is `exact`, `parity`, or `residue{m}`.
pub fn cache_file_name(kind: TableKind, backend_label: &str, order: usize) -> String {
    format!("{}-{}-n{}.tbl", kind.label(), backend_label, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{a_table, pend_table};
    use tempfile::tempdir;

    #[test]
    fn exact_tables_round_trip_including_negatives_and_wide_values() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.tbl");
        let coeffs = vec![
            BigInt::from(1),
            BigInt::from(-1),
            BigInt::from(0),
            BigInt::from(u64::MAX) * BigInt::from(u64::MAX) * BigInt::from(12345),
            -(BigInt::from(u64::MAX) + BigInt::from(1)),
        ];
        let table = Series::from_coeffs(Exact, coeffs);
        write_table(&path, TableKind::A, &table).unwrap();
        let (kind, loaded): (_, Series<Exact>) = read_table(&path).unwrap();
        assert_eq!(kind, TableKind::A);
        assert_eq!(loaded, table);
    }

    #[test]
    fn parity_tables_round_trip_at_non_byte_boundaries() {
        let dir = tempdir().unwrap();
        for order in [1usize, 7, 8, 9, 1000] {
            let path = dir.path().join(format!("p{order}.tbl"));
            let table = pend_table(Parity, order).unwrap().into_series();
            write_table(&path, TableKind::Pend, &table).unwrap();
            let (kind, loaded): (_, Series<Parity>) = read_table(&path).unwrap();
            assert_eq!(kind, TableKind::Pend);
            assert_eq!(loaded, table, "order {order}");
        }
    }

    #[test]
    fn residue_tables_round_trip_with_their_modulus() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.tbl");
        let ring = Residue::new((1 << 60) - 93).unwrap();
        let table = a_table(ring, 200).unwrap().into_series();
        write_table(&path, TableKind::A, &table).unwrap();
        let (_, loaded): (_, Series<Residue>) = read_table(&path).unwrap();
        assert_eq!(loaded, table);
        assert_eq!(loaded.ring().modulus(), (1 << 60) - 93);
    }

    #[test]
    fn structural_corruption_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.tbl");
        let table = pend_table(Parity, 64).unwrap().into_series();
        write_table(&path, TableKind::Pend, &table).unwrap();
        let pristine = fs::read(&path).unwrap();

        let mut bad = pristine.clone();
        bad[0] ^= 0xff;
        fs::write(&path, &bad).unwrap();
        assert!(matches!(
            read_table::<Series<Parity>>(&path),
            Err(CacheError::BadMagic)
        ));

        let mut bad = pristine.clone();
        bad[8] = 99; // version field
        fs::write(&path, &bad).unwrap();
        assert!(matches!(
            read_table::<Series<Parity>>(&path),
            Err(CacheError::BadVersion(99))
        ));

        fs::write(&path, &pristine[..pristine.len() - 1]).unwrap();
        assert!(matches!(
            read_table::<Series<Parity>>(&path),
            Err(CacheError::Truncated)
        ));

        let mut bad = pristine.clone();
        bad.push(0);
        fs::write(&path, &bad).unwrap();
        assert!(matches!(
            read_table::<Series<Parity>>(&path),
            Err(CacheError::TrailingBytes)
        ));

        fs::write(&path, &pristine).unwrap();
        assert!(matches!(
            read_table::<Series<Exact>>(&path),
            Err(CacheError::WrongBackend {
                found: 1,
                expected: 0
            })
        ));
    }

    #[test]
    fn residue_payload_values_must_respect_the_modulus() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("v.tbl");
        let ring = Residue::new(3).unwrap();
        let table = pend_table(ring, 4).unwrap().into_series();
        write_table(&path, TableKind::Pend, &table).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        // Header is 8+4+1+1+8+8 = 30 bytes; overwrite the first residue.
        bytes[30..38].copy_from_slice(&7u64.to_le_bytes());
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_table::<Series<Residue>>(&path),
            Err(CacheError::ValueOutOfRange)
        ));
    }

    #[test]
    fn file_names_spell_out_kind_backend_and_order() {
        assert_eq!(
            cache_file_name(TableKind::Pend, "parity", 1_000_000),
            "pend-parity-n1000000.tbl"
        );
        assert_eq!(
            cache_file_name(TableKind::A, "exact", 5103),
            "a-exact-n5103.tbl"
        );
        assert_eq!(
            cache_file_name(TableKind::P, "residue3", 10),
            "p-residue3-n10.tbl"
        );
    }
}
