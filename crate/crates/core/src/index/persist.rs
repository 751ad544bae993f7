//! On-disk index format.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "PNDX"
//!      4     4  format_version (u32 LE)
//!      8     1  mode (0 citation, 1 descriptor)
//!      9     3  reserved, zero
//!     12     8  n_docs (u64 LE)
//!     20     8  n_keys (u64 LE)
//!     28     8  payload length in bytes (u64 LE)
//!     36     4  CRC-32 over bytes 0..36 followed by the payload
//!     40     -  payload
//! ```
//!
//! The payload holds, in order: the document table (`doc_id`, optional title,
//! optional year per document), the key dictionary in ascending order, and one
//! posting list per key as a LEB128 length followed by LEB128 gaps (the first
//! gap is the first ordinal). Strings are a LEB128 byte length plus UTF-8
//! bytes. Forward lists are not stored; they are re-derived on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{CoMentionIndex, Csr, DocEntry, IndexError, Mode};

pub const FORMAT_VERSION: u32 = 1;

const MAGIC: &[u8; 4] = b"PNDX";
const HEADER_LEN: usize = 40;
const CHECKED_HEADER_LEN: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexHeader {
    pub format_version: u32,
    pub mode: Mode,
    pub n_docs: u64,
    pub n_keys: u64,
    pub checksum: u32,
}

pub fn save_index(index: &CoMentionIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    let bytes = index.to_bytes();
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    file.sync_all()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<CoMentionIndex, IndexError> {
    CoMentionIndex::from_bytes(&fs::read(path)?)
}

impl CoMentionIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = Vec::new();
        for d in self.docs() {
            put_str(&mut payload, &d.doc_id);
            match &d.title {
                Some(t) => {
                    payload.push(1);
                    put_str(&mut payload, t);
                }
                None => payload.push(0),
            }
            match d.year {
                Some(y) => {
                    payload.push(1);
                    put_varint(&mut payload, zigzag(y));
                }
                None => payload.push(0),
            }
        }
        for k in self.keys() {
            put_str(&mut payload, k);
        }
        let postings = self.postings_csr();
        for k in 0..postings.n_rows() {
            let row = postings.row(k);
            put_varint(&mut payload, row.len() as u64);
            let mut prev = 0u32;
            for &d in row {
                put_varint(&mut payload, u64::from(d - prev));
                prev = d;
            }
        }

        let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(match self.mode() {
            Mode::Citation => 0,
            Mode::Descriptor => 1,
        });
        out.extend_from_slice(&[0; 3]);
        out.extend_from_slice(&(self.n_docs() as u64).to_le_bytes());
        out.extend_from_slice(&(self.n_keys() as u64).to_le_bytes());
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        let mut crc = crc32fast::Hasher::new();
        crc.update(&out);
        crc.update(&payload);
        out.extend_from_slice(&crc.finalize().to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IndexError> {
        let header = read_header(bytes)?;
        let payload = &bytes[HEADER_LEN..];
        let mut crc = crc32fast::Hasher::new();
        crc.update(&bytes[..CHECKED_HEADER_LEN]);
        crc.update(payload);
        if crc.finalize() != header.checksum {
            return Err(corrupt("checksum mismatch"));
        }

        let n_docs = usize::try_from(header.n_docs).map_err(|_| corrupt("n_docs overflow"))?;
        let n_keys = usize::try_from(header.n_keys).map_err(|_| corrupt("n_keys overflow"))?;
        if n_docs > u32::MAX as usize || n_keys > u32::MAX as usize {
            return Err(corrupt("counts exceed ordinal range"));
        }
        let mut r = Reader { buf: payload, pos: 0 };
        // every document and key occupies at least one payload byte
        if n_docs.saturating_add(n_keys) > payload.len() {
            return Err(corrupt("counts exceed payload"));
        }

        let mut docs = Vec::with_capacity(n_docs);
        for _ in 0..n_docs {
            let doc_id = r.string()?;
            let title = if r.flag()? { Some(r.string()?) } else { None };
            let year = if r.flag()? { Some(unzigzag(r.varint()?)) } else { None };
            docs.push(DocEntry { doc_id, title, year });
        }
        let mut keys = Vec::with_capacity(n_keys);
        for _ in 0..n_keys {
            keys.push(r.string()?);
        }
        let mut postings = Csr {
            offsets: Vec::with_capacity(n_keys + 1),
            data: Vec::new(),
        };
        postings.offsets.push(0);
        for _ in 0..n_keys {
            let len = r.varint()?;
            if len > n_docs as u64 {
                return Err(corrupt("posting list longer than corpus"));
            }
            let mut prev = 0u64;
            for i in 0..len {
                let gap = r.varint()?;
                if i > 0 && gap == 0 {
                    return Err(corrupt("repeated posting"));
                }
                prev = prev.checked_add(gap).ok_or_else(|| corrupt("posting overflow"))?;
                if prev >= n_docs as u64 {
                    return Err(corrupt("posting out of range"));
                }
                postings.data.push(prev as u32);
            }
            postings.offsets.push(postings.data.len());
        }
        if r.pos != payload.len() {
            return Err(corrupt("trailing bytes"));
        }

        CoMentionIndex::from_postings(header.mode, docs, keys, postings).map_err(IndexError::Corrupt)
    }

    pub fn header(&self) -> IndexHeader {
        let bytes = self.to_bytes();
        read_header(&bytes).expect("freshly encoded header")
    }
}

fn read_header(bytes: &[u8]) -> Result<IndexHeader, IndexError> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(corrupt("not an index file"));
    }
    let format_version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if format_version != FORMAT_VERSION {
        return Err(IndexError::UnsupportedVersion(format_version));
    }
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("truncated header"));
    }
    let mode = match bytes[8] {
        0 => Mode::Citation,
        1 => Mode::Descriptor,
        m => return Err(corrupt(&format!("unknown mode byte {m}"))),
    };
    let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let payload_len = u64_at(28);
    if payload_len != (bytes.len() - HEADER_LEN) as u64 {
        return Err(corrupt("payload length mismatch"));
    }
    Ok(IndexHeader {
        format_version,
        mode,
        n_docs: u64_at(12),
        n_keys: u64_at(20),
        checksum: u32::from_le_bytes(bytes[36..40].try_into().unwrap()),
    })
}

fn corrupt(msg: &str) -> IndexError {
    IndexError::Corrupt(msg.to_string())
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_varint(out, s.len() as u64);
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, IndexError> {
        let b = *self.buf.get(self.pos).ok_or_else(|| corrupt("unexpected end of payload"))?;
        self.pos += 1;
        Ok(b)
    }

    fn flag(&mut self) -> Result<bool, IndexError> {
        match self.byte()? {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(corrupt("bad flag byte")),
        }
    }

    fn varint(&mut self) -> Result<u64, IndexError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(corrupt("varint too long"))
    }

    fn string(&mut self) -> Result<String, IndexError> {
        let len = usize::try_from(self.varint()?).map_err(|_| corrupt("string length overflow"))?;
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| corrupt("string runs past payload"))?;
        let s = std::str::from_utf8(&self.buf[self.pos..end]).map_err(|_| corrupt("invalid utf-8"))?;
        self.pos = end;
        Ok(s.to_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::ingest::DocumentRecord;
    use pennant_testkit::{corpus6, random_corpus};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fixture() -> CoMentionIndex {
        let recs: Vec<_> = corpus6()
            .into_iter()
            .map(|d| {
                let mut r = DocumentRecord::new(d.id);
                r.references = d.references;
                r.year = Some(-3);
                r.title = Some("t".into());
                r
            })
            .collect();
        build_index(&recs, Mode::Citation).unwrap()
    }

    #[test]
    fn round_trip_file() {
        let idx = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c6.idx");
        save_index(&idx, &path).unwrap();
        assert_eq!(load_index(&path).unwrap(), idx);
    }

    #[test]
    fn header_fields() {
        let h = fixture().header();
        assert_eq!(h.format_version, 1);
        assert_eq!(h.mode, Mode::Citation);
        assert_eq!((h.n_docs, h.n_keys), (6, 4));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = fixture().to_bytes();
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        let err = CoMentionIndex::from_bytes(&bytes).unwrap_err();
        assert!(matches!(err, IndexError::UnsupportedVersion(99)));
        assert_eq!(err.to_string(), "unsupported index version 99");
    }

    #[test]
    fn truncation_is_corruption() {
        let bytes = fixture().to_bytes();
        for cut in [0, 3, 8, 20, 39, 40, bytes.len() - 1] {
            let err = CoMentionIndex::from_bytes(&bytes[..cut]).unwrap_err();
            assert!(matches!(err, IndexError::Corrupt(_)), "cut {cut}: {err}");
        }
    }

    #[test]
    fn every_single_byte_flip_is_detected() {
        let bytes = fixture().to_bytes();
        for i in 0..bytes.len() {
            let mut b = bytes.clone();
            b[i] ^= 0x5a;
            assert!(CoMentionIndex::from_bytes(&b).is_err(), "byte {i}");
        }
    }

    #[test]
    fn encoding_is_deterministic() {
        assert_eq!(fixture().to_bytes(), fixture().to_bytes());
    }

    #[test]
    fn zigzag_round_trip() {
        for v in [0, 1, -1, i64::MIN, i64::MAX, 2024, -2024] {
            assert_eq!(unzigzag(zigzag(v)), v);
        }
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let raw = random_corpus(&mut rng, 150, 40);
            let recs: Vec<_> = raw
                .into_iter()
                .map(|d| {
                    let mut r = DocumentRecord::new(d.id);
                    r.title = d.title;
                    r.references = d.references;
                    r.descriptors = d.descriptors;
                    r.year = rng.random_bool(0.5).then(|| rng.random_range(-5000..5000));
                    r
                })
                .collect();
            for mode in [Mode::Citation, Mode::Descriptor] {
                let idx = build_index(&recs, mode).unwrap();
                assert_eq!(CoMentionIndex::from_bytes(&idx.to_bytes()).unwrap(), idx);
            }
        }
    }
}
