//! Fixed-length bit vectors used as predicate columns.

use alloc::vec;
use alloc::vec::Vec;

const WORD_BITS: usize = 64;

/// A column of `len` logical bits, one per object.
///
/// Bits past `len` in the last word are always zero, so popcounts over whole
/// words are exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitColumn {
    words: Vec<u64>,
    len: usize,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        BitColumn {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut col = BitColumn {
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
            len,
        };
        col.clear_tail();
        col
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut col = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                col.set(i, true);
            }
        }
        col
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {} out of range (len {})",
            i,
            self.len
        );
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {} out of range (len {})",
            i,
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and_assign(&mut self, other: &BitColumn) {
        assert_eq!(self.len, other.len, "column length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// Popcount of `self & other` without materializing the intersection.
    pub fn and_count(&self, other: &BitColumn) -> usize {
        assert_eq!(self.len, other.len, "column length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            core::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}
