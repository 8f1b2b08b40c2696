//! Fixed-width bitsets used for world sets and algebra coordinate vectors.

/// A bitset of a fixed length, backed by 64-bit words.
///
/// Unused high bits of the last word are kept zero, so equality and hashing
/// are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.set(i, true);
        }
        b
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut b = Bits::empty(len);
        b.set(i, true);
        b
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut b = Bits::empty(len);
        for &i in idx {
            b.set(i, true);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty_set(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &Bits) -> Bits {
        let mut r = self.clone();
        r.union_with(other);
        r
    }

    pub fn intersection(&self, other: &Bits) -> Bits {
        let mut r = self.clone();
        r.intersect_with(other);
        r
    }

    pub fn difference(&self, other: &Bits) -> Bits {
        let mut r = self.clone();
        r.difference_with(other);
        r
    }

    pub fn complement(&self) -> Bits {
        let mut r = Bits {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        r.mask_tail();
        r
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Read `width <= 64` bits starting at `start` as a word.
    pub fn extract(&self, start: usize, width: usize) -> u64 {
        debug_assert!(width <= 64 && start + width <= self.len);
        if width == 0 {
            return 0;
        }
        let wi = start / 64;
        let off = start % 64;
        let mut v = self.words[wi] >> off;
        if off != 0 && off + width > 64 {
            v |= self.words[wi + 1] << (64 - off);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    /// OR `width <= 64` bits into the set starting at `start`.
    pub fn inject(&mut self, start: usize, width: usize, word: u64) {
        debug_assert!(width <= 64 && start + width <= self.len);
        if width == 0 {
            return;
        }
        let masked = if width == 64 {
            word
        } else {
            word & ((1u64 << width) - 1)
        };
        let wi = start / 64;
        let off = start % 64;
        self.words[wi] |= masked << off;
        if off != 0 && off + width > 64 {
            self.words[wi + 1] |= masked >> (64 - off);
        }
    }

    /// Lexicographic comparison reading the bit string from index 0 upward,
    /// with 0 < 1 at the first differing position.
    pub fn lex_cmp(&self, other: &Bits) -> std::cmp::Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let diff = a ^ b;
                let pos = diff.trailing_zeros();
                let abit = a >> pos & 1;
                return abit.cmp(&(1 - abit));
            }
        }
        std::cmp::Ordering::Equal
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter_ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_respects_length() {
        let b = Bits::from_indices(70, &[0, 65]);
        let c = b.complement();
        assert_eq!(c.count(), 68);
        assert!(!c.get(0) && !c.get(65) && c.get(69));
        assert_eq!(c.complement(), b);
    }

    #[test]
    fn iter_ones_ascending() {
        let b = Bits::from_indices(130, &[3, 64, 129]);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![3, 64, 129]);
    }

    #[test]
    fn extract_inject_roundtrip_across_word_boundary() {
        let mut b = Bits::empty(130);
        b.inject(60, 10, 0b10_1101_0011);
        assert_eq!(b.extract(60, 10), 0b10_1101_0011);
        assert_eq!(b.extract(0, 60), 0);
        assert_eq!(b.extract(70, 60), 0);
        let mut c = Bits::empty(64);
        c.inject(0, 64, u64::MAX);
        assert_eq!(c.count(), 64);
    }

    #[test]
    fn lex_cmp_zero_before_one() {
        let a = Bits::from_indices(4, &[0]);
        let b = Bits::from_indices(4, &[1]);
        // first differing position is 0, where b has a 0
        assert_eq!(b.lex_cmp(&a), std::cmp::Ordering::Less);
        assert_eq!(a.lex_cmp(&a), std::cmp::Ordering::Equal);
    }
}
