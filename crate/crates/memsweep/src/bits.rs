//! Fixed-universe bit sets backing [`EdgeSet`](crate::noise::EdgeSet) and the
//! decoder's defect-parity vectors.

/// A set of integers from a fixed universe `0..len`, stored one bit per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] & (1 << (i & 63)) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// In-place symmetric difference. Both sets must share a universe.
    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "bit sets from different universes");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Iterate set elements in ascending order.
    pub fn iter(&self) -> BitsIter<'_> {
        self.iter_range(0..self.len)
    }

    /// Iterate set elements within `range`, ascending.
    pub fn iter_range(&self, range: std::ops::Range<usize>) -> BitsIter<'_> {
        assert!(range.end <= self.len);
        BitsIter {
            bits: self,
            next: range.start,
            end: range.end,
        }
    }

    /// True iff no element in `range` is set.
    pub fn range_is_empty(&self, range: std::ops::Range<usize>) -> bool {
        self.iter_range(range).next().is_none()
    }
}

pub struct BitsIter<'a> {
    bits: &'a Bits,
    next: usize,
    end: usize,
}

impl Iterator for BitsIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.next < self.end {
            let word_idx = self.next >> 6;
            let word = self.bits.words[word_idx] >> (self.next & 63);
            if word == 0 {
                // skip to the next word boundary
                self.next = (word_idx + 1) << 6;
                continue;
            }
            let i = self.next + word.trailing_zeros() as usize;
            if i >= self.end {
                break;
            }
            self.next = i + 1;
            return Some(i);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_iter() {
        let mut b = Bits::new(200);
        for i in [0, 63, 64, 127, 130, 199] {
            b.insert(i);
        }
        assert!(b.contains(64));
        assert!(!b.contains(65));
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 127, 130, 199]);
        assert_eq!(b.count_ones(), 6);
    }

    #[test]
    fn range_iteration() {
        let mut b = Bits::new(300);
        for i in [10, 64, 100, 250] {
            b.insert(i);
        }
        assert_eq!(b.iter_range(11..250).collect::<Vec<_>>(), vec![64, 100]);
        assert!(b.range_is_empty(101..250));
        assert!(!b.range_is_empty(100..101));
    }

    #[test]
    fn xor_is_symmetric_difference() {
        let mut a = Bits::new(100);
        let mut b = Bits::new(100);
        a.insert(1);
        a.insert(2);
        b.insert(2);
        b.insert(3);
        a.xor_assign(&b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 3]);
    }
}
