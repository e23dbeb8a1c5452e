//! Word-packed bit sets and square bit matrices over local vertex ids.

/// Number of `u64` words needed to hold `n` bits.
#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn get(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub fn set(words: &mut [u64], i: usize) {
    words[i >> 6] |= 1 << (i & 63);
}

#[inline]
pub fn clear(words: &mut [u64], i: usize) {
    words[i >> 6] &= !(1 << (i & 63));
}

#[inline]
pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn is_empty(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// Iterates the set bits of a word slice in ascending order.
pub fn ones(words: &[u64]) -> Ones<'_> {
    Ones {
        words,
        idx: 0,
        cur: words.first().copied().unwrap_or(0),
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// Iterates the set bits of a single word in ascending order.
pub fn word_ones(mut w: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if w == 0 {
            None
        } else {
            let tz = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(tz)
        }
    })
}

/// Dense symmetric-or-not square bit matrix, one packed row per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            data: vec![0; n * stride],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        get(self.row(i), j)
    }

    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize) {
        set(self.row_mut(i), j);
        set(self.row_mut(j), i);
    }

    #[inline]
    pub fn clear_sym(&mut self, i: usize, j: usize) {
        clear(self.row_mut(i), j);
        clear(self.row_mut(j), i);
    }

    /// Removes every edge incident to `i`.
    pub fn isolate(&mut self, i: usize) {
        let nbrs: Vec<usize> = ones(self.row(i)).collect();
        for j in nbrs {
            clear(self.row_mut(j), i);
        }
        self.row_mut(i).fill(0);
    }

    /// Number of unordered pairs, assuming symmetry and no diagonal.
    pub fn edge_count(&self) -> usize {
        count(&self.data) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_crosses_word_boundaries() {
        let mut w = vec![0u64; 3];
        for i in [0, 63, 64, 130] {
            set(&mut w, i);
        }
        assert_eq!(ones(&w).collect::<Vec<_>>(), vec![0, 63, 64, 130]);
        assert_eq!(count(&w), 4);
        clear(&mut w, 63);
        assert!(!get(&w, 63));
    }

    #[test]
    fn matrix_isolate_is_symmetric() {
        let mut m = BitMatrix::new(70);
        m.set_sym(0, 69);
        m.set_sym(0, 3);
        m.set_sym(3, 69);
        m.isolate(0);
        assert!(!m.get(69, 0) && !m.get(3, 0));
        assert!(m.get(3, 69));
        assert_eq!(m.edge_count(), 1);
    }
}
