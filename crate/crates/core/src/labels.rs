use std::fmt;

/// Largest label representable in a [`LabelSet`] (covers `k <= 6`).
pub const MAX_LABEL: u32 = 64;

/// A subset of `{1..=64}` packed into one word. Bit `l - 1` stands for label `l`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{1..=n}`.
    #[inline]
    pub fn full(n: u32) -> Self {
        debug_assert!(n <= MAX_LABEL);
        if n == 64 {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << n) - 1)
        }
    }

    /// The consecutive range `{lo..=hi}`.
    pub fn interval(lo: u32, hi: u32) -> Self {
        debug_assert!(1 <= lo && lo <= hi && hi <= MAX_LABEL);
        LabelSet(Self::full(hi).0 & !Self::full(lo - 1).0)
    }

    #[inline]
    pub fn singleton(label: u32) -> Self {
        debug_assert!((1..=MAX_LABEL).contains(&label));
        LabelSet(1 << (label - 1))
    }

    #[inline]
    pub fn contains(self, label: u32) -> bool {
        (1..=MAX_LABEL).contains(&label) && self.0 >> (label - 1) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, label: u32) {
        self.0 |= Self::singleton(label).0;
    }

    #[inline]
    pub fn remove(&mut self, label: u32) {
        self.0 &= !Self::singleton(label).0;
    }

    #[inline]
    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    #[inline]
    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    #[inline]
    pub fn max(self) -> Option<u32> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros())
    }

    /// Labels in ascending order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        crate::bits::word_ones(self.0).map(|b| b as u32 + 1)
    }

    /// Compares two sets of equal cardinality as ascending label sequences.
    pub fn lex_cmp(self, other: LabelSet) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl FromIterator<u32> for LabelSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = LabelSet::EMPTY;
        for l in iter {
            s.insert(l);
        }
        s
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}
