use crate::channel::DelaySet;
use crate::error::{invalid, Result};

/// Timeline split into one segment per hypothesized delay, in ascending
/// delay order. Segment `k` compensates delay `d_k` by reading the encoder's
/// view at index `i + d_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentLayout {
    n: usize,
    delays: Vec<i64>,
    segment_len: usize,
}

impl SegmentLayout {
    pub fn new(n: usize, delays: &DelaySet) -> Result<Self> {
        let count = delays.size();
        if n == 0 || n % count != 0 {
            return Err(invalid(format!("block length {n} is not a positive multiple of {count} segments")));
        }
        Ok(Self {
            n,
            delays: delays.iter().collect(),
            segment_len: n / count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn segment_len(&self) -> usize {
        self.segment_len
    }

    pub fn segments(&self) -> usize {
        self.delays.len()
    }

    pub fn delay_of(&self, k: usize) -> i64 {
        self.delays[k]
    }

    pub fn segment_of_delay(&self, d: i64) -> Option<usize> {
        self.delays.iter().position(|&x| x == d)
    }

    pub fn segment_of(&self, i: usize) -> usize {
        i / self.segment_len
    }

    /// View index used at position `i`, or `None` past either end.
    pub fn compensation(&self, i: usize) -> Option<usize> {
        let j = i as i64 + self.delays[self.segment_of(i)];
        (0..self.n as i64).contains(&j).then_some(j as usize)
    }

    /// Positions of segment `k` whose compensation index is in range.
    pub fn valid_positions(&self, k: usize) -> Vec<usize> {
        (k * self.segment_len..(k + 1) * self.segment_len)
            .filter(|&i| self.compensation(i).is_some())
            .collect()
    }

    /// Bit mask of [`Self::valid_positions`] for blocks of at most 64 symbols.
    pub fn valid_mask(&self, k: usize) -> u64 {
        self.valid_positions(k).iter().fold(0u64, |m, &i| m | 1 << i)
    }
}
