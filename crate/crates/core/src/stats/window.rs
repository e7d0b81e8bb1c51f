//! Bounded circular window with O(1) moment queries.
//!
//! The window keeps two accumulator pairs, one for the elements before the
//! split index ("hist") and one for the elements after it ("new"). Moving the
//! split transfers single elements between them, so moments of the full window
//! and of both halves are available without rescanning the buffer.
//!
//! Values are accumulated relative to a reference value (the oldest element at
//! the last rebase) with Neumaier-compensated sums. The accumulators are rebuilt
//! from the buffer once per `capacity` updates, which bounds rounding drift at
//! amortized O(1) cost.

use crate::error::{Error, Result};

/// Count, mean and sample standard deviation (divisor `n - 1`) of a range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubWindowMoments {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Shifted first and second moment sums of a set of elements.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    n: usize,
    s1: CompensatedSum,
    s2: CompensatedSum,
}

impl Accumulator {
    #[inline]
    fn insert(&mut self, d: f64) {
        self.n += 1;
        self.s1.add(d);
        self.s2.add(d * d);
    }

    #[inline]
    fn remove(&mut self, d: f64) {
        self.n -= 1;
        self.s1.add(-d);
        self.s2.add(-(d * d));
    }

    fn merged(&self, other: &Accumulator) -> Accumulator {
        let mut out = *self;
        out.n += other.n;
        out.s1.add(other.s1.sum);
        out.s1.add(other.s1.comp);
        out.s2.add(other.s2.sum);
        out.s2.add(other.s2.comp);
        out
    }

    fn moments(&self, shift: f64) -> Option<SubWindowMoments> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        let s1 = self.s1.value();
        let mean_d = s1 / n;
        let std = if self.n == 1 {
            0.0
        } else {
            ((self.s2.value() - s1 * mean_d) / (n - 1.0)).max(0.0).sqrt()
        };
        Some(SubWindowMoments { count: self.n, mean: shift + mean_d, std })
    }
}

/// Circular buffer of at most `capacity` reals with a movable split point.
#[derive(Debug, Clone)]
pub struct RollingWindow {
    buf: Vec<f64>,
    head: usize,
    len: usize,
    split: usize,
    shift: f64,
    hist: Accumulator,
    new: Accumulator,
    ops_since_rebase: usize,
}

impl RollingWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("window capacity must be positive".into()));
        }
        Ok(Self {
            buf: vec![0.0; capacity],
            head: 0,
            len: 0,
            split: 0,
            shift: 0.0,
            hist: Accumulator::default(),
            new: Accumulator::default(),
            ops_since_rebase: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.buf.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.buf.len()
    }

    /// Current split index; elements `[0, split)` form the historical part.
    pub fn split(&self) -> usize {
        self.split
    }

    /// Element at logical position `i` (0 is the oldest).
    pub fn get(&self, i: usize) -> Option<f64> {
        (i < self.len).then(|| self.buf[self.physical(i)])
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.buf[self.physical(i)])
    }

    #[inline]
    fn physical(&self, i: usize) -> usize {
        let p = self.head + i;
        if p >= self.buf.len() {
            p - self.buf.len()
        } else {
            p
        }
    }

    /// Append `x` at the newest end. Fails when the window is full.
    pub fn push(&mut self, x: f64) -> Result<()> {
        if self.is_full() {
            return Err(Error::Index { from: self.len, to: self.len + 1, len: self.len });
        }
        if self.len == 0 {
            self.shift = x;
        }
        let slot = self.physical(self.len);
        self.buf[slot] = x;
        self.len += 1;
        self.new.insert(x - self.shift);
        self.tick();
        Ok(())
    }

    /// Remove and return the oldest element. The split index keeps pointing at
    /// the same element, so it decreases by one when the hist part is non-empty.
    pub fn evict_oldest(&mut self) -> Option<f64> {
        if self.len == 0 {
            return None;
        }
        let x = self.buf[self.head];
        self.head = self.physical(1);
        self.len -= 1;
        if self.split > 0 {
            self.split -= 1;
            self.hist.remove(x - self.shift);
        } else {
            self.new.remove(x - self.shift);
        }
        if self.len == 0 {
            self.clear();
        } else {
            self.tick();
        }
        Some(x)
    }

    /// Drop every element.
    pub fn clear(&mut self) {
        self.head = 0;
        self.len = 0;
        self.split = 0;
        self.hist = Accumulator::default();
        self.new = Accumulator::default();
        self.ops_since_rebase = 0;
    }

    /// Move the split to `split`, transferring one element per position moved.
    pub fn set_split(&mut self, split: usize) -> Result<()> {
        if split > self.len {
            return Err(Error::Index { from: 0, to: split, len: self.len });
        }
        while self.split < split {
            let d = self.buf[self.physical(self.split)] - self.shift;
            self.new.remove(d);
            self.hist.insert(d);
            self.split += 1;
        }
        while self.split > split {
            self.split -= 1;
            let d = self.buf[self.physical(self.split)] - self.shift;
            self.hist.remove(d);
            self.new.insert(d);
        }
        Ok(())
    }

    /// Moments of the full window, `None` when empty.
    pub fn full_moments(&self) -> Option<SubWindowMoments> {
        self.hist.merged(&self.new).moments(self.shift)
    }

    /// Moments of `[0, split)` and `[split, len)`.
    pub fn split_moments(&self) -> (Option<SubWindowMoments>, Option<SubWindowMoments>) {
        (self.hist.moments(self.shift), self.new.moments(self.shift))
    }

    /// Moments of the logical range `[from, to)`. Ranges that coincide with the
    /// full window or either side of the split are O(1); anything else is
    /// computed by a scan.
    pub fn moments(&self, from: usize, to: usize) -> Result<SubWindowMoments> {
        if from >= to || to > self.len {
            return Err(Error::Index { from, to, len: self.len });
        }
        let found = match (from, to) {
            (0, t) if t == self.len => self.full_moments(),
            (0, t) if t == self.split => self.hist.moments(self.shift),
            (f, t) if f == self.split && t == self.len => self.new.moments(self.shift),
            _ => {
                let mut acc = Accumulator::default();
                for i in from..to {
                    acc.insert(self.buf[self.physical(i)] - self.shift);
                }
                acc.moments(self.shift)
            }
        };
        Ok(found.expect("non-empty range"))
    }

    fn tick(&mut self) {
        self.ops_since_rebase += 1;
        if self.ops_since_rebase >= self.buf.len().max(64) {
            self.rebase();
        }
    }

    /// Rebuild both accumulators from the buffer around a fresh reference value.
    fn rebase(&mut self) {
        self.ops_since_rebase = 0;
        if self.len == 0 {
            return;
        }
        self.shift = self.buf[self.head];
        let mut hist = Accumulator::default();
        let mut new = Accumulator::default();
        for i in 0..self.len {
            let d = self.buf[self.physical(i)] - self.shift;
            if i < self.split {
                hist.insert(d);
            } else {
                new.insert(d);
            }
        }
        self.hist = hist;
        self.new = new;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(values: &[f64]) -> SubWindowMoments {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        SubWindowMoments { count: values.len(), mean, std }
    }

    fn close(a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= 1e-9 * scale.max(1.0)
    }

    #[test]
    fn simple_moments() {
        let mut w = RollingWindow::new(10).unwrap();
        for x in [1.0, 2.0, 3.0] {
            w.push(x).unwrap();
        }
        let m = w.full_moments().unwrap();
        assert_eq!(m.count, 3);
        assert!((m.mean - 2.0).abs() < 1e-15);
        assert!((m.std - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_sequence_has_zero_std() {
        let mut w = RollingWindow::new(64).unwrap();
        for _ in 0..30 {
            w.push(0.5).unwrap();
        }
        assert_eq!(w.full_moments().unwrap().std, 0.0);
        w.set_split(12).unwrap();
        let (h, n) = w.split_moments();
        assert_eq!(h.unwrap().std, 0.0);
        assert_eq!(n.unwrap().std, 0.0);
    }

    #[test]
    fn single_element_std_is_zero() {
        let mut w = RollingWindow::new(4).unwrap();
        w.push(7.0).unwrap();
        let m = w.moments(0, 1).unwrap();
        assert_eq!((m.count, m.mean, m.std), (1, 7.0, 0.0));
    }

    #[test]
    fn push_on_full_window_fails() {
        let mut w = RollingWindow::new(2).unwrap();
        w.push(1.0).unwrap();
        w.push(2.0).unwrap();
        assert!(w.push(3.0).is_err());
        assert_eq!(w.evict_oldest(), Some(1.0));
        w.push(3.0).unwrap();
        assert_eq!(w.iter().collect::<Vec<_>>(), vec![2.0, 3.0]);
    }

    #[test]
    fn invalid_ranges() {
        let mut w = RollingWindow::new(8).unwrap();
        for x in [1.0, 2.0, 3.0] {
            w.push(x).unwrap();
        }
        assert!(w.moments(1, 1).is_err());
        assert!(w.moments(0, 4).is_err());
        assert!(w.set_split(4).is_err());
        assert!(RollingWindow::new(0).is_err());
    }

    #[test]
    fn random_stream_matches_recomputation() {
        // 5,000 values through a window of 300 with a split that follows 2/3
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut w = RollingWindow::new(300).unwrap();
        let mut mirror = std::collections::VecDeque::new();
        for step in 0..5_000 {
            let x = 10.0 + 3.0 * next() + if step > 2500 { 5.0 } else { 0.0 };
            if w.is_full() {
                w.evict_oldest();
                mirror.pop_front();
            }
            w.push(x).unwrap();
            mirror.push_back(x);
            let split = (2 * w.len()) / 3;
            w.set_split(split).unwrap();
            let all: Vec<f64> = mirror.iter().copied().collect();
            let full = w.full_moments().unwrap();
            let want = naive(&all);
            assert!(close(full.mean, want.mean, want.mean.abs()));
            assert!(close(full.std, want.std, want.std));
            if split > 0 {
                let (h, n) = w.split_moments();
                let (h, n) = (h.unwrap(), n.unwrap());
                let wh = naive(&all[..split]);
                let wn = naive(&all[split..]);
                assert!(close(h.mean, wh.mean, wh.mean.abs()) && close(h.std, wh.std, wh.std));
                assert!(close(n.mean, wn.mean, wn.mean.abs()) && close(n.std, wn.std, wn.std));
            }
        }
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push(f64),
        Evict,
        Split(u16),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            4 => (-1e3f64..1e3).prop_map(Op::Push),
            2 => Just(Op::Evict),
            1 => any::<u16>().prop_map(Op::Split),
        ]
    }

    proptest! {
        #[test]
        fn incremental_equals_naive(ops in proptest::collection::vec(op(), 1..2_000)) {
            let mut w = RollingWindow::new(97).unwrap();
            let mut mirror: Vec<f64> = Vec::new();
            for op in ops {
                match op {
                    Op::Push(x) => {
                        if w.is_full() {
                            w.evict_oldest();
                            mirror.remove(0);
                        }
                        w.push(x).unwrap();
                        mirror.push(x);
                    }
                    Op::Evict => {
                        prop_assert_eq!(w.evict_oldest(), if mirror.is_empty() { None } else { Some(mirror.remove(0)) });
                    }
                    Op::Split(s) => {
                        if !mirror.is_empty() {
                            w.set_split(s as usize % (mirror.len() + 1)).unwrap();
                        }
                    }
                }
                prop_assert_eq!(w.len(), mirror.len());
                prop_assert!(w.len() <= w.capacity());
                if !mirror.is_empty() {
                    let got = w.full_moments().unwrap();
                    let want = naive(&mirror);
                    // absolute scale: values are O(1e3)
                    prop_assert!((got.mean - want.mean).abs() <= 1e-9 * 1e3);
                    prop_assert!((got.std - want.std).abs() <= 1e-9 * 1e3);
                    let s = w.split();
                    if s > 0 && s < mirror.len() {
                        let (h, n) = w.split_moments();
                        let wh = naive(&mirror[..s]);
                        let wn = naive(&mirror[s..]);
                        prop_assert!((h.unwrap().mean - wh.mean).abs() <= 1e-6);
                        prop_assert!((n.unwrap().std - wn.std).abs() <= 1e-6);
                    }
                }
            }
        }
    }
}
