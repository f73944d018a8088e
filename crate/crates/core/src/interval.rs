//! Closed bounded intervals and finite unions of them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let iv = Interval::new(self.lo.max(other.lo), self.hi.min(other.hi));
        (!iv.is_empty()).then_some(iv)
    }

    /// Image under t ↦ t + s.
    pub fn shift(&self, s: f64) -> Interval {
        Interval::new(self.lo + s, self.hi + s)
    }

    /// Image under t ↦ k·t.
    pub fn scale(&self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval::new(self.lo * k, self.hi * k)
        } else {
            Interval::new(self.hi * k, self.lo * k)
        }
    }

    /// Largest |t| on the interval.
    pub fn max_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// {x − y : x ∈ self, y ∈ other}.
    pub fn minus(&self, other: &Interval) -> Interval {
        Interval::new(self.lo - other.hi, self.hi - other.lo)
    }
}

/// Sorts, drops degenerate pieces and merges overlapping intervals.
pub fn normalize(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.retain(|iv| !iv.is_empty());
    ivs.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Intersection of two normalized unions.
pub fn intersect(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            if let Some(iv) = x.intersect(y) {
                out.push(iv);
            }
        }
    }
    normalize(out)
}

pub fn union(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    normalize(a.iter().chain(b).copied().collect())
}

pub fn hull(ivs: &[Interval]) -> Option<Interval> {
    let lo = ivs.iter().map(|iv| iv.lo).reduce(f64::min)?;
    let hi = ivs.iter().map(|iv| iv.hi).reduce(f64::max)?;
    Some(Interval::new(lo, hi))
}

pub fn total_len(ivs: &[Interval]) -> f64 {
    ivs.iter().map(Interval::len).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_merges_and_drops_points() {
        let v = normalize(vec![
            Interval::new(3.0, 4.0),
            Interval::new(1.0, 2.0),
            Interval::new(1.5, 2.5),
            Interval::new(5.0, 5.0),
        ]);
        assert_eq!(v, vec![Interval::new(1.0, 2.5), Interval::new(3.0, 4.0)]);
    }

    #[test]
    fn touching_intervals_intersect_to_nothing() {
        let a = [Interval::new(1.0, 2.0)];
        let b = [Interval::new(2.0, 3.0)];
        assert!(intersect(&a, &b).is_empty());
    }

    #[test]
    fn minkowski_difference() {
        let d = Interval::new(1.0, 2.0).minus(&Interval::new(0.5, 0.7));
        assert_eq!(d, Interval::new(0.30000000000000004, 1.5));
    }
}
