//! Finite unions of disjoint closed intervals on the extended real line.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap below which neighbouring intervals are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Closed interval `[lo, hi]`; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted, pairwise disjoint, non-touching closed intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

fn merge_gap(x: f64) -> f64 {
    MERGE_TOL * x.abs().max(1.0)
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// The whole real line.
    pub fn full() -> Self {
        Self::single(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `[lo, hi]`, or the empty set when `lo > hi`.
    pub fn single(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Self::empty()
        } else {
            IntervalSet {
                intervals: vec![Interval::new(lo, hi)],
            }
        }
    }

    /// Normalizes arbitrary intervals: drops empty ones, sorts, and merges
    /// overlapping or nearly touching neighbours.
    pub fn from_intervals<I>(intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut v = Vec::new();
        for (lo, hi) in intervals {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::invalid("interval endpoint is NaN"));
            }
            if lo <= hi {
                v.push(Interval::new(lo, hi));
            }
        }
        Ok(Self::normalize(v))
    }

    fn normalize(mut v: Vec<Interval>) -> Self {
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi || iv.lo - last.hi <= merge_gap(last.hi) => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        matches!(self.intervals.as_slice(),
            [iv] if iv.lo == f64::NEG_INFINITY && iv.hi == f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        // first interval whose upper end is >= x
        let idx = self.intervals.partition_point(|iv| iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.lo <= x)
    }

    /// Membership after widening every interval by `tol` on both sides.
    pub fn contains_within(&self, x: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|iv| iv.lo - tol <= x && x <= iv.hi + tol)
    }

    /// Finite endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|e| e.is_finite())
            .collect()
    }

    /// Distance from `x` to the nearest finite endpoint (`inf` if none).
    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        self.endpoints()
            .into_iter()
            .map(|e| (e - x).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        intersect_all(&[self.clone(), other.clone()])
    }

    /// `self ∩ [0, ∞)`.
    pub fn clip_nonnegative(&self) -> IntervalSet {
        self.intersect(&IntervalSet::single(0.0, f64::INFINITY))
    }

    /// Image under `x ↦ c·x` for `c > 0`.
    pub fn scaled(&self, c: f64) -> IntervalSet {
        assert!(c > 0.0, "scale factor must be positive");
        IntervalSet {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval::new(iv.lo * c, iv.hi * c))
                .collect(),
        }
    }
}

#[derive(Clone, Copy)]
struct Event {
    at: f64,
    opens: bool,
}

/// Intersection of any number of interval sets by an endpoint sweep.
///
/// Every input set is internally disjoint, so a point lies in the
/// intersection exactly when it is covered `sets.len()` times. Openings are
/// processed before closings at equal coordinates, which keeps touching
/// closed intervals touching. The intersection of no sets is the full line.
pub fn intersect_all(sets: &[IntervalSet]) -> IntervalSet {
    if sets.is_empty() {
        return IntervalSet::full();
    }
    if sets.iter().any(IntervalSet::is_empty) {
        return IntervalSet::empty();
    }
    let needed = sets.len();
    let mut events: Vec<Event> =
        Vec::with_capacity(2 * sets.iter().map(IntervalSet::len).sum::<usize>());
    for set in sets {
        for iv in &set.intervals {
            events.push(Event {
                at: iv.lo,
                opens: true,
            });
            events.push(Event {
                at: iv.hi,
                opens: false,
            });
        }
    }
    events.sort_by(|a, b| match a.at.total_cmp(&b.at) {
        Ordering::Equal => b.opens.cmp(&a.opens),
        other => other,
    });
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0.0;
    for ev in events {
        if ev.opens {
            depth += 1;
            if depth == needed {
                start = ev.at;
            }
        } else {
            if depth == needed {
                out.push(Interval::new(start, ev.at));
            }
            depth -= 1;
        }
    }
    IntervalSet::normalize(out)
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{}, {}]", iv.lo, iv.hi)?;
        }
        Ok(())
    }
}

fn endpoint_to_json(x: f64) -> serde_json_value::Endpoint {
    if x == f64::INFINITY {
        serde_json_value::Endpoint::Text("inf".into())
    } else if x == f64::NEG_INFINITY {
        serde_json_value::Endpoint::Text("-inf".into())
    } else {
        serde_json_value::Endpoint::Number(x)
    }
}

mod serde_json_value {
    use serde::{Deserialize, Serialize};

    /// A finite endpoint, or the sentinel strings `"inf"` / `"-inf"`.
    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Endpoint {
        Number(f64),
        Text(String),
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.intervals.len()))?;
        for iv in &self.intervals {
            seq.serialize_element(&[endpoint_to_json(iv.lo), endpoint_to_json(iv.hi)])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde_json_value::Endpoint;
        let raw: Vec<[Endpoint; 2]> = Vec::deserialize(deserializer)?;
        let decode = |e: &Endpoint| -> std::result::Result<f64, D::Error> {
            match e {
                Endpoint::Number(x) => Ok(*x),
                Endpoint::Text(s) if s == "inf" => Ok(f64::INFINITY),
                Endpoint::Text(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
                Endpoint::Text(s) => Err(de::Error::custom(format!("bad endpoint {s:?}"))),
            }
        };
        let mut pairs = Vec::with_capacity(raw.len());
        for [lo, hi] in &raw {
            pairs.push((decode(lo)?, decode(hi)?));
        }
        IntervalSet::from_intervals(pairs).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_intervals(v.iter().copied()).unwrap()
    }

    #[test]
    fn simple_intersection() {
        let r = set(&[(0.0, 5.0)]).intersect(&set(&[(3.0, 10.0)]));
        assert_eq!(r, set(&[(3.0, 5.0)]));
        assert!(set(&[(0.0, 5.0)])
            .intersect(&IntervalSet::empty())
            .is_empty());
        assert!(intersect_all(&[]).is_full());
    }

    #[test]
    fn touching_closed_intervals_meet_in_a_point() {
        let r = set(&[(0.0, 1.0)]).intersect(&set(&[(1.0, 2.0)]));
        assert_eq!(r.intervals(), &[Interval::new(1.0, 1.0)]);
    }

    #[test]
    fn normalization_merges_and_sorts() {
        let s = set(&[(5.0, 6.0), (0.0, 1.0), (0.5, 2.0), (2.0, 3.0), (4.0, 3.0)]);
        assert_eq!(
            s.intervals(),
            &[Interval::new(0.0, 3.0), Interval::new(5.0, 6.0)]
        );
        let s = set(&[(0.0, 1.0), (1.0 + 1e-14, 2.0)]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn membership() {
        let s = set(&[(f64::NEG_INFINITY, -2.0), (2.0, f64::INFINITY)]);
        assert!(s.contains(-2.0) && s.contains(2.0) && s.contains(1e300));
        assert!(!s.contains(0.0));
        assert_eq!(s.clip_nonnegative(), set(&[(2.0, f64::INFINITY)]));
    }

    #[test]
    fn json_sentinels_round_trip() {
        let s = set(&[(f64::NEG_INFINITY, -1.5), (0.25, f64::INFINITY)]);
        let txt = serde_json::to_string(&s).unwrap();
        assert_eq!(txt, r#"[["-inf",-1.5],[0.25,"inf"]]"#);
        let back: IntervalSet = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
    }
}
