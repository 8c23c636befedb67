//! Pointed finite windows over an arbitrary letter type.
//!
//! A [`PointedWord`] stores the letters `w[lo..=hi]` of some bi-infinite
//! sequence, with `lo <= 0 <= hi`. Each edge carries a *closure depth*: the
//! number of successive derivation levels at which that edge is known to sit
//! on a run (or elementary-block) boundary. A window parsed from plain text
//! has closure 0 on both sides, so its edge runs are never trusted.
//! Substitution images and integrated columns know more and say so.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closure depth standing for "always a boundary", e.g. the left edge of a
/// one-sided sequence.
pub const UNBOUNDED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Closure {
    pub left: u32,
    pub right: u32,
}

impl Closure {
    pub const OPEN: Closure = Closure { left: 0, right: 0 };

    pub fn both(depth: u32) -> Self {
        Closure {
            left: depth,
            right: depth,
        }
    }

    /// One level up (after a derivation), for an edge whose run was kept.
    pub fn lower(depth: u32) -> u32 {
        if depth == UNBOUNDED {
            UNBOUNDED
        } else {
            depth.saturating_sub(1)
        }
    }

    /// One level down (after a substitution or an expansion).
    pub fn raise(self) -> Self {
        let up = |d: u32| {
            if d == UNBOUNDED {
                d
            } else {
                d.saturating_add(1).min(UNBOUNDED - 1)
            }
        };
        Closure {
            left: up(self.left),
            right: up(self.right),
        }
    }

    pub fn swap(self) -> Self {
        Closure {
            left: self.right,
            right: self.left,
        }
    }
}

/// A letter usable inside a [`PointedWord`].
///
/// `run_key` decides which neighbours merge into a run when the word is
/// derived: for `{1,3}` words it is the symbol itself, for recoded words it
/// is the length class of the encoded run.
pub trait Letter: Copy + Eq + fmt::Debug + Send + Sync + 'static {
    fn to_char(self) -> char;
    fn from_char(c: char) -> Option<Self>;
    fn run_key(self) -> u8;
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointedWord<S> {
    lo: i64,
    symbols: Vec<S>,
    closure: Closure,
}

/// A maximal run of letters sharing a `run_key`, in window coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub key: u8,
    pub start: i64,
    pub length: usize,
    pub complete_left: bool,
    pub complete_right: bool,
}

impl Segment {
    pub fn end(&self) -> i64 {
        self.start + self.length as i64 - 1
    }

    pub fn is_complete(&self) -> bool {
        self.complete_left && self.complete_right
    }

    pub fn contains(&self, i: i64) -> bool {
        self.start <= i && i <= self.end()
    }
}

impl<S: Letter> PointedWord<S> {
    pub fn new(lo: i64, symbols: Vec<S>, closure: Closure) -> Result<Self> {
        if symbols.is_empty() || lo > 0 || lo + symbols.len() as i64 - 1 < 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(PointedWord {
            lo,
            symbols,
            closure,
        })
    }

    /// Window whose origin is `symbols[0]`.
    pub fn from_start(symbols: Vec<S>, closure: Closure) -> Result<Self> {
        Self::new(0, symbols, closure)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.symbols.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<S> {
        self.symbols
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }

    pub fn get(&self, i: i64) -> Option<S> {
        let k = i - self.lo;
        if k < 0 {
            return None;
        }
        self.symbols.get(k as usize).copied()
    }

    pub fn origin(&self) -> S {
        self.symbols[(-self.lo) as usize]
    }

    /// Array position of window index `i` (no bounds check).
    pub fn offset_of(&self, i: i64) -> usize {
        (i - self.lo) as usize
    }

    /// The shift `S^k`: the letter at index `k` becomes the origin.
    pub fn shift(&self, k: i64) -> Result<Self> {
        if k < self.lo || k > self.hi() {
            return Err(Error::InsufficientWindow(format!(
                "shift {k} leaves the window [{}, {}]",
                self.lo,
                self.hi()
            )));
        }
        Ok(PointedWord {
            lo: self.lo - k,
            symbols: self.symbols.clone(),
            closure: self.closure,
        })
    }

    /// Mirror image: index `i` goes to `-i`.
    pub fn reversed(&self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        PointedWord {
            lo: -self.hi(),
            symbols,
            closure: self.closure.swap(),
        }
    }

    pub fn map<T: Letter>(&self, f: impl Fn(S) -> T) -> PointedWord<T> {
        PointedWord {
            lo: self.lo,
            symbols: self.symbols.iter().map(|&s| f(s)).collect(),
            closure: self.closure,
        }
    }

    /// Restrict to `[lo, hi]` (clamped); the origin must stay inside.
    /// Any edge that moved inward loses its closure.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        if lo > 0 || hi < 0 {
            return Err(Error::EmptyWindow);
        }
        let a = self.offset_of(lo);
        let b = self.offset_of(hi);
        Ok(PointedWord {
            lo,
            symbols: self.symbols[a..=b].to_vec(),
            closure: Closure {
                left: if lo == self.lo { self.closure.left } else { 0 },
                right: if hi == self.hi() {
                    self.closure.right
                } else {
                    0
                },
            },
        })
    }

    /// Does `other` agree with `self` wherever both are defined?
    pub fn agrees_with(&self, other: &Self) -> bool {
        let lo = self.lo.max(other.lo);
        let hi = self.hi().min(other.hi());
        (lo..=hi).all(|i| self.get(i) == other.get(i))
    }

    /// Maximal runs with respect to `run_key`.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::new();
        let mut start = 0usize;
        let n = self.symbols.len();
        for k in 1..=n {
            if k == n || self.symbols[k].run_key() != self.symbols[start].run_key() {
                out.push(Segment {
                    key: self.symbols[start].run_key(),
                    start: self.lo + start as i64,
                    length: k - start,
                    complete_left: true,
                    complete_right: true,
                });
                start = k;
            }
        }
        if let Some(first) = out.first_mut() {
            first.complete_left = self.closure.left >= 1;
        }
        if let Some(last) = out.last_mut() {
            last.complete_right = self.closure.right >= 1;
        }
        out
    }

    /// Index span covered by complete segments, if any.
    pub fn trusted_span(&self) -> Option<(i64, i64)> {
        let segs = self.segments();
        let first = segs.iter().find(|s| s.is_complete())?;
        let last = segs.iter().rev().find(|s| s.is_complete())?;
        Some((first.start, last.end()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.symbols.len() + 1);
        for (k, &c) in self.symbols.iter().enumerate() {
            if self.lo != 0 && self.lo + k as i64 == 0 {
                s.push('|');
            }
            s.push(c.to_char());
        }
        s
    }

    /// Parse `"333|111333"`: the letter after `|` is the origin, or the first
    /// letter when no marker is given. Whitespace is ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut origin = None;
        for c in text.chars() {
            if c.is_whitespace() {
                continue;
            }
            if c == '|' {
                if origin.is_some() {
                    return Err(Error::Parse("more than one origin marker".into()));
                }
                origin = Some(symbols.len());
                continue;
            }
            match S::from_char(c) {
                Some(s) => symbols.push(s),
                None => return Err(Error::Parse(format!("unexpected character {c:?}"))),
            }
        }
        let origin = origin.unwrap_or(0);
        if symbols.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        if origin >= symbols.len() {
            return Err(Error::Parse("origin marker after the last letter".into()));
        }
        Self::new(-(origin as i64), symbols, Closure::OPEN)
    }

    pub fn to_json(&self) -> WordJson {
        let c = |d: u32| if d == UNBOUNDED { None } else { Some(d) };
        WordJson {
            lo: self.lo,
            hi: self.hi(),
            symbols: self.symbols.iter().map(|s| s.to_char()).collect(),
            trusted: self.trusted_span().map(|(a, b)| [a, b]),
            closure: [c(self.closure.left), c(self.closure.right)],
        }
    }

    pub fn from_json(j: &WordJson) -> Result<Self> {
        let mut symbols = Vec::with_capacity(j.symbols.len());
        for c in j.symbols.chars() {
            symbols.push(
                S::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("unexpected character {c:?}")))?,
            );
        }
        if j.hi != j.lo + symbols.len() as i64 - 1 {
            return Err(Error::Parse(
                "hi does not match lo and the number of symbols".into(),
            ));
        }
        let c = |d: Option<u32>| d.unwrap_or(UNBOUNDED);
        Self::new(
            j.lo,
            symbols,
            Closure {
                left: c(j.closure[0]),
                right: c(j.closure[1]),
            },
        )
    }
}

/// JSON mirror of a window. `closure` entries are `null` for unbounded edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordJson {
    pub lo: i64,
    pub hi: i64,
    pub symbols: String,
    #[serde(default)]
    pub trusted: Option<[i64; 2]>,
    #[serde(default)]
    pub closure: [Option<u32>; 2],
}

impl<S: Letter> fmt::Display for PointedWord<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<S: Letter> fmt::Debug for PointedWord<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}..{}] closure({}, {})",
            self.to_text(),
            self.lo,
            self.hi(),
            self.closure.left,
            self.closure.right
        )
    }
}

impl<S: Letter> FromStr for PointedWord<S> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

/// Output of one derivation step: kept segments become single letters.
///
/// `starts[j]` is the array position (in the input) where the segment behind
/// output letter `j` begins.
#[derive(Debug, Clone)]
pub(crate) struct DerivedLevel<T> {
    pub symbols: Vec<T>,
    pub starts: Vec<usize>,
    /// First and last array positions covered by kept segments.
    pub covered: Option<(usize, usize)>,
    pub closure: Closure,
}

/// Collapse each segment of `w` into one letter.
///
/// Edge segments are kept only when the corresponding closure is at least 1.
/// Every segment, complete or not, must have length at most `max_len`
/// (a longer partial run already certifies a bad run). `letter` maps a
/// complete segment to its output letter or rejects it.
pub(crate) fn derive_level<S: Letter, T>(
    w: &PointedWord<S>,
    max_len: usize,
    mut letter: impl FnMut(&[S], i64) -> Result<T>,
) -> Result<DerivedLevel<T>> {
    let segs = w.segments();
    let mut symbols = Vec::with_capacity(segs.len());
    let mut starts = Vec::with_capacity(segs.len());
    let mut covered: Option<(usize, usize)> = None;
    for seg in &segs {
        if seg.length > max_len {
            return Err(Error::NotDifferentiable {
                start: seg.start,
                length: seg.length,
            });
        }
    }
    let last = segs.len() - 1;
    for seg in &segs {
        if !seg.is_complete() {
            continue;
        }
        let a = w.offset_of(seg.start);
        symbols.push(letter(&w.symbols()[a..a + seg.length], seg.start)?);
        starts.push(a);
        covered = Some(match covered {
            None => (a, a + seg.length - 1),
            Some((x, _)) => (x, a + seg.length - 1),
        });
    }
    let closure = Closure {
        left: if segs[0].is_complete() {
            Closure::lower(w.closure().left)
        } else {
            0
        },
        right: if segs[last].is_complete() {
            Closure::lower(w.closure().right)
        } else {
            0
        },
    };
    Ok(DerivedLevel {
        symbols,
        starts,
        covered,
        closure,
    })
}

/// Like [`derive_level`], pointed at the segment holding index 0.
/// Returns the derived word and the input start index of every output letter.
pub(crate) fn derive_pointed<S: Letter, T: Letter>(
    w: &PointedWord<S>,
    max_len: usize,
    letter: impl FnMut(&[S], i64) -> Result<T>,
) -> Result<(PointedWord<T>, Vec<i64>)> {
    let level = derive_level(w, max_len, letter)?;
    let origin = w.offset_of(0);
    // the origin segment is the last kept one starting at or before it
    let j = level.starts.partition_point(|&s| s <= origin);
    if j == 0 {
        return Err(Error::OriginRunIncomplete);
    }
    let j = j - 1;
    let (_, cov_end) = level.covered.ok_or(Error::OriginRunIncomplete)?;
    if origin > cov_end {
        return Err(Error::OriginRunIncomplete);
    }
    let starts = level.starts.iter().map(|&s| w.lo() + s as i64).collect();
    let word = PointedWord {
        lo: -(j as i64),
        symbols: level.symbols,
        closure: level.closure,
    };
    Ok((word, starts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Symbol13;

    type W = PointedWord<Symbol13>;

    #[test]
    fn text_round_trip() {
        let w: W = "333|111333".parse().unwrap();
        assert_eq!(w.lo(), -3);
        assert_eq!(w.hi(), 5);
        assert_eq!(w.to_text(), "333|111333");
        let v: W = "131".parse().unwrap();
        assert_eq!(v.lo(), 0);
        assert_eq!(v.to_text(), "131");
    }

    #[test]
    fn rejects_garbage() {
        assert!("12".parse::<W>().is_err());
        assert!("1|3|1".parse::<W>().is_err());
        assert!("".parse::<W>().is_err());
        assert!("13|".parse::<W>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let w: W = "33|3111".parse().unwrap();
        let w = w.with_closure(Closure {
            left: 2,
            right: UNBOUNDED,
        });
        let j = w.to_json();
        assert_eq!(j.closure, [Some(2), None]);
        let text = serde_json::to_string(&j).unwrap();
        let back: WordJson = serde_json::from_str(&text).unwrap();
        assert_eq!(W::from_json(&back).unwrap(), w);
    }

    #[test]
    fn shift_and_reverse() {
        let w: W = "1|333".parse().unwrap();
        let s = w.shift(2).unwrap();
        assert_eq!(s.lo(), -3);
        assert_eq!(s.origin(), Symbol13::Three);
        assert!(w.shift(4).is_err());
        let r: W = "13|31".parse().unwrap();
        let rr = r.reversed();
        assert_eq!(rr.to_text(), "1|331");
        assert_eq!(rr.reversed(), r);
    }

    #[test]
    fn segments_respect_closure() {
        let w: W = "3311133".parse().unwrap();
        let segs = w.segments();
        assert_eq!(segs.len(), 3);
        assert!(!segs[0].complete_left && segs[0].complete_right);
        assert!(segs[1].is_complete());
        assert_eq!(w.trusted_span(), Some((2, 4)));
        let closed = w.with_closure(Closure::both(1));
        assert!(closed.segments().iter().all(|s| s.is_complete()));
    }
}
