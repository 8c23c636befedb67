//! Windows of smooth sequences over `{1, 3}`.
//!
//! Derivation follows the usual convention for bi-infinite sequences:
//! `(Δx)_0` is the length of the run containing `x_0`. On a finite window
//! only complete runs are derived; see [`crate::word`] for how edge trust is
//! tracked.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{derive_pointed, Closure, Letter, PointedWord, UNBOUNDED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol13 {
    One,
    Three,
}

impl Symbol13 {
    pub fn value(self) -> u8 {
        match self {
            Symbol13::One => 1,
            Symbol13::Three => 3,
        }
    }

    pub fn from_value(v: usize) -> Option<Self> {
        match v {
            1 => Some(Symbol13::One),
            3 => Some(Symbol13::Three),
            _ => None,
        }
    }

    pub fn complement(self) -> Self {
        match self {
            Symbol13::One => Symbol13::Three,
            Symbol13::Three => Symbol13::One,
        }
    }
}

impl Letter for Symbol13 {
    fn to_char(self) -> char {
        match self {
            Symbol13::One => '1',
            Symbol13::Three => '3',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '1' => Some(Symbol13::One),
            '3' => Some(Symbol13::Three),
            _ => None,
        }
    }

    fn run_key(self) -> u8 {
        self.value()
    }
}

pub type PointedWord13 = PointedWord<Symbol13>;

/// Build a word from a digit string, origin at the first digit.
pub fn word13(digits: &str, closure: Closure) -> Result<PointedWord13> {
    Ok(PointedWord13::parse_text(digits)?.with_closure(closure))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Run {
    pub symbol: Symbol13,
    pub length: usize,
    pub start: i64,
    pub complete_left: bool,
    pub complete_right: bool,
}

/// Maximal mono-symbol blocks of `w`, in order.
pub fn runs(w: &PointedWord13) -> Vec<Run> {
    w.segments()
        .into_iter()
        .map(|s| Run {
            symbol: if s.key == 1 {
                Symbol13::One
            } else {
                Symbol13::Three
            },
            length: s.length,
            start: s.start,
            complete_left: s.complete_left,
            complete_right: s.complete_right,
        })
        .collect()
}

/// Run-length derivative of the trusted part of `w`.
pub fn derive_window(w: &PointedWord13) -> Result<PointedWord13> {
    derive_with_starts(w).map(|(d, _)| d)
}

/// [`derive_window`], also returning the start index of every run kept.
pub fn derive_with_starts(w: &PointedWord13) -> Result<(PointedWord13, Vec<i64>)> {
    derive_pointed(w, 3, |run, start| {
        Symbol13::from_value(run.len()).ok_or(Error::NotDifferentiable {
            start,
            length: run.len(),
        })
    })
}

/// Number of successive derivations (at most `max_depth`) that succeed.
pub fn smooth_depth(w: &PointedWord13, max_depth: usize) -> usize {
    let mut cur = w.clone();
    for d in 0..max_depth {
        match derive_window(&cur) {
            Ok(next) => cur = next,
            Err(_) => return d,
        }
    }
    max_depth
}

/// `w, Δw, Δ²w, …` as long as derivation succeeds (at most `max_depth + 1` words).
pub fn derivative_tower(w: &PointedWord13, max_depth: usize) -> Vec<PointedWord13> {
    let mut out = vec![w.clone()];
    for _ in 0..max_depth {
        match derive_window(out.last().unwrap()) {
            Ok(next) => out.push(next),
            Err(_) => break,
        }
    }
    out
}

/// Position of the origin inside a run of length 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    L,
    M,
    R,
}

impl Tag {
    pub fn offset(self) -> usize {
        match self {
            Tag::L => 0,
            Tag::M => 1,
            Tag::R => 2,
        }
    }

    pub fn from_offset(k: usize) -> Option<Self> {
        match k {
            0 => Some(Tag::L),
            1 => Some(Tag::M),
            2 => Some(Tag::R),
            _ => None,
        }
    }
}

/// One entry of a generalized column sequence.
///
/// Entry `k >= 1` carries a tag exactly when its value is 3; the tag says
/// where the origin of level `k - 1` sits inside the run of length 3 that
/// this entry describes. Entry 0 never carries a tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenColumnEntry {
    pub value: Symbol13,
    pub tag: Option<Tag>,
}

impl GenColumnEntry {
    pub fn plain(value: Symbol13) -> Self {
        GenColumnEntry { value, tag: None }
    }

    pub fn tagged(value: Symbol13, tag: Tag) -> Self {
        GenColumnEntry {
            value,
            tag: Some(tag),
        }
    }
}

impl fmt::Display for GenColumnEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value.value())?;
        if let Some(t) = self.tag {
            write!(f, "{t:?}")?;
        }
        Ok(())
    }
}

impl FromStr for GenColumnEntry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('_', "");
        let mut chars = s.chars();
        let value = chars
            .next()
            .and_then(Symbol13::from_char)
            .ok_or_else(|| Error::Parse(format!("bad column entry {s:?}")))?;
        let tag = match chars.as_str() {
            "" => None,
            "L" | "l" => Some(Tag::L),
            "M" | "m" => Some(Tag::M),
            "R" | "r" => Some(Tag::R),
            other => return Err(Error::Parse(format!("bad tag {other:?}"))),
        };
        Ok(GenColumnEntry { value, tag })
    }
}

/// Parse `"1,3R,3M,3L,1"` (commas or whitespace; `3_R` also accepted).
pub fn parse_column(text: &str) -> Result<Vec<GenColumnEntry>> {
    let col: Vec<GenColumnEntry> = text
        .split(|c: char| c == ',' || c.is_whitespace() || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if col.is_empty() {
        return Err(Error::Parse("empty column".into()));
    }
    Ok(col)
}

pub fn format_column(col: &[GenColumnEntry]) -> String {
    col.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn check_tags(col: &[GenColumnEntry]) -> Result<()> {
    if col.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if col[0].tag.is_some() {
        return Err(Error::InconsistentTags { level: 0 });
    }
    for (k, e) in col.iter().enumerate().skip(1) {
        if e.tag.is_some() != (e.value == Symbol13::Three) {
            return Err(Error::InconsistentTags { level: k });
        }
    }
    Ok(())
}

/// Expand level `k` into level `k - 1`: each letter becomes a run of that
/// length, runs alternate, the origin run carries `origin_symbol` and the
/// origin sits `offset` letters into it.
fn expand_level(w: &PointedWord13, origin_symbol: Symbol13, offset: usize) -> PointedWord13 {
    let total: usize = w.symbols().iter().map(|s| s.value() as usize).sum();
    let mut symbols = Vec::with_capacity(total);
    let mut origin_pos = 0usize;
    for (k, s) in w.symbols().iter().enumerate() {
        let i = w.lo() + k as i64;
        let sym = if i.rem_euclid(2) == 0 {
            origin_symbol
        } else {
            origin_symbol.complement()
        };
        if i == 0 {
            origin_pos = symbols.len() + offset;
        }
        symbols.extend(std::iter::repeat_n(sym, s.value() as usize));
    }
    PointedWord13::new(-(origin_pos as i64), symbols, w.closure().raise())
        .expect("origin inside expansion")
}

/// Every level of the integration, from level 0 (the sequence) up to the
/// last entry of the column.
pub fn integrate_levels(col: &[GenColumnEntry]) -> Result<Vec<PointedWord13>> {
    check_tags(col)?;
    let n = col.len();
    let mut levels = vec![PointedWord13::new(
        0,
        vec![col[n - 1].value],
        Closure::OPEN,
    )?];
    for k in (1..n).rev() {
        let above = levels.last().unwrap();
        let offset = col[k].tag.map_or(0, Tag::offset);
        levels.push(expand_level(above, col[k - 1].value, offset));
    }
    levels.reverse();
    Ok(levels)
}

/// Reconstruct the window determined by a generalized column sequence.
pub fn integrate(col: &[GenColumnEntry]) -> Result<PointedWord13> {
    Ok(integrate_levels(col)?.swap_remove(0))
}

/// Read the generalized column sequence of `w` through `depth` levels
/// (entries `0..depth`, needing `depth - 1` derivations).
pub fn column_extract(w: &PointedWord13, depth: usize) -> Result<Vec<GenColumnEntry>> {
    if depth == 0 {
        return Ok(Vec::new());
    }
    let mut col = vec![GenColumnEntry::plain(w.origin())];
    let mut cur = w.clone();
    for k in 1..depth {
        let (next, starts) = derive_with_starts(&cur).map_err(|e| {
            Error::InsufficientWindow(format!("derivation {k} of {}: {e}", depth - 1))
        })?;
        let origin_start = starts[next.offset_of(0)];
        let value = next.origin();
        let tag = match value {
            Symbol13::Three => {
                Some(Tag::from_offset((-origin_start) as usize).expect("offset below 3"))
            }
            Symbol13::One => None,
        };
        col.push(GenColumnEntry { value, tag });
        cur = next;
    }
    Ok(col)
}

/// Plain column values `Φ_k`, i.e. the origin letter of each derivative.
pub fn column_values(col: &[GenColumnEntry]) -> Vec<Symbol13> {
    col.iter().map(|e| e.value).collect()
}

/// Treat `w` (origin at its first letter) as the prefix of a one-sided
/// sequence: its left edge is a run boundary at every level.
pub fn unilateral(w: &PointedWord13) -> Result<PointedWord13> {
    if w.lo() != 0 {
        return Err(Error::Parse(
            "a one-sided prefix must start at the origin".into(),
        ));
    }
    Ok(w.clone().with_closure(Closure {
        left: UNBOUNDED,
        right: w.closure().right,
    }))
}

/// Left extensions at every level `0..depth` of the one-sided prefix `w`.
///
/// Level `k` of the result is `(left part) · Δ^k w`, where the letter just
/// before the origin is the complement of `Φ(w)_k` and the rest of the left
/// part is read off the level above.
pub fn extend_left_levels(w: &PointedWord13, depth: usize) -> Result<Vec<PointedWord13>> {
    if depth == 0 {
        return Err(Error::InsufficientDepth {
            needed: 1,
            available: 0,
        });
    }
    let mut rights = vec![unilateral(w)?];
    while rights.len() < depth {
        match derive_window(rights.last().unwrap()) {
            Ok(next) => rights.push(next),
            Err(_) => {
                return Err(Error::InsufficientDepth {
                    needed: depth,
                    available: rights.len(),
                })
            }
        }
    }
    // left parts are stored nearest-first: lefts[k][j] is index -1-j
    let mut left: Vec<Symbol13> = vec![rights[depth - 1].origin().complement()];
    let mut lefts = vec![left.clone()];
    for k in (0..depth - 1).rev() {
        let mut sym = rights[k].origin().complement();
        let mut next = Vec::new();
        for len in &left {
            next.extend(std::iter::repeat_n(sym, len.value() as usize));
            sym = sym.complement();
        }
        left = next;
        lefts.push(left.clone());
    }
    lefts.reverse();
    let mut out = Vec::with_capacity(depth);
    for (k, (l, r)) in lefts.into_iter().zip(rights).enumerate() {
        let lo = -(l.len() as i64);
        let mut symbols: Vec<Symbol13> = l.into_iter().rev().collect();
        symbols.extend_from_slice(r.symbols());
        let closure = Closure {
            left: (depth - 1 - k) as u32,
            right: r.closure().right,
        };
        out.push(PointedWord13::new(lo, symbols, closure)?);
    }
    Ok(out)
}

/// Bi-infinite-consistent left extension of the one-sided prefix `w`,
/// reconstructed through `depth` derivation levels.
pub fn extend_left(w: &PointedWord13, depth: usize) -> Result<PointedWord13> {
    Ok(extend_left_levels(w, depth)?.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PointedWord13 {
        s.parse().unwrap()
    }

    fn closed(s: &str, d: u32) -> PointedWord13 {
        w(s).with_closure(Closure::both(d))
    }

    #[test]
    fn runs_examples() {
        let r = runs(&w("3331113"));
        let got: Vec<(u8, usize)> = r.iter().map(|r| (r.symbol.value(), r.length)).collect();
        assert_eq!(got, vec![(3, 3), (1, 3), (3, 1)]);
        assert!(!r[0].complete_left && r[0].complete_right);
        assert!(r[1].complete_left && r[1].complete_right);
        assert!(r[2].complete_left && !r[2].complete_right);
        assert_eq!(runs(&w("131")).len(), 3);
        let single = runs(&w("1111"));
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].length, 4);
    }

    #[test]
    fn derive_examples() {
        let x = closed("333111333131333111333", 3);
        let d = derive_window(&x).unwrap();
        assert_eq!(d.to_text(), "333111333");
        assert_eq!(d.lo(), 0);
        assert_eq!(derive_window(&closed("131", 1)).unwrap().to_text(), "111");
        let mid = w("33|11133");
        assert_eq!(derive_window(&mid).unwrap().to_text(), "3");
    }

    #[test]
    fn derive_errors() {
        assert!(matches!(
            derive_window(&w("1111")),
            Err(Error::NotDifferentiable { length: 4, .. })
        ));
        assert!(matches!(
            derive_window(&closed("3113", 1)),
            Err(Error::NotDifferentiable {
                start: 1,
                length: 2
            })
        ));
        // origin in an untrusted edge run
        assert_eq!(
            derive_window(&w("3311133")),
            Err(Error::OriginRunIncomplete)
        );
    }

    #[test]
    fn origin_follows_its_run() {
        let x = closed("13|331", 1);
        let (d, starts) = derive_with_starts(&x).unwrap();
        assert_eq!(d.to_text(), "1|31");
        assert_eq!(starts, vec![-2, -1, 2]);
    }

    #[test]
    fn smooth_depth_examples() {
        let x = closed("333111333131333111333", 3);
        assert!(smooth_depth(&x, 10) >= 2);
        assert_eq!(smooth_depth(&w("1111111"), 5), 0);
    }

    #[test]
    fn integration_figure() {
        let col = parse_column("1, 3_R, 3_M, 3_L, 1, 3_M, 1").unwrap();
        let x = integrate(&col).unwrap();
        assert_eq!(x.to_text(), "133311|13331313331113331");
        assert_eq!(column_extract(&x, col.len()).unwrap(), col);
    }

    #[test]
    fn integrate_small() {
        let one = integrate(&parse_column("1").unwrap()).unwrap();
        assert_eq!(one.to_text(), "1");
        let three = integrate(&parse_column("3,3M").unwrap()).unwrap();
        assert_eq!(three.to_text(), "3|33");
        assert_eq!((three.lo(), three.hi()), (-1, 1));
        assert_eq!(
            integrate(&parse_column("3M,1").unwrap()),
            Err(Error::InconsistentTags { level: 0 })
        );
        assert_eq!(
            integrate(&parse_column("1,3").unwrap()),
            Err(Error::InconsistentTags { level: 1 })
        );
        assert_eq!(
            integrate(&parse_column("1,1L").unwrap()),
            Err(Error::InconsistentTags { level: 1 })
        );
    }

    #[test]
    fn derivatives_figure_column() {
        let col = parse_column("1,3M,3L,3R,1,3M,3L,3R").unwrap();
        let x = integrate(&col).unwrap();
        let got: Vec<u8> = column_values(&column_extract(&x, 8).unwrap())
            .iter()
            .map(|s| s.value())
            .collect();
        assert_eq!(got, vec![1, 3, 3, 3, 1, 3, 3, 3]);
        // the published window around the origin
        let around = x.restrict(-10, 10).unwrap();
        assert_eq!(around.to_text(), "3331113131|11333111311");
    }

    #[test]
    fn column_map_figure() {
        let col = parse_column("3,1,3L,3L,3L,1").unwrap();
        let x = integrate(&col).unwrap();
        let right = x.restrict(0, x.hi()).unwrap();
        assert!(right.to_text().starts_with("313111333111313111311131"));
        let got: Vec<u8> = column_values(&column_extract(&x, 6).unwrap())
            .iter()
            .map(|s| s.value())
            .collect();
        assert_eq!(got, vec![3, 1, 3, 3, 3, 1]);
    }

    #[test]
    fn column_needs_depth() {
        assert!(matches!(
            column_extract(&w("13|1"), 2),
            Err(Error::InsufficientWindow(_))
        ));
        assert_eq!(
            column_extract(&w("13|1"), 1).unwrap(),
            vec![GenColumnEntry::plain(Symbol13::One)]
        );
    }

    #[test]
    fn extend_left_complements() {
        let col = parse_column("3,1,3L,3L,3L,1").unwrap();
        let x = integrate(&col).unwrap();
        let prefix = x.restrict(0, x.hi()).unwrap();
        let levels = extend_left_levels(&prefix, 6).unwrap();
        let left: Vec<u8> = levels.iter().map(|l| l.get(-1).unwrap().value()).collect();
        assert_eq!(left, vec![1, 3, 1, 1, 1, 3]);
        for l in &levels {
            assert_ne!(l.get(-1), l.get(0));
        }
        let short = extend_left(&w("1"), 1).unwrap();
        assert_eq!(short.to_text(), "3|1");
    }

    #[test]
    fn extend_left_needs_depth() {
        assert!(matches!(
            extend_left(&w("1333"), 3),
            Err(Error::InsufficientDepth { needed: 3, .. })
        ));
    }
}
