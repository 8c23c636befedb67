//! The `{A,B,C,D}` recoding of smooth windows.
//!
//! `A = 1`, `B = 3`, `C = 111`, `D = 333`: each letter stands for one run.
//! A recoded word is *alternating*: letters from `{A,C}` (runs of 1s) and
//! `{B,D}` (runs of 3s) take turns. The runs of the derivative group letters
//! into elementary blocks `A, B, C, D, ABA, BAB, CDC, DCD`, and the induced
//! derivative maps every block to a single letter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{PointedWord13, Symbol13};
use crate::typesub::AlphabetParams;
use crate::word::{derive_level, derive_pointed, Letter, PointedWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RecSymbol {
    A,
    B,
    C,
    D,
}

pub const REC_LETTERS: [RecSymbol; 4] = [RecSymbol::A, RecSymbol::B, RecSymbol::C, RecSymbol::D];

impl RecSymbol {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        REC_LETTERS[i]
    }

    /// The symbol repeated in the encoded run (`A, C -> 1`; `B, D -> 3`).
    pub fn run_symbol(self) -> Symbol13 {
        match self {
            RecSymbol::A | RecSymbol::C => Symbol13::One,
            RecSymbol::B | RecSymbol::D => Symbol13::Three,
        }
    }

    /// Length of the encoded run (`A, B -> 1`; `C, D -> 3`).
    pub fn run_length(self) -> Symbol13 {
        match self {
            RecSymbol::A | RecSymbol::B => Symbol13::One,
            RecSymbol::C | RecSymbol::D => Symbol13::Three,
        }
    }

    pub fn from_run(symbol: Symbol13, length: Symbol13) -> Self {
        match (symbol, length) {
            (Symbol13::One, Symbol13::One) => RecSymbol::A,
            (Symbol13::Three, Symbol13::One) => RecSymbol::B,
            (Symbol13::One, Symbol13::Three) => RecSymbol::C,
            (Symbol13::Three, Symbol13::Three) => RecSymbol::D,
        }
    }

    /// `true` for `A` and `C`.
    pub fn is_odd_class(self) -> bool {
        self.run_symbol() == Symbol13::One
    }

    pub fn expansion(self) -> &'static str {
        match self {
            RecSymbol::A => "1",
            RecSymbol::B => "3",
            RecSymbol::C => "111",
            RecSymbol::D => "333",
        }
    }
}

impl Letter for RecSymbol {
    fn to_char(self) -> char {
        match self {
            RecSymbol::A => 'A',
            RecSymbol::B => 'B',
            RecSymbol::C => 'C',
            RecSymbol::D => 'D',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'A' | 'a' => Some(RecSymbol::A),
            'B' | 'b' => Some(RecSymbol::B),
            'C' | 'c' => Some(RecSymbol::C),
            'D' | 'd' => Some(RecSymbol::D),
            _ => None,
        }
    }

    fn run_key(self) -> u8 {
        self.run_length().value()
    }
}

impl fmt::Display for RecSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

pub type RecWord = PointedWord<RecSymbol>;

pub fn parse_letters(text: &str) -> Result<Vec<RecSymbol>> {
    let out: Vec<RecSymbol> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            RecSymbol::from_char(c)
                .ok_or_else(|| Error::Parse(format!("unexpected character {c:?}")))
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

pub fn letters_to_string(w: &[RecSymbol]) -> String {
    w.iter().map(|s| s.to_char()).collect()
}

/// Index of the first position `i` with `w[i]`, `w[i+1]` in the same class.
pub fn first_non_alternation(w: &[RecSymbol]) -> Option<usize> {
    w.windows(2)
        .position(|p| p[0].is_odd_class() == p[1].is_odd_class())
}

pub fn is_alternating(w: &[RecSymbol]) -> bool {
    first_non_alternation(w).is_none()
}

fn check_alternating(y: &RecWord) -> Result<()> {
    match first_non_alternation(y.symbols()) {
        Some(k) => Err(Error::NotAlternating {
            index: y.lo() + k as i64,
        }),
        None => Ok(()),
    }
}

/// Recode the complete runs of `x`. Index 0 encodes the run holding `x_0`.
pub fn rec(x: &PointedWord13) -> Result<RecWord> {
    derive_pointed(x, 3, |run, start| {
        let length = Symbol13::from_value(run.len()).ok_or(Error::NotDifferentiable {
            start,
            length: run.len(),
        })?;
        Ok(RecSymbol::from_run(run[0], length))
    })
    .map(|(y, _)| y)
}

/// Expand back to `{1,3}`. The origin lands on the first letter of the run
/// encoded by `y_0`.
pub fn expand(y: &RecWord) -> PointedWord13 {
    let mut symbols = Vec::new();
    let mut origin = 0usize;
    for (k, s) in y.symbols().iter().enumerate() {
        if y.lo() + k as i64 == 0 {
            origin = symbols.len();
        }
        let n = s.run_length().value() as usize;
        symbols.extend(std::iter::repeat_n(s.run_symbol(), n));
    }
    PointedWord13::new(-(origin as i64), symbols, y.closure().raise())
        .expect("origin inside expansion")
}

pub fn expand_letters(w: &[RecSymbol]) -> Vec<Symbol13> {
    w.iter()
        .flat_map(|s| std::iter::repeat_n(s.run_symbol(), s.run_length().value() as usize))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    A,
    B,
    C,
    D,
    ABA,
    BAB,
    CDC,
    DCD,
}

impl BlockKind {
    pub fn len(self) -> usize {
        match self {
            BlockKind::A | BlockKind::B | BlockKind::C | BlockKind::D => 1,
            _ => 3,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    fn from_letters(w: &[RecSymbol]) -> Option<Self> {
        use RecSymbol::*;
        Some(match w {
            [A] => BlockKind::A,
            [B] => BlockKind::B,
            [C] => BlockKind::C,
            [D] => BlockKind::D,
            [A, B, A] => BlockKind::ABA,
            [B, A, B] => BlockKind::BAB,
            [C, D, C] => BlockKind::CDC,
            [D, C, D] => BlockKind::DCD,
            _ => return None,
        })
    }

    /// The letter this block becomes under the induced derivative.
    pub fn derived(self) -> RecSymbol {
        match self {
            BlockKind::ABA | BlockKind::BAB => RecSymbol::C,
            BlockKind::CDC | BlockKind::DCD => RecSymbol::D,
            BlockKind::A | BlockKind::B => RecSymbol::A,
            BlockKind::C | BlockKind::D => RecSymbol::B,
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub start: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementaryDecomposition {
    pub blocks: Vec<Block>,
    /// Index span tiled by `blocks`; `None` when no block is complete.
    pub coverage: Option<(i64, i64)>,
}

/// Tile the trusted part of `y` by elementary blocks.
///
/// Blocks are the runs of the derivative of the expansion of `y`, i.e. runs
/// of letters with equal encoded run length. Edge blocks count only when the
/// window edge is known to be a block boundary.
pub fn elementary_decompose(y: &RecWord) -> Result<ElementaryDecomposition> {
    check_alternating(y)?;
    let level = derive_level(y, 3, |seg, start| {
        BlockKind::from_letters(seg).ok_or(Error::NotDifferentiable {
            start,
            length: seg.len(),
        })
    })?;
    let blocks = level
        .symbols
        .iter()
        .zip(&level.starts)
        .map(|(&kind, &s)| Block {
            kind,
            start: y.lo() + s as i64,
        })
        .collect();
    let coverage = level
        .covered
        .map(|(a, b)| (y.lo() + a as i64, y.lo() + b as i64));
    Ok(ElementaryDecomposition { blocks, coverage })
}

/// Induced derivative: every complete elementary block becomes one letter.
pub fn induced_derive(y: &RecWord) -> Result<RecWord> {
    induced_derive_with_starts(y).map(|(d, _)| d)
}

/// [`induced_derive`], also returning the start index of every block kept.
pub fn induced_derive_with_starts(y: &RecWord) -> Result<(RecWord, Vec<i64>)> {
    check_alternating(y)?;
    derive_pointed(y, 3, |seg, start| {
        BlockKind::from_letters(seg)
            .map(BlockKind::derived)
            .ok_or(Error::NotDifferentiable {
                start,
                length: seg.len(),
            })
    })
    .map_err(|e| match e {
        Error::OriginRunIncomplete => Error::OriginBlockIncomplete,
        e => e,
    })
}

/// Induced derivative over the alphabet `{α, β}`.
///
/// There `A = α^α`, `B = β^α`, `C = α^β`, `D = β^β`; a block is a maximal
/// run of letters of equal length class, of length `α` or `β`, and becomes
/// the letter whose run symbol is that class and whose run length is the
/// block length.
pub fn induced_derive_in(y: &RecWord, params: AlphabetParams) -> Result<RecWord> {
    check_alternating(y)?;
    let (alpha, beta) = (params.alpha as usize, params.beta as usize);
    derive_pointed(y, alpha.max(beta), |seg, start| {
        let short_class = seg[0].run_length() == Symbol13::One;
        let bad = Error::NotDifferentiable {
            start,
            length: seg.len(),
        };
        let short_len = if seg.len() == alpha {
            true
        } else if seg.len() == beta {
            false
        } else {
            return Err(bad);
        };
        Ok(match (short_class, short_len) {
            (true, true) => RecSymbol::A,
            (false, true) => RecSymbol::B,
            (true, false) => RecSymbol::C,
            (false, false) => RecSymbol::D,
        })
    })
    .map(|(d, _)| d)
    .map_err(|e| match e {
        Error::OriginRunIncomplete => Error::OriginBlockIncomplete,
        e => e,
    })
}

/// `L` levels of induced derivation that do not need to track the origin.
///
/// `parent[l][i]` is the level-`l+1` letter whose block holds array
/// position `i` of level `l`, if that block is complete; `is_start[l][i]`
/// says whether position `i` begins its block.
#[derive(Debug, Clone)]
pub struct AlignmentTower {
    lo: i64,
    levels: Vec<Vec<RecSymbol>>,
    parent: Vec<Vec<Option<u32>>>,
    is_start: Vec<Vec<bool>>,
}

impl AlignmentTower {
    pub fn new(y: &RecWord, depth: usize) -> Result<Self> {
        check_alternating(y)?;
        let mut levels = vec![y.symbols().to_vec()];
        let mut parent = Vec::new();
        let mut is_start = Vec::new();
        let mut cur = y.clone();
        for _ in 0..depth {
            let level = derive_level(&cur, 3, |seg, start| {
                BlockKind::from_letters(seg).map(BlockKind::derived).ok_or(
                    Error::NotDifferentiable {
                        start,
                        length: seg.len(),
                    },
                )
            })?;
            let n = cur.len();
            let mut par = vec![None; n];
            let mut st = vec![false; n];
            for (j, &s) in level.starts.iter().enumerate() {
                st[s] = true;
                let end = level
                    .starts
                    .get(j + 1)
                    .copied()
                    .unwrap_or_else(|| level.covered.unwrap().1 + 1);
                for p in par.iter_mut().take(end).skip(s) {
                    *p = Some(j as u32);
                }
            }
            parent.push(par);
            is_start.push(st);
            if level.symbols.is_empty() {
                levels.push(Vec::new());
                break;
            }
            // positions are array offsets from here on; keep a dummy origin
            cur = PointedWord::new(0, level.symbols.clone(), level.closure)?;
            levels.push(level.symbols);
        }
        Ok(AlignmentTower {
            lo: y.lo(),
            levels,
            parent,
            is_start,
        })
    }

    pub fn depth(&self) -> usize {
        self.parent.len()
    }

    pub fn level(&self, l: usize) -> &[RecSymbol] {
        &self.levels[l]
    }

    /// Follow window index `k` up `L` levels; `Ok(None)` if the block chain
    /// stops being aligned before level `L`, or its array position at level
    /// `L` otherwise.
    pub fn aligned_chain(&self, k: i64, l: usize) -> Result<Option<usize>> {
        if l > self.depth() {
            return Err(Error::InsufficientWindow(format!(
                "tower has {} levels, {l} requested",
                self.depth()
            )));
        }
        let off = k - self.lo;
        if off < 0 || off as usize >= self.levels[0].len() {
            return Err(Error::InsufficientWindow(format!(
                "index {k} outside the window"
            )));
        }
        let mut pos = off as usize;
        for lev in 0..l {
            match self.parent[lev][pos] {
                None => {
                    return Err(Error::InsufficientWindow(format!(
                        "block of index {k} at level {lev} is cut by the window edge"
                    )))
                }
                Some(j) => {
                    if !self.is_start[lev][pos] {
                        return Ok(None);
                    }
                    pos = j as usize;
                }
            }
        }
        Ok(Some(pos))
    }

    /// Array position at level `l` of the letter whose chain of blocks holds
    /// window index `k` (no alignment required).
    pub fn trace(&self, k: i64, l: usize) -> Result<usize> {
        let off = k - self.lo;
        if off < 0 || off as usize >= self.levels[0].len() || l > self.depth() {
            return Err(Error::InsufficientWindow(format!("cannot trace index {k}")));
        }
        let mut pos = off as usize;
        for lev in 0..l {
            pos = self.parent[lev][pos].ok_or_else(|| {
                Error::InsufficientWindow(format!(
                    "block of index {k} at level {lev} is cut by the window edge"
                ))
            })? as usize;
        }
        Ok(pos)
    }

    /// Flags `1_{B^L}(S^k y)` for `k = 1..=n`.
    pub fn flags(&self, l: usize, n: usize) -> Result<Vec<bool>> {
        (1..=n as i64)
            .map(|k| self.aligned_chain(k, l).map(|c| c.is_some()))
            .collect()
    }

    /// Running counts `Σ_y^L(n)` for `n = 0..=n_max`.
    pub fn sigma_counts(&self, l: usize, n_max: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(0);
        let mut acc = 0;
        for f in self.flags(l, n_max)? {
            acc += f as usize;
            out.push(acc);
        }
        Ok(out)
    }
}

/// Membership of `S^k y` in `B^L` for `k = 1..=n`.
pub fn alignment_flags(y: &RecWord, l: usize, n: usize) -> Result<Vec<bool>> {
    AlignmentTower::new(y, l)?.flags(l, n)
}

/// `Σ_y^L(n)`: how many of `S^1 y, …, S^n y` are aligned through `L` levels.
pub fn sigma_count(y: &RecWord, l: usize, n: usize) -> Result<usize> {
    Ok(alignment_flags(y, l, n)?.into_iter().filter(|&f| f).count())
}

/// `Δ^L` applied to the pointed window `y`.
pub fn induced_derive_n(y: &RecWord, l: usize) -> Result<RecWord> {
    let mut cur = y.clone();
    for _ in 0..l {
        cur = induced_derive(&cur)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LetterBalance {
    /// `|w|_A + |w|_C`
    pub ones: usize,
    /// `|w|_B + |w|_D`
    pub threes: usize,
    pub balanced: bool,
}

/// Count letters encoding 1-runs and 3-runs in an alternating factor.
pub fn letter_balance(w: &[RecSymbol]) -> Result<LetterBalance> {
    if let Some(k) = first_non_alternation(w) {
        return Err(Error::NotAlternating { index: k as i64 });
    }
    let ones = w.iter().filter(|s| s.is_odd_class()).count();
    let threes = w.len() - ones;
    let k = w.len() / 2;
    let balanced = if w.len().is_multiple_of(2) {
        ones == k && threes == k
    } else {
        (ones == k && threes == k + 1) || (ones == k + 1 && threes == k)
    };
    Ok(LetterBalance {
        ones,
        threes,
        balanced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Closure;

    fn y(s: &str) -> RecWord {
        s.parse().unwrap()
    }

    fn yc(s: &str, d: u32) -> RecWord {
        y(s).with_closure(Closure::both(d))
    }

    #[test]
    fn rec_example() {
        let x: PointedWord13 = "333 1|11 333 1 3 1 333 111 333 1".parse().unwrap();
        assert_eq!(rec(&x).unwrap().to_text(), "CDABADCD");
        let r = rec(&x.with_closure(Closure::both(1))).unwrap();
        assert_eq!(r.to_text(), "D|CDABADCDA");
        let aba = rec(&"131"
            .parse::<PointedWord13>()
            .unwrap()
            .with_closure(Closure::both(1)))
        .unwrap();
        assert_eq!(aba.to_text(), "ABA");
        let dcd = rec(&"333111333"
            .parse::<PointedWord13>()
            .unwrap()
            .with_closure(Closure::both(1)))
        .unwrap();
        assert_eq!(dcd.to_text(), "DCD");
    }

    #[test]
    fn expand_inverts_rec() {
        let w = yc("DC|DABA", 1);
        let x = expand(&w);
        assert_eq!(x.to_text(), "333111|333131");
        assert_eq!(rec(&x).unwrap(), w.clone().with_closure(Closure::both(1)));
    }

    #[test]
    fn decomposition_examples() {
        let d = elementary_decompose(&yc("DCDABADCDA", 1)).unwrap();
        let kinds: Vec<String> = d.blocks.iter().map(|b| b.kind.to_string()).collect();
        assert_eq!(kinds, vec!["DCD", "ABA", "DCD", "A"]);
        assert_eq!(d.coverage, Some((0, 9)));
        let open = elementary_decompose(&y("DCDABADCDA")).unwrap();
        let kinds: Vec<String> = open.blocks.iter().map(|b| b.kind.to_string()).collect();
        assert_eq!(kinds, vec!["ABA", "DCD"]);
        let bab = elementary_decompose(&yc("BAB", 1)).unwrap();
        assert_eq!(
            bab.blocks,
            vec![Block {
                kind: BlockKind::BAB,
                start: 0
            }]
        );
        let a = elementary_decompose(&yc("A", 1)).unwrap();
        assert_eq!(
            a.blocks,
            vec![Block {
                kind: BlockKind::A,
                start: 0
            }]
        );
    }

    #[test]
    fn decomposition_rejects() {
        assert!(matches!(
            elementary_decompose(&y("AAB")),
            Err(Error::NotAlternating { .. })
        ));
        assert!(matches!(
            elementary_decompose(&yc("ABAB", 1)),
            Err(Error::NotDifferentiable { .. })
        ));
    }

    #[test]
    fn induced_rules() {
        assert_eq!(induced_derive(&yc("ABA", 1)).unwrap().to_text(), "C");
        assert_eq!(induced_derive(&yc("CDC", 1)).unwrap().to_text(), "D");
        assert_eq!(induced_derive(&yc("A", 1)).unwrap().to_text(), "A");
        assert_eq!(induced_derive(&yc("D", 1)).unwrap().to_text(), "B");
        // the worked diagram: D C̲ D A B A D C D A -> D̲ C D
        let w = y("D|CDABADCDA").with_closure(Closure { left: 1, right: 0 });
        assert_eq!(induced_derive(&w).unwrap().to_text(), "DCD");
        let closed = yc("D|CDABADCDA", 1);
        assert_eq!(induced_derive(&closed).unwrap().to_text(), "DCDA");
        assert_eq!(
            induced_derive(&y("ABA|DCD")),
            Err(Error::OriginBlockIncomplete)
        );
    }

    #[test]
    fn flags_example() {
        let w = yc("DCDABADCD", 1);
        assert_eq!(alignment_flags(&w, 1, 3).unwrap(), vec![false, false, true]);
        assert_eq!(sigma_count(&w, 1, 3).unwrap(), 1);
        assert_eq!(alignment_flags(&w, 1, 0).unwrap(), Vec::<bool>::new());
        assert_eq!(sigma_count(&w, 1, 0).unwrap(), 0);
    }

    #[test]
    fn flags_need_trust() {
        let w = y("DCDABADCD");
        assert!(matches!(
            alignment_flags(&w, 1, 1),
            Err(Error::InsufficientWindow(_))
        ));
        // position 3 starts ABA, which is complete
        assert_eq!(
            AlignmentTower::new(&w, 1)
                .unwrap()
                .aligned_chain(3, 1)
                .unwrap(),
            Some(0)
        );
    }

    #[test]
    fn balance_examples() {
        let b = letter_balance(&parse_letters("DCDA").unwrap()).unwrap();
        assert_eq!((b.ones, b.threes, b.balanced), (2, 2, true));
        let b = letter_balance(&parse_letters("DCD").unwrap()).unwrap();
        assert_eq!((b.ones, b.threes, b.balanced), (1, 2, true));
        let b = letter_balance(&parse_letters("A").unwrap()).unwrap();
        assert_eq!((b.ones, b.threes), (1, 0));
        assert!(letter_balance(&parse_letters("AC").unwrap()).is_err());
    }
}
