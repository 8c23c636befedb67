//! Types, type sequences and the substitutions `φ_0`, `φ_1`.
//!
//! A recoded sequence has type 0 when it contains the elementary blocks
//! `ABA` or `DCD`, and type 1 when it contains `BAB` or `CDC`. The
//! substitutions are right inverses of the induced derivative, one per type:
//!
//! ```text
//! φ0: A -> A(BA)^p   B -> D(CD)^p   C -> A(BA)^q   D -> D(CD)^q
//! φ1: A -> B(AB)^p   B -> C(DC)^p   C -> B(AB)^q   D -> C(DC)^q
//! ```
//!
//! with `p = (α-1)/2`, `q = (β-1)/2`; for `{1,3}` this is
//! `φ0 = (A, D, ABA, DCD)` and `φ1 = (B, C, BAB, CDC)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recoding::{
    elementary_decompose, induced_derive, induced_derive_with_starts, BlockKind, RecSymbol,
    RecWord, REC_LETTERS,
};
use crate::word::{Closure, PointedWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeBit {
    Zero,
    One,
}

impl TypeBit {
    pub fn from_u8(b: u8) -> Option<Self> {
        match b {
            0 => Some(TypeBit::Zero),
            1 => Some(TypeBit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn flip(self) -> Self {
        match self {
            TypeBit::Zero => TypeBit::One,
            TypeBit::One => TypeBit::Zero,
        }
    }
}

impl fmt::Display for TypeBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

pub fn bits_to_string(bits: &[TypeBit]) -> String {
    bits.iter().map(|b| b.to_string()).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<TypeBit>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(TypeBit::Zero),
            '1' => Ok(TypeBit::One),
            _ => Err(Error::Parse(format!(
                "unexpected character {c:?} in bit word"
            ))),
        })
        .collect()
}

/// `preperiod · period^∞`, or just a finite prefix when `period` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TypeSpec {
    pub preperiod: Vec<TypeBit>,
    pub period: Vec<TypeBit>,
}

impl TypeSpec {
    pub fn new(preperiod: Vec<TypeBit>, period: Vec<TypeBit>) -> Self {
        TypeSpec { preperiod, period }
    }

    pub fn periodic(period: Vec<TypeBit>) -> Self {
        TypeSpec {
            preperiod: Vec::new(),
            period,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn bit(&self, i: usize) -> Option<TypeBit> {
        if i < self.preperiod.len() {
            Some(self.preperiod[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.preperiod.len()) % self.period.len()])
        }
    }

    /// The first `n` bits, or `SpecTooShort`.
    pub fn prefix(&self, n: usize) -> Result<Vec<TypeBit>> {
        (0..n)
            .map(|i| {
                self.bit(i).ok_or(Error::SpecTooShort {
                    needed: n,
                    available: self.preperiod.len(),
                })
            })
            .collect()
    }

    /// `S^k τ`.
    pub fn shift(&self, k: usize) -> TypeSpec {
        if k <= self.preperiod.len() {
            return TypeSpec {
                preperiod: self.preperiod[k..].to_vec(),
                period: self.period.clone(),
            };
        }
        if self.period.is_empty() {
            return TypeSpec::default();
        }
        let r = (k - self.preperiod.len()) % self.period.len();
        let mut period = self.period[r..].to_vec();
        period.extend_from_slice(&self.period[..r]);
        TypeSpec {
            preperiod: Vec::new(),
            period,
        }
    }

    /// `b · τ`.
    pub fn prepend(&self, b: TypeBit) -> TypeSpec {
        let mut preperiod = vec![b];
        preperiod.extend_from_slice(&self.preperiod);
        TypeSpec {
            preperiod,
            period: self.period.clone(),
        }
    }

    /// Canonical form: primitive period and shortest preperiod.
    pub fn normalized(&self) -> TypeSpec {
        let mut pre = self.preperiod.clone();
        let mut per = self.period.clone();
        if per.is_empty() {
            return TypeSpec::new(pre, per);
        }
        let n = per.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| per[i] == per[i % d]) {
                per.truncate(d);
                break;
            }
        }
        while let Some(&last) = pre.last() {
            if last != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        TypeSpec::new(pre, per)
    }

    pub fn contains_zero_in_period(&self) -> bool {
        self.period.contains(&TypeBit::Zero)
    }
}

impl fmt::Display for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", bits_to_string(&self.preperiod))?;
        if !self.period.is_empty() {
            write!(f, "({})", bits_to_string(&self.period))?;
        }
        Ok(())
    }
}

impl FromStr for TypeSpec {
    type Err = Error;

    /// `BITS` or `BITS(BITS)`, e.g. `0001(1)`, `(01)`, `0001`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(c) = s.chars().find(|c| !matches!(c, '0' | '1' | '(' | ')')) {
            return Err(Error::Parse(format!(
                "unexpected character {c:?} in type sequence"
            )));
        }
        match s.find('(') {
            None => {
                if s.contains(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                Ok(TypeSpec::new(parse_bits(s)?, Vec::new()))
            }
            Some(i) => {
                let rest = &s[i + 1..];
                let body = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse("period must end the type sequence".into()))?;
                if body.contains('(') || body.contains(')') {
                    return Err(Error::Parse("nested parenthesis".into()));
                }
                if body.is_empty() {
                    return Err(Error::Parse("empty period".into()));
                }
                Ok(TypeSpec::new(parse_bits(&s[..i])?, parse_bits(body)?))
            }
        }
    }
}

/// Alphabet `{α, β}` of two distinct odd integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphabetParams {
    pub alpha: u32,
    pub beta: u32,
}

impl Default for AlphabetParams {
    fn default() -> Self {
        AlphabetParams { alpha: 1, beta: 3 }
    }
}

impl AlphabetParams {
    pub const ONE_THREE: AlphabetParams = AlphabetParams { alpha: 1, beta: 3 };

    pub fn new(alpha: u32, beta: u32) -> Result<Self> {
        if alpha.is_multiple_of(2) || beta.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "{{{alpha},{beta}}}: both letters must be odd"
            )));
        }
        if alpha == beta {
            return Err(Error::InvalidParams(format!(
                "{{{alpha},{beta}}}: letters must differ"
            )));
        }
        Ok(AlphabetParams { alpha, beta })
    }

    pub fn p(self) -> usize {
        ((self.alpha - 1) / 2) as usize
    }

    pub fn q(self) -> usize {
        ((self.beta - 1) / 2) as usize
    }

    pub fn is_one_three(self) -> bool {
        self == Self::ONE_THREE
    }
}

impl fmt::Display for AlphabetParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.alpha, self.beta)
    }
}

impl FromStr for AlphabetParams {
    type Err = Error;
    /// `"1,3"` or `"{1,3}"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!(
                "alphabet {s:?}: expected two integers"
            )));
        }
        let n = |t: &str| {
            t.parse::<u32>().map_err(|_| {
                Error::Parse(format!("alphabet {s:?}: {t:?} is not a positive integer"))
            })
        };
        AlphabetParams::new(n(parts[0])?, n(parts[1])?)
    }
}

/// `φ_t(letter)`.
pub fn phi_image(t: TypeBit, letter: RecSymbol, params: AlphabetParams) -> Vec<RecSymbol> {
    use RecSymbol::*;
    let (head, x, y, reps) = match (t, letter) {
        (TypeBit::Zero, A) => (A, B, A, params.p()),
        (TypeBit::Zero, B) => (D, C, D, params.p()),
        (TypeBit::Zero, C) => (A, B, A, params.q()),
        (TypeBit::Zero, D) => (D, C, D, params.q()),
        (TypeBit::One, A) => (B, A, B, params.p()),
        (TypeBit::One, B) => (C, D, C, params.p()),
        (TypeBit::One, C) => (B, A, B, params.q()),
        (TypeBit::One, D) => (C, D, C, params.q()),
    };
    let mut out = Vec::with_capacity(1 + 2 * reps);
    out.push(head);
    for _ in 0..reps {
        out.push(x);
        out.push(y);
    }
    out
}

/// All four images of `φ_t`, indexed by [`RecSymbol::index`].
pub fn phi_table(t: TypeBit, params: AlphabetParams) -> [Vec<RecSymbol>; 4] {
    REC_LETTERS.map(|s| phi_image(t, s, params))
}

/// `4 x 4` letter-count matrix `M[x][y] = |φ_t(y)|_x`.
pub fn count_matrix(t: TypeBit, params: AlphabetParams) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for y in REC_LETTERS {
        for x in phi_image(t, y, params) {
            m[x.index()][y.index()] += 1.0;
        }
    }
    m
}

/// Apply `φ_t` letter by letter; the image of `y_0` starts at index 0.
pub fn phi_apply(t: TypeBit, y: &RecWord, params: AlphabetParams) -> RecWord {
    let table = phi_table(t, params);
    let mut symbols = Vec::new();
    let mut origin = 0usize;
    for (k, s) in y.symbols().iter().enumerate() {
        if y.lo() + k as i64 == 0 {
            origin = symbols.len();
        }
        symbols.extend_from_slice(&table[s.index()]);
    }
    PointedWord::new(-(origin as i64), symbols, y.closure().raise()).expect("origin inside image")
}

/// `φ_{τ0} ∘ … ∘ φ_{τ_{L-1}}(seed)`.
pub fn compose_phi(bits: &[TypeBit], seed: &RecWord, params: AlphabetParams) -> RecWord {
    let mut cur = seed.clone();
    for &t in bits.iter().rev() {
        cur = phi_apply(t, &cur, params);
    }
    cur
}

/// `compose_phi` of a single letter, as a plain word.
pub fn compose_letter(
    bits: &[TypeBit],
    letter: RecSymbol,
    params: AlphabetParams,
) -> Vec<RecSymbol> {
    let seed = PointedWord::new(0, vec![letter], Closure::OPEN).unwrap();
    compose_phi(bits, &seed, params).into_symbols()
}

/// Type of the trusted part of `y`, or `None` when no length-3 elementary
/// block is visible.
pub fn type_of(y: &RecWord) -> Result<Option<TypeBit>> {
    let dec = elementary_decompose(y)?;
    let zero = dec
        .blocks
        .iter()
        .any(|b| matches!(b.kind, BlockKind::ABA | BlockKind::DCD));
    let one = dec
        .blocks
        .iter()
        .any(|b| matches!(b.kind, BlockKind::BAB | BlockKind::CDC));
    match (zero, one) {
        (true, true) => Err(Error::TypeConflict),
        (true, false) => Ok(Some(TypeBit::Zero)),
        (false, true) => Ok(Some(TypeBit::One)),
        (false, false) => Ok(None),
    }
}

/// `(type(Δ^k y))_{k < depth}`.
pub fn types_prefix(y: &RecWord, depth: usize) -> Result<Vec<TypeBit>> {
    let mut out = Vec::with_capacity(depth);
    let mut cur = y.clone();
    for k in 0..depth {
        match type_of(&cur)? {
            Some(t) => out.push(t),
            None => return Err(Error::Indeterminate { level: k }),
        }
        if k + 1 < depth {
            cur = induced_derive(&cur)?;
        }
    }
    Ok(out)
}

/// The unique `i` in `0..3^L` with `y = S^i compose_phi(types_prefix(y, L), Δ^L y)`
/// on the part of `y` covered by the image.
pub fn reconstruct_shift(y: &RecWord, l: usize) -> Result<i64> {
    let bits = types_prefix(y, l)?;
    // start index (at level 0) of the block chain behind (Δ^L y)_0
    let mut chain = Vec::with_capacity(l);
    let mut cur = y.clone();
    for _ in 0..l {
        let (next, starts) = induced_derive_with_starts(&cur)?;
        chain.push((starts, next.lo()));
        cur = next;
    }
    let mut p: i64 = 0;
    for (starts, lo_above) in chain.iter().rev() {
        p = starts[(p - lo_above) as usize];
    }
    let i = -p;
    let z = compose_phi(&bits, &cur, AlphabetParams::ONE_THREE);
    for m in z.lo()..=z.hi() {
        match y.get(m - i) {
            Some(s) if Some(s) == z.get(m) => {}
            Some(_) => return Err(Error::NoMatch),
            None => {}
        }
    }
    let bound = 3i64.pow(l as u32);
    if !(0..bound).contains(&i) {
        return Err(Error::NoMatch);
    }
    Ok(i)
}

/// The word `w_n^0` of the standard construction of an element of `Y_τ`.
///
/// Start from `D` at level `n`; going down, apply `φ_{τ_L}` and shift by
/// `i_L`, where `i_L = 1` for `τ_L = 1` and, for `τ_L = 0`, `i_L = 0` on odd
/// levels and `2` on even ones. The origin letter is `D` at every level.
pub fn canonical_element(tau: &TypeSpec, n: usize) -> Result<RecWord> {
    Ok(canonical_levels(tau, n)?.swap_remove(0))
}

/// All levels `w_n^0, …, w_n^n` of the construction.
pub fn canonical_levels(tau: &TypeSpec, n: usize) -> Result<Vec<RecWord>> {
    let bits = tau.prefix(n)?;
    let mut cur = PointedWord::new(0, vec![RecSymbol::D], Closure::OPEN)?;
    let mut levels = vec![cur.clone()];
    for l in (0..n).rev() {
        let img = phi_apply(bits[l], &cur, AlphabetParams::ONE_THREE);
        let shift = match bits[l] {
            TypeBit::One => 1,
            TypeBit::Zero if l % 2 == 1 => 0,
            TypeBit::Zero => 2,
        };
        cur = img.shift(shift)?;
        levels.push(cur.clone());
    }
    levels.reverse();
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recoding::letters_to_string;

    fn y(s: &str) -> RecWord {
        s.parse().unwrap()
    }

    fn yc(s: &str, d: u32) -> RecWord {
        y(s).with_closure(Closure::both(d))
    }

    fn bits(s: &str) -> Vec<TypeBit> {
        parse_bits(s).unwrap()
    }

    const P: AlphabetParams = AlphabetParams::ONE_THREE;

    #[test]
    fn spec_grammar() {
        let t: TypeSpec = "0001(1)".parse().unwrap();
        assert_eq!(t.preperiod.len(), 4);
        assert_eq!(t.period, vec![TypeBit::One]);
        assert_eq!(t.to_string(), "0001(1)");
        assert_eq!("(01)".parse::<TypeSpec>().unwrap().to_string(), "(01)");
        assert!("0001".parse::<TypeSpec>().unwrap().is_finite());
        for bad in ["0a1", "01)", "0(1", "(0)1", "()", "((0))"] {
            assert!(bad.parse::<TypeSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_shift_and_normalize() {
        let t: TypeSpec = "0001(1)".parse().unwrap();
        assert_eq!(t.shift(3).to_string(), "1(1)");
        assert_eq!(t.shift(10).to_string(), "(1)");
        let u: TypeSpec = "1(01)".parse().unwrap();
        assert_eq!(u.shift(2).to_string(), "(10)");
        assert_eq!(
            "1(1)".parse::<TypeSpec>().unwrap().normalized().to_string(),
            "(1)"
        );
        assert_eq!(
            "0(10)"
                .parse::<TypeSpec>()
                .unwrap()
                .normalized()
                .to_string(),
            "(01)"
        );
        assert_eq!(
            "01(0101)"
                .parse::<TypeSpec>()
                .unwrap()
                .normalized()
                .to_string(),
            "(01)"
        );
        assert_eq!(
            "001(11)"
                .parse::<TypeSpec>()
                .unwrap()
                .normalized()
                .to_string(),
            "00(1)"
        );
        assert_eq!(t.prefix(6).unwrap(), bits("000111"));
        assert!(matches!(
            "01".parse::<TypeSpec>().unwrap().prefix(3),
            Err(Error::SpecTooShort {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn alphabet_params() {
        assert_eq!("{1,3}".parse::<AlphabetParams>().unwrap(), P);
        assert_eq!(
            "3, 7".parse::<AlphabetParams>().unwrap(),
            AlphabetParams { alpha: 3, beta: 7 }
        );
        assert!("2,3".parse::<AlphabetParams>().is_err());
        assert!("3,3".parse::<AlphabetParams>().is_err());
        assert!("1".parse::<AlphabetParams>().is_err());
    }

    #[test]
    fn tables_specialize() {
        let s = |t, l| letters_to_string(&phi_image(t, l, P));
        use RecSymbol::*;
        assert_eq!(
            [
                s(TypeBit::Zero, A),
                s(TypeBit::Zero, B),
                s(TypeBit::Zero, C),
                s(TypeBit::Zero, D)
            ],
            ["A", "D", "ABA", "DCD"]
        );
        assert_eq!(
            [
                s(TypeBit::One, A),
                s(TypeBit::One, B),
                s(TypeBit::One, C),
                s(TypeBit::One, D)
            ],
            ["B", "C", "BAB", "CDC"]
        );
        let g = AlphabetParams::new(3, 5).unwrap();
        assert_eq!(letters_to_string(&phi_image(TypeBit::Zero, D, g)), "DCDCD");
        assert_eq!(letters_to_string(&phi_image(TypeBit::One, B, g)), "CDC");
    }

    #[test]
    fn phi_diagrams() {
        let w = y("D|CDA");
        assert_eq!(phi_apply(TypeBit::Zero, &w, P).to_text(), "DCD|ABADCDA");
        assert_eq!(phi_apply(TypeBit::One, &w, P).to_text(), "CDC|BABCDCB");
    }

    #[test]
    fn composed_words() {
        let d = y("D");
        assert_eq!(compose_phi(&bits("00"), &d, P).to_text(), "DCDABADCD");
        assert_eq!(compose_phi(&bits("11"), &d, P).to_text(), "BABCDCBAB");
        assert_eq!(
            compose_phi(&bits("000"), &d, P).to_text(),
            "DCDABADCDADADCDABADCD"
        );
        assert_eq!(compose_phi(&bits("000"), &d, P).closure(), Closure::both(3));
    }

    #[test]
    fn types() {
        assert_eq!(type_of(&y("DCDABADCD")).unwrap(), Some(TypeBit::Zero));
        assert_eq!(type_of(&y("CDCBABCDC")).unwrap(), Some(TypeBit::One));
        assert_eq!(type_of(&y("ADAD")).unwrap(), None);
        // blocks of the two families never meet in an alternating word
        assert!(matches!(
            type_of(&yc("ABACDC", 1)),
            Err(Error::NotAlternating { .. })
        ));
        let w = compose_phi(&bits("01"), &y("D"), P);
        assert_eq!(types_prefix(&w, 2).unwrap(), bits("01"));
        assert_eq!(
            types_prefix(&y("ADAD"), 1),
            Err(Error::Indeterminate { level: 0 })
        );
    }

    #[test]
    fn shift_examples() {
        // origin on the B of ABA: one step left of the image of C
        let w = yc("DCDA|BADCD", 1);
        assert_eq!(reconstruct_shift(&w, 1).unwrap(), 1);
        let aligned = yc("DCD|ABADCD", 1);
        assert_eq!(reconstruct_shift(&aligned, 1).unwrap(), 0);
        let two = compose_phi(&bits("01"), &y("CDC"), P).shift(5).unwrap();
        let i = reconstruct_shift(&two, 2).unwrap();
        assert!((0..9).contains(&i));
    }

    #[test]
    fn canonical_words() {
        let one: TypeSpec = "(1)".parse().unwrap();
        assert_eq!(canonical_element(&one, 1).unwrap().to_text(), "C|DC");
        assert_eq!(canonical_element(&one, 2).unwrap().to_text(), "BABC|DCBAB");
        assert_eq!(
            canonical_element(&one, 3).unwrap().to_text(),
            "CBCBABC|DCBABCBC"
        );
        let zero: TypeSpec = "0(1)".parse().unwrap();
        assert_eq!(canonical_element(&zero, 1).unwrap().to_text(), "DC|D");
        assert_eq!(canonical_element(&one, 0).unwrap().to_text(), "D");
        assert!(matches!(
            canonical_element(&"01".parse().unwrap(), 3),
            Err(Error::SpecTooShort { .. })
        ));
        let levels = canonical_levels(&"0001(1)".parse().unwrap(), 5).unwrap();
        for l in &levels {
            assert_eq!(l.origin(), RecSymbol::D);
        }
    }
}
