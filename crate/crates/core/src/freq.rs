//! Letter and pattern frequencies of the uniquely ergodic subshifts `X_τ`.
//!
//! Write `a, b, c, d` for the frequencies of `A, B, C, D` in `Y_τ`; since
//! letters alternate, `a + c = b + d = 1/2`. If `y = φ_t(y')`, counting
//! letters gives `(a, b) = h_t(a', b')` with
//!
//! ```text
//! h0(a, b) = ((β+1)/4 - a(β-α)/2, (β-1)/4 - a(β-α)/2) / (β - (β-α)(a+b))
//! h1 = swap ∘ h0
//! ```
//!
//! For `{1,3}`, `h0(a, b) = (1 - a, 1/2 - a) / (3 - 2(a+b))`. Both maps send
//! the square `K = [0,1/2]^2` into `E = {a + b <= 3/4}` and contract `E` by
//! `2/3` in the sup norm, so `(a(τ), b(τ))` is the limit of
//! `h_{τ0} ∘ … ∘ h_{τL}(E)`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::recoding::{expand_letters, is_alternating, RecSymbol, REC_LETTERS};
use crate::sequences::Symbol13;
use crate::typesub::{compose_phi, count_matrix, phi_image, AlphabetParams, TypeBit, TypeSpec};
use crate::word::{Letter, PointedWord};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 200;

/// Slack added per floating-point evaluation when tracking radii.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

/// A point `(a, b)` with a sup-norm error radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreqPoint {
    pub a: f64,
    pub b: f64,
    pub err: f64,
}

impl FreqPoint {
    pub fn exact(a: f64, b: f64) -> Self {
        FreqPoint { a, b, err: 0.0 }
    }

    pub fn c(&self) -> f64 {
        0.5 - self.a
    }

    pub fn d(&self) -> f64 {
        0.5 - self.b
    }

    /// `[a, b, c, d]`, i.e. `ν([A]), …, ν([D])`.
    pub fn letters(&self) -> [f64; 4] {
        [self.a, self.b, self.c(), self.d()]
    }

    pub fn dist(&self, other: &FreqPoint) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs())
    }

    fn box_corners(&self) -> [(f64, f64); 4] {
        let cl = |x: f64| x.clamp(0.0, 0.5);
        let (a0, a1) = (cl(self.a - self.err), cl(self.a + self.err));
        let (b0, b1) = (cl(self.b - self.err), cl(self.b + self.err));
        [(a0, b0), (a1, b0), (a1, b1), (a0, b1)]
    }
}

/// Corners of `K`, in the order used for fractal cells.
pub const K_CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Homography {
    pub branch: TypeBit,
    pub params: AlphabetParams,
}

impl Homography {
    pub fn new(branch: TypeBit, params: AlphabetParams) -> Self {
        Homography { branch, params }
    }

    pub fn eval(&self, a: f64, b: f64) -> (f64, f64) {
        let (x, y) = h0(self.params, a, b);
        match self.branch {
            TypeBit::Zero => (x, y),
            TypeBit::One => (y, x),
        }
    }

    /// Sup-norm of the Jacobian at `(a, b)` (same for both branches).
    pub fn jacobian_norm(&self, a: f64, b: f64) -> f64 {
        let (s, d, u, v) = parts(self.params, a, b);
        let r1 = (s * (2.0 * u - d)).abs() + (2.0 * s * u).abs();
        let r2 = (s * (2.0 * v - d)).abs() + (2.0 * s * v).abs();
        r1.max(r2) / (d * d)
    }

    /// Upper bound for the Lipschitz constant over the box spanned by `corners`.
    /// Every Jacobian entry is affine over the square of an affine denominator,
    /// so numerators peak and the denominator bottoms out at corners.
    pub fn lipschitz_bound(&self, corners: &[(f64, f64)]) -> f64 {
        let mut n11 = 0.0f64;
        let mut n12 = 0.0f64;
        let mut n21 = 0.0f64;
        let mut n22 = 0.0f64;
        let mut dmin = f64::INFINITY;
        for &(a, b) in corners {
            let (s, d, u, v) = parts(self.params, a, b);
            n11 = n11.max((s * (2.0 * u - d)).abs());
            n12 = n12.max((2.0 * s * u).abs());
            n21 = n21.max((s * (2.0 * v - d)).abs());
            n22 = n22.max((2.0 * s * v).abs());
            dmin = dmin.min(d);
        }
        (n11 + n12).max(n21 + n22) / (dmin * dmin)
    }
}

/// `(s, D, u, v)` with `s = (β-α)/2`, `D = β - 2s(a+b)`, `h0 = (u, v)/D`.
fn parts(params: AlphabetParams, a: f64, b: f64) -> (f64, f64, f64, f64) {
    let alpha = params.alpha as f64;
    let beta = params.beta as f64;
    let s = (beta - alpha) / 2.0;
    let d = beta - 2.0 * s * (a + b);
    let u = (beta + 1.0) / 4.0 - s * a;
    let v = (beta - 1.0) / 4.0 - s * a;
    (s, d, u, v)
}

pub fn h0(params: AlphabetParams, a: f64, b: f64) -> (f64, f64) {
    let (_, d, u, v) = parts(params, a, b);
    (u / d, v / d)
}

pub fn h1(params: AlphabetParams, a: f64, b: f64) -> (f64, f64) {
    let (x, y) = h0(params, a, b);
    (y, x)
}

/// Mean run length `α(a+b) + β(c+d)`; `3 - 2(a+b)` for `{1,3}`.
pub fn mean_block_length(params: AlphabetParams, a: f64, b: f64) -> f64 {
    let alpha = params.alpha as f64;
    let beta = params.beta as f64;
    alpha * (a + b) + beta * (1.0 - a - b)
}

/// Frequency of the letter `α` in `X_τ` given `(a, b)`:
/// `(αa + βc) / (α(a+b) + β(c+d))`, i.e. `(3/2 - 2a)/(3 - 2(a+b))` for `{1,3}`.
pub fn f_ones(params: AlphabetParams, a: f64, b: f64) -> f64 {
    let alpha = params.alpha as f64;
    let beta = params.beta as f64;
    (alpha * a + beta * (0.5 - a)) / mean_block_length(params, a, b)
}

/// Bound on `|f(p) - f(p')|` for `p'` in the error box of `p`.
fn f_err(params: AlphabetParams, p: &FreqPoint) -> f64 {
    if p.err == 0.0 {
        return ROUNDING;
    }
    let k = (params.beta as f64) - (params.alpha as f64);
    let mut n1 = 0.0f64;
    let mut n2 = 0.0f64;
    let mut dmin = f64::INFINITY;
    for (a, b) in p.box_corners() {
        let den = mean_block_length(params, a, b);
        let num = (params.alpha as f64) * a + (params.beta as f64) * (0.5 - a);
        n1 = n1.max((k * (num - den)).abs());
        n2 = n2.max((k * num).abs());
        dmin = dmin.min(den);
    }
    (n1 + n2) / (dmin * dmin) * p.err + ROUNDING
}

/// `f` at `p` with a certified error radius.
pub fn f_estimate(params: AlphabetParams, p: &FreqPoint) -> Estimate {
    Estimate {
        value: f_ones(params, p.a, p.b),
        err: f_err(params, p),
    }
}

/// Upper end of `a + b` on the domain `E` (3/4 for `{1,3}`): the largest
/// `a + b` over the corners of `h0(K)`.
pub fn domain_smax(params: AlphabetParams) -> f64 {
    K_CORNERS
        .iter()
        .map(|&(a, b)| {
            let (x, y) = h0(params, a, b);
            x + y
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn in_domain(params: AlphabetParams, a: f64, b: f64, slack: f64) -> bool {
    let k = |x: f64| (-slack..=0.5 + slack).contains(&x);
    k(a) && k(b) && a + b <= domain_smax(params) + slack
}

/// Apply `h` to `p`, propagating the error radius.
pub fn homography_step(h: Homography, p: FreqPoint) -> Result<FreqPoint> {
    let slack = 1e-12 + p.err;
    let in_k = |x: f64| (-slack..=0.5 + slack).contains(&x);
    if !(in_k(p.a) && in_k(p.b)) || !p.a.is_finite() || !p.b.is_finite() {
        return Err(Error::DomainViolation { a: p.a, b: p.b });
    }
    let (a, b) = h.eval(p.a, p.b);
    let err = if p.err == 0.0 {
        ROUNDING
    } else {
        let corners = p.box_corners();
        let certified = h.params.is_one_three() && corners.iter().all(|&(x, y)| x + y <= 0.75);
        let lip = if certified {
            2.0 / 3.0
        } else {
            h.lipschitz_bound(&corners)
        };
        lip * p.err + ROUNDING
    };
    Ok(FreqPoint { a, b, err })
}

fn apply_word(bits: &[TypeBit], params: AlphabetParams, p: FreqPoint) -> Result<FreqPoint> {
    let mut cur = p;
    for &t in bits.iter().rev() {
        cur = homography_step(Homography::new(t, params), cur)?;
    }
    Ok(cur)
}

/// `h_{bits0} ∘ … ∘ h_{bits_{n-1}}(a, b)` without error tracking.
pub fn compose_homographies(
    bits: &[TypeBit],
    params: AlphabetParams,
    a: f64,
    b: f64,
) -> (f64, f64) {
    let mut cur = (a, b);
    for &t in bits.iter().rev() {
        cur = Homography::new(t, params).eval(cur.0, cur.1);
    }
    cur
}

/// The point `(a(τ), b(τ))`.
///
/// For a periodic tail, the composed period map is iterated to a fixed point
/// and the preperiod maps are applied on top. For a finite prefix, the image
/// of `K` under the prefix maps is bounded by its corner images and the
/// centre of that box is returned.
pub fn solve_ab(tau: &TypeSpec, tol: f64, params: AlphabetParams) -> Result<FreqPoint> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if tau.period.is_empty() {
        let imgs: Vec<(f64, f64)> = K_CORNERS
            .iter()
            .map(|&(a, b)| compose_homographies(&tau.preperiod, params, a, b))
            .collect();
        let (mut a0, mut a1, mut b0, mut b1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (a, b) in imgs {
            a0 = a0.min(a);
            a1 = a1.max(a);
            b0 = b0.min(b);
            b1 = b1.max(b);
        }
        return Ok(FreqPoint {
            a: (a0 + a1) / 2.0,
            b: (b0 + b1) / 2.0,
            err: ((a1 - a0) / 2.0).max((b1 - b0) / 2.0) + ROUNDING,
        });
    }
    let period = &tau.period;
    let stop = tol.max(8.0 * f64::EPSILON);
    let mut x = (0.25, 0.25);
    let mut diffs: Vec<f64> = Vec::new();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let next = compose_homographies(period, params, x.0, x.1);
        let d = (next.0 - x.0).abs().max((next.1 - x.1).abs());
        x = next;
        diffs.push(d);
        if d < stop {
            converged = true;
            break;
        }
    }
    let ratios: Vec<f64> = diffs
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if !converged {
        let tail = ratios.len().saturating_sub(10);
        return Err(Error::NonConvergence {
            ratios: ratios[tail..].to_vec(),
        });
    }
    let last = *diffs.last().unwrap();
    let c = if params.is_one_three() {
        (2.0f64 / 3.0).powi(period.len() as i32)
    } else {
        let tail = ratios.len().saturating_sub(5);
        let c = ratios[tail..].iter().copied().fold(0.0, f64::max);
        if c >= 0.999 {
            return Err(Error::NonConvergence { ratios });
        }
        c
    };
    let fixed = FreqPoint {
        a: x.0,
        b: x.1,
        err: last * c / (1.0 - c) + ROUNDING,
    };
    apply_word(&tau.preperiod, params, fixed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreqReport {
    pub tau: String,
    pub alphabet: [u32; 2],
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f_ones: f64,
    pub err: f64,
    pub minimal: Option<bool>,
    pub degenerate_letters: Option<Vec<String>>,
    #[serde(skip)]
    pub nu_letters: [(RecSymbol, f64); 4],
    #[serde(skip)]
    pub f_err: f64,
}

/// Letter frequencies and the frequency of the letter `α` (`1` for `{1,3}`).
pub fn freq_report(tau: &TypeSpec, tol: f64, params: AlphabetParams) -> Result<FreqReport> {
    let p = solve_ab(tau, tol, params)?;
    let f = f_ones(params, p.a, p.b);
    let fe = f_err(params, &p);
    let (minimal, degenerate) = if params.is_one_three() && !tau.is_finite() {
        (
            Some(minimality(tau)?),
            Some(
                degenerate_letters(tau)?
                    .into_iter()
                    .map(|s| s.to_char().to_string())
                    .collect(),
            ),
        )
    } else {
        (None, None)
    };
    Ok(FreqReport {
        tau: tau.to_string(),
        alphabet: [params.alpha, params.beta],
        a: p.a,
        b: p.b,
        c: p.c(),
        d: p.d(),
        f_ones: f,
        err: p.err.max(fe),
        minimal,
        degenerate_letters: degenerate,
        nu_letters: [
            (RecSymbol::A, p.a),
            (RecSymbol::B, p.b),
            (RecSymbol::C, p.c()),
            (RecSymbol::D, p.d()),
        ],
        f_err: fe,
    })
}

/// A value with an error radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// Solutions for `S^ℓ τ`, cached by the distinct shifts of an eventually
/// periodic `τ`.
struct ShiftPoints<'a> {
    tau: &'a TypeSpec,
    tol: f64,
    params: AlphabetParams,
    cache: HashMap<usize, FreqPoint>,
}

impl<'a> ShiftPoints<'a> {
    fn new(tau: &'a TypeSpec, tol: f64, params: AlphabetParams) -> Self {
        ShiftPoints {
            tau,
            tol,
            params,
            cache: HashMap::new(),
        }
    }

    fn key(&self, l: usize) -> usize {
        let pre = self.tau.preperiod.len();
        if l < pre || self.tau.period.is_empty() {
            l
        } else {
            pre + (l - pre) % self.tau.period.len()
        }
    }

    fn get(&mut self, l: usize) -> Result<FreqPoint> {
        let k = self.key(l);
        if let Some(p) = self.cache.get(&k) {
            return Ok(*p);
        }
        let p = solve_ab(&self.tau.shift(k), self.tol, self.params)?;
        self.cache.insert(k, p);
        Ok(p)
    }
}

/// `ν(B^L) = ∏_{ℓ=1}^{L} 1 / (α(a^ℓ+b^ℓ) + β(c^ℓ+d^ℓ))` with `(a^ℓ, b^ℓ)` the
/// point of `S^ℓ τ`; for `{1,3}` each factor is `1/(1 + 2(c^ℓ + d^ℓ))`.
pub fn nu_bl(tau: &TypeSpec, l: usize, tol: f64, params: AlphabetParams) -> Result<Estimate> {
    let mut pts = ShiftPoints::new(tau, tol, params);
    nu_bl_with(&mut pts, l)
}

fn nu_bl_with(pts: &mut ShiftPoints, l: usize) -> Result<Estimate> {
    let k = (pts.params.beta as f64 - pts.params.alpha as f64).abs();
    let mut value = 1.0;
    let mut rel = 0.0;
    for ell in 1..=l {
        let p = pts.get(ell)?;
        let den = mean_block_length(pts.params, p.a, p.b);
        value /= den;
        rel += 2.0 * k * p.err / (den - 2.0 * k * p.err).max(f64::MIN_POSITIVE) + ROUNDING;
    }
    Ok(Estimate {
        value,
        err: value * rel,
    })
}

/// Occurrence count of a fixed pattern in a word, kept with enough border
/// to count occurrences across concatenations.
#[derive(Debug, Clone)]
struct Summary {
    count: f64,
    head: Vec<RecSymbol>,
    tail: Vec<RecSymbol>,
}

impl Summary {
    fn letter(s: RecSymbol, w: &[RecSymbol]) -> Self {
        let m = w.len();
        let border = if m > 1 { vec![s] } else { Vec::new() };
        Summary {
            count: if w == [s] { 1.0 } else { 0.0 },
            head: border.clone(),
            tail: border,
        }
    }

    fn concat(&self, other: &Summary, w: &[RecSymbol]) -> Summary {
        let m = w.len();
        let keep = m.saturating_sub(1);
        let mut joint = self.tail.clone();
        joint.extend_from_slice(&other.head);
        let straddle = if m > 1 && joint.len() >= m {
            (0..self.tail.len())
                .filter(|&i| {
                    i + m <= joint.len() && i + m > self.tail.len() && joint[i..i + m] == *w
                })
                .count()
        } else {
            0
        };
        let mut head = self.head.clone();
        if head.len() < keep {
            head.extend(other.head.iter().take(keep - head.len()));
        }
        let mut tail = self.tail.clone();
        tail.extend_from_slice(&other.tail);
        if tail.len() > keep {
            tail.drain(..tail.len() - keep);
        }
        Summary {
            count: self.count + other.count + straddle as f64,
            head,
            tail,
        }
    }
}

/// `ν_τ([w])` for a word over `{A,B,C,D}`.
///
/// With `S_L = φ_{τ0} ∘ … ∘ φ_{τ_{L-1}}(S)`, the lower bound
/// `α_L = ν(B^L) Σ_S s^L |S_L|_w` misses only occurrences straddling two
/// level-`L` blocks, at most `|w| ν(B^L)` of them, so `L` grows until that
/// bracket is narrower than `tol`.
pub fn pattern_freq_rec(
    tau: &TypeSpec,
    w: &[RecSymbol],
    tol: f64,
    params: AlphabetParams,
) -> Result<Estimate> {
    if w.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if !is_alternating(w) {
        return Ok(Estimate {
            value: 0.0,
            err: 0.0,
        });
    }
    if tau.is_finite() {
        return Err(Error::Undecidable);
    }
    let mut pts = ShiftPoints::new(tau, tol.min(DEFAULT_TOL), params);
    let m = w.len() as f64;
    let mut sums: Vec<Summary> = REC_LETTERS.iter().map(|&s| Summary::letter(s, w)).collect();
    let mut nu = 1.0;
    let mut nu_rel = 0.0;
    let mut widths = Vec::new();
    for l in 1..=MAX_ITER {
        let t = tau.bit(l - 1).expect("periodic");
        sums = REC_LETTERS
            .iter()
            .map(|&s| {
                let img = phi_image(t, s, params);
                let mut acc = sums[img[0].index()].clone();
                for x in &img[1..] {
                    acc = acc.concat(&sums[x.index()], w);
                }
                acc
            })
            .collect();
        let p = pts.get(l)?;
        let den = mean_block_length(params, p.a, p.b);
        nu /= den;
        nu_rel += 2.0 * (params.beta as f64 - params.alpha as f64).abs() * p.err / den + ROUNDING;
        let letters = p.letters();
        let alpha_l: f64 = (0..4).map(|i| letters[i] * sums[i].count).sum::<f64>() * nu;
        let letters_err: f64 = (0..4).map(|i| p.err * sums[i].count).sum::<f64>() * nu;
        let width = m * nu;
        widths.push(width);
        if width < tol {
            return Ok(Estimate {
                value: alpha_l + width / 2.0,
                err: width / 2.0 + letters_err + alpha_l * nu_rel,
            });
        }
    }
    let tail = widths.len().saturating_sub(10);
    Err(Error::NonConvergence {
        ratios: widths[tail..].to_vec(),
    })
}

/// Rec-words `w'` and offsets `j` such that `w` read from offset `j` of the
/// run of `w'_0` ends inside the run of the last letter of `w'`.
pub fn covers(w: &[Symbol13]) -> Vec<(Vec<RecSymbol>, usize)> {
    fn extend(
        w: &[Symbol13],
        done: usize,
        cur: &mut Vec<RecSymbol>,
        j: usize,
        out: &mut Vec<(Vec<RecSymbol>, usize)>,
    ) {
        let last = *cur.last().unwrap();
        let len = last.run_length().value() as usize;
        let avail = if cur.len() == 1 { len - j } else { len };
        let need = w.len() - done;
        let take = avail.min(need);
        if w[done..done + take].iter().any(|&s| s != last.run_symbol()) {
            return;
        }
        if take == need {
            out.push((cur.clone(), j));
            return;
        }
        for next in REC_LETTERS {
            if next.is_odd_class() != last.is_odd_class() {
                cur.push(next);
                extend(w, done + take, cur, j, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if w.is_empty() {
        return out;
    }
    for first in REC_LETTERS {
        for j in 0..first.run_length().value() as usize {
            let mut cur = vec![first];
            extend(w, 0, &mut cur, j, &mut out);
        }
    }
    out
}

/// `μ_τ([w])` for a word over `{1,3}`: every occurrence of `w` in `x` is
/// pinned to the run where it starts, so
/// `μ([w]) = Σ_{(w', j)} ν([w']) / (3 - 2(a+b))` over [`covers`].
pub fn pattern_freq_x(tau: &TypeSpec, w: &[Symbol13], tol: f64) -> Result<Estimate> {
    if w.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let params = AlphabetParams::ONE_THREE;
    let cov = covers(w);
    let p = solve_ab(tau, tol.min(DEFAULT_TOL), params)?;
    let den = mean_block_length(params, p.a, p.b);
    let each = tol / (2.0 * cov.len().max(1) as f64);
    let mut value = 0.0;
    let mut err = 0.0;
    for (wp, _) in &cov {
        let e = pattern_freq_rec(tau, wp, each, params)?;
        value += e.value;
        err += e.err;
    }
    let den_err = 2.0 * 2.0 * p.err;
    Ok(Estimate {
        value: value / den,
        err: err / den + value * den_err / (den * (den - den_err)),
    })
}

/// Minimality of `X_τ`: true iff `τ` has infinitely many zeros.
pub fn minimality(tau: &TypeSpec) -> Result<bool> {
    if tau.is_finite() {
        return Err(Error::Undecidable);
    }
    Ok(tau.contains_zero_in_period())
}

/// Letters of frequency zero: `D` for `1^∞`, `C` for `01^∞`, `A` for
/// `101^∞`, `B` for `001^∞`, none otherwise.
pub fn degenerate_letters(tau: &TypeSpec) -> Result<Vec<RecSymbol>> {
    if tau.is_finite() {
        return Err(Error::Undecidable);
    }
    let n = tau.normalized().to_string();
    Ok(match n.as_str() {
        "(1)" => vec![RecSymbol::D],
        "0(1)" => vec![RecSymbol::C],
        "10(1)" => vec![RecSymbol::A],
        "00(1)" => vec![RecSymbol::B],
        _ => Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub alphabet: [u32; 2],
    pub samples: usize,
    pub seed: u64,
    /// Upper end of `a + b` on the sampled domain.
    pub domain_smax: f64,
    /// Largest `|h(p) - h(p')|∞ / |p - p'|∞` over the sampled pairs.
    pub max_ratio: f64,
    /// Largest Jacobian sup-norm over a grid of the domain.
    pub max_jacobian: f64,
    pub contracting: bool,
}

/// Sample the contraction ratio of `h0`, `h1` on `E` (generalised to
/// `K ∩ {a + b <= s_max}`).
pub fn contraction_probe(
    params: AlphabetParams,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> ProbeReport {
    let smax = domain_smax(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = move || loop {
        let a: f64 = rng.gen_range(0.0..=0.5);
        let b: f64 = rng.gen_range(0.0..=0.5);
        if a + b <= smax {
            return (a, b);
        }
    };
    let pairs: Vec<((f64, f64), (f64, f64))> = (0..samples).map(|_| (point(), point())).collect();
    let max_ratio = par::max_indexed(exec, pairs.len(), |i| {
        let (p, q) = pairs[i];
        let dist = (p.0 - q.0).abs().max((p.1 - q.1).abs());
        if dist == 0.0 {
            return 0.0;
        }
        [TypeBit::Zero, TypeBit::One]
            .iter()
            .map(|&t| {
                let h = Homography::new(t, params);
                let x = h.eval(p.0, p.1);
                let y = h.eval(q.0, q.1);
                (x.0 - y.0).abs().max((x.1 - y.1).abs()) / dist
            })
            .fold(0.0, f64::max)
    });
    const GRID: usize = 201;
    let max_jacobian = par::max_indexed(exec, GRID * GRID, |k| {
        let a = 0.5 * (k / GRID) as f64 / (GRID - 1) as f64;
        let b = 0.5 * (k % GRID) as f64 / (GRID - 1) as f64;
        if a + b > smax {
            return f64::NEG_INFINITY;
        }
        Homography::new(TypeBit::Zero, params).jacobian_norm(a, b)
    });
    ProbeReport {
        alphabet: [params.alpha, params.beta],
        samples,
        seed,
        domain_smax: smax,
        max_ratio: max_ratio.max(0.0),
        max_jacobian,
        contracting: max_ratio < 1.0 && max_jacobian < 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronResult {
    pub point: FreqPoint,
    pub eigenvalue: f64,
    pub vector: [f64; 4],
    pub iterations: usize,
}

fn mat_mul(x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

/// Letter frequencies of the fixed points of `φ_{p0} ∘ … ∘ φ_{p_{k-1}}`
/// from the dominant eigenvector of its letter-count matrix.
///
/// Power iteration runs on `M + I`, which has the same eigenvectors and
/// no rival eigenvalue of equal modulus; a reducible `M` (e.g. `φ0` fixes
/// `A`) still converges to the dominant direction.
pub fn perron_oracle(period: &[TypeBit], params: AlphabetParams) -> Result<PerronResult> {
    if period.is_empty() {
        return Err(Error::Undecidable);
    }
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for &t in period {
        m = mat_mul(&m, &count_matrix(t, params));
    }
    let scale: f64 = m.iter().flatten().copied().fold(0.0, f64::max);
    let mut v = [0.25; 4];
    let mut iterations = 0;
    let mut growth = 0.0;
    for it in 1..=200_000 {
        let mut next = [0.0; 4];
        for i in 0..4 {
            next[i] = (0..4).map(|j| m[i][j] * v[j]).sum::<f64>() / scale + v[i] / scale;
        }
        let sum: f64 = next.iter().sum();
        growth = sum * scale;
        for x in next.iter_mut() {
            *x /= sum;
        }
        let change = (0..4).map(|i| (next[i] - v[i]).abs()).fold(0.0, f64::max);
        v = next;
        iterations = it;
        if change < 1e-16 {
            break;
        }
    }
    let eigenvalue = growth - 1.0;
    let point = FreqPoint {
        a: v[0],
        b: v[1],
        err: 1e-13,
    };
    if (v[0] + v[2] - 0.5).abs() > 1e-10 || (v[1] + v[3] - 0.5).abs() > 1e-10 {
        return Err(Error::NonConvergence {
            ratios: vec![v[0] + v[2], v[1] + v[3]],
        });
    }
    Ok(PerronResult {
        point,
        eigenvalue,
        vector: v,
        iterations,
    })
}

/// A pattern over either alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Rec(Vec<RecSymbol>),
    X(Vec<Symbol13>),
}

impl Pattern {
    /// Digits give a `{1,3}` pattern, letters a recoded one.
    pub fn parse(s: &str) -> Result<Pattern> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if s.chars().all(|c| c.is_ascii_digit()) {
            s.chars()
                .map(|c| {
                    Symbol13::from_char(c)
                        .ok_or_else(|| Error::Parse(format!("unexpected digit {c:?}")))
                })
                .collect::<Result<_>>()
                .map(Pattern::X)
        } else {
            crate::recoding::parse_letters(&s).map(Pattern::Rec)
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Pattern::Rec(w) => w.len(),
            Pattern::X(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reversed(&self) -> Pattern {
        match self {
            Pattern::Rec(w) => Pattern::Rec(w.iter().rev().copied().collect()),
            Pattern::X(w) => Pattern::X(w.iter().rev().copied().collect()),
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = match self {
            Pattern::Rec(w) => w.iter().map(|c| c.to_char()).collect(),
            Pattern::X(w) => w.iter().map(|c| c.to_char()).collect(),
        };
        f.write_str(&s)
    }
}

/// `ν_τ([w])` or `μ_τ([w])` depending on the alphabet of `w`.
pub fn pattern_freq(
    tau: &TypeSpec,
    w: &Pattern,
    tol: f64,
    params: AlphabetParams,
) -> Result<Estimate> {
    match w {
        Pattern::Rec(w) => pattern_freq_rec(tau, w, tol, params),
        Pattern::X(w) => {
            if !params.is_one_three() {
                return Err(Error::InvalidParams(
                    "digit patterns need the alphabet {1,3}".into(),
                ));
            }
            pattern_freq_x(tau, w, tol)
        }
    }
}

/// `φ_{τ0} ∘ … ∘ φ_{τ_{depth-1}}(D)` as a plain letter vector.
pub fn generated_letters(tau: &TypeSpec, depth: usize) -> Result<Vec<RecSymbol>> {
    let bits = tau.prefix(depth)?;
    let seed = PointedWord::new(0, vec![RecSymbol::D], Default::default())?;
    Ok(compose_phi(&bits, &seed, AlphabetParams::ONE_THREE).into_symbols())
}

/// Smallest depth at which the generated word (its expansion when
/// `expanded`) has at least `min_len` letters; capped at `max_depth`.
pub fn depth_for_length(
    tau: &TypeSpec,
    min_len: usize,
    expanded: bool,
    max_depth: usize,
) -> Result<usize> {
    // lengths follow the letter-count recursion, so no word is built here
    let params = AlphabetParams::ONE_THREE;
    for depth in 0..=max_depth {
        let bits = tau.prefix(depth)?;
        let mut counts = [0.0f64, 0.0, 0.0, 1.0];
        for &t in bits.iter().rev() {
            let m = count_matrix(t, params);
            let mut next = [0.0; 4];
            for (i, n) in next.iter_mut().enumerate() {
                *n = (0..4).map(|j| m[i][j] * counts[j]).sum();
            }
            counts = next;
        }
        let len = if expanded {
            counts[0] + counts[1] + 3.0 * (counts[2] + counts[3])
        } else {
            counts.iter().sum()
        };
        if len >= min_len as f64 {
            return Ok(depth);
        }
    }
    Ok(max_depth)
}

fn count_occurrences<T: PartialEq>(hay: &[T], w: &[T]) -> usize {
    if w.len() > hay.len() {
        return 0;
    }
    hay.windows(w.len()).filter(|x| *x == w).count()
}

/// Sliding-window frequency of `w` in the word generated from the first
/// `depth` bits of `τ` and the seed `D` (or in its expansion for digit
/// patterns).
pub fn empirical_freq(tau: &TypeSpec, w: &Pattern, depth: usize) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let y = generated_letters(tau, depth)?;
    Ok(match w {
        Pattern::Rec(p) => count_occurrences(&y, p) as f64 / y.len() as f64,
        Pattern::X(p) => {
            let x = expand_letters(&y);
            count_occurrences(&x, p) as f64 / x.len() as f64
        }
    })
}
