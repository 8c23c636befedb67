//! Rank-`n` approximations of the attractor `{(a(τ), b(τ))}` and of the
//! frequency set `F = {f_τ}`.
//!
//! The rank-`n` cell of a prefix `p` is `h_{p0} ∘ … ∘ h_{p_{n-1}}(K)`. Each
//! `h` is linear-fractional with a positive denominator on `K`, so a cell is
//! exactly the quadrilateral spanned by the images of the corners of `K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{compose_homographies, f_estimate, f_ones, solve_ab, DEFAULT_TOL, K_CORNERS};
use crate::par::{self, Exec};
use crate::typesub::{bits_to_string, parse_bits, AlphabetParams, TypeBit, TypeSpec};

/// Default cap on the number of enumerated cells.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// Sup-norm diameter of `E`.
pub const DIAM_E: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct FractalCell {
    pub prefix: Vec<TypeBit>,
    /// Images of `(0,0), (1/2,0), (1/2,1/2), (0,1/2)`.
    pub corners: [(f64, f64); 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FreqInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl FractalCell {
    pub fn of_prefix(prefix: &[TypeBit], params: AlphabetParams) -> Self {
        let corners = K_CORNERS.map(|(a, b)| compose_homographies(prefix, params, a, b));
        FractalCell {
            prefix: prefix.to_vec(),
            corners,
        }
    }

    pub fn rank(&self) -> usize {
        self.prefix.len()
    }

    /// Largest sup-norm distance between two corners.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                let (p, q) = (self.corners[i], self.corners[j]);
                d = d.max((p.0 - q.0).abs().max((p.1 - q.1).abs()));
            }
        }
        d
    }

    /// Whether `p` lies in the (convex) quadrilateral, up to `tol`.
    pub fn contains(&self, p: (f64, f64), tol: f64) -> bool {
        let mut sign = 0.0f64;
        for i in 0..4 {
            let (a, b) = (self.corners[i], self.corners[(i + 1) % 4]);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let len = ex.abs().max(ey.abs());
            if len == 0.0 {
                continue;
            }
            let cross = (ex * (p.1 - a.1) - ey * (p.0 - a.0)) / len;
            if cross.abs() <= tol {
                continue;
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
        let (x0, x1, y0, y1) = self.bbox();
        p.0 >= x0 - tol && p.0 <= x1 + tol && p.1 >= y0 - tol && p.1 <= y1 + tol
    }

    fn bbox(&self) -> (f64, f64, f64, f64) {
        let xs = self.corners.map(|c| c.0);
        let ys = self.corners.map(|c| c.1);
        let min = |v: [f64; 4]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: [f64; 4]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min(xs), max(xs), min(ys), max(ys))
    }

    /// Distance from the images of the edge midpoints of `K` to the
    /// corresponding image edges; zero up to rounding since lines map to lines.
    pub fn edge_midpoint_deviation(&self, params: AlphabetParams) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            let (p, q) = (K_CORNERS[i], K_CORNERS[(i + 1) % 4]);
            let m = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
            let img = compose_homographies(&self.prefix, params, m.0, m.1);
            let (a, b) = (self.corners[i], self.corners[(i + 1) % 4]);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let len = (ex * ex + ey * ey).sqrt();
            let dev = if len == 0.0 {
                ((img.0 - a.0).powi(2) + (img.1 - a.1).powi(2)).sqrt()
            } else {
                (ex * (img.1 - a.1) - ey * (img.0 - a.0)).abs() / len
            };
            worst = worst.max(dev);
        }
        worst
    }
}

fn check_budget(n: usize, budget: u64) -> Result<()> {
    if n >= 64 || (1u64 << n) > budget {
        return Err(Error::BudgetExceeded {
            rank: n as u32,
            budget,
        });
    }
    Ok(())
}

fn prefix_of(index: usize, n: usize) -> Vec<TypeBit> {
    (0..n)
        .map(|k| {
            if (index >> (n - 1 - k)) & 1 == 1 {
                TypeBit::One
            } else {
                TypeBit::Zero
            }
        })
        .collect()
}

/// All `2^n` cells of rank `n`, in lexicographic prefix order.
pub fn enumerate_cells(
    n: usize,
    params: AlphabetParams,
    exec: Exec,
    budget: u64,
) -> Result<Vec<FractalCell>> {
    check_budget(n, budget)?;
    Ok(par::map_indexed(exec, 1usize << n, |i| {
        FractalCell::of_prefix(&prefix_of(i, n), params)
    }))
}

/// `[min f, max f]` over the corners of the cell. `f` is linear-fractional,
/// so it is monotone along segments and peaks at corners.
pub fn project_to_f(cell: &FractalCell, params: AlphabetParams) -> FreqInterval {
    let vals = cell.corners.map(|(a, b)| f_ones(params, a, b));
    FreqInterval {
        lo: vals.iter().copied().fold(f64::INFINITY, f64::min),
        hi: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupDomain {
    /// `F ∩ [0, 1/2]`
    Half,
    /// all of `F`
    Full,
}

impl SupDomain {
    pub fn upper_end(self) -> f64 {
        match self {
            SupDomain::Half => 0.5,
            SupDomain::Full => 1.0,
        }
    }
}

impl std::str::FromStr for SupDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "half" | "[0,1/2]" | "0.5" => Ok(SupDomain::Half),
            "full" | "[0,1]" | "1" => Ok(SupDomain::Full),
            other => Err(Error::Parse(format!(
                "unknown domain {other:?}, expected half or full"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupBracket {
    pub rank: usize,
    pub domain_hi: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SupBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn brackets(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Bracket `sup (F ∩ domain)` at rank `n`.
///
/// `lower` is the best value of `f` at the attractor points of `p·0^∞` and
/// `p·1^∞` that falls in the domain, so it is an element of `F`. `upper`
/// is the largest interval top (capped at the domain end) over cells whose
/// interval meets the domain; `F` is covered by these intervals.
pub fn sup_estimate(
    n: usize,
    domain: SupDomain,
    params: AlphabetParams,
    exec: Exec,
    budget: u64,
) -> Result<SupBracket> {
    check_budget(n, budget)?;
    let top = domain.upper_end();
    let cells = enumerate_cells(n, params, exec, budget)?;
    let per_cell: Vec<Result<(f64, f64)>> = par::map(exec, &cells, |cell| {
        let iv = project_to_f(cell, params);
        let upper = if iv.lo <= top {
            iv.hi.min(top)
        } else {
            f64::NEG_INFINITY
        };
        let mut lower = f64::NEG_INFINITY;
        for tail in [TypeBit::Zero, TypeBit::One] {
            let tau = TypeSpec::new(cell.prefix.clone(), vec![tail]);
            let p = solve_ab(&tau, DEFAULT_TOL, params)?;
            let f = f_estimate(params, &p);
            if f.value + f.err <= top {
                lower = lower.max(f.value - f.err);
            }
        }
        Ok((lower, upper))
    });
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for r in per_cell {
        let (lo, up) = r?;
        lower = lower.max(lo);
        upper = upper.max(up);
    }
    Ok(SupBracket {
        rank: n,
        domain_hi: top,
        lower,
        upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Svg,
    Json,
}

pub const CSV_HEADER: &str = "prefix,ax,ay,bx,by,cx,cy,dx,dy,f_lo,f_hi";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub prefix: String,
    pub corners: [[f64; 2]; 4],
    pub f_lo: f64,
    pub f_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellsJson {
    pub rank: usize,
    pub alphabet: [u32; 2],
    pub cells: Vec<CellJson>,
}

pub fn cells_to_json(cells: &[FractalCell], params: AlphabetParams) -> CellsJson {
    CellsJson {
        rank: cells.first().map_or(0, |c| c.rank()),
        alphabet: [params.alpha, params.beta],
        cells: cells
            .iter()
            .map(|c| {
                let iv = project_to_f(c, params);
                CellJson {
                    prefix: bits_to_string(&c.prefix),
                    corners: c.corners.map(|(x, y)| [x, y]),
                    f_lo: iv.lo,
                    f_hi: iv.hi,
                }
            })
            .collect(),
    }
}

pub fn cells_from_json(doc: &CellsJson) -> Result<Vec<FractalCell>> {
    doc.cells
        .iter()
        .map(|c| {
            Ok(FractalCell {
                prefix: parse_bits(&c.prefix)?,
                corners: c.corners.map(|[x, y]| (x, y)),
            })
        })
        .collect()
}

/// Serialise cells. Output depends only on the cells and the format.
pub fn emit(cells: &[FractalCell], params: AlphabetParams, fmt: EmitFormat) -> String {
    match fmt {
        EmitFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for c in cells {
                let iv = project_to_f(c, params);
                let mut row = vec![bits_to_string(&c.prefix)];
                for (x, y) in c.corners {
                    row.push(x.to_string());
                    row.push(y.to_string());
                }
                row.push(iv.lo.to_string());
                row.push(iv.hi.to_string());
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        EmitFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&cells_to_json(cells, params)).expect("serialisable");
            s.push('\n');
            s
        }
        EmitFormat::Svg => svg(cells, params),
    }
}

fn svg(cells: &[FractalCell], params: AlphabetParams) -> String {
    let mut out = String::new();
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 0.5 0.5\" width=\"800\" height=\"800\">\n");
    // b grows upwards, as in the usual (a, b) plot
    out.push_str(
        "<g transform=\"matrix(1 0 0 -1 0 0.5)\" stroke=\"black\" stroke-width=\"0.0005\">\n",
    );
    out.push_str("<polygon points=\"0,0 0.5,0 0.5,0.5 0,0.5\" fill=\"none\" stroke=\"#999\"/>\n");
    for c in cells {
        let iv = project_to_f(c, params);
        let shade = (255.0 * (1.0 - (iv.lo + iv.hi) / 2.0))
            .round()
            .clamp(0.0, 255.0) as u8;
        let pts: Vec<String> = c.corners.iter().map(|(x, y)| format!("{x},{y}")).collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"rgb({shade},{shade},255)\"><title>{}</title></polygon>\n",
            pts.join(" "),
            bits_to_string(&c.prefix)
        ));
    }
    out.push_str("</g>\n</svg>\n");
    out
}
