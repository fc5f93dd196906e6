//! Coefficient triangles built bottom-up from linear recurrences.
//!
//! Every step produces an integer right-hand side that must be an exact
//! multiple of the left factor (`n` for the involution triangles, the set
//! size for the fixed-point-free ones). Division is checked; a nonzero
//! remainder is reported as [`Error::DivisibilityViolation`] and never
//! rounded away.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polyseq::{at, BigCoeff, DescentRow, Family, GammaFamily, GammaRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriangleKind {
    /// `I_{n,k}`: descents over involutions of `[n]`.
    I,
    /// `J_{n,k}`: descents over fixed-point-free involutions, even `n`.
    J,
    /// `a_{n,k}`: gamma coefficients of `I_n`.
    A,
    /// `b_{n,k}`: gamma coefficients of `J_n`, even `n`.
    B,
}

impl TriangleKind {
    pub const ALL: [TriangleKind; 4] = [TriangleKind::I, TriangleKind::J, TriangleKind::A, TriangleKind::B];

    pub fn symbol(self) -> &'static str {
        match self {
            TriangleKind::I => "I",
            TriangleKind::J => "J",
            TriangleKind::A => "a",
            TriangleKind::B => "b",
        }
    }

    pub fn even_only(self) -> bool {
        matches!(self, TriangleKind::J | TriangleKind::B)
    }

    pub fn is_valid_index(self, n: usize) -> bool {
        n >= 1 && (!self.even_only() || n.is_multiple_of(2))
    }

    /// Distance between consecutive valid indices.
    fn stride(self) -> usize {
        if self.even_only() {
            2
        } else {
            1
        }
    }

    /// Largest base-case index; rows above it come from the recurrence.
    fn last_base(self) -> usize {
        2
    }

    /// Smallest `k` stored in a row.
    pub fn first_k(self) -> usize {
        match self {
            TriangleKind::B => 1,
            _ => 0,
        }
    }

    /// Number of entries in row `n`.
    pub fn row_len(self, n: usize) -> usize {
        match self {
            TriangleKind::I | TriangleKind::J => n,
            TriangleKind::A => GammaFamily::A.row_len(n),
            TriangleKind::B => GammaFamily::B.row_len(n),
        }
    }

    fn default_base(self) -> BTreeMap<usize, Vec<BigCoeff>> {
        let one = || BigInt::one();
        let mut base = BTreeMap::new();
        match self {
            TriangleKind::I => {
                base.insert(1, vec![one()]);
                base.insert(2, vec![one(), one()]);
            }
            TriangleKind::J => {
                base.insert(2, vec![BigInt::zero(), one()]);
            }
            TriangleKind::A => {
                base.insert(1, vec![one()]);
                base.insert(2, vec![one()]);
            }
            TriangleKind::B => {
                base.insert(2, vec![one()]);
            }
        }
        base
    }

    fn odd_index(self, n: usize) -> Error {
        Error::OddIndex { what: self.symbol(), n }
    }

    fn check_index(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::IndexOutOfRange(format!("{}: n must be >= 1", self.symbol())));
        }
        if self.even_only() && n % 2 == 1 {
            return Err(self.odd_index(n));
        }
        Ok(())
    }
}

impl fmt::Display for TriangleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `c * xs[k]`, zero when `k` is outside the row.
fn term(xs: &[BigCoeff], k: i64, c: i64) -> BigCoeff {
    match at(xs, k) {
        Some(x) if c != 0 && !x.is_zero() => x * c,
        _ => BigInt::zero(),
    }
}

fn divide_exact(what: &'static str, n: usize, k: i64, rhs: BigCoeff, divisor: i64) -> Result<BigCoeff> {
    let (q, r) = rhs.div_rem(&BigInt::from(divisor));
    if !r.is_zero() {
        return Err(Error::DivisibilityViolation {
            what,
            n,
            k,
            rhs: rhs.to_string(),
            divisor,
        });
    }
    Ok(q)
}

/// Right-hand sides of the recurrence for row `n` together with the left
/// factor they must be divisible by. `prev` is row `n - stride`, `prev2` is
/// row `n - 2` (only used by the two-step I and A recurrences).
fn right_hand_sides(
    kind: TriangleKind,
    n: usize,
    prev: &[BigCoeff],
    prev2: &[BigCoeff],
) -> (i64, Vec<(i64, BigCoeff)>) {
    let ni = n as i64;
    match kind {
        TriangleKind::I => {
            let rhs = (0..ni)
                .map(|k| {
                    let v = term(prev, k, k + 1)
                        + term(prev, k - 1, ni - k)
                        + term(prev2, k, (k + 1) * (k + 1) + ni - 2)
                        + term(prev2, k - 1, 2 * k * (ni - k - 1) - ni + 3)
                        + term(prev2, k - 2, (ni - k) * (ni - k) + ni - 2);
                    (k, v)
                })
                .collect();
            (ni, rhs)
        }
        TriangleKind::J => {
            // m is the half-size, row n = 2m is built from row 2m - 2
            let m = ni / 2;
            let rhs = (0..ni)
                .map(|k| {
                    let v = term(prev, k, k * (k + 1) + 2 * m - 2)
                        + term(prev, k - 1, 2 * ((k - 1) * (2 * m - k - 1) + 1))
                        + term(prev, k - 2, (2 * m - k) * (2 * m - k + 1) + 2 * m - 2);
                    (k, v)
                })
                .collect();
            (2 * m, rhs)
        }
        TriangleKind::A => {
            let len = kind.row_len(n) as i64;
            let rhs = (0..len)
                .map(|k| {
                    let v = term(prev, k, k + 1)
                        + term(prev, k - 1, 2 * ni - 4 * k)
                        + term(prev2, k, k * (k + 2) + ni - 1)
                        + term(prev2, k - 1, (k - 1) * (4 * ni - 8 * k - 14) + 2 * ni - 8)
                        + term(prev2, k - 2, 4 * (ni - 2 * k) * (ni - 2 * k + 1));
                    (k, v)
                })
                .collect();
            (ni, rhs)
        }
        TriangleKind::B => {
            // stored index i holds k = i + 1
            let m = ni / 2;
            let rhs = (1..=m)
                .map(|k| {
                    let v = term(prev, k - 1, k * (k + 1) + 2 * m - 2)
                        + term(prev, k - 2, 2 + 2 * (k - 1) * (4 * m - 4 * k - 3))
                        + term(prev, k - 3, 8 * (m - k + 1) * (2 * m - 2 * k + 1));
                    (k, v)
                })
                .collect();
            (2 * m, rhs)
        }
    }
}

/// Memoized triangle of one kind. Rows exist for every valid index up to
/// [`TriangleCache::max_n`], and each was produced by a checked recurrence
/// step (or is a base case).
#[derive(Debug, Clone)]
pub struct TriangleCache {
    kind: TriangleKind,
    rows: BTreeMap<usize, Vec<BigCoeff>>,
    max_n: usize,
}

impl TriangleCache {
    pub fn new(kind: TriangleKind) -> Self {
        Self::from_base(kind, kind.default_base())
    }

    fn from_base(kind: TriangleKind, rows: BTreeMap<usize, Vec<BigCoeff>>) -> Self {
        let max_n = rows.keys().next_back().copied().unwrap_or(0);
        TriangleCache { kind, rows, max_n }
    }

    /// A cache whose base cases are replaced. Only useful for fault injection:
    /// every row derived from a corrupted base is wrong.
    pub fn with_base(kind: TriangleKind, base: BTreeMap<usize, Vec<BigCoeff>>) -> Result<Self> {
        let expected: Vec<usize> = kind.default_base().into_keys().collect();
        let given: Vec<usize> = base.keys().copied().collect();
        if expected != given {
            return Err(Error::MalformedRow(format!(
                "{kind}: base rows must be exactly {expected:?}, got {given:?}"
            )));
        }
        for (&n, row) in &base {
            if row.len() != kind.row_len(n) {
                return Err(Error::MalformedRow(format!("{kind}_{n}: wrong base row length")));
            }
        }
        Ok(Self::from_base(kind, base))
    }

    pub fn kind(&self) -> TriangleKind {
        self.kind
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn compute_row(&self, n: usize) -> Result<Vec<BigCoeff>> {
        let stride = self.kind.stride();
        let prev = &self.rows[&(n - stride)];
        let empty = Vec::new();
        let prev2 = if stride == 1 { &self.rows[&(n - 2)] } else { &empty };
        let (divisor, rhs) = right_hand_sides(self.kind, n, prev, prev2);
        rhs.into_iter()
            .map(|(k, v)| divide_exact(self.kind.symbol(), n, k, v, divisor))
            .collect()
    }

    /// Builds every missing row up to `n` (rounded down to a valid index).
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        let stride = self.kind.stride();
        let mut next = self.max_n + stride;
        while next <= n {
            let row = self.compute_row(next)?;
            self.rows.insert(next, row);
            self.max_n = next;
            next += stride;
        }
        Ok(())
    }

    /// Row `n` if it has already been built.
    pub fn get(&self, n: usize) -> Option<&[BigCoeff]> {
        self.rows.get(&n).map(Vec::as_slice)
    }

    /// Row `n`, building it and its predecessors on demand.
    pub fn row(&mut self, n: usize) -> Result<&[BigCoeff]> {
        self.kind.check_index(n)?;
        self.extend_to(n)?;
        Ok(&self.rows[&n])
    }

    /// Valid indices with stored rows, ascending.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[BigCoeff])> {
        self.rows.iter().map(|(&n, r)| (n, r.as_slice()))
    }

    pub fn descent_row(&mut self, n: usize) -> Result<DescentRow> {
        let family = match self.kind {
            TriangleKind::I => Family::Involution,
            TriangleKind::J => Family::FixedPointFree,
            k => {
                return Err(Error::MalformedRow(format!("{k} is a gamma triangle, not a descent triangle")));
            }
        };
        let coeffs = self.row(n)?.to_vec();
        DescentRow::new(family, coeffs)
    }

    pub fn gamma_row(&mut self, n: usize) -> Result<GammaRow> {
        let family = match self.kind {
            TriangleKind::A => GammaFamily::A,
            TriangleKind::B => GammaFamily::B,
            k => {
                return Err(Error::MalformedRow(format!("{k} is a descent triangle, not a gamma triangle")));
            }
        };
        let gammas = self.row(n)?.to_vec();
        GammaRow::new(family, n, gammas)
    }

    /// Seeds a cache from previously stored rows.
    ///
    /// Base rows must equal the built-in ones, and every later row is
    /// accepted only if `divisor * row[k]` equals the recurrence right-hand
    /// side computed from the stored predecessors, for every `k`. The checks
    /// are independent per row and run in parallel. Rows are accepted up to
    /// the first gap or failure; returns the cache and the number of stored
    /// rows that were accepted (base rows included).
    pub fn from_stored_rows(kind: TriangleKind, stored: BTreeMap<usize, Vec<BigCoeff>>) -> (Self, usize) {
        let base = kind.default_base();
        let mut cache = Self::from_base(kind, base.clone());
        if base.iter().any(|(n, row)| stored.get(n) != Some(row)) {
            return (cache, 0);
        }
        let stride = kind.stride();
        let mut contiguous = Vec::new();
        let mut n = kind.last_base() + stride;
        while let Some(row) = stored.get(&n) {
            contiguous.push(n);
            if row.len() != kind.row_len(n) {
                break;
            }
            n += stride;
        }
        let valid: Vec<bool> = contiguous
            .par_iter()
            .map(|&n| {
                let row = &stored[&n];
                if row.len() != kind.row_len(n) {
                    return false;
                }
                let prev = &stored[&(n - stride)];
                let prev2 = if stride == 1 { stored[&(n - 2)].as_slice() } else { &[] };
                let (divisor, rhs) = right_hand_sides(kind, n, prev, prev2);
                let first_k = kind.first_k() as i64;
                rhs.iter().all(|(k, v)| {
                    let stored_k = &row[(k - first_k) as usize];
                    &(stored_k * divisor) == v
                })
            })
            .collect();
        let mut accepted = base.len();
        for (&n, ok) in contiguous.iter().zip(valid) {
            if !ok {
                break;
            }
            cache.rows.insert(n, stored[&n].clone());
            cache.max_n = n;
            accepted += 1;
        }
        (cache, accepted)
    }
}

/// `I_n(t)` for `n >= 1`.
pub fn i_row(n: usize) -> Result<DescentRow> {
    TriangleCache::new(TriangleKind::I).descent_row(n)
}

/// `J_n(t)` for even `n >= 2`. Odd sizes are rejected; use
/// [`DescentRow::zero_fixed_point_free`] for the (all-zero) odd rows.
pub fn j_row(n: usize) -> Result<DescentRow> {
    TriangleCache::new(TriangleKind::J).descent_row(n)
}

/// `a_{n,k}` for `n >= 1`.
pub fn a_row(n: usize) -> Result<GammaRow> {
    TriangleCache::new(TriangleKind::A).gamma_row(n)
}

/// `b_{n,k}` for even `n >= 2`.
pub fn b_row(n: usize) -> Result<GammaRow> {
    TriangleCache::new(TriangleKind::B).gamma_row(n)
}
