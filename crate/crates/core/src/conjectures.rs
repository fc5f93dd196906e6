//! Exhaustive scans of the proved and conjectured properties, and the
//! multi-route verification harness.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::closed_forms::{a_explicit_row, b_explicit_row, i_closed_row, j_closed_row};
use crate::error::{Error, Result};
use crate::oracle::{fixed_point_free_count, involution_count, Oracle};
use crate::polyseq::{gamma_expand, log_concavity_defects, BigCoeff, DescentRow, Family, GammaFamily};
use crate::recurrences::{TriangleCache, TriangleKind};
use crate::report::{fmt_values, Mismatch, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    UnimodalI,
    UnimodalJ,
    /// Brenti's log-concavity conjecture for `I_{n,k}`.
    LogConcaveI,
    GammaNonnegA,
    GammaNonnegB,
    /// Only the central `a_{n,(n-1)/2}`, plus the alternating-sum identities.
    BoundaryA,
    /// Only the central `b_{n,n/2}`.
    BoundaryB,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::UnimodalI,
        Property::UnimodalJ,
        Property::LogConcaveI,
        Property::GammaNonnegA,
        Property::GammaNonnegB,
        Property::BoundaryA,
        Property::BoundaryB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::UnimodalI => "unimodal-i",
            Property::UnimodalJ => "unimodal-j",
            Property::LogConcaveI => "log-concave-i",
            Property::GammaNonnegA => "gamma-a",
            Property::GammaNonnegB => "gamma-b",
            Property::BoundaryA => "boundary-a",
            Property::BoundaryB => "boundary-b",
        }
    }

    /// Whether the property lives on even sizes only.
    pub fn even_only(self) -> bool {
        matches!(self, Property::UnimodalJ | Property::GammaNonnegB | Property::BoundaryB)
    }

    /// Smallest meaningful index.
    pub fn first_index(self) -> usize {
        if self.even_only() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Property::ALL.iter().map(|p| p.name()).collect();
                format!("unknown property {s:?}, expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    AllHold,
    Counterexamples,
}

fn as_decimal<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A violation at `(n, k)`. For unimodality `value` is the coefficient that
/// rises again; for log-concavity it is the deficit `c_k^2 - c_{k-1} c_{k+1}`;
/// for gamma properties it is the negative coefficient itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "as_decimal")]
    pub value: BigCoeff,
    /// Below the conjectured threshold, hence expected.
    pub pre_threshold: bool,
}

/// The central gamma coefficient disagreed with its alternating-sum formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub n: usize,
    pub recurrence: String,
    pub alternating_sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub property: Property,
    pub range: (usize, usize),
    pub indices_checked: usize,
    pub status: ScanStatus,
    pub witnesses: Vec<Witness>,
    pub identity_mismatches: Vec<IdentityMismatch>,
}

impl ScanResult {
    pub fn all_hold(&self) -> bool {
        self.status == ScanStatus::AllHold
    }

    /// Witnesses at or above the threshold.
    pub fn unexpected_witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| !w.pre_threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Half-size from which `b_{2n,k} >= 0` is conjectured (`n >= 9`).
    pub b_threshold_half: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { b_threshold_half: 9 }
    }
}

/// Default upper index for recurrence-backed scans.
pub const DEFAULT_SCAN_MAX: usize = 500;

/// Scans `property` over every admissible index in `[n_lo, n_hi]`.
pub fn scan(property: Property, n_lo: usize, n_hi: usize) -> Result<ScanResult> {
    scan_with(property, n_lo, n_hi, &ScanOptions::default())
}

pub fn boundary_check(family: GammaFamily, n_lo: usize, n_hi: usize) -> Result<ScanResult> {
    let property = match family {
        GammaFamily::A => Property::BoundaryA,
        GammaFamily::B => Property::BoundaryB,
    };
    scan(property, n_lo, n_hi)
}

fn built(kind: TriangleKind, n_hi: usize) -> Result<TriangleCache> {
    let mut c = TriangleCache::new(kind);
    c.extend_to(n_hi)?;
    Ok(c)
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(-1)^m I_{2m+1}(-1)` for odd `n`, `(-1)^m I'_{2m+2}(-1)` for even `n`.
pub fn central_a_by_alternating_sum(i_row: &DescentRow) -> BigCoeff {
    let n = i_row.n();
    if n % 2 == 1 {
        i_row.evaluate(-1) * sign((n - 1) / 2)
    } else {
        i_row.evaluate_derivative(-1) * sign((n - 2) / 2)
    }
}

pub fn scan_with(property: Property, n_lo: usize, n_hi: usize, opts: &ScanOptions) -> Result<ScanResult> {
    if n_lo > n_hi {
        return Err(Error::IndexOutOfRange(format!("empty scan range [{n_lo}, {n_hi}]")));
    }
    let indices: Vec<usize> = (n_lo.max(property.first_index())..=n_hi)
        .filter(|n| !property.even_only() || n % 2 == 0)
        .collect();

    let needs = |kinds: &[TriangleKind]| -> Result<Vec<TriangleCache>> {
        kinds.iter().map(|&k| built(k, n_hi)).collect()
    };
    let b_threshold = 2 * opts.b_threshold_half;

    let per_index: Vec<(Vec<Witness>, Option<IdentityMismatch>)> = match property {
        Property::UnimodalI | Property::UnimodalJ => {
            let kind = if property == Property::UnimodalI { TriangleKind::I } else { TriangleKind::J };
            let cache = &needs(&[kind])?[0];
            let family = if kind == TriangleKind::I { Family::Involution } else { Family::FixedPointFree };
            indices
                .par_iter()
                .map(|&n| {
                    let row = DescentRow::new(family, cache.get(n).expect("built").to_vec())?;
                    let w = row.unimodality_break().map(|k| Witness {
                        n,
                        k,
                        value: row.coeffs()[k].clone(),
                        pre_threshold: false,
                    });
                    Ok((w.into_iter().collect(), None))
                })
                .collect::<Result<_>>()?
        }
        Property::LogConcaveI => {
            let cache = &needs(&[TriangleKind::I])?[0];
            indices
                .par_iter()
                .map(|&n| {
                    let w = log_concavity_defects(cache.get(n).expect("built"))
                        .into_iter()
                        .map(|(k, value)| Witness { n, k, value, pre_threshold: false })
                        .collect();
                    (w, None)
                })
                .collect()
        }
        Property::GammaNonnegA | Property::GammaNonnegB => {
            let is_a = property == Property::GammaNonnegA;
            let kind = if is_a { TriangleKind::A } else { TriangleKind::B };
            let cache = &needs(&[kind])?[0];
            let first_k = kind.first_k();
            indices
                .par_iter()
                .map(|&n| {
                    let w = cache
                        .get(n)
                        .expect("built")
                        .iter()
                        .enumerate()
                        .filter(|(_, g)| g.is_negative())
                        .map(|(i, g)| Witness {
                            n,
                            k: i + first_k,
                            value: g.clone(),
                            pre_threshold: !is_a && n < b_threshold,
                        })
                        .collect();
                    (w, None)
                })
                .collect()
        }
        Property::BoundaryA => {
            let caches = needs(&[TriangleKind::I, TriangleKind::A])?;
            let (i_cache, a_cache) = (&caches[0], &caches[1]);
            indices
                .par_iter()
                .map(|&n| {
                    let i_row = DescentRow::new(Family::Involution, i_cache.get(n).expect("built").to_vec())?;
                    let a = a_cache.get(n).expect("built");
                    let k = a.len() - 1;
                    let central = &a[k];
                    let alt = central_a_by_alternating_sum(&i_row);
                    let mismatch = (&alt != central).then(|| IdentityMismatch {
                        n,
                        recurrence: central.to_string(),
                        alternating_sum: alt.to_string(),
                    });
                    let w = central
                        .is_negative()
                        .then(|| Witness { n, k, value: central.clone(), pre_threshold: false });
                    Ok((w.into_iter().collect(), mismatch))
                })
                .collect::<Result<_>>()?
        }
        Property::BoundaryB => {
            let cache = &needs(&[TriangleKind::B])?[0];
            indices
                .par_iter()
                .map(|&n| {
                    let central = cache.get(n).expect("built").last().expect("nonempty");
                    let w = central.is_negative().then(|| Witness {
                        n,
                        k: n / 2,
                        value: central.clone(),
                        pre_threshold: n < b_threshold,
                    });
                    (w.into_iter().collect(), None)
                })
                .collect()
        }
    };

    let mut witnesses = Vec::new();
    let mut identity_mismatches = Vec::new();
    for (w, m) in per_index {
        witnesses.extend(w);
        identity_mismatches.extend(m);
    }
    let status = if witnesses.is_empty() { ScanStatus::AllHold } else { ScanStatus::Counterexamples };
    Ok(ScanResult {
        property,
        range: (n_lo, n_hi),
        indices_checked: indices.len(),
        status,
        witnesses,
        identity_mismatches,
    })
}

fn row_mismatch(n: usize, rows: &[(&str, &[BigCoeff])]) -> Option<Mismatch> {
    let (_, reference) = rows[0];
    for &(_, other) in &rows[1..] {
        if other != reference {
            let len = reference.len().max(other.len());
            let k = (0..len).find(|&k| reference.get(k) != other.get(k)).unwrap_or(0);
            return Some(Mismatch {
                n: n as i64,
                k: Some(k as i64),
                detail: "rows differ".into(),
                values: rows.iter().map(|(l, r)| (l.to_string(), fmt_values(r))).collect(),
            });
        }
    }
    None
}

fn error_mismatch(n: usize, method: &str, e: &Error) -> Mismatch {
    Mismatch {
        n: n as i64,
        k: None,
        detail: format!("{method} failed: {e}"),
        values: Vec::new(),
    }
}

/// Three-way equivalence of recurrence, closed form and enumeration for the
/// descent rows of both families.
#[derive(Debug, Clone)]
pub struct CrossVerify {
    pub recurrence_max: usize,
    pub oracle_max: usize,
    pub parallel: bool,
    pub i_cache: TriangleCache,
    pub j_cache: TriangleCache,
}

impl CrossVerify {
    pub fn new(recurrence_max: usize, oracle_max: usize) -> Self {
        CrossVerify {
            recurrence_max,
            oracle_max,
            parallel: false,
            i_cache: TriangleCache::new(TriangleKind::I),
            j_cache: TriangleCache::new(TriangleKind::J),
        }
    }

    pub fn run(mut self) -> VerificationReport {
        let top = self.recurrence_max.max(self.oracle_max);
        let mut report = VerificationReport::new(
            "descent rows",
            &["recurrence", "closed form", "enumeration"],
            (1, top as i64),
        );
        let oracle = Oracle {
            max_involution: self.oracle_max,
            max_fixed_point_free: self.oracle_max,
            parallel: self.parallel,
        };
        for n in 1..=top {
            // involutions
            let rec = match self.i_cache.row(n) {
                Ok(r) => r.to_vec(),
                Err(e) => {
                    report.fail(error_mismatch(n, "I recurrence", &e));
                    return report;
                }
            };
            let closed = i_closed_row(n).expect("n >= 1").into_coeffs();
            let mut rows: Vec<(&str, Vec<BigCoeff>)> = vec![("I recurrence", rec), ("I closed form", closed)];
            if n <= self.oracle_max {
                rows.push(("I enumeration", oracle.row(n, Family::Involution).expect("within bound").into_coeffs()));
            }
            report.comparisons += rows.len() as u64 - 1;
            let view: Vec<(&str, &[BigCoeff])> = rows.iter().map(|(l, r)| (*l, r.as_slice())).collect();
            if let Some(m) = row_mismatch(n, &view) {
                report.fail(m);
                return report;
            }

            // fixed-point-free
            let mut rows: Vec<(&str, Vec<BigCoeff>)> = if n % 2 == 0 {
                let rec = match self.j_cache.row(n) {
                    Ok(r) => r.to_vec(),
                    Err(e) => {
                        report.fail(error_mismatch(n, "J recurrence", &e));
                        return report;
                    }
                };
                vec![("J recurrence", rec), ("J closed form", j_closed_row(n).expect("even").into_coeffs())]
            } else {
                vec![("J zero row", DescentRow::zero_fixed_point_free(n).into_coeffs())]
            };
            if n <= self.oracle_max {
                rows.push((
                    "J enumeration",
                    oracle.row(n, Family::FixedPointFree).expect("within bound").into_coeffs(),
                ));
            }
            report.comparisons += rows.len() as u64 - 1;
            let view: Vec<(&str, &[BigCoeff])> = rows.iter().map(|(l, r)| (*l, r.as_slice())).collect();
            if let Some(m) = row_mismatch(n, &view) {
                report.fail(m);
                return report;
            }
        }
        report
    }
}

pub fn cross_verify(n_max_recurrence: usize, n_max_oracle: usize) -> VerificationReport {
    CrossVerify::new(n_max_recurrence, n_max_oracle).run()
}

fn gamma_triple(
    n: usize,
    family: GammaFamily,
    rec: &[BigCoeff],
    descent: &DescentRow,
) -> std::result::Result<(), Mismatch> {
    let explicit = match family {
        GammaFamily::A => a_explicit_row(descent),
        GammaFamily::B => b_explicit_row(descent),
    }
    .map_err(|e| error_mismatch(n, "explicit formula", &e))?;
    let peeled = gamma_expand(descent).map_err(|e| error_mismatch(n, "gamma expansion", &e))?;
    let rows = [
        ("recurrence", rec),
        ("explicit formula", explicit.gammas()),
        ("gamma expansion", peeled.gammas()),
    ];
    match row_mismatch(n, &rows) {
        Some(mut m) => {
            // report k in the family's own indexing
            m.k = m.k.map(|k| k + family.first_k() as i64);
            Err(m)
        }
        None => Ok(()),
    }
}

/// `a_{n,k}` (and `b_{n,k}` on even `n`) three ways: their own recurrence,
/// the explicit alternating sum, and peeling the descent row.
pub fn verify_gamma(n_max: usize) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "gamma coefficients",
        &["recurrence", "explicit formula", "gamma expansion"],
        (1, n_max as i64),
    );
    let i = built(TriangleKind::I, n_max)?;
    let j = built(TriangleKind::J, n_max)?;
    let a = built(TriangleKind::A, n_max)?;
    let b = built(TriangleKind::B, n_max)?;
    let outcomes: Vec<Result<(u64, Option<Mismatch>)>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut comparisons = 2;
            let irow = DescentRow::new(Family::Involution, i.get(n).expect("built").to_vec())?;
            if let Err(m) = gamma_triple(n, GammaFamily::A, a.get(n).expect("built"), &irow) {
                return Ok((comparisons, Some(m)));
            }
            if n % 2 == 0 {
                comparisons += 2;
                let jrow = DescentRow::new(Family::FixedPointFree, j.get(n).expect("built").to_vec())?;
                if let Err(m) = gamma_triple(n, GammaFamily::B, b.get(n).expect("built"), &jrow) {
                    return Ok((comparisons, Some(m)));
                }
            }
            Ok((comparisons, None))
        })
        .collect();
    for outcome in outcomes {
        let (c, m) = outcome?;
        report.comparisons += c;
        if let Some(m) = m {
            report.fail(m);
        }
    }
    Ok(report)
}

/// Counting identities, symmetry, unimodality and the central-coefficient
/// identities on every row up to `n_max`.
pub fn verify_invariants(n_max: usize) -> Result<Vec<VerificationReport>> {
    let mut i = built(TriangleKind::I, n_max)?;
    let mut j = built(TriangleKind::J, n_max)?;
    let range = (1, n_max as i64);
    let mut counts = VerificationReport::new("row sums", &["sum of row", "T(n) or (n-1)!!", "row at t=1"], range);
    let mut symmetry = VerificationReport::new("symmetry", &["row", "reversed row"], range);
    let mut unimodal = VerificationReport::new("unimodality", &["row", "unimodal"], range);
    let mut telephone = VerificationReport::new(
        "telephone recurrence",
        &["sum I_n", "sum I_(n-1) + (n-1) sum I_(n-2)"],
        range,
    );

    let mut rows: Vec<DescentRow> = Vec::new();
    for n in 1..=n_max {
        rows.push(i.descent_row(n)?);
        if n % 2 == 0 {
            rows.push(j.descent_row(n)?);
        }
    }
    for row in &rows {
        let n = row.n();
        let expected = match row.family() {
            Family::Involution => involution_count(n),
            Family::FixedPointFree => fixed_point_free_count(n),
        };
        counts.comparisons += 2;
        let (total, at_one) = (row.total(), row.evaluate(1));
        if total != expected || at_one != expected {
            counts.fail(Mismatch {
                n: n as i64,
                k: None,
                detail: format!("{} row count", row.family()),
                values: vec![
                    ("sum".into(), total.to_string()),
                    ("count".into(), expected.to_string()),
                    ("at t=1".into(), at_one.to_string()),
                ],
            });
        }
        symmetry.comparisons += 1;
        if !row.is_symmetric() {
            symmetry.fail(Mismatch {
                n: n as i64,
                k: None,
                detail: format!("{} row is not symmetric", row.family()),
                values: vec![("row".into(), fmt_values(row.coeffs()))],
            });
        }
        unimodal.comparisons += 1;
        if let Some(k) = row.unimodality_break() {
            unimodal.fail(Mismatch {
                n: n as i64,
                k: Some(k as i64),
                detail: format!("{} row is not unimodal", row.family()),
                values: vec![("row".into(), fmt_values(row.coeffs()))],
            });
        }
    }
    for n in 3..=n_max {
        let sum = |m: usize| -> BigCoeff { i.get(m).expect("built").iter().sum() };
        let (lhs, rhs) = (sum(n), sum(n - 1) + sum(n - 2) * (n - 1));
        telephone.comparisons += 1;
        if lhs != rhs {
            telephone.fail(Mismatch {
                n: n as i64,
                k: None,
                detail: "row sums break T(n) = T(n-1) + (n-1) T(n-2)".into(),
                values: vec![("lhs".into(), lhs.to_string()), ("rhs".into(), rhs.to_string())],
            });
        }
    }

    let boundary = scan(Property::BoundaryA, 1, n_max)?;
    let mut central = VerificationReport::new(
        "central a coefficients",
        &["recurrence", "alternating sum of I_n at -1"],
        range,
    );
    central.comparisons = boundary.indices_checked as u64;
    if let Some(m) = boundary.identity_mismatches.first() {
        central.fail(Mismatch {
            n: m.n as i64,
            k: None,
            detail: "central a coefficient disagrees with the alternating sum".into(),
            values: vec![
                ("recurrence".into(), m.recurrence.clone()),
                ("alternating sum".into(), m.alternating_sum.clone()),
            ],
        });
    }
    Ok(vec![counts, telephone, symmetry, unimodal, central])
}
