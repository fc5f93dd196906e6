//! Explicit binomial-sum formulas, independent of the recurrences.
//!
//! `J_{2n,k}` and `I_{n,k}` come from coefficient extraction in the
//! generating functions; the gamma coefficients `a_{n,k}` and `b_{2n,k}` come
//! from alternating sums over a descent row. None of this module calls into
//! [`crate::recurrences`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyseq::{BigCoeff, DescentRow, Family, GammaFamily, GammaRow};
use crate::report::{Mismatch, VerificationReport};

/// Generalized binomial coefficient `m (m-1) ... (m-j+1) / j!`, zero for
/// negative `j`. The upper argument may be negative.
pub fn binomial(m: i64, j: i64) -> BigCoeff {
    if j < 0 {
        return BigInt::zero();
    }
    if m < 0 {
        // C(m, j) = (-1)^j C(j - m - 1, j)
        let c = binomial(j - m - 1, j);
        return if j % 2 == 0 { c } else { -c };
    }
    if j > m {
        return BigInt::zero();
    }
    let j = j.min(m - j);
    let mut c = BigInt::one();
    for i in 0..j {
        c = c * (m - i) / (i + 1);
    }
    c
}

fn sign(e: i64) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn triangular(i: i64) -> i64 {
    i * (i + 1) / 2
}

/// `J_{2n,k} = sum_{i=0}^{k} (-1)^{k-i} C(2n+1, k-i) C(i(i+1)/2 + n - 1, i(i+1)/2 - 1)`.
///
/// Note that `half` is the half-size: the row size is `2 * half`.
pub fn j_closed(half: usize, k: i64) -> Result<BigCoeff> {
    if half == 0 || k < 0 || k > 2 * half as i64 {
        return Err(Error::IndexOutOfRange(format!(
            "j_closed: need half >= 1 and 0 <= k <= {}, got half={half}, k={k}",
            2 * half
        )));
    }
    Ok(j_closed_unchecked(half as i64, k))
}

fn j_closed_unchecked(n: i64, k: i64) -> BigCoeff {
    (0..=k)
        .map(|i| {
            let t = triangular(i);
            binomial(2 * n + 1, k - i) * binomial(t + n - 1, t - 1) * sign(k - i)
        })
        .sum()
}

/// `J_n(t)` for even `n`, entirely from [`j_closed`].
pub fn j_closed_row(n: usize) -> Result<DescentRow> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddIndex { what: "J", n });
    }
    let coeffs = (0..n as i64)
        .map(|k| j_closed(n / 2, k))
        .collect::<Result<Vec<_>>>()?;
    DescentRow::new(Family::FixedPointFree, coeffs)
}

/// Inner sum `s_n(r) = sum_j C(r(r+1)/2 + j - 1, j) C(r + n - 2j, n - 2j)`:
/// the coefficient of `t^r` in `I_n(t) / (1-t)^(n+1)`.
fn involution_series_coeff(n: i64, r: i64) -> BigCoeff {
    SnParams { x: triangular(r), y: r }.term_sum(n)
}

fn i_closed_from_series(n: i64, k: i64, series: &[BigCoeff]) -> BigCoeff {
    (0..=k)
        .map(|r| binomial(n + 1, k - r) * &series[r as usize] * sign(k - r))
        .sum()
}

/// `I_{n,k} = sum_{r=0}^{k} (-1)^{k-r} C(n+1, k-r) s_n(r)`.
pub fn i_closed(n: usize, k: i64) -> Result<BigCoeff> {
    if n == 0 || k < 0 || k >= n as i64 {
        return Err(Error::IndexOutOfRange(format!(
            "i_closed: need n >= 1 and 0 <= k < n, got n={n}, k={k}"
        )));
    }
    let n = n as i64;
    let series: Vec<_> = (0..=k).map(|r| involution_series_coeff(n, r)).collect();
    Ok(i_closed_from_series(n, k, &series))
}

/// `I_n(t)` from the closed form, sharing the inner sums across the row.
pub fn i_closed_row(n: usize) -> Result<DescentRow> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("i_closed_row: n must be >= 1".into()));
    }
    let n = n as i64;
    let series: Vec<_> = (0..n).map(|r| involution_series_coeff(n, r)).collect();
    let coeffs = (0..n).map(|k| i_closed_from_series(n, k, &series)).collect();
    DescentRow::new(Family::Involution, coeffs)
}

/// Free parameters of the auxiliary sum
/// `s(n) = sum_{k=0}^{n/2} C(x+k-1, k) C(y+n-2k, n-2k)`,
/// whose generating function is `(1-u^2)^(-x) (1-u)^(-y-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnParams {
    pub x: i64,
    pub y: i64,
}

impl SnParams {
    /// `T(n, k)`.
    pub fn term(&self, n: i64, k: i64) -> BigCoeff {
        binomial(self.x + k - 1, k) * binomial(self.y + n - 2 * k, n - 2 * k)
    }

    fn term_sum(&self, n: i64) -> BigCoeff {
        (0..=n / 2).map(|k| self.term(n, k)).sum()
    }
}

/// `s(0), ..., s(n_max)` by direct summation.
pub fn s_sequence(p: SnParams, n_max: usize) -> Vec<BigCoeff> {
    (0..=n_max as i64).map(|n| p.term_sum(n)).collect()
}

/// Checks `(2x+y+n+1) s(n) + (y+1) s(n+1) - (n+2) s(n+2) = 0` for
/// `n = 0..=n_max-2`.
pub fn verify_s_recurrence(p: SnParams, n_max: usize) -> VerificationReport {
    let mut report = VerificationReport::new(
        format!("s-recurrence x={} y={}", p.x, p.y),
        &["(2x+y+n+1)s(n) + (y+1)s(n+1)", "(n+2)s(n+2)"],
        (0, n_max.saturating_sub(2) as i64),
    );
    let s = s_sequence(p, n_max);
    for n in 0..n_max.saturating_sub(1) {
        let ni = n as i64;
        let lhs = &s[n] * (2 * p.x + p.y + ni + 1) + &s[n + 1] * (p.y + 1);
        let rhs = &s[n + 2] * (ni + 2);
        report.comparisons += 1;
        if lhs != rhs {
            report.fail(Mismatch {
                n: ni,
                k: None,
                detail: "recurrence residual is nonzero".into(),
                values: vec![("lhs".into(), lhs.to_string()), ("rhs".into(), rhs.to_string())],
            });
            break;
        }
    }
    report
}

/// Checks that `n -> J_{2n,k}` is a polynomial of degree `d = k(k+1)/2 - 1`
/// with leading coefficient `1/d!`: its `d`-th forward difference is
/// identically 1 over `d + extra + 1` consecutive admissible `n`.
pub fn verify_j_degree(k: i64, extra: usize) -> VerificationReport {
    assert!(k >= 1, "degree check needs k >= 1");
    let d = (triangular(k) - 1) as usize;
    let start = ((k + 1) / 2).max(1) as usize;
    let count = d + extra + 1;
    let end = start + count - 1;
    let mut report = VerificationReport::new(
        format!("J_(2n,{k}) degree {d} in n"),
        &["d-th forward difference", "1"],
        (start as i64, end as i64),
    );
    let mut diffs: Vec<BigCoeff> = (start..=end)
        .map(|n| j_closed(n, k).expect("k <= 2n by construction"))
        .collect();
    for _ in 0..d {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    for (i, v) in diffs.iter().enumerate() {
        report.comparisons += 1;
        if !v.is_one() {
            report.fail(Mismatch {
                n: (start + i) as i64,
                k: Some(k),
                detail: format!("{d}-th difference is not 1"),
                values: vec![("difference".into(), v.to_string())],
            });
            break;
        }
    }
    report
}

/// `N / (N - J) * C(N - J, J)` times `value`, with the division checked.
fn weighted(
    what: &'static str,
    n: usize,
    k: i64,
    num: i64,
    den: i64,
    choose_k: i64,
    value: &BigCoeff,
) -> Result<BigCoeff> {
    let top = binomial(den, choose_k) * num;
    let (q, r) = top.div_rem(&BigInt::from(den));
    if !r.is_zero() {
        return Err(Error::DivisibilityViolation {
            what,
            n,
            k,
            rhs: top.to_string(),
            divisor: den,
        });
    }
    Ok(q * value)
}

/// `a_{n,k}` from the alternating sum over `I_{n,j}`, `j <= k`.
pub fn a_explicit(n: usize, k: i64, i_row: &DescentRow) -> Result<BigCoeff> {
    if i_row.family() != Family::Involution || i_row.n() != n {
        return Err(Error::MalformedRow(format!("a_explicit needs I_{n}, got {i_row}")));
    }
    let ni = n as i64;
    if k < 0 || 2 * k + 1 > ni {
        return Err(Error::IndexOutOfRange(format!("a_{n},{k}: need 0 <= k <= (n-1)/2")));
    }
    let center = 2 * k + 1 == ni;
    let mut total = if center { i_row.coeff(k) } else { BigInt::zero() };
    let last = if center { k - 1 } else { k };
    for j in 0..=last {
        let den = ni - k - j - 1;
        let w = weighted("a", n, k, ni - 2 * j - 1, den, k - j, &i_row.coeff(j))?;
        total += w * sign(k - j);
    }
    Ok(total)
}

/// `b_{n,k}` (even size `n`) from the alternating sum over `J_{n,j}`, `1 <= j <= k`.
pub fn b_explicit(n: usize, k: i64, j_row: &DescentRow) -> Result<BigCoeff> {
    if n % 2 == 1 {
        return Err(Error::OddIndex { what: "b", n });
    }
    if j_row.family() != Family::FixedPointFree || j_row.n() != n {
        return Err(Error::MalformedRow(format!("b_explicit needs J_{n}, got {j_row}")));
    }
    let m = (n / 2) as i64;
    if k < 1 || k > m {
        return Err(Error::IndexOutOfRange(format!("b_{n},{k}: need 1 <= k <= n/2")));
    }
    let center = k == m;
    let mut total = if center { j_row.coeff(k) } else { BigInt::zero() };
    let last = if center { k - 1 } else { k };
    for j in 1..=last {
        let den = 2 * m - k - j;
        let w = weighted("b", n, k, 2 * m - 2 * j, den, k - j, &j_row.coeff(j))?;
        total += w * sign(k - j);
    }
    Ok(total)
}

/// All `a_{n,k}` of one row via [`a_explicit`].
pub fn a_explicit_row(i_row: &DescentRow) -> Result<GammaRow> {
    let n = i_row.n();
    let gammas = (0..GammaFamily::A.row_len(n) as i64)
        .map(|k| a_explicit(n, k, i_row))
        .collect::<Result<Vec<_>>>()?;
    GammaRow::new(GammaFamily::A, n, gammas)
}

/// All `b_{n,k}` of one row via [`b_explicit`].
pub fn b_explicit_row(j_row: &DescentRow) -> Result<GammaRow> {
    let n = j_row.n();
    let gammas = (1..=(n / 2) as i64)
        .map(|k| b_explicit(n, k, j_row))
        .collect::<Result<Vec<_>>>()?;
    GammaRow::new(GammaFamily::B, n, gammas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(xs: &[i64]) -> Vec<BigCoeff> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 2), BigInt::from(21));
        assert_eq!(binomial(-1, 0), BigInt::one());
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(3, 5), BigInt::zero());
        // (-1)(-2)(-3)/3! = -1, (-2)(-3)/2 = 3
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(
            binomial(100, 49).to_string(),
            "98913082887808032681188722800"
        );
    }

    proptest! {
        #[test]
        fn binomial_pascal_rule(m in -30i64..30, j in -2i64..30) {
            prop_assert_eq!(binomial(m, j) + binomial(m, j + 1), binomial(m + 1, j + 1));
        }
    }

    #[test]
    fn j_closed_values() {
        assert_eq!(j_closed(3, 3).unwrap(), BigInt::from(7));
        assert_eq!(j_closed(3, 0).unwrap(), BigInt::zero());
        assert_eq!(j_closed(3, 6).unwrap(), BigInt::zero());
        assert_eq!(j_closed(4, 4).unwrap(), BigInt::from(37));
        assert!(j_closed(3, 7).is_err());
        assert!(j_closed(0, 0).is_err());
        assert_eq!(j_closed_row(8).unwrap().coeffs(), &big(&[0, 1, 6, 27, 37, 27, 6, 1])[..]);
    }

    #[test]
    fn i_closed_values() {
        assert_eq!(i_closed(4, 1).unwrap(), BigInt::from(4));
        assert_eq!(i_closed(5, 2).unwrap(), BigInt::from(12));
        assert_eq!(i_closed(7, 3).unwrap(), BigInt::from(92));
        assert!(i_closed(4, 4).is_err());
        assert_eq!(i_closed_row(6).unwrap().coeffs(), &big(&[1, 9, 28, 28, 9, 1])[..]);
        assert_eq!(i_closed_row(1).unwrap().coeffs(), &big(&[1])[..]);
    }

    /// Coefficients of `(1-u^2)^(-x) (1-u)^(-y-1)` by truncated series
    /// multiplication, for nonnegative parameters.
    fn series_oracle(x: usize, y: usize, len: usize) -> Vec<BigCoeff> {
        let mul = |a: &[BigCoeff], b: &[BigCoeff]| -> Vec<BigCoeff> {
            (0..len)
                .map(|n| (0..=n).map(|i| &a[i] * &b[n - i]).sum())
                .collect()
        };
        let geometric: Vec<BigCoeff> = vec![BigInt::one(); len];
        let even: Vec<BigCoeff> = (0..len).map(|i| BigInt::from((i % 2 == 0) as i64)).collect();
        let mut acc: Vec<BigCoeff> = (0..len).map(|i| BigInt::from((i == 0) as i64)).collect();
        for _ in 0..x {
            acc = mul(&acc, &even);
        }
        for _ in 0..=y {
            acc = mul(&acc, &geometric);
        }
        acc
    }

    #[test]
    fn s_sequence_values() {
        assert_eq!(s_sequence(SnParams { x: 1, y: 1 }, 3), big(&[1, 2, 4, 6]));
        assert_eq!(s_sequence(SnParams { x: 0, y: 0 }, 5), big(&[1; 6]));
        assert_eq!(s_sequence(SnParams { x: 3, y: 2 }, 5), big(&[1, 3, 9, 19, 39, 69]));
        for (x, y) in [(1, 1), (3, 2), (6, 3), (0, 4)] {
            assert_eq!(s_sequence(SnParams { x: x as i64, y: y as i64 }, 20), series_oracle(x, y, 21));
        }
        // the r = 2 instance is the inner sum of i_closed
        for n in 0..10 {
            assert_eq!(
                s_sequence(SnParams { x: 3, y: 2 }, 10)[n],
                involution_series_coeff(n as i64, 2)
            );
        }
    }

    #[test]
    fn s_recurrence() {
        let r = verify_s_recurrence(SnParams { x: 1, y: 1 }, 2);
        assert!(r.holds());
        assert_eq!(r.comparisons, 1);
        assert!(verify_s_recurrence(SnParams { x: 0, y: 0 }, 30).holds());
        let r = verify_s_recurrence(SnParams { x: 3, y: 2 }, 50);
        assert!(r.holds());
        assert_eq!(r.comparisons, 49);
    }

    proptest! {
        #[test]
        fn s_recurrence_holds_for_all_integer_params(x in -10i64..=10, y in -10i64..=10) {
            let r = verify_s_recurrence(SnParams { x, y }, 40);
            prop_assert!(r.holds(), "{}", r.summary());
        }
    }

    #[test]
    fn j_degree_in_n() {
        // k = 2: 1, 3, 6, 10 at n = 2..5
        let vals: Vec<_> = (2..=5).map(|n| j_closed(n, 2).unwrap()).collect();
        assert_eq!(vals, big(&[1, 3, 6, 10]));
        for k in 1..=6 {
            let r = verify_j_degree(k, 3);
            assert!(r.holds(), "{}", r.summary());
        }
    }

    #[test]
    fn explicit_gamma_values() {
        let i9 = i_closed_row(9).unwrap();
        assert_eq!(a_explicit(9, 4, &i9).unwrap(), BigInt::from(20));
        let i5 = i_closed_row(5).unwrap();
        assert_eq!(a_explicit(5, 2, &i5).unwrap(), BigInt::from(2));
        let j12 = j_closed_row(12).unwrap();
        assert_eq!(b_explicit(12, 6, &j12).unwrap(), BigInt::from(-65));
        assert_eq!(a_explicit_row(&i_closed_row(1).unwrap()).unwrap().gammas(), &big(&[1])[..]);
        assert_eq!(b_explicit_row(&j_closed_row(2).unwrap()).unwrap().gammas(), &big(&[1])[..]);
        assert_eq!(b_explicit_row(&j_closed_row(8).unwrap()).unwrap().gammas(), &big(&[1, 0, 12, -7])[..]);

        assert!(a_explicit(9, 5, &i9).is_err());
        assert!(a_explicit(8, 1, &i9).is_err());
        assert!(b_explicit(12, 0, &j12).is_err());
        assert!(b_explicit(12, 7, &j12).is_err());
    }
}
