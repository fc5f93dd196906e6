//! Brute-force descent histograms over explicitly enumerated involutions.
//!
//! Enumeration branches on the largest element not yet placed: it is either
//! a fixed point (involutions only) or swapped with a smaller free element.
//! Every involution is reached exactly once and no permutation outside the
//! family is ever built. The first few levels of that tree are the unit of
//! parallel work.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polyseq::{DescentRow, Family};

/// An involution in one-line notation: `mapping[i]` is the image of `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvolutionWord {
    mapping: Vec<u32>,
}

impl InvolutionWord {
    pub fn new(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        for (i, &v) in mapping.iter().enumerate() {
            let v = v as usize;
            if v == 0 || v > n || mapping[v - 1] as usize != i + 1 {
                return Err(Error::MalformedRow(format!("{mapping:?} is not an involution")));
            }
        }
        Ok(InvolutionWord { mapping })
    }

    pub fn identity(n: usize) -> Self {
        InvolutionWord { mapping: (1..=n as u32).collect() }
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn is_fixed_point_free(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| v as usize != i + 1)
    }

    pub fn descent_count(&self) -> usize {
        descent_count(&self.mapping)
    }
}

/// Positions `i` with `w[i] > w[i+1]`.
pub fn descent_count<T: PartialOrd>(word: &[T]) -> usize {
    word.windows(2).filter(|w| w[0] > w[1]).count()
}

struct Frame {
    element: usize,
    /// Next candidate: `element` itself means "fixed point", smaller values
    /// are partners tried in decreasing order, 0 means exhausted.
    next: usize,
}

/// Lazy stream of all involutions (or fixed-point-free involutions) of `[n]`.
pub struct Involutions {
    n: usize,
    fixed_point_free: bool,
    map: Vec<u32>,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

impl Iterator for Involutions {
    type Item = InvolutionWord;

    fn next(&mut self) -> Option<InvolutionWord> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.n == 0 {
                self.done = true;
                return Some(InvolutionWord { mapping: Vec::new() });
            }
            self.stack.push(Frame { element: self.n, next: self.n });
        }
        let Involutions { map, stack, fixed_point_free, .. } = self;
        loop {
            let Some(top) = stack.last_mut() else {
                self.done = true;
                return None;
            };
            let e = top.element;
            let current = map[e - 1] as usize;
            if current != 0 {
                map[e - 1] = 0;
                map[current - 1] = 0;
            }

            let mut placed = false;
            if top.next == e {
                top.next = e - 1;
                if !*fixed_point_free {
                    map[e - 1] = e as u32;
                    placed = true;
                }
            }
            while !placed && top.next >= 1 {
                let m = top.next;
                top.next -= 1;
                if map[m - 1] == 0 {
                    map[m - 1] = e as u32;
                    map[e - 1] = m as u32;
                    placed = true;
                }
            }
            if !placed {
                stack.pop();
                continue;
            }
            match (1..e).rev().find(|&x| map[x - 1] == 0) {
                None => return Some(InvolutionWord { mapping: map.clone() }),
                Some(free) => stack.push(Frame { element: free, next: free }),
            }
        }
    }
}

/// Every involution of `[n]` in the given family, each exactly once. Odd `n`
/// with [`Family::FixedPointFree`] yields nothing.
pub fn enumerate(n: usize, family: Family) -> Involutions {
    Involutions {
        n,
        fixed_point_free: family == Family::FixedPointFree,
        map: vec![0; n],
        stack: Vec::with_capacity(n),
        started: false,
        done: false,
    }
}

/// `T(n) = T(n-1) + (n-1) T(n-2)`, the number of involutions of `[n]`.
pub fn involution_count(n: usize) -> BigInt {
    let (mut prev, mut cur) = (BigInt::one(), BigInt::one());
    for m in 2..=n {
        let next = &cur + &prev * (m - 1);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `(n-1)!!` for even `n`, zero for odd `n`.
pub fn fixed_point_free_count(n: usize) -> BigInt {
    if n % 2 == 1 {
        return BigInt::zero();
    }
    (1..n).step_by(2).map(BigInt::from).product()
}

/// Partial assignment plus the largest element that may still be free.
type Partial = (Vec<u8>, usize);

fn largest_free(map: &[u8], below: usize) -> Option<usize> {
    (1..=below).rev().find(|&x| map[x - 1] == 0)
}

fn walk(map: &mut [u8], below: usize, fpf: bool, hist: &mut [u64]) {
    let Some(e) = largest_free(map, below) else {
        hist[descent_count(map)] += 1;
        return;
    };
    if !fpf {
        map[e - 1] = e as u8;
        walk(map, e - 1, fpf, hist);
        map[e - 1] = 0;
    }
    for m in (1..e).rev() {
        if map[m - 1] == 0 {
            map[m - 1] = e as u8;
            map[e - 1] = m as u8;
            walk(map, e - 1, fpf, hist);
            map[m - 1] = 0;
            map[e - 1] = 0;
        }
    }
}

fn split(map: &mut Vec<u8>, below: usize, fpf: bool, depth: usize, out: &mut Vec<Partial>) {
    let e = match largest_free(map, below) {
        Some(e) if depth > 0 => e,
        _ => {
            out.push((map.clone(), below));
            return;
        }
    };
    if !fpf {
        map[e - 1] = e as u8;
        split(map, e - 1, fpf, depth - 1, out);
        map[e - 1] = 0;
    }
    for m in (1..e).rev() {
        if map[m - 1] == 0 {
            map[m - 1] = e as u8;
            map[e - 1] = m as u8;
            split(map, e - 1, fpf, depth - 1, out);
            map[m - 1] = 0;
            map[e - 1] = 0;
        }
    }
}

/// Descent histogram, single-threaded. `hist[k]` counts words with `k` descents.
pub fn descent_histogram(n: usize, family: Family) -> Vec<u64> {
    let mut hist = vec![0; n.max(1)];
    let mut map = vec![0u8; n];
    walk(&mut map, n, family == Family::FixedPointFree, &mut hist);
    hist
}

/// Descent histogram with the top of the enumeration tree split across the
/// current rayon pool. Each task owns its histogram; the merge is a plain
/// sum, so the result does not depend on scheduling.
pub fn descent_histogram_parallel(n: usize, family: Family) -> Vec<u64> {
    if n < 6 {
        return descent_histogram(n, family);
    }
    let fpf = family == Family::FixedPointFree;
    let mut tasks = Vec::new();
    split(&mut vec![0u8; n], n, fpf, 3, &mut tasks);
    tasks
        .into_par_iter()
        .map(|(mut map, below)| {
            let mut hist = vec![0u64; n];
            walk(&mut map, below, fpf, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Feasibility limits and scheduling for [`Oracle::row`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub max_involution: usize,
    pub max_fixed_point_free: usize,
    pub parallel: bool,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            max_involution: 14,
            max_fixed_point_free: 16,
            parallel: false,
        }
    }
}

/// Beyond this the one-byte word representation overflows.
const HARD_LIMIT: usize = u8::MAX as usize;

impl Oracle {
    pub fn row(&self, n: usize, family: Family) -> Result<DescentRow> {
        if n == 0 {
            return Err(Error::IndexOutOfRange("brute force row needs n >= 1".into()));
        }
        let bound = match family {
            Family::Involution => self.max_involution,
            Family::FixedPointFree => self.max_fixed_point_free,
        }
        .min(HARD_LIMIT);
        if n > bound {
            return Err(Error::FeasibilityExceeded { n, bound });
        }
        let hist = if self.parallel {
            descent_histogram_parallel(n, family)
        } else {
            descent_histogram(n, family)
        };
        DescentRow::new(family, hist.into_iter().map(BigInt::from).collect())
    }
}

/// Brute-force `I_n(t)` or `J_n(t)` under the default feasibility bounds.
pub fn brute_force_row(n: usize, family: Family) -> Result<DescentRow> {
    Oracle::default().row(n, family)
}
