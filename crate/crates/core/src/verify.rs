//! Erasure patterns, maximal-recoverability certification and erasure
//! decoding.
//!
//! An admissible pattern is a choice of `a` columns in every local group
//! (the tuple `S_1, …, S_g`) plus `h` further columns `X` from the rest of
//! the code. Patterns are indexed by these choice tuples in lexicographic
//! mixed-radix order, `S_1` most significant, each subset ranked
//! lexicographically; the same column set can therefore appear under more
//! than one index. With `h_local`, tuples that leave any group with more
//! than `a + h_local` erasures are skipped.
//!
//! # Sampling generator
//!
//! Sampled mode draws sample `i` from a SplitMix64 stream seeded with
//! `seed ^ mix(i + 1)`, where `mix` is the SplitMix64 output function. Each
//! component rank (`S_1`, …, `S_g`, then `X`) takes one 64-bit word `w` and
//! maps it to `⌊w · N / 2^64⌋` for a component with `N` choices. Draws
//! rejected by the `h_local` cap redraw `X` from the same stream.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::field::Element;
use crate::linalg::{eliminate, Matrix};
use crate::lrc::{Layout, LrcCode};
use crate::FORMAT_VERSION;

/// Default ceiling on the number of choice tuples in exhaustive mode.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Failures kept in a report; the count is always exact.
pub const MAX_REPORTED_FAILURES: usize = 1000;

/// A set of erased columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub columns: Vec<usize>,
}

impl ErasurePattern {
    /// Sorts and removes duplicates.
    pub fn new(mut columns: Vec<usize>) -> Self {
        columns.sort_unstable();
        columns.dedup();
        ErasurePattern { columns }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Erasures per local group.
    pub fn group_counts(&self, layout: &Layout) -> Vec<usize> {
        let mut counts = vec![0; layout.g()];
        for &c in &self.columns {
            if let Some(i) = layout.group_of(c) {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Erasures among the global-parity columns.
    pub fn global_count(&self, layout: &Layout) -> usize {
        self.columns.iter().filter(|&&c| layout.group_of(c).is_none()).count()
    }

    /// Whether the pattern is contained in some maximal admissible pattern:
    /// each group loses at most `a + h_local` symbols and the excess over `a`
    /// summed over groups, plus global-column erasures, is at most `h`.
    pub fn is_admissible(&self, layout: &Layout, h_local: Option<usize>) -> bool {
        let cap = layout.a + h_local.unwrap_or(layout.h);
        let counts = self.group_counts(layout);
        let excess: usize = counts.iter().map(|&c| c.saturating_sub(layout.a)).sum();
        self.columns.iter().all(|&c| c < layout.n())
            && self.columns.windows(2).all(|w| w[0] < w[1])
            && counts.iter().all(|&c| c <= cap)
            && excess + self.global_count(layout) <= layout.h
    }
}

pub(crate) fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `rank`-th `k`-subset of `0..m` in lexicographic order.
pub fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut c = 0;
    for i in 0..k {
        loop {
            let cnt = binom(m - c - 1, k - i - 1);
            if rank < cnt {
                out.push(c);
                c += 1;
                break;
            }
            rank -= cnt;
            c += 1;
        }
    }
    out
}

/// The space of choice tuples for a layout.
#[derive(Clone, Debug)]
pub struct PatternSpace {
    layout: Layout,
    h_local: Option<usize>,
    local_choices: u128,
    extra_choices: u128,
}

impl PatternSpace {
    pub fn new(layout: &Layout, h_local: Option<usize>) -> Self {
        let r = layout.groups.first().map_or(0, |&(s, e)| e - s);
        let rest = layout.n() - layout.g() * layout.a;
        PatternSpace {
            layout: layout.clone(),
            h_local,
            local_choices: binom(r, layout.a),
            extra_choices: binom(rest, layout.h),
        }
    }

    /// Number of choice tuples before the `h_local` filter.
    pub fn total(&self) -> u128 {
        self.local_choices
            .checked_pow(self.layout.g() as u32)
            .and_then(|x| x.checked_mul(self.extra_choices))
            .unwrap_or(u128::MAX)
    }

    fn pattern_from_ranks(&self, local: &[u128], extra: u128) -> Option<ErasurePattern> {
        let mut erased = vec![false; self.layout.n()];
        for (i, &rk) in local.iter().enumerate() {
            let (s, e) = self.layout.groups[i];
            for c in unrank_combination(e - s, self.layout.a, rk) {
                erased[s + c] = true;
            }
        }
        let rest: Vec<usize> = (0..self.layout.n()).filter(|&c| !erased[c]).collect();
        for c in unrank_combination(rest.len(), self.layout.h, extra) {
            erased[rest[c]] = true;
        }
        let p = ErasurePattern { columns: (0..self.layout.n()).filter(|&c| erased[c]).collect() };
        if let Some(hl) = self.h_local {
            let cap = self.layout.a + hl;
            if p.group_counts(&self.layout).iter().any(|&c| c > cap) {
                return None;
            }
        }
        Some(p)
    }

    /// Pattern for a tuple index, or `None` if the `h_local` cap rejects it.
    pub fn unrank(&self, mut index: u128) -> Option<ErasurePattern> {
        let extra = index % self.extra_choices;
        index /= self.extra_choices;
        let g = self.layout.g();
        let mut local = vec![0u128; g];
        for slot in local.iter_mut().rev() {
            *slot = index % self.local_choices;
            index /= self.local_choices;
        }
        self.pattern_from_ranks(&local, extra)
    }

    fn sample(&self, seed: u64, i: u64) -> ErasurePattern {
        let mut rng = SplitMix64::new(seed ^ SplitMix64::mix(i.wrapping_add(1)));
        let local: Vec<u128> = (0..self.layout.g()).map(|_| rng.below(self.local_choices)).collect();
        loop {
            if let Some(p) = self.pattern_from_ranks(&local, rng.below(self.extra_choices)) {
                return p;
            }
        }
    }
}

/// Closed-form number of admissible choice tuples: `C(r, a)^g` times the
/// number of `h`-subsets of the remaining columns putting at most `h_local`
/// into each group.
pub fn pattern_count(layout: &Layout, h_local: Option<usize>) -> u128 {
    let r = layout.groups.first().map_or(0, |&(s, e)| e - s);
    let cap = h_local.unwrap_or(layout.h);
    let free = r - layout.a;
    let global = layout.global_cols.map_or(0, |(s, e)| e - s);
    // polynomial in the number of extra erasures, truncated at degree h
    let mut poly = vec![0u128; layout.h + 1];
    poly[0] = 1;
    let mut multiply = |limit: usize, size: usize| {
        let mut next = vec![0u128; layout.h + 1];
        for (d, &c) in poly.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in 0..=limit.min(size) {
                if d + x > layout.h {
                    break;
                }
                next[d + x] += c * binom(size, x);
            }
        }
        poly = next;
    };
    for _ in 0..layout.g() {
        multiply(cap, free);
    }
    multiply(global, global);
    binom(r, layout.a).pow(layout.g() as u32) * poly[layout.h]
}

/// Every admissible pattern in tuple order.
pub fn enumerate_patterns(layout: &Layout, h_local: Option<usize>) -> impl Iterator<Item = ErasurePattern> {
    let space = PatternSpace::new(layout, h_local);
    let total = space.total();
    (0..total).filter_map(move |i| space.unrank(i))
}

/// SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        Self::mix(self.state)
    }

    /// `⌊w · n / 2^64⌋` for the next word `w`; `n` must fit in 64 bits.
    pub fn below(&mut self, n: u128) -> u128 {
        let w = self.next_u64() as u128;
        (w * n.min(u64::MAX as u128)) >> 64
    }
}

fn submatrix_full_rank(code: &LrcCode, cols: &[usize]) -> bool {
    let h = code.parity_check();
    let rows = h.rows();
    let k = cols.len();
    if k > rows {
        return false;
    }
    let mut buf = Vec::with_capacity(rows * k);
    for r in 0..rows {
        let row = h.row(r);
        buf.extend(cols.iter().map(|&c| row[c]));
    }
    eliminate(code.tower(), &mut buf, rows, k, false).len() == k
}

/// Whether `H(E)` has full column rank. Fails for patterns that are not
/// contained in an admissible pattern.
pub fn check_pattern(code: &LrcCode, pattern: &ErasurePattern, h_local: Option<usize>) -> Result<bool, CodeError> {
    if !pattern.is_admissible(code.layout(), h_local) {
        return Err(CodeError::InadmissiblePattern(format!("{:?}", pattern.columns)));
    }
    Ok(submatrix_full_rank(code, &pattern.columns))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format_version: u32,
    pub mode: Mode,
    pub h_local: Option<usize>,
    pub patterns_checked: u64,
    /// Local blocks failing the MDS check, as dependent column sets.
    pub local_failures: Vec<ErasurePattern>,
    /// Failing erasure patterns in tuple order, deduplicated, at most
    /// [`MAX_REPORTED_FAILURES`].
    pub failures: Vec<ErasurePattern>,
    pub failure_count: u64,
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    pub fn certified(&self) -> bool {
        self.failure_count == 0 && self.local_failures.is_empty()
    }

    /// The report with the timing zeroed, for comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport { elapsed_seconds: 0.0, ..self.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub h_local: Option<usize>,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: Mode::Exhaustive, h_local: None, budget: DEFAULT_BUDGET }
    }
}

/// Column sets of size `a` in each group's local block that are dependent.
pub fn local_mds_failures(code: &LrcCode) -> Vec<ErasurePattern> {
    let layout = code.layout();
    let a = layout.a;
    let mut out = Vec::new();
    for i in 0..layout.g() {
        let block = code.local_block(i);
        let (s, _) = layout.groups[i];
        let r = layout.group_size(i);
        for rank in 0..binom(r, a) {
            let cols = unrank_combination(r, a, rank);
            if !block.select_columns(&cols).has_full_column_rank(code.tower()) {
                out.push(ErasurePattern { columns: cols.iter().map(|c| s + c).collect() });
            }
        }
    }
    out
}

#[derive(Default)]
struct Tally {
    checked: u64,
    failed: u64,
    witnesses: Vec<(u64, ErasurePattern)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failed += other.failed;
        self.witnesses.extend(other.witnesses);
        self.trim();
        self
    }

    fn trim(&mut self) {
        if self.witnesses.len() > 4 * MAX_REPORTED_FAILURES {
            self.witnesses.sort_unstable_by_key(|w| w.0);
            self.witnesses.truncate(4 * MAX_REPORTED_FAILURES);
        }
    }
}

/// Checks that every local block is MDS and that every admissible `H(E)` has
/// full column rank, exhaustively or on seeded samples.
pub fn is_maximally_recoverable(code: &LrcCode, opts: &VerifyOptions) -> Result<VerificationReport, CodeError> {
    let start = Instant::now();
    let space = PatternSpace::new(code.layout(), opts.h_local);
    let (indices, sampled_seed) = match opts.mode {
        Mode::Exhaustive => {
            let total = space.total();
            if total > opts.budget as u128 {
                return Err(CodeError::BudgetExceeded { count: total, budget: opts.budget });
            }
            (total as u64, None)
        }
        Mode::Sampled { count, seed } => (count, Some(seed)),
    };
    let local_failures = local_mds_failures(code);
    let tally = (0..indices)
        .into_par_iter()
        .fold(Tally::default, |mut t, i| {
            let p = match sampled_seed {
                None => space.unrank(i as u128),
                Some(seed) => Some(space.sample(seed, i)),
            };
            if let Some(p) = p {
                t.checked += 1;
                if !submatrix_full_rank(code, &p.columns) {
                    t.failed += 1;
                    t.witnesses.push((i, p));
                    t.trim();
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut witnesses = tally.witnesses;
    witnesses.sort_unstable_by_key(|w| w.0);
    let mut seen = std::collections::HashSet::new();
    let failures: Vec<ErasurePattern> = witnesses
        .into_iter()
        .map(|(_, p)| p)
        .filter(|p| seen.insert(p.clone()))
        .take(MAX_REPORTED_FAILURES)
        .collect();
    Ok(VerificationReport {
        format_version: FORMAT_VERSION,
        mode: opts.mode,
        h_local: opts.h_local,
        patterns_checked: tally.checked,
        local_failures,
        failures,
        failure_count: tally.failed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Result of an erasure decode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub codeword: Vec<Element>,
    /// Symbols read from each local group.
    pub reads_per_group: Vec<usize>,
    /// Symbols read from the global-parity columns.
    pub global_reads: usize,
    /// Whether every group was repaired from its local checks alone.
    pub local: bool,
}

/// Fills in the `None` positions of `received`.
///
/// When every group has at most `a` erasures and no global-parity column is
/// erased, each damaged group is repaired from its `a` local checks by
/// reading `r - a` of its symbols. Otherwise `H(E)·x = -H(Ē)·y` is solved
/// over the whole code.
pub fn decode_erasures(code: &LrcCode, received: &[Option<Element>]) -> Result<DecodeOutcome, CodeError> {
    let layout = code.layout();
    let n = code.n();
    if received.len() != n {
        return Err(CodeError::BadParams(format!("received word has length {}, expected {n}", received.len())));
    }
    let erased: Vec<usize> = (0..n).filter(|&c| received[c].is_none()).collect();
    if erased.is_empty() {
        return Ok(DecodeOutcome {
            codeword: received.iter().map(|x| x.unwrap()).collect(),
            reads_per_group: vec![0; layout.g()],
            global_reads: 0,
            local: true,
        });
    }
    let pattern = ErasurePattern { columns: erased.clone() };
    let counts = pattern.group_counts(layout);
    if layout.a > 0 && pattern.global_count(layout) == 0 && counts.iter().all(|&c| c <= layout.a) {
        if let Some(out) = decode_locally(code, received, &counts) {
            return Ok(out);
        }
    }
    decode_globally(code, received, &erased)
}

fn decode_locally(code: &LrcCode, received: &[Option<Element>], counts: &[usize]) -> Option<DecodeOutcome> {
    let t = code.tower();
    let layout = code.layout();
    let a = layout.a;
    let mut word: Vec<Element> = received.iter().map(|x| x.unwrap_or(Element::ZERO)).collect();
    let mut reads = vec![0; layout.g()];
    for (i, &cnt) in counts.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        let (s, e) = layout.groups[i];
        let mut unknown: Vec<usize> = (s..e).filter(|&c| received[c].is_none()).collect();
        // treat the last intact symbols as unknown too, so the system is square
        for c in (s..e).rev() {
            if unknown.len() == a {
                break;
            }
            if received[c].is_some() {
                unknown.push(c);
            }
        }
        unknown.sort_unstable();
        let known: Vec<usize> = (s..e).filter(|c| !unknown.contains(c)).collect();
        let block = code.local_block(i);
        let lhs = block.select_columns(&unknown.iter().map(|c| c - s).collect::<Vec<_>>());
        let rhs: Vec<Element> = (0..a)
            .map(|r| {
                known.iter().fold(Element::ZERO, |acc, &c| t.sub(acc, t.mul(block.get(r, c - s), word[c])))
            })
            .collect();
        if !lhs.has_full_column_rank(t) {
            return None;
        }
        let x = lhs.solve(t, &rhs).ok()?;
        for (&c, v) in unknown.iter().zip(x) {
            word[c] = v;
        }
        reads[i] = known.len();
    }
    Some(DecodeOutcome { codeword: word, reads_per_group: reads, global_reads: 0, local: true })
}

fn decode_globally(code: &LrcCode, received: &[Option<Element>], erased: &[usize]) -> Result<DecodeOutcome, CodeError> {
    let t = code.tower();
    let layout = code.layout();
    let h = code.parity_check();
    let n = code.n();
    let known: Vec<usize> = (0..n).filter(|&c| received[c].is_some()).collect();
    let he: Matrix = h.select_columns(erased);
    if !he.has_full_column_rank(t) {
        return Err(CodeError::Uncorrectable);
    }
    let rhs: Vec<Element> = (0..h.rows())
        .map(|r| {
            known
                .iter()
                .fold(Element::ZERO, |acc, &c| t.sub(acc, t.mul(h.get(r, c), received[c].unwrap())))
        })
        .collect();
    let x = he.solve(t, &rhs).map_err(|_| CodeError::NotACodeword)?;
    let mut word: Vec<Element> = received.iter().map(|x| x.unwrap_or(Element::ZERO)).collect();
    for (&c, v) in erased.iter().zip(x) {
        word[c] = v;
    }
    let mut reads = vec![0; layout.g()];
    let mut global_reads = 0;
    for &c in &known {
        match layout.group_of(c) {
            Some(i) => reads[i] += 1,
            None => global_reads += 1,
        }
    }
    Ok(DecodeOutcome { codeword: word, reads_per_group: reads, global_reads, local: false })
}
