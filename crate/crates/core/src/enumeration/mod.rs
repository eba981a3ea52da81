//! Exhaustive scans over all complete automata of a given size, and the
//! property verification suite in [`verify`].

pub mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::automaton::{Dfa, Letter};
use crate::error::{Error, Result};
use crate::sync::shortest_reset_word;

pub use verify::{suffix_closed_dimension_check, verify_automaton, verify_example_suite};

/// Largest table count a scan will enumerate.
pub const MAX_TABLES: u64 = 1_000_000_000;

/// Tables per work unit. Fixed so that results do not depend on the
/// number of workers.
const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub n: usize,
    pub k: usize,
    pub require_strongly_connected: bool,
    pub worker_count: usize,
    /// Keep one representative per relabeling class.
    pub canonicalize: bool,
}

impl ScanConfig {
    /// Single worker, no connectivity filter, canonicalization on for
    /// `n <= 5`.
    pub fn new(n: usize, k: usize) -> Self {
        ScanConfig {
            n,
            k,
            require_strongly_connected: false,
            worker_count: 1,
            canonicalize: n <= 5,
        }
    }

    /// `n^(n k)`, if it passes the tractability guard.
    pub fn table_count(&self) -> Result<u64> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::invalid("scan needs n >= 1 and k >= 1"));
        }
        if self.worker_count == 0 {
            return Err(Error::invalid("worker count must be positive"));
        }
        let exp = u32::try_from(self.n * self.k).unwrap_or(u32::MAX);
        match (self.n as u64).checked_pow(exp) {
            Some(t) if t <= MAX_TABLES => Ok(t),
            _ => Err(Error::Capacity(format!(
                "{}^({}·{}) tables exceed the scan limit of {MAX_TABLES}",
                self.n, self.n, self.k
            ))),
        }
    }
}

/// Decodes table number `index`: digit `p` in base `n` is `delta[p]`, with
/// `delta` letter-major.
pub fn table_from_index(n: usize, k: usize, mut index: u64) -> Dfa {
    let delta = (0..n * k)
        .map(|_| {
            let d = (index % n as u64) as u8;
            index /= n as u64;
            d
        })
        .collect();
    Dfa::from_raw(n, k, delta)
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    // Heap's algorithm.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Applies the relabeling `state i -> perm[i]`.
pub fn relabel(dfa: &Dfa, perm: &[usize]) -> Dfa {
    let (n, k) = (dfa.n(), dfa.k());
    let mut delta = vec![0u8; n * k];
    for l in 0..k {
        for i in 0..n {
            delta[l * n + perm[i]] = perm[dfa.step(i, l as Letter)] as u8;
        }
    }
    Dfa::from_raw(n, k, delta)
}

/// The lexicographically least letter-major table over all relabelings of
/// the states.
pub fn canonical_form(dfa: &Dfa) -> Dfa {
    let (n, k) = (dfa.n(), dfa.k());
    let mut best = dfa.raw().to_vec();
    let mut scratch = vec![0u8; n * k];
    for_each_permutation(n, |perm| {
        for l in 0..k {
            for i in 0..n {
                scratch[l * n + perm[i]] = perm[dfa.step(i, l as Letter)] as u8;
            }
        }
        if scratch < best {
            best.copy_from_slice(&scratch);
        }
    });
    Dfa::from_raw(n, k, best)
}

pub fn is_canonical(dfa: &Dfa) -> bool {
    canonical_form(dfa).raw() == dfa.raw()
}

fn admitted(cfg: &ScanConfig, dfa: &Dfa) -> bool {
    (!cfg.require_strongly_connected || dfa.is_strongly_connected())
        && (!cfg.canonicalize || is_canonical(dfa))
}

/// Every transition table of the configured size, in index order, after the
/// connectivity and canonical-form filters.
pub fn enumerate_dfas(cfg: &ScanConfig) -> Result<impl Iterator<Item = Dfa> + '_> {
    let total = cfg.table_count()?;
    Ok((0..total)
        .map(|i| table_from_index(cfg.n, cfg.k, i))
        .filter(move |d| admitted(cfg, d)))
}

/// A table whose shortest reset word exceeds a bound.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub table: Vec<Vec<usize>>,
    pub length: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub k: usize,
    pub strongly_connected_only: bool,
    pub canonical: bool,
    pub total_enumerated: u64,
    pub synchronizing: u64,
    /// Shortest reset length -> number of automata.
    pub histogram: BTreeMap<usize, u64>,
    pub max_length: Option<usize>,
    /// Canonical tables attaining `max_length`.
    pub extremal_witnesses: Vec<Vec<Vec<usize>>>,
    /// `(n³ - n) / 6`.
    pub upper_bound: usize,
    pub bound_violations: Vec<Violation>,
    /// `(n - 1)²`.
    pub cerny_bound: usize,
    /// Synchronizing automata above `(n - 1)²`; would refute the conjecture.
    pub cerny_violations: Vec<Violation>,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn upper_bound(n: usize) -> usize {
    (n * n * n - n) / 6
}

pub fn cerny_bound(n: usize) -> usize {
    (n - 1) * (n - 1)
}

#[derive(Default)]
struct Partial {
    total: u64,
    synchronizing: u64,
    histogram: BTreeMap<usize, u64>,
    max_length: Option<usize>,
    witnesses: BTreeSet<Vec<u8>>,
    bound_violations: Vec<Violation>,
    cerny_violations: Vec<Violation>,
}

impl Partial {
    fn absorb(&mut self, other: Partial) {
        self.total += other.total;
        self.synchronizing += other.synchronizing;
        for (len, c) in other.histogram {
            *self.histogram.entry(len).or_default() += c;
        }
        match (self.max_length, other.max_length) {
            (_, None) => {}
            (Some(a), Some(b)) if a > b => {}
            (Some(a), Some(b)) if a == b => self.witnesses.extend(other.witnesses),
            _ => {
                self.max_length = other.max_length;
                self.witnesses = other.witnesses;
            }
        }
        self.bound_violations.extend(other.bound_violations);
        self.cerny_violations.extend(other.cerny_violations);
    }
}

fn scan_chunk(cfg: &ScanConfig, start: u64, end: u64) -> Result<Partial> {
    let (ub, cb) = (upper_bound(cfg.n), cerny_bound(cfg.n));
    let mut p = Partial::default();
    for index in start..end {
        let dfa = table_from_index(cfg.n, cfg.k, index);
        if !admitted(cfg, &dfa) {
            continue;
        }
        p.total += 1;
        let Some(reset) = shortest_reset_word(&dfa)? else {
            continue;
        };
        let len = reset.length;
        p.synchronizing += 1;
        *p.histogram.entry(len).or_default() += 1;
        if len > ub {
            p.bound_violations.push(Violation { table: dfa.table(), length: len, bound: ub });
        }
        if len > cb {
            p.cerny_violations.push(Violation { table: dfa.table(), length: len, bound: cb });
        }
        match p.max_length {
            Some(m) if m > len => {}
            Some(m) if m == len => {
                p.witnesses.insert(canonical_form(&dfa).raw().to_vec());
            }
            _ => {
                p.max_length = Some(len);
                p.witnesses.clear();
                p.witnesses.insert(canonical_form(&dfa).raw().to_vec());
            }
        }
    }
    Ok(p)
}

/// Scans every admitted table, computing shortest reset lengths and checking
/// them against `(n³ - n)/6` and `(n - 1)²`.
///
/// The index space is cut into fixed-size chunks which workers claim in
/// turn; partial results are merged in chunk order, so the report does not
/// depend on `worker_count`.
pub fn extremal_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    let total = cfg.table_count()?;
    let chunks = total.div_ceil(CHUNK) as usize;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<Partial>)>> = Mutex::new(Vec::with_capacity(chunks));
    let workers = cfg.worker_count.min(chunks.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= chunks {
                    break;
                }
                let start = c as u64 * CHUNK;
                let end = (start + CHUNK).min(total);
                let part = scan_chunk(cfg, start, end);
                results.lock().expect("results lock").push((c, part));
            });
        }
    });

    let mut results = results.into_inner().expect("results lock");
    results.sort_by_key(|(c, _)| *c);
    let mut merged = Partial::default();
    for (_, part) in results {
        merged.absorb(part?);
    }

    let (n, k) = (cfg.n, cfg.k);
    Ok(ScanReport {
        n,
        k,
        strongly_connected_only: cfg.require_strongly_connected,
        canonical: cfg.canonicalize,
        total_enumerated: merged.total,
        synchronizing: merged.synchronizing,
        histogram: merged.histogram,
        max_length: merged.max_length,
        extremal_witnesses: merged
            .witnesses
            .into_iter()
            .map(|raw| Dfa::from_raw(n, k, raw).table())
            .collect(),
        upper_bound: upper_bound(n),
        bound_violations: merged.bound_violations,
        cerny_bound: cerny_bound(n),
        cerny_violations: merged.cerny_violations,
    })
}
