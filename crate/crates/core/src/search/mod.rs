//! Layered search over surface patterns.
//!
//! Layer `n` holds the patterns first reached with `n` hexes. Every move
//! adds exactly one hex, so expanding layers in order reaches each pattern
//! first at its minimum hex count, separately for odd and even counts.
//! Expansion of a layer runs in parallel; proposals are merged in frontier
//! order (frontier sorted by code), so results do not depend on the thread
//! count.

mod checkpoint;
mod template;
mod witness;

use std::collections::HashMap;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::hexmodel::Parity;
use crate::moves::{MoveRules, Packing, Placement};
use crate::surface::CanonicalCode;

pub use checkpoint::{
    format_record_line, load_checkpoint, parse_record_line, save_checkpoint, CheckpointError, CHECKPOINT_VERSION,
};
pub use template::{verify_template, TemplateReport};
pub use witness::{find_grow_order, replay_witness, GrowOrder, GrowOrderError, ReplayError, Witness};

/// Minimum odd and even hex counts known for one pattern, with witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternRecord {
    pub odd: Option<Witness>,
    pub even: Option<Witness>,
}

impl PatternRecord {
    pub fn witness(&self, parity: Parity) -> Option<&Witness> {
        match parity {
            Parity::Odd => self.odd.as_ref(),
            Parity::Even => self.even.as_ref(),
        }
    }

    pub fn min_count(&self, parity: Parity) -> Option<usize> {
        self.witness(parity).map(Witness::hex_count)
    }

    /// Smallest count of either parity.
    pub fn min_any(&self) -> Option<usize> {
        match (self.min_count(Parity::Odd), self.min_count(Parity::Even)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn slot(&mut self, parity: Parity) -> &mut Option<Witness> {
        match parity {
            Parity::Odd => &mut self.odd,
            Parity::Even => &mut self.even,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Packings whose successors were enumerated.
    pub expanded: u64,
    /// Successful placements generated.
    pub moves: u64,
}

/// Settings that determine the contents of a ledger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LedgerSettings {
    pub rules: MoveRules,
    pub reflection_invariant: bool,
}

impl Default for LedgerSettings {
    fn default() -> Self {
        LedgerSettings { rules: MoveRules::default(), reflection_invariant: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLedger {
    pub settings: LedgerSettings,
    pub records: HashMap<CanonicalCode, PatternRecord>,
    /// Largest hex count whose patterns are all recorded.
    pub layer: usize,
    pub stats: SearchStats,
}

impl SearchLedger {
    /// Ledger holding only the single hex.
    pub fn new(settings: LedgerSettings) -> Self {
        let mut records = HashMap::new();
        let cube = Packing::single().code(settings.reflection_invariant);
        records.insert(cube, PatternRecord { odd: Some(Witness::default()), even: None });
        SearchLedger { settings, records, layer: 1, stats: SearchStats::default() }
    }

    pub fn get(&self, code: &CanonicalCode) -> Option<&PatternRecord> {
        self.records.get(code)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Codes first reached at hex count `n`, sorted.
    pub fn layer_codes(&self, n: usize) -> Vec<&CanonicalCode> {
        let parity = Parity::of(n);
        let mut codes: Vec<&CanonicalCode> =
            self.records.iter().filter(|(_, r)| r.min_count(parity) == Some(n)).map(|(c, _)| c).collect();
        codes.sort();
        codes
    }

    /// Codes reachable with at most `n` hexes.
    pub fn codes_up_to(&self, n: usize) -> Vec<&CanonicalCode> {
        let mut codes: Vec<&CanonicalCode> =
            self.records.iter().filter(|(_, r)| r.min_any().is_some_and(|m| m <= n)).map(|(c, _)| c).collect();
        codes.sort();
        codes
    }

    /// Expands the current layer, recording patterns first reached at the
    /// next hex count. `keep` filters which frontier packings are expanded.
    /// Returns the codes added, sorted.
    pub fn expand_layer(&mut self, keep: impl Fn(&Packing) -> bool + Sync) -> Vec<CanonicalCode> {
        let n = self.layer;
        let next_parity = Parity::of(n + 1);
        let settings = self.settings;
        let frontier: Vec<(CanonicalCode, Witness)> = self
            .layer_codes(n)
            .into_iter()
            .map(|c| (c.clone(), self.records[c].witness(Parity::of(n)).expect("layer code").clone()))
            .collect();
        let proposals: Vec<Option<Vec<(CanonicalCode, Placement)>>> = frontier
            .par_iter()
            .map(|(_, w)| {
                let packing = replay_witness(w, &settings.rules).expect("ledger witnesses replay");
                if !keep(&packing) {
                    return None;
                }
                let out = packing
                    .successors(&settings.rules)
                    .into_iter()
                    .map(|(pl, next)| (next.code(settings.reflection_invariant), pl))
                    .collect();
                Some(out)
            })
            .collect();
        let mut added = Vec::new();
        for ((_, w), props) in frontier.iter().zip(proposals) {
            let Some(props) = props else { continue };
            self.stats.expanded += 1;
            self.stats.moves += props.len() as u64;
            for (code, pl) in props {
                let record = self.records.entry(code.clone()).or_default();
                let slot = record.slot(next_parity);
                if slot.is_none() {
                    *slot = Some(w.extended(pl));
                    added.push(code);
                }
            }
        }
        self.layer = n + 1;
        added.sort();
        added
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub settings: LedgerSettings,
    /// Largest hex count explored.
    pub max_hexes: usize,
    /// Skip packings that cannot reach the target's quad count in the
    /// remaining budget (each move changes the count by at most 4).
    pub prune: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Checkpoint after every layer; resume if the directory holds one.
    pub checkpoint_dir: Option<PathBuf>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            settings: LedgerSettings::default(),
            max_hexes: 8,
            prune: false,
            threads: None,
            checkpoint_dir: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("checkpoint was written with different search settings")]
    SettingsMismatch,
    #[error("could not start worker threads: {0}")]
    Threads(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { hex_count: usize, witness: Witness },
    /// The target was not reached within `max_hexes`.
    Exhausted { max_hexes: usize, patterns: usize },
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SearchError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SearchError::Threads(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Fresh ledger, or the one checkpointed in the options' directory.
fn start_ledger(options: &SearchOptions) -> Result<SearchLedger, SearchError> {
    if let Some(dir) = &options.checkpoint_dir {
        if checkpoint::exists(dir) {
            let ledger = load_checkpoint(dir)?;
            if ledger.settings != options.settings {
                return Err(SearchError::SettingsMismatch);
            }
            return Ok(ledger);
        }
    }
    Ok(SearchLedger::new(options.settings))
}

fn after_layer(ledger: &SearchLedger, options: &SearchOptions) -> Result<(), SearchError> {
    if let Some(dir) = &options.checkpoint_dir {
        save_checkpoint(ledger, dir)?;
    }
    Ok(())
}

/// Runs the layered search until `target` is reached or `max_hexes` is
/// exhausted, returning the ledger as well.
pub fn search_ledger(
    target: Option<&CanonicalCode>,
    target_quads: Option<usize>,
    options: &SearchOptions,
    mut on_layer: impl FnMut(&SearchLedger, &[CanonicalCode]) + Send,
) -> Result<(SearchLedger, Option<Witness>), SearchError> {
    let mut ledger = start_ledger(options)?;
    with_threads(options.threads, move || {
        let found = |l: &SearchLedger| target.and_then(|t| l.get(t)).and_then(|r| r.min_any().map(|_| r.clone()));
        if options.checkpoint_dir.is_some() && ledger.layer == 1 {
            after_layer(&ledger, options)?;
        }
        while found(&ledger).is_none() && ledger.layer < options.max_hexes {
            let remaining = options.max_hexes - ledger.layer;
            let prune = options.prune.then_some(target_quads).flatten();
            let added = ledger.expand_layer(|p| match prune {
                Some(ft) => p.surface().len().abs_diff(ft).div_ceil(4) <= remaining,
                None => true,
            });
            after_layer(&ledger, options)?;
            on_layer(&ledger, &added);
        }
        let witness = found(&ledger).map(|r| {
            let best = [r.odd, r.even].into_iter().flatten().min_by_key(Witness::hex_count);
            best.expect("found record has a witness")
        });
        Ok((ledger, witness))
    })?
}

/// Smallest packing whose surface has canonical code `target`.
pub fn search_min_packing(
    target: &CanonicalCode,
    options: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let quads = target.quad_count();
    let (ledger, witness) = search_ledger(Some(target), Some(quads), options, |_, _| {})?;
    Ok(match witness {
        Some(w) => SearchOutcome::Found { hex_count: w.hex_count(), witness: w },
        None => SearchOutcome::Exhausted { max_hexes: options.max_hexes, patterns: ledger.len() },
    })
}

/// A pattern filled by packings of both parities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateCandidate {
    pub code: CanonicalCode,
    pub odd: Witness,
    pub even: Witness,
}

/// Patterns that acquire both parities within `max_hexes`, in the order
/// found. Each candidate is checked by replaying both witnesses.
pub fn find_templates(options: &SearchOptions) -> Result<Vec<TemplateCandidate>, SearchError> {
    let mut found = Vec::new();
    let settings = options.settings;
    let options = SearchOptions { prune: false, ..options.clone() };
    search_ledger(None, None, &options, |ledger, added| {
        for code in added {
            let r = &ledger.records[code];
            if let (Some(odd), Some(even)) = (&r.odd, &r.even) {
                let a = replay_witness(odd, &settings.rules).expect("ledger witnesses replay");
                let b = replay_witness(even, &settings.rules).expect("ledger witnesses replay");
                assert_eq!(a.code(settings.reflection_invariant), *code);
                assert_eq!(b.code(settings.reflection_invariant), *code);
                found.push(TemplateCandidate { code: code.clone(), odd: odd.clone(), even: even.clone() });
            }
        }
    })?;
    Ok(found)
}
