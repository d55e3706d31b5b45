//! Executes parsed scenario events against one algorithm instance and
//! accumulates a report.
//!
//! Everything that lands in the report's `value`, `sample_n` and
//! `std_error` columns is a pure function of (script, seed); wall-clock
//! readings are confined to the `wall_ms` and `mkps` columns.

use std::collections::HashMap;
use std::path::Path;

use anchorhash::anchor::{AnchorState, BucketHasher};
use anchorhash::baselines::{HrwState, MaglevState, RingState};
use anchorhash::eval::{
    bucket_churn_cost, bucket_throughput, classify, event_rng, resource_churn_cost,
    resource_throughput, trace_statistics, ChurnEvent, KeyCensus, KeyStream, ScenarioReport,
};
use anchorhash::hashing::Key;
use anchorhash::resource::{ResourceHasher, ResourceId};
use anchorhash::snapshot::AnyState;
use anchorhash::tiers::{NaiveState, ReducedState};
use anchorhash::wrapper::Wrapper;
use anchorhash::{Error, SnapshotError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::script::{Event, Metric, MetricSet, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    Anchor,
    AnchorNaive,
    AnchorReduced,
    Hrw,
    Ring,
    Maglev,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Anchor => "anchor",
            Algo::AnchorNaive => "anchor-naive",
            Algo::AnchorReduced => "anchor-reduced",
            Algo::Hrw => "hrw",
            Algo::Ring => "ring",
            Algo::Maglev => "maglev",
        }
    }

    fn tier(self) -> &'static str {
        match self {
            Algo::Anchor => "minimal",
            Algo::AnchorNaive => "naive",
            Algo::AnchorReduced => "reduced",
            Algo::Hrw => "hrw",
            Algo::Ring => "ring",
            Algo::Maglev => "maglev",
        }
    }

    fn is_anchor_family(self) -> bool {
        matches!(self, Algo::Anchor | Algo::AnchorNaive | Algo::AnchorReduced)
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Precondition breach while executing; names the 1-based event index.
    Exec { event: usize, message: String },
    /// Snapshot file unreadable or corrupt.
    Integrity(SnapshotError),
}

const PROBE_TAG: u64 = 0x50_52_4F_42_45_53_45_54;
const LOOKUP_TAG: u64 = 0x4C_4F_4F_4B_55_50_31_31;
const MEASURE_TAG: u64 = 0x4D_45_41_53_55_52_45_31;

pub struct Runner {
    algo: Algo,
    seed: u64,
    copies: u32,
    table_size: Option<u64>,
    default_keys: usize,
    rng: ChaCha8Rng,
    lookup_stream: KeyStream,
    measure_stream: KeyStream,
    probe_keys: Vec<Key>,
    state: Option<AnyState>,
    probe: Vec<u32>,
    registry: HashMap<ResourceId, u32>,
    report: ScenarioReport,
}

fn bucket_view(state: &AnyState) -> Option<&dyn BucketHasher> {
    match state {
        AnyState::Minimal(s) => Some(s),
        AnyState::Naive(s) => Some(s),
        AnyState::Reduced(s) => Some(s),
        _ => None,
    }
}

fn bucket_view_mut(state: &mut AnyState) -> Option<&mut dyn BucketHasher> {
    match state {
        AnyState::Minimal(s) => Some(s),
        AnyState::Naive(s) => Some(s),
        AnyState::Reduced(s) => Some(s),
        _ => None,
    }
}

fn resource_view(state: &AnyState) -> Option<&dyn ResourceHasher> {
    match state {
        AnyState::WrappedMinimal(s) => Some(s),
        AnyState::WrappedNaive(s) => Some(s),
        AnyState::WrappedReduced(s) => Some(s),
        AnyState::Hrw(s) => Some(s),
        AnyState::Ring(s) => Some(s),
        AnyState::Maglev(s) => Some(s),
        _ => None,
    }
}

fn resource_view_mut(state: &mut AnyState) -> Option<&mut dyn ResourceHasher> {
    match state {
        AnyState::WrappedMinimal(s) => Some(s),
        AnyState::WrappedNaive(s) => Some(s),
        AnyState::WrappedReduced(s) => Some(s),
        AnyState::Hrw(s) => Some(s),
        AnyState::Ring(s) => Some(s),
        AnyState::Maglev(s) => Some(s),
        _ => None,
    }
}

/// The anchor mechanism behind the state, if any: bare tiers directly,
/// wrapped tiers through the wrapper. Used for lookup-complexity traces.
fn anchor_view(state: &AnyState) -> Option<&dyn BucketHasher> {
    match state {
        AnyState::Minimal(s) => Some(s),
        AnyState::Naive(s) => Some(s),
        AnyState::Reduced(s) => Some(s),
        AnyState::WrappedMinimal(s) => Some(s.state()),
        AnyState::WrappedNaive(s) => Some(s.state()),
        AnyState::WrappedReduced(s) => Some(s.state()),
        _ => None,
    }
}

impl Runner {
    pub fn new(
        algo: Algo,
        seed: u64,
        copies: u32,
        table_size: Option<u64>,
        default_keys: usize,
        scenario: &str,
    ) -> Runner {
        let probe_keys = KeyStream::new(seed ^ PROBE_TAG).take_keys(default_keys.max(1));
        Runner {
            algo,
            seed,
            copies,
            table_size,
            default_keys,
            rng: event_rng(seed),
            lookup_stream: KeyStream::new(seed ^ LOOKUP_TAG),
            measure_stream: KeyStream::new(seed ^ MEASURE_TAG),
            probe_keys,
            state: None,
            probe: Vec::new(),
            registry: HashMap::new(),
            report: ScenarioReport::new(algo.name(), scenario, seed),
        }
    }

    pub fn run(mut self, events: &[Event]) -> Result<ScenarioReport, RunError> {
        for (i, event) in events.iter().enumerate() {
            self.dispatch(i + 1, event)?;
        }
        if let Some(state) = &self.state {
            if let Some(inner) = anchor_view(state) {
                self.report.a = Some(inner.capacity());
                self.report.w = Some(inner.working_count());
            } else if let Some(res) = resource_view(state) {
                self.report.w = u32::try_from(res.resource_count()).ok();
            }
        }
        Ok(self.report)
    }

    fn exec_err(&self, event: usize, message: impl Into<String>) -> RunError {
        RunError::Exec {
            event,
            message: message.into(),
        }
    }

    fn ensure_init(&self, event: usize) -> Result<(), RunError> {
        if self.state.is_some() {
            Ok(())
        } else {
            Err(RunError::Exec {
                event,
                message: "no state initialized".into(),
            })
        }
    }

    fn dispatch(&mut self, idx: usize, event: &Event) -> Result<(), RunError> {
        match event {
            Event::Init { a, w, resources } => self.init(idx, *a, *w, resources.as_deref()),
            Event::Remove(target) => self.remove(idx, target),
            Event::Add(id) => self.add(idx, id.as_deref()),
            Event::Lookup { n } => self.lookup(idx, *n),
            Event::Measure {
                metrics,
                keys,
                trials,
            } => self.measure(idx, metrics, *keys, *trials),
            Event::DumpState(path) => {
                self.ensure_init(idx)?;
                self.state
                    .as_ref()
                    .unwrap()
                    .save(Path::new(path))
                    .map_err(RunError::Integrity)
            }
            Event::Load(path) => self.load(idx, path),
        }
    }

    fn init(
        &mut self,
        idx: usize,
        a: Option<u32>,
        w: Option<u32>,
        resources: Option<&[String]>,
    ) -> Result<(), RunError> {
        let seed = self.seed;
        let built = match resources {
            Some(names) => {
                if w.is_some() {
                    return Err(self.exec_err(idx, "w= conflicts with resources="));
                }
                let mut ids = Vec::with_capacity(names.len());
                for name in names {
                    ids.push(name.parse::<ResourceId>().map_err(|e| {
                        self.exec_err(idx, format!("bad resource id '{name}': {e}"))
                    })?);
                }
                let n = ids.len() as u32;
                match self.algo {
                    Algo::Anchor => Wrapper::new(a.unwrap_or(n), seed, ids)
                        .map(AnyState::WrappedMinimal),
                    Algo::AnchorNaive => NaiveState::new(a.unwrap_or(n), n, seed)
                        .and_then(|st| Wrapper::with_state(st, ids))
                        .map(AnyState::WrappedNaive),
                    Algo::AnchorReduced => ReducedState::new(a.unwrap_or(n), n, seed)
                        .and_then(|st| Wrapper::with_state(st, ids))
                        .map(AnyState::WrappedReduced),
                    Algo::Hrw | Algo::Ring | Algo::Maglev => {
                        if a.is_some() {
                            return Err(self
                                .exec_err(idx, format!("a= not supported for {}", self.algo.name())));
                        }
                        match self.algo {
                            Algo::Hrw => HrwState::new(seed, ids).map(AnyState::Hrw),
                            Algo::Ring => {
                                RingState::new(seed, self.copies, ids).map(AnyState::Ring)
                            }
                            _ => MaglevState::new(seed, self.table_size, ids)
                                .map(AnyState::Maglev),
                        }
                    }
                }
            }
            None => {
                if !self.algo.is_anchor_family() {
                    return Err(self.exec_err(
                        idx,
                        format!("init for {} requires resources=", self.algo.name()),
                    ));
                }
                let a = a.expect("parser requires a= or resources=");
                let w = w.unwrap_or(a);
                match self.algo {
                    Algo::Anchor => AnchorState::new(a, w, seed).map(AnyState::Minimal),
                    Algo::AnchorNaive => NaiveState::new(a, w, seed).map(AnyState::Naive),
                    _ => ReducedState::new(a, w, seed).map(AnyState::Reduced),
                }
            }
        };
        let state = built.map_err(|e| self.exec_err(idx, e.to_string()))?;
        self.install(state);
        let working = self.working_size();
        let row = self.report.row(format!("ev{idx:02}-init"), "working", working as f64);
        row.sample_n = Some(self.probe.len() as u64);
        Ok(())
    }

    /// Makes `state` current: registers its resources for stable probe
    /// tokens and recomputes the probe assignments.
    fn install(&mut self, state: AnyState) {
        if let Some(res) = resource_view(&state) {
            for id in res.resources() {
                self.register(id);
            }
        }
        self.state = Some(state);
        self.probe = self.assignments(&self.probe_keys);
    }

    fn register(&mut self, id: ResourceId) -> u32 {
        let next = self.registry.len() as u32;
        *self.registry.entry(id).or_insert(next)
    }

    fn working_size(&self) -> usize {
        let state = self.state.as_ref().expect("installed");
        match bucket_view(state) {
            Some(b) => b.working_count() as usize,
            None => resource_view(state).expect("resource state").resource_count(),
        }
    }

    fn assignments(&self, keys: &[Key]) -> Vec<u32> {
        let state = self.state.as_ref().expect("installed");
        match bucket_view(state) {
            Some(b) => keys.iter().map(|&k| b.get_bucket(k)).collect(),
            None => {
                let res = resource_view(state).expect("resource state");
                keys.iter()
                    .map(|&k| self.registry[res.resolve(k)])
                    .collect()
            }
        }
    }

    fn disruption_rows(
        &mut self,
        idx: usize,
        label: String,
        event: ChurnEvent<u32>,
    ) -> Result<(), RunError> {
        let next = self.assignments(&self.probe_keys);
        let event_ref = match &event {
            ChurnEvent::Removed(t) => ChurnEvent::Removed(t),
            ChurnEvent::Added(t) => ChurnEvent::Added(t),
        };
        let census = classify(&self.probe, &next, event_ref)
            .map_err(|e| self.exec_err(idx, e.to_string()))?;
        let n = census.total();
        let moved = (census.legitimate + census.wrongful) as f64 / n as f64;
        let row = self
            .report
            .row(label.clone(), "wrongful_fraction", census.wrongful_fraction());
        row.sample_n = Some(n);
        let row = self.report.row(label, "moved_fraction", moved);
        row.sample_n = Some(n);
        self.probe = next;
        Ok(())
    }

    fn remove(&mut self, idx: usize, target: &Target) -> Result<(), RunError> {
        self.ensure_init(idx)?;
        let state = self.state.as_mut().unwrap();
        if let Some(bucket) = bucket_view_mut(state) {
            let b = match target {
                Target::Named(s) => s
                    .parse::<u32>()
                    .map_err(|_| RunError::Exec {
                        event: idx,
                        message: format!("bucket id '{s}' is not an integer"),
                    })?,
                Target::Random => {
                    let working = bucket.working_set();
                    working[self.rng.gen_range(0..working.len())]
                }
            };
            bucket
                .remove_bucket(b)
                .map_err(|e| RunError::Exec {
                    event: idx,
                    message: e.to_string(),
                })?;
            self.disruption_rows(idx, format!("ev{idx:02}-remove-{b}"), ChurnEvent::Removed(b))
        } else {
            let res = resource_view_mut(state).expect("resource state");
            let id: ResourceId = match target {
                Target::Named(s) => s.parse().map_err(|e: Error| RunError::Exec {
                    event: idx,
                    message: format!("bad resource id '{s}': {e}"),
                })?,
                Target::Random => {
                    let ids = res.resources();
                    ids[self.rng.gen_range(0..ids.len())].clone()
                }
            };
            res.remove_resource(&id).map_err(|e| RunError::Exec {
                event: idx,
                message: e.to_string(),
            })?;
            let token = self.registry[&id];
            self.disruption_rows(
                idx,
                format!("ev{idx:02}-remove-{id}"),
                ChurnEvent::Removed(token),
            )
        }
    }

    fn add(&mut self, idx: usize, id: Option<&str>) -> Result<(), RunError> {
        self.ensure_init(idx)?;
        let state = self.state.as_mut().unwrap();
        if let Some(bucket) = bucket_view_mut(state) {
            if id.is_some() {
                return Err(self.exec_err(
                    idx,
                    "add takes no id for bucket-level algorithms (revival is LIFO)",
                ));
            }
            let b = bucket.add_bucket().map_err(|e| RunError::Exec {
                event: idx,
                message: e.to_string(),
            })?;
            self.disruption_rows(idx, format!("ev{idx:02}-add-{b}"), ChurnEvent::Added(b))
        } else {
            let name = id.ok_or_else(|| RunError::Exec {
                event: idx,
                message: "add requires a resource id".into(),
            })?;
            let parsed: ResourceId = name.parse().map_err(|e: Error| RunError::Exec {
                event: idx,
                message: format!("bad resource id '{name}': {e}"),
            })?;
            let token = self.register(parsed.clone());
            let res = resource_view_mut(self.state.as_mut().unwrap()).expect("resource state");
            res.add_resource(parsed.clone()).map_err(|e| RunError::Exec {
                event: idx,
                message: e.to_string(),
            })?;
            self.disruption_rows(
                idx,
                format!("ev{idx:02}-add-{parsed}"),
                ChurnEvent::Added(token),
            )
        }
    }

    fn lookup(&mut self, idx: usize, n: usize) -> Result<(), RunError> {
        self.ensure_init(idx)?;
        let keys = self.lookup_stream.take_keys(n);
        let tokens = self.assignments(&keys);
        let mut digest = 0xCBF2_9CE4_8422_2325u64;
        for token in tokens {
            for byte in token.to_le_bytes() {
                digest ^= u64::from(byte);
                digest = digest.wrapping_mul(0x100_0000_01B3);
            }
        }
        let value = (digest % (1u64 << 32)) as f64;
        let row = self
            .report
            .row(format!("ev{idx:02}-lookup"), "lookup_digest", value);
        row.sample_n = Some(n as u64);
        Ok(())
    }

    fn measure(
        &mut self,
        idx: usize,
        metrics: &MetricSet,
        keys: Option<usize>,
        trials: Option<u32>,
    ) -> Result<(), RunError> {
        self.ensure_init(idx)?;
        let nkeys = keys.unwrap_or(self.default_keys);
        let trials = trials.unwrap_or(100);
        let sample = self.measure_stream.take_keys(nkeys);
        let anchor_backed = anchor_view(self.state.as_ref().unwrap()).is_some();
        let list: Vec<Metric> = match metrics {
            MetricSet::All => {
                let mut all = vec![Metric::Balance];
                if anchor_backed {
                    all.push(Metric::Complexity);
                }
                all.extend([Metric::UpdateCost, Metric::Throughput]);
                all
            }
            MetricSet::List(list) => {
                if list.contains(&Metric::Complexity) && !anchor_backed {
                    return Err(self.exec_err(
                        idx,
                        format!(
                            "complexity metrics require an anchor-family algorithm, not {}",
                            self.algo.name()
                        ),
                    ));
                }
                list.clone()
            }
        };
        for metric in list {
            self.measure_one(idx, metric, &sample, trials)?;
        }
        Ok(())
    }

    fn measure_one(
        &mut self,
        idx: usize,
        metric: Metric,
        sample: &[Key],
        trials: u32,
    ) -> Result<(), RunError> {
        let label = format!("ev{idx:02}-measure");
        match metric {
            Metric::Balance => {
                let state = self.state.as_ref().unwrap();
                let census = match bucket_view(state) {
                    Some(b) => {
                        let rank: HashMap<u32, usize> = b
                            .working_set()
                            .into_iter()
                            .enumerate()
                            .map(|(i, bucket)| (bucket, i))
                            .collect();
                        KeyCensus::collect(sample, rank.len(), |k| rank[&b.get_bucket(k)])
                    }
                    None => {
                        let res = resource_view(state).expect("resource state");
                        let rank: HashMap<ResourceId, usize> = res
                            .resources()
                            .into_iter()
                            .enumerate()
                            .map(|(i, id)| (id, i))
                            .collect();
                        KeyCensus::collect(sample, rank.len(), |k| rank[res.resolve(k)])
                    }
                };
                let oversub = census
                    .oversubscription_percent()
                    .map_err(|e| self.exec_err(idx, e.to_string()))?;
                let n = census.total();
                let row = self
                    .report
                    .row(label.clone(), "oversubscription_percent", oversub);
                row.sample_n = Some(n);
                let row = self.report.row(label, "chi_square", census.chi_square());
                row.sample_n = Some(n);
            }
            Metric::Complexity => {
                let state = self.state.as_ref().unwrap();
                let inner = anchor_view(state).ok_or_else(|| RunError::Exec {
                    event: idx,
                    message: "complexity metrics require an anchor-family algorithm".into(),
                })?;
                let stats = trace_statistics(inner, sample.iter().copied());
                for (name, dist) in [("tau", &stats.tau), ("xi", &stats.xi)] {
                    let row =
                        self.report
                            .row(label.clone(), format!("{name}_mean"), dist.mean);
                    row.sample_n = Some(dist.samples);
                    row.std_error = Some(dist.sem);
                    let row = self
                        .report
                        .row(label.clone(), format!("{name}_std"), dist.std);
                    row.sample_n = Some(dist.samples);
                }
            }
            Metric::UpdateCost => {
                let state = self.state.as_mut().unwrap();
                let cost = match bucket_view_mut(state) {
                    Some(b) => bucket_churn_cost(b, trials),
                    None => resource_churn_cost(resource_view_mut(state).unwrap(), trials),
                }
                .map_err(|e| RunError::Exec {
                    event: idx,
                    message: e.to_string(),
                })?;
                let row = self
                    .report
                    .row(label, "update_ops_per_cycle", cost.ops_per_cycle);
                row.sample_n = Some(u64::from(cost.trials));
                row.wall_ms = Some(cost.wall_nanos_per_cycle / 1e6);
                // Table-based algorithms may settle on an equivalent but
                // reshuffled layout after churn; refresh the probe state.
                self.probe = self.assignments(&self.probe_keys);
            }
            Metric::Throughput => {
                let state = self.state.as_ref().unwrap();
                let t = match bucket_view(state) {
                    Some(b) => bucket_throughput(b, sample),
                    None => resource_throughput(resource_view(state).unwrap(), sample),
                };
                let row = self
                    .report
                    .row(label, "throughput_lookups", t.lookups as f64);
                row.sample_n = Some(t.lookups);
                row.wall_ms = Some(t.wall_seconds * 1e3);
                row.mkps = Some(t.mkps);
            }
        }
        Ok(())
    }

    fn load(&mut self, idx: usize, path: &str) -> Result<(), RunError> {
        let loaded = AnyState::load(Path::new(path)).map_err(RunError::Integrity)?;
        if loaded.tier() != self.algo.tier() {
            let err = SnapshotError::TierMismatch {
                expected: self.algo.tier().to_string(),
                found: loaded.tier().to_string(),
            };
            return Err(self.exec_err(idx, err.to_string()));
        }
        self.install(loaded);
        let working = self.working_size();
        let row = self
            .report
            .row(format!("ev{idx:02}-load"), "working", working as f64);
        row.sample_n = Some(self.probe.len() as u64);
        Ok(())
    }
}
