use std::borrow::Cow;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Barrier, Mutex};
use std::thread;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::TargetTable;
use crate::dynamics::{
    step_range, NeuronId, NeuronKernel, NeuronStateArrays, PoissonDrive, SpikeEvent,
};
use crate::error::{Error, Result};
use crate::model::{validate, NetworkSpec};
use crate::placement::{pin_current_thread, PlacementPlan};
use crate::rng::{self, Domain};
use crate::scalar::Scalar;

use super::partition::{partition_neurons, VirtualProcessPartition};
use super::record::{merge_records, PopulationBounds, SpikeRecord};
use super::ring::RingBuffer;
use super::timers::PhaseTimers;

/// Largest supported number of virtual processes.
pub const MAX_VPS: usize = 1024;

#[derive(Clone, Debug)]
pub struct RunOptions<'a> {
    pub n_vp: usize,
    pub record_spikes: bool,
    /// Pin worker `i` to `placement.cores[i]`.
    pub placement: Option<&'a PlacementPlan>,
}

impl RunOptions<'_> {
    pub fn new(n_vp: usize) -> Self {
        Self {
            n_vp,
            record_spikes: true,
            placement: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    /// Spikes emitted in the measured window.
    pub spikes_emitted: u64,
    /// Synapses traversed for those spikes, i.e. the sum of their emitters'
    /// out-degrees.
    pub synaptic_events_delivered: u64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: SpikeRecord,
    pub timers: PhaseTimers,
    pub counts: RunCounts,
    pub n_vp: usize,
    /// Every worker was bound to its planned core.
    pub pinned: bool,
    /// Unix time at the start and end of the measured window, seconds.
    pub wall_start: f64,
    pub wall_end: f64,
}

const DELIVER: usize = 0;
const UPDATE: usize = 1;
const COMMUNICATE: usize = 2;

struct Shared {
    barrier: Barrier,
    outboxes: Vec<Mutex<Vec<SpikeEvent>>>,
    /// Last phase durations of each vp, ns, indexed [phase][vp].
    phase_ns: [Vec<AtomicU64>; 3],
}

struct Plan<'a, T> {
    table: &'a TargetTable<T>,
    part: VirtualProcessPartition,
    kernels: Vec<NeuronKernel<T>>,
    drives: Vec<PoissonDrive<T>>,
    transient_steps: u64,
    end_step: u64,
    interval: u64,
    slots_min: usize,
    slots_max: usize,
    seed: u64,
    record: bool,
    ranges: Vec<Range<usize>>,
    cores: Option<&'a [usize]>,
}

struct WorkerResult {
    record: Vec<SpikeEvent>,
    emitted: u64,
    delivered: u64,
    pinned: bool,
    window: Option<(Instant, Instant, SystemTime, SystemTime, [u64; 3])>,
}

/// Simulates `t_transient` followed by `t_model` of `spec` on `opts.n_vp`
/// worker threads. Only the model window is timed and recorded.
///
/// `table` must have been built from `spec`; if it was laid out for a
/// different number of virtual processes it is regrouped first, outside the
/// measured window.
pub fn run_simulation<T: Scalar>(
    spec: &NetworkSpec,
    table: &TargetTable<T>,
    opts: &RunOptions<'_>,
) -> Result<RunOutput> {
    let n_vp = opts.n_vp;
    if n_vp == 0 || n_vp > MAX_VPS {
        return Err(Error::Config(format!(
            "n_vp must be in 1..={MAX_VPS}, got {n_vp}"
        )));
    }
    validate(spec).map_err(Error::Invalid)?;
    let n = spec.total_neurons() as usize;
    if table.n_sources() != n {
        return Err(Error::Config(format!(
            "table has {} sources but the network has {n} neurons",
            table.n_sources()
        )));
    }
    let g = &spec.grid;
    let (min_d, max_d) = (g.min_delay_steps(), g.max_delay_steps());
    if let Some((lo, hi)) = table.min_max_delay() {
        if (lo as u64) < min_d || (hi as u64) > max_d {
            return Err(Error::Config(format!(
                "table delays {lo}..={hi} steps fall outside the grid's {min_d}..={max_d}"
            )));
        }
    }
    let cores = match opts.placement {
        Some(p) if p.cores.len() < n_vp => {
            return Err(Error::Config(format!(
                "placement has {} cores for {n_vp} workers",
                p.cores.len()
            )))
        }
        Some(p) => Some(p.cores.as_slice()),
        None => None,
    };

    let table: Cow<'_, TargetTable<T>> = if table.n_vp() == n_vp {
        Cow::Borrowed(table)
    } else {
        Cow::Owned(table.regrouped(n_vp))
    };
    let h = g.h;
    let plan = Plan {
        table: &table,
        part: partition_neurons(n, n_vp)?,
        kernels: spec
            .populations
            .iter()
            .map(|p| NeuronKernel::new(&p.params, h, p.dc_current))
            .collect::<Result<_>>()?,
        drives: spec
            .populations
            .iter()
            .map(|p| PoissonDrive::new(p.ext_rate, p.ext_indegree, p.ext_weight, h))
            .collect(),
        transient_steps: g.transient_steps(),
        end_step: g.transient_steps() + g.model_steps(),
        interval: min_d,
        slots_min: min_d as usize,
        slots_max: max_d as usize,
        seed: spec.seed,
        record: opts.record_spikes,
        ranges: spec
            .population_ranges()
            .into_iter()
            .map(|r| r.start as usize..r.end as usize)
            .collect(),
        cores,
    };
    let v_init: Vec<T> = spec
        .populations
        .iter()
        .map(|p| T::of(p.params.e_l))
        .collect();

    let shared = Shared {
        barrier: Barrier::new(n_vp),
        outboxes: (0..n_vp).map(|_| Mutex::new(Vec::new())).collect(),
        phase_ns: std::array::from_fn(|_| (0..n_vp).map(|_| AtomicU64::new(0)).collect()),
    };

    let results: Vec<WorkerResult> = thread::scope(|s| {
        let handles: Vec<_> = (0..n_vp)
            .map(|vp| {
                let plan = &plan;
                let shared = &shared;
                let v_init = &v_init;
                s.spawn(move || Worker::new(vp, plan, v_init).run(plan, shared))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });

    let (t0, t1, w0, w1, phase) = results[0].window.expect("vp 0 measures the window");
    let total_ns = t1.duration_since(t0).as_nanos() as u64;
    let timers =
        PhaseTimers::from_nanos(phase[UPDATE], phase[DELIVER], phase[COMMUNICATE], total_ns);
    let epoch = |t: SystemTime| {
        t.duration_since(UNIX_EPOCH)
            .map_or(0.0, |d| d.as_secs_f64())
    };

    let counts = RunCounts {
        spikes_emitted: results.iter().map(|r| r.emitted).sum(),
        synaptic_events_delivered: results.iter().map(|r| r.delivered).sum(),
    };
    let pinned = cores.is_some() && results.iter().all(|r| r.pinned);
    let events = merge_records(results.into_iter().map(|r| r.record).collect());
    Ok(RunOutput {
        record: SpikeRecord {
            events,
            h,
            start_step: plan.transient_steps,
            end_step: plan.end_step,
            populations: PopulationBounds::from_spec(spec),
        },
        timers,
        counts,
        n_vp,
        pinned,
        wall_start: epoch(w0),
        wall_end: epoch(w1),
    })
}

struct Worker<T> {
    vp: usize,
    states: NeuronStateArrays<T>,
    /// (local index range, population)
    segments: Vec<(Range<usize>, usize)>,
    rngs: Vec<ChaCha8Rng>,
    ring: RingBuffer<T>,
    buf_ex: Vec<T>,
    buf_in: Vec<T>,
    register: Vec<SpikeEvent>,
    outgoing: Vec<SpikeEvent>,
    record: Vec<SpikeEvent>,
    emitted: u64,
    delivered: u64,
}

impl<T: Scalar> Worker<T> {
    fn new(vp: usize, plan: &Plan<'_, T>, v_init: &[T]) -> Self {
        let part = plan.part;
        let n_local = part.local_count(vp);
        let mut states = NeuronStateArrays::new(0, T::zero());
        let mut segments = Vec::new();
        for (pop, ids) in plan.ranges.iter().enumerate() {
            let local = part.local_range(vp, ids.clone());
            states.extend(local.len(), v_init[pop]);
            if !local.is_empty() {
                segments.push((local, pop));
            }
        }
        let rngs = part
            .neurons_of(vp)
            .map(|id| rng::stream(plan.seed, Domain::ExternalInput, id as u64))
            .collect();
        Self {
            vp,
            states,
            segments,
            rngs,
            ring: RingBuffer::new(n_local, plan.slots_min, plan.slots_max),
            buf_ex: vec![T::zero(); n_local],
            buf_in: vec![T::zero(); n_local],
            register: Vec::new(),
            outgoing: Vec::new(),
            record: Vec::new(),
            emitted: 0,
            delivered: 0,
        }
    }

    fn run(mut self, plan: &Plan<'_, T>, shared: &Shared) -> WorkerResult {
        let pinned = plan.cores.is_some_and(|c| pin_current_thread(c[self.vp]));
        let lead = self.vp == 0;
        let mut acc = [0u64; 3];
        let mut window = None;
        let mut start = 0;
        while start < plan.end_step {
            // intervals restart at the window boundary so the window is
            // measured from a barrier
            let limit = if start < plan.transient_steps {
                plan.transient_steps
            } else {
                plan.end_step
            };
            let end = (start + plan.interval).min(limit);
            let measured = start >= plan.transient_steps;
            if start == plan.transient_steps {
                window = Some((Instant::now(), SystemTime::now()));
                shared.barrier.wait();
            }

            let t = Instant::now();
            self.deliver(plan);
            self.finish_phase(shared, DELIVER, t, lead && measured, &mut acc);

            let t = Instant::now();
            self.update(plan, start..end);
            std::mem::swap(
                &mut *shared.outboxes[self.vp].lock().unwrap(),
                &mut self.outgoing,
            );
            self.outgoing.clear();
            self.finish_phase(shared, UPDATE, t, lead && measured, &mut acc);

            let t = Instant::now();
            self.communicate(shared);
            self.finish_phase(shared, COMMUNICATE, t, lead && measured, &mut acc);

            start = end;
        }
        let window_end = (Instant::now(), SystemTime::now());

        // spikes of the final interval are never delivered into buffers but
        // still count as synaptic events
        for ev in &self.register {
            if ev.step >= plan.transient_steps {
                self.delivered += plan.table.local_run(ev.neuron, self.vp).len() as u64;
            }
        }

        let window = match window {
            Some((t0, w0)) if lead => Some((t0, window_end.0, w0, window_end.1, acc)),
            // empty model window
            None if lead => Some((window_end.0, window_end.0, window_end.1, window_end.1, acc)),
            _ => None,
        };
        WorkerResult {
            record: self.record,
            emitted: self.emitted,
            delivered: self.delivered,
            pinned,
            window,
        }
    }

    /// Publishes this vp's phase duration, waits for every vp, and lets the
    /// lead accumulate the slowest.
    fn finish_phase(
        &self,
        shared: &Shared,
        phase: usize,
        started: Instant,
        accumulate: bool,
        acc: &mut [u64; 3],
    ) {
        let ns = started.elapsed().as_nanos() as u64;
        shared.phase_ns[phase][self.vp].store(ns, Ordering::Relaxed);
        shared.barrier.wait();
        if accumulate {
            acc[phase] += shared.phase_ns[phase]
                .iter()
                .map(|a| a.load(Ordering::Relaxed))
                .max()
                .unwrap_or(0);
        }
    }

    fn deliver(&mut self, plan: &Plan<'_, T>) {
        let n_vp = plan.part.n_vp as NeuronId;
        for ev in &self.register {
            let run = plan.table.local_run(ev.neuron, self.vp);
            for syn in run {
                let local = (syn.target / n_vp) as usize;
                self.ring.add(
                    local,
                    syn.channel,
                    ev.step + syn.delay_steps as u64,
                    syn.weight,
                );
            }
            if ev.step >= plan.transient_steps {
                self.delivered += run.len() as u64;
            }
        }
    }

    fn update(&mut self, plan: &Plan<'_, T>, steps: Range<u64>) {
        let n_vp = plan.part.n_vp;
        let vp = self.vp;
        for step in steps {
            self.ring.take(step, &mut self.buf_ex, &mut self.buf_in);
            let first_new = self.outgoing.len();
            for (range, pop) in &self.segments {
                let drive = &plan.drives[*pop];
                if !drive.is_silent() {
                    let target = if drive.weight >= T::zero() {
                        &mut self.buf_ex
                    } else {
                        &mut self.buf_in
                    };
                    for i in range.clone() {
                        target[i] += drive.sample(&mut self.rngs[i]);
                    }
                }
                let outgoing = &mut self.outgoing;
                step_range(
                    &mut self.states,
                    range.clone(),
                    &plan.kernels[*pop],
                    &self.buf_ex[range.clone()],
                    &self.buf_in[range.clone()],
                    |i| {
                        outgoing.push(SpikeEvent {
                            step,
                            neuron: (i * n_vp + vp) as NeuronId,
                        })
                    },
                );
            }
            if step >= plan.transient_steps {
                let new = &self.outgoing[first_new..];
                self.emitted += new.len() as u64;
                if plan.record {
                    self.record.extend_from_slice(new);
                }
            }
        }
    }

    /// All-gather of the spikes every vp emitted in this interval.
    fn communicate(&mut self, shared: &Shared) {
        self.register.clear();
        for outbox in &shared.outboxes {
            self.register.extend_from_slice(&outbox.lock().unwrap());
        }
        self.register.sort_unstable();
    }
}
