//! Reproducible construction of the synapse table.
//!
//! Rule `r` is realized in chunks of [`CHUNK`] consecutive synapse indices;
//! chunk `c` draws from stream `(r << 32) | c` of the connectivity generator.
//! The realized set of synapses therefore depends only on the spec and its
//! seed, never on the number of virtual processes or worker threads.

use std::io::{Read, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::NeuronId;
use crate::error::{Error, Result};
use crate::model::{validate, ConnectionRule, NetworkSpec, Sign};
use crate::rng::{self, Domain};
use crate::scalar::Scalar;

/// Synapse indices realized from one RNG stream.
pub const CHUNK: u64 = 1 << 16;

/// Redraw budget for weights whose sign contradicts the rule.
const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Channel {
    Excitatory = 0,
    Inhibitory = 1,
}

impl From<Sign> for Channel {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Excitatory => Channel::Excitatory,
            Sign::Inhibitory => Channel::Inhibitory,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Synapse<T> {
    pub target: NeuronId,
    /// pA, signed
    pub weight: T,
    pub delay_steps: u16,
    pub channel: Channel,
}

/// Synapses grouped by source neuron (compressed sparse rows).
///
/// Within a source, entries are ordered by `(target mod n_vp, target, delay,
/// weight)` so that each virtual process finds its targets as one
/// contiguous run.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetTable<T> {
    n_vp: usize,
    offsets: Vec<usize>,
    synapses: Vec<Synapse<T>>,
}

/// One synapse in a layout-independent form, for comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalEntry {
    pub source: NeuronId,
    pub target: NeuronId,
    pub delay_steps: u16,
    pub channel: Channel,
    pub weight_bits: u64,
}

impl<T: Scalar> TargetTable<T> {
    pub fn empty(n_sources: usize, n_vp: usize) -> Self {
        Self {
            n_vp: n_vp.max(1),
            offsets: vec![0; n_sources + 1],
            synapses: Vec::new(),
        }
    }

    pub fn n_vp(&self) -> usize {
        self.n_vp
    }

    pub fn n_sources(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn len(&self) -> usize {
        self.synapses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synapses.is_empty()
    }

    pub fn targets(&self, source: NeuronId) -> &[Synapse<T>] {
        let s = source as usize;
        &self.synapses[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn out_degree(&self, source: NeuronId) -> usize {
        let s = source as usize;
        self.offsets[s + 1] - self.offsets[s]
    }

    /// The targets of `source` owned by virtual process `vp`.
    pub fn local_run(&self, source: NeuronId, vp: usize) -> &[Synapse<T>] {
        let all = self.targets(source);
        if self.n_vp == 1 {
            return all;
        }
        let n = self.n_vp as NeuronId;
        let vp = vp as NeuronId;
        let lo = all.partition_point(|s| s.target % n < vp);
        let hi = lo + all[lo..].partition_point(|s| s.target % n == vp);
        &all[lo..hi]
    }

    pub fn iter(&self) -> impl Iterator<Item = (NeuronId, &Synapse<T>)> + '_ {
        (0..self.n_sources()).flat_map(move |s| {
            self.targets(s as NeuronId)
                .iter()
                .map(move |syn| (s as NeuronId, syn))
        })
    }

    pub fn min_max_delay(&self) -> Option<(u16, u16)> {
        let mut it = self.synapses.iter().map(|s| s.delay_steps);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }

    /// All entries sorted by `(source, target, delay, channel, weight)`.
    pub fn canonical_entries(&self) -> Vec<CanonicalEntry> {
        let mut v: Vec<_> = self
            .iter()
            .map(|(source, s)| CanonicalEntry {
                source,
                target: s.target,
                delay_steps: s.delay_steps,
                channel: s.channel,
                weight_bits: s.weight.to_f64_lossy().to_bits(),
            })
            .collect();
        v.sort_unstable();
        v
    }

    /// The same synapses laid out for `n_vp` virtual processes.
    pub fn regrouped(&self, n_vp: usize) -> Self {
        let mut t = self.clone();
        t.n_vp = n_vp.max(1);
        t.sort_sources();
        t
    }

    fn sort_sources(&mut self) {
        let n = self.n_vp as NeuronId;
        let offsets = &self.offsets;
        let mut rest: &mut [Synapse<T>] = &mut self.synapses;
        let mut runs = Vec::with_capacity(offsets.len() - 1);
        for w in offsets.windows(2) {
            let (head, tail) = rest.split_at_mut(w[1] - w[0]);
            runs.push(head);
            rest = tail;
        }
        runs.par_iter_mut().for_each(|run| {
            run.sort_unstable_by(|a, b| {
                (a.target % n, a.target, a.delay_steps, a.channel)
                    .cmp(&(b.target % n, b.target, b.delay_steps, b.channel))
                    .then_with(|| {
                        a.weight
                            .partial_cmp(&b.weight)
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            })
        });
    }
}

/// Per-neuron in- and out-degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub in_degree: Vec<u64>,
    pub out_degree: Vec<u64>,
}

impl DegreeSummary {
    pub fn total(&self) -> u64 {
        self.out_degree.iter().sum()
    }
}

pub fn degrees<T: Scalar>(table: &TargetTable<T>) -> DegreeSummary {
    let n = table.n_sources();
    let mut in_degree = vec![0u64; n];
    let out_degree = (0..n)
        .map(|s| table.out_degree(s as NeuronId) as u64)
        .collect();
    for s in &table.synapses {
        in_degree[s.target as usize] += 1;
    }
    DegreeSummary {
        in_degree,
        out_degree,
    }
}

struct RuleSampler {
    src_start: u64,
    src_size: u64,
    tgt_start: u64,
    tgt_size: u64,
    weight: Option<Normal<f64>>,
    weight_mean: f64,
    sign: f64,
    delay: Option<Normal<f64>>,
    fixed_delay: u16,
    h: f64,
    max_delay_steps: u16,
    channel: Channel,
}

impl RuleSampler {
    fn new(spec: &NetworkSpec, rule: &ConnectionRule) -> Result<Self> {
        let ranges = spec.population_ranges();
        let src = &ranges[spec.population_index(&rule.source).expect("validated")];
        let tgt = &ranges[spec.population_index(&rule.target).expect("validated")];
        let g = &spec.grid;
        let max_delay_steps = g.max_delay_steps() as u16;
        let weight = (rule.weight_sd > 0.0)
            .then(|| Normal::new(rule.weight_mean.abs(), rule.weight_sd))
            .transpose()
            .map_err(|e| Error::Config(format!("weight distribution: {e}")))?;
        let delay = (rule.delay_sd > 0.0)
            .then(|| Normal::new(rule.delay_mean, rule.delay_sd))
            .transpose()
            .map_err(|e| Error::Config(format!("delay distribution: {e}")))?;
        Ok(Self {
            src_start: src.start,
            src_size: src.end - src.start,
            tgt_start: tgt.start,
            tgt_size: tgt.end - tgt.start,
            weight,
            weight_mean: rule.weight_mean.abs(),
            sign: rule.sign.factor(),
            delay,
            fixed_delay: g
                .steps_rounded(rule.delay_mean)
                .clamp(1, max_delay_steps as u64) as u16,
            h: g.h,
            max_delay_steps,
            channel: rule.sign.into(),
        })
    }

    fn draw<T: Scalar>(&self, rng: &mut ChaCha8Rng) -> (NeuronId, Synapse<T>) {
        let source = self.src_start + rng.random_range(0..self.src_size);
        let target = self.tgt_start + rng.random_range(0..self.tgt_size);
        let magnitude = match &self.weight {
            None => self.weight_mean,
            Some(dist) => {
                let mut w = dist.sample(rng);
                let mut tries = 0;
                while w < 0.0 && tries < MAX_REDRAWS {
                    w = dist.sample(rng);
                    tries += 1;
                }
                w.max(0.0)
            }
        };
        let delay_steps = match &self.delay {
            None => self.fixed_delay,
            Some(dist) => {
                let steps = (dist.sample(rng) / self.h).round();
                steps.clamp(1.0, self.max_delay_steps as f64) as u16
            }
        };
        (
            source as NeuronId,
            Synapse {
                target: target as NeuronId,
                weight: T::of(self.sign * magnitude),
                delay_steps,
                channel: self.channel,
            },
        )
    }
}

/// Realizes every connection rule of `spec` with exactly `total_synapses`
/// uniformly drawn `(source, target)` pairs, laid out for `n_vp` virtual
/// processes. The synapse set is identical for every `n_vp`.
pub fn build_connectivity<T: Scalar>(spec: &NetworkSpec, n_vp: usize) -> Result<TargetTable<T>> {
    if n_vp == 0 {
        return Err(Error::Config("n_vp must be at least 1".into()));
    }
    validate(spec).map_err(Error::Invalid)?;
    let n_neurons = spec.total_neurons();
    if n_neurons > NeuronId::MAX as u64 {
        return Err(Error::Capacity(format!(
            "{n_neurons} neurons exceed the 32-bit id space"
        )));
    }
    let total = spec.total_synapses();
    if total > usize::MAX as u64 / 2 {
        return Err(Error::Capacity(format!(
            "{total} synapses exceed the address space"
        )));
    }
    let n = n_neurons as usize;

    let samplers = spec
        .connections
        .iter()
        .map(|r| RuleSampler::new(spec, r))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, u64, u64)> = spec
        .connections
        .iter()
        .enumerate()
        .flat_map(|(r, rule)| {
            (0..rule.total_synapses.div_ceil(CHUNK)).map(move |c| {
                let len = CHUNK.min(rule.total_synapses - c * CHUNK);
                (r, c, len)
            })
        })
        .collect();

    let chunks: Vec<Vec<(NeuronId, Synapse<T>)>> = tasks
        .par_iter()
        .map(|&(r, c, len)| {
            let mut rng = rng::stream(spec.seed, Domain::Connectivity, ((r as u64) << 32) | c);
            (0..len).map(|_| samplers[r].draw(&mut rng)).collect()
        })
        .collect();

    let mut offsets = vec![0usize; n + 1];
    for (src, _) in chunks.iter().flatten() {
        offsets[*src as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let placeholder = Synapse {
        target: 0,
        weight: T::zero(),
        delay_steps: 0,
        channel: Channel::Excitatory,
    };
    let mut synapses = vec![placeholder; total as usize];
    for (src, syn) in chunks.into_iter().flatten() {
        let slot = &mut cursor[src as usize];
        synapses[*slot] = syn;
        *slot += 1;
    }

    let mut table = TargetTable {
        n_vp,
        offsets,
        synapses,
    };
    table.sort_sources();
    Ok(table)
}

const MAGIC: &[u8; 8] = b"SNNTTBL\0";
const FORMAT_VERSION: u32 = 1;

impl<T: Scalar> TargetTable<T> {
    /// Writes the table in the little-endian dump format:
    ///
    /// ```text
    /// magic "SNNTTBL\0" | version u32 | scalar width u8 | n_vp u32 |
    /// n_sources u64 | n_synapses u64 | offsets (n_sources + 1) x u64 |
    /// per synapse: target u32, delay u16, channel u8, weight (width bytes)
    /// ```
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[T::WIDTH])?;
        w.write_all(&(self.n_vp as u32).to_le_bytes())?;
        w.write_all(&(self.n_sources() as u64).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for &o in &self.offsets {
            w.write_all(&(o as u64).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.len() * (7 + T::WIDTH as usize));
        for s in &self.synapses {
            buf.extend_from_slice(&s.target.to_le_bytes());
            buf.extend_from_slice(&s.delay_steps.to_le_bytes());
            buf.push(s.channel as u8);
            buf.extend_from_slice(&s.weight.to_le_vec());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a target table dump".into()));
        }
        let version = u32::from_le_bytes(read_n(&mut r)?);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported table format version {version}"
            )));
        }
        let [width] = read_n::<1, _>(&mut r)?;
        if width != T::WIDTH {
            return Err(Error::Format(format!(
                "table stores {width}-byte weights, expected {}",
                T::WIDTH
            )));
        }
        let n_vp = u32::from_le_bytes(read_n(&mut r)?) as usize;
        let n_sources = u64::from_le_bytes(read_n(&mut r)?) as usize;
        let n_syn = u64::from_le_bytes(read_n(&mut r)?) as usize;
        let mut offsets = Vec::with_capacity(n_sources + 1);
        for _ in 0..=n_sources {
            offsets.push(u64::from_le_bytes(read_n(&mut r)?) as usize);
        }
        if offsets.first() != Some(&0)
            || offsets.last() != Some(&n_syn)
            || offsets.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Format("corrupt offset array".into()));
        }
        let rec = 7 + width as usize;
        let mut buf = vec![0u8; n_syn * rec];
        r.read_exact(&mut buf)?;
        let synapses = buf
            .chunks_exact(rec)
            .map(|b| {
                let channel = match b[6] {
                    0 => Channel::Excitatory,
                    1 => Channel::Inhibitory,
                    c => return Err(Error::Format(format!("bad channel tag {c}"))),
                };
                Ok(Synapse {
                    target: u32::from_le_bytes([b[0], b[1], b[2], b[3]]),
                    delay_steps: u16::from_le_bytes([b[4], b[5]]),
                    channel,
                    weight: T::from_le_slice(&b[7..]),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if synapses.iter().any(|s| s.target as usize >= n_sources) {
            return Err(Error::Format("synapse target out of range".into()));
        }
        Ok(Self {
            n_vp: n_vp.max(1),
            offsets,
            synapses,
        })
    }
}

fn read_n<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}
