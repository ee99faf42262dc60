//! Socket / chiplet / CCX / core topology and thread placement plans.
//!
//! Cores are numbered hierarchically: socket-major, then chiplet, then core
//! within the chiplet, so the `k`-th core of global chiplet `n` has id
//! `n * cores_per_chiplet + k` and consecutive groups of `cores_per_ccx` ids
//! share an L3 cache.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologyModel {
    pub sockets: usize,
    pub chiplets_per_socket: usize,
    pub ccx_per_chiplet: usize,
    pub cores_per_ccx: usize,
}

impl Default for TopologyModel {
    /// Dual-socket node with 8 chiplets per socket, 2 CCX per chiplet and 4
    /// cores per CCX.
    fn default() -> Self {
        Self {
            sockets: 2,
            chiplets_per_socket: 8,
            ccx_per_chiplet: 2,
            cores_per_ccx: 4,
        }
    }
}

impl TopologyModel {
    pub fn new(
        sockets: usize,
        chiplets_per_socket: usize,
        ccx_per_chiplet: usize,
        cores_per_ccx: usize,
    ) -> Result<Self> {
        let t = Self {
            sockets,
            chiplets_per_socket,
            ccx_per_chiplet,
            cores_per_ccx,
        };
        t.check()?;
        Ok(t)
    }

    pub fn check(&self) -> Result<()> {
        if self.sockets == 0
            || self.chiplets_per_socket == 0
            || self.ccx_per_chiplet == 0
            || self.cores_per_ccx == 0
        {
            return Err(Error::Config(
                "all topology counts must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn total_cores(&self) -> usize {
        self.sockets * self.chiplets_per_socket * self.ccx_per_chiplet * self.cores_per_ccx
    }

    pub fn total_chiplets(&self) -> usize {
        self.sockets * self.chiplets_per_socket
    }

    pub fn cores_per_chiplet(&self) -> usize {
        self.ccx_per_chiplet * self.cores_per_ccx
    }

    pub fn cores_per_socket(&self) -> usize {
        self.chiplets_per_socket * self.cores_per_chiplet()
    }

    /// Global index of the L3 cache (CCX) that `core` belongs to.
    pub fn ccx_of(&self, core: usize) -> usize {
        core / self.cores_per_ccx
    }

    pub fn socket_of(&self, core: usize) -> usize {
        core / self.cores_per_socket()
    }

    /// Physical id of core `k` on chiplet `n` (written `n:k`).
    pub fn core_id(&self, chiplet: usize, core: usize) -> Result<usize> {
        if chiplet >= self.total_chiplets() {
            return Err(Error::Range(format!(
                "chiplet {chiplet} out of range 0..{}",
                self.total_chiplets()
            )));
        }
        if core >= self.cores_per_chiplet() {
            return Err(Error::Range(format!(
                "core {core} out of range 0..{}",
                self.cores_per_chiplet()
            )));
        }
        Ok(chiplet * self.cores_per_chiplet() + core)
    }

    /// Order in which the cores of a chiplet are filled by the distant
    /// scheme. For power-of-two chiplets this is the bit-reversal
    /// permutation (`[0, 4, 2, 6, 1, 5, 3, 7]` for 8 cores); otherwise cores
    /// are taken round-robin over the CCXs.
    pub fn distant_round_order(&self) -> Vec<usize> {
        let n = self.cores_per_chiplet();
        if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| {
                    if bits == 0 {
                        0
                    } else {
                        i.reverse_bits() >> (usize::BITS - bits)
                    }
                })
                .collect()
        } else {
            (0..self.cores_per_ccx)
                .flat_map(|i| (0..self.ccx_per_chiplet).map(move |c| c * self.cores_per_ccx + i))
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Sequential,
    Distant,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Sequential => "sequential",
            Scheme::Distant => "distant",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Scheme::Sequential),
            "distant" => Ok(Scheme::Distant),
            other => Err(Error::Config(format!(
                "unknown placement scheme \"{other}\" (expected sequential or distant)"
            ))),
        }
    }
}

/// Physical cores to pin worker threads to, in thread order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub scheme: Scheme,
    pub cores: Vec<usize>,
}

impl PlacementPlan {
    pub fn new(topo: &TopologyModel, scheme: Scheme, n_threads: usize) -> Result<Self> {
        match scheme {
            Scheme::Sequential => sequential_plan(topo, n_threads),
            Scheme::Distant => distant_plan(topo, n_threads),
        }
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    /// Ids are unique and in range for `topo`.
    pub fn is_valid_for(&self, topo: &TopologyModel) -> bool {
        let mut seen = HashSet::new();
        self.cores
            .iter()
            .all(|&c| c < topo.total_cores() && seen.insert(c))
    }
}

fn check_threads(topo: &TopologyModel, n_threads: usize) -> Result<()> {
    topo.check()?;
    if n_threads > topo.total_cores() {
        return Err(Error::Config(format!(
            "{n_threads} threads exceed the {} cores of the topology",
            topo.total_cores()
        )));
    }
    Ok(())
}

/// Threads on physically consecutive cores, socket 0 first.
pub fn sequential_plan(topo: &TopologyModel, n_threads: usize) -> Result<PlacementPlan> {
    check_threads(topo, n_threads)?;
    Ok(PlacementPlan {
        scheme: Scheme::Sequential,
        cores: (0..n_threads).collect(),
    })
}

/// Threads spread so that L3 caches and chiplets are shared as late as
/// possible: each round places one core on every chiplet, rounds follow
/// [`TopologyModel::distant_round_order`].
pub fn distant_plan(topo: &TopologyModel, n_threads: usize) -> Result<PlacementPlan> {
    check_threads(topo, n_threads)?;
    let chiplets = topo.total_chiplets();
    let order = topo.distant_round_order();
    let cores = (0..n_threads)
        .map(|t| topo.core_id(t % chiplets, order[t / chiplets]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlacementPlan {
        scheme: Scheme::Distant,
        cores,
    })
}

/// Position of the first thread whose core shares an L3 cache with an
/// earlier thread of the plan.
pub fn first_l3_sharing_index(plan: &PlacementPlan, topo: &TopologyModel) -> Option<usize> {
    let mut used = HashSet::new();
    plan.cores
        .iter()
        .position(|&c| !used.insert(topo.ccx_of(c)))
}

/// `{a},{b},...` in plan order, the syntax of `OMP_PLACES`.
pub fn format_places(plan: &PlacementPlan) -> String {
    plan.cores
        .iter()
        .map(|c| format!("{{{c}}}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Binds the calling thread to `core`. Returns false if the platform has no
/// affinity support or the core is not available to this process.
#[cfg(target_os = "linux")]
pub fn pin_current_thread(core: usize) -> bool {
    if core >= libc::CPU_SETSIZE as usize {
        return false;
    }
    // SAFETY: cpu_set_t is plain data; zeroed is the empty set.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(core, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_current_thread(_core: usize) -> bool {
    false
}
