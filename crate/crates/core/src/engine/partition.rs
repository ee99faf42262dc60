use std::ops::Range;

use crate::error::{Error, Result};

/// Round-robin assignment of neurons to virtual processes: neuron `id` lives
/// on vp `id mod n_vp` at local index `id div n_vp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirtualProcessPartition {
    pub n_neurons: usize,
    pub n_vp: usize,
}

pub fn partition_neurons(n_neurons: usize, n_vp: usize) -> Result<VirtualProcessPartition> {
    if n_vp == 0 {
        return Err(Error::Config("n_vp must be at least 1".into()));
    }
    Ok(VirtualProcessPartition { n_neurons, n_vp })
}

impl VirtualProcessPartition {
    pub fn vp_of(&self, id: usize) -> usize {
        id % self.n_vp
    }

    pub fn local_index(&self, id: usize) -> usize {
        id / self.n_vp
    }

    pub fn global_id(&self, vp: usize, local: usize) -> usize {
        local * self.n_vp + vp
    }

    pub fn local_count(&self, vp: usize) -> usize {
        self.local_count_below(vp, self.n_neurons)
    }

    pub fn neurons_of(&self, vp: usize) -> impl Iterator<Item = usize> + '_ {
        (vp..self.n_neurons).step_by(self.n_vp)
    }

    /// Local indices on `vp` of the neurons with global ids in `ids`.
    pub fn local_range(&self, vp: usize, ids: Range<usize>) -> Range<usize> {
        self.local_count_below(vp, ids.start)..self.local_count_below(vp, ids.end)
    }

    /// Number of neurons of `vp` with global id below `bound`.
    fn local_count_below(&self, vp: usize, bound: usize) -> usize {
        if bound <= vp {
            0
        } else {
            (bound - vp).div_ceil(self.n_vp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(p: &VirtualProcessPartition, vp: usize) -> Vec<usize> {
        p.neurons_of(vp).collect()
    }

    #[test]
    fn examples() {
        let p = partition_neurons(5, 2).unwrap();
        assert_eq!(members(&p, 0), vec![0, 2, 4]);
        assert_eq!(members(&p, 1), vec![1, 3]);

        let p = partition_neurons(7, 1).unwrap();
        assert_eq!(members(&p, 0), (0..7).collect::<Vec<_>>());

        let p = partition_neurons(4, 4).unwrap();
        for vp in 0..4 {
            assert_eq!(members(&p, vp), vec![vp]);
        }
        assert!(partition_neurons(4, 0).is_err());
    }

    #[test]
    fn balanced_and_complete() {
        for n in 0..40 {
            for n_vp in 1..9 {
                let p = partition_neurons(n, n_vp).unwrap();
                let counts: Vec<usize> = (0..n_vp).map(|v| p.local_count(v)).collect();
                assert_eq!(counts.iter().sum::<usize>(), n);
                let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                assert!(hi - lo <= 1);
                for (vp, &count) in counts.iter().enumerate() {
                    assert_eq!(members(&p, vp).len(), count);
                    for (l, id) in p.neurons_of(vp).enumerate() {
                        assert_eq!(p.vp_of(id), vp);
                        assert_eq!(p.local_index(id), l);
                        assert_eq!(p.global_id(vp, l), id);
                    }
                }
            }
        }
    }

    #[test]
    fn population_ranges_map_to_contiguous_local_ranges() {
        let p = partition_neurons(23, 4).unwrap();
        for vp in 0..4 {
            let r = p.local_range(vp, 5..17);
            let ids: Vec<usize> = r.map(|l| p.global_id(vp, l)).collect();
            let expected: Vec<usize> = (5..17).filter(|id| id % 4 == vp).collect();
            assert_eq!(ids, expected);
        }
    }
}
