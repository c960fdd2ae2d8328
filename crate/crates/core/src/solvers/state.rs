//! Incremental single-flip state shared by the QUBO walkers.

use crate::encoding::EncodedQubo;

/// Tracks a 0/1 state with per-variable flip costs.
/// g_i = q_ii + 2 sum_{j != i} q_ij z_j, so flipping i changes the energy by
/// (1 - 2 z_i) g_i and costs O(n) to refresh the other fields.
pub(crate) struct FlipState<'a> {
    q: &'a EncodedQubo,
    pub z: Vec<u8>,
    g: Vec<f64>,
    pub energy: f64,
}

impl<'a> FlipState<'a> {
    pub fn new(q: &'a EncodedQubo, z: Vec<u8>) -> Self {
        let n = q.n;
        debug_assert_eq!(z.len(), n);
        let mut g = vec![0.0; n];
        for i in 0..n {
            let mut acc = q.q_at(i, i);
            for j in 0..n {
                if j != i && z[j] == 1 {
                    acc += 2.0 * q.q_at(i, j);
                }
            }
            g[i] = acc;
        }
        let energy = q.energy(&z);
        FlipState { q, z, g, energy }
    }

    #[inline]
    pub fn flip_delta(&self, i: usize) -> f64 {
        (1.0 - 2.0 * self.z[i] as f64) * self.g[i]
    }

    pub fn flip(&mut self, i: usize) {
        let delta = self.flip_delta(i);
        let step = 1.0 - 2.0 * self.z[i] as f64; // +1 when setting, -1 when clearing
        self.z[i] ^= 1;
        self.energy += delta;
        let n = self.q.n;
        for j in 0..n {
            if j != i {
                self.g[j] += 2.0 * self.q.q_at(i, j) * step;
            }
        }
    }

    /// Recompute the energy from scratch, clearing accumulated float drift.
    pub fn exact_energy(&self) -> f64 {
        self.q.energy(&self.z)
    }
}
