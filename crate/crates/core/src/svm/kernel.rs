use std::collections::{HashMap, VecDeque};

/// Training sets up to this size get the whole Gram matrix precomputed.
pub const FULL_CACHE_LIMIT: usize = 4096;
/// Row budget for the LRU cache used above the limit (~256 MiB of f64).
const LRU_BUDGET_BYTES: usize = 256 << 20;

pub fn rbf(x: &[f64], z: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

enum Storage {
    Full(Vec<f64>),
    Lru { rows: HashMap<usize, Vec<f64>>, order: VecDeque<usize>, capacity: usize },
}

/// Kernel rows K(x_i, .) over the training set.
pub struct KernelCache<'a> {
    points: &'a [Vec<f64>],
    gamma: f64,
    storage: Storage,
}

impl<'a> KernelCache<'a> {
    pub fn new(points: &'a [Vec<f64>], gamma: f64) -> Self {
        Self::with_limit(points, gamma, FULL_CACHE_LIMIT)
    }

    pub(crate) fn with_limit(points: &'a [Vec<f64>], gamma: f64, full_limit: usize) -> Self {
        let n = points.len();
        let storage = if n <= full_limit {
            let mut full = vec![0.0; n * n];
            for i in 0..n {
                full[i * n + i] = 1.0;
                for j in 0..i {
                    let k = rbf(&points[i], &points[j], gamma);
                    full[i * n + j] = k;
                    full[j * n + i] = k;
                }
            }
            Storage::Full(full)
        } else {
            Storage::Lru {
                rows: HashMap::new(),
                order: VecDeque::new(),
                capacity: (LRU_BUDGET_BYTES / (8 * n.max(1))).max(2),
            }
        };
        Self { points, gamma, storage }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_full_matrix(&self) -> bool {
        matches!(self.storage, Storage::Full(_))
    }

    pub fn row(&mut self, i: usize) -> &[f64] {
        let n = self.points.len();
        match &mut self.storage {
            Storage::Full(full) => &full[i * n..(i + 1) * n],
            Storage::Lru { rows, order, capacity } => {
                if rows.contains_key(&i) {
                    if let Some(pos) = order.iter().position(|&r| r == i) {
                        order.remove(pos);
                    }
                } else {
                    if rows.len() >= *capacity {
                        if let Some(evict) = order.pop_front() {
                            rows.remove(&evict);
                        }
                    }
                    let xi = &self.points[i];
                    let row = self.points.iter().map(|xj| rbf(xi, xj, self.gamma)).collect();
                    rows.insert(i, row);
                }
                order.push_back(i);
                &rows[&i]
            }
        }
    }
}
