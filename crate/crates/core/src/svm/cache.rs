//! LRU cache over full rows of the effective kernel matrix.
//!
//! Rows are immutable once computed, so caching is purely a matter of
//! avoiding recomputation: results are bitwise identical for any capacity,
//! including zero.

use std::collections::HashMap;
use std::sync::Arc;

pub(crate) struct RowCache {
    capacity: usize,
    rows: HashMap<usize, (Arc<Vec<f64>>, u64)>,
    tick: u64,
}

impl RowCache {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            rows: HashMap::new(),
            tick: 0,
        }
    }

    pub fn get(&mut self, index: usize) -> Option<Arc<Vec<f64>>> {
        self.tick += 1;
        let tick = self.tick;
        self.rows.get_mut(&index).map(|entry| {
            entry.1 = tick;
            entry.0.clone()
        })
    }

    /// True when the row is resident, without touching recency.
    #[cfg(test)]
    pub fn contains(&self, index: usize) -> bool {
        self.rows.contains_key(&index)
    }

    pub fn peek(&self, index: usize) -> Option<&Arc<Vec<f64>>> {
        self.rows.get(&index).map(|entry| &entry.0)
    }

    pub fn insert(&mut self, index: usize, row: Arc<Vec<f64>>) {
        if self.capacity == 0 {
            return;
        }
        while self.rows.len() >= self.capacity && !self.rows.contains_key(&index) {
            // Evict the least recently used row.
            let oldest = self
                .rows
                .iter()
                .min_by_key(|(_, (_, tick))| *tick)
                .map(|(&i, _)| i)
                .expect("cache is non-empty");
            self.rows.remove(&oldest);
        }
        self.tick += 1;
        self.rows.insert(index, (row, self.tick));
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.rows.len()
    }
}
