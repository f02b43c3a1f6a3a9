use std::sync::Arc;

use dashmap::DashMap;
use dualworld_core::kinematic::{Walk, WalkKey, WalkMemo};

/// Walk cache shared across threads.
#[derive(Debug, Default)]
pub struct SharedMemo {
    map: DashMap<WalkKey, Arc<[Walk]>>,
}

impl SharedMemo {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl WalkMemo for SharedMemo {
    fn walks(&self, key: WalkKey, compute: &dyn Fn() -> Vec<Walk>) -> Arc<[Walk]> {
        if let Some(w) = self.map.get(&key) {
            return w.clone();
        }
        let w: Arc<[Walk]> = Arc::from(compute());
        self.map.entry(key).or_insert(w).clone()
    }
}
