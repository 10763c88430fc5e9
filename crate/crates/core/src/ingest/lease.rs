//! Per-collection exclusion so two updates of one collection never overlap.

use std::collections::HashSet;
use std::sync::{Arc, LazyLock, Mutex};

use super::IngestError;

#[derive(Debug, Default, Clone)]
pub struct LeaseTable {
    held: Arc<Mutex<HashSet<String>>>,
}

static GLOBAL: LazyLock<LeaseTable> = LazyLock::new(LeaseTable::default);

impl LeaseTable {
    pub fn global() -> &'static LeaseTable {
        &GLOBAL
    }

    pub fn acquire(&self, key: &str) -> Result<Lease, IngestError> {
        let mut held = self.held.lock().expect("lease table poisoned");
        if !held.insert(key.to_owned()) {
            return Err(IngestError::LeaseHeld(key.to_owned()));
        }
        Ok(Lease {
            table: self.clone(),
            key: key.to_owned(),
        })
    }
}

/// Released on drop.
#[derive(Debug)]
pub struct Lease {
    table: LeaseTable,
    key: String,
}

impl Drop for Lease {
    fn drop(&mut self) {
        if let Ok(mut held) = self.table.held.lock() {
            held.remove(&self.key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_acquire_fails_until_release() {
        let t = LeaseTable::default();
        let lease = t.acquire("c1").unwrap();
        assert!(matches!(t.acquire("c1"), Err(IngestError::LeaseHeld(_))));
        assert!(t.acquire("c2").is_ok());
        drop(lease);
        assert!(t.acquire("c1").is_ok());
    }
}
