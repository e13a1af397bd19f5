//! Interned author identities.
//!
//! DBLP disambiguates homonyms itself by appending a numeric suffix to the
//! name ("Wei Wang 0001"). We treat the normalized name string as the
//! identity and intern it into a dense integer id so that graphs and
//! per-author tables can use flat arrays.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{LensError, Result};
use crate::ingest::normalize_author_name;

/// Dense handle for one author. Only meaningful together with the
/// [`AuthorTable`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AuthorId(pub u32);

impl AuthorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Intern table mapping normalized author names to [`AuthorId`]s.
///
/// Ids are assigned in first-seen order, so the table is deterministic for a
/// fixed record sequence.
#[derive(Debug, Default, Clone)]
pub struct AuthorTable {
    names: Vec<String>,
    index: HashMap<String, AuthorId>,
}

impl AuthorTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Normalizes `raw` and interns it. Two byte-identical names always map
    /// to the same id; an empty name is rejected.
    pub fn normalize_author(&mut self, raw: &str) -> Result<AuthorId> {
        let name = normalize_author_name(raw).ok_or(LensError::EmptyAuthorName)?;
        Ok(self.intern_normalized(name))
    }

    /// Interns a name that is already normalized.
    pub fn intern_normalized(&mut self, name: String) -> AuthorId {
        if let Some(&id) = self.index.get(&name) {
            return id;
        }
        let id = AuthorId(self.names.len() as u32);
        self.index.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn get(&self, name: &str) -> Option<AuthorId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AuthorId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AuthorId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (AuthorId(i as u32), n.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let mut t = AuthorTable::new();
        let a = t.normalize_author("John Doe").unwrap();
        let b = t.normalize_author("  John Doe ").unwrap();
        assert_eq!(a, b);
        assert_eq!(t.name(a), "John Doe");
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn homonym_suffixes_stay_distinct() {
        let mut t = AuthorTable::new();
        let a = t.normalize_author("Wei Wang 0001").unwrap();
        let b = t.normalize_author("Wei Wang 0002").unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn empty_name_is_rejected() {
        let mut t = AuthorTable::new();
        assert!(t.normalize_author("   ").is_err());
    }
}
