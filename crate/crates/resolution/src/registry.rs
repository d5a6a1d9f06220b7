//! The name registry: the paper names chart classes, the machine only has
//! (s, t, index) coordinates. Registry entries pin the named generators of
//! each chart; product names are formed by Yoneda multiplication against
//! registry seeds. Versioned so caches referencing names can detect drift.

use crate::resolve::ExtClass;
use std::collections::BTreeMap;

pub const REGISTRY_VERSION: &str = "names-v1";

/// Named seed classes per chart. Indices refer to the deterministic
/// generator order of the minimal resolution.
#[derive(Clone, Debug, Default)]
pub struct NameRegistry {
    entries: BTreeMap<String, ExtClass>,
}

impl NameRegistry {
    pub fn insert(&mut self, name: &str, class: ExtClass) {
        self.entries.insert(name.to_string(), class);
    }

    pub fn get(&self, name: &str) -> Option<ExtClass> {
        self.entries.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = (&String, &ExtClass)> {
        self.entries.iter()
    }

    /// Seeds for the polynomial-part chart (the sphere chart of the paper's
    /// tables): May-name generators at their (s, t) positions.
    pub fn sphere_p_seeds() -> Vec<(&'static str, u32, u32)> {
        vec![
            ("h0", 1, 4),
            ("h1", 1, 12),
            ("h2", 1, 36),
            ("h3", 1, 108),
            ("b0", 2, 12),
            ("g0", 2, 20),
            ("k0", 2, 28),
            ("b1", 2, 36),
            ("g1", 2, 60),
            ("k1", 2, 84),
            ("eta1", 3, 60),
        ]
    }

    /// Seeds particular to the V(1) chart over A//E[tau0, tau1]. Names like
    /// v3h1 are atoms of this chart (there is no class v3 alone); the
    /// polynomial-part names reappear at their own bidegrees.
    pub fn v1_seeds() -> Vec<(&'static str, u32, u32)> {
        vec![
            ("v2", 1, 17),
            ("v3h1", 2, 65),
            ("v3h0b0", 4, 69),
            ("v3k0", 3, 81),
            ("v3g0", 3, 73),
            ("v3h2", 2, 89),
            ("gamma2", 3, 84),
            ("bk1hh", 3, 92),
        ]
    }
}
