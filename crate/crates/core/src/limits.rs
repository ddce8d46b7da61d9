use serde::{Deserialize, Serialize};

/// Size caps and worker count shared by every search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest carrier a direct product may have.
    pub max_product_size: usize,
    /// Largest number of elements a subalgebra closure may reach.
    pub max_closure_size: usize,
    /// Largest number of coordinates in a free-algebra product.
    pub max_coordinates: usize,
    /// Largest algebra stored with dense tables.
    pub max_dense_size: usize,
    /// Largest model size for enumeration without an explicit override.
    pub max_model_size: usize,
    /// Worker threads for search; 1 runs everything on the calling thread.
    pub workers: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_product_size: 100_000,
            max_closure_size: 100_000,
            max_coordinates: 200_000,
            max_dense_size: 4096,
            max_model_size: 6,
            workers: 1,
        }
    }
}

impl Limits {
    /// The cap that applies to any algebra kept as dense tables.
    pub fn element_cap(&self) -> usize {
        self.max_closure_size.min(self.max_dense_size).min(crate::algebra::MAX_DENSE_ELEMENTS)
    }

    pub(crate) fn check(&self, what: &'static str, needed: usize, limit: usize) -> crate::Result<()> {
        if needed > limit {
            Err(crate::Error::SizeLimitExceeded { what, needed, limit })
        } else {
            Ok(())
        }
    }
}
