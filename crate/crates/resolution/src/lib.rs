//! Minimal free resolutions over quotient Steenrod algebras; Ext charts,
//! Yoneda products, induced and connecting maps, and persistent caches.

pub mod cache;
pub mod chainmap;
pub mod registry;
pub mod products;
pub mod resolve;

pub use chainmap::{
    induced_on_class, lift_classes, lift_module_map, ChainMap, ModuleMap,
    ShortExactSequence,
};
pub use products::ChartContext;
pub use registry::NameRegistry;
pub use resolve::{ExtClass, Resolution};
