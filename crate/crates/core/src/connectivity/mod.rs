//! Region labeling, connectivity-aware refinement and screening statistics.

mod components;
mod refine;
mod screening;

pub use components::{
    background_regions, connected_components, edge_seed_points, grow_semitransparent, Connectivity,
    RegionSet, SeedSet,
};
pub(crate) use components::for_each_neighbor;
pub use refine::{refine, refine_detailed, Refinement};
pub use screening::{auto_screen, screening_stats, ScreenVerdict, ScreeningStats, ScreeningThresholds};
