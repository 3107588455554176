pub mod cache;
pub mod record;

pub use cache::Cache;
pub use record::{DiagramInfo, RunRecord, TOOL_VERSION};
