//! Khovanov homology over F2 for marked link diagrams, with the cube-of-resolutions
//! spectral sequence built from generator-level TQFT maps.

pub mod complex;
pub mod cube;
pub mod diagram;
pub mod gf2;
pub mod par;
pub mod spectral;
pub mod tqft;

pub use complex::{BuildOptions, Complex, ComplexError, Flavor};
pub use diagram::{parse_pd, ArcId, DiagramError, Move, PlanarDiagram, Sign};
pub use gf2::{GF2Matrix, GF2Vector};
pub use par::ExecMode;
pub use spectral::{PageTable, SpectralResult};

