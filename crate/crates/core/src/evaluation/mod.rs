//! Leave-one-out evaluation, parameter sweeps and directional-asymmetry analysis.

mod asymmetry;
mod loocv;
mod manifest;
mod report;
mod svg;
mod sweep;

pub use asymmetry::{asymmetry_by_label, asymmetry_csv, asymmetry_score, AsymmetryRow};
pub use loocv::{loocv, loocv_corpus, single_feature_loocv, Corpus, EvalConfig};
pub use manifest::{DatasetManifest, ManifestEntry, Tradition};
pub use report::{EvalReport, ReportRow};
pub use svg::{asymmetry_svg, confusion_svg};
pub use sweep::{sweep, sweep_corpus, SweepCell, SweepGrid, SweepTable};
