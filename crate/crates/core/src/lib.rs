//! Desk-scale simulator and analysis toolkit for the hybrid quantum-eraser
//! channel probe.
//!
//! The toolkit prepares spin-orbit (polarization (x) OAM) photon states,
//! propagates them through parameterized channel models (free space,
//! fiber-like cross-talk), runs the two-projection measurement scan
//! (polarization analyzer plus azimuthal sector hologram), and characterizes
//! channel disturbance through fringe visibility, which-path
//! distinguishability and model fitting.
//!
//! Everything is a pure function over immutable values; states, operators
//! and channels are plain data, safe to share across threads.

pub mod bessel;
pub mod channel;
pub mod characterization;
pub mod elements;
pub mod error;
pub mod fiber;
pub mod linalg;
pub mod measurement;
pub mod render;
pub mod spinorbit;
mod stream;

pub use channel::{ChannelModel, ChannelSpecFile, FiberChannelParams};
pub use characterization::{
    calibrate_channel, channel_report, channel_report_with_threshold, fit_fringe, visibility_curve,
    ChannelReport, FringeFit, VisibilityPoint, CROSS_TALK_THRESHOLD,
};
pub use elements::{
    apply_analyzer, apply_qplate, apply_waveplate, predict_delta, AnalyzerSpec, QPlateSpec,
    WaveplateKind, WaveplateSpec,
};
pub use error::{Error, Result};
pub use fiber::FiberSpec;
pub use linalg::DensityMatrix;
pub use measurement::{
    complementarity_check, detection_probability, detection_probability_density,
    distinguishability, distinguishability_density, ideal_probabilities, oam_spectrum,
    oam_spectrum_density, probe_state, simulate_counts, visibility, ComplementarityRecord,
    ScanConfig, ScanMeta, ScanPoint, ScanResult, SectorSpec, VisibilityMethod,
};
pub use render::{
    angular_profile, count_azimuthal_lobes, oam_pair_state, render_intensity, AngularProfile,
    Raster,
};
pub use spinorbit::{Pol, SpinOrbitState, VectorModeSpec, DEFAULT_L_MAX};

#[cfg(test)]
mod tests {
    #[test]
    fn core_types_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<crate::SpinOrbitState>();
        check::<crate::ChannelModel>();
        check::<crate::ScanResult>();
        check::<crate::DensityMatrix>();
    }
}
