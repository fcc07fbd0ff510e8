//! Segmentation and qualitative assessment of recurrent motion recorded by
//! five 6-axis inertial sensors.
//!
//! The pipeline runs [`segmentation`] on a [`model::Recording`] to cut out
//! individual repetitions, compresses each into a 31-value
//! [`features::FeatureVector`] and classifies it with the models in [`learn`].
//! [`synth`] generates recordings with known boundaries and labels.

pub mod dsp;
pub mod features;
pub mod learn;
pub mod model;
pub mod segmentation;
pub mod synth;
