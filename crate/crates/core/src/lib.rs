//! Computer-aided diagnosis toolkit.
//!
//! Three binary-diagnosis pipelines share one set of building blocks:
//!
//! * **lung**: CT slice denoising, iterative thresholding, morphological
//!   cleanup, nine region/GLCM features and a linear max-margin SVM on the
//!   best feature pair;
//! * **melanoma**: asymmetry, border, color, diameter and entropy features of
//!   a dermoscopy lesion fed to a feed-forward network with an abstention band;
//! * **breast**: the nine Wisconsin cytology scores fed to min-max normalized
//!   logistic gradient descent or a seven-layer network.
//!
//! [`evaluation`] turns predictions into confusion counts, the usual
//! diagnostic rates, MCC, learning curves and Welch's t-test.

pub mod classifiers;
pub mod data_io;
pub mod dermoscopy;
pub mod error;
pub mod evaluation;
pub mod imaging;
pub mod pipeline;
pub mod serve;
pub mod texture;

pub use error::{Error, Result};
