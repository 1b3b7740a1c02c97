//! Facial comparison: landmark feature vectors, Procrustes alignment,
//! merging and side-by-side composites, and bilateral asymmetry.

mod align;
mod composite;
mod landmarks;
mod symmetry;

pub use align::{align_by_landmarks, align_points, Alignment};
pub use composite::{blend, side_by_side, BlendMode, DEFAULT_ALPHA};
pub use landmarks::{
    feature_vector, landmark_similarity, FeatureVector, LandmarkSet, FEATURE_LABELS,
    LEFT_EYE, LEFT_EYE_WIDTH, MOUTH_CENTER, NOSE_TIP, REQUIRED, RIGHT_EYE, RIGHT_EYE_WIDTH,
};
pub use symmetry::{asymmetry_map, eye_size_ratio, mean_asymmetry};
