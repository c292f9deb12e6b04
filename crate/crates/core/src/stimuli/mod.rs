//! Procedural stimulus generators. Every generator is a pure function of its
//! spec and the random stream it is handed.

pub mod change;
pub mod glass;
pub mod landolt;
pub mod mot;
pub mod motion;
pub mod procedural;
pub mod search;

pub use change::{gen_change_arrays, ChangeArrays, ChangeFeature, ChangeObject, ChangeShape, PALETTE};
pub use glass::{gen_glass_pair, Dipole, DotPolarity, GlassPatch, GlassSpec};
pub use landolt::{gen_landolt, weber_foreground, Compass, ContrastPolarity, LandoltSpec};
pub use mot::{Circle, MotPhase, MotSpec, MotState};
pub use motion::{MotionDirection, MotionField, MotionFieldSpec, MotionStepStats, NoiseMode};
pub use procedural::gen_procedural_image;
pub use search::{gen_search_array, ItemColor, ItemGlyph, SearchArray, SearchItem, SearchLayout, SearchMode};
