//! GetGoing: a text-mode trip-planning dialog system tailored to older
//! users.
//!
//! The pipeline is: [`nlu`] tags a user utterance into slot fills, the
//! [`dialog`] engine walks the [`trip`] task tree and binds those fills,
//! executors consult the offline [`directions`] planner, and [`delivery`]
//! renders every system prompt as speech markup in one of two modes.

pub mod assets;
pub mod delivery;
pub mod dialog;
pub mod directions;
pub mod nlu;
pub mod trip;
