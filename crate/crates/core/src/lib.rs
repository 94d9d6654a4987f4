//! Engines, exact solver, strategy helpers and hardness-reduction toolkit for
//! Dots & Polygons and Dots & Boxes.

pub mod boxes;
pub mod geometry;
pub mod polygon_game;
pub mod reductions;
pub mod solver;
pub mod strategy;
pub mod subdivision;
