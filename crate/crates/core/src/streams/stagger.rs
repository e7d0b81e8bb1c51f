//! STAGGER concepts: three categorical attributes and three boolean target
//! functions over them.

use serde::{Deserialize, Serialize};

use super::{GroundTruth, SplitMix64};
use crate::error::{Error, Result};

/// Values per attribute (size, color, shape).
pub const CARDINALITIES: [usize; 3] = [3, 3, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Size {
    Small,
    Medium,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Green,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StaggerInstance {
    pub size: Size,
    pub color: Color,
    pub shape: Shape,
    pub label: bool,
}

impl StaggerInstance {
    /// Attribute values as category indices, in `CARDINALITIES` order.
    pub fn features(&self) -> [usize; 3] {
        [self.size as usize, self.color as usize, self.shape as usize]
    }

    pub fn class(&self) -> usize {
        self.label as usize
    }
}

/// Target function of concept 1, 2 or 3.
pub fn concept_label(concept: u8, size: Size, color: Color, shape: Shape) -> Result<bool> {
    match concept {
        1 => Ok(size == Size::Small && color == Color::Red),
        2 => Ok(color == Color::Green || shape == Shape::Circle),
        3 => Ok(matches!(size, Size::Medium | Size::Large)),
        c => Err(Error::Config(format!("STAGGER concept must be 1, 2 or 3, got {c}"))),
    }
}

/// Uniform attributes labelled by the concept active at each index.
pub fn stagger_stream(schedule: &[(u8, usize)], seed: u64) -> Result<(Vec<StaggerInstance>, GroundTruth)> {
    if let Some(&(c, _)) = schedule.iter().find(|(c, _)| !(1..=3).contains(c)) {
        return Err(Error::Config(format!("STAGGER concept must be 1, 2 or 3, got {c}")));
    }
    if schedule.iter().any(|&(_, len)| len == 0) {
        return Err(Error::Config("STAGGER schedule entries need a positive length".into()));
    }
    const SIZES: [Size; 3] = [Size::Small, Size::Medium, Size::Large];
    const COLORS: [Color; 3] = [Color::Red, Color::Green, Color::Blue];
    const SHAPES: [Shape; 3] = [Shape::Circle, Shape::Square, Shape::Triangle];

    let mut rng = SplitMix64::new(seed);
    let total = schedule.iter().map(|&(_, len)| len).sum();
    let mut out = Vec::with_capacity(total);
    let mut drifts = Vec::new();
    for (i, &(concept, len)) in schedule.iter().enumerate() {
        if i > 0 {
            drifts.push(out.len());
        }
        for _ in 0..len {
            let size = SIZES[rng.below(3) as usize];
            let color = COLORS[rng.below(3) as usize];
            let shape = SHAPES[rng.below(3) as usize];
            let label = concept_label(concept, size, color, shape)?;
            out.push(StaggerInstance { size, color, shape, label });
        }
    }
    Ok((out, GroundTruth { drifts }))
}
