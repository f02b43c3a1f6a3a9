//! The loco-state: a pose in each world.

/// Virtual node, virtual heading, physical cell, physical heading.
/// Ordering is lexicographic over the four indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LocoState {
    pub v_loc: u32,
    pub v_heading: u16,
    pub p_loc: u32,
    pub p_heading: u16,
}

impl LocoState {
    pub const fn new(v_loc: u32, v_heading: u16, p_loc: u32, p_heading: u16) -> Self {
        LocoState { v_loc, v_heading, p_loc, p_heading }
    }

    /// Same locations with both headings zeroed.
    pub fn collapsed(self) -> Self {
        LocoState { v_heading: 0, p_heading: 0, ..self }
    }
}
