//! Coverings: local ones over a ball quotient `V/G`, classified by subgroups,
//! and global ones encoded by monodromy actions on a finite fiber.

mod ball;
mod monodromy;

pub use ball::{
    ball_automorphisms, ball_covering_morphisms, ball_fiber_product, check_universal_property,
    enumerate_ball_coverings, BallCovering, BallFiberProduct, FiberComponent,
};
pub use monodromy::{
    deck_group, is_regular, monodromy_fiber_product, universal_cover, DeckGroup, FiberProduct,
    MonodromyCovering,
};
