//! Executable models of the 5G-AKA protocol family and an adversary
//! harness for unlinkability games.
//!
//! The crate is layered bottom-up: [`crypto`] primitives, the state and
//! wire types in [`types`] and [`message`], per-protocol step functions in
//! [`protocol`], the adversarial network in [`world`], games and attacks in
//! [`game`] and [`attacks`], and symbolic trace
//! analysis in [`traces`] and [`monitor`].

pub mod attacks;
pub mod crypto;
pub mod entropy;
pub mod error;
pub mod game;
pub mod message;
pub mod monitor;
pub mod protocol;
pub mod scenario;
pub mod traces;
pub mod transcript;
pub mod types;
pub mod world;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/worlds.md")]
    mod worlds {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
