pub mod census;
pub mod chord;
pub mod class;
pub mod error;
pub mod intersection;
pub mod motif;
pub mod oracle;
pub mod surgery;
pub mod word;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/words.md")]
    pub struct Words;
    #[doc = include_str!("../../../book/src/intersection.md")]
    pub struct Intersection;
    #[doc = include_str!("../../../book/src/surgery.md")]
    pub struct Surgery;
    #[doc = include_str!("../../../book/src/motifs.md")]
    pub struct Motifs;
    #[doc = include_str!("../../../book/src/census.md")]
    pub struct Census;
    #[doc = include_str!("../../../book/src/chord-form.md")]
    pub struct ChordForm;
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub struct Oracle;
}
