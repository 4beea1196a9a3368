pub mod accessibility;
pub mod coskeleton;
pub mod fixtures;
pub mod geom;
pub mod hda;
pub mod homology;
pub mod precubical;
pub mod rng;
pub mod simplicial;
pub mod svs;
