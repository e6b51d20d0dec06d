pub mod adhm;
pub mod cohomology;
pub mod linalg;
pub mod nahm;
pub mod spectral;
