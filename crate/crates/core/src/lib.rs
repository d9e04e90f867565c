pub mod boundary;
pub mod colligation;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod instance;
pub mod linalg;
pub mod moebius;
pub mod par;
pub mod relation;
pub mod resolvent;
pub mod space;
pub mod suite;
pub mod tolerance;
pub mod weyl;
