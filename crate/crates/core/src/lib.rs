pub mod ff;
pub mod groups;
pub mod pencil;
pub mod pipeline;
pub mod poly;
pub mod torsion;
pub mod variety;
