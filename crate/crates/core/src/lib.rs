pub mod barycenter;
pub mod maxent;
pub mod measure;
pub mod moduli2;
pub mod polyhom;
pub mod ratbar;
pub mod sphere;
pub mod stability;
