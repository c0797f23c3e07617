//! Serde helpers writing complex numbers as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let [re, im] = <[f64; 2]>::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

pub mod array4 {
    use super::*;

    pub fn serialize<S: Serializer>(z: &[Complex64; 4], s: S) -> Result<S::Ok, S::Error> {
        z.map(|w| [w.re, w.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 4], D::Error> {
        let raw = <[[f64; 2]; 4]>::deserialize(d)?;
        Ok(raw.map(|[re, im]| Complex64::new(re, im)))
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(z: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        z.iter().map(|w| [w.re, w.im]).collect::<Vec<_>>().serialize(s)
    }
}

pub mod matrix4 {
    use super::*;

    pub fn serialize<S: Serializer>(z: &[[Complex64; 4]; 4], s: S) -> Result<S::Ok, S::Error> {
        z.map(|row| row.map(|w| [w.re, w.im])).serialize(s)
    }
}
