//! Reference complex orthogonal designs.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stbc::{from_complex_design, DesignEntry, DispersionSet};

use DesignEntry::{Conj as C, NegConj as NC, NegSym as N, Sym as S, Zero as Z};

/// Registry names, in ascending antenna order.
pub const BUILTIN_NAMES: [&str; 3] = ["alamouti", "cod-g3", "cod-g4"];

/// `[[c1, c2], [-c2*, c1*]]`: M = 2, T = 2, Q = 2.
pub fn alamouti<T: Real>() -> DispersionSet<T> {
    from_complex_design("alamouti", 2, &[&[S(0), S(1)], &[NC(1), C(0)]])
        .expect("alamouti design is well formed")
}

const G4: [[DesignEntry; 4]; 4] = [
    [S(0), S(1), S(2), Z],
    [NC(1), C(0), Z, S(2)],
    [NC(2), Z, C(0), N(1)],
    [Z, NC(2), C(1), S(0)],
];

/// Rate-3/4 design with entries in `{0, ±c, ±c*}`: M = 4, T = 4, Q = 3.
pub fn cod_g4<T: Real>() -> DispersionSet<T> {
    let rows: Vec<&[DesignEntry]> = G4.iter().map(|r| &r[..]).collect();
    from_complex_design("cod-g4", 3, &rows).expect("cod-g4 design is well formed")
}

/// First three columns of [`cod_g4`]: M = 3, T = 4, Q = 3.
pub fn cod_g3<T: Real>() -> DispersionSet<T> {
    let rows: Vec<&[DesignEntry]> = G4.iter().map(|r| &r[..3]).collect();
    from_complex_design("cod-g3", 3, &rows).expect("cod-g3 design is well formed")
}

pub fn by_name<T: Real>(name: &str) -> Result<DispersionSet<T>> {
    match name {
        "alamouti" => Ok(alamouti()),
        "cod-g3" => Ok(cod_g3()),
        "cod-g4" => Ok(cod_g4()),
        other => Err(Error::UnknownCode(other.to_string())),
    }
}

pub fn all<T: Real>() -> Vec<DispersionSet<T>> {
    vec![alamouti(), cod_g3(), cod_g4()]
}
