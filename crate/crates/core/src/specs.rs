//! Built-in layered specs, addressable by name from the command line.

use crate::error::{Error, Result};
use crate::graph::LayeredSpec;

pub const BUILTIN_NAMES: [&str; 4] = ["path", "ladder", "gamma", "twisted4"];

/// The 2-way infinite path.
pub fn path() -> LayeredSpec {
    LayeredSpec {
        m: 1,
        intra: vec![],
        cross: vec![(0, 0)],
    }
}

/// The 2-way infinite ladder: two rails joined by rungs.
pub fn ladder() -> LayeredSpec {
    LayeredSpec {
        m: 2,
        intra: vec![(0, 1)],
        cross: vec![(0, 0), (1, 1)],
    }
}

/// The cubic graph on `Z x Z/10`: each layer spans a 10-cycle and
/// `(n, 2j+1)` is joined to `(n+1, 4j+2)`.
pub fn gamma() -> LayeredSpec {
    let intra = (0..10).map(|k| (k, (k + 1) % 10)).collect();
    let cross = (0..5).map(|j| (2 * j + 1, (4 * j + 2) % 10)).collect();
    LayeredSpec {
        m: 10,
        intra,
        cross,
    }
}

/// A cubic spec with four vertices per layer whose Lipschitz harmonic
/// function has three distinct edge gradients at every vertex.
pub fn twisted4() -> LayeredSpec {
    LayeredSpec {
        m: 4,
        intra: vec![(0, 1)],
        cross: vec![(0, 2), (1, 3), (2, 0), (2, 3), (3, 1)],
    }
}

pub fn by_name(name: &str) -> Option<LayeredSpec> {
    match name {
        "path" => Some(path()),
        "ladder" => Some(ladder()),
        "gamma" => Some(gamma()),
        "twisted4" => Some(twisted4()),
        _ => None,
    }
}

/// Resolves a built-in name or reads a JSON spec file.
pub fn load(name_or_path: &str) -> Result<LayeredSpec> {
    if let Some(spec) = by_name(name_or_path) {
        return Ok(spec);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| {
        Error::InvalidArgument(format!(
            "`{name_or_path}` is neither a built-in spec ({}) nor a readable file: {e}",
            BUILTIN_NAMES.join(", ")
        ))
    })?;
    let spec = crate::io::parse_spec(&text)?;
    spec.validate()?;
    Ok(spec)
}
