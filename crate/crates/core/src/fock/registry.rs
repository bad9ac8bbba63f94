use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarization label of an optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// Identifier of a spatial path, e.g. "a" or "dH" after a polarizing split.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpatialId(String);

impl SpatialId {
    pub fn new(id: impl Into<String>) -> Self {
        SpatialId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpatialId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for SpatialId {
    fn from(s: &str) -> Self {
        SpatialId::new(s)
    }
}

impl From<String> for SpatialId {
    fn from(s: String) -> Self {
        SpatialId(s)
    }
}

/// A single optical mode: spatial path plus polarization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub spatial: SpatialId,
    pub pol: Polarization,
}

impl ModeId {
    pub fn new(spatial: impl Into<SpatialId>, pol: Polarization) -> Self {
        ModeId { spatial: spatial.into(), pol }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.spatial, self.pol)
    }
}

/// Ordered set of modes; the position of a mode fixes its slot in every
/// occupation vector built against this registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<ModeId>,
}

impl ModeRegistry {
    /// Registry with the given modes in the given order. Ids must be unique.
    pub fn new(modes: Vec<ModeId>) -> Result<Arc<Self>> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(m.to_string()));
            }
        }
        Ok(Arc::new(ModeRegistry { modes }))
    }

    /// Registry with an H and a V mode per spatial id, spatial-major, H first.
    pub fn polarized<I, S>(spatials: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<SpatialId>,
    {
        let mut modes = Vec::new();
        for s in spatials {
            let s = s.into();
            modes.push(ModeId { spatial: s.clone(), pol: Polarization::H });
            modes.push(ModeId { spatial: s, pol: Polarization::V });
        }
        Self::new(modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn position(&self, mode: &ModeId) -> Option<usize> {
        self.modes.iter().position(|m| m == mode)
    }

    pub fn require(&self, mode: &ModeId) -> Result<usize> {
        self.position(mode).ok_or_else(|| Error::UnknownMode(mode.to_string()))
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        self.position(mode).is_some()
    }
}
