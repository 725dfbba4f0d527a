//! Textual JSON formats.
//!
//! Instances: `{"parts": [[label, ..], ..], "base_edges": [[u, v, m], ..],
//! "conflicts": [[[part, slot], [part, slot]], ..]}`. The canonical writer
//! emits parts in index order, base edges with `u < v` sorted, and conflicts
//! with the smaller endpoint first, sorted lexicographically.
//!
//! Colourings: `[[part, slot], ..]`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cover::{ColourRef, CoverInstance, InstanceData, PartialColouring};
use crate::error::{Error, Result};

pub fn read_instance(reader: impl Read) -> Result<CoverInstance> {
    let data: InstanceData = serde_json::from_reader(reader)?;
    CoverInstance::from_data(data)
}

pub fn parse_instance(text: &str) -> Result<CoverInstance> {
    let data: InstanceData = serde_json::from_str(text)?;
    CoverInstance::from_data(data)
}

/// Canonical JSON text, newline-terminated.
pub fn to_canonical_json(inst: &CoverInstance) -> String {
    // `to_data` already yields sorted, normalised edges.
    let mut text = serde_json::to_string(&inst.to_data()).expect("instance data serialises");
    text.push('\n');
    text
}

pub fn write_instance(inst: &CoverInstance, mut writer: impl Write) -> std::io::Result<()> {
    writer.write_all(to_canonical_json(inst).as_bytes())
}

/// Hex SHA-256 of the canonical JSON.
pub fn instance_digest(inst: &CoverInstance) -> String {
    hex::encode(Sha256::digest(to_canonical_json(inst).as_bytes()))
}

/// Wire form of a colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColouringFile(pub Vec<ColourRef>);

impl ColouringFile {
    pub fn from_colouring(c: &PartialColouring) -> Self {
        Self(c.colours().collect())
    }

    /// Reject repeated parts and parts outside the instance.
    pub fn to_colouring(&self, num_parts: usize) -> Result<PartialColouring> {
        let mut out = PartialColouring::empty(num_parts);
        for c in &self.0 {
            if c.part >= num_parts {
                return Err(Error::InvalidArgument(format!("colour {c} names a missing part")));
            }
            if out.get(c.part).is_some() {
                return Err(Error::InvalidArgument(format!("part {} coloured twice", c.part)));
            }
            out.set(*c);
        }
        Ok(out)
    }
}
