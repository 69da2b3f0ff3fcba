//! Bundled complexes and cocycles, verified against stored SHA-256 digests.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::simplicial::cocycle::EdgeCocycle;
use crate::simplicial::complex::SimplicialComplex;

struct Bundled {
    name: &'static str,
    text: &'static str,
    sha256: &'static str,
}

const COMPLEXES: &[Bundled] = &[
    Bundled {
        name: "circle3",
        text: include_str!("../../data/circle3.complex"),
        sha256: "d933a0dcbfc0aa07b4df36aedbb0dc428e32fbff61800b0ad98b6a8a6ac2b4d1",
    },
    Bundled {
        name: "tetra_boundary",
        text: include_str!("../../data/tetra_boundary.complex"),
        sha256: "3fe0f291331aa3a33ca3836444a9736be818d81567db15b1fd5601f7b6123ff7",
    },
    Bundled {
        name: "torus7",
        text: include_str!("../../data/torus7.complex"),
        sha256: "45fc822ddc284f10eb3ceb1ccc1882989b091a7166ff2230651a018dab71fe80",
    },
    Bundled {
        name: "klein12",
        text: include_str!("../../data/klein12.complex"),
        sha256: "d30619afde52569353774c5e8af71ef8b0961287c1d06875943668bad5e559ec",
    },
    Bundled {
        name: "rp3_11",
        text: include_str!("../../data/rp3_11.complex"),
        sha256: "f1e35f520bda0fd97ca7ec674d90839d1ba7fd5d4b30cead81342ea345cd406b",
    },
];

const COCYCLES: &[Bundled] = &[Bundled {
    name: "torus7_ln2",
    text: include_str!("../../data/torus7_ln2.cocycle"),
    sha256: "981efe0f6f5bb80643a14a31ce9cafebc37917bf6d52d9a1c790f7b0b96f5fb0",
}];

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn verified(table: &[Bundled], name: &str) -> Result<&'static str> {
    let entry = table
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::InvalidModel(format!("no bundled file named {name}")))?;
    if sha256_hex(entry.text) != entry.sha256 {
        return Err(Error::Checksum(name.to_string()));
    }
    Ok(entry.text)
}

pub fn complex_names() -> Vec<&'static str> {
    COMPLEXES.iter().map(|b| b.name).collect()
}

pub fn cocycle_names() -> Vec<&'static str> {
    COCYCLES.iter().map(|b| b.name).collect()
}

pub fn complex_text(name: &str) -> Result<&'static str> {
    verified(COMPLEXES, name)
}

pub fn bundled_complex(name: &str) -> Result<SimplicialComplex> {
    SimplicialComplex::parse(verified(COMPLEXES, name)?)
}

pub fn bundled_cocycle(name: &str) -> Result<EdgeCocycle> {
    EdgeCocycle::parse(verified(COCYCLES, name)?)
}
