use super::map::DAMap;
use crate::foliation::lattice::LatticeCertificate;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MAP_SCHEMA: &str = "da3/map/v1";

/// Pins everything needed to rebuild a map bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapManifest {
    pub schema: String,
    pub k: u32,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub eps: f64,
    pub grid_nodes: usize,
    pub certificate: LatticeCertificate,
    pub certificate_sha256: String,
}

/// Hex SHA-256 of a string.
pub fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl MapManifest {
    pub fn from_map<S: Real>(map: &DAMap<S>) -> Self {
        let p = &map.params;
        let cert_json = serde_json::to_string(&p.certificate).expect("certificate serializes");
        MapManifest {
            schema: MAP_SCHEMA.into(),
            k: p.k,
            theta: p.theta.f64(),
            a: p.tube.a.f64(),
            b: p.tube.b.f64(),
            c: p.tube.c.f64(),
            d: p.tube.d.f64(),
            eps: p.tube.eps.f64(),
            grid_nodes: map.cylinder.center.table().nodes(),
            certificate: p.certificate.clone(),
            certificate_sha256: sha256_hex(&cert_json),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip_and_hash() {
        let m = DAMap::<f64>::for_k(8).unwrap();
        let man = MapManifest::from_map(&m);
        assert_eq!(man.certificate_sha256.len(), 64);
        let back = MapManifest::from_json(&man.to_json()).unwrap();
        assert_eq!(back, man);
        assert_eq!(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
