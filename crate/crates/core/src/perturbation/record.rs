use super::CylinderMap;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

pub const PROFILE_SCHEMA: &str = "da3/profile/v1";

/// Parameters and tabulated samples of a perturbation, for bit-exact reruns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub schema: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub eps: f64,
    pub nodes: usize,
    pub normalizer: f64,
    pub cdf: Vec<f64>,
    pub ramp: Vec<f64>,
}

impl ProfileRecord {
    pub fn from_map<S: Real>(map: &CylinderMap<S>) -> Self {
        let p = &map.params;
        let t = map.center.table();
        ProfileRecord {
            schema: PROFILE_SCHEMA.to_string(),
            a: p.a.f64(),
            b: p.b.f64(),
            c: p.c.f64(),
            d: p.d.f64(),
            eps: p.eps.f64(),
            nodes: t.nodes(),
            normalizer: t.normalizer().f64(),
            cdf: t.cdf_values().iter().map(|x| x.f64()).collect(),
            ramp: t.ramp_values().iter().map(|x| x.f64()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::TubeParams;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let map = CylinderMap::with_nodes(TubeParams::new(5.0, 3.0, -0.2, 0.1).unwrap(), 256).unwrap();
        let rec = ProfileRecord::from_map(&map);
        let back = ProfileRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(rec, back);
        assert!(rec.cdf.iter().zip(&back.cdf).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
