//! JSON formats shared by the CLI and the C ABI.
//!
//! Rationals are always written as canonical `"p/q"` strings. Labels in cut
//! files are 1-based: terminal `i` is cluster `i` and the extra cluster of a
//! non-opposite cut is `k + 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dual::{CertFamily, Certificate};
use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};
use crate::simplex::{Cut, CutFamily, Edge, Grid, GridPoint, WeightFunction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub k: usize,
    pub n: u32,
    pub weights: Vec<WeightEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub w: String,
}

impl InstanceJson {
    /// Nonzero edges only, in canonical edge order.
    pub fn from_weights(w: &WeightFunction) -> Self {
        let grid = w.grid();
        let weights = (0..grid.num_edges())
            .filter(|&e| !w.is_zero_at(e))
            .map(|e| {
                let (a, b) = grid.edge_pairs()[e];
                WeightEntry {
                    u: grid.point(a).coords().to_vec(),
                    v: grid.point(b).coords().to_vec(),
                    w: format_q(&w.weight(e)),
                }
            })
            .collect();
        Self { k: w.k(), n: w.n(), weights }
    }

    pub fn to_weights(&self) -> Result<WeightFunction> {
        let grid = Grid::new(self.k, self.n)?;
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::with_capacity(self.weights.len());
        for entry in &self.weights {
            let u = GridPoint::new(entry.u.clone())?;
            let v = GridPoint::new(entry.v.clone())?;
            let edge = Edge::new(u, v)?;
            if !seen.insert(edge.clone()) {
                return Err(Error::Parse(format!("duplicate edge {edge:?}")));
            }
            entries.push((edge, parse_q(&entry.w)?));
        }
        WeightFunction::from_edges(grid, entries)
    }
}

pub fn instance_to_json(w: &WeightFunction) -> String {
    serde_json::to_string(&InstanceJson::from_weights(w)).expect("instance serializes")
}

pub fn instance_from_json(s: &str) -> Result<WeightFunction> {
    serde_json::from_str::<InstanceJson>(s)?.to_weights()
}

/// SHA-256 of the canonical compact instance JSON, hex encoded.
pub fn instance_digest(w: &WeightFunction) -> String {
    hex::encode(Sha256::digest(instance_to_json(w).as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutJson {
    pub k: usize,
    pub n: u32,
    pub labels: Vec<LabelEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub x: Vec<u32>,
    pub c: usize,
}

impl CutJson {
    pub fn from_cut(p: &Cut) -> Self {
        let grid = p.grid();
        let labels = grid
            .points()
            .iter()
            .zip(p.labels())
            .map(|(pt, &l)| LabelEntry { x: pt.coords().to_vec(), c: l + 1 })
            .collect();
        Self { k: p.k(), n: p.n(), labels }
    }

    /// A cut using cluster `k + 1` is read as non-opposite, otherwise as k-way.
    pub fn to_cut(&self) -> Result<Cut> {
        let grid = Grid::new(self.k, self.n)?;
        let mut labels = vec![None; grid.num_points()];
        for entry in &self.labels {
            let idx = grid
                .point_index(&entry.x)
                .ok_or_else(|| Error::Parse(format!("{:?} is not a grid point", entry.x)))?;
            if entry.c == 0 || entry.c > self.k + 1 {
                return Err(Error::Parse(format!("label {} out of range", entry.c)));
            }
            if labels[idx].replace(entry.c - 1).is_some() {
                return Err(Error::Parse(format!("point {:?} labeled twice", entry.x)));
            }
        }
        let labels: Vec<usize> = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Parse(format!("point {} unlabeled", grid.point(i)))))
            .collect::<Result<_>>()?;
        let family = if labels.contains(&self.k) { CutFamily::NonOpposite } else { CutFamily::KWay };
        Cut::new(grid, family, labels)
    }
}

pub fn cut_to_json(p: &Cut) -> String {
    serde_json::to_string(&CutJson::from_cut(p)).expect("cut serializes")
}

pub fn cut_from_json(s: &str) -> Result<Cut> {
    serde_json::from_str::<CutJson>(s)?.to_cut()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub digest: String,
    pub family: CertFamily,
    /// Keys `"12"`, `"13"`, `"23"`.
    pub pairwise: BTreeMap<String, String>,
    pub ball: String,
    pub corner: String,
    pub two_corner: String,
    pub overall: String,
    pub target: String,
    pub pass: bool,
    pub witness_face: [[u32; 3]; 3],
}

const PAIR_KEYS: [&str; 3] = ["12", "13", "23"];

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        Self {
            digest: c.digest.clone(),
            family: c.family,
            pairwise: PAIR_KEYS
                .iter()
                .zip(&c.pairwise)
                .map(|(k, v)| (k.to_string(), format_q(v)))
                .collect(),
            ball: format_q(&c.ball),
            corner: format_q(&c.corner),
            two_corner: format_q(&c.two_corner),
            overall: format_q(&c.overall),
            target: format_q(&c.target),
            pass: c.pass,
            witness_face: c.witness_vertices,
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate> {
        let pair = |k: &str| {
            self.pairwise
                .get(k)
                .ok_or_else(|| Error::Parse(format!("missing pairwise distance {k}")))
                .and_then(|s| parse_q(s))
        };
        Ok(Certificate {
            digest: self.digest.clone(),
            family: self.family,
            pairwise: [pair("12")?, pair("13")?, pair("23")?],
            ball: parse_q(&self.ball)?,
            witness_vertices: self.witness_face,
            corner: parse_q(&self.corner)?,
            two_corner: parse_q(&self.two_corner)?,
            overall: parse_q(&self.overall)?,
            target: parse_q(&self.target)?,
            pass: self.pass,
        })
    }
}

pub fn certificate_to_json(c: &Certificate) -> String {
    serde_json::to_string(&CertificateJson::from_certificate(c)).expect("certificate serializes")
}

pub fn certificate_from_json(s: &str) -> Result<Certificate> {
    serde_json::from_str::<CertificateJson>(s)?.to_certificate()
}

/// Reproducible envelope around a command's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateBundle {
    pub command: Vec<String>,
    pub digest: Option<String>,
    pub version: String,
    pub seeds: Vec<u64>,
    pub output: serde_json::Value,
}

impl CertificateBundle {
    pub fn new(command: Vec<String>, digest: Option<String>, seeds: Vec<u64>, output: serde_json::Value) -> Self {
        Self { command, digest, version: env!("CARGO_PKG_VERSION").to_string(), seeds, output }
    }
}

/// Formats a rational for reports.
pub fn q_str(v: &Q) -> String {
    format_q(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::certify;
    use crate::rational::{q, qi};
    use crate::weights::{build_fk, build_w3, build_w_tilde};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fk_instance_text() {
        let w = build_fk().unwrap();
        let s = instance_to_json(&w);
        assert!(s.starts_with(r#"{"k":3,"n":2,"weights":[{"u":[0,0,2],"v":[0,1,1],"w":"1/6"}"#), "{s}");
        assert_eq!(instance_from_json(&s).unwrap(), w);
    }

    #[test]
    fn omitted_edges_are_zero() {
        let s = r#"{"k":3,"n":2,"weights":[{"u":[1,1,0],"v":[2,0,0],"w":"3/4"}]}"#;
        let w = instance_from_json(s).unwrap();
        assert_eq!(w.total(), q(3, 4));
        assert_eq!(w.lpc(), q(3, 8));
    }

    #[test]
    fn instance_errors() {
        assert!(instance_from_json(r#"{"k":3,"n":2,"weights":[{"u":[2,0,0],"v":[0,2,0],"w":"1"}]}"#).is_err());
        assert!(instance_from_json(r#"{"k":3,"n":2,"weights":[{"u":[2,0,0],"v":[1,1,0],"w":"-1"}]}"#).is_err());
        assert!(instance_from_json(r#"{"k":3,"n":2,"weights":[{"u":[2,0,0],"v":[1,1,0],"w":"x"}]}"#).is_err());
        let dup = r#"{"k":3,"n":2,"weights":[{"u":[2,0,0],"v":[1,1,0],"w":"1"},{"u":[1,1,0],"v":[2,0,0],"w":"1"}]}"#;
        assert!(instance_from_json(dup).is_err());
    }

    #[test]
    fn digest_is_stable() {
        let a = instance_digest(&build_w3(9).unwrap());
        let b = instance_digest(&build_w3(9).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        assert_ne!(a, instance_digest(&build_w3(6).unwrap()));
    }

    #[test]
    fn cut_roundtrip_and_family() {
        let grid = Grid::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Cut::random_nonopposite(grid.clone(), &mut rng);
        let back = cut_from_json(&cut_to_json(&c)).unwrap();
        assert_eq!(back.labels(), c.labels());
        let a = Cut::argmax(grid);
        assert_eq!(cut_from_json(&cut_to_json(&a)).unwrap(), a);
        assert!(cut_from_json(r#"{"k":3,"n":1,"labels":[{"x":[1,0,0],"c":1}]}"#).is_err());
    }

    #[test]
    fn certificate_roundtrip() {
        let w = build_w3(6).unwrap();
        let c = certify(6, &w, CertFamily::NonOpposite, &qi(1)).unwrap();
        let s = certificate_to_json(&c);
        assert_eq!(certificate_from_json(&s).unwrap(), c);
        assert!(s.contains(r#""pairwise":{"12":"#));
    }

    proptest! {
        #[test]
        fn instance_roundtrip(k in 3usize..6, n in prop::sample::select(vec![3u32, 6])) {
            let w = build_w_tilde(k, n).unwrap();
            let s = instance_to_json(&w);
            let back = instance_from_json(&s).unwrap();
            prop_assert_eq!(&back, &w);
            prop_assert_eq!(instance_to_json(&back), s);
        }

        #[test]
        fn random_instance_roundtrip(v in prop::collection::vec((0i64..9, 1i64..9), 18)) {
            let grid = Grid::new(3, 3).unwrap();
            let w = WeightFunction::from_dense(grid, v.into_iter().map(|(a, b)| q(a, b)).collect()).unwrap();
            prop_assert_eq!(instance_from_json(&instance_to_json(&w)).unwrap(), w);
        }
    }
}
