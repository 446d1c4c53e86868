//! JSON schema for region specifications:
//! `{"family": "S"|"P"|"PE"|"PP"|"T", "n": int, "params": [a, b], "scale": real}`.

use serde::{Deserialize, Serialize};
use toda_toric_core::geometry::{
    region_pe, region_pp, scale_region, simplex_s, voronoi_p, ToricBase, WRegion,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<[f64; 2]>,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

impl RegionSpec {
    pub fn new(family: &str) -> Self {
        RegionSpec { family: family.to_string(), n: None, params: None, scale: 1.0 }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_params(mut self, a: f64, b: f64) -> Self {
        self.params = Some([a, b]);
        self
    }

    /// The hyperplane region described by the spec (families S, P, PE, PP).
    pub fn to_w_region(&self) -> Result<WRegion, String> {
        let base = match self.family.as_str() {
            "S" => simplex_s(self.n.ok_or("family S needs n")?),
            "P" => voronoi_p(self.n.ok_or("family P needs n")?),
            "PE" => {
                let [a, b] = self.params.ok_or("family PE needs params [a, b]")?;
                region_pe(a, b)
            }
            "PP" => {
                let [a, b] = self.params.ok_or("family PP needs params [a, b]")?;
                region_pp(a, b)
            }
            "T" => return Err("family T is a toric base, not a hyperplane region".into()),
            other => return Err(format!("unknown region family '{other}'")),
        }
        .map_err(|e| e.to_string())?;
        if self.scale == 1.0 {
            Ok(base)
        } else {
            scale_region(&base, self.scale).map_err(|e| e.to_string())
        }
    }

    /// The toric base described by the spec (family T: the simplex base
    /// with side `params[0]` in `n - 1` coordinates).
    pub fn to_toric_base(&self) -> Result<ToricBase, String> {
        match self.family.as_str() {
            "T" => {
                let [a, _] = self.params.ok_or("family T needs params [a, _]")?;
                let n = self.n.ok_or("family T needs n")?;
                Ok(ToricBase::Simplex { a: a * self.scale, dim: n - 1 })
            }
            _ => Err(format!("family '{}' is not a toric base", self.family)),
        }
    }
}
