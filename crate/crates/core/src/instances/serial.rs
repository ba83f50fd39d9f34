use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Family, HardInstance, Scalars};
use crate::error::{Error, Result};
use crate::hexfloat;
use crate::structure::{partition_rows_oriented, BandSpec, SubspaceOrientation};

/// JSON form of a [`HardInstance`]. Scalars are hex-float strings so a
/// round trip reproduces every double bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub orientation: SubspaceOrientation,
    pub scalars: BTreeMap<String, String>,
}

macro_rules! scalar_fields {
    ($mac:ident) => {
        $mac!(l, "L");
        $mac!(mu, "mu");
        $mac!(lavg, "Lavg");
        $mac!(delta, "Delta");
        $mac!(bdist, "Bdist");
        $mac!(eps, "eps");
        $mac!(lambda0, "lambda0");
        $mac!(lambda1, "lambda1");
        $mac!(lambda2, "lambda2");
        $mac!(omega, "omega");
        $mac!(alpha, "alpha");
        $mac!(q, "q");
        $mac!(xi, "xi");
        $mac!(sigma, "sigma");
        $mac!(nc_alpha, "nc_alpha");
        $mac!(nc_lambda, "nc_lambda");
        $mac!(nc_beta, "nc_beta");
    };
}

impl InstanceDoc {
    pub fn from_instance(inst: &HardInstance) -> Self {
        let mut scalars = BTreeMap::new();
        let s = &inst.s;
        macro_rules! put {
            ($f:ident, $k:expr) => {
                scalars.insert($k.to_string(), hexfloat::format(s.$f));
            };
        }
        scalar_fields!(put);
        InstanceDoc {
            family: inst.family,
            n: inst.n,
            m: inst.m,
            dim: inst.dim(),
            orientation: inst.orientation,
            scalars,
        }
    }

    pub fn into_instance(self) -> Result<HardInstance> {
        let mut s = Scalars::default();
        macro_rules! get {
            ($f:ident, $k:expr) => {
                if let Some(text) = self.scalars.get($k) {
                    s.$f = hexfloat::parse(text)
                        .ok_or_else(|| Error::Invalid(format!("scalar {}: bad hex float {text:?}", $k)))?;
                }
            };
        }
        scalar_fields!(get);
        if self.n < 2 {
            return Err(Error::Invalid(format!("n = {} < 2", self.n)));
        }
        let expected_dim = match self.family {
            Family::OneD => 1,
            Family::Nc => self.m + 1,
            _ => self.m,
        };
        if self.dim != expected_dim {
            return Err(Error::DimensionMismatch { expected: expected_dim, got: self.dim });
        }
        let (band, partition) = if self.family == Family::OneD {
            (None, None)
        } else {
            let band = BandSpec::new(self.dim, s.omega, self.n)?;
            let partition = partition_rows_oriented(&band, self.orientation);
            (Some(band), Some(partition))
        };
        Ok(HardInstance {
            family: self.family,
            n: self.n,
            m: self.m,
            orientation: self.orientation,
            band,
            partition,
            s,
        })
    }
}

impl HardInstance {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from_instance(self)).expect("instance doc serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        doc.into_instance()
    }
}
