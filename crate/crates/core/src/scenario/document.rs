//! Serialized form of scenario files. Unknown keys are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub k: i64,
    #[serde(rename = "chiO")]
    pub chi_o: i64,
    pub rho: i64,
    pub invariants: InvariantsDoc,
    pub symbols: Vec<String>,
    pub gram: BTreeMap<String, GramValue>,
    #[serde(default)]
    pub nodal: Vec<String>,
    #[serde(default)]
    pub classes: BTreeMap<String, BTreeMap<String, Coefficient>>,
    #[serde(default)]
    pub fibres: Vec<FibreDoc>,
    #[serde(default)]
    pub branch: Option<BranchDoc>,
    #[serde(default)]
    pub fibration: Option<FibrationDoc>,
    #[serde(default)]
    pub axioms: Vec<String>,
    #[serde(default)]
    pub checks: Vec<CheckDoc>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsDoc {
    #[serde(rename = "KK")]
    pub kk: i64,
    #[serde(rename = "KD")]
    pub kd: i64,
    #[serde(rename = "DD")]
    pub dd: i64,
    #[serde(rename = "KB")]
    pub kb: i64,
    #[serde(rename = "BB")]
    pub bb: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GramValue {
    Int(i64),
    Unknown(UnknownDoc),
    Opaque(OpaqueDoc),
}

/// `scale*unknown + offset`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnknownDoc {
    pub unknown: String,
    #[serde(default = "one")]
    pub scale: i64,
    #[serde(default)]
    pub offset: i64,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpaqueDoc {
    pub opaque: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreDoc {
    pub label: String,
    pub components: Vec<FibreComponentDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreComponentDoc {
    pub symbol: String,
    pub mult: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    pub components: Vec<BranchComponentDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchComponentDoc {
    pub g: i64,
    pub ss: i64,
    #[serde(default)]
    pub class: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationDoc {
    /// Symbol of the general fibre.
    pub fibre: String,
    /// The (-1)-curve through the distinguished node.
    pub curve: String,
    pub node: String,
    /// Singular fibres `N + 2G_j + N'` counted by Riemann–Hurwitz.
    pub singular_fibres: i64,
    /// How the fibre degree of a branch component is found.
    pub route: Route,
    /// Nef and big class used to force equivalences.
    pub forcing_class: String,
    /// Apply the base-point-free pencil rule to repeated components.
    #[serde(default)]
    pub pencil: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Singular Gram determinant in the unknown fibre degree.
    Gram,
    /// Integer relation between genus, fibre degree and section degree.
    Relation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub rule: String,
    #[serde(default)]
    pub args: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub anchor: Option<String>,
}
