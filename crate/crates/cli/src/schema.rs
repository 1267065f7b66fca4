//! Case-file JSON schema.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

const SAFE_INT: i128 = 1 << 53;

/// Integer written as a JSON number or, beyond 53 bits, a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub i128);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.abs() < SAFE_INT {
            s.serialize_i64(self.0 as i64)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Int(n as i128)),
            Raw::Text(t) => t.trim().parse::<i128>().map(Int).map_err(de::Error::custom),
        }
    }
}

/// A field that is either given or marked `"derive"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivable<T> {
    Derive,
    Given(T),
}

impl<T: Serialize> Serialize for Derivable<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Derivable::Derive => s.serialize_str("derive"),
            Derivable::Given(v) => v.serialize(s),
        }
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Derivable<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Given(T),
            Keyword(String),
        }
        match Raw::<T>::deserialize(d)? {
            Raw::Given(v) => Ok(Derivable::Given(v)),
            Raw::Keyword(k) if k == "derive" => Ok(Derivable::Derive),
            Raw::Keyword(k) => Err(de::Error::custom(format!("expected a value or \"derive\", got {k:?}"))),
        }
    }
}

/// `S^2 + c1 S + c0 mod p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyBlock {
    pub precision: u32,
    pub c1: Int,
    pub c0: Int,
    /// Which topological generator `sigma` the coefficients refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_tag: Option<String>,
}

/// Roots of `f` in `Z_p` known mod `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootsBlock {
    pub precision: u32,
    pub alpha: Int,
    pub beta: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingBlock {
    /// `split`, `unramified` or `ramified`.
    pub kind: String,
    pub ord_alpha: u32,
    pub ord_beta: u32,
    pub ord_diff: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteLevelBlock {
    pub n: u32,
    /// Exponents of the two cyclic factors of `A_{K_n^c}`.
    pub class_group: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis_labels: Vec<String>,
    /// `s_action[i][j]`: coefficient of `b_i` in `S b_j`.
    pub s_action: [[Int; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayClassBlock {
    pub n: u32,
    /// Exponents of `(I(p) / S(p^n)) (x) Z_p`.
    pub factor_exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinardiBlock {
    pub applicable: bool,
    pub h_aux_div_by_3: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lk_in_ktilde: Option<Derivable<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_summand: Option<Derivable<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<Derivable<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<Derivable<u32>>,
    /// The torsion of the local principal units modulo global units is trivial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_torsion_trivial: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Multipliers {
    pub s: u64,
    pub t: u64,
    pub u: u64,
    pub v: u64,
}

/// Classes of the split primes `Q1, L1` and their conjugates in a fixed
/// basis `[c1], [c2]` of the class group of `K_n^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFormsBlock {
    pub factor_orders: [Int; 2],
    pub q: [Int; 2],
    pub l: [Int; 2],
    pub sigma_q: [Int; 2],
    pub sigma_l: [Int; 2],
    pub multipliers: Multipliers,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_primes: Option<[u64; 2]>,
}

/// Integer or `{num, den}` with `den` prime to `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Frac { num: Int, den: Int },
    Whole(Int),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionCoefficientsBlock {
    pub a: Rational,
    pub b: Rational,
    pub multipliers: Multipliers,
    pub class_order_exponent: u32,
}

/// Stored expectations for regression reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ord_diff: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// `L_K cap K~ = K_layer^an`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a0: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fired_case: Option<String>,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub schema_version: String,
    pub p: u64,
    pub d: u64,
    #[serde(rename = "class_group_K")]
    pub class_group_k: Vec<u32>,
    pub lambda_c: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iwasawa_poly: Option<PolyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended_poly: Option<PolyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting_override: Option<SplittingBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_level: Option<FiniteLevelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_override: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_class: Option<RayClassBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minardi: Option<MinardiBlock>,
    #[serde(default)]
    pub tower: TowerBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_forms: Option<ActionFormsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_coefficients: Option<ActionCoefficientsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_defining_poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedBlock>,
    #[serde(default)]
    pub provenance: String,
}

impl CaseFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case files always serialize")
    }
}
