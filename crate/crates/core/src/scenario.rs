//! Scenario files: factors, unipotent data, loci, named points and options.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::loci::{Locus, LocusCatalog, ZMIN};
use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::rep::{build_rep, Character, FactorSpec, RepSpace};
use crate::sample::DEFAULT_SAMPLES;
use crate::stability::{default_chi0, InnerProduct};
use crate::unipotent::{GeneratorSpec, GradedUnipotent, UnipotentSpec};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<i64>,
    /// Twist M of the extra P¹ factor; `None` leaves X alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_p1: Option<u32>,
    /// Allow Mumford-hat classification when d_min > 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mumford_stable: bool,
    /// Catalog entry to blow up instead of the declared Δ^{≥d_max}; it must
    /// be linear and lie inside Δ^{≥d_max}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_center: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub factors: Vec<FactorSpec>,
    pub gm_component: usize,
    pub unipotent: UnipotentSpec,
    #[serde(default)]
    pub loci: BTreeMap<String, Locus>,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<Vec<Rat>>>,
    #[serde(default)]
    pub characters: BTreeMap<String, Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<Vec<Vec<Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub options: Options,
}

/// A validated scenario ready for computation.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub hash: String,
    pub rep: RepSpace,
    pub u: GradedUnipotent,
    pub catalog: LocusCatalog,
    pub points: BTreeMap<String, ProjPoint>,
    pub chi0: Character,
    pub inner: InnerProduct,
    pub seed: u64,
    pub samples: usize,
    pub scale: i64,
    pub warnings: Vec<String>,
}

/// Runtime overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub scale: Option<i64>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario JSON, line {} column {}: {e}", e.line(), e.column())))
}

pub fn load(text: &str, ov: &Overrides) -> Result<Scenario> {
    let file = parse_scenario(text)?;
    Scenario::new(file, ov)
}

/// Entries named `Delta_ge_<n>` declare Δ^{≥n}.
fn declared_from_names(loci: &BTreeMap<String, Locus>) -> BTreeMap<u32, String> {
    loci.keys()
        .filter_map(|k| k.strip_prefix("Delta_ge_").and_then(|d| d.parse().ok()).map(|d| (d, k.clone())))
        .collect()
}

impl Scenario {
    pub fn new(file: ScenarioFile, ov: &Overrides) -> Result<Self> {
        let mut warnings = Vec::new();
        let file = match file.options.cross_p1 {
            Some(m) => {
                let (f, w) = cross_product_p1(&file, m)?;
                warnings.extend(w);
                f
            }
            None => file,
        };
        let hash = {
            let canon = serde_json::to_string(&file).expect("serialisable");
            let digest = Sha256::digest(canon.as_bytes());
            digest.iter().map(|b| format!("{b:02x}")).collect()
        };
        let base_rep = build_rep(&file.factors, file.gm_component)?;
        let u = GradedUnipotent::from_spec(&file.unipotent, &base_rep)?;
        let scale = ov.scale.or(file.options.scale).unwrap_or(1);
        let rep = base_rep.scale_linearisation(scale)?;
        let catalog = LocusCatalog {
            declared_delta: declared_from_names(&file.loci),
            entries: file.loci.clone(),
        }
        .with_zmin(&rep);
        catalog.validate(&rep)?;
        if let Some(c) = &file.options.blowup_center {
            catalog.get(c)?;
        }
        let mut points = BTreeMap::new();
        for (name, coords) in &file.points {
            if coords.len() != rep.factors().len() {
                return Err(Error::Validation(format!(
                    "point {name}: expected {} factors, found {}",
                    rep.factors().len(),
                    coords.len()
                )));
            }
            for (f, v) in coords.iter().enumerate() {
                if v.len() != rep.factors()[f].ncoords() {
                    return Err(Error::Validation(format!(
                        "point {name}: factor {f} needs {} coordinates",
                        rep.factors()[f].ncoords()
                    )));
                }
            }
            let p = ProjPoint::from_factors(coords.clone()).map_err(|e| match e {
                Error::Validation(m) => Error::Validation(format!("point {name}: {m}")),
                other => other,
            })?;
            points.insert(name.clone(), p);
        }
        let scale_r = Rat::from_int(scale);
        let chi0 = match file.characters.get("chi0") {
            Some(v) => {
                if v.len() != rep.rank() {
                    return Err(Error::Validation(format!("character chi0 needs {} entries", rep.rank())));
                }
                Character(v.clone()).scaled(&scale_r)
            }
            None => default_chi0(&rep),
        };
        if *chi0.gm(&rep) != Rat::from_int(rep.weight_ladder().min()) {
            return Err(Error::Validation("character chi0 must restrict to ω_0 on G_m".into()));
        }
        let inner = match &file.inner_product {
            Some(rows) => {
                let ip = InnerProduct(QMat::from_rows(rows)?);
                if ip.0.rows() != rep.rank() {
                    return Err(Error::Validation("inner product size must equal the torus rank".into()));
                }
                ip.validate()?;
                ip
            }
            None => InnerProduct::identity(rep.rank()),
        };
        let samples = ov.samples.or(file.options.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Error::Validation("samples must be positive".into()));
        }
        Ok(Scenario {
            seed: ov.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            hash,
            rep,
            u,
            catalog,
            points,
            chi0,
            inner,
            samples,
            scale,
            warnings,
            file,
        })
    }

    pub fn point(&self, name: &str) -> Result<&ProjPoint> {
        self.points.get(name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// Named character, scaled with the linearisation.
    pub fn character(&self, name: &str) -> Option<Character> {
        self.file
            .characters
            .get(name)
            .map(|v| Character(v.clone()).scaled(&Rat::from_int(self.scale)))
    }
}

/// X × P¹ with O_{P¹}(M): the new factor has G_m weights 0 and 1, twist M,
/// and trivial U-action. Named points are placed on the slice [1:1].
pub fn cross_product_p1(file: &ScenarioFile, m: u32) -> Result<(ScenarioFile, Vec<String>)> {
    if m < 1 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    let rank = file
        .factors
        .first()
        .and_then(|f| f.weights.first())
        .map(Vec::len)
        .ok_or_else(|| Error::Validation("scenario has no factors".into()))?;
    if file.gm_component >= rank {
        return Err(Error::Validation("gm_component out of range".into()));
    }
    let rep = build_rep(&file.factors, file.gm_component)?;
    let ladder = rep.weight_ladder();
    let bound = ladder.max() - ladder.min();
    let mut warnings = Vec::new();
    if (m as i64) <= bound {
        warnings.push(format!(
            "M = {m} does not exceed ω_max − ω_0 = {bound}; the P¹ factor may not dominate"
        ));
    }
    let w0 = vec![0; rank];
    let mut w1 = vec![0; rank];
    w1[file.gm_component] = 1;
    let mut out = file.clone();
    out.factors.push(FactorSpec::proj(vec![w0, w1]).with_twist(m));
    out.unipotent.generators = file
        .unipotent
        .generators
        .iter()
        .map(|g| {
            let mut blocks = g.matrix_blocks.clone();
            blocks.push(Vec::new());
            GeneratorSpec {
                matrix_blocks: blocks,
                weight: g.weight,
            }
        })
        .collect();
    out.loci = file
        .loci
        .iter()
        .filter(|(k, _)| k.as_str() != ZMIN)
        .map(|(k, l)| {
            let l = match l {
                Locus::Param(p) => {
                    let mut p = p.clone();
                    for c in &mut p.charts {
                        c.params += 1;
                        for fac in &mut c.factors {
                            for form in fac.iter_mut() {
                                form.push(Rat::zero());
                            }
                        }
                        let mut t = vec![Rat::zero(); c.params + 1];
                        t[c.params] = Rat::one();
                        let mut one = vec![Rat::zero(); c.params + 1];
                        one[0] = Rat::one();
                        c.factors.push(vec![one, t]);
                    }
                    Locus::Param(p)
                }
                other => other.clone(),
            };
            (k.clone(), l)
        })
        .collect();
    out.points = file
        .points
        .iter()
        .map(|(k, v)| {
            let mut v = v.clone();
            v.push(vec![Rat::one(), Rat::one()]);
            (k.clone(), v)
        })
        .collect();
    out.options.cross_p1 = None;
    out.name = Some(format!("{} × P¹(M={m})", file.name.clone().unwrap_or_else(|| "scenario".into())));
    Ok((out, warnings))
}
