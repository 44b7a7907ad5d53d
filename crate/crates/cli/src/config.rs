//! Run configuration: a JSON document, overridden field by field by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharConfig {
    pub modulus: u64,
    pub order: u64,
    /// `[generator, exponent]` pairs.
    #[serde(default)]
    pub generators: Vec<(u64, u64)>,
}

/// `n` values: a number, a list, or a string such as `"1..10"` or `"1,3,5"`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum NValues {
    One(u64),
    Many(Vec<u64>),
    Text(String),
}

impl NValues {
    pub fn expand(&self) -> Result<Vec<u64>, CliError> {
        match self {
            NValues::One(n) => Ok(vec![*n]),
            NValues::Many(v) => Ok(v.clone()),
            NValues::Text(s) => parse_n_list(s),
        }
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Config(format!("cannot read n values from {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Inclusive `lo..hi` or `lo-hi`.
pub fn parse_range(s: &str) -> Result<[u64; 2], CliError> {
    let bad = || CliError::Config(format!("cannot read a k range from {s:?} (expected lo..hi)"));
    let (lo, hi) = s
        .split_once("..")
        .or_else(|| s.split_once('-'))
        .ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok([lo, hi])
}

pub fn parse_label(s: &str) -> Result<[u64; 2], CliError> {
    let bad = || CliError::Config(format!("cannot read a label from {s:?} (expected C,D)"));
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (c, d) = t.split_once(',').ok_or_else(bad)?;
    Ok([c.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?])
}

/// `trivial` (modulus taken from `q`) or `MOD:ORDER:G=E[,G=E...]`.
pub fn parse_char(s: &str, q: Option<u64>) -> Result<CharConfig, CliError> {
    let bad = || CliError::Config(format!("cannot read a character from {s:?} (expected trivial or MOD:ORDER:G=E,...)"));
    if s.trim() == "trivial" {
        let modulus = q.ok_or_else(|| CliError::Config("--char trivial needs --q".into()))?;
        return Ok(CharConfig {
            modulus,
            order: 1,
            generators: Vec::new(),
        });
    }
    let mut parts = s.splitn(3, ':');
    let modulus = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let order = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let mut generators = Vec::new();
    if let Some(gens) = parts.next() {
        for g in gens.split(',').map(str::trim).filter(|g| !g.is_empty()) {
            let (a, e) = g.split_once('=').ok_or_else(bad)?;
            generators.push((a.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?));
        }
    }
    Ok(CharConfig {
        modulus,
        order,
        generators,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub f_poly: Option<String>,
    pub a_polys: Option<Vec<String>>,
    /// First `n` of an inline family.
    pub n_min: Option<u64>,
    /// Maximal order of `Q(√radicand)` instead of a family member.
    pub radicand: Option<String>,
    pub n: Option<NValues>,
    pub q: Option<Vec<u64>>,
    pub k_range: Option<[u64; 2]>,
    pub label: Option<[u64; 2]>,
    #[serde(rename = "char")]
    pub character: Option<CharConfig>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub criterion: Option<String>,
    pub n_max: Option<u64>,
    pub max_terms: Option<u64>,
    /// Decimals in approximate complex renderings.
    pub digits: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// The single modulus of commands other than `verify`.
    pub fn single_q(&self) -> Result<u64, CliError> {
        match self.q.as_deref() {
            Some([q]) => Ok(*q),
            Some(_) => Err(CliError::Config("this command takes exactly one --q".into())),
            None => Err(CliError::Config("--q is required".into())),
        }
    }

    pub fn max_terms(&self) -> Result<u64, CliError> {
        if let Ok(v) = std::env::var("RAYZETA_MAX_TERMS") {
            return v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("RAYZETA_MAX_TERMS={v:?} is not a non-negative integer")));
        }
        Ok(self.max_terms.unwrap_or(rayzeta_core::shintani::DEFAULT_MAX_TERMS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_n_list("1..3,7").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(parse_n_list("5").unwrap(), vec![5]);
        assert!(parse_n_list("3..1").is_err());
        assert_eq!(parse_range("0..6").unwrap(), [0, 6]);
        assert_eq!(parse_range("2-4").unwrap(), [2, 4]);
        assert_eq!(parse_label("(1,0)").unwrap(), [1, 0]);
        assert!(parse_label("1").is_err());
    }

    #[test]
    fn characters() {
        let c = parse_char("5:4:2=1", None).unwrap();
        assert_eq!((c.modulus, c.order, c.generators), (5, 4, vec![(2, 1)]));
        assert_eq!(parse_char("trivial", Some(3)).unwrap().modulus, 3);
        assert!(parse_char("trivial", None).is_err());
        assert!(parse_char("5:x", None).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let ok: RunConfig = serde_json::from_str(r#"{"preset":"rd-n2p2","q":[2],"n":"1..3","char":{"modulus":5,"order":4,"generators":[[2,1]]}}"#).unwrap();
        assert_eq!(ok.n.unwrap().expand().unwrap(), vec![1, 2, 3]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"preset":"rd-n2p2","bogus":1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"char":{"modulus":5,"order":4,"extra":0}}"#).is_err());
    }
}
