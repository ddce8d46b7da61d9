use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use reslat::Limits;

use crate::CapFlags;

pub const CONFIG_ENV: &str = "RESLAT_CONFIG";

/// Caps from the config file (flag, then `RESLAT_CONFIG`), then flags on top.
pub fn load(explicit: Option<&Path>, flags: &CapFlags) -> Result<Limits> {
    let path: Option<PathBuf> = explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut limits = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str::<Limits>(&text).map_err(reslat::Error::from).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => Limits::default(),
    };
    if let Some(v) = flags.max_product_size {
        limits.max_product_size = v;
    }
    if let Some(v) = flags.max_closure_size {
        limits.max_closure_size = v;
    }
    if let Some(v) = flags.max_model_size {
        limits.max_model_size = v;
    }
    if let Some(v) = flags.workers {
        limits.workers = v.max(1);
    }
    Ok(limits)
}
