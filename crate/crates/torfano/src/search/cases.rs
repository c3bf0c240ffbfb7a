//! Built-in case configurations.

use std::path::Path;

use super::config::CaseConfig;
use crate::error::{Error, Result};

macro_rules! cases {
    ($($id:literal),* $(,)?) => {
        pub const BUILTIN: &[(&str, &str)] = &[
            $(($id, include_str!(concat!("../../data/cases/", $id, ".case"))),)*
        ];
    };
}

cases!(
    "P4", "C1", "C2", "C3", "D7", "D10", "D11", "D14", "D17", "D18", "G3", "G4", "G5", "I9", "L11", "L13", "Q16",
    "U8", "V4", "W", "Z1", "Z2",
);

pub fn builtin(id: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(k, _)| *k == id).map(|(_, t)| *t)
}

/// Loads `<dir>/<id>.case`, or the built-in configuration.
pub fn load(id: &str, dir: Option<&Path>) -> Result<CaseConfig> {
    let text = match dir {
        Some(d) => {
            let p = d.join(format!("{id}.case"));
            std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?
        }
        None => builtin(id)
            .ok_or_else(|| Error::Config { id: id.to_string(), msg: "no case configuration".into() })?
            .to_string(),
    };
    let cfg = CaseConfig::parse(&text)?;
    if cfg.id != id {
        return Err(Error::Config { id: id.to_string(), msg: format!("file declares case `{}`", cfg.id) });
    }
    Ok(cfg)
}
