//! Configurations shipped with the binary.

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// `(name, TOML text)` of every bundled scenario.
pub const BUNDLED: &[(&str, &str)] = &[
    ("quiescent", include_str!("../scenarios/quiescent.toml")),
    ("couette_startup_ucm", include_str!("../scenarios/couette_startup_ucm.toml")),
    ("couette_startup_lcm", include_str!("../scenarios/couette_startup_lcm.toml")),
    ("poiseuille_stationary", include_str!("../scenarios/poiseuille_stationary.toml")),
    ("channel_startup", include_str!("../scenarios/channel_startup.toml")),
    ("doi_edwards_startup", include_str!("../scenarios/doi_edwards_startup.toml")),
];

pub fn bundled(name: &str) -> Result<RunConfig> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("no bundled scenario named {name:?}")))?;
    RunConfig::from_toml(text)
}
