//! Checked-in figure panels.

use super::config::FigureConfig;
use super::sweep::{run_sweep, SweepTable};
use crate::error::{Error, Result};

macro_rules! panels {
    ($($id:literal),* $(,)?) => {
        /// `(id, json)` for every panel.
        pub const PANELS: &[(&str, &str)] = &[
            $(($id, include_str!(concat!("../../../../configs/fig", $id, ".json")))),*
        ];
    };
}

panels!("2a", "2b", "2c", "2d", "3a", "3b", "3c", "3d", "4a", "4b", "5a", "5b", "5c", "5d");

pub fn panel_ids() -> impl Iterator<Item = &'static str> {
    PANELS.iter().map(|p| p.0)
}

pub fn figure_config(id: &str) -> Result<FigureConfig> {
    let (_, text) = PANELS
        .iter()
        .find(|p| p.0 == id)
        .ok_or_else(|| Error::Config(format!("unknown figure `{id}`; expected one of {}", panel_ids().collect::<Vec<_>>().join(", "))))?;
    FigureConfig::from_json(text, None)
}

/// Runs every curve of a panel, returning `(run name, table)` in file order.
pub fn run_figure(id: &str) -> Result<Vec<(String, SweepTable)>> {
    figure_config(id)?
        .runs
        .iter()
        .map(|run| Ok((run.name.clone(), run_sweep(run)?)))
        .collect()
}
