//! JSON-configured campaigns behind the `corrgsa` commands.
//!
//! Every command takes a loaded [`Campaign`] and an output directory and
//! returns the files it wrote. Numbers in CSV output have 12 significant
//! digits, so identical configs give byte-identical files.

mod commands;
mod config;

pub use commands::{
    cmd_convergence, cmd_run, cmd_surface, cmd_sweep_rho, effective_rho, nearest_index, Campaign,
    RHO_ONE_SUBSTITUTE,
};
pub use config::{
    coffee_cup_config, CampaignConfig, ConvergenceSection, CorrelationSpec, Format, MarginalSpec,
    OutputSection, QmcSection, SurfaceSection, SweepSection, OUT_DIR_ENV,
};
