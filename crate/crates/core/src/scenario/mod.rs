//! Scenario files and the runner behind the command-line tool.

mod config;
mod run;

pub use config::{
    parse_config, parse_config_as, render, CaputoSection, CombSection, GridSpec, HamiltonianChoice, HyperbolicSection,
    InitialSpec, MlfSection, ModuleKind, PolesSection, ScenarioConfig, Tolerances,
};
pub use run::{emit_plotdata, initial_profile, run_scenario, write_plotdata, CombTrace, PlotData, RunReport};
