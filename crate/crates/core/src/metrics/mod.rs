//! Performance and activity metrics: realtime factor, phase fractions,
//! energy from 1 Hz power logs, firing statistics and raster extraction.

mod activity;
mod power;
mod raster;
mod report;

pub use activity::{cv_isi, population_rates, NeuronCv, PopulationRate, RateStats};
pub use power::{
    align_power, integrate_energy, read_power_csv, PowerTrace, DEVICE_ACCURACY, DEVICE_DELAY_S,
};
pub use raster::{raster_export, write_raster_csv, RasterRow};
pub use report::{
    energy_per_synaptic_event, phase_fractions, rtf, EnergyReport, PhaseFractions, RtfReport,
    REPORT_SCHEMA_VERSION,
};
