pub mod derive;
pub mod diagnostics;
pub mod identities;
pub mod scan_phase;
pub mod validate_ed;

use sceff_core::models::Model;

pub(crate) fn one_band_model(name: &str) -> Option<Model> {
    match name {
        "one-band-general" => Some(Model::one_band_general()),
        "one-band-symmetric" => Some(Model::one_band_symmetric()),
        "falicov-kimball" => Some(Model::falicov_kimball()),
        _ => None,
    }
}
