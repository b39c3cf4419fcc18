use geotherm::models::thermo_quantities;

use crate::config::RunSpec;
use crate::CliError;

/// The potential and its derived quantities in the expression grammar.
pub fn show_model(spec: &RunSpec) -> Result<String, CliError> {
    let model = spec.build_model()?;
    let q = thermo_quantities(&model)?;
    let mut out = format!("# {}\n", model.summary());
    out.push_str(&format!("M = {}\n", model.potential()));
    out.push_str(&format!("T = {}\n", q.temperature));
    if let Some(phi) = q.phi() {
        out.push_str(&format!("Phi_e = {phi}\n"));
    }
    if let Some(l) = q.l_dual() {
        out.push_str(&format!("L = {l}\n"));
    }
    out.push_str(&format!("C_Q = {}\n", q.heat_capacity));
    out.push_str(&format!("f = {}\n", q.conformal_factor));
    Ok(out)
}
