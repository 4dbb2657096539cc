//! Fixtures shared by the kernel benchmarks.

use std::sync::Arc;

use gradcat_core::eos::{EntropyProfile, GammaLaw, PressureLaw, ProfileShape};
use gradcat_core::solver::{Boundary, FieldState, Grid, InitialData, Simulation};
use gradcat_core::thermo::{LatticeSpec, Thermo};

pub const DOMAIN: (f64, f64) = (-4.0, 4.0);

pub fn gamma_two() -> PressureLaw {
    PressureLaw::new(Arc::new(GammaLaw::new(1.0, 2.0, 1.0)), Default::default())
}

pub fn isentropic() -> Thermo {
    Thermo::new(gamma_two(), EntropyProfile::constant(0.0, 0.5, DOMAIN))
}

/// Mild tanh entropy with the memo lattice built over `τ ∈ [0.05, 8]`.
pub fn with_entropy() -> Thermo {
    let profile = EntropyProfile::new(
        ProfileShape::Tanh {
            amplitude: 0.05,
            center: 0.0,
            width: 1.0,
        },
        0.5,
        DOMAIN,
    )
    .expect("valid profile");
    let mut thermo = Thermo::new(gamma_two(), profile);
    thermo
        .build_lattice(LatticeSpec {
            tau_min: 0.05,
            tau_max: 8.0,
            tau_points: 160,
            entropy_points: 65,
        })
        .expect("lattice builds");
    thermo
}

/// Compressive pulse on `cells` outflow cells.
pub fn pulse_state(cells: usize) -> (Grid, FieldState) {
    let grid = Grid::new(DOMAIN.0, DOMAIN.1, cells, Boundary::Outflow).expect("valid grid");
    let state = InitialData::Sech2Pulse {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
        tau: 1.0,
    }
    .sample(&grid);
    (grid, state)
}

pub fn simulation<'a>(thermo: &'a Thermo, grid: Grid, state: &FieldState) -> Simulation<'a> {
    Simulation::new(thermo, grid, 0.4, Simulation::default_floor(state)).expect("valid simulation")
}
