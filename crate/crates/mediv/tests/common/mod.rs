//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use mediv_core::{generate_replication, MediatorMode, OutcomeForm, SimulationDesign};

/// Minimal deterministic uniform generator for fixture noise; keeps the test
/// crates free of RNG dependencies.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn uniform(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Scratch path under the cargo-managed test temp directory.
pub fn tmp_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Writes an n-row CSV in the default schema (`y3,d,y2,y1,blk,boy,expi,lunch`)
/// with a real treatment → mediator → outcome structure: the binary mediator
/// and instrument are smeared into continuous sources so that quantile
/// binarization reconstructs informative indicators at any level.
pub fn write_sample_csv(name: &str, n: usize) -> PathBuf {
    let design = SimulationDesign::new(
        OutcomeForm::Continuous,
        MediatorMode::Endogenous,
        n,
        1,
        17,
    );
    let (data, _) = generate_replication(&design, 0);
    let mut rng = Lcg(n as u64 + 1);
    let mut out = String::from("y3,d,y2,y1,blk,boy,expi,lunch\n");
    for i in 0..n {
        let y2 = data.m[i] + 0.9 * rng.uniform();
        let y1 = data.z[i] + 0.9 * rng.uniform();
        let boy = f64::from(rng.uniform() < 0.5);
        let expi = 4.0 + 3.0 * rng.uniform();
        let lunch = f64::from(rng.uniform() < 0.4);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            data.y[i],
            data.d[i],
            y2,
            y1,
            data.x.get(i, 1),
            boy,
            expi,
            lunch
        ));
    }
    let path = tmp_path(name);
    fs::write(&path, out).expect("fixture CSV is writable");
    path
}
