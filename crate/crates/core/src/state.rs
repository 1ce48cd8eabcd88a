//! Simulation state and initial conditions.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::field::{ScalarField, VectorField};
use crate::grid::GridSpec;

/// The four unknowns at one time level: cell density `n`, signal `c`,
/// velocity `u` (staggered), pressure `p`.
#[derive(Debug, Clone)]
pub struct State {
    pub n: ScalarField,
    pub c: ScalarField,
    pub u: VectorField,
    pub p: ScalarField,
    pub t: f64,
}

/// One Gaussian density bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InitialConditionSpec {
    /// Superposition of Gaussian bumps for n; c = 0, u = 0. When
    /// `normalize_mass` is set, n is rescaled so its discrete integral hits
    /// that value exactly.
    GaussianBumps {
        bumps: Vec<GaussianBump>,
        #[serde(default)]
        normalize_mass: Option<f64>,
    },
    /// n = mean + amplitude-scaled noise per cell, c = mean, u = 0.
    /// The perturbation is drawn from the seeded generator, so a seed fully
    /// determines the initial data.
    UniformPlusPerturbation { mean: f64, amplitude: f64 },
    /// n read from a field file (see [`read_field_file`]); c = 0, u = 0.
    FromFile { path: PathBuf },
}

impl InitialConditionSpec {
    pub fn validate(&self, grid: &GridSpec) -> Result<(), ConfigError> {
        match self {
            InitialConditionSpec::GaussianBumps { bumps, normalize_mass } => {
                for b in bumps {
                    if b.center.len() != grid.dim {
                        return Err(ConfigError::InitialCondition(format!(
                            "bump center length {} does not match dim {}",
                            b.center.len(),
                            grid.dim
                        )));
                    }
                    if !(b.width > 0.0) || !b.width.is_finite() {
                        return Err(ConfigError::InitialCondition(format!(
                            "bump width must be positive, got {}",
                            b.width
                        )));
                    }
                    if !b.amplitude.is_finite() {
                        return Err(ConfigError::InitialCondition("bump amplitude must be finite".into()));
                    }
                }
                if let Some(mass) = normalize_mass {
                    if !(*mass > 0.0) || !mass.is_finite() {
                        return Err(ConfigError::InitialCondition(format!(
                            "normalize_mass must be positive, got {mass}"
                        )));
                    }
                }
                Ok(())
            }
            InitialConditionSpec::UniformPlusPerturbation { mean, amplitude } => {
                if !mean.is_finite() || !amplitude.is_finite() {
                    return Err(ConfigError::InitialCondition("mean/amplitude must be finite".into()));
                }
                if *amplitude < 0.0 || *amplitude > *mean {
                    return Err(ConfigError::InitialCondition(format!(
                        "amplitude must lie in [0, mean] to keep the density nonnegative \
                         (mean {mean}, amplitude {amplitude})"
                    )));
                }
                Ok(())
            }
            InitialConditionSpec::FromFile { .. } => Ok(()),
        }
    }
}

/// Build the t = 0 state. The velocity starts at zero (divergence-free) and
/// the pressure at zero; `seed` drives the perturbation generator.
pub fn init_state(grid: &GridSpec, ic: &InitialConditionSpec, seed: u64) -> Result<State, ConfigError> {
    ic.validate(grid)?;
    let (n, c) = match ic {
        InitialConditionSpec::GaussianBumps { bumps, normalize_mass } => {
            let bumps = bumps.clone();
            let dim = grid.dim;
            let mut n = ScalarField::from_fn(grid, move |x| {
                bumps
                    .iter()
                    .map(|b| {
                        let r2: f64 =
                            (0..dim).map(|a| (x[a] - b.center[a]) * (x[a] - b.center[a])).sum();
                        b.amplitude * (-r2 / (2.0 * b.width * b.width)).exp()
                    })
                    .sum()
            });
            if let Some(mass) = normalize_mass {
                let current = n.integral();
                if !(current > 0.0) {
                    return Err(ConfigError::InitialCondition(
                        "cannot normalize a field with nonpositive mass".into(),
                    ));
                }
                let scale = mass / current;
                for v in n.data_mut() {
                    *v *= scale;
                }
            }
            (n, ScalarField::zeros(grid))
        }
        InitialConditionSpec::UniformPlusPerturbation { mean, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut n = ScalarField::zeros(grid);
            for v in n.data_mut() {
                let xi: f64 = rng.gen_range(-1.0..=1.0);
                *v = mean + amplitude * xi;
            }
            (n, ScalarField::constant(grid, *mean))
        }
        InitialConditionSpec::FromFile { path } => {
            let n = read_field_file(path, grid)?;
            (n, ScalarField::zeros(grid))
        }
    };
    let min = n.min();
    if min < 0.0 {
        return Err(ConfigError::InitialCondition(format!(
            "initial density has negative entries (min {min:e})"
        )));
    }
    if !n.all_finite() || !c.all_finite() {
        return Err(ConfigError::InitialCondition("initial fields must be finite".into()));
    }
    Ok(State {
        n,
        c,
        u: VectorField::zeros(grid),
        p: ScalarField::zeros(grid),
        t: 0.0,
    })
}

/// Header tag of the cell-field file format.
pub const FIELD_FILE_TAG: &str = "ksflow-field v1";

/// Read a cell-centered scalar field. Format: a header line
/// `ksflow-field v1, <dim>, <cells_0>, <cells_1>[, <cells_2>]` followed by
/// the values in storage order (axis 0 fastest), separated by newlines or
/// commas.
pub fn read_field_file(path: &Path, grid: &GridSpec) -> Result<ScalarField, ConfigError> {
    let file = std::fs::File::open(path)
        .map_err(|e| ConfigError::FieldFile(format!("{}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let mut header = String::new();
    reader
        .read_line(&mut header)
        .map_err(|e| ConfigError::FieldFile(format!("{}: {e}", path.display())))?;
    let parts: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    if parts.is_empty() || parts[0] != FIELD_FILE_TAG {
        return Err(ConfigError::FieldFile(format!(
            "bad header {header:?}, expected it to start with {FIELD_FILE_TAG:?}"
        )));
    }
    if parts.len() != 2 + grid.dim {
        return Err(ConfigError::FieldFile(format!(
            "header lists {} fields, expected dim + cells for dim {}",
            parts.len() - 1,
            grid.dim
        )));
    }
    let dim: usize = parts[1]
        .parse()
        .map_err(|_| ConfigError::FieldFile(format!("bad dim {:?}", parts[1])))?;
    if dim != grid.dim {
        return Err(ConfigError::FieldFile(format!(
            "file dim {dim} does not match grid dim {}",
            grid.dim
        )));
    }
    for a in 0..dim {
        let cells: usize = parts[2 + a]
            .parse()
            .map_err(|_| ConfigError::FieldFile(format!("bad cell count {:?}", parts[2 + a])))?;
        if cells != grid.cells[a] {
            return Err(ConfigError::FieldFile(format!(
                "file has {cells} cells on axis {a}, grid has {}",
                grid.cells[a]
            )));
        }
    }
    let mut values = Vec::with_capacity(grid.n_cells());
    for line in reader.lines() {
        let line = line.map_err(|e| ConfigError::FieldFile(e.to_string()))?;
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .map_err(|_| ConfigError::FieldFile(format!("bad value {tok:?}")))?;
            values.push(v);
        }
    }
    if values.len() != grid.n_cells() {
        return Err(ConfigError::FieldFile(format!(
            "file holds {} values, grid needs {}",
            values.len(),
            grid.n_cells()
        )));
    }
    Ok(ScalarField::from_vec(grid, values))
}

/// Write a field in the format [`read_field_file`] accepts.
pub fn write_field_file(path: &Path, field: &ScalarField) -> std::io::Result<()> {
    let grid = field.grid();
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let cells: Vec<String> = grid.cells.iter().map(|c| c.to_string()).collect();
    writeln!(w, "{FIELD_FILE_TAG}, {}, {}", grid.dim, cells.join(", "))?;
    for v in field.data() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}
