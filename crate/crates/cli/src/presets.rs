//! Built-in scenarios.

use crate::error::{CliError, Result};

pub const PRESET_NAMES: [&str; 3] = ["exampleA", "exampleB", "exampleB-barrier"];

/// Gaussian packet moving right through a Pöschl-Teller barrier.
pub const EXAMPLE_A: &str = r#"
[grid]
x = [4.0, 4.2]
j = [400, 64]
t_final = 0.05
m = 1000
left_boundary = "transparent"

[physics]
hbar = 1.0
c_hbar = 1.0
v_inf = 0.0

[potential]
type = "poschl_teller"
alpha0 = 6.0
c1 = 47.0
x_star = 2.0

[packet]
k = 42.42640687119285
alpha = 0.008333333333333333
x0 = [1.0, 2.1]

[scheme]
variant = "double_split_tbc"
enlargement = 3

[convergence]
meshes = [[400, 64], [800, 128], [1600, 256]]
levels = [1000, 1000, 1000]
"#;

/// The same packet crossing a deep rectangular well.
pub const EXAMPLE_B: &str = r#"
[grid]
x = [3.0, 2.8]
j = [600, 64]
t_final = 0.027
m = 2400
left_boundary = "transparent"

[physics]
hbar = 1.0
c_hbar = 1.0
v_inf = 0.0

[potential]
type = "rectangular"
a = 1.6
b = 1.9
c = 0.7
d = 2.1
q = -9000.0

[packet]
k = 42.42640687119285
alpha = 0.008333333333333333
x0 = [1.0, 1.4]

[scheme]
variant = "double_split_tbc"
enlargement = 3

[convergence]
meshes = [[600, 64], [1200, 128]]
levels = [2400, 4800]
"#;

/// Narrow rectangular barrier in place of the well.
pub const EXAMPLE_B_BARRIER: &str = r#"
[grid]
x = [3.0, 2.8]
j = [600, 64]
t_final = 0.027
m = 2400
left_boundary = "transparent"

[physics]
hbar = 1.0
c_hbar = 1.0
v_inf = 0.0

[potential]
type = "rectangular"
a = 1.6
b = 1.7
c = 0.7
d = 2.1
q = 1500.0

[packet]
k = 42.42640687119285
alpha = 0.008333333333333333
x0 = [1.0, 1.4]

[scheme]
variant = "double_split_tbc"
enlargement = 3

[convergence]
meshes = [[600, 64], [1200, 128]]
levels = [2400, 4800]
"#;

pub fn preset_text(name: &str) -> Result<&'static str> {
    match name {
        "exampleA" => Ok(EXAMPLE_A),
        "exampleB" => Ok(EXAMPLE_B),
        "exampleB-barrier" => Ok(EXAMPLE_B_BARRIER),
        other => Err(CliError::Config(format!(
            "unknown preset {other:?}; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

pub(crate) fn preset_table(name: &str) -> Result<toml::Table> {
    preset_text(name)?
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("preset {name}: {e}")))
}
