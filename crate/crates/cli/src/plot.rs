//! Plot-ready data: one two-column `t,value` file per environment and species.
//!
//! Layout under the bundle directory: `<environment>/<species>.csv`. Repetitions
//! are separate blocks introduced by `# rep: r` and separated by a blank line,
//! which gnuplot treats as distinct curves.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ckm_core::Dataset;

/// `(relative path, contents)` for every plot file of `ds`.
pub fn plot_files(ds: &Dataset) -> Vec<(PathBuf, String)> {
    let t = ds.grid.points();
    let mut out = Vec::new();
    for (e, env) in ds.environments.iter().enumerate() {
        let rows = ds.rows_in_env(e);
        for (k, name) in ds.names.iter().enumerate() {
            let mut text = format!("# environment: {}\n# species: {name}\nt,value\n", env.label);
            for (i, &r) in rows.iter().enumerate() {
                if i > 0 {
                    text.push('\n');
                }
                let _ = writeln!(text, "# rep: {}", ds.rows[r].rep + 1);
                for (l, v) in ds.series(r, k).iter().enumerate() {
                    let _ = writeln!(text, "{},{}", t[l], v);
                }
            }
            out.push((Path::new(&env.label).join(format!("{name}.csv")), text));
        }
    }
    out
}
