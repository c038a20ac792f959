//! Plain-text checkpoints of a deformation field.
//!
//! ```text
//! # viscomem deformation checkpoint v1
//! # we=<f64>
//! # step=<u64>
//! # t=<f64>
//! # d=<2|3>
//! # n_age=<usize>
//! # n_cells=<usize>
//! age_index,s,cell,x,y,g11,g12,...
//! ```
//!
//! Rows are ordered by age, then cell; tensor entries are row-major.

use std::io::{BufRead, Write};

use super::{AgeTimeField, Layout};
use crate::error::{Error, Result};
use crate::tensor::Tensor2;

pub const CHECKPOINT_MAGIC: &str = "# viscomem deformation checkpoint v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub we: f64,
    pub step: u64,
    pub t: f64,
    pub d: usize,
    pub ages: Vec<f64>,
    pub n_cells: usize,
    /// Cell-major, like [`AgeTimeField::values`].
    pub values: Vec<Tensor2>,
}

pub fn write_checkpoint(field: &AgeTimeField, step: u64, out: &mut impl Write) -> Result<()> {
    let d = field.dim();
    writeln!(out, "{CHECKPOINT_MAGIC}")?;
    writeln!(out, "# we={:.16e}", field.we())?;
    writeln!(out, "# step={step}")?;
    writeln!(out, "# t={:.16e}", field.time())?;
    writeln!(out, "# d={d}")?;
    writeln!(out, "# n_age={}", field.n_ages())?;
    writeln!(out, "# n_cells={}", field.n_cells())?;
    let mut header = String::from("age_index,s,cell,x,y");
    for i in 0..d {
        for j in 0..d {
            header.push_str(&format!(",g{}{}", i + 1, j + 1));
        }
    }
    writeln!(out, "{header}")?;
    let nodes = field.grid().nodes();
    for (a, s) in nodes.iter().enumerate() {
        for c in 0..field.n_cells() {
            let (x, y) = match field.layout() {
                Layout::Homogeneous => (0.0, 0.0),
                Layout::Profile { ny, height } => (0.0, (c as f64 + 0.5) * height / *ny as f64),
                Layout::Channel(m) => m.center(c),
            };
            let mut line = format!("{a},{s:.16e},{c},{x:.16e},{y:.16e}");
            for v in field.get(c, a).to_row_major() {
                line.push_str(&format!(",{v:.16e}"));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn header_value<T: std::str::FromStr>(line: Option<String>, key: &str) -> Result<T> {
    let line = line.ok_or_else(|| Error::Checkpoint(format!("missing header {key}")))?;
    line.strip_prefix(&format!("# {key}="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Checkpoint(format!("bad header line for {key}: {line}")))
}

pub fn read_checkpoint(input: impl BufRead) -> Result<Checkpoint> {
    let mut lines = input.lines();
    let mut next = || lines.next().transpose().map_err(Error::from);
    if next()?.as_deref() != Some(CHECKPOINT_MAGIC) {
        return Err(Error::Checkpoint("missing checkpoint magic line".into()));
    }
    let we: f64 = header_value(next()?, "we")?;
    let step: u64 = header_value(next()?, "step")?;
    let t: f64 = header_value(next()?, "t")?;
    let d: usize = header_value(next()?, "d")?;
    let n_age: usize = header_value(next()?, "n_age")?;
    let n_cells: usize = header_value(next()?, "n_cells")?;
    if d != 2 && d != 3 {
        return Err(Error::Checkpoint(format!("unsupported dimension {d}")));
    }
    next()?.ok_or_else(|| Error::Checkpoint("missing column header".into()))?;
    let mut ages = vec![0.0; n_age];
    let mut values = vec![Tensor2::zeros(d); n_age * n_cells];
    let mut rows = 0;
    while let Some(line) = next()? {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 + d * d {
            return Err(Error::Checkpoint(format!("row {rows} has {} columns", fields.len())));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Checkpoint(format!("bad number {s:?} in row {rows}")))
        };
        let a: usize = fields[0]
            .parse()
            .map_err(|_| Error::Checkpoint(format!("bad age index in row {rows}")))?;
        let c: usize = fields[2]
            .parse()
            .map_err(|_| Error::Checkpoint(format!("bad cell index in row {rows}")))?;
        if a >= n_age || c >= n_cells {
            return Err(Error::Checkpoint(format!("row {rows} indexes outside the field")));
        }
        ages[a] = parse(fields[1])?;
        let entries = fields[5..].iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        values[c * n_age + a] = Tensor2::from_row_major(d, &entries);
        rows += 1;
    }
    if rows != n_age * n_cells {
        return Err(Error::Checkpoint(format!(
            "expected {} rows, found {rows}",
            n_age * n_cells
        )));
    }
    Ok(Checkpoint {
        we,
        step,
        t,
        d,
        ages,
        n_cells,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_age_grid_with, AgeGridOptions, MemoryKernel};
    use crate::mesh::ChannelMesh;
    use std::sync::Arc;

    #[test]
    fn write_then_read() {
        let k = MemoryKernel::single_exponential();
        let g = build_age_grid_with(&k, &AgeGridOptions::new(1e-2, 1e-6).uniform(0.5)).unwrap();
        let mesh = ChannelMesh::new(3, 2, 1.0, 1.0).unwrap();
        let mut f = AgeTimeField::at_rest(Arc::new(g), Layout::Channel(mesh), 2, 0.7).unwrap();
        f.fill(|c, _, s| Tensor2::identity(2) + Tensor2::unit(2, 1, 0).scale(s * c as f64 / 3.0));
        f.set_time(1.25);
        let mut buf = Vec::new();
        write_checkpoint(&f, 42, &mut buf).unwrap();
        let cp = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(cp.step, 42);
        assert_eq!(cp.we, 0.7);
        assert_eq!(cp.t, 1.25);
        assert_eq!(cp.values, f.values());
        assert_eq!(cp.ages, f.grid().nodes());
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(read_checkpoint("hello\n".as_bytes()).is_err());
        let truncated = format!("{CHECKPOINT_MAGIC}\n# we=1\n");
        assert!(read_checkpoint(truncated.as_bytes()).is_err());
    }
}
