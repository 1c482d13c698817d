//! Real-valued grid functions, Lebesgue norms and the coupling integral.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// A real function sampled on a [`Grid`].
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: Arc::clone(grid),
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Self {
            values: vec![value; grid.len()],
            grid: Arc::clone(grid),
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, t: f64) -> Field {
        self.map(|v| t * v)
    }

    /// `self + t * other`.
    pub fn add_scaled(&self, t: f64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + t * b)
            .collect();
        Ok(Field::from_raw(&self.grid, values))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add_scaled(-1.0, other)
    }

    /// `int u v dx` by the uniform midpoint rule.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v * v).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Reflection `x -> -x` about the box center (index `j -> (P - j) mod P` per axis).
    pub fn reflected(&self) -> Field {
        let p = self.grid.points_per_axis();
        let values = (0..self.grid.len())
            .map(|flat| {
                let idx = self.grid.multi_index(flat);
                let src = idx
                    .iter()
                    .fold(0, |acc, &j| acc * p + (p - j) % p);
                self.values[src]
            })
            .collect();
        Field::from_raw(&self.grid, values)
    }
}

/// `||u||_p = (h^N sum |u|^p)^(1/p)`.
pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(Error::InvalidLebesgueExponent(p));
    }
    let sum: f64 = u.values.iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * u.grid.cell_volume()).powf(1.0 / p))
}

/// `x^e` for `x > 0`, zero otherwise.
///
/// Used for every positive-part power, including negative exponents, where an
/// exact zero contributes nothing.
pub fn pos_pow(x: f64, e: f64) -> f64 {
    if x > 0.0 {
        x.powf(e)
    } else {
        0.0
    }
}

/// `int u_+^alpha v_+^beta` when `positive_parts`, else `int |u|^alpha |v|^beta`.
pub fn coupling_integral(
    u: &Field,
    v: &Field,
    alpha: f64,
    beta: f64,
    positive_parts: bool,
) -> Result<f64> {
    u.check_grid(v)?;
    let sum: f64 = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(&a, &b)| {
            if positive_parts {
                pos_pow(a, alpha) * pos_pow(b, beta)
            } else {
                a.abs().powf(alpha) * b.abs().powf(beta)
            }
        })
        .sum();
    Ok(sum * u.grid.cell_volume())
}

/// On-disk layout of a field file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    /// Text: a `dimension,points_per_axis,box_length` header row, its values,
    /// then one value per line in row-major order.
    Csv,
    /// Little-endian: `u32` dimension, `u32` points per axis, `f64` box length,
    /// then row-major `f64` values.
    Binary,
}

const CSV_HEADER: &str = "dimension,points_per_axis,box_length";

pub fn write_field<W: Write>(field: &Field, format: FieldFormat, mut out: W) -> Result<()> {
    let g = field.grid();
    match format {
        FieldFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            writeln!(
                out,
                "{},{},{}",
                g.dimension(),
                g.points_per_axis(),
                crate::report::fmt_f64(g.box_length())
            )?;
            for v in field.values() {
                writeln!(out, "{}", crate::report::fmt_f64(*v))?;
            }
        }
        FieldFormat::Binary => {
            out.write_all(&(g.dimension() as u32).to_le_bytes())?;
            out.write_all(&(g.points_per_axis() as u32).to_le_bytes())?;
            out.write_all(&g.box_length().to_le_bytes())?;
            for v in field.values() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_field<R: BufRead>(format: FieldFormat, mut input: R) -> Result<Field> {
    match format {
        FieldFormat::Csv => {
            let mut lines = input.lines();
            let header = lines
                .next()
                .ok_or_else(|| Error::Format("empty field file".into()))??;
            if header.trim() != CSV_HEADER {
                return Err(Error::Format(format!("unexpected header {header:?}")));
            }
            let meta = lines
                .next()
                .ok_or_else(|| Error::Format("missing grid row".into()))??;
            let parts: Vec<&str> = meta.trim().split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Format(format!("bad grid row {meta:?}")));
            }
            let dimension = parse::<usize>(parts[0])?;
            let points = parse::<usize>(parts[1])?;
            let length = parse::<f64>(parts[2])?;
            let grid = crate::grid::make_grid(dimension, points, length)?;
            let mut values = Vec::with_capacity(grid.len());
            for line in lines {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                values.push(parse::<f64>(line.trim())?);
            }
            Field::new(grid, values)
        }
        FieldFormat::Binary => {
            let mut word = [0u8; 4];
            input.read_exact(&mut word)?;
            let dimension = u32::from_le_bytes(word) as usize;
            input.read_exact(&mut word)?;
            let points = u32::from_le_bytes(word) as usize;
            let mut dword = [0u8; 8];
            input.read_exact(&mut dword)?;
            let length = f64::from_le_bytes(dword);
            let grid = crate::grid::make_grid(dimension, points, length)?;
            let mut values = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                input.read_exact(&mut dword)?;
                values.push(f64::from_le_bytes(dword));
            }
            let mut rest = Vec::new();
            input.read_to_end(&mut rest)?;
            if !rest.is_empty() {
                return Err(Error::Format(format!("{} trailing bytes", rest.len())));
            }
            Field::new(grid, values)
        }
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("cannot parse {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn lp_norm_examples() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let one = Field::constant(&g, 1.0);
        assert!((lp_norm(&one, 2.0).unwrap() - 10f64.sqrt()).abs() < 1e-13);
        assert_eq!(lp_norm(&Field::zeros(&g), 3.0).unwrap(), 0.0);

        let g = make_grid(1, 64, 2.0 * PI).unwrap();
        let c = Field::from_fn(&g, |x| x[0].cos());
        assert!((lp_norm(&c, 2.0).unwrap() - PI.sqrt()).abs() < 1e-13);
        assert!(matches!(lp_norm(&c, 0.5), Err(Error::InvalidLebesgueExponent(_))));
    }

    #[test]
    fn coupling_examples() {
        let g = make_grid(2, 16, 3.0).unwrap();
        let vol = g.volume();
        let one = Field::constant(&g, 1.0);
        let two = Field::constant(&g, 2.0);
        assert!((coupling_integral(&one, &one, 1.7, 2.3, true).unwrap() - vol).abs() < 1e-12);
        assert!((coupling_integral(&two, &one, 2.0, 3.0, true).unwrap() - 4.0 * vol).abs() < 1e-12);
        let neg = Field::constant(&g, -1.0);
        assert_eq!(coupling_integral(&neg, &one, 2.0, 2.0, true).unwrap(), 0.0);
        assert!((coupling_integral(&neg, &one, 2.0, 2.0, false).unwrap() - vol).abs() < 1e-12);
    }

    #[test]
    fn coupling_rejects_mismatched_grids() {
        let a = Field::zeros(&make_grid(1, 16, 1.0).unwrap());
        let b = Field::zeros(&make_grid(1, 32, 1.0).unwrap());
        assert!(matches!(coupling_integral(&a, &b, 2.0, 2.0, true), Err(Error::GridMismatch)));
    }

    #[test]
    fn rejects_nonfinite_values() {
        let g = make_grid(1, 16, 1.0).unwrap();
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(matches!(Field::new(g.clone(), v), Err(Error::NonFinite(_))));
        assert!(matches!(Field::new(g, vec![0.0; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn reflection_is_an_involution() {
        let g = make_grid(2, 16, 4.0).unwrap();
        let u = Field::from_fn(&g, |x| x[0] + 2.0 * x[1] * x[1]);
        let r = u.reflected();
        let back = r.reflected();
        assert_eq!(u.values(), back.values());
        // x -> -x maps the point at index (1, 2) to (15, 14)
        assert_eq!(r.values()[16 + 2], u.values()[15 * 16 + 14]);
    }

    #[test]
    fn csv_layout_is_stable() {
        let g = make_grid(1, 16, 2.0).unwrap();
        let u = Field::from_fn(&g, |x| x[0]);
        let mut buf = Vec::new();
        write_field(&u, FieldFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("1,16,2.0000000000000000e0"));
        assert_eq!(lines.next(), Some("-1.0000000000000000e0"));
        assert_eq!(text.lines().count(), 18);
    }
}
