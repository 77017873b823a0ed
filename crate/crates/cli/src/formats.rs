//! CSV readers and writers for the three on-disk formats plus plain
//! `r,value` sample files. All floats are written with the shortest
//! round-trip representation, so write -> parse is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use staticmd_core::axisym::AxiPotentialGrid;
use staticmd_core::fd::Grid2;
use staticmd_core::spherical::RadialSolution;
use staticmd_core::spinor::{PhysicalConstants, SpinorPoint, StaticFieldGrid};

#[derive(Debug)]
pub struct DataError(pub String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

/// Parse a `# staticmd-<kind> v1, k=v, ...` header line.
fn parse_header(line: &str, kind: &str) -> Result<Vec<(String, f64)>, DataError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| DataError("missing header line".into()))?
        .trim();
    let mut parts = body.split(',').map(str::trim);
    let tag = parts.next().unwrap_or("");
    let expect = format!("staticmd-{kind} v1");
    if tag != expect {
        return Err(DataError(format!("expected header `{expect}`, found `{tag}`")));
    }
    let mut kv = Vec::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| DataError(format!("malformed header field `{p}`")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| DataError(format!("bad numeric header value `{p}`")))?;
        kv.push((k.trim().to_string(), val));
    }
    Ok(kv)
}

fn header_get(kv: &[(String, f64)], key: &str) -> Result<f64, DataError> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| DataError(format!("header missing `{key}=`")))
}

fn parse_rows(text: &str, cols: usize) -> Result<Vec<Vec<f64>>, DataError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse()).collect();
        let vals =
            vals.map_err(|_| DataError(format!("line {}: unparseable number", i + 1)))?;
        if vals.len() != cols {
            return Err(DataError(format!(
                "line {}: expected {cols} columns, found {}",
                i + 1,
                vals.len()
            )));
        }
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(DataError("no data rows".into()));
    }
    Ok(rows)
}

fn first_line(text: &str) -> &str {
    text.lines().next().unwrap_or("")
}

/// Recover `(r_nodes, theta_nodes)` from row-major `(r, theta)` rows.
fn product_mesh(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>), DataError> {
    let r0 = rows[0][0];
    let n_theta = rows.iter().take_while(|row| row[0] == r0).count();
    if rows.len() % n_theta != 0 {
        return Err(DataError("rows do not tile an (r, theta) product mesh".into()));
    }
    let n_r = rows.len() / n_theta;
    let theta: Vec<f64> = rows[..n_theta].iter().map(|row| row[1]).collect();
    let mut r = Vec::with_capacity(n_r);
    for i in 0..n_r {
        r.push(rows[i * n_theta][0]);
        for j in 0..n_theta {
            if rows[i * n_theta + j][1] != theta[j] {
                return Err(DataError("theta nodes differ between radial blocks".into()));
            }
        }
    }
    Ok((r, theta))
}

/// Parsed `staticmd-radial v1` file. All columns are retained even though
/// the flux commands only consume `r` and `a0`.
#[allow(dead_code)]
pub struct RadialFile {
    pub constants: PhysicalConstants,
    pub eps: i8,
    pub r: Vec<f64>,
    pub big_r: Vec<f64>,
    pub chi: Vec<f64>,
    pub a0: Vec<f64>,
}

pub fn kind_of(path: &Path) -> Result<String, DataError> {
    let text = read(path)?;
    let line = first_line(&text);
    for kind in ["radial", "axipot", "grid"] {
        if parse_header(line, kind).is_ok() {
            return Ok(kind.to_string());
        }
    }
    Err(DataError(format!(
        "unrecognized header `{}`",
        line.chars().take(60).collect::<String>()
    )))
}

pub fn read_radial(path: &Path) -> Result<RadialFile, DataError> {
    let text = read(path)?;
    let kv = parse_header(first_line(&text), "radial")?;
    let (m, e) = (header_get(&kv, "m")?, header_get(&kv, "e")?);
    let eps = header_get(&kv, "eps")? as i8;
    if m <= 0.0 || e == 0.0 {
        return Err(DataError("need m > 0 and e != 0".into()));
    }
    let rows = parse_rows(&text, 4)?;
    if rows.len() < 3 || rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(DataError("need >= 3 strictly increasing radii".into()));
    }
    Ok(RadialFile {
        constants: PhysicalConstants::new(m, e),
        eps,
        r: rows.iter().map(|v| v[0]).collect(),
        big_r: rows.iter().map(|v| v[1]).collect(),
        chi: rows.iter().map(|v| v[2]).collect(),
        a0: rows.iter().map(|v| v[3]).collect(),
    })
}

pub fn write_radial(path: &Path, sol: &RadialSolution) -> Result<(), DataError> {
    let mut out = String::new();
    writeln!(
        out,
        "# staticmd-radial v1, m={}, e={}, eps={}",
        sol.constants.m, sol.constants.e, sol.epsilon_sign
    )
    .unwrap();
    out.push_str("# r,R,chi,A0\n");
    for i in 0..sol.r.len() {
        writeln!(out, "{},{},{},{}", sol.r[i], sol.big_r[i], sol.chi[i], sol.a0[i]).unwrap();
    }
    fs::write(path, out).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

pub fn read_axipot(path: &Path) -> Result<AxiPotentialGrid, DataError> {
    let text = read(path)?;
    let kv = parse_header(first_line(&text), "axipot")?;
    let (m, e) = (header_get(&kv, "m")?, header_get(&kv, "e")?);
    if m <= 0.0 || e == 0.0 {
        return Err(DataError("need m > 0 and e != 0".into()));
    }
    let rows = parse_rows(&text, 4)?;
    let (r, theta) = product_mesh(&rows)?;
    let n_theta = theta.len();
    let a0 = Grid2::from_fn(&r, &theta, |_, _| 0.0);
    let mut a0 = a0;
    let mut aphi = Grid2::zeros(r.len(), n_theta);
    for (idx, row) in rows.iter().enumerate() {
        let (i, j) = (idx / n_theta, idx % n_theta);
        a0[(i, j)] = row[2];
        aphi[(i, j)] = row[3];
    }
    AxiPotentialGrid::new(r, theta, a0, aphi, PhysicalConstants::new(m, e))
        .map_err(|e| DataError(e.to_string()))
}

pub fn read_grid(path: &Path) -> Result<StaticFieldGrid, DataError> {
    let text = read(path)?;
    let kv = parse_header(first_line(&text), "grid")?;
    let (m, e) = (header_get(&kv, "m")?, header_get(&kv, "e")?);
    if m <= 0.0 || e == 0.0 {
        return Err(DataError("need m > 0 and e != 0".into()));
    }
    let rows = parse_rows(&text, 6)?;
    let (r, theta) = product_mesh(&rows)?;
    let values: Vec<SpinorPoint> = rows
        .iter()
        .map(|row| SpinorPoint {
            magnitude: row[2],
            tau: row[3],
            chi: row[4],
            eta: row[5],
        })
        .collect();
    StaticFieldGrid::new(r, theta, values, PhysicalConstants::new(m, e))
        .map_err(|e| DataError(e.to_string()))
}

/// Plain `r,value` sample rows (comments allowed).
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), DataError> {
    let text = read(path)?;
    let rows = parse_rows(&text, 2)?;
    if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(DataError("sample radii must be strictly increasing".into()));
    }
    Ok((
        rows.iter().map(|v| v[0]).collect(),
        rows.iter().map(|v| v[1]).collect(),
    ))
}

/// Two-column plot CSV with a comment header.
pub fn write_series(path: &Path, label: &str, x: &[f64], y: &[f64]) -> Result<(), DataError> {
    let mut out = format!("# {label}\n");
    for (a, b) in x.iter().zip(y) {
        writeln!(out, "{a},{b}").unwrap();
    }
    fs::write(path, out).map_err(|e| DataError(format!("{}: {e}", path.display())))
}
