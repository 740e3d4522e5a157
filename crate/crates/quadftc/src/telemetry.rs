//! Telemetry CSV schema: one record per integration step.

use std::io::{BufRead, Write};

use crate::dynamics::SimState;
use crate::error::Error;
use crate::Result;

/// First line of every telemetry file.
pub const SCHEMA_VERSION_LINE: &str = "# quadftc-telemetry v1";

/// Frozen column order.
pub const HEADER: &str = "t,x,y,z,phi,theta,psi,xd,yd,zd,phid,thetad,psid,U1,U2,U3,U4,w1c,w2c,w3c,w4c,w1a,w2a,w3a,w4a,s_z,s_phi,s_theta,s_psi,k1,k2,k3,k4,clamped";

/// One simulation step's full observable set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRecord {
    pub t: f64,
    pub state: SimState,
    /// Controller output wrench U1..U4.
    pub u: [f64; 4],
    /// Commanded rotor speeds.
    pub w_cmd: [f64; 4],
    /// Actual (post-fault) rotor speeds.
    pub w_act: [f64; 4],
    /// Sliding surfaces [s_z, s_phi, s_theta, s_psi].
    pub s: [f64; 4],
    /// Effectiveness used by the allocator.
    pub k: [f64; 4],
    pub clamped: bool,
}

impl TelemetryRecord {
    fn to_fields(&self) -> [f64; 33] {
        let st = self.state.to_array();
        [
            self.t, st[0], st[1], st[2], st[3], st[4], st[5], st[6], st[7], st[8], st[9], st[10],
            st[11], self.u[0], self.u[1], self.u[2], self.u[3], self.w_cmd[0], self.w_cmd[1],
            self.w_cmd[2], self.w_cmd[3], self.w_act[0], self.w_act[1], self.w_act[2],
            self.w_act[3], self.s[0], self.s[1], self.s[2], self.s[3], self.k[0], self.k[1],
            self.k[2], self.k[3],
        ]
    }

    fn from_fields(f: &[f64; 33], clamped: bool) -> Self {
        TelemetryRecord {
            t: f[0],
            state: SimState::from_array([
                f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11], f[12],
            ]),
            u: [f[13], f[14], f[15], f[16]],
            w_cmd: [f[17], f[18], f[19], f[20]],
            w_act: [f[21], f[22], f[23], f[24]],
            s: [f[25], f[26], f[27], f[28]],
            k: [f[29], f[30], f[31], f[32]],
            clamped,
        }
    }
}

/// Writes the schema line, header and records. Numbers are serialized with
/// 17 significant digits so repeated runs byte-compare and round-trip.
pub fn write_csv<W: Write>(mut w: W, records: &[TelemetryRecord]) -> Result<()> {
    writeln!(w, "{SCHEMA_VERSION_LINE}")?;
    writeln!(w, "{HEADER}")?;
    let mut line = String::with_capacity(1024);
    for rec in records {
        line.clear();
        for v in rec.to_fields() {
            line.push_str(&format!("{v:.16e}"));
            line.push(',');
        }
        line.push(if rec.clamped { '1' } else { '0' });
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_csv_file(path: &std::path::Path, records: &[TelemetryRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), records)
}

/// Parses a telemetry file, rejecting unknown schema versions and column sets.
pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<TelemetryRecord>> {
    let mut lines = r.lines();
    let version = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Schema("empty telemetry file".to_string()))?;
    if version.trim() != SCHEMA_VERSION_LINE {
        return Err(Error::Schema(format!(
            "unknown telemetry schema version: {version:?}"
        )));
    }
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Schema("missing header line".to_string()))?;
    if header.trim() != HEADER {
        let expected: Vec<&str> = HEADER.split(',').collect();
        let got: Vec<&str> = header.trim().split(',').collect();
        let missing: Vec<&str> = expected
            .iter()
            .filter(|c| !got.contains(*c))
            .copied()
            .collect();
        return Err(Error::Schema(format!(
            "header mismatch; missing columns: {missing:?}"
        )));
    }

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != 34 {
            return Err(Error::Schema(format!(
                "row {}: expected 34 fields, got {}",
                idx + 3,
                parts.len()
            )));
        }
        let mut fields = [0.0; 33];
        for (i, p) in parts[..33].iter().enumerate() {
            fields[i] = p.parse::<f64>().map_err(|e| {
                Error::Schema(format!("row {}: bad number {p:?}: {e}", idx + 3))
            })?;
        }
        let clamped = match parts[33] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Schema(format!(
                    "row {}: bad clamped flag {other:?}",
                    idx + 3
                )))
            }
        };
        records.push(TelemetryRecord::from_fields(&fields, clamped));
    }
    Ok(records)
}

pub fn read_csv_file(path: &std::path::Path) -> Result<Vec<TelemetryRecord>> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TelemetryRecord {
        TelemetryRecord {
            t: 0.123456789012345,
            state: SimState::from_array([
                1.0,
                -2.0,
                3.5,
                0.1,
                -0.2,
                0.3,
                0.4,
                -0.5,
                0.6,
                1e-17,
                -1e300,
                std::f64::consts::PI,
            ]),
            u: [4.2, -0.01, 0.02, -0.003],
            w_cmd: [361.0, 362.0, 363.0, 364.0],
            w_act: [361.0, 362.0, 363.0, 145.6],
            s: [0.0, 1e-9, -1e-9, 2.0],
            k: [1.0, 1.0, 1.0, 0.4],
            clamped: true,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let recs = vec![sample()];
        let mut buf = Vec::new();
        write_csv(&mut buf, &recs).unwrap();
        let back = read_csv(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn unknown_version_rejected() {
        let doc = "# quadftc-telemetry v2\n".to_string() + HEADER + "\n";
        let err = read_csv(std::io::Cursor::new(doc.into_bytes())).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn missing_columns_listed() {
        let doc = format!("{SCHEMA_VERSION_LINE}\nt,x,y\n");
        let err = read_csv(std::io::Cursor::new(doc.into_bytes())).unwrap_err();
        assert!(err.to_string().contains("missing columns"));
        assert!(err.to_string().contains("clamped"));
    }

    #[test]
    fn writing_is_deterministic() {
        let recs = vec![sample(), sample()];
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &recs).unwrap();
        write_csv(&mut b, &recs).unwrap();
        assert_eq!(a, b);
    }
}
