//! Serialization: JSON reports with full-precision floats and the CSV
//! trajectory/profile formats. All numbers are written with 17 significant
//! digits so that artifacts round-trip 64-bit values exactly and identical
//! runs produce byte-identical files.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::{Result, SolvError};
use crate::flow;
use crate::integrate::{IntegratorStats, Trajectory};
use crate::params::SolvsolitonParams;
use crate::reconstruct::MetricProfile;

/// Pretty JSON formatter that writes every float as `{:.16e}`
/// (17 significant digits; lossless for f64).
pub struct SciPretty<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for SciPretty<'_> {
    fn default() -> Self {
        Self { inner: PrettyFormatter::new() }
    }
}

impl Formatter for SciPretty<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object_value(writer)
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SciPretty::default());
    value
        .serialize(&mut ser)
        .map_err(|e| SolvError::Io(e.to_string()))?;
    String::from_utf8(out).map_err(|e| SolvError::Io(e.to_string()))
}

/// Columns s,x,y,z,w; plus the four Omega margins when `params` is given;
/// plus a Phi column when provided.
pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    traj: &Trajectory<4>,
    margins: Option<&SolvsolitonParams>,
    phi: Option<&[f64]>,
) -> Result<()> {
    let io_err = |e: io::Error| SolvError::Io(e.to_string());
    let mut header = String::from("s,x,y,z,w");
    if margins.is_some() {
        header.push_str(",m_y,m_nx_minus_y,m_z_minus_s0,m_minus_z");
    }
    if phi.is_some() {
        header.push_str(",phi");
    }
    writeln!(w, "{header}").map_err(io_err)?;
    if let Some(vals) = phi {
        if vals.len() != traj.len() {
            return Err(SolvError::Io(format!(
                "phi column has {} values for {} samples",
                vals.len(),
                traj.len()
            )));
        }
    }
    for i in 0..traj.len() {
        let p = &traj.states[i];
        write!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            traj.times[i], p[0], p[1], p[2], p[3]
        )
        .map_err(io_err)?;
        if let Some(params) = margins {
            let m = crate::monitor::omega_margins(params, p);
            write!(w, ",{:.16e},{:.16e},{:.16e},{:.16e}", m[0], m[1], m[2], m[3]).map_err(io_err)?;
        }
        if let Some(vals) = phi {
            write!(w, ",{:.16e}", vals[i]).map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    Ok(())
}

/// Reads back a trajectory CSV (at least the s,x,y,z,w columns), rebuilding
/// the sample derivatives from the vector field. Times must be strictly
/// increasing.
pub fn read_trajectory_csv<R: io::BufRead>(
    r: R,
    params: &SolvsolitonParams,
) -> Result<Trajectory<4>> {
    params.require_flow()?;
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SolvError::Parse("empty trajectory file".into()))?
        .map_err(|e| SolvError::Io(e.to_string()))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 5 || cols[..5] != ["s", "x", "y", "z", "w"] {
        return Err(SolvError::Parse(format!(
            "expected header starting s,x,y,z,w; got {header:?}"
        )));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| SolvError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() < 5 {
            return Err(SolvError::Parse(format!(
                "line {}: expected at least 5 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut vals = [0.0f64; 5];
        for (k, f) in fields[..5].iter().enumerate() {
            vals[k] = f.parse::<f64>().map_err(|e| {
                SolvError::Parse(format!("line {}: field {}: {e}", lineno + 2, k + 1))
            })?;
        }
        if let Some(&prev) = times.last() {
            if vals[0] <= prev {
                return Err(SolvError::Parse(format!(
                    "line {}: times must be strictly increasing ({} after {prev})",
                    lineno + 2,
                    vals[0]
                )));
            }
        }
        times.push(vals[0]);
        states.push(nalgebra::Vector4::new(vals[1], vals[2], vals[3], vals[4]));
    }
    if times.is_empty() {
        return Err(SolvError::Parse("no samples in trajectory file".into()));
    }
    let derivs = states
        .iter()
        .map(|p| flow::field_with_lambda(params, params.lambda, p))
        .collect();
    Ok(Trajectory {
        times,
        states,
        derivs,
        events: Vec::new(),
        stats: IntegratorStats::default(),
        abort: None,
    })
}

/// Columns s,c,h,f_prime[,phi],l_0..l_{n-1}.
pub fn write_profile_csv<W: Write>(mut w: W, profile: &MetricProfile) -> Result<()> {
    let io_err = |e: io::Error| SolvError::Io(e.to_string());
    let n = profile.l_spectrum.first().map_or(0, |v| v.len());
    let mut header = String::from("s,c,h,f_prime");
    if profile.phi.is_some() {
        header.push_str(",phi");
    }
    for k in 0..n {
        header.push_str(&format!(",l_{k}"));
    }
    writeln!(w, "{header}").map_err(io_err)?;
    for i in 0..profile.s_grid.len() {
        write!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            profile.s_grid[i], profile.c[i], profile.h[i], profile.f_prime[i]
        )
        .map_err(io_err)?;
        if let Some(phi) = &profile.phi {
            write!(w, ",{:.16e}", phi[i]).map_err(io_err)?;
        }
        for v in &profile.l_spectrum[i] {
            write!(w, ",{v:.16e}").map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    Ok(())
}

/// Gnuplot-ready compensated-quantity table for a rate report: anchored
/// time, the four s-compensated quantities, and the tau-compensated ones.
pub fn write_compensated_table<W: Write>(
    mut w: W,
    traj: &Trajectory<4>,
    params: &SolvsolitonParams,
    anchor_offset: f64,
    points: usize,
) -> Result<()> {
    let io_err = |e: io::Error| SolvError::Io(e.to_string());
    let tau = crate::asymptotics::tau_time(traj)?;
    writeln!(w, "# s_hat  w/(-lambda*s)  x*s  y*s^2  z*s^2  tau").map_err(io_err)?;
    let (s0, s1) = (traj.start_time(), traj.end_time());
    let lam = params.lambda;
    for k in 0..points {
        let s = s0 + (s1 - s0) * k as f64 / (points - 1) as f64;
        let sh = s - anchor_offset;
        if sh <= 0.0 {
            continue;
        }
        let p = traj.sample(s);
        // tau linearly interpolated between nodes is plenty for plotting
        let i = traj
            .times
            .partition_point(|&t| t <= s)
            .saturating_sub(1)
            .min(traj.len() - 2);
        let th = (s - traj.times[i]) / (traj.times[i + 1] - traj.times[i]);
        let tau_s = tau[i] * (1.0 - th) + tau[i + 1] * th;
        writeln!(
            w,
            "{sh:.9e} {:.9e} {:.9e} {:.9e} {:.9e} {tau_s:.9e}",
            p[3] / (-lam * sh),
            p[0] * sh,
            p[1] * sh * sh,
            p[2] * sh * sh,
        )
        .map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::preset;
    use crate::shoot::{self, ShotConfig};

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, -0.375, 1e-300, 6.02e23, -1.0 / 24.0] {
            let s = format!("{v:.16e}");
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn json_uses_sci_floats() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: Vec<f64>,
        }
        let s = to_json_pretty(&T { a: 0.375, b: vec![1.0, -0.125] }).unwrap();
        assert!(s.contains("3.7500000000000000e-1"), "{s}");
        assert!(s.contains("1.0000000000000000e0"), "{s}");
        assert!(s.contains("-1.2500000000000000e-1"), "{s}");
    }

    #[test]
    fn trajectory_csv_round_trip_is_byte_identical() {
        let (_, params) = preset("heisenberg3").unwrap();
        let shot = shoot::shoot_family(&params, 0.0, &ShotConfig::default()).unwrap();

        let mut buf1 = Vec::new();
        write_trajectory_csv(&mut buf1, &shot.trajectory, Some(&params), None).unwrap();
        let traj2 = read_trajectory_csv(io::BufReader::new(&buf1[..]), &params).unwrap();
        assert_eq!(traj2.len(), shot.trajectory.len());
        let mut buf2 = Vec::new();
        write_trajectory_csv(&mut buf2, &traj2, Some(&params), None).unwrap();
        assert_eq!(buf1, buf2);

        // derivs rebuilt from the field agree with the originals
        for (a, b) in shot.trajectory.derivs.iter().zip(&traj2.derivs) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn csv_rejects_bad_input() {
        let (_, params) = preset("heisenberg3").unwrap();
        let bad_header = "t,x,y,z,w\n0,1,1,-0.125,1\n";
        assert!(matches!(
            read_trajectory_csv(io::BufReader::new(bad_header.as_bytes()), &params),
            Err(SolvError::Parse(_))
        ));
        let non_monotone = "s,x,y,z,w\n0,1,1,-0.125,1\n0,1,1,-0.125,1\n";
        assert!(matches!(
            read_trajectory_csv(io::BufReader::new(non_monotone.as_bytes()), &params),
            Err(SolvError::Parse(_))
        ));
        let garbage = "s,x,y,z,w\n0,one,1,-0.125,1\n";
        assert!(matches!(
            read_trajectory_csv(io::BufReader::new(garbage.as_bytes()), &params),
            Err(SolvError::Parse(_))
        ));
    }
}
