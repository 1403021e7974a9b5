//! The experiment commands: gain cross-checks, aperture and occupancy
//! sweeps, capacity regions, and the verification suites.

use crate::config::{ApertureKind, ExperimentConfig};
use crate::error::CmdError;
use crate::rows::{fmt_sig, paired_rows_to_csv, rows_to_csv, ResultRow};
use capa_core::quadrature::two_user_channel;
use capa_core::verify;
use capa_core::{
    capacity_region, channel_gain, closed_form_gain_planar, spd_gain_approx, sum_rate_capacity,
    ApertureRegion, UserSource, Wave,
};

/// Nearest odd element count for a target bounding-box side (at least 1).
fn odd_count_for(side: f64, spacing: f64) -> usize {
    let m = (side / spacing).round().max(1.0) as usize;
    if m % 2 == 1 {
        m
    } else if (m as f64 - side / spacing) > 0.0 {
        m - 1
    } else {
        m + 1
    }
}

struct SweepGeometry {
    /// The value reported in the sweep column (element grids snap the
    /// requested size to an odd-count bounding box).
    value: f64,
    capa: ApertureRegion,
    spd: Option<ApertureRegion>,
}

fn sweep_geometry(cfg: &ExperimentConfig, l: f64) -> Result<SweepGeometry, CmdError> {
    match cfg.aperture.kind {
        ApertureKind::Planar => Ok(SweepGeometry {
            value: l,
            capa: ApertureRegion::planar_rect(l, l).map_err(CmdError::usage)?,
            spd: None,
        }),
        ApertureKind::Spd => {
            let d = cfg
                .aperture
                .spacing
                .ok_or_else(|| CmdError::usage("missing required field aperture.spacing"))?;
            let side = cfg.aperture.element_side.unwrap_or(d);
            let m = odd_count_for(l, d);
            let snapped = m as f64 * d;
            Ok(SweepGeometry {
                value: snapped,
                capa: ApertureRegion::planar_rect(snapped, snapped).map_err(CmdError::usage)?,
                spd: Some(ApertureRegion::spd_grid(m, m, d, side).map_err(CmdError::usage)?),
            })
        }
    }
}

/// Quadrature-vs-closed-form gain table, one row per geometry and user.
pub fn cmd_gain(cfg: &ExperimentConfig) -> Result<String, CmdError> {
    let wave = cfg.wave()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CmdError::usage("gain requires a [sweep] section of aperture sizes"))?
        .resolve()?;
    let users: Vec<UserSource> = cfg
        .users
        .iter()
        .map(|u| u.source())
        .collect::<Result<_, _>>()?;

    let mut out = String::from("geometry,user,kind,L,quad_gain,closed_form_gain,rel_gap\n");
    for (gi, &l) in sweep.iter().enumerate() {
        let geom = sweep_geometry(cfg, l)?;
        let (region, kind_name) = match &geom.spd {
            Some(spd) => (spd, "spd"),
            None => (&geom.capa, "planar"),
        };
        for (ui, user) in users.iter().enumerate() {
            let quad = channel_gain(&wave, region, user, &cfg.quadrature)
                .map_err(CmdError::from_core)?;
            let closed = match kind_name {
                "planar" => {
                    closed_form_gain_planar(geom.value, geom.value, user).map_err(CmdError::usage)?
                }
                _ => {
                    let mu = region.occupation_ratio().map_err(CmdError::usage)?;
                    let a_c = closed_form_gain_planar(geom.value, geom.value, user)
                        .map_err(CmdError::usage)?;
                    spd_gain_approx(a_c, mu)
                }
            };
            let gap = if closed != 0.0 {
                (quad - closed) / closed
            } else {
                quad
            };
            out.push_str(&format!(
                "{gi},{u},{kind_name},{l},{q},{c},{g}\n",
                u = ui + 1,
                l = fmt_sig(geom.value),
                q = fmt_sig(quad),
                c = fmt_sig(closed),
                g = fmt_sig(gap),
            ));
        }
    }
    Ok(out)
}

fn row_for_region(
    cfg: &ExperimentConfig,
    wave: &Wave,
    region: &ApertureRegion,
    sweep_value: f64,
) -> Result<ResultRow, CmdError> {
    let (u1, u2) = cfg.two_users()?;
    let ch = two_user_channel(wave, region, &u1.source()?, &u2.source()?, &cfg.quadrature)
        .map_err(CmdError::from_core)?;
    Ok(ResultRow::evaluate(sweep_value, &u1.budget()?, &u2.budget()?, &ch))
}

/// Rates and capacity over a square-aperture size sweep; element-grid
/// configurations add a second column block for the grid variant.
pub fn cmd_sweep_aperture(cfg: &ExperimentConfig) -> Result<String, CmdError> {
    let wave = cfg.wave()?;
    cfg.two_users()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CmdError::usage("sweep-aperture requires a [sweep] section"))?
        .resolve()?;

    let mut capa_rows = Vec::with_capacity(sweep.len());
    let mut spd_rows = Vec::with_capacity(sweep.len());
    let mut has_spd = false;
    for &l in &sweep {
        let geom = sweep_geometry(cfg, l)?;
        capa_rows.push(row_for_region(cfg, &wave, &geom.capa, geom.value)?);
        if let Some(spd) = &geom.spd {
            has_spd = true;
            spd_rows.push(row_for_region(cfg, &wave, spd, geom.value)?);
        }
    }
    if has_spd {
        paired_rows_to_csv("L", &capa_rows, "spd_", &spd_rows)
    } else {
        rows_to_csv("L", &capa_rows, None)
    }
}

/// Rates and capacity of an element grid swept over its occupation ratio,
/// with the contiguous-aperture capacity of the same bounding box as a
/// reference column.
pub fn cmd_sweep_occupancy(cfg: &ExperimentConfig) -> Result<String, CmdError> {
    let wave = cfg.wave()?;
    let (u1c, u2c) = cfg.two_users()?;
    if cfg.aperture.kind != ApertureKind::Spd {
        return Err(CmdError::usage(
            "sweep-occupancy requires aperture.kind = spd",
        ));
    }
    let mx = cfg
        .aperture
        .mx
        .ok_or_else(|| CmdError::usage("missing required field aperture.mx"))?;
    let mz = cfg
        .aperture
        .mz
        .ok_or_else(|| CmdError::usage("missing required field aperture.mz"))?;
    let d = cfg
        .aperture
        .spacing
        .ok_or_else(|| CmdError::usage("missing required field aperture.spacing"))?;
    let grid = cfg
        .occupancy
        .as_ref()
        .ok_or_else(|| CmdError::usage("sweep-occupancy requires an [occupancy] section"))?
        .resolve()?;

    let (u1, u2) = (u1c.source()?, u2c.source()?);
    let (lb1, lb2) = (u1c.budget()?, u2c.budget()?);

    // contiguous reference over the bounding box
    let bounding =
        ApertureRegion::planar_rect(mx as f64 * d, mz as f64 * d).map_err(CmdError::usage)?;
    let capa_ch = two_user_channel(&wave, &bounding, &u1, &u2, &cfg.quadrature)
        .map_err(CmdError::from_core)?;
    let capa_c = sum_rate_capacity(&lb1, &lb2, &capa_ch);

    let mut rows = Vec::with_capacity(grid.len());
    for &mu in &grid {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(CmdError::usage(format!(
                "occupation ratio {mu} implies element_side > spacing"
            )));
        }
        let side = d * mu.sqrt();
        let region = ApertureRegion::spd_grid(mx, mz, d, side).map_err(CmdError::usage)?;
        let ch = two_user_channel(&wave, &region, &u1, &u2, &cfg.quadrature)
            .map_err(CmdError::from_core)?;
        rows.push(ResultRow::evaluate(mu, &lb1, &lb2, &ch));
    }
    let capa_col = vec![capa_c; rows.len()];
    rows_to_csv("mu_oc", &rows, Some(("capa_C", &capa_col)))
}

/// Capacity-region boundary of the configured aperture: the single-user
/// box, the two decode-order corners, and the time-sharing segment.
pub fn cmd_region(cfg: &ExperimentConfig) -> Result<String, CmdError> {
    let wave = cfg.wave()?;
    let (u1c, u2c) = cfg.two_users()?;
    let region = cfg.aperture.region()?;
    let ch = two_user_channel(
        &wave,
        &region,
        &u1c.source()?,
        &u2c.source()?,
        &cfg.quadrature,
    )
    .map_err(CmdError::from_core)?;
    let cr = capacity_region(&u1c.budget()?, &u2c.budget()?, &ch, cfg.segment_points);

    let mut out = String::from("kind,R1,R2\n");
    out.push_str(&format!(
        "box,{},{}\n",
        fmt_sig(cr.single_user_box.0),
        fmt_sig(cr.single_user_box.1)
    ));
    out.push_str(&format!(
        "corner_21,{},{}\n",
        fmt_sig(cr.corner_21.r1),
        fmt_sig(cr.corner_21.r2)
    ));
    out.push_str(&format!(
        "corner_12,{},{}\n",
        fmt_sig(cr.corner_12.r1),
        fmt_sig(cr.corner_12.r2)
    ));
    for (i, (r1, r2)) in cr.segment.iter().enumerate() {
        out.push_str(&format!("segment_{i},{},{}\n", fmt_sig(*r1), fmt_sig(*r2)));
    }
    Ok(out)
}

/// Outcome of the verification suites.
pub struct VerifyOutcome {
    pub report: String,
    pub passed: bool,
}

/// Run every verification suite and format one PASS/FAIL line per suite.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<VerifyOutcome, CmdError> {
    let report = verify::run_all(&cfg.oracle).map_err(CmdError::from_core)?;
    let mut out = String::new();
    for suite in &report.suites {
        let tag = if suite.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag} {}: {}\n", suite.name, suite.details.join("; ")));
    }
    let passed = report.all_passed();
    out.push_str(if passed {
        "all suites passed\n"
    } else {
        "one or more suites failed\n"
    });
    Ok(VerifyOutcome {
        report: out,
        passed,
    })
}
