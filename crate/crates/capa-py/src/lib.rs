//! Python bindings for the aperture-array analysis library.
//!
//! Exposes the geometry/channel types and the gain, correlation, capacity,
//! and SIC-simulation operations. Build as an extension module and import
//! as `capa_py`; see `python/smoke_test.py`.

use capa_core::operator_lab::{discretize, run_sic_pipeline, Constellation, NoiseModel};
use capa_core::quadrature::two_user_channel;
use capa_core::verify::{run_all, VerifyConfig};
use capa_core::{
    asymptotic_sum_rate as core_asymptotic_sum_rate, capacity_region as core_capacity_region,
    channel_gain as core_channel_gain, closed_form_gain_planar as core_closed_form_gain_planar,
    correlation_rho as core_correlation_rho, gamma2_sic as core_gamma2_sic, lambda_star,
    rates_for_order, single_user_capacity as core_single_user_capacity,
    spd_gain_approx as core_spd_gain_approx, sum_rate_capacity as core_sum_rate_capacity,
    sum_rate_upper_bound, ApertureRegion, LinkBudget, QuadratureSpec, SicOrder, TwoUserChannel,
    UserSource, Wave,
};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: capa_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Carrier wavelength and derived constants.
#[pyclass(name = "Wave", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWave {
    inner: Wave,
}

#[pymethods]
impl PyWave {
    #[new]
    fn new(lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Wave::new(lambda).map_err(err)?,
        })
    }

    #[getter]
    fn lambda_m(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn wavenumber(&self) -> f64 {
        self.inner.wavenumber()
    }

    #[getter]
    fn impedance(&self) -> f64 {
        self.inner.impedance()
    }
}

/// Point transmitter at range `r` with azimuth `phi`, elevation `theta`.
#[pyclass(name = "UserSource", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyUserSource {
    inner: UserSource,
}

#[pymethods]
impl PyUserSource {
    #[new]
    #[pyo3(signature = (r, phi, theta, current_density_mag=None, tx_aperture_area=None))]
    fn new(
        r: f64,
        phi: f64,
        theta: f64,
        current_density_mag: Option<f64>,
        tx_aperture_area: Option<f64>,
    ) -> PyResult<Self> {
        let mut u = UserSource::new(r, phi, theta).map_err(err)?;
        if let Some(j) = current_density_mag {
            u = u.with_current_density_mag(j).map_err(err)?;
        }
        if let Some(a) = tx_aperture_area {
            u = u.with_tx_aperture_area(a).map_err(err)?;
        }
        Ok(Self { inner: u })
    }

    /// Cartesian center position [r*Phi, r*Psi, r*Theta].
    fn position(&self) -> [f64; 3] {
        self.inner.position()
    }

    /// Direction cosines [Phi, Psi, Theta].
    fn direction_cosines(&self) -> [f64; 3] {
        self.inner.direction_cosines()
    }
}

/// Receive surface: contiguous rectangle or element grid in the x-z plane.
#[pyclass(name = "ApertureRegion", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyApertureRegion {
    inner: ApertureRegion,
}

#[pymethods]
impl PyApertureRegion {
    /// Contiguous rectangle lx x lz.
    #[staticmethod]
    fn planar_rect(lx: f64, lz: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ApertureRegion::planar_rect(lx, lz).map_err(err)?,
        })
    }

    /// Element grid: odd mx x mz elements, lattice `spacing`, square
    /// elements of side `element_side`.
    #[staticmethod]
    fn spd_grid(mx: usize, mz: usize, spacing: f64, element_side: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ApertureRegion::spd_grid(mx, mz, spacing, element_side).map_err(err)?,
        })
    }

    fn element_centers(&self) -> PyResult<Vec<[f64; 3]>> {
        self.inner.element_centers().map_err(err)
    }

    fn occupation_ratio(&self) -> PyResult<f64> {
        self.inner.occupation_ratio().map_err(err)
    }

    fn bounding_box(&self) -> (f64, f64) {
        self.inner.bounding_box()
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn normal(&self) -> [f64; 3] {
        self.inner.normal()
    }
}

/// Panel-quadrature settings (points per axis, relative tolerance, refinements).
#[pyclass(name = "QuadratureSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuadratureSpec {
    inner: QuadratureSpec,
}

#[pymethods]
impl PyQuadratureSpec {
    #[new]
    #[pyo3(signature = (panel_order=16, rel_tol=1e-8, max_refinements=12))]
    fn new(panel_order: usize, rel_tol: f64, max_refinements: usize) -> Self {
        Self {
            inner: QuadratureSpec {
                panel_order,
                rel_tol,
                max_refinements,
            },
        }
    }
}

/// Dimensionless transmit SNR of one user.
#[pyclass(name = "LinkBudget", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLinkBudget {
    inner: LinkBudget,
}

#[pymethods]
impl PyLinkBudget {
    #[staticmethod]
    fn from_linear(gamma_bar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: LinkBudget::from_linear(gamma_bar).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_db(db: f64) -> PyResult<Self> {
        Ok(Self {
            inner: LinkBudget::from_db(db).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_physical(
        current_density_mag: f64,
        tx_aperture_area: f64,
        wave: &PyWave,
        sigma2: f64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: LinkBudget::from_physical(
                current_density_mag,
                tx_aperture_area,
                &wave.inner,
                sigma2,
            )
            .map_err(err)?,
        })
    }

    #[getter]
    fn gamma_bar(&self) -> f64 {
        self.inner.gamma_bar()
    }
}

/// Two-user channel statistics (a1, a2, complex rho).
#[pyclass(name = "TwoUserChannel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTwoUserChannel {
    inner: TwoUserChannel,
}

#[pymethods]
impl PyTwoUserChannel {
    #[new]
    fn new(a1: f64, a2: f64, rho: Complex64) -> PyResult<Self> {
        Ok(Self {
            inner: TwoUserChannel::new(a1, a2, rho).map_err(err)?,
        })
    }

    #[getter]
    fn a1(&self) -> f64 {
        self.inner.a1()
    }

    #[getter]
    fn a2(&self) -> f64 {
        self.inner.a2()
    }

    #[getter]
    fn rho(&self) -> Complex64 {
        self.inner.rho()
    }

    #[getter]
    fn rho_u_abs(&self) -> f64 {
        self.inner.rho_u_abs()
    }
}

/// Channel gain of a user over an aperture, by panel quadrature.
#[pyfunction]
#[pyo3(signature = (wave, region, user, spec=None))]
fn channel_gain(
    wave: &PyWave,
    region: &PyApertureRegion,
    user: &PyUserSource,
    spec: Option<&PyQuadratureSpec>,
) -> PyResult<f64> {
    let q = spec.map(|s| s.inner).unwrap_or_default();
    core_channel_gain(&wave.inner, &region.inner, &user.inner, &q).map_err(err)
}

/// Complex correlation of two users' spatial responses over an aperture.
#[pyfunction]
#[pyo3(signature = (wave, region, user1, user2, spec=None))]
fn correlation_rho(
    wave: &PyWave,
    region: &PyApertureRegion,
    user1: &PyUserSource,
    user2: &PyUserSource,
    spec: Option<&PyQuadratureSpec>,
) -> PyResult<Complex64> {
    let q = spec.map(|s| s.inner).unwrap_or_default();
    core_correlation_rho(&wave.inner, &region.inner, &user1.inner, &user2.inner, &q).map_err(err)
}

/// Gains and correlation of a two-user geometry in one call.
#[pyfunction]
#[pyo3(signature = (wave, region, user1, user2, spec=None))]
fn channel_statistics(
    wave: &PyWave,
    region: &PyApertureRegion,
    user1: &PyUserSource,
    user2: &PyUserSource,
    spec: Option<&PyQuadratureSpec>,
) -> PyResult<PyTwoUserChannel> {
    let q = spec.map(|s| s.inner).unwrap_or_default();
    Ok(PyTwoUserChannel {
        inner: two_user_channel(&wave.inner, &region.inner, &user1.inner, &user2.inner, &q)
            .map_err(err)?,
    })
}

/// Closed-form gain of a centered lx x lz rectangle.
#[pyfunction]
fn closed_form_gain_planar(lx: f64, lz: f64, user: &PyUserSource) -> PyResult<f64> {
    core_closed_form_gain_planar(lx, lz, &user.inner).map_err(err)
}

/// Occupation-ratio gain approximation mu_oc * a_c.
#[pyfunction]
fn spd_gain_approx(a_c: f64, mu_oc: f64) -> f64 {
    core_spd_gain_approx(a_c, mu_oc)
}

/// Single-user capacity log2(1 + gamma_bar * a_r) in bits/s/Hz.
#[pyfunction]
fn single_user_capacity(lb: &PyLinkBudget, a_r: f64) -> f64 {
    core_single_user_capacity(&lb.inner, a_r)
}

/// Both whitening-parameter roots (plus, minus).
#[pyfunction]
fn lambda_star_roots(gamma_bar_1: f64, a1: f64) -> PyResult<(f64, f64)> {
    let roots = lambda_star(gamma_bar_1, a1).map_err(err)?;
    Ok((roots.plus, roots.minus))
}

/// Whitened-combining decode SNR for the interfered user.
#[pyfunction]
fn gamma2_sic(lb2: &PyLinkBudget, ch: &PyTwoUserChannel, lam: f64) -> f64 {
    core_gamma2_sic(&lb2.inner, &ch.inner, lam)
}

/// Rate pair (r1, r2) under the given decode order ("2->1" or "1->2").
#[pyfunction]
fn rates(
    lb1: &PyLinkBudget,
    lb2: &PyLinkBudget,
    ch: &PyTwoUserChannel,
    order: &str,
) -> PyResult<(f64, f64)> {
    let order = match order {
        "2->1" => SicOrder::User2First,
        "1->2" => SicOrder::User1First,
        other => {
            return Err(PyValueError::new_err(format!(
                "order must be '2->1' or '1->2', got {other:?}"
            )))
        }
    };
    let rp = rates_for_order(&lb1.inner, &lb2.inner, &ch.inner, order);
    Ok((rp.r1, rp.r2))
}

/// Order-independent sum-rate capacity.
#[pyfunction]
fn sum_rate_capacity(lb1: &PyLinkBudget, lb2: &PyLinkBudget, ch: &PyTwoUserChannel) -> f64 {
    core_sum_rate_capacity(&lb1.inner, &lb2.inner, &ch.inner)
}

/// Decoupled sum-rate upper bound.
#[pyfunction]
fn sum_rate_capacity_upper_bound(
    lb1: &PyLinkBudget,
    lb2: &PyLinkBudget,
    ch: &PyTwoUserChannel,
) -> f64 {
    sum_rate_upper_bound(&lb1.inner, &lb2.inner, &ch.inner)
}

/// Infinite-aperture sum rate at occupation ratio mu_oc.
#[pyfunction]
fn asymptotic_sum_rate(gamma1: f64, gamma2: f64, mu_oc: f64) -> f64 {
    core_asymptotic_sum_rate(gamma1, gamma2, mu_oc)
}

/// Capacity region: corners, time-sharing segment, single-user box,
/// pentagon cut length.
#[pyfunction]
#[pyo3(signature = (lb1, lb2, ch, segment_points=11))]
fn capacity_region<'py>(
    py: Python<'py>,
    lb1: &PyLinkBudget,
    lb2: &PyLinkBudget,
    ch: &PyTwoUserChannel,
    segment_points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cr = core_capacity_region(&lb1.inner, &lb2.inner, &ch.inner, segment_points);
    let d = PyDict::new(py);
    d.set_item("corner_21", (cr.corner_21.r1, cr.corner_21.r2))?;
    d.set_item("corner_12", (cr.corner_12.r1, cr.corner_12.r2))?;
    d.set_item("segment", cr.segment.clone())?;
    d.set_item("single_user_box", cr.single_user_box)?;
    d.set_item("cut_length", cr.cut_length())?;
    d.set_item("sum_rate", cr.sum_rate())?;
    Ok(d)
}

/// Monte Carlo SIC decode over a discretized aperture: returns SERs and
/// empirical vs predicted per-branch SNRs.
#[pyfunction]
#[pyo3(signature = (wave, region, user1, user2, lb1, lb2, sigma2, seed, n_trials, n_per_axis=16))]
#[allow(clippy::too_many_arguments)]
fn sic_pipeline<'py>(
    py: Python<'py>,
    wave: &PyWave,
    region: &PyApertureRegion,
    user1: &PyUserSource,
    user2: &PyUserSource,
    lb1: &PyLinkBudget,
    lb2: &PyLinkBudget,
    sigma2: f64,
    seed: u64,
    n_trials: usize,
    n_per_axis: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let d = discretize(&region.inner, n_per_axis).map_err(err)?;
    let nm = NoiseModel::new(sigma2, seed).map_err(err)?;
    let stats = run_sic_pipeline(
        &wave.inner,
        &d,
        [&user1.inner, &user2.inner],
        [&lb1.inner, &lb2.inner],
        &nm,
        &Constellation::qpsk(),
        n_trials,
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("trials", stats.trials)?;
    out.set_item("ser_user1", stats.ser_user1)?;
    out.set_item("ser_user2", stats.ser_user2)?;
    out.set_item("snr1_empirical", stats.snr1_empirical)?;
    out.set_item("snr2_empirical", stats.snr2_empirical)?;
    out.set_item("gamma1_predicted", stats.gamma1_predicted)?;
    out.set_item("gamma2_predicted", stats.gamma2_predicted)?;
    Ok(out)
}

/// Run the numerical verification suites; returns (all_passed, lines).
#[pyfunction]
#[pyo3(signature = (grid=64, trials=10_000, seed=1))]
fn run_verification(grid: usize, trials: usize, seed: u64) -> PyResult<(bool, Vec<String>)> {
    let report = run_all(&VerifyConfig {
        grid,
        trials,
        seed,
        lambda_scale: 1.0,
    })
    .map_err(err)?;
    let lines = report
        .suites
        .iter()
        .map(|s| {
            format!(
                "{} {}: {}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.details.join("; ")
            )
        })
        .collect();
    Ok((report.all_passed(), lines))
}

#[pymodule]
fn capa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWave>()?;
    m.add_class::<PyUserSource>()?;
    m.add_class::<PyApertureRegion>()?;
    m.add_class::<PyQuadratureSpec>()?;
    m.add_class::<PyLinkBudget>()?;
    m.add_class::<PyTwoUserChannel>()?;
    m.add_function(wrap_pyfunction!(channel_gain, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_rho, m)?)?;
    m.add_function(wrap_pyfunction!(channel_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_gain_planar, m)?)?;
    m.add_function(wrap_pyfunction!(spd_gain_approx, m)?)?;
    m.add_function(wrap_pyfunction!(single_user_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star_roots, m)?)?;
    m.add_function(wrap_pyfunction!(gamma2_sic, m)?)?;
    m.add_function(wrap_pyfunction!(rates, m)?)?;
    m.add_function(wrap_pyfunction!(sum_rate_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(sum_rate_capacity_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_region, m)?)?;
    m.add_function(wrap_pyfunction!(sic_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
