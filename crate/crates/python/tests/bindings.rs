use pyo3::ffi::c_str;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(complement_opt_py::complement_opt_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("co", m).unwrap();
        if let Err(e) = py.run(code, None, Some(&locals)) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn config_and_evolution() {
    with_module(c_str!(
        r#"
import math
cfg = co.CouplingConfig.strong()
assert abs(cfg.a - math.cos(0.4 * math.pi)) < 1e-14
assert abs(cfg.b.imag + math.sin(0.4 * math.pi)) < 1e-14
amps = co.evolve(cfg, 5)
assert len(amps) == 7
assert abs(sum(abs(x) ** 2 for x in amps) - 1) < 1e-12
"#
    ));
}

#[test]
fn optimization_result_fields() {
    with_module(c_str!(
        r#"
r = co.maximize(co.CouplingConfig.weak(), 2, "v", restarts=3)
assert r.objective == "visibility" and r.n == 2 and len(r.angles) == 2
assert abs(r.visibility ** 2 + r.predictability ** 2 + r.concurrence ** 2 - 1) < 1e-10
assert "OptimizationResult" in repr(r)
"#
    ));
}

#[test]
fn errors_become_value_errors() {
    with_module(c_str!(
        r#"
try:
    co.CouplingConfig(1.0, -1.0, 3)
    raise AssertionError("accepted negative time")
except ValueError as e:
    assert "time" in str(e)
try:
    co.gamma_coefficients(co.CouplingConfig.strong(), [(0.5, 0.0)] * 21)
    raise AssertionError("accepted 21 ancillas")
except ValueError:
    pass
"#
    ));
}
