use pyo3::prelude::*;

#[pymodule]
fn nomta_py(_m: &Bound<'_, PyModule>) -> PyResult<()> { Ok(()) }
