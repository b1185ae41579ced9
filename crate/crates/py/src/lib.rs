use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::wdcalc::deligne::{cv_map, dsum, dual_class, tensor_ss, DeligneClass};
use ::wdcalc::dsl::{dump_context, parse_class, parse_fusion_file, parse_matrix_dump, parse_rep};
use ::wdcalc::factors::{epsilon_factor, gamma_factor, l_factor};
use ::wdcalc::gln::{c_map, check_preservation, v_map};
use ::wdcalc::matrixmodel::{decompose, oracle_tensor_ss, realize, validate};
use ::wdcalc::weil::FusionTable;
use ::wdcalc::{make_ctx, FieldCtx};

fn py_err(e: ::wdcalc::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {}", e.code(), e))
}

/// A coefficient field together with optional fusion data.
#[pyclass(name = "Context", frozen)]
struct PyContext {
    ctx: FieldCtx,
    table: FusionTable,
}

impl PyContext {
    fn class(&self, src: &str) -> PyResult<DeligneClass> {
        parse_class(&self.ctx, src, &self.table).map_err(py_err)
    }

    fn show(&self, c: &DeligneClass) -> String {
        c.render(&self.ctx)
    }
}

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (ell, q, field_deg = 1, fusion = None))]
    fn new(ell: u64, q: u64, field_deg: u32, fusion: Option<&str>) -> PyResult<Self> {
        let ctx = make_ctx(ell, q, field_deg).map_err(py_err)?;
        let table = match fusion {
            Some(src) => parse_fusion_file(&ctx, src).map_err(py_err)?,
            None => FusionTable::new(),
        };
        Ok(PyContext { ctx, table })
    }

    #[getter]
    fn header(&self) -> String {
        self.ctx.header()
    }

    #[getter]
    fn o_nu(&self) -> u32 {
        self.ctx.o_nu()
    }

    fn normalize(&self, class: &str) -> PyResult<String> {
        Ok(self.show(&self.class(class)?))
    }

    fn dsum(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.show(&dsum(&self.class(a)?, &self.class(b)?)))
    }

    fn dual(&self, class: &str) -> PyResult<String> {
        Ok(self.show(&dual_class(&self.ctx, &self.class(class)?)))
    }

    fn tensor(&self, a: &str, b: &str) -> PyResult<String> {
        let t = tensor_ss(&self.ctx, &self.class(a)?, &self.class(b)?, &self.table).map_err(py_err)?;
        Ok(self.show(&t))
    }

    fn oracle_tensor(&self, a: &str, b: &str) -> PyResult<String> {
        let t = oracle_tensor_ss(&self.ctx, &self.class(a)?, &self.class(b)?).map_err(py_err)?;
        Ok(self.show(&t))
    }

    fn cv(&self, class: &str) -> PyResult<String> {
        Ok(self.show(&cv_map(&self.class(class)?).map_err(py_err)?))
    }

    /// Printed `L`, `GAMMA` and `EPSILON` of a class.
    fn factors(&self, class: &str) -> PyResult<BTreeMap<&'static str, String>> {
        let ctx = &self.ctx;
        let c = self.class(class)?;
        Ok(BTreeMap::from([
            ("L", l_factor(ctx, &c).render(ctx)),
            ("GAMMA", gamma_factor(ctx, &c).render(ctx)),
            ("EPSILON", epsilon_factor(ctx, &c).map_err(py_err)?.render(ctx)),
        ]))
    }

    fn realize(&self, class: &str) -> PyResult<String> {
        Ok(realize(&self.ctx, &self.class(class)?).map_err(py_err)?.render())
    }

    fn decompose(&self, dump: &str) -> PyResult<String> {
        let m = parse_matrix_dump(&self.ctx, dump).map_err(py_err)?;
        validate(&m).map_err(py_err)?;
        Ok(self.show(&decompose(&m).map_err(py_err)?))
    }

    /// Printed `V` and `C` parameters of a generic representation.
    fn correspond(&self, rep: &str) -> PyResult<BTreeMap<&'static str, String>> {
        let pi = parse_rep(&self.ctx, rep, &self.table).map_err(py_err)?;
        Ok(BTreeMap::from([
            ("REP", pi.render(&self.ctx)),
            ("V", self.show(&v_map(&self.ctx, &pi))),
            ("C", self.show(&c_map(&self.ctx, &pi))),
        ]))
    }

    /// Whether `L`, `gamma` and `epsilon` agree on both sides for a pair.
    fn preserves(&self, rep: &str, rep2: &str) -> PyResult<BTreeMap<&'static str, bool>> {
        let pi = parse_rep(&self.ctx, rep, &self.table).map_err(py_err)?;
        let pi2 = parse_rep(&self.ctx, rep2, &self.table).map_err(py_err)?;
        let r = check_preservation(&self.ctx, &pi, &pi2).map_err(py_err)?;
        Ok(BTreeMap::from([
            ("L", r.l_holds()),
            ("GAMMA", r.gamma_holds()),
            ("EPSILON", r.eps_holds()),
        ]))
    }
}

/// Class of a matrix dump, using the context named in its header.
#[pyfunction]
fn decompose_dump(dump: &str) -> PyResult<String> {
    let ctx = dump_context(dump).map_err(py_err)?;
    let m = parse_matrix_dump(&ctx, dump).map_err(py_err)?;
    validate(&m).map_err(py_err)?;
    Ok(decompose(&m).map_err(py_err)?.render(&ctx))
}

#[pymodule]
#[pyo3(name = "wdcalc")]
fn wdcalc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContext>()?;
    m.add_function(wrap_pyfunction!(decompose_dump, m)?)?;
    Ok(())
}
