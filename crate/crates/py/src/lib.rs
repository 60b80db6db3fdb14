//! Python bindings.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cantoria::asymptotics;
use cantoria::cantorian;
use cantoria::diagonal::{self, PrefixList};
use cantoria::enumerate::{self, CountOptions, Method};
use cantoria::graph::HamiltonConfig;
use cantoria::permanent::{self, PermMethod};
use cantoria::{Alphabet, Word};

fn err(e: cantoria::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Square tableau over the letters `0..s`.
#[pyclass(name = "Tableau", module = "cantoria_py", frozen)]
struct PyTableau {
    inner: cantoria::Tableau,
}

#[pymethods]
impl PyTableau {
    /// Rows as strings (one symbol per character) or lists of ints. The
    /// alphabet size is inferred unless `s` is given.
    #[new]
    #[pyo3(signature = (rows, s=None))]
    fn new(rows: &Bound<'_, PyAny>, s: Option<usize>) -> PyResult<Self> {
        let inner = if let Ok(lines) = rows.extract::<Vec<String>>() {
            let text = lines.join("\n");
            match s {
                Some(s) => cantoria::Tableau::parse(&text, Alphabet::new(s).map_err(err)?),
                None => cantoria::Tableau::parse_infer(&text),
            }
        } else {
            let cells: Vec<Vec<u8>> = rows.extract()?;
            let s = s.unwrap_or_else(|| cells.iter().flatten().max().map_or(2, |&m| (m as usize + 1).max(2)));
            cantoria::Tableau::from_rows(Alphabet::new(s).map_err(err)?, cells)
        }
        .map_err(err)?;
        Ok(PyTableau { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTableau {
            inner: cantoria::Tableau::from_json(text).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.alphabet().size()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<u8>> {
        self.inner.rows().map(<[u8]>::to_vec).collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn is_cantorian(&self) -> bool {
        cantorian::is_cantorian(&self.inner).is_cantorian
    }

    fn is_bi_cantorian(&self) -> bool {
        cantorian::is_bi_cantorian(&self.inner)
    }

    /// `(row, permutation)` showing a row is a permuted diagonal, or `None`.
    fn witness(&self) -> Option<(usize, Vec<usize>)> {
        cantorian::is_cantorian(&self.inner)
            .witness
            .map(|w| (w.row, w.permutation))
    }

    /// Sorted words of the set permanent (small `n` only).
    fn perm_set(&self) -> PyResult<Vec<String>> {
        let a = self.inner.alphabet();
        Ok(permanent::perm_set(&self.inner, PermMethod::Brute)
            .map_err(err)?
            .iter()
            .map(|w| w.to_text(a))
            .collect())
    }

    /// Permutation (column to row) reading `word` as a diagonal, or `None`.
    fn perm_contains(&self, word: &str) -> PyResult<Option<Vec<usize>>> {
        let w = Word::parse(word, self.inner.alphabet()).map_err(err)?;
        permanent::perm_contains(&self.inner, &w).map_err(err)
    }

    fn diag(&self) -> String {
        permanent::diag(&self.inner).to_text(self.inner.alphabet())
    }

    fn __repr__(&self) -> String {
        format!("Tableau({:?})", self.inner.to_text().lines().collect::<Vec<_>>())
    }
}

#[pyfunction]
#[pyo3(signature = (n, s, method="brute", jobs=1))]
fn count_cantorian(n: usize, s: usize, method: &str, jobs: usize) -> PyResult<BigUint> {
    let method: Method = method.parse().map_err(err)?;
    let options = CountOptions {
        jobs,
        ..CountOptions::default()
    };
    Ok(enumerate::count_cantorian(n, s, method, &options).map_err(err)?.count)
}

#[pyfunction]
fn count_by_occurrences(n: usize, p: usize) -> PyResult<BigUint> {
    Ok(enumerate::count_by_occurrences(n, p).map_err(err)?.count)
}

/// Rows are bit masks of width `n - 1`; the last must be all ones.
#[pyfunction]
fn last_column_count(n: usize, rows: Vec<u64>) -> PyResult<u64> {
    enumerate::last_column_count(n, &rows).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, s, trials, seed=0))]
fn estimate_cantorian_fraction<'py>(
    py: Python<'py>,
    n: usize,
    s: usize,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let e = asymptotics::estimate_cantorian_fraction(n, s, trials, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", e.n)?;
    d.set_item("s", e.s)?;
    d.set_item("trials", e.trials)?;
    d.set_item("hits", e.hits)?;
    d.set_item("fraction", e.fraction)?;
    d.set_item("ci", e.wilson_interval_95)?;
    d.set_item("seed", e.seed)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n, s, trials, seed=0))]
fn hamiltonian_witness_fraction<'py>(
    py: Python<'py>,
    n: usize,
    s: usize,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let h = asymptotics::hamiltonian_witness_fraction(n, s, trials, seed, &HamiltonConfig::default()).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("fraction", h.estimate.fraction)?;
    d.set_item("hits", h.estimate.hits)?;
    d.set_item("ci", h.estimate.wilson_interval_95)?;
    d.set_item("undecided", h.undecided)?;
    d.set_item("violations", h.violations)?;
    Ok(d)
}

fn prefix_list(rows: &[String], s: usize, depth: usize) -> PyResult<PrefixList> {
    let a = Alphabet::new(s).map_err(err)?;
    let mut list = PrefixList::new(a, depth).map_err(err)?;
    for r in rows {
        list.push(Word::parse(r, a).map_err(err)?.symbols()).map_err(err)?;
    }
    Ok(list)
}

/// `(permutation, completed)` for the greedy diagonal of `target`.
#[pyfunction]
#[pyo3(signature = (rows, target, s=2))]
fn greedy_diagonal(rows: Vec<String>, target: &str, s: usize) -> PyResult<(Vec<usize>, bool)> {
    let list = prefix_list(&rows, s, target.chars().count())?;
    let target = Word::parse(target, list.alphabet()).map_err(err)?;
    let run = diagonal::greedy_diagonal_permutation(&list, &target).map_err(err)?;
    Ok((run.permutation.as_slice().to_vec(), run.completed))
}

/// `(permutation, diagonal, exhausted)` for the avoid-list construction.
#[pyfunction]
#[pyo3(signature = (rows, avoid, s=2))]
fn avoid_list(rows: Vec<String>, avoid: Vec<String>, s: usize) -> PyResult<(Vec<usize>, String, bool)> {
    let depth = rows.first().map_or(0, |r| r.chars().count());
    let list = prefix_list(&rows, s, depth)?;
    let avoid = prefix_list(&avoid, s, depth)?;
    let run = diagonal::avoid_list_permutation(&list, &avoid).map_err(err)?;
    Ok((
        run.permutation.as_slice().to_vec(),
        run.diagonal.to_text(list.alphabet()),
        run.exhausted,
    ))
}

#[pymodule]
fn cantoria_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA", cantoria::SCHEMA)?;
    m.add_class::<PyTableau>()?;
    m.add_function(wrap_pyfunction!(count_cantorian, m)?)?;
    m.add_function(wrap_pyfunction!(count_by_occurrences, m)?)?;
    m.add_function(wrap_pyfunction!(last_column_count, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_cantorian_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_witness_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(avoid_list, m)?)?;
    Ok(())
}
