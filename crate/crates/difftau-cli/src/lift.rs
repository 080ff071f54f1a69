//! Moves exact instances into the active field.

use difftau::ensembles::{EnsembleSpec, Weight};
use difftau::field::{lift_f64, Scalar, Q};
use difftau::painleve::{DPVIParams, DPVIState, DPVParams, DPVState};
use difftau::Result;

pub fn scalar<F: Scalar>(x: &Q) -> F {
    F::from_q(x)
}

fn all<F: Scalar, const K: usize>(xs: &[Q; K]) -> [F; K] {
    std::array::from_fn(|i| scalar(&xs[i]))
}

/// In float mode, the exact value of x rounded to a double; x itself otherwise.
pub fn rounded<F: Scalar>(x: &Q) -> Result<Q> {
    if F::exact() {
        Ok(x.clone())
    } else {
        lift_f64(x.to_f64())
    }
}

/// The same ensemble, with every weight given by its table of values.
pub fn ensemble<F: Scalar>(spec: &EnsembleSpec<Q>) -> Result<EnsembleSpec<F>> {
    let tables = |omega: &[Vec<Q>]| -> Vec<Weight<F>> {
        omega.iter().map(|w| Weight::Table(w.iter().map(scalar).collect())).collect()
    };
    EnsembleSpec::new(
        spec.phase().iter().map(scalar).collect(),
        tables(spec.omega1()),
        tables(spec.omega2()),
        spec.n().to_vec(),
        spec.m().to_vec(),
    )
}

pub fn dpv_state<F: Scalar>(st: &DPVState<Q>) -> DPVState<F> {
    let p = &st.params;
    DPVState {
        q: scalar(&st.q),
        p: scalar(&st.p),
        params: DPVParams { a: all(&p.a), b: all(&p.b), d: all(&p.d), rho: all(&p.rho) },
    }
}

pub fn dpvi_state<F: Scalar>(st: &DPVIState<Q>) -> DPVIState<F> {
    let p = &st.params;
    DPVIState {
        q: scalar(&st.q),
        r: scalar(&st.r),
        params: DPVIParams { a: all(&p.a), b: all(&p.b), d: all(&p.d) },
    }
}
