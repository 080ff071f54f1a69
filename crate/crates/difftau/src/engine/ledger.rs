use std::collections::BTreeMap;

use super::connection::DConnection;
use super::shift::{shift_coalesced, shift_simple_zero_pair, shift_zero_pole_pair, Shift};
use crate::error::{Error, Result};
use crate::field::Scalar;

/// Ordering convention used to decompose multi-frame shift vectors.
pub const LEXICOGRAPHIC: &str = "lexicographic: generators applied in increasing frame index";

/// One executed move.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerStep<F> {
    pub from: Vec<i64>,
    pub to: Vec<i64>,
    pub ratio: F,
}

/// τ values at visited lattice positions, normalized by τ(start) = 1.
///
/// Positions are integer offsets of every frame from its initial location.
/// Reaching a position twice with values differing by a sign is recorded in
/// `sign_flips`; any other disagreement is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct TauLedger<F> {
    values: BTreeMap<Vec<i64>, F>,
    steps: Vec<LedgerStep<F>>,
    sign_flips: Vec<Vec<i64>>,
    pub convention: &'static str,
}

fn add(u: &[i64], s: &[i64]) -> Vec<i64> {
    u.iter().zip(s).map(|(a, b)| a + b).collect()
}

impl<F: Scalar> TauLedger<F> {
    pub fn new(frames: usize) -> Self {
        let mut values = BTreeMap::new();
        values.insert(vec![0; frames], F::one());
        TauLedger {
            values,
            steps: Vec::new(),
            sign_flips: Vec::new(),
            convention: LEXICOGRAPHIC,
        }
    }

    pub fn dimension(&self) -> usize {
        self.values.keys().next().map_or(0, |k| k.len())
    }

    pub fn steps(&self) -> &[LedgerStep<F>] {
        &self.steps
    }

    pub fn sign_flips(&self) -> &[Vec<i64>] {
        &self.sign_flips
    }

    fn insert(&mut self, pos: Vec<i64>, value: F) -> Result<()> {
        match self.values.get(&pos) {
            None => {
                self.values.insert(pos, value);
                Ok(())
            }
            Some(old) if old.close(&value, 1e-9) => Ok(()),
            Some(old) if old.close(&-value.clone(), 1e-9) => {
                self.sign_flips.push(pos);
                Ok(())
            }
            Some(old) => Err(Error::InternalMismatch(format!(
                "τ at {pos:?} reached with {value} and {old}"
            ))),
        }
    }

    /// Appends a move from `from` by `delta` with first ratio τ(to)/τ(from).
    pub fn record(&mut self, from: &[i64], delta: &[i64], ratio: F) -> Result<()> {
        let base = self.tau(from)?;
        let to = add(from, delta);
        self.insert(to.clone(), base * ratio.clone())?;
        self.steps.push(LedgerStep {
            from: from.to_vec(),
            to,
            ratio,
        });
        Ok(())
    }

    /// Combines the values and steps of another ledger with the same start.
    pub fn merge(&mut self, other: &TauLedger<F>) -> Result<()> {
        for (pos, v) in &other.values {
            self.insert(pos.clone(), v.clone())?;
        }
        for s in &other.steps {
            if !self.steps.contains(s) {
                self.steps.push(s.clone());
            }
        }
        Ok(())
    }

    pub fn tau(&self, pos: &[i64]) -> Result<F> {
        self.values
            .get(pos)
            .cloned()
            .ok_or_else(|| Error::MissingPath(pos.to_vec()))
    }

    /// D_sτ(u) = τ(u+s)/τ(u).
    pub fn first_ratio(&self, u: &[i64], s: &[i64]) -> Result<F> {
        let den = self.tau(u)?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.tau(&add(u, s))? / den)
    }

    /// D_{s,t}τ(u) = D_sτ(u+t)/D_sτ(u).
    pub fn second_ratio_at(&self, u: &[i64], s: &[i64], t: &[i64]) -> Result<F> {
        let d0 = self.first_ratio(u, s)?;
        if d0.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.first_ratio(&add(u, t), s)? / d0)
    }
}

/// D_{s,t}τ at the start of the ledger.
pub fn tau_second_ratio<F: Scalar>(ledger: &TauLedger<F>, s: &[i64], t: &[i64]) -> Result<F> {
    let u = vec![0; ledger.dimension()];
    ledger.second_ratio_at(&u, s, t)
}

/// Splits a zero-frame shift vector (entries summing to zero) into
/// generators e_i − e_j, pairing raised and lowered frames in increasing order.
pub fn decompose_zero_shift(s: &[i64]) -> Result<Vec<(usize, usize)>> {
    if s.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidInput("zero shifts must preserve the degree".into()));
    }
    let expand = |sign: i64| -> Vec<usize> {
        s.iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, if k * sign > 0 { k.unsigned_abs() as usize } else { 0 }))
            .collect()
    };
    Ok(expand(1).into_iter().zip(expand(-1)).collect())
}

/// A connection travelling through the lattice with its τ ledger.
#[derive(Clone, Debug)]
pub struct Walk<F> {
    pub connection: DConnection<F>,
    pub position: Vec<i64>,
    pub ledger: TauLedger<F>,
}

impl<F: Scalar> Walk<F> {
    pub fn new(connection: DConnection<F>) -> Self {
        let n = connection.frames.len();
        Walk {
            connection,
            position: vec![0; n],
            ledger: TauLedger::new(n),
        }
    }

    fn advance(&mut self, shift: Shift<F>, moves: &[(usize, i64)]) -> Result<F> {
        let mut delta = vec![0; self.position.len()];
        for &(i, d) in moves {
            delta[i] += d;
        }
        self.ledger.record(&self.position, &delta, shift.ratio.clone())?;
        self.position = add(&self.position, &delta);
        self.connection = shift.connection;
        Ok(shift.ratio)
    }

    pub fn zero_pair(&mut self, i: usize, j: usize) -> Result<F> {
        let s = shift_simple_zero_pair(&self.connection, i, j)?;
        self.advance(s, &[(i, 1), (j, -1)])
    }

    pub fn zero_pole(&mut self, i: usize, k: usize, direction: i64) -> Result<F> {
        let s = shift_zero_pole_pair(&self.connection, i, k, direction)?;
        self.advance(s, &[(i, direction), (k, direction)])
    }

    pub fn coalesced(&mut self, i: usize, direction: i64) -> Result<F> {
        let s = shift_coalesced(&self.connection, i, direction)?;
        self.advance(s, &[(i, direction)])
    }

    /// Applies a zero-frame shift vector via [`decompose_zero_shift`]; returns τ(new)/τ(old).
    pub fn apply_zero_shift(&mut self, s: &[i64]) -> Result<F> {
        let mut total = F::one();
        for (i, j) in decompose_zero_shift(s)? {
            total = total * self.zero_pair(i, j)?;
        }
        Ok(total)
    }
}
