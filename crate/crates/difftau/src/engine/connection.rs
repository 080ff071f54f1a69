use super::frame::{SingularityFrame, SingularityKind};
use crate::error::{Error, Result};
use crate::field::{RatMat, Scalar};

/// First-order formal type at infinity: A ~ diag(leading)·(I + diag(exponents)/z).
#[derive(Clone, Debug, PartialEq)]
pub struct InfinityType<F> {
    pub leading: Vec<F>,
    pub exponents: Vec<F>,
}

/// A rational d-connection A(z) together with its movable singularities.
#[derive(Clone, Debug, PartialEq)]
pub struct DConnection<F> {
    pub matrix: RatMat<F>,
    pub frames: Vec<SingularityFrame<F>>,
    pub infinity: Option<InfinityType<F>>,
}

impl<F: Scalar> DConnection<F> {
    pub fn new(matrix: RatMat<F>, frames: Vec<SingularityFrame<F>>) -> Self {
        DConnection {
            matrix,
            frames,
            infinity: None,
        }
    }

    /// Builds frames of the given kinds at the given points from the matrix alone.
    pub fn detect(matrix: RatMat<F>, singularities: &[(F, SingularityKind)]) -> Result<Self> {
        let inv = matrix.mat_inverse()?;
        let frames = singularities
            .iter()
            .map(|(loc, kind)| match kind {
                SingularityKind::SimpleZero => SingularityFrame::zero(&matrix, &inv, loc.clone()),
                SingularityKind::SimplePole => SingularityFrame::pole(&matrix, loc.clone()),
                SingularityKind::CoalescedRankOne => SingularityFrame::coalesced(&inv, loc.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(matrix, frames))
    }

    pub fn with_infinity(mut self, infinity: InfinityType<F>) -> Self {
        self.infinity = Some(infinity);
        self
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn frame(&self, i: usize) -> Result<&SingularityFrame<F>> {
        self.frames
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no frame with index {i}")))
    }

    pub(crate) fn expect_kind(&self, i: usize, kind: SingularityKind) -> Result<&SingularityFrame<F>> {
        let f = self.frame(i)?;
        if f.kind != kind {
            return Err(Error::FrameKindMismatch {
                frame: i,
                found: f.kind.to_string(),
                expected: kind.to_string(),
            });
        }
        Ok(f)
    }

    /// Copy with frame `i` rescaled by `c` (see [`SingularityFrame::rescaled`]).
    pub fn rescale_frame(&self, i: usize, c: &F) -> Result<Self> {
        let mut out = self.clone();
        out.frames[i] = self.frame(i)?.rescaled(c);
        Ok(out)
    }
}
