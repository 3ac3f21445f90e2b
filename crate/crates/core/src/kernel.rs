//! Symmetric kernels `κ : [0,1]² → (0,1)` giving conditional edge
//! probabilities `κ(W_i, W_j)`.
//!
//! Four families are supported. All of them are symmetric by construction
//! and keep every stored probability strictly inside `(0, 1)`:
//!
//! * `constant`: Erdős–Rényi, `κ ≡ p`;
//! * `rank1`: `κ(x, y) = φ(x) φ(y)` with `φ` piecewise linear between knots;
//! * `block`: a stochastic block model on the intervals cut by `cuts`;
//! * `grid`: bilinear interpolation of a symmetric matrix sampled on the
//!   uniform grid `{0, 1/d, ..., 1}`.
//!
//! The JSON form is an object tagged by `"type"`, e.g.
//! `{"type": "block", "cuts": [0, 0.5, 1], "probs": [[0.5, 0.2], [0.2, 0.4]]}`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Slack used when deciding whether the kernel peaks off the diagonal.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("invalid kernel: {0}")]
    Invalid(String),
    #[error("argument ({x}, {y}) outside the unit square")]
    OutOfDomain { x: f64, y: f64 },
    #[error("half-width must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error(
        "kernel maximum {global} is attained off the diagonal (diagonal maximum {diagonal}); \
         the concentration result does not cover this kernel"
    )]
    OffDiagonalMaximum { diagonal: f64, global: f64 },
}

fn invalid(msg: impl Into<String>) -> KernelError {
    KernelError::Invalid(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "KernelRepr")]
pub enum Kernel {
    Constant { p: f64 },
    Rank1 { knots: Vec<(f64, f64)> },
    Block { cuts: Vec<f64>, probs: Vec<Vec<f64>> },
    Grid { values: Vec<Vec<f64>> },
}

// Deserialization target; validated before it becomes a `Kernel`.
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum KernelRepr {
    Constant { p: f64 },
    Rank1 { knots: Vec<(f64, f64)> },
    Block { cuts: Vec<f64>, probs: Vec<Vec<f64>> },
    Grid { values: Vec<Vec<f64>> },
}

impl TryFrom<KernelRepr> for Kernel {
    type Error = KernelError;

    fn try_from(r: KernelRepr) -> Result<Self, Self::Error> {
        let k = match r {
            KernelRepr::Constant { p } => Kernel::Constant { p },
            KernelRepr::Rank1 { knots } => Kernel::Rank1 { knots },
            KernelRepr::Block { cuts, probs } => Kernel::Block { cuts, probs },
            KernelRepr::Grid { values } => Kernel::Grid { values },
        };
        k.validate()?;
        Ok(k)
    }
}

/// Diagonal maximiser `(c, c)` of a kernel and the value `p_max = κ(c, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPoint {
    pub c: f64,
    pub p_max: f64,
}

fn check_prob(p: f64, what: &str) -> Result<(), KernelError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} = {p} is not strictly inside (0, 1)")))
    }
}

fn check_symmetric_matrix(m: &[Vec<f64>], size: usize, what: &str) -> Result<(), KernelError> {
    if m.len() != size || m.iter().any(|row| row.len() != size) {
        return Err(invalid(format!("{what} must be a {size}x{size} matrix")));
    }
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            check_prob(v, &format!("{what}[{i}][{j}]"))?;
            if v != m[j][i] {
                return Err(invalid(format!("{what} is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn check_partition(xs: impl Iterator<Item = f64>, what: &str) -> Result<(), KernelError> {
    let xs: Vec<f64> = xs.collect();
    if xs.len() < 2 || xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 {
        return Err(invalid(format!("{what} must start at 0 and end at 1")));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Index of the block containing `x`; a point on a cut belongs to the lower block.
fn block_of(cuts: &[f64], x: f64) -> usize {
    let k = cuts.len() - 1;
    cuts[1..].partition_point(|&t| t < x).min(k - 1)
}

fn grid_cell(d: usize, x: f64) -> usize {
    ((x * d as f64).floor() as usize).min(d - 1)
}

fn bilinear(values: &[Vec<f64>], x: f64, y: f64) -> f64 {
    let d = values.len() - 1;
    let (i, j) = (grid_cell(d, x), grid_cell(d, y));
    let s = x * d as f64 - i as f64;
    let t = y * d as f64 - j as f64;
    let v = |a: usize, b: usize| values[a][b];
    (1.0 - s) * (1.0 - t) * v(i, j)
        + s * (1.0 - t) * v(i + 1, j)
        + (1.0 - s) * t * v(i, j + 1)
        + s * t * v(i + 1, j + 1)
}

fn phi(knots: &[(f64, f64)], x: f64) -> f64 {
    let seg = knots[1..].partition_point(|&(kx, _)| kx < x).min(knots.len() - 2);
    let (x0, y0) = knots[seg];
    let (x1, y1) = knots[seg + 1];
    if x == x1 {
        return y1;
    }
    // Clamp so rounding never pushes φ past its knot values.
    (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).clamp(y0.min(y1), y0.max(y1))
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl Kernel {
    pub fn constant(p: f64) -> Result<Self, KernelError> {
        let k = Kernel::Constant { p };
        k.validate()?;
        Ok(k)
    }

    pub fn rank1(knots: Vec<(f64, f64)>) -> Result<Self, KernelError> {
        let k = Kernel::Rank1 { knots };
        k.validate()?;
        Ok(k)
    }

    pub fn block(cuts: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self, KernelError> {
        let k = Kernel::Block { cuts, probs };
        k.validate()?;
        Ok(k)
    }

    pub fn grid(values: Vec<Vec<f64>>) -> Result<Self, KernelError> {
        let k = Kernel::Grid { values };
        k.validate()?;
        Ok(k)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match self {
            Kernel::Constant { p } => check_prob(*p, "p"),
            Kernel::Rank1 { knots } => {
                check_partition(knots.iter().map(|k| k.0), "rank1 knot x-values")?;
                knots.iter().try_for_each(|&(_, y)| check_prob(y, "rank1 knot value"))
            }
            Kernel::Block { cuts, probs } => {
                check_partition(cuts.iter().copied(), "block cuts")?;
                check_symmetric_matrix(probs, cuts.len() - 1, "probs")
            }
            Kernel::Grid { values } => {
                if values.len() < 2 {
                    return Err(invalid("grid needs at least 2x2 values"));
                }
                check_symmetric_matrix(values, values.len(), "values")
            }
        }
    }

    /// Content hash of the canonical JSON form.
    pub fn kernel_id(&self) -> String {
        let json = serde_json::to_string(self).expect("kernel serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// `κ(x, y)`; both arguments must lie in `[0, 1]`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, KernelError> {
        if !in_unit(x) || !in_unit(y) {
            return Err(KernelError::OutOfDomain { x, y });
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            Kernel::Constant { p } => *p,
            Kernel::Rank1 { knots } => phi(knots, x) * phi(knots, y),
            Kernel::Block { cuts, probs } => probs[block_of(cuts, x)][block_of(cuts, y)],
            Kernel::Grid { values } => {
                // Average both argument orders so symmetry is exact in floating point.
                0.5 * (bilinear(values, x, y) + bilinear(values, y, x))
            }
        }
    }

    /// Diagonal maximiser; errors when the global maximum lies off the diagonal.
    pub fn max_point(&self) -> Result<MaxPoint, KernelError> {
        let mp = match self {
            Kernel::Constant { p } => MaxPoint { c: 0.5, p_max: *p },
            Kernel::Rank1 { knots } => {
                // φ is piecewise linear, so its maximum sits on a knot.
                let &(c, y) = knots.iter().fold(&knots[0], |best, k| if k.1 > best.1 { k } else { best });
                MaxPoint { c, p_max: y * y }
            }
            Kernel::Block { cuts, probs } => {
                let k = probs.len();
                let best = (0..k).fold(0, |b, i| if probs[i][i] > probs[b][b] { i } else { b });
                let global = probs.iter().flatten().copied().fold(f64::MIN, f64::max);
                let diagonal = probs[best][best];
                if global > diagonal + OFF_DIAGONAL_TOLERANCE {
                    return Err(KernelError::OffDiagonalMaximum { diagonal, global });
                }
                MaxPoint { c: 0.5 * (cuts[best] + cuts[best + 1]), p_max: diagonal }
            }
            Kernel::Grid { values } => {
                let d = values.len() - 1;
                let mut best = MaxPoint { c: 0.0, p_max: values[0][0] };
                for i in 0..d {
                    // Along the diagonal of cell i the interpolant is the quadratic
                    // a + 2(b - a) t + (a - 2b + e) t², t ∈ [0, 1].
                    let (a, b, e) = (values[i][i], values[i][i + 1], values[i + 1][i + 1]);
                    let mut ts = vec![1.0];
                    let curv = a - 2.0 * b + e;
                    if curv < 0.0 {
                        let t = (a - b) / curv;
                        if t > 0.0 && t < 1.0 {
                            ts.insert(0, t);
                        }
                    }
                    for t in ts {
                        let c = ((i as f64 + t) / d as f64).min(1.0);
                        let v = self.eval_unchecked(c, c);
                        if v > best.p_max {
                            best = MaxPoint { c, p_max: v };
                        }
                    }
                }
                let global = values.iter().flatten().copied().fold(f64::MIN, f64::max);
                if global > best.p_max + OFF_DIAGONAL_TOLERANCE {
                    return Err(KernelError::OffDiagonalMaximum { diagonal: best.p_max, global });
                }
                best
            }
        };
        Ok(mp)
    }

    /// Infimum of `κ` over `[c - δ, c + δ]² ∩ [0, 1]²`.
    pub fn inf_on_square(&self, c: f64, delta: f64) -> Result<f64, KernelError> {
        if !(delta > 0.0) {
            return Err(KernelError::NonPositiveDelta(delta));
        }
        if !in_unit(c) {
            return Err(KernelError::OutOfDomain { x: c, y: c });
        }
        let lo = (c - delta).max(0.0);
        let hi = (c + delta).min(1.0);
        let inf = match self {
            Kernel::Constant { p } => *p,
            Kernel::Rank1 { knots } => {
                let interior = knots.iter().filter(|k| k.0 > lo && k.0 < hi).map(|k| k.1);
                let m = [phi(knots, lo), phi(knots, hi)].into_iter().chain(interior).fold(f64::INFINITY, f64::min);
                m * m
            }
            Kernel::Block { cuts, probs } => {
                let (a, b) = (block_of(cuts, lo), block_of(cuts, hi));
                (a..=b)
                    .flat_map(|i| (a..=b).map(move |j| (i, j)))
                    .map(|(i, j)| probs[i][j])
                    .fold(f64::INFINITY, f64::min)
            }
            Kernel::Grid { values } => {
                // A bilinear patch restricted to a rectangle peaks and bottoms at its corners.
                let d = values.len() - 1;
                let pieces: Vec<(f64, f64)> = (grid_cell(d, lo)..=grid_cell(d, hi))
                    .map(|i| {
                        let a = lo.max(i as f64 / d as f64);
                        let b = hi.min((i + 1) as f64 / d as f64);
                        (a, b.max(a))
                    })
                    .collect();
                let mut m = f64::INFINITY;
                for &(x0, x1) in &pieces {
                    for &(y0, y1) in &pieces {
                        for (x, y) in [(x0, y0), (x0, y1), (x1, y0), (x1, y1)] {
                            m = m.min(self.eval_unchecked(x, y));
                        }
                    }
                }
                m
            }
        };
        Ok(inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sbm() -> Kernel {
        Kernel::block(vec![0.0, 0.5, 1.0], vec![vec![0.5, 0.2], vec![0.2, 0.4]]).unwrap()
    }

    fn linear_phi() -> Kernel {
        Kernel::rank1(vec![(0.0, 0.2), (1.0, 0.8)]).unwrap()
    }

    #[test]
    fn constant_eval_and_max() {
        let k = Kernel::constant(0.3).unwrap();
        assert_eq!(k.eval(0.1, 0.9).unwrap(), 0.3);
        assert_eq!(k.max_point().unwrap(), MaxPoint { c: 0.5, p_max: 0.3 });
        assert_eq!(k.inf_on_square(0.7, 5.0).unwrap(), 0.3);
    }

    #[test]
    fn rank1_values() {
        let k = linear_phi();
        assert!((k.eval(1.0, 1.0).unwrap() - 0.64).abs() < 1e-15);
        let mp = k.max_point().unwrap();
        assert_eq!(mp.c, 1.0);
        assert!((mp.p_max - 0.64).abs() < 1e-15);
        assert!((k.inf_on_square(1.0, 0.1).unwrap() - 0.5476).abs() < 1e-12);
    }

    #[test]
    fn block_values() {
        let k = sbm();
        assert_eq!(k.max_point().unwrap(), MaxPoint { c: 0.25, p_max: 0.5 });
        assert_eq!(k.inf_on_square(0.25, 0.1).unwrap(), 0.5);
        // breakpoint belongs to the lower block
        assert_eq!(k.eval(0.5, 0.5).unwrap(), 0.5);
        assert_eq!(k.eval(0.5000001, 0.5).unwrap(), 0.2);
        assert_eq!(k.eval(1.0, 1.0).unwrap(), 0.4);
        assert_eq!(k.inf_on_square(0.25, 0.25).unwrap(), 0.5);
        assert_eq!(k.inf_on_square(0.25, 0.26).unwrap(), 0.2);
    }

    #[test]
    fn constant_grid() {
        let k = Kernel::grid(vec![vec![0.5; 4]; 4]).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.8), (1.0, 0.5), (1.0, 1.0)] {
            assert!((k.eval(x, y).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!((k.inf_on_square(0.4, 0.2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_interior_peak() {
        // values peak at the middle grid point
        let k = Kernel::grid(vec![vec![0.2, 0.3, 0.2], vec![0.3, 0.6, 0.3], vec![0.2, 0.3, 0.2]]).unwrap();
        let mp = k.max_point().unwrap();
        assert_eq!(mp.c, 0.5);
        assert!((mp.p_max - 0.6).abs() < 1e-15);
        // corner (0.25, 0.25) averages 0.2, 0.3, 0.3, 0.6
        assert!((k.inf_on_square(0.5, 0.25).unwrap() - 0.35).abs() < 1e-12);
        assert!((k.inf_on_square(0.5, 0.5).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn off_diagonal_maximum_rejected() {
        let k = Kernel::block(vec![0.0, 0.5, 1.0], vec![vec![0.3, 0.6], vec![0.6, 0.4]]).unwrap();
        assert!(matches!(k.max_point(), Err(KernelError::OffDiagonalMaximum { .. })));
        let g = Kernel::grid(vec![vec![0.1, 0.9], vec![0.9, 0.1]]).unwrap();
        assert!(matches!(g.max_point(), Err(KernelError::OffDiagonalMaximum { .. })));
    }

    #[test]
    fn invalid_kernels() {
        assert!(Kernel::constant(1.0).is_err());
        assert!(Kernel::constant(0.0).is_err());
        assert!(Kernel::rank1(vec![(0.0, 0.2), (0.5, 0.3)]).is_err());
        assert!(Kernel::rank1(vec![(0.0, 0.2), (0.0, 0.3), (1.0, 0.3)]).is_err());
        assert!(Kernel::block(vec![0.0, 1.0], vec![vec![0.5, 0.1]]).is_err());
        assert!(Kernel::block(vec![0.0, 0.5, 1.0], vec![vec![0.5, 0.1], vec![0.2, 0.5]]).is_err());
        assert!(Kernel::grid(vec![vec![0.5]]).is_err());
    }

    #[test]
    fn domain_and_delta_errors() {
        let k = sbm();
        assert!(matches!(k.eval(1.1, 0.0), Err(KernelError::OutOfDomain { .. })));
        assert!(matches!(k.eval(0.0, -0.1), Err(KernelError::OutOfDomain { .. })));
        assert_eq!(k.inf_on_square(0.5, 0.0), Err(KernelError::NonPositiveDelta(0.0)));
        assert!(k.inf_on_square(0.5, -1.0).is_err());
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let k = Kernel::from_json(r#"{"type":"block","cuts":[0,0.5,1],"probs":[[0.5,0.2],[0.2,0.4]]}"#).unwrap();
        assert_eq!(k, sbm());
        let back = Kernel::from_json(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
        let r = Kernel::from_json(r#"{"type":"rank1","knots":[[0,0.2],[1,0.8]]}"#).unwrap();
        assert_eq!(r, linear_phi());
        assert!(Kernel::from_json(r#"{"type":"constant","p":1.5}"#).is_err());
        assert!(Kernel::from_json(r#"{"type":"grid","values":[[0.5,0.0],[0.0,0.5]]}"#).is_err());
        assert!(Kernel::from_json(r#"{"type":"blob","p":0.5}"#).is_err());
        assert_eq!(k.kernel_id().len(), 64);
        assert_ne!(k.kernel_id(), linear_phi().kernel_id());
    }
}
