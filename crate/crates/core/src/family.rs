//! Gamma-ratio bivariate beta families on the unit square.
//!
//! Every family is built from independent unit-scale gamma variates
//! `U_i ~ Gamma(α_i)`, and each coordinate is a ratio `N / (N + D)` of two
//! disjoint sums of them:
//!
//! | family | x | y |
//! |--------|---|---|
//! | OL⁺  | U1 / (U1 + U3) | U2 / (U2 + U3) |
//! | OL⁻  | U1 / (U1 + U3) | U3 / (U2 + U3) |
//! | OL*  | U3 / (U1 + U3) | U3 / (U2 + U3) |
//! | AN5  | (U1 + U3) / (U1 + U3 + U4 + U5) | (U2 + U4) / (U2 + U3 + U4 + U5) |
//! | AN8  | (U1 + U5 + U7) / (U1 + U3 + U5 + U6 + U7 + U8) | (U2 + U5 + U8) / (U2 + U4 + U5 + U6 + U7 + U8) |
//!
//! OL⁻ and OL* are the OL⁺ pair with the second (resp. both) coordinates
//! complemented; `1 − U2/(U2 + U3)` is written as `U3/(U2 + U3)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::BetaParams;

/// Shape parameters of a gamma-ratio construction. Components may be zero
/// (the variate is then identically zero), which is how the special cases
/// of AN8 are expressed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AlphaVector(Vec<f64>);

impl AlphaVector {
    pub fn new(values: &[f64]) -> Result<Self> {
        if !matches!(values.len(), 3 | 5 | 8) {
            return Err(Error::InvalidAlphas(format!(
                "length must be 3, 5 or 8, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidAlphas(format!(
                "components must be finite and nonnegative, got {v}"
            )));
        }
        Ok(AlphaVector(values.to_vec()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    // 1-based, matching the usual α₁..αₙ labelling
    fn at(&self, i: usize) -> f64 {
        self.0[i - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    OlPlus,
    OlMinus,
    OlStar,
    An5,
    An8,
    IndependentBetas,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::OlPlus => "ol-plus",
            Variant::OlMinus => "ol-minus",
            Variant::OlStar => "ol-star",
            Variant::An5 => "an5",
            Variant::An8 => "an8",
            Variant::IndependentBetas => "indep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ol-plus" => Variant::OlPlus,
            "ol-minus" => Variant::OlMinus,
            "ol-star" => Variant::OlStar,
            "an5" => Variant::An5,
            "an8" => Variant::An8,
            "indep" => Variant::IndependentBetas,
            other => return Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        })
    }

    /// Whether a closed-form joint density is available.
    pub fn has_closed_form(self) -> bool {
        !matches!(self, Variant::An5 | Variant::An8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    X,
    Y,
    Both,
}

impl Which {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Which::X),
            "y" => Ok(Which::Y),
            "both" => Ok(Which::Both),
            other => Err(Error::InvalidParameter(format!(
                "unknown coordinate '{other}'"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Which::X => "x",
            Which::Y => "y",
            Which::Both => "both",
        }
    }

    /// Whether the x coordinate is complemented.
    pub fn x(self) -> bool {
        matches!(self, Which::X | Which::Both)
    }

    pub fn y(self) -> bool {
        matches!(self, Which::Y | Which::Both)
    }
}

/// One member of the bivariate family, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    OlPlus(AlphaVector),
    OlMinus(AlphaVector),
    OlStar(AlphaVector),
    An5(AlphaVector),
    An8(AlphaVector),
    IndependentBetas(BetaParams, BetaParams),
}

impl FamilySpec {
    pub fn new(variant: Variant, alphas: &[f64]) -> Result<Self> {
        let spec = match variant {
            Variant::OlPlus => FamilySpec::OlPlus(AlphaVector::new(alphas)?),
            Variant::OlMinus => FamilySpec::OlMinus(AlphaVector::new(alphas)?),
            Variant::OlStar => FamilySpec::OlStar(AlphaVector::new(alphas)?),
            Variant::An5 => FamilySpec::An5(AlphaVector::new(alphas)?),
            Variant::An8 => FamilySpec::An8(AlphaVector::new(alphas)?),
            Variant::IndependentBetas => {
                if alphas.len() != 4 {
                    return Err(Error::InvalidAlphas(
                        "independent betas take (a1, b1, a2, b2)".into(),
                    ));
                }
                FamilySpec::IndependentBetas(
                    BetaParams::new(alphas[0], alphas[1])?,
                    BetaParams::new(alphas[2], alphas[3])?,
                )
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ol_plus(alphas: &[f64]) -> Result<Self> {
        Self::new(Variant::OlPlus, alphas)
    }

    pub fn ol_minus(alphas: &[f64]) -> Result<Self> {
        Self::new(Variant::OlMinus, alphas)
    }

    pub fn ol_star(alphas: &[f64]) -> Result<Self> {
        Self::new(Variant::OlStar, alphas)
    }

    pub fn an5(alphas: &[f64]) -> Result<Self> {
        Self::new(Variant::An5, alphas)
    }

    pub fn an8(alphas: &[f64]) -> Result<Self> {
        Self::new(Variant::An8, alphas)
    }

    pub fn independent(x: BetaParams, y: BetaParams) -> Result<Self> {
        let spec = FamilySpec::IndependentBetas(x, y);
        spec.validate()?;
        Ok(spec)
    }

    pub fn variant(&self) -> Variant {
        match self {
            FamilySpec::OlPlus(_) => Variant::OlPlus,
            FamilySpec::OlMinus(_) => Variant::OlMinus,
            FamilySpec::OlStar(_) => Variant::OlStar,
            FamilySpec::An5(_) => Variant::An5,
            FamilySpec::An8(_) => Variant::An8,
            FamilySpec::IndependentBetas(..) => Variant::IndependentBetas,
        }
    }

    /// Flat parameter list; `(a1, b1, a2, b2)` for independent betas.
    pub fn params(&self) -> Vec<f64> {
        match self {
            FamilySpec::OlPlus(a)
            | FamilySpec::OlMinus(a)
            | FamilySpec::OlStar(a)
            | FamilySpec::An5(a)
            | FamilySpec::An8(a) => a.values().to_vec(),
            FamilySpec::IndependentBetas(x, y) => vec![x.a, x.b, y.a, y.b],
        }
    }

    pub fn alphas(&self) -> Option<&AlphaVector> {
        match self {
            FamilySpec::OlPlus(a)
            | FamilySpec::OlMinus(a)
            | FamilySpec::OlStar(a)
            | FamilySpec::An5(a)
            | FamilySpec::An8(a) => Some(a),
            FamilySpec::IndependentBetas(..) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let want = match self.variant() {
            Variant::OlPlus | Variant::OlMinus | Variant::OlStar => 3,
            Variant::An5 => 5,
            Variant::An8 => 8,
            Variant::IndependentBetas => 0,
        };
        if let Some(a) = self.alphas() {
            if a.len() != want {
                return Err(Error::InvalidAlphas(format!(
                    "{} needs {} shapes, got {}",
                    self.variant().name(),
                    want,
                    a.len()
                )));
            }
        }
        let (x, y) = self.marginal_params_unchecked();
        for p in [x, y] {
            if !(p.a > 0.0 && p.b > 0.0) {
                return Err(Error::InvalidAlphas(format!(
                    "{} {:?}: a marginal would be B({}, {})",
                    self.variant().name(),
                    self.params(),
                    p.a,
                    p.b
                )));
            }
        }
        Ok(())
    }

    /// Analytic beta laws of the two coordinates.
    pub fn marginal_params(&self) -> (BetaParams, BetaParams) {
        self.marginal_params_unchecked()
    }

    fn marginal_params_unchecked(&self) -> (BetaParams, BetaParams) {
        let b = |a: f64, b: f64| BetaParams { a, b };
        match self {
            FamilySpec::OlPlus(a) => (b(a.at(1), a.at(3)), b(a.at(2), a.at(3))),
            FamilySpec::OlMinus(a) => (b(a.at(1), a.at(3)), b(a.at(3), a.at(2))),
            FamilySpec::OlStar(a) => (b(a.at(3), a.at(1)), b(a.at(3), a.at(2))),
            FamilySpec::An5(a) => (
                b(a.at(1) + a.at(3), a.at(4) + a.at(5)),
                b(a.at(2) + a.at(4), a.at(3) + a.at(5)),
            ),
            FamilySpec::An8(a) => (
                b(a.at(1) + a.at(5) + a.at(7), a.at(3) + a.at(6) + a.at(8)),
                b(a.at(2) + a.at(5) + a.at(8), a.at(4) + a.at(6) + a.at(7)),
            ),
            FamilySpec::IndependentBetas(x, y) => (*x, *y),
        }
    }

    /// Embedding into the eight-shape family with the same law.
    ///
    /// Index roles in AN8 (1-based): 1 = V-num only, 2 = W-num only,
    /// 3 = V-den only, 4 = W-den only, 5 = both numerators,
    /// 6 = both denominators, 7 = V-num and W-den, 8 = V-den and W-num.
    pub fn to_an8(&self) -> Result<FamilySpec> {
        let e = match self {
            FamilySpec::OlPlus(a) => [a.at(1), a.at(2), 0.0, 0.0, 0.0, a.at(3), 0.0, 0.0],
            FamilySpec::OlMinus(a) => [a.at(1), 0.0, 0.0, a.at(2), 0.0, 0.0, 0.0, a.at(3)],
            FamilySpec::OlStar(a) => [0.0, 0.0, a.at(1), a.at(2), a.at(3), 0.0, 0.0, 0.0],
            FamilySpec::An5(a) => [a.at(1), a.at(2), 0.0, 0.0, 0.0, a.at(5), a.at(3), a.at(4)],
            FamilySpec::An8(_) => return Ok(self.clone()),
            FamilySpec::IndependentBetas(x, y) => [x.a, y.a, x.b, y.b, 0.0, 0.0, 0.0, 0.0],
        };
        FamilySpec::an8(&e)
    }

    /// Family describing the law of the complemented pair.
    ///
    /// OL variants are relabelled when the result is again an OL variant
    /// (`OL⁺ ↔ OL⁻` under y, `OL⁻ ↔ OL*` under x, `OL⁺ ↔ OL*` under both).
    /// The fourth pattern `(1 − X, Y)` of the OL construction has no OL
    /// label and is returned as its AN8 embedding. AN5 is not closed.
    pub fn complement(&self, which: Which) -> Result<FamilySpec> {
        let relabel = |a: &AlphaVector, v: Variant| FamilySpec::new(v, a.values());
        match (self, which) {
            (FamilySpec::An5(_), _) => Err(Error::NotClosed("an5")),
            (FamilySpec::OlPlus(a), Which::Y) => relabel(a, Variant::OlMinus),
            (FamilySpec::OlMinus(a), Which::Y) => relabel(a, Variant::OlPlus),
            (FamilySpec::OlMinus(a), Which::X) => relabel(a, Variant::OlStar),
            (FamilySpec::OlStar(a), Which::X) => relabel(a, Variant::OlMinus),
            (FamilySpec::OlPlus(a), Which::Both) => relabel(a, Variant::OlStar),
            (FamilySpec::OlStar(a), Which::Both) => relabel(a, Variant::OlPlus),
            (FamilySpec::OlPlus(_) | FamilySpec::OlMinus(_) | FamilySpec::OlStar(_), _) => {
                self.to_an8()?.complement(which)
            }
            (FamilySpec::IndependentBetas(x, y), w) => FamilySpec::independent(
                if w.x() { x.swapped() } else { *x },
                if w.y() { y.swapped() } else { *y },
            ),
            (FamilySpec::An8(a), w) => {
                // X₂ = V/(1+V), so 1 − X₂ = V⁻¹/(1+V⁻¹): complementing x swaps
                // V's numerator and denominator sets. An index keeps its W role
                // and flips its V role: 1↔3, 5↔8, 6↔7. Likewise for y with W:
                // 2↔4, 5↔7, 6↔8. The two involutions commute.
                let mut v: Vec<f64> = a.values().to_vec();
                if w.x() {
                    v.swap(0, 2);
                    v.swap(4, 7);
                    v.swap(5, 6);
                }
                if w.y() {
                    v.swap(1, 3);
                    v.swap(4, 6);
                    v.swap(5, 7);
                }
                FamilySpec::an8(&v)
            }
        }
    }
}

/// Index sets (bitmasks over shape indices) of one ratio coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Ratio {
    pub num: u16,
    pub den: u16,
}

/// Sampling recipe: the gamma shapes to draw and how the two coordinates
/// are assembled from them.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatioPlan {
    pub shapes: Vec<f64>,
    pub x: Ratio,
    pub y: Ratio,
}

const fn bits(idx: &[usize]) -> u16 {
    let mut m = 0u16;
    let mut i = 0;
    while i < idx.len() {
        m |= 1 << (idx[i] - 1);
        i += 1;
    }
    m
}

impl FamilySpec {
    pub(crate) fn ratio_plan(&self) -> RatioPlan {
        let r = |num: &[usize], den: &[usize]| Ratio {
            num: bits(num),
            den: bits(den),
        };
        let (x, y) = match self {
            FamilySpec::OlPlus(_) => (r(&[1], &[3]), r(&[2], &[3])),
            FamilySpec::OlMinus(_) => (r(&[1], &[3]), r(&[3], &[2])),
            FamilySpec::OlStar(_) => (r(&[3], &[1]), r(&[3], &[2])),
            FamilySpec::An5(_) => (r(&[1, 3], &[4, 5]), r(&[2, 4], &[3, 5])),
            FamilySpec::An8(_) => (r(&[1, 5, 7], &[3, 6, 8]), r(&[2, 5, 8], &[4, 6, 7])),
            FamilySpec::IndependentBetas(..) => (r(&[1], &[2]), r(&[3], &[4])),
        };
        RatioPlan {
            shapes: self.params(),
            x,
            y,
        }
    }
}
