//! Δ-measurable functions as expression trees.
//!
//! Every function in the grammar is built from continuous primitives and
//! indicators of representable sets, so it is measurable by construction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exceed::Samples;
use crate::real::Real;
use crate::set::TsSet;
use crate::timescale::TimeScale;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unary {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binary {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    /// The time variable `t`.
    Var,
    Unary(Unary, Arc<Expr>),
    Binary(Binary, Arc<Expr>, Arc<Expr>),
    Indicator(TsSet),
    Piecewise {
        branches: Vec<(TsSet, Arc<Expr>)>,
        otherwise: Arc<Expr>,
    },
}

impl Expr {
    fn has_sets(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => false,
            Expr::Unary(_, a) => a.has_sets(),
            Expr::Binary(_, a, b) => a.has_sets() || b.has_sets(),
            Expr::Indicator(_) | Expr::Piecewise { .. } => true,
        }
    }

    fn constant(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Unary(Unary::Neg, a) => a.constant().map(|c| -c),
            _ => None,
        }
    }

    /// Rejects operations that fail for every `t`.
    fn check_static(&self) -> Result<()> {
        match self {
            Expr::Const(c) if !c.is_finite() => Err(Error::DomainError(format!("non-finite constant {c}"))),
            Expr::Const(_) | Expr::Var | Expr::Indicator(_) => Ok(()),
            Expr::Unary(op, a) => {
                a.check_static()?;
                if *op == Unary::Ln {
                    if let Some(c) = a.constant() {
                        if c <= 0.0 {
                            return Err(Error::DomainError(format!("log of nonpositive constant {c}")));
                        }
                    }
                }
                Ok(())
            }
            Expr::Binary(op, a, b) => {
                a.check_static()?;
                b.check_static()?;
                if *op == Binary::Div && b.constant() == Some(0.0) {
                    return Err(Error::DomainError("division by the constant 0".into()));
                }
                Ok(())
            }
            Expr::Piecewise { branches, otherwise } => {
                branches.iter().try_for_each(|(_, e)| e.check_static())?;
                otherwise.check_static()
            }
        }
    }

    fn eval(&self, ts: &TimeScale, t: &Real, x: f64) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Unary(op, a) => {
                let a = a.eval(ts, t, x)?;
                match op {
                    Unary::Neg => -a,
                    Unary::Sin => a.sin(),
                    Unary::Cos => a.cos(),
                    Unary::Exp => a.exp(),
                    Unary::Abs => a.abs(),
                    Unary::Ln => {
                        if a <= 0.0 {
                            return Err(Error::DomainError(format!("log of {a} at t = {t}")));
                        }
                        a.ln()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(ts, t, x)?, b.eval(ts, t, x)?);
                match op {
                    Binary::Add => a + b,
                    Binary::Sub => a - b,
                    Binary::Mul => a * b,
                    Binary::Div => {
                        if b == 0.0 {
                            return Err(Error::DomainError(format!("division by zero at t = {t}")));
                        }
                        a / b
                    }
                    Binary::Pow => a.powf(b),
                }
            }
            Expr::Indicator(s) => {
                if s.contains(ts, t)? {
                    1.0
                } else {
                    0.0
                }
            }
            Expr::Piecewise { branches, otherwise } => {
                for (s, e) in branches {
                    if s.contains(ts, t)? {
                        return e.eval(ts, t, x);
                    }
                }
                otherwise.eval(ts, t, x)?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainError(format!("non-finite value at t = {t}")))
        }
    }

    /// Replaces the variable by `inner`.
    fn substitute(&self, inner: &Arc<Expr>) -> Arc<Expr> {
        match self {
            Expr::Var => inner.clone(),
            Expr::Const(_) | Expr::Indicator(_) | Expr::Piecewise { .. } => Arc::new(self.clone()),
            Expr::Unary(op, a) => Arc::new(Expr::Unary(*op, a.substitute(inner))),
            Expr::Binary(op, a, b) => Arc::new(Expr::Binary(*op, a.substitute(inner), b.substitute(inner))),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "t"),
            Expr::Unary(Unary::Neg, a) => write!(f, "-({a})"),
            Expr::Unary(op, a) => {
                let name = match op {
                    Unary::Sin => "sin",
                    Unary::Cos => "cos",
                    Unary::Exp => "exp",
                    Unary::Ln => "log",
                    Unary::Abs => "abs",
                    Unary::Neg => unreachable!(),
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    Binary::Add => "+",
                    Binary::Sub => "-",
                    Binary::Mul => "*",
                    Binary::Div => "/",
                    Binary::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Indicator(s) => write!(f, "ind({s})"),
            Expr::Piecewise { branches, otherwise } => {
                write!(f, "piecewise(")?;
                for (s, e) in branches {
                    write!(f, "{s}: {e}, ")?;
                }
                write!(f, "else: {otherwise})")
            }
        }
    }
}

type SampleCache = Vec<(String, Arc<Samples>)>;
const CACHE_SLOTS: usize = 4;

/// A function `T → ℝ` with a small per-function cache of window samples.
#[derive(Clone)]
pub struct MeasurableFn {
    expr: Arc<Expr>,
    label: Option<Arc<str>>,
    cache: Arc<Mutex<SampleCache>>,
}

/// How two functions, or a function and a scalar, combine.
#[derive(Clone, Debug)]
pub enum Combine {
    Add(MeasurableFn),
    Mul(MeasurableFn),
    Scale(f64),
    /// Apply an outer map `h` (written in `t`) to the values: `h ∘ f`.
    ComposeOuter(MeasurableFn),
}

impl MeasurableFn {
    pub fn new(expr: Expr) -> Result<Self> {
        expr.check_static()?;
        Ok(Self::from_arc(Arc::new(expr)))
    }

    fn from_arc(expr: Arc<Expr>) -> Self {
        MeasurableFn {
            expr,
            label: None,
            cache: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_arc(Arc::new(Expr::Const(c)))
    }

    pub fn identity() -> Self {
        Self::from_arc(Arc::new(Expr::Var))
    }

    pub fn indicator(s: TsSet) -> Self {
        Self::from_arc(Arc::new(Expr::Indicator(s)))
    }

    pub fn piecewise(branches: Vec<(TsSet, MeasurableFn)>, otherwise: MeasurableFn) -> Self {
        Self::from_arc(Arc::new(Expr::Piecewise {
            branches: branches.into_iter().map(|(s, f)| (s, f.expr)).collect(),
            otherwise: otherwise.expr,
        }))
    }

    /// `1/t`.
    pub fn reciprocal() -> Self {
        Self::from_arc(Arc::new(Expr::Binary(
            Binary::Div,
            Arc::new(Expr::Const(1.0)),
            Arc::new(Expr::Var),
        )))
    }

    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = Some(Arc::from(label.into()));
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    fn unary(&self, op: Unary) -> Self {
        Self::from_arc(Arc::new(Expr::Unary(op, self.expr.clone())))
    }

    fn binary(&self, op: Binary, other: &MeasurableFn) -> Self {
        Self::from_arc(Arc::new(Expr::Binary(op, self.expr.clone(), other.expr.clone())))
    }

    pub fn sin(&self) -> Self {
        self.unary(Unary::Sin)
    }

    pub fn cos(&self) -> Self {
        self.unary(Unary::Cos)
    }

    pub fn exp(&self) -> Self {
        self.unary(Unary::Exp)
    }

    pub fn abs(&self) -> Self {
        self.unary(Unary::Abs)
    }

    pub fn ln(&self) -> Result<Self> {
        Self::new(Expr::Unary(Unary::Ln, self.expr.clone()))
    }

    pub fn div(&self, other: &MeasurableFn) -> Result<Self> {
        Self::new(Expr::Binary(Binary::Div, self.expr.clone(), other.expr.clone()))
    }

    pub fn powf(&self, exponent: &MeasurableFn) -> Self {
        self.binary(Binary::Pow, exponent)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        MeasurableFn::constant(alpha) * self.clone()
    }

    /// `h ∘ self`. The outer map must be built from continuous primitives only.
    pub fn compose_outer(&self, h: &MeasurableFn) -> Result<Self> {
        if h.expr.has_sets() {
            return Err(Error::DomainError(
                "outer map of a composition must not use indicators or piecewise branches".into(),
            ));
        }
        let e = h.expr.substitute(&self.expr);
        e.check_static()?;
        Ok(Self::from_arc(e))
    }

    pub fn combine(&self, op: Combine) -> Result<Self> {
        Ok(match op {
            Combine::Add(g) => self.clone() + g,
            Combine::Mul(g) => self.clone() * g,
            Combine::Scale(a) => self.scale(a),
            Combine::ComposeOuter(h) => self.compose_outer(&h)?,
        })
    }

    /// Value at a point of the scale.
    pub fn eval(&self, ts: &TimeScale, t: &Real) -> Result<f64> {
        if !ts.contains(t) {
            return Err(Error::NotInTimeScale(t.to_string()));
        }
        self.eval_unchecked(ts, t)
    }

    pub(crate) fn eval_unchecked(&self, ts: &TimeScale, t: &Real) -> Result<f64> {
        self.expr.eval(ts, t, t.to_f64())
    }

    /// Evaluates the outer map `h(x)` at a plain real argument.
    pub fn eval_outer(&self, x: f64) -> Result<f64> {
        if self.expr.has_sets() {
            return Err(Error::DomainError("outer maps cannot contain sets".into()));
        }
        let ts = TimeScale::continuous(num_rational::Ratio::from_integer(1)).expect("valid");
        self.expr.eval(&ts, &Real::approx(x), x)
    }

    pub(crate) fn cached_samples(&self, key: &str) -> Option<Arc<Samples>> {
        let cache = self.cache.lock().expect("sample cache poisoned");
        cache.iter().find(|(k, _)| k == key).map(|(_, s)| s.clone())
    }

    pub(crate) fn store_samples(&self, key: String, samples: Arc<Samples>) {
        let mut cache = self.cache.lock().expect("sample cache poisoned");
        cache.retain(|(k, _)| *k != key);
        if cache.len() >= CACHE_SLOTS {
            cache.remove(0);
        }
        cache.push((key, samples));
    }
}

impl fmt::Display for MeasurableFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}"),
            None => write!(f, "{}", self.expr),
        }
    }
}

impl fmt::Debug for MeasurableFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MeasurableFn({self})")
    }
}

impl Add for MeasurableFn {
    type Output = MeasurableFn;
    fn add(self, rhs: MeasurableFn) -> MeasurableFn {
        self.binary(Binary::Add, &rhs)
    }
}

impl Sub for MeasurableFn {
    type Output = MeasurableFn;
    fn sub(self, rhs: MeasurableFn) -> MeasurableFn {
        self.binary(Binary::Sub, &rhs)
    }
}

impl Mul for MeasurableFn {
    type Output = MeasurableFn;
    fn mul(self, rhs: MeasurableFn) -> MeasurableFn {
        self.binary(Binary::Mul, &rhs)
    }
}

impl Neg for MeasurableFn {
    type Output = MeasurableFn;
    fn neg(self) -> MeasurableFn {
        self.unary(Unary::Neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use crate::set::IndexPattern;

    fn grid() -> TimeScale {
        TimeScale::uniform(q(1, 1), q(1, 1)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = grid();
        assert_eq!(MeasurableFn::reciprocal().eval(&g, &Real::int(4)).unwrap(), 0.25);
        let sq = MeasurableFn::indicator(TsSet::indices(IndexPattern::Squares));
        assert_eq!(sq.eval(&g, &Real::int(9)).unwrap(), 1.0);
        assert_eq!(sq.eval(&g, &Real::int(8)).unwrap(), 0.0);

        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let s = MeasurableFn::identity().sin();
        let v = s.eval(&ray, &Real::approx(std::f64::consts::PI)).unwrap();
        assert!(v.abs() <= f64::EPSILON);
    }

    #[test]
    fn combine_examples() {
        let g = grid();
        let inv = MeasurableFn::reciprocal();
        assert_eq!(inv.combine(Combine::Scale(2.0)).unwrap().eval(&g, &Real::int(4)).unwrap(), 0.5);
        let sq = MeasurableFn::indicator(TsSet::indices(IndexPattern::Squares));
        let sum = inv.combine(Combine::Add(sq)).unwrap();
        assert_eq!(sum.eval(&g, &Real::int(9)).unwrap(), 1.0 + 1.0 / 9.0);
        let square = MeasurableFn::identity() * MeasurableFn::identity();
        let c = inv.combine(Combine::ComposeOuter(square)).unwrap();
        assert_eq!(c.eval(&g, &Real::int(2)).unwrap(), 0.25);
    }

    #[test]
    fn domain_errors() {
        let g = grid();
        assert!(MeasurableFn::constant(1.0).div(&MeasurableFn::constant(0.0)).is_err());
        assert!(MeasurableFn::constant(-2.0).ln().is_err());
        let f = MeasurableFn::constant(1.0)
            .div(&(MeasurableFn::identity() - MeasurableFn::constant(3.0)))
            .unwrap();
        assert!(matches!(f.eval(&g, &Real::int(3)), Err(Error::DomainError(_))));
        assert!(matches!(f.eval(&g, &Real::approx(2.5)), Err(Error::NotInTimeScale(_))));
        let sq = MeasurableFn::indicator(TsSet::indices(IndexPattern::Squares));
        assert!(MeasurableFn::identity().compose_outer(&sq).is_err());
    }

    #[test]
    fn piecewise_picks_first_branch() {
        let g = grid();
        let f = MeasurableFn::piecewise(
            vec![(TsSet::indices(IndexPattern::evens()), MeasurableFn::constant(2.0))],
            MeasurableFn::reciprocal(),
        );
        assert_eq!(f.eval(&g, &Real::int(4)).unwrap(), 2.0);
        assert_eq!(f.eval(&g, &Real::int(5)).unwrap(), 0.2);
    }
}
