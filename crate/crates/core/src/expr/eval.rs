//! Evaluation of expression trees, either into series jets or into exact
//! constants.

use num::rational::BigRational;
use num::traits::ToPrimitive;
use std::collections::BTreeMap;

use super::ast::{ExprKind, ExprNode};
use super::ExprError;
use crate::fps::{div_exact, AnalyticFn, FpsError, GaussRational, TruncatedSeries};

/// Everything needed to turn an expression into a jet: the ring dimension
/// (which must match the dimension the expression was parsed against), the
/// truncation order, and values for every named constant.
#[derive(Clone, Debug)]
pub struct EvalContext {
    pub dim: usize,
    pub order: usize,
    pub params: BTreeMap<String, GaussRational>,
}

fn at(pos: usize) -> impl FnOnce(FpsError) -> ExprError {
    move |source| ExprError::EvalAt { pos, source }
}

/// Evaluate into the `dim`-variable ring at `ctx.order`.  Division is exact
/// series division, so the certified order of the result can drop below
/// `ctx.order`; callers needing a specific order should over-allocate and
/// inspect `result.order()`.
pub fn eval_series(node: &ExprNode, ctx: &EvalContext) -> Result<TruncatedSeries, ExprError> {
    let n = ctx.dim;
    let order = ctx.order;
    match &node.kind {
        ExprKind::Number(v) => Ok(TruncatedSeries::constant(
            n,
            order,
            GaussRational::from_rational(v.clone()),
        )),
        ExprKind::ImaginaryUnit => Ok(TruncatedSeries::constant(n, order, GaussRational::i())),
        ExprKind::Var(j) => TruncatedSeries::var(n, order, *j).map_err(at(node.pos)),
        ExprKind::Param(name) => {
            let value = ctx
                .params
                .get(name)
                .ok_or_else(|| ExprError::MissingParam { name: name.clone() })?;
            Ok(TruncatedSeries::constant(n, order, value.clone()))
        }
        ExprKind::Add(l, r) => {
            let lv = eval_series(l, ctx)?;
            let rv = eval_series(r, ctx)?;
            lv.add(&rv).map_err(at(node.pos))
        }
        ExprKind::Sub(l, r) => {
            let lv = eval_series(l, ctx)?;
            let rv = eval_series(r, ctx)?;
            lv.sub(&rv).map_err(at(node.pos))
        }
        ExprKind::Mul(l, r) => {
            let lv = eval_series(l, ctx)?;
            let rv = eval_series(r, ctx)?;
            lv.mul(&rv).map_err(at(node.pos))
        }
        ExprKind::Div(l, r) => {
            let lv = eval_series(l, ctx)?;
            let rv = eval_series(r, ctx)?;
            div_exact(&lv, &rv).map_err(at(node.pos))
        }
        ExprKind::Neg(x) => Ok(eval_series(x, ctx)?.neg()),
        ExprKind::Pow(base, exp) => {
            let bv = eval_series(base, ctx)?;
            if exp.is_integer() {
                // the parser caps integer exponents well inside i64
                let e = exp.to_integer().to_i64().unwrap();
                crate::fps::pow_integer(&bv, e).map_err(at(node.pos))
            } else {
                AnalyticFn::PowRational(exp.clone())
                    .apply(&bv)
                    .map_err(at(node.pos))
            }
        }
        ExprKind::Call(name, arg) => {
            let av = eval_series(arg, ctx)?;
            let f = match *name {
                "sqrt" => AnalyticFn::PowRational(BigRational::new(1.into(), 2.into())),
                "exp" => AnalyticFn::Exp,
                "log" => AnalyticFn::Log,
                "sin" => AnalyticFn::Sin,
                "cos" => AnalyticFn::Cos,
                "sinh" => AnalyticFn::Sinh,
                "cosh" => AnalyticFn::Cosh,
                "tan" => AnalyticFn::Tan,
                "tanh" => AnalyticFn::Tanh,
                "ucoth_sq" => AnalyticFn::UCothSq,
                other => {
                    return Err(ExprError::UnknownFunction {
                        pos: node.pos,
                        name: other.to_string(),
                    })
                }
            };
            f.apply(&av).map_err(at(node.pos))
        }
    }
}

/// Evaluate a constant expression to an exact Gaussian rational.  Derivative
/// variables and catalogue functions are rejected.
pub fn const_eval(
    node: &ExprNode,
    params: &BTreeMap<String, GaussRational>,
) -> Result<GaussRational, ExprError> {
    match &node.kind {
        ExprKind::Number(v) => Ok(GaussRational::from_rational(v.clone())),
        ExprKind::ImaginaryUnit => Ok(GaussRational::i()),
        ExprKind::Param(name) => params
            .get(name)
            .cloned()
            .ok_or_else(|| ExprError::MissingParam { name: name.clone() }),
        ExprKind::Var(j) => Err(ExprError::NotConstant {
            pos: node.pos,
            msg: format!("variable d{} is not allowed here", j + 1),
        }),
        ExprKind::Call(name, _) => Err(ExprError::NotConstant {
            pos: node.pos,
            msg: format!("function {name} is not allowed here"),
        }),
        ExprKind::Add(l, r) => Ok(&const_eval(l, params)? + &const_eval(r, params)?),
        ExprKind::Sub(l, r) => Ok(&const_eval(l, params)? - &const_eval(r, params)?),
        ExprKind::Mul(l, r) => Ok(&const_eval(l, params)? * &const_eval(r, params)?),
        ExprKind::Div(l, r) => {
            let rv = const_eval(r, params)?;
            if rv.is_zero() {
                return Err(ExprError::DivisionByZero { pos: node.pos });
            }
            Ok(&const_eval(l, params)? / &rv)
        }
        ExprKind::Neg(x) => Ok(-&const_eval(x, params)?),
        ExprKind::Pow(base, exp) => {
            if !exp.is_integer() {
                return Err(ExprError::NotConstant {
                    pos: node.pos,
                    msg: format!("fractional power {exp} is not allowed here"),
                });
            }
            let bv = const_eval(base, params)?;
            let e = exp.to_integer().to_i64().unwrap();
            bv.checked_pow(e)
                .ok_or(ExprError::DivisionByZero { pos: node.pos })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::{parse_expr, ParseContext};
    use crate::fps::MultiIndex;

    fn setup(kappa: GaussRational) -> (ParseContext, EvalContext) {
        let pctx = ParseContext::with_params(3, ["kappa".to_string()]);
        let mut params = BTreeMap::new();
        params.insert("kappa".to_string(), kappa);
        let ectx = EvalContext {
            dim: 3,
            order: 6,
            params,
        };
        (pctx, ectx)
    }

    fn rat(n: i64, d: i64) -> GaussRational {
        GaussRational::from_ratio(n, d)
    }

    #[test]
    fn linear_entry_with_imaginary_coefficient() {
        let (pctx, ectx) = setup(rat(1, 2));
        let node = parse_expr("i*kappa*d3", &pctx).unwrap();
        let s = eval_series(&node, &ectx).unwrap();
        assert_eq!(
            s.coeff(&MultiIndex::new(vec![0, 0, 1])),
            GaussRational::imag_ratio(1, 2)
        );
        assert_eq!(s.num_terms(), 1);
    }

    #[test]
    fn sqrt_entry_matches_direct_computation() {
        let (pctx, ectx) = setup(rat(1, 1));
        let node = parse_expr("sqrt(1 + kappa^2*(d1^2 + d2^2 + d3^2))", &pctx).unwrap();
        let s = eval_series(&node, &ectx).unwrap();
        // constant 1, quadratic part (d^2)/2, no linear part
        assert_eq!(s.constant_term(), rat(1, 1));
        assert_eq!(s.coeff(&MultiIndex::new(vec![2, 0, 0])), rat(1, 2));
        assert_eq!(s.coeff(&MultiIndex::new(vec![0, 2, 0])), rat(1, 2));
        assert_eq!(s.coeff(&MultiIndex::new(vec![1, 0, 0])), rat(0, 1));
        // degree-4 diagonal coefficient of sqrt(1+u): -1/8 u^2 term
        assert_eq!(s.coeff(&MultiIndex::new(vec![4, 0, 0])), rat(-1, 8));
        assert_eq!(s.coeff(&MultiIndex::new(vec![2, 2, 0])), rat(-1, 4));
    }

    #[test]
    fn division_drops_certified_order() {
        let (pctx, ectx) = setup(rat(1, 1));
        let node = parse_expr(
            "d1*d2*(ucoth_sq(-kappa^2*(d1^2 + d2^2 + d3^2)/4) - 1)/(d1^2 + d2^2 + d3^2)",
            &pctx,
        )
        .unwrap();
        let s = eval_series(&node, &ectx).unwrap();
        // numerator certified through 6, divisor valuation 2
        assert_eq!(s.order(), 4);
        // leading term: d1 d2 * (E/3)/sum with E = -sum/4 -> -d1 d2/12
        assert_eq!(s.coeff(&MultiIndex::new(vec![1, 1, 0])), rat(-1, 12));
    }

    #[test]
    fn const_eval_structure_coefficients() {
        let (pctx, ectx) = setup(rat(1, 2));
        let node = parse_expr("2*i*kappa", &pctx).unwrap();
        let v = const_eval(&node, &ectx.params).unwrap();
        assert_eq!(v, GaussRational::i());

        let node = parse_expr("-2*i*kappa", &pctx).unwrap();
        assert_eq!(const_eval(&node, &ectx.params).unwrap(), -&GaussRational::i());

        let node = parse_expr("(1 + i)^2/2", &pctx).unwrap();
        assert_eq!(const_eval(&node, &ectx.params).unwrap(), GaussRational::i());

        let node = parse_expr("d1 + 1", &pctx).unwrap();
        assert!(matches!(
            const_eval(&node, &ectx.params),
            Err(ExprError::NotConstant { .. })
        ));
        let node = parse_expr("sin(1)", &pctx).unwrap();
        assert!(matches!(
            const_eval(&node, &ectx.params),
            Err(ExprError::NotConstant { .. })
        ));
    }

    #[test]
    fn eval_error_carries_position() {
        let (pctx, ectx) = setup(rat(1, 1));
        // log of constant 2 violates the analytic domain; position points at log
        let node = parse_expr("d1 + log(2 + d2)", &pctx).unwrap();
        match eval_series(&node, &ectx) {
            Err(ExprError::EvalAt { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected EvalAt, got {other:?}"),
        }
    }
}
