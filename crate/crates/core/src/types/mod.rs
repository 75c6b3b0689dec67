//! ISALF formulas and the syntax-directed type checker.

mod checker;
mod formula;

pub use checker::{
    check, check_module, infer, Context, Judgement, ModuleReport, Outcome, TypeError, TypeErrorKind,
    Usage,
};
pub use formula::{subst_type, Formula};
