use std::fmt;

use super::{default_name, Formula, PropSet};
use Formula::*;

pub(super) struct Printer<'a> {
    pub formula: &'a Formula,
    pub names: Option<&'a PropSet>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    OrOperand,
    AndOperand,
    TemporalLeft,
    TemporalRight,
    Prefix,
}

fn needs_parens(f: &Formula, ctx: Ctx) -> bool {
    match f {
        Or(..) => !matches!(ctx, Ctx::Top),
        And(..) => !matches!(ctx, Ctx::Top | Ctx::OrOperand),
        Until(..) | WeakUntil(..) | Release(..) => !matches!(ctx, Ctx::Top | Ctx::TemporalRight),
        _ => false,
    }
}

impl Printer<'_> {
    fn write(&self, f: &Formula, ctx: Ctx, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if needs_parens(f, ctx) {
            out.write_str("(")?;
            self.write(f, Ctx::Top, out)?;
            return out.write_str(")");
        }
        let binary = |out: &mut fmt::Formatter<'_>, a, b, op: &str, lc, rc| {
            self.write(a, lc, out)?;
            write!(out, " {op} ")?;
            self.write(b, rc, out)
        };
        match f {
            True => out.write_str("true"),
            False => out.write_str("false"),
            Prop(i) => match self.names {
                Some(ps) => out.write_str(ps.name(*i)),
                None => out.write_str(&default_name(*i)),
            },
            Not(a) => {
                out.write_str("!")?;
                self.write(a, Ctx::Prefix, out)
            }
            Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => {
                let op = match f {
                    Next(_) => "X",
                    WeakNext(_) => "WX",
                    Eventually(_) => "F",
                    _ => "G",
                };
                write!(out, "{op} ")?;
                self.write(a, Ctx::Prefix, out)
            }
            // Chains of the same operator print flat; a right-nested operand
            // keeps its parentheses so the tree shape survives a reparse.
            Or(a, b) => {
                let lc = if matches!(**a, Or(..)) { Ctx::Top } else { Ctx::OrOperand };
                let rc = if matches!(**b, Or(..)) { Ctx::Prefix } else { Ctx::OrOperand };
                binary(out, a, b, "|", lc, rc)
            }
            And(a, b) => {
                let lc = if matches!(**a, And(..)) { Ctx::OrOperand } else { Ctx::AndOperand };
                let rc = if matches!(**b, And(..)) { Ctx::Prefix } else { Ctx::AndOperand };
                binary(out, a, b, "&", lc, rc)
            }
            Until(a, b) => binary(out, a, b, "U", Ctx::TemporalLeft, Ctx::TemporalRight),
            WeakUntil(a, b) => binary(out, a, b, "W", Ctx::TemporalLeft, Ctx::TemporalRight),
            Release(a, b) => binary(out, a, b, "R", Ctx::TemporalLeft, Ctx::TemporalRight),
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.formula, Ctx::Top, f)
    }
}
