//! Postfix form of an expression with variables resolved to argument slots.

use super::{Dual, ExprError, Fault, Func, Node, Op, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Num(f64),
    Slot(usize),
    Neg,
    Bin(Op),
    Call(Func),
}

/// Compiled expression. Subtrees without variables are folded at compile
/// time unless their evaluation faults, so faults still surface at `eval`.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    arity: usize,
    depth: usize,
}

const INLINE_STACK: usize = 32;

/// Operand being assembled during folding: either a known constant or code.
enum Piece {
    Known(f64),
    Code(Vec<Instr>),
}

impl Piece {
    fn into_code(self) -> Vec<Instr> {
        match self {
            Piece::Known(v) => vec![Instr::Num(v)],
            Piece::Code(c) => c,
        }
    }
}

fn emit(node: &Node, vars: &[&str], out: &mut Vec<Instr>) -> Result<(), ExprError> {
    match node {
        Node::Num(v) => out.push(Instr::Num(*v)),
        Node::Const(c) => out.push(Instr::Num(c.value())),
        Node::Var(name) => {
            let slot = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| ExprError::Unbound(name.clone()))?;
            out.push(Instr::Slot(slot));
        }
        Node::Neg(a) => {
            emit(a, vars, out)?;
            out.push(Instr::Neg);
        }
        Node::Bin(op, l, r) => {
            emit(l, vars, out)?;
            emit(r, vars, out)?;
            out.push(Instr::Bin(*op));
        }
        Node::Call(f, a) => {
            emit(a, vars, out)?;
            out.push(Instr::Call(*f));
        }
    }
    Ok(())
}

fn fold(code: &[Instr], fixed: &[Option<f64>]) -> Vec<Instr> {
    let mut stack: Vec<Piece> = Vec::new();
    for &ins in code {
        let piece = match ins {
            Instr::Num(v) => Piece::Known(v),
            Instr::Slot(i) => match fixed.get(i).copied().flatten() {
                Some(v) => Piece::Known(v),
                None => Piece::Code(vec![ins]),
            },
            Instr::Neg | Instr::Call(_) => {
                let a = stack.pop().expect("well-formed program");
                match a {
                    Piece::Known(v) => {
                        let r = if let Instr::Call(f) = ins {
                            v.apply(f)
                        } else {
                            Ok(-v)
                        };
                        match r {
                            Ok(r) => Piece::Known(r),
                            Err(_) => Piece::Code(vec![Instr::Num(v), ins]),
                        }
                    }
                    Piece::Code(mut c) => {
                        c.push(ins);
                        Piece::Code(c)
                    }
                }
            }
            Instr::Bin(op) => {
                let r = stack.pop().expect("well-formed program");
                let l = stack.pop().expect("well-formed program");
                match (l, r) {
                    (Piece::Known(a), Piece::Known(b)) => match op.apply(a, b) {
                        Ok(v) => Piece::Known(v),
                        Err(_) => Piece::Code(vec![Instr::Num(a), Instr::Num(b), ins]),
                    },
                    (l, r) => {
                        let mut c = l.into_code();
                        c.extend(r.into_code());
                        c.push(ins);
                        Piece::Code(c)
                    }
                }
            }
        };
        stack.push(piece);
    }
    stack.pop().expect("well-formed program").into_code()
}

fn max_depth(code: &[Instr]) -> usize {
    let mut depth = 0usize;
    let mut max = 0;
    for ins in code {
        match ins {
            Instr::Num(_) | Instr::Slot(_) => depth += 1,
            Instr::Bin(_) => depth -= 1,
            Instr::Neg | Instr::Call(_) => {}
        }
        max = max.max(depth);
    }
    max
}

impl Program {
    pub(super) fn compile(root: &Node, vars: &[&str]) -> Result<Program, ExprError> {
        let mut code = Vec::new();
        emit(root, vars, &mut code)?;
        let code = fold(&code, &[]);
        Ok(Program {
            depth: max_depth(&code),
            code,
            arity: vars.len(),
        })
    }

    /// Number of argument slots.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Copy with the given slots fixed to constants and folded away.
    /// Slot numbering is unchanged; fixed slots are simply ignored at eval.
    pub fn specialize(&self, fixed: &[Option<f64>]) -> Program {
        let code = fold(&self.code, fixed);
        Program {
            depth: max_depth(&code),
            code,
            arity: self.arity,
        }
    }

    /// `Some(v)` when the program no longer depends on any slot.
    pub fn as_constant(&self) -> Option<f64> {
        match self.code.as_slice() {
            [Instr::Num(v)] => Some(*v),
            _ => None,
        }
    }

    fn run<S: Scalar>(&self, args: &[S], stack: &mut [S]) -> Result<S, Fault> {
        let mut sp = 0;
        for ins in &self.code {
            match *ins {
                Instr::Num(v) => {
                    stack[sp] = S::constant(v);
                    sp += 1;
                }
                Instr::Slot(i) => {
                    stack[sp] = args[i];
                    sp += 1;
                }
                Instr::Neg => stack[sp - 1] = stack[sp - 1].neg(),
                Instr::Call(f) => stack[sp - 1] = stack[sp - 1].apply(f)?,
                Instr::Bin(op) => {
                    sp -= 1;
                    stack[sp - 1] = op.apply(stack[sp - 1], stack[sp])?;
                }
            }
        }
        Ok(stack[0])
    }

    /// Generic evaluation; `args` must have at least `arity` entries.
    pub fn eval_scalar<S: Scalar>(&self, args: &[S]) -> Result<S, Fault> {
        assert!(args.len() >= self.arity, "program expects {} arguments", self.arity);
        if self.depth <= INLINE_STACK {
            let mut stack = [S::constant(0.0); INLINE_STACK];
            self.run(args, &mut stack)
        } else {
            let mut stack = vec![S::constant(0.0); self.depth];
            self.run(args, &mut stack)
        }
    }

    pub fn eval(&self, args: &[f64]) -> Result<f64, Fault> {
        self.eval_scalar(args)
    }

    /// Value and partial derivative with respect to argument `seed`.
    pub fn eval_dual(&self, args: &[f64], seed: usize) -> Result<(f64, f64), Fault> {
        let mut duals = [Dual::new(0.0, 0.0); INLINE_STACK];
        let mut heap;
        let slice: &mut [Dual] = if args.len() <= INLINE_STACK {
            &mut duals[..args.len()]
        } else {
            heap = vec![Dual::new(0.0, 0.0); args.len()];
            &mut heap
        };
        for (k, (d, &a)) in slice.iter_mut().zip(args).enumerate() {
            *d = Dual::new(a, if k == seed { 1.0 } else { 0.0 });
        }
        let r = self.eval_scalar(slice)?;
        Ok((r.v, r.d))
    }
}
