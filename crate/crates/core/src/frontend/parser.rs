use std::collections::HashMap;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::types::{binary_result, deref_result, is_lvalue, unary_result};
use super::{Diagnostic, DiagnosticKind, ParseError};

#[derive(Clone, Debug)]
struct Signature {
    ret: Type,
    params: Vec<Type>,
}

struct FnState {
    vars: Vec<VarInfo>,
    scopes: Vec<HashMap<String, VarId>>,
    ret: Type,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    next_id: u32,
    sigs: HashMap<String, Signature>,
    diags: Vec<Diagnostic>,
    func: Option<FnState>,
}

/// Parse and type-check a MiniC translation unit.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = tokenize(src).map_err(|d| ParseError { diagnostics: vec![d] })?;
    let mut p = Parser {
        toks,
        pos: 0,
        next_id: 0,
        sigs: HashMap::new(),
        diags: Vec::new(),
        func: None,
    };
    p.collect_signatures()
        .map_err(|d| ParseError { diagnostics: vec![d] })?;
    let mut functions = Vec::new();
    while p.peek() != &Tok::Eof {
        match p.function() {
            Ok(f) => functions.push(f),
            Err(d) => {
                p.diags.push(d);
                return Err(ParseError { diagnostics: p.diags });
            }
        }
    }
    if !p.diags.is_empty() {
        return Err(ParseError { diagnostics: p.diags });
    }
    Ok(Program {
        functions,
        next_id: p.next_id,
    })
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek() == &tok {
            Ok(self.advance().span)
        } else {
            Err(Diagnostic::syntax(
                self.span(),
                format!("expected {}, found {}", tok.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.advance().span;
                Ok((s, sp))
            }
            other => Err(Diagnostic::syntax(
                self.span(),
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn type_error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic {
            kind: DiagnosticKind::Type,
            span,
            message: msg.into(),
        });
    }

    fn fs(&mut self) -> &mut FnState {
        self.func.as_mut().expect("inside a function")
    }

    // ---- signatures ----------------------------------------------------

    fn collect_signatures(&mut self) -> PResult<()> {
        let start = self.pos;
        while self.peek() != &Tok::Eof {
            let span = self.span();
            let ret = self.ret_type()?;
            let (name, _) = self.ident()?;
            let params = self.param_list()?;
            if self.sigs.contains_key(&name) {
                return Err(Diagnostic {
                    kind: DiagnosticKind::DuplicateDeclaration,
                    span,
                    message: format!("duplicate declaration of function `{name}`"),
                });
            }
            self.sigs.insert(
                name,
                Signature {
                    ret,
                    params: params.iter().map(|p| p.1).collect(),
                },
            );
            // skip body
            self.expect(Tok::LBrace)?;
            let mut depth = 1;
            while depth > 0 {
                match self.advance().tok {
                    Tok::LBrace => depth += 1,
                    Tok::RBrace => depth -= 1,
                    Tok::Eof => return Err(Diagnostic::syntax(self.span(), "unbalanced braces")),
                    _ => {}
                }
            }
        }
        self.pos = start;
        Ok(())
    }

    fn ret_type(&mut self) -> PResult<Type> {
        match self.peek() {
            Tok::KwVoid => {
                self.advance();
                Ok(Type::Void)
            }
            Tok::KwInt => {
                self.advance();
                Ok(if self.eat(&Tok::Star) { Type::IntPtr } else { Type::Int })
            }
            other => Err(Diagnostic::syntax(
                self.span(),
                format!("expected a type, found {}", other.describe()),
            )),
        }
    }

    fn param_list(&mut self) -> PResult<Vec<(String, Type, Span)>> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek() == &Tok::KwVoid && self.peek_at(1) == &Tok::RParen {
            self.advance();
        }
        if self.peek() != &Tok::RParen {
            loop {
                let sp = self.expect(Tok::KwInt)?;
                let mut ty = if self.eat(&Tok::Star) { Type::IntPtr } else { Type::Int };
                let (name, _) = self.ident()?;
                if self.eat(&Tok::LBracket) {
                    self.expect(Tok::RBracket)?;
                    ty = Type::IntPtr;
                }
                params.push((name, ty, sp));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(params)
    }

    // ---- functions & statements ---------------------------------------

    fn function(&mut self) -> PResult<Function> {
        let span = self.span();
        let id = self.id();
        let ret = self.ret_type()?;
        let (name, _) = self.ident()?;
        let params = self.param_list()?;
        self.func = Some(FnState {
            vars: Vec::new(),
            scopes: vec![HashMap::new()],
            ret,
        });
        let mut param_ids = Vec::new();
        for (pname, ty, psp) in params {
            let decl = self.id();
            let v = self.declare(&pname, ty, None, true, decl, psp);
            param_ids.push(v);
        }
        let body = self.block_in_current_scope()?;
        let fs = self.func.take().expect("function state");
        Ok(Function {
            id,
            span,
            name,
            ret,
            params: param_ids,
            vars: fs.vars,
            body,
        })
    }

    fn declare(
        &mut self,
        name: &str,
        ty: Type,
        array_len: Option<u32>,
        is_param: bool,
        decl: NodeId,
        span: Span,
    ) -> VarId {
        let fs = self.fs();
        let vid = VarId(fs.vars.len() as u32);
        fs.vars.push(VarInfo {
            name: name.to_string(),
            ty,
            array_len,
            is_param,
            decl,
        });
        let scope = fs.scopes.last_mut().expect("scope");
        if scope.insert(name.to_string(), vid).is_some() {
            self.diags.push(Diagnostic {
                kind: DiagnosticKind::DuplicateDeclaration,
                span,
                message: format!("duplicate declaration of `{name}`"),
            });
        }
        vid
    }

    fn lookup(&self, name: &str) -> Option<VarId> {
        let fs = self.func.as_ref()?;
        fs.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn var_info(&self, v: VarId) -> &VarInfo {
        &self.func.as_ref().expect("function").vars[v.0 as usize]
    }

    fn block_in_current_scope(&mut self) -> PResult<Block> {
        let span = self.expect(Tok::LBrace)?;
        let id = self.id();
        let mut stmts = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.peek() == &Tok::Eof {
                return Err(Diagnostic::syntax(self.span(), "expected `}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.advance();
        Ok(Block { id, span, stmts })
    }

    fn scoped_block(&mut self) -> PResult<Block> {
        self.fs().scopes.push(HashMap::new());
        let b = self.block_in_current_scope();
        self.fs().scopes.pop();
        b
    }

    /// Body of `if`/`while`: a braced block, or a single statement wrapped
    /// into one.
    fn body(&mut self) -> PResult<Block> {
        if self.peek() == &Tok::LBrace {
            return self.scoped_block();
        }
        let span = self.span();
        let id = self.id();
        self.fs().scopes.push(HashMap::new());
        let s = self.stmt();
        self.fs().scopes.pop();
        Ok(Block {
            id,
            span,
            stmts: vec![s?],
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LBrace => {
                let id = self.id();
                let b = self.scoped_block()?;
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Block(b),
                })
            }
            Tok::Semi => {
                let id = self.id();
                self.advance();
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Empty,
                })
            }
            Tok::KwTrap if self.peek_at(1) == &Tok::Semi => {
                let id = self.id();
                self.advance();
                self.advance();
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Trap,
                })
            }
            Tok::KwInt => self.decl(),
            Tok::KwIf => {
                let id = self.id();
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                self.require(&cond, Type::Int, "condition must be int");
                let then_branch = self.body()?;
                let else_branch = if self.eat(&Tok::KwElse) {
                    Some(self.body()?)
                } else {
                    None
                };
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                })
            }
            Tok::KwWhile => {
                let id = self.id();
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                self.require(&cond, Type::Int, "condition must be int");
                let body = self.body()?;
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::While { cond, body },
                })
            }
            Tok::KwSwitch => self.switch(),
            Tok::KwReturn => {
                let id = self.id();
                self.advance();
                let value = if self.peek() == &Tok::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi)?;
                let ret = self.fs().ret;
                match (&value, ret) {
                    (None, Type::Void) => {}
                    (None, _) => self.type_error(span, "missing return value"),
                    (Some(v), Type::Void) => {
                        let sp = v.span;
                        self.type_error(sp, "void function returns a value")
                    }
                    (Some(v), t) if v.ty != t => {
                        let (sp, ty) = (v.span, v.ty);
                        self.type_error(
                            sp,
                            format!("returning `{}` from function returning `{}`", ty.name(), t.name()),
                        )
                    }
                    _ => {}
                }
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Return(value),
                })
            }
            Tok::KwRead => {
                let id = self.id();
                self.advance();
                let target = self.expr()?;
                self.expect(Tok::Semi)?;
                if !self.is_lvalue(&target) || target.ty != Type::Int {
                    self.type_error(target.span, "read target must be an int location");
                }
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Read(target),
                })
            }
            Tok::KwPrint => {
                let id = self.id();
                self.advance();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                self.require(&value, Type::Int, "print expects an int");
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Print(value),
                })
            }
            _ => {
                let id = self.id();
                let e = self.expr()?;
                if self.eat(&Tok::Assign) {
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    if !self.is_lvalue(&e) {
                        self.type_error(e.span, "assignment to non-lvalue");
                    } else if value.ty != e.ty {
                        self.type_error(
                            value.span,
                            format!("cannot assign `{}` to `{}`", value.ty.name(), e.ty.name()),
                        );
                    }
                    return Ok(Stmt {
                        id,
                        span,
                        kind: StmtKind::Assign { target: e, value },
                    });
                }
                self.expect(Tok::Semi)?;
                Ok(Stmt {
                    id,
                    span,
                    kind: StmtKind::Expr(e),
                })
            }
        }
    }

    fn is_lvalue(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Var(v) => !self.var_info(*v).is_array(),
            ExprKind::Deref(_) => true,
            _ => false,
        }
    }

    fn require(&mut self, e: &Expr, ty: Type, msg: &str) {
        if e.ty != ty {
            self.type_error(e.span, msg.to_string());
        }
    }

    fn decl(&mut self) -> PResult<Stmt> {
        let span = self.expect(Tok::KwInt)?;
        let id = self.id();
        let ty = if self.eat(&Tok::Star) { Type::IntPtr } else { Type::Int };
        let (name, nsp) = self.ident()?;
        let mut array_len = None;
        if ty == Type::Int && self.eat(&Tok::LBracket) {
            let len = match self.advance().tok {
                Tok::Int(n) if n > 0 && n <= u32::MAX as u64 => n as u32,
                _ => return Err(Diagnostic::syntax(nsp, "array length must be a positive integer")),
            };
            self.expect(Tok::RBracket)?;
            array_len = Some(len);
        }
        let var_ty = if array_len.is_some() { Type::IntPtr } else { ty };
        // Initializer is resolved before the name enters scope.
        let init = if self.eat(&Tok::Assign) {
            let e = self.expr()?;
            if array_len.is_some() {
                self.type_error(e.span, "arrays cannot have initializers");
            } else if e.ty != var_ty {
                self.type_error(
                    e.span,
                    format!("cannot initialize `{}` with `{}`", var_ty.name(), e.ty.name()),
                );
            }
            Some(e)
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        let var = self.declare(&name, var_ty, array_len, false, id, nsp);
        Ok(Stmt {
            id,
            span,
            kind: StmtKind::Decl { var, init },
        })
    }

    fn switch(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let id = self.id();
        self.advance();
        self.expect(Tok::LParen)?;
        let scrutinee = self.expr()?;
        self.expect(Tok::RParen)?;
        self.require(&scrutinee, Type::Int, "switch value must be int");
        self.expect(Tok::LBrace)?;
        let mut cases: Vec<Case> = Vec::new();
        let mut default = None;
        loop {
            let csp = self.span();
            match self.peek() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::KwCase => {
                    let cid = self.id();
                    self.advance();
                    let neg = self.eat(&Tok::Minus);
                    let value = match self.advance().tok {
                        Tok::Int(v) => literal_value(v, neg)
                            .ok_or_else(|| Diagnostic::syntax(csp, "case label out of range"))?,
                        _ => return Err(Diagnostic::syntax(csp, "case label must be an integer literal")),
                    };
                    self.expect(Tok::Colon)?;
                    if cases.iter().any(|c| c.value == value) {
                        self.diags.push(Diagnostic {
                            kind: DiagnosticKind::DuplicateDeclaration,
                            span: csp,
                            message: format!("duplicate case label {value}"),
                        });
                    }
                    let body = self.case_body(csp)?;
                    cases.push(Case {
                        id: cid,
                        span: csp,
                        value,
                        body,
                    });
                }
                Tok::KwDefault => {
                    self.advance();
                    self.expect(Tok::Colon)?;
                    if default.is_some() {
                        self.diags.push(Diagnostic {
                            kind: DiagnosticKind::DuplicateDeclaration,
                            span: csp,
                            message: "duplicate default label".into(),
                        });
                    }
                    default = Some(self.case_body(csp)?);
                }
                other => {
                    return Err(Diagnostic::syntax(
                        csp,
                        format!("expected `case`, `default` or `}}`, found {}", other.describe()),
                    ))
                }
            }
        }
        Ok(Stmt {
            id,
            span,
            kind: StmtKind::Switch {
                scrutinee,
                cases,
                default,
            },
        })
    }

    fn case_body(&mut self, span: Span) -> PResult<Block> {
        let id = self.id();
        self.fs().scopes.push(HashMap::new());
        let mut stmts = Vec::new();
        let res = loop {
            match self.peek() {
                Tok::KwCase | Tok::KwDefault | Tok::RBrace => break Ok(()),
                Tok::Eof => break Err(Diagnostic::syntax(self.span(), "unterminated switch")),
                _ => match self.stmt() {
                    Ok(s) => stmts.push(s),
                    Err(e) => break Err(e),
                },
            }
        };
        self.fs().scopes.pop();
        res?;
        Ok(Block { id, span, stmts })
    }

    // ---- expressions ---------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop_of(tok: &Tok) -> Option<BinOp> {
        Some(match tok {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Pipe => BinOp::BitOr,
            Tok::Caret => BinOp::BitXor,
            Tok::Amp => BinOp::BitAnd,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Shl => BinOp::Shl,
            Tok::Shr => BinOp::Shr,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = Self::binop_of(self.peek()) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            lhs = self.make_binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn make_binary(&mut self, op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        let span = lhs.span;
        let ty = match binary_result(op, lhs.ty, rhs.ty) {
            Ok(t) => t,
            Err(msg) => {
                self.type_error(span, msg);
                Type::Int
            }
        };
        Expr {
            id: self.id(),
            span,
            ty,
            kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        }
    }

    fn make_unary(&mut self, op: UnOp, operand: Expr, span: Span) -> Expr {
        let ty = match unary_result(op, operand.ty) {
            Ok(t) => t,
            Err(msg) => {
                self.type_error(span, msg);
                Type::Int
            }
        };
        if op.is_inc_dec() && !self.is_lvalue(&operand) {
            self.type_error(span, "increment/decrement needs an lvalue");
        }
        Expr {
            id: self.id(),
            span,
            ty,
            kind: ExprKind::Unary(op, Box::new(operand)),
        }
    }

    fn make_deref(&mut self, operand: Expr, span: Span) -> Expr {
        let ty = match deref_result(operand.ty) {
            Ok(t) => t,
            Err(msg) => {
                self.type_error(span, msg);
                Type::Int
            }
        };
        Expr {
            id: self.id(),
            span,
            ty,
            kind: ExprKind::Deref(Box::new(operand)),
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Minus => {
                self.advance();
                if let Tok::Int(v) = *self.peek() {
                    // `-<int>` is a negative literal, unless a postfix operator
                    // binds the literal first.
                    if !matches!(self.peek_at(1), Tok::LBracket | Tok::PlusPlus | Tok::MinusMinus) {
                        self.advance();
                        let value = literal_value(v, true)
                            .ok_or_else(|| Diagnostic::syntax(span, "integer literal too large"))?;
                        return Ok(Expr {
                            id: self.id(),
                            span,
                            ty: Type::Int,
                            kind: ExprKind::Lit(value),
                        });
                    }
                }
                let e = self.unary()?;
                Ok(self.make_unary(UnOp::Neg, e, span))
            }
            Tok::Bang => {
                self.advance();
                let e = self.unary()?;
                Ok(self.make_unary(UnOp::Not, e, span))
            }
            Tok::PlusPlus => {
                self.advance();
                let e = self.unary()?;
                Ok(self.make_unary(UnOp::PreInc, e, span))
            }
            Tok::MinusMinus => {
                self.advance();
                let e = self.unary()?;
                Ok(self.make_unary(UnOp::PreDec, e, span))
            }
            Tok::Star => {
                self.advance();
                let e = self.unary()?;
                Ok(self.make_deref(e, span))
            }
            Tok::KwAbs => {
                self.advance();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                let e = self.make_unary(UnOp::Abs, e, span);
                self.postfix_ops(e)
            }
            _ => {
                let e = self.primary()?;
                self.postfix_ops(e)
            }
        }
    }

    fn postfix_ops(&mut self, mut e: Expr) -> PResult<Expr> {
        loop {
            let span = e.span;
            match self.peek() {
                Tok::LBracket => {
                    self.advance();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    let addr = self.make_binary(BinOp::Add, e, idx);
                    e = self.make_deref(addr, span);
                }
                Tok::PlusPlus => {
                    self.advance();
                    e = self.make_unary(UnOp::PostInc, e, span);
                }
                Tok::MinusMinus => {
                    self.advance();
                    e = self.make_unary(UnOp::PostDec, e, span);
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                let value = literal_value(v, false)
                    .ok_or_else(|| Diagnostic::syntax(span, "integer literal too large"))?;
                Ok(Expr {
                    id: self.id(),
                    span,
                    ty: Type::Int,
                    kind: ExprKind::Lit(value),
                })
            }
            Tok::KwTrap => {
                self.advance();
                Ok(Expr {
                    id: self.id(),
                    span,
                    ty: Type::Int,
                    kind: ExprKind::Trap,
                })
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance();
                if self.peek() == &Tok::LParen {
                    return self.call(name, span);
                }
                match self.lookup(&name) {
                    Some(v) => {
                        let ty = self.var_info(v).ty;
                        Ok(Expr {
                            id: self.id(),
                            span,
                            ty,
                            kind: ExprKind::Var(v),
                        })
                    }
                    None => Err(Diagnostic {
                        kind: DiagnosticKind::Type,
                        span,
                        message: format!("undeclared identifier `{name}`"),
                    }),
                }
            }
            other => Err(Diagnostic::syntax(
                span,
                format!("expected expression, found {}", other.describe()),
            )),
        }
    }

    fn call(&mut self, name: String, span: Span) -> PResult<Expr> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let ty = match self.sigs.get(&name).cloned() {
            None => {
                return Err(Diagnostic {
                    kind: DiagnosticKind::Type,
                    span,
                    message: format!("call to undeclared function `{name}`"),
                })
            }
            Some(sig) => {
                if sig.params.len() != args.len() {
                    self.type_error(
                        span,
                        format!(
                            "`{name}` expects {} arguments, got {}",
                            sig.params.len(),
                            args.len()
                        ),
                    );
                } else {
                    for (i, (a, t)) in args.iter().zip(&sig.params).enumerate() {
                        if a.ty != *t {
                            let sp = a.span;
                            self.type_error(sp, format!("argument {} of `{name}` must be `{}`", i + 1, t.name()));
                        }
                    }
                }
                sig.ret
            }
        };
        Ok(Expr {
            id: self.id(),
            span,
            ty,
            kind: ExprKind::Call { callee: name, args },
        })
    }
}

fn literal_value(v: u64, negative: bool) -> Option<i64> {
    if negative {
        if v == 1u64 << 63 {
            Some(i64::MIN)
        } else {
            i64::try_from(v).ok().map(|x| -x)
        }
    } else {
        i64::try_from(v).ok()
    }
}

/// Check a whole program against the typing rules without reparsing.
/// Used to validate mutated programs.
pub fn check_program(program: &Program) -> Result<(), String> {
    let sigs: HashMap<&str, (&Type, Vec<Type>)> = program
        .functions
        .iter()
        .map(|f| {
            (
                f.name.as_str(),
                (&f.ret, f.params.iter().map(|p| f.var(*p).ty).collect()),
            )
        })
        .collect();
    for f in &program.functions {
        check_block(f, &f.body, &sigs)?;
    }
    Ok(())
}

type Sigs<'a> = HashMap<&'a str, (&'a Type, Vec<Type>)>;

fn check_block(f: &Function, b: &Block, sigs: &Sigs) -> Result<(), String> {
    for s in &b.stmts {
        check_stmt(f, s, sigs)?;
    }
    Ok(())
}

fn check_stmt(f: &Function, s: &Stmt, sigs: &Sigs) -> Result<(), String> {
    let int_expr = |e: &Expr| -> Result<(), String> {
        if check_expr(f, e, sigs)? != Type::Int {
            return Err(format!("expected int at {}", e.span));
        }
        Ok(())
    };
    match &s.kind {
        StmtKind::Decl { var, init } => {
            if let Some(e) = init {
                if check_expr(f, e, sigs)? != f.var(*var).ty {
                    return Err(format!("bad initializer at {}", e.span));
                }
            }
        }
        StmtKind::Assign { target, value } => {
            if !is_lvalue(f, target) || check_expr(f, target, sigs)? != check_expr(f, value, sigs)? {
                return Err(format!("bad assignment at {}", s.span));
            }
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            int_expr(cond)?;
            check_block(f, then_branch, sigs)?;
            if let Some(e) = else_branch {
                check_block(f, e, sigs)?;
            }
        }
        StmtKind::While { cond, body } => {
            int_expr(cond)?;
            check_block(f, body, sigs)?;
        }
        StmtKind::Switch {
            scrutinee,
            cases,
            default,
        } => {
            int_expr(scrutinee)?;
            for c in cases {
                check_block(f, &c.body, sigs)?;
            }
            if let Some(d) = default {
                check_block(f, d, sigs)?;
            }
        }
        StmtKind::Return(v) => match (v, f.ret) {
            (None, _) => {}
            (Some(e), t) => {
                if check_expr(f, e, sigs)? != t {
                    return Err(format!("bad return at {}", s.span));
                }
            }
        },
        StmtKind::Read(t) => {
            if !is_lvalue(f, t) {
                return Err(format!("bad read target at {}", s.span));
            }
            int_expr(t)?;
        }
        StmtKind::Print(e) => int_expr(e)?,
        StmtKind::Expr(e) => {
            check_expr(f, e, sigs)?;
        }
        StmtKind::Block(b) => check_block(f, b, sigs)?,
        StmtKind::Empty | StmtKind::Trap => {}
    }
    Ok(())
}

fn check_expr(f: &Function, e: &Expr, sigs: &Sigs) -> Result<Type, String> {
    let ty = match &e.kind {
        ExprKind::Lit(_) | ExprKind::Trap => Type::Int,
        ExprKind::Var(v) => f.var(*v).ty,
        ExprKind::Unary(op, x) => {
            let t = check_expr(f, x, sigs)?;
            if op.is_inc_dec() && !is_lvalue(f, x) {
                return Err(format!("inc/dec of non-lvalue at {}", e.span));
            }
            unary_result(*op, t)?
        }
        ExprKind::Binary(op, l, r) => {
            binary_result(*op, check_expr(f, l, sigs)?, check_expr(f, r, sigs)?)?
        }
        ExprKind::Deref(x) => deref_result(check_expr(f, x, sigs)?)?,
        ExprKind::Call { callee, args } => {
            let (ret, params) = sigs
                .get(callee.as_str())
                .ok_or_else(|| format!("unknown function {callee}"))?;
            if params.len() != args.len() {
                return Err(format!("arity mismatch at {}", e.span));
            }
            for (a, t) in args.iter().zip(params) {
                if check_expr(f, a, sigs)? != *t {
                    return Err(format!("argument type mismatch at {}", e.span));
                }
            }
            **ret
        }
    };
    if ty != e.ty {
        return Err(format!("stale type annotation at {}", e.span));
    }
    Ok(ty)
}
