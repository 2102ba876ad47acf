"""Recursive-descent parser for the MiniFrag grammar.

Syntax errors are E010; constructs the lexer recognizes but the subset
excludes (while, struct, preprocessor lines, arrays, ...) are E005 so the
repair prompt can name what to remove.  On error the parser resynchronizes
at the next statement boundary and keeps going, up to the diagnostic cap.
"""

from __future__ import annotations

from .diagnostics import MAX_DIAGNOSTICS, Diagnostic
from .tokens import FLOAT, IDENT, INT, KEYWORD, OP, PUNCT, Token
from .tokens import PRECISION_KEYWORDS, TYPE_KEYWORDS, UNSUPPORTED_KEYWORDS
from . import nodes as n

ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=")


class _ParseError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class ParseResult:
    def __init__(self, program: n.Program | None, diagnostics: list[Diagnostic]):
        self.program = program
        self.diagnostics = diagnostics

    @property
    def ok(self) -> bool:
        return self.program is not None and not self.diagnostics


def parse(tokens: list[Token]) -> ParseResult:
    return _Parser(tokens).parse_program()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers --

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def check(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            return False
        return text is None or tok.text == text

    def match(self, kind: str, text: str | None = None) -> Token | None:
        if self.check(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None, what: str = "") -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token(PUNCT, "", 1, 1)
            raise _ParseError(
                Diagnostic("E010", f"unexpected end of input, expected {what or text or kind}",
                           last.line, last.col)
            )
        if tok.kind != kind or (text is not None and tok.text != text):
            raise _ParseError(
                Diagnostic("E010",
                           f"unexpected token {tok.text!r}, expected {what or text or kind}",
                           tok.line, tok.col)
            )
        return self.advance()

    def error(self, message: str, tok: Token | None = None, code: str = "E010") -> _ParseError:
        tok = tok or self.peek() or (self.tokens[-1] if self.tokens else Token(PUNCT, "", 1, 1))
        return _ParseError(Diagnostic(code, message, tok.line, tok.col))

    def pos(self, tok: Token) -> n.Pos:
        return n.Pos(tok.line, tok.col)

    def record(self, diag: Diagnostic) -> None:
        if len(self.diagnostics) < MAX_DIAGNOSTICS:
            self.diagnostics.append(diag)

    def full(self) -> bool:
        return len(self.diagnostics) >= MAX_DIAGNOSTICS

    # -- recovery --

    def sync_statement(self) -> None:
        """Skip forward to just past the next ';', or stop at a brace."""
        while not self.at_end():
            tok = self.peek()
            if tok.kind == PUNCT and tok.text == ";":
                self.advance()
                return
            if tok.kind == PUNCT and tok.text in ("{", "}"):
                return
            self.advance()

    def sync_toplevel(self) -> None:
        """Skip to the end of the current top-level item (past ';' or a
        matched closing brace)."""
        depth = 0
        while not self.at_end():
            tok = self.advance()
            if tok.kind == PUNCT:
                if tok.text == "{":
                    depth += 1
                elif tok.text == "}":
                    depth -= 1
                    if depth <= 0:
                        return
                elif tok.text == ";" and depth == 0:
                    return

    # -- grammar: top level --

    def parse_program(self) -> ParseResult:
        has_precision = False
        globals_: list[n.GlobalDecl] = []
        functions: list[n.FunctionDef] = []

        while not self.at_end() and not self.full():
            tok = self.peek()
            try:
                if tok.kind == KEYWORD and tok.text == "precision":
                    self.parse_precision_decl()
                    has_precision = True
                elif tok.kind == KEYWORD and tok.text in ("uniform", "varying"):
                    globals_.append(self.parse_global_decl())
                elif tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS:
                    functions.append(self.parse_function())
                elif tok.kind == PUNCT and tok.text == "#":
                    raise self.error("unsupported construct: preprocessor directive", tok,
                                     code="E005")
                elif tok.kind == KEYWORD and tok.text in UNSUPPORTED_KEYWORDS:
                    raise self.error(f"unsupported construct: {tok.text}", tok, code="E005")
                elif tok.kind == KEYWORD and tok.text == "const":
                    raise self.error(
                        "unsupported construct: global constant (declare it inside a function)",
                        tok, code="E005")
                else:
                    raise self.error(
                        f"unexpected token {tok.text!r} at top level "
                        "(expected a declaration or function)", tok)
            except _ParseError as err:
                self.record(err.diag)
                self.sync_toplevel()

        program = n.Program(has_precision_decl=has_precision, globals=globals_,
                            functions=functions)
        if self.diagnostics:
            return ParseResult(None, self.diagnostics)
        return ParseResult(program, [])

    def parse_precision_decl(self) -> None:
        self.expect(KEYWORD, "precision")
        tok = self.peek()
        if tok is None or tok.text not in PRECISION_KEYWORDS:
            raise self.error("expected a precision qualifier", tok)
        self.advance()
        tok = self.peek()
        if tok is None or tok.kind != KEYWORD or tok.text not in TYPE_KEYWORDS:
            raise self.error("expected a type after the precision qualifier", tok)
        self.advance()
        self.expect(PUNCT, ";")

    def skip_precision_qualifier(self) -> None:
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.text in PRECISION_KEYWORDS:
            self.advance()

    def parse_type(self, what: str = "type") -> Token:
        tok = self.peek()
        if tok is None or tok.kind != KEYWORD or tok.text not in TYPE_KEYWORDS:
            raise self.error(f"expected {what}", tok)
        return self.advance()

    def parse_global_decl(self) -> n.GlobalDecl:
        qual = self.advance()  # uniform | varying
        self.skip_precision_qualifier()
        type_tok = self.parse_type("a type after " + qual.text)
        name = self.expect(IDENT, what="a name")
        self.check_no_array_declarator(name)
        self.expect(PUNCT, ";")
        return n.GlobalDecl(qual.text, type_tok.text, name.text, pos=self.pos(qual))

    def check_no_array_declarator(self, name: Token) -> None:
        if self.check(PUNCT, "["):
            raise self.error("unsupported construct: array declarator", self.peek(), code="E005")

    def parse_function(self) -> n.FunctionDef:
        ret = self.advance()
        name = self.expect(IDENT, what="a function name")
        self.expect(PUNCT, "(", what="'(' (only functions may follow a type at top level)")
        params: list[n.Param] = []
        if not self.check(PUNCT, ")"):
            if self.check(KEYWORD, "void") and self.peek(1) and self.peek(1).text == ")":
                self.advance()  # f(void)
            else:
                while True:
                    self.skip_precision_qualifier()
                    ptype = self.parse_type("a parameter type")
                    pname = self.expect(IDENT, what="a parameter name")
                    self.check_no_array_declarator(pname)
                    params.append(n.Param(ptype.text, pname.text, pos=self.pos(ptype)))
                    if not self.match(PUNCT, ","):
                        break
        self.expect(PUNCT, ")")
        body = self.parse_block()
        return n.FunctionDef(ret.text, name.text, params, body, pos=self.pos(ret))

    # -- grammar: statements --

    def parse_block(self) -> n.Block:
        open_tok = self.expect(PUNCT, "{")
        stmts: list = []
        while not self.check(PUNCT, "}"):
            if self.at_end():
                raise self.error("unexpected end of input, expected '}'", open_tok)
            if self.full():
                # Cap reached: swallow the rest of the block silently.
                self.sync_toplevel()
                return n.Block(stmts, pos=self.pos(open_tok))
            try:
                stmts.append(self.parse_statement())
            except _ParseError as err:
                self.record(err.diag)
                self.sync_statement()
        self.expect(PUNCT, "}")
        return n.Block(stmts, pos=self.pos(open_tok))

    def parse_statement(self) -> n.Stmt:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")

        if tok.kind == PUNCT and tok.text == "{":
            return self.parse_block()
        if tok.kind == PUNCT and tok.text == "#":
            raise self.error("unsupported construct: preprocessor directive", tok, code="E005")
        if tok.kind == KEYWORD:
            if tok.text in UNSUPPORTED_KEYWORDS:
                raise self.error(f"unsupported construct: {tok.text}", tok, code="E005")
            if tok.text == "if":
                return self.parse_if()
            if tok.text == "for":
                return self.parse_for()
            if tok.text == "return":
                return self.parse_return()
            if tok.text in TYPE_KEYWORDS:
                nxt = self.peek(1)
                if nxt is not None and nxt.kind == PUNCT and nxt.text == "(":
                    # constructor call in expression-statement position
                    expr = self.parse_expr()
                    self.expect(PUNCT, ";", what="';' after expression")
                    return n.ExprStmt(expr, pos=self.pos(tok))
                return self.parse_var_decl()
            if tok.text == "const" or tok.text in PRECISION_KEYWORDS:
                return self.parse_var_decl()

        # assignment: ident [. components] assign-op ...
        if tok.kind == IDENT:
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == OP and nxt.text in ASSIGN_OPS:
                return self.parse_assign()
            if (
                nxt is not None and nxt.kind == PUNCT and nxt.text == "."
                and self.peek(2) is not None and self.peek(2).kind == IDENT
                and self.peek(3) is not None and self.peek(3).kind == OP
                and self.peek(3).text in ASSIGN_OPS
            ):
                return self.parse_assign()
            if nxt is not None and nxt.kind == OP and nxt.text in ("++", "--"):
                raise self.error(
                    "unsupported construct: '++'/'--' outside a for-loop header", nxt,
                    code="E005")
            if nxt is not None and nxt.kind == PUNCT and nxt.text == "[":
                raise self.error("unsupported construct: array indexing", nxt, code="E005")

        expr = self.parse_expr()
        self.expect(PUNCT, ";", what="';' after expression")
        return n.ExprStmt(expr, pos=self.pos(tok))

    def parse_var_decl(self) -> n.VarDecl:
        first = self.peek()
        const = self.match(KEYWORD, "const") is not None
        self.skip_precision_qualifier()
        type_tok = self.parse_type("a type in declaration")
        if type_tok.text == "void":
            raise self.error("'void' is not a variable type", type_tok)
        name = self.expect(IDENT, what="a variable name")
        self.check_no_array_declarator(name)
        init = None
        if self.match(OP, "="):
            init = self.parse_expr()
        if self.check(PUNCT, ","):
            raise self.error("one declarator per statement", self.peek())
        self.expect(PUNCT, ";", what="';' after declaration")
        return n.VarDecl(type_tok.text, name.text, init, const, pos=self.pos(first))

    def parse_assign(self) -> n.Assign:
        name = self.expect(IDENT)
        swiz = None
        if self.match(PUNCT, "."):
            comp = self.expect(IDENT, what="swizzle components")
            swiz = comp.text
        op_tok = self.advance()
        value = self.parse_expr()
        self.expect(PUNCT, ";", what="';' after assignment")
        return n.Assign(name.text, swiz, op_tok.text, value, pos=self.pos(name))

    def as_block(self, stmt: n.Stmt) -> n.Block:
        """If/for bodies are normalized to blocks; `if (c) s;` and
        `if (c) { s; }` parse identically and dangling-else stays unambiguous."""
        if isinstance(stmt, n.Block):
            return stmt
        return n.Block([stmt], pos=stmt.pos)

    def parse_if(self) -> n.If:
        kw = self.expect(KEYWORD, "if")
        self.expect(PUNCT, "(")
        cond = self.parse_expr()
        self.expect(PUNCT, ")")
        then = self.as_block(self.parse_statement())
        other: n.Stmt | None = None
        if self.match(KEYWORD, "else"):
            branch = self.parse_statement()
            # `else if` chains stay flat; anything else becomes a block.
            other = branch if isinstance(branch, n.If) else self.as_block(branch)
        return n.If(cond, then, other, pos=self.pos(kw))

    def parse_int_literal(self, what: str) -> int:
        neg = self.match(OP, "-") is not None
        tok = self.peek()
        if tok is None or tok.kind != INT:
            raise self.error(
                f"unsupported construct: non-constant {what} (an integer literal is required)",
                tok, code="E005")
        self.advance()
        value = int(tok.text)
        return -value if neg else value

    def parse_for(self) -> n.For:
        kw = self.expect(KEYWORD, "for")
        self.expect(PUNCT, "(")
        self.expect(KEYWORD, "int", what="'int' (the loop variable must be an int)")
        var = self.expect(IDENT, what="a loop variable name")
        self.expect(OP, "=")
        start = self.parse_int_literal("for-loop start")
        self.expect(PUNCT, ";")
        cond_var = self.expect(IDENT, what="the loop variable in the condition")
        if cond_var.text != var.text:
            raise self.error("for-loop condition must test the loop variable", cond_var,
                             code="E005")
        cmp_tok = self.peek()
        if cmp_tok is None or cmp_tok.kind != OP or cmp_tok.text not in ("<", "<="):
            raise self.error("for-loop condition must use '<' or '<='", cmp_tok, code="E005")
        self.advance()
        bound = self.parse_int_literal("for-loop bound")
        self.expect(PUNCT, ";")
        update = self.parse_for_update(var.text)
        self.expect(PUNCT, ")")
        body = self.as_block(self.parse_statement())
        return n.For(var.text, start, cmp_tok.text, bound, update, body, pos=self.pos(kw))

    def parse_for_update(self, loop_var: str) -> n.ForUpdate:
        var = self.expect(IDENT, what="the loop variable in the update")
        if var.text != loop_var:
            raise self.error("for-loop update must modify the loop variable", var, code="E005")
        op_tok = self.peek()
        if op_tok is not None and op_tok.kind == OP and op_tok.text in ("++", "--"):
            self.advance()
            return n.ForUpdate(var.text, op_tok.text, 1, pos=self.pos(var))
        if op_tok is not None and op_tok.kind == OP and op_tok.text in ("+=", "-="):
            self.advance()
            amount_tok = self.peek()
            if amount_tok is None or amount_tok.kind != INT:
                raise self.error(
                    "unsupported construct: non-constant for-loop step "
                    "(an integer literal is required)", amount_tok, code="E005")
            self.advance()
            return n.ForUpdate(var.text, op_tok.text, int(amount_tok.text), pos=self.pos(var))
        raise self.error("for-loop update must be '++', '--', '+= N' or '-= N'", op_tok,
                         code="E005")

    def parse_return(self) -> n.Return:
        kw = self.expect(KEYWORD, "return")
        value = None
        if not self.check(PUNCT, ";"):
            value = self.parse_expr()
        self.expect(PUNCT, ";", what="';' after return")
        return n.Return(value, pos=self.pos(kw))

    # -- grammar: expressions (C precedence) --

    def parse_expr(self) -> n.Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> n.Expr:
        cond = self.parse_or()
        if self.match(OP, "?"):
            then = self.parse_ternary()
            self.expect(OP, ":", what="':' in conditional expression")
            other = self.parse_ternary()
            return n.Ternary(cond, then, other, pos=cond.pos)
        return cond

    def _binary_level(self, ops: tuple, next_level) -> n.Expr:
        left = next_level()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != OP or tok.text not in ops:
                return left
            self.advance()
            right = next_level()
            left = n.Binary(tok.text, left, right, pos=left.pos)

    def parse_or(self) -> n.Expr:
        return self._binary_level(("||",), self.parse_and)

    def parse_and(self) -> n.Expr:
        return self._binary_level(("&&",), self.parse_equality)

    def parse_equality(self) -> n.Expr:
        return self._binary_level(("==", "!="), self.parse_relational)

    def parse_relational(self) -> n.Expr:
        return self._binary_level(("<", ">", "<=", ">="), self.parse_additive)

    def parse_additive(self) -> n.Expr:
        return self._binary_level(("+", "-"), self.parse_multiplicative)

    def parse_multiplicative(self) -> n.Expr:
        return self._binary_level(("*", "/"), self.parse_unary)

    def parse_unary(self) -> n.Expr:
        tok = self.peek()
        if tok is not None and tok.kind == OP and tok.text in ("-", "!", "+"):
            self.advance()
            operand = self.parse_unary()
            if tok.text == "+":
                return operand
            return n.Unary(tok.text, operand, pos=self.pos(tok))
        if tok is not None and tok.kind == OP and tok.text in ("++", "--"):
            raise self.error("unsupported construct: '++'/'--' outside a for-loop header",
                             tok, code="E005")
        return self.parse_postfix()

    def parse_postfix(self) -> n.Expr:
        expr = self.parse_primary()
        while True:
            if self.check(PUNCT, "."):
                dot = self.advance()
                comp = self.peek()
                if comp is None or comp.kind != IDENT:
                    raise self.error("expected swizzle components after '.'", comp or dot)
                self.advance()
                expr = n.Swizzle(expr, comp.text, pos=self.pos(comp))
            elif self.check(PUNCT, "["):
                raise self.error("unsupported construct: array indexing", self.peek(),
                                 code="E005")
            else:
                return expr

    def parse_args(self) -> list:
        args: list = []
        self.expect(PUNCT, "(")
        if not self.check(PUNCT, ")"):
            while True:
                args.append(self.parse_expr())
                if not self.match(PUNCT, ","):
                    break
        self.expect(PUNCT, ")")
        return args

    def parse_primary(self) -> n.Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input in expression")

        if tok.kind == FLOAT:
            self.advance()
            return n.FloatLit(float(tok.text), tok.text, pos=self.pos(tok))
        if tok.kind == INT:
            self.advance()
            return n.IntLit(int(tok.text), pos=self.pos(tok))
        if tok.kind == KEYWORD and tok.text in ("true", "false"):
            self.advance()
            return n.BoolLit(tok.text == "true", pos=self.pos(tok))
        if tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS:
            if self.peek(1) is not None and self.peek(1).kind == PUNCT and self.peek(1).text == "(":
                self.advance()
                args = self.parse_args()
                return n.Call(tok.text, args, pos=self.pos(tok))
            raise self.error(f"unexpected type keyword {tok.text!r} in expression", tok)
        if tok.kind == KEYWORD and tok.text in UNSUPPORTED_KEYWORDS:
            raise self.error(f"unsupported construct: {tok.text}", tok, code="E005")
        if tok.kind == IDENT:
            if self.peek(1) is not None and self.peek(1).kind == PUNCT and self.peek(1).text == "(":
                self.advance()
                args = self.parse_args()
                return n.Call(tok.text, args, pos=self.pos(tok))
            self.advance()
            return n.VarRef(tok.text, pos=self.pos(tok))
        if tok.kind == PUNCT and tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(PUNCT, ")", what="')' to close the expression")
            return expr
        raise self.error(f"unexpected token {tok.text!r} in expression", tok)
