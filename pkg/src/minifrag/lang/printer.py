"""Canonical source rendering of a syntax tree.

Used three ways: the round-trip test (parse . print . parse is identity up
to positions), the byte-stable AST serialization the determinism property
checks, and mutant generation.  Parentheses are re-derived from operator
precedence, so only the ones that matter survive.
"""

from __future__ import annotations

from . import nodes as n

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, ">": 4, "<=": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_UNARY_PREC = 7
_TERNARY_PREC = 0


def format_program(program: n.Program) -> str:
    parts: list[str] = []
    if program.has_precision_decl:
        parts.append("precision mediump float;")
    for g in program.globals:
        parts.append(f"{g.qualifier} {g.type} {g.name};")
    if program.globals or program.has_precision_decl:
        parts.append("")
    for i, fn in enumerate(program.functions):
        if i:
            parts.append("")
        parts.append(format_function(fn))
    return "\n".join(parts).rstrip("\n") + "\n"


def format_function(fn: n.FunctionDef) -> str:
    params = ", ".join(f"{p.type} {p.name}" for p in fn.params)
    header = f"{fn.return_type} {fn.name}({params}) "
    return header + _format_block(fn.body, 0)


def _indent(level: int) -> str:
    return "    " * level


def _format_block(block: n.Block, level: int) -> str:
    if not block.stmts:
        return "{\n" + _indent(level) + "}"
    lines = ["{"]
    for stmt in block.stmts:
        lines.append(_format_stmt(stmt, level + 1))
    lines.append(_indent(level) + "}")
    return "\n".join(lines)


def _format_stmt(stmt: n.Stmt, level: int) -> str:
    pad = _indent(level)
    if isinstance(stmt, n.Block):
        return pad + _format_block(stmt, level)
    if isinstance(stmt, n.VarDecl):
        prefix = "const " if stmt.const else ""
        if stmt.init is None:
            return f"{pad}{prefix}{stmt.type} {stmt.name};"
        return f"{pad}{prefix}{stmt.type} {stmt.name} = {format_expr(stmt.init)};"
    if isinstance(stmt, n.Assign):
        target = stmt.target if stmt.swizzle is None else f"{stmt.target}.{stmt.swizzle}"
        return f"{pad}{target} {stmt.op} {format_expr(stmt.value)};"
    if isinstance(stmt, n.ExprStmt):
        return f"{pad}{format_expr(stmt.expr)};"
    if isinstance(stmt, n.If):
        return pad + _format_if(stmt, level)
    if isinstance(stmt, n.For):
        upd = stmt.update
        if upd.op in ("++", "--"):
            update = f"{upd.var}{upd.op}"
        else:
            update = f"{upd.var} {upd.op} {upd.amount}"
        head = f"{pad}for (int {stmt.var} = {stmt.start}; {stmt.var} {stmt.cmp} {stmt.bound}; {update}) "
        return head + _format_block(stmt.body, level)
    if isinstance(stmt, n.Return):
        if stmt.value is None:
            return f"{pad}return;"
        return f"{pad}return {format_expr(stmt.value)};"
    raise TypeError(f"unknown statement node: {stmt!r}")


def _format_if(stmt: n.If, level: int) -> str:
    out = f"if ({format_expr(stmt.cond)}) " + _format_block(stmt.then, level)
    if isinstance(stmt.other, n.If):
        out += " else " + _format_if(stmt.other, level)
    elif stmt.other is not None:
        out += " else " + _format_block(stmt.other, level)
    return out


def format_expr(expr: n.Expr) -> str:
    return _format_expr_prec(expr, 0)


def _format_expr_prec(expr: n.Expr, min_prec: int) -> str:
    if isinstance(expr, n.FloatLit):
        return expr.text if expr.text else _float_text(expr.value)
    if isinstance(expr, n.IntLit):
        return str(expr.value)
    if isinstance(expr, n.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, n.VarRef):
        return expr.name
    if isinstance(expr, n.Swizzle):
        base = _format_expr_prec(expr.base, _UNARY_PREC + 1)
        if isinstance(expr.base, n.IntLit):
            base = f"({base})"  # "1.rgb" would lex as a float literal
        return f"{base}.{expr.components}"
    if isinstance(expr, n.Call):
        args = ", ".join(_format_expr_prec(a, 0) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, n.Unary):
        inner = _format_expr_prec(expr.operand, _UNARY_PREC)
        if isinstance(expr.operand, n.Unary) and expr.op == expr.operand.op:
            inner = f"({inner})"  # "--x" would lex as a decrement
        text = f"{expr.op}{inner}"
        return text if min_prec <= _UNARY_PREC else f"({text})"
    if isinstance(expr, n.Binary):
        prec = _PRECEDENCE[expr.op]
        left = _format_expr_prec(expr.left, prec)
        right = _format_expr_prec(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return text if prec >= min_prec else f"({text})"
    if isinstance(expr, n.Ternary):
        cond = _format_expr_prec(expr.cond, _TERNARY_PREC + 1)
        then = _format_expr_prec(expr.then, _TERNARY_PREC)
        other = _format_expr_prec(expr.other, _TERNARY_PREC)
        text = f"{cond} ? {then} : {other}"
        return text if min_prec <= _TERNARY_PREC else f"({text})"
    raise TypeError(f"unknown expression node: {expr!r}")


def _float_text(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text or "." in text:
        return text
    return text + ".0"
