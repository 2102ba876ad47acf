"""Static semantic checks over a parsed shader.

Everything the runtime must never see is rejected here: unknown names,
type mismatches, contract violations, recursion, unbounded loops.  The
interpreter trusts an accepted tree completely, so this module is the
soundness gate for the whole system.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import nodes as n
from .contract import DEFAULT_CONTRACT, InterfaceContract
from .diagnostics import Diagnostic

GEN_TYPES = ("float", "vec2", "vec3", "vec4")
SCALAR_TYPES = ("float", "int")
VEC_TYPES = ("vec2", "vec3", "vec4")

# Per-loop iteration ceiling; with the statement budget this keeps any
# accepted shader's runtime statically bounded.
MAX_LOOP_ITERATIONS = 10_000

_SWIZZLE_SETS = ("xyzw", "rgba")

# name -> list of (param_types, return_type); "g" expands over GEN_TYPES.
_BUILTIN_SIGS: dict[str, list[tuple[tuple[str, ...], str]]] = {}


def _register_builtins() -> None:
    def add(name: str, params: tuple[str, ...], ret: str) -> None:
        _BUILTIN_SIGS.setdefault(name, [])
        if "g" in params or ret == "g":
            for g in GEN_TYPES:
                expanded = tuple(g if p == "g" else p for p in params)
                _BUILTIN_SIGS[name].append((expanded, g if ret == "g" else ret))
        else:
            _BUILTIN_SIGS[name].append((params, ret))

    for fn in ("sin", "cos", "abs", "floor", "fract", "exp", "sqrt", "normalize"):
        add(fn, ("g",), "g")
    add("mod", ("g", "g"), "g")
    add("mod", ("g", "float"), "g")
    add("pow", ("g", "g"), "g")
    for fn in ("min", "max"):
        add(fn, ("g", "g"), "g")
        add(fn, ("g", "float"), "g")
    add("clamp", ("g", "g", "g"), "g")
    add("clamp", ("g", "float", "float"), "g")
    add("mix", ("g", "g", "g"), "g")
    add("mix", ("g", "g", "float"), "g")
    add("step", ("g", "g"), "g")
    add("step", ("float", "g"), "g")
    add("smoothstep", ("g", "g", "g"), "g")
    add("smoothstep", ("float", "float", "g"), "g")
    add("dot", ("g", "g"), "float")
    add("length", ("g",), "float")
    add("distance", ("g", "g"), "float")
    add("texture2D", ("sampler2D", "vec2"), "vec4")


_register_builtins()

BUILTIN_FUNCTIONS = frozenset(_BUILTIN_SIGS)
CONSTRUCTIBLE_TYPES = frozenset({"float", "int", "vec2", "vec3", "vec4", "mat3"})


@dataclass
class _Var:
    type: str
    readable: bool = True
    writable: bool = True
    origin: str = "local"  # local | const | param | uniform | varying | loop


def check(program: n.Program, contract: InterfaceContract = DEFAULT_CONTRACT) -> list[Diagnostic]:
    return _Checker(program, contract).run()


class _Checker:
    def __init__(self, program: n.Program, contract: InterfaceContract):
        self.program = program
        self.contract = contract
        self.diagnostics: list[Diagnostic] = []
        self.functions: dict[str, n.FunctionDef] = {}
        self.globals: dict[str, _Var] = {}
        # function name -> set of callee names, for E002/E009
        self.calls: dict[str, set[str]] = {}
        self.assigns_output: dict[str, bool] = {}

    def report(self, code: str, message: str, pos: n.Pos) -> None:
        self.diagnostics.append(Diagnostic(code, message, pos.line, pos.col))

    def run(self) -> list[Diagnostic]:
        self.collect_globals()
        self.collect_functions()
        for fn in self.program.functions:
            _FunctionChecker(self, fn).run()
        self.check_main()
        self.check_recursion()
        return self.diagnostics

    # -- declarations --

    def collect_globals(self) -> None:
        for g in self.program.globals:
            allowed = self.contract.uniforms if g.qualifier == "uniform" else self.contract.varyings
            if g.name not in allowed:
                self.report(
                    "E008",
                    f"{g.qualifier} {g.name!r} is not part of the interface contract "
                    f"(allowed {g.qualifier}s: {', '.join(sorted(allowed))})",
                    g.pos,
                )
                continue
            if allowed[g.name] != g.type:
                self.report(
                    "E008",
                    f"{g.qualifier} {g.name!r} must have type {allowed[g.name]}, not {g.type}",
                    g.pos,
                )
                continue
            if g.name in self.globals:
                self.report("E004", f"redeclaration of {g.name!r}", g.pos)
                continue
            self.globals[g.name] = _Var(g.type, readable=True, writable=False,
                                        origin=g.qualifier)

    def collect_functions(self) -> None:
        for fn in self.program.functions:
            if fn.name in BUILTIN_FUNCTIONS or fn.name in CONSTRUCTIBLE_TYPES:
                self.report("E004", f"cannot redefine built-in function {fn.name!r}", fn.pos)
                continue
            if fn.name == self.contract.output_name:
                self.report("E004", f"{fn.name!r} is reserved", fn.pos)
                continue
            if fn.name in self.functions:
                self.report("E004", f"redeclaration of function {fn.name!r}", fn.pos)
                continue
            self.functions[fn.name] = fn
            self.calls[fn.name] = set()
            self.assigns_output[fn.name] = False

    # -- whole-program checks --

    def check_main(self) -> None:
        main = self.functions.get("main")
        if main is None:
            self.report("E001", "missing void main()", n.Pos(1, 1))
            return
        if main.return_type != "void" or main.params:
            self.report("E001", "main must be declared as 'void main()' with no parameters",
                        main.pos)
        reachable = self.reachable_from("main")
        if not any(self.assigns_output.get(f, False) for f in reachable):
            self.report(
                "E002",
                f"{self.contract.output_name} is never assigned in main or any function "
                "it calls",
                main.pos,
            )

    def reachable_from(self, root: str) -> set[str]:
        seen: set[str] = set()
        stack = [root]
        while stack:
            name = stack.pop()
            if name in seen or name not in self.calls:
                continue
            seen.add(name)
            stack.extend(self.calls[name])
        return seen

    def check_recursion(self) -> None:
        # DFS cycle detection; one diagnostic per cycle, at the function
        # that appears first in the source.
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {name: WHITE for name in self.functions}
        reported_cycles: set[frozenset] = set()

        def visit(name: str, path: list[str]) -> None:
            color[name] = GRAY
            path.append(name)
            for callee in sorted(self.calls.get(name, ())):
                if callee not in color:
                    continue
                if color[callee] == GRAY:
                    cycle = path[path.index(callee):]
                    key = frozenset(cycle)
                    if key not in reported_cycles:
                        reported_cycles.add(key)
                        first = min(cycle, key=lambda f: (self.functions[f].pos.line,
                                                          self.functions[f].pos.col))
                        chain = " -> ".join(cycle + [callee])
                        self.report("E009", f"recursive call chain: {chain}",
                                    self.functions[first].pos)
                elif color[callee] == WHITE:
                    visit(callee, path)
            path.pop()
            color[name] = BLACK

        for name in self.functions:
            if color[name] == WHITE:
                visit(name, [])


class _FunctionChecker:
    def __init__(self, checker: _Checker, fn: n.FunctionDef):
        self.c = checker
        self.fn = fn
        self.scopes: list[dict[str, _Var]] = [dict(checker.globals)]
        self.has_return = False

    def report(self, code: str, message: str, pos: n.Pos) -> None:
        self.c.report(code, message, pos)

    def run(self) -> None:
        if self.fn.return_type == "sampler2D":
            self.report("E004", "a function cannot return sampler2D", self.fn.pos)
        self.push()
        for p in self.fn.params:
            if p.type in ("sampler2D", "void"):
                self.report("E004", f"parameter {p.name!r} cannot have type {p.type}", p.pos)
                continue
            self.declare(p.name, _Var(p.type, origin="param"), p.pos)
        self.check_block(self.fn.body, share_scope=True)
        self.pop()
        if self.fn.return_type != "void" and not self.has_return:
            self.report("E004",
                        f"function {self.fn.name!r} must return {self.fn.return_type}",
                        self.fn.pos)

    # -- scopes --

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, var: _Var, pos: n.Pos) -> None:
        if name == self.c.contract.output_name:
            self.report("E004", f"{name!r} is reserved and cannot be declared", pos)
            return
        if name in self.scopes[-1]:
            self.report("E004", f"redeclaration of {name!r} in the same scope", pos)
            return
        self.scopes[-1][name] = var

    def lookup(self, name: str) -> _Var | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # -- statements --

    def check_block(self, block: n.Block, share_scope: bool = False) -> None:
        if share_scope:
            # function body shares the parameter scope
            for stmt in block.stmts:
                self.check_stmt(stmt)
            return
        self.push()
        for stmt in block.stmts:
            self.check_stmt(stmt)
        self.pop()

    def check_stmt(self, stmt: n.Stmt) -> None:
        if isinstance(stmt, n.Block):
            self.check_block(stmt)
        elif isinstance(stmt, n.VarDecl):
            self.check_var_decl(stmt)
        elif isinstance(stmt, n.Assign):
            self.check_assign(stmt)
        elif isinstance(stmt, n.ExprStmt):
            self.infer(stmt.expr, allow_void=True)
        elif isinstance(stmt, n.If):
            cond = self.infer(stmt.cond)
            if cond is not None and cond != "bool":
                self.report("E004", f"if condition must be bool, not {cond}", stmt.cond.pos)
            self.check_stmt(stmt.then)
            if stmt.other is not None:
                self.check_stmt(stmt.other)
        elif isinstance(stmt, n.For):
            self.check_for(stmt)
        elif isinstance(stmt, n.Return):
            self.check_return(stmt)
        else:  # pragma: no cover
            raise TypeError(f"unknown statement node: {stmt!r}")

    def check_var_decl(self, stmt: n.VarDecl) -> None:
        if stmt.type == "sampler2D":
            self.report("E004", "sampler2D may only be declared as a uniform", stmt.pos)
            return
        init_type = self.infer(stmt.init) if stmt.init is not None else None
        if stmt.init is not None and init_type is not None and init_type != stmt.type:
            self.report(
                "E004",
                f"cannot initialize {stmt.type} {stmt.name!r} with a {init_type} value",
                stmt.init.pos,
            )
        if stmt.const and stmt.init is None:
            self.report("E004", f"const {stmt.name!r} requires an initializer", stmt.pos)
        self.declare(stmt.name,
                     _Var(stmt.type, writable=not stmt.const,
                          origin="const" if stmt.const else "local"),
                     stmt.pos)

    def check_assign(self, stmt: n.Assign) -> None:
        value_type = self.infer(stmt.value)
        output = self.c.contract.output_name

        if stmt.target == output:
            if stmt.op != "=":
                self.report("E004", f"{output} is write-only; use '='", stmt.pos)
                return
            target_type = self.c.contract.output_type
            self.c.assigns_output[self.fn.name] = True
        else:
            var = self.lookup(stmt.target)
            if var is None:
                self.report("E003", f"undeclared identifier {stmt.target!r}", stmt.pos)
                return
            if not var.writable:
                what = {"uniform": "a uniform", "varying": "a varying",
                        "const": "a constant", "loop": "a loop variable"}.get(
                            var.origin, "read-only")
                self.report("E004", f"cannot assign to {stmt.target!r} ({what})", stmt.pos)
                return
            target_type = var.type

        if stmt.swizzle is not None:
            swiz_type = self.swizzle_type(target_type, stmt.swizzle, stmt.pos, writing=True)
            if swiz_type is None:
                return
            target_type = swiz_type

        if value_type is None:
            return
        if stmt.op == "=":
            if value_type != target_type:
                self.report("E004",
                            f"cannot assign {value_type} to {target_type} target",
                            stmt.value.pos)
        else:
            result = _binary_result(stmt.op[0], target_type, value_type)
            if result != target_type:
                self.report(
                    "E004",
                    f"operator {stmt.op!r} cannot combine {target_type} and {value_type}",
                    stmt.value.pos,
                )

    def check_for(self, stmt: n.For) -> None:
        upd = stmt.update
        if upd.op in ("--",) or (upd.op == "-=") or (upd.op == "+=" and upd.amount <= 0):
            self.report("E005",
                        "unsupported construct: for-loop update must increase the "
                        "loop variable", upd.pos)
        else:
            step = 1 if upd.op == "++" else upd.amount
            span = stmt.bound - stmt.start
            if stmt.cmp == "<=":
                span += 1
            iterations = max(0, -(-span // step))
            if iterations > MAX_LOOP_ITERATIONS:
                self.report(
                    "E005",
                    f"unsupported construct: for-loop runs {iterations} iterations "
                    f"(limit {MAX_LOOP_ITERATIONS})",
                    stmt.pos,
                )
        self.push()
        self.declare(stmt.var, _Var("int", writable=False, origin="loop"), stmt.pos)
        self.check_stmt(stmt.body)
        self.pop()

    def check_return(self, stmt: n.Return) -> None:
        self.has_return = True
        expected = self.fn.return_type
        if stmt.value is None:
            if expected != "void":
                self.report("E004",
                            f"function {self.fn.name!r} must return a {expected} value",
                            stmt.pos)
            return
        actual = self.infer(stmt.value)
        if expected == "void":
            self.report("E004", "void function cannot return a value", stmt.pos)
        elif actual is not None and actual != expected:
            self.report("E004",
                        f"function {self.fn.name!r} returns {expected}, not {actual}",
                        stmt.value.pos)

    # -- expressions --

    def infer(self, expr: n.Expr, allow_void: bool = False) -> str | None:
        t = self._infer(expr)
        if t == "void" and not allow_void:
            self.report("E004", "void value used in an expression", expr.pos)
            return None
        return t

    def _infer(self, expr: n.Expr) -> str | None:
        if isinstance(expr, n.FloatLit):
            return "float"
        if isinstance(expr, n.IntLit):
            return "int"
        if isinstance(expr, n.BoolLit):
            return "bool"
        if isinstance(expr, n.VarRef):
            if expr.name == self.c.contract.output_name:
                self.report("E004", f"{expr.name} is write-only and cannot be read", expr.pos)
                return None
            var = self.lookup(expr.name)
            if var is None:
                self.report("E003", f"undeclared identifier {expr.name!r}", expr.pos)
                return None
            return var.type
        if isinstance(expr, n.Swizzle):
            base = self.infer(expr.base)
            if base is None:
                return None
            return self.swizzle_type(base, expr.components, expr.pos, writing=False)
        if isinstance(expr, n.Unary):
            operand = self.infer(expr.operand)
            if operand is None:
                return None
            if expr.op == "!":
                if operand != "bool":
                    self.report("E004", f"'!' requires bool, not {operand}", expr.pos)
                    return None
                return "bool"
            if operand in ("float", "int") or operand in VEC_TYPES:
                return operand
            self.report("E004", f"unary '-' cannot apply to {operand}", expr.pos)
            return None
        if isinstance(expr, n.Binary):
            return self.infer_binary(expr)
        if isinstance(expr, n.Ternary):
            cond = self.infer(expr.cond)
            if cond is not None and cond != "bool":
                self.report("E004", f"conditional needs a bool, not {cond}", expr.cond.pos)
            then = self.infer(expr.then)
            other = self.infer(expr.other)
            if then is None or other is None:
                return None
            if then != other:
                self.report("E004",
                            f"conditional branches disagree: {then} vs {other}", expr.pos)
                return None
            return then
        if isinstance(expr, n.Call):
            return self.infer_call(expr)
        raise TypeError(f"unknown expression node: {expr!r}")  # pragma: no cover

    def infer_binary(self, expr: n.Binary) -> str | None:
        left = self.infer(expr.left)
        right = self.infer(expr.right)
        if left is None or right is None:
            return None
        op = expr.op
        if op in ("&&", "||"):
            if left == "bool" and right == "bool":
                return "bool"
            self.report("E004", f"{op!r} requires bool operands, got {left} and {right}",
                        expr.pos)
            return None
        if op in ("<", ">", "<=", ">="):
            if left == right and left in SCALAR_TYPES:
                return "bool"
            self.report("E004",
                        f"{op!r} compares two floats or two ints, got {left} and {right}",
                        expr.pos)
            return None
        if op in ("==", "!="):
            if left == right and left in ("float", "int", "bool"):
                return "bool"
            self.report("E004",
                        f"{op!r} compares two scalars of the same type, got {left} and {right}",
                        expr.pos)
            return None
        result = _binary_result(op, left, right)
        if result is None:
            self.report("E004", f"operator {op!r} cannot combine {left} and {right}", expr.pos)
        return result

    def infer_call(self, expr: n.Call) -> str | None:
        arg_types = [self.infer(a) for a in expr.args]
        if any(t is None for t in arg_types):
            return None

        if expr.name in CONSTRUCTIBLE_TYPES:
            return self.infer_constructor(expr, arg_types)

        if expr.name in _BUILTIN_SIGS:
            sigs = _BUILTIN_SIGS[expr.name]
            for params, ret in sigs:
                if list(params) == arg_types:
                    return ret
            self.report(
                "E004",
                f"no overload of {expr.name!r} accepts ({', '.join(arg_types)})",
                expr.pos,
            )
            return None

        fn = self.c.functions.get(expr.name)
        if fn is None:
            if expr.name in ("vec", "mat2", "mat4", "bool"):
                self.report("E007", f"{expr.name!r} is not a constructible type", expr.pos)
            else:
                self.report("E003", f"undeclared identifier {expr.name!r}", expr.pos)
            return None
        self.c.calls.setdefault(self.fn.name, set()).add(expr.name)
        expected = [p.type for p in fn.params]
        if expected != arg_types:
            self.report(
                "E004",
                f"{expr.name!r} expects ({', '.join(expected)}), got ({', '.join(arg_types)})",
                expr.pos,
            )
            return None
        return fn.return_type

    def infer_constructor(self, expr: n.Call, arg_types: list[str]) -> str | None:
        name = expr.name
        if name in ("float", "int"):
            if len(arg_types) == 1 and arg_types[0] in SCALAR_TYPES:
                return name
            self.report("E007",
                        f"{name}() takes exactly one float or int argument", expr.pos)
            return None
        if name == "mat3":
            if arg_types == ["vec3", "vec3", "vec3"]:
                return "mat3"
            if len(arg_types) == 9 and all(t in SCALAR_TYPES for t in arg_types):
                return "mat3"
            if len(arg_types) == 1 and arg_types[0] in SCALAR_TYPES:
                return "mat3"
            self.report(
                "E007",
                "mat3 constructor needs 9 scalars (column-major), 3 vec3 columns, "
                "or 1 scalar for a diagonal matrix",
                expr.pos,
            )
            return None
        size = n.VEC_SIZES[name]
        if len(arg_types) == 1 and arg_types[0] in SCALAR_TYPES:
            return name
        total = 0
        for t in arg_types:
            if t in SCALAR_TYPES:
                total += 1
            elif t in VEC_TYPES:
                total += n.VEC_SIZES[t]
            else:
                self.report("E007",
                            f"{name} constructor cannot take a {t} argument", expr.pos)
                return None
        if total != size:
            self.report(
                "E007",
                f"{name} constructor needs exactly {size} components (or 1 scalar to "
                f"splat), got {total}",
                expr.pos,
            )
            return None
        return name

    def swizzle_type(self, base: str, components: str, pos: n.Pos,
                     writing: bool) -> str | None:
        if base not in VEC_TYPES:
            self.report("E004", f"cannot swizzle a {base} value", pos)
            return None
        if len(components) > 4:
            self.report("E006", f"swizzle {components!r} is longer than 4 components", pos)
            return None
        charset = next((s for s in _SWIZZLE_SETS if components[0] in s), None)
        if charset is None or any(ch not in charset for ch in components):
            self.report(
                "E006",
                f"swizzle {components!r} must use components from one of 'xyzw' or 'rgba'",
                pos,
            )
            return None
        size = n.VEC_SIZES[base]
        for ch in components:
            if charset.index(ch) >= size:
                self.report("E006",
                            f"swizzle component {ch!r} is out of range for {base}", pos)
                return None
        if writing and len(set(components)) != len(components):
            self.report("E006",
                        f"swizzle {components!r} repeats a component in an assignment", pos)
            return None
        if len(components) == 1:
            return "float"
        return f"vec{len(components)}"


def _binary_result(op: str, left: str, right: str) -> str | None:
    """Result type of an arithmetic operator, or None when invalid."""
    if left == right and left in ("float", "int"):
        return left
    if left == right and left in VEC_TYPES:
        return left
    if left in VEC_TYPES and right == "float":
        return left
    if left == "float" and right in VEC_TYPES:
        return right
    if op == "*" and left == "mat3" and right == "vec3":
        return "vec3"
    return None
