"""Typed syntax tree for the shader subset.

Positions ride along on every node but are excluded from equality, so two
parses of equivalent text compare equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TYPE_TAGS = ("float", "int", "bool", "vec2", "vec3", "vec4", "mat3", "sampler2D", "void")

VEC_SIZES = {"vec2": 2, "vec3": 3, "vec4": 4}


@dataclass(frozen=True)
class Pos:
    line: int = 1
    col: int = 1


def _pos_field() -> Pos:
    return Pos()


@dataclass
class Node:
    pos: Pos = field(compare=False, repr=False, kw_only=True, default_factory=_pos_field)


# --- expressions ---


@dataclass
class FloatLit(Node):
    value: float
    text: str = field(compare=False, default="")


@dataclass
class IntLit(Node):
    value: int


@dataclass
class BoolLit(Node):
    value: bool


@dataclass
class VarRef(Node):
    name: str


@dataclass
class Swizzle(Node):
    base: "Expr"
    components: str


@dataclass
class Unary(Node):
    op: str
    operand: "Expr"


@dataclass
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass
class Ternary(Node):
    cond: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass
class Call(Node):
    name: str
    args: list


Expr = FloatLit | IntLit | BoolLit | VarRef | Swizzle | Unary | Binary | Ternary | Call


# --- statements ---


@dataclass
class VarDecl(Node):
    type: str
    name: str
    init: Expr | None = None
    const: bool = False


@dataclass
class Assign(Node):
    target: str
    swizzle: str | None
    op: str  # "=", "+=", "-=", "*=", "/="
    value: Expr


@dataclass
class ExprStmt(Node):
    expr: Expr


@dataclass
class If(Node):
    cond: Expr
    then: "Stmt"
    other: "Stmt | None" = None


@dataclass
class ForUpdate(Node):
    var: str
    op: str  # "++", "--", "+=", "-="
    amount: int = 1

    def __post_init__(self):
        if self.op in ("++", "--"):
            self.amount = 1


@dataclass
class For(Node):
    var: str
    start: int
    cmp: str  # "<" or "<="
    bound: int
    update: ForUpdate
    body: "Stmt"


@dataclass
class Return(Node):
    value: Expr | None = None


@dataclass
class Block(Node):
    stmts: list


Stmt = VarDecl | Assign | ExprStmt | If | For | Return | Block


# --- top level ---


@dataclass
class Param(Node):
    type: str
    name: str


@dataclass
class GlobalDecl(Node):
    qualifier: str  # "uniform" or "varying"
    type: str
    name: str


@dataclass
class FunctionDef(Node):
    return_type: str
    name: str
    params: list
    body: Block


@dataclass
class Program(Node):
    has_precision_decl: bool
    globals: list
    functions: list
