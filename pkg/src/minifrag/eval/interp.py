"""Reference interpreter for validated shaders.

Evaluation is vectorized over a batch of fragments ("lanes"): every value
is a numpy array whose leading axis is the lane count (or a broadcastable
constant), and control flow is handled with boolean masks, so each lane
computes exactly what a one-fragment-at-a-time interpreter would.  All
float arithmetic is 32-bit.  Division by zero follows IEEE; inf and NaN
flow through and are dealt with at quantization time.

The checker guarantees shaders are well-typed, well-scoped, recursion-free
and loop-bounded, so this module performs no semantic validation of its
own; the statement budget is pure defense in depth.
"""

from __future__ import annotations

import numpy as np

from ..lang import ValidatedShader
from ..lang import nodes as n
from .image import Image, UniformSet

F32 = np.float32
I32 = np.int32

STATEMENT_BUDGET = 1_000_000

_SWIZZLE_INDEX = {ch: i for i, ch in enumerate("xyzw")}
_SWIZZLE_INDEX.update({ch: i for i, ch in enumerate("rgba")})

_ZERO_VALUES = {
    "float": lambda: F32(0.0),
    "int": lambda: I32(0),
    "bool": lambda: np.bool_(False),
    "vec2": lambda: np.zeros(2, F32),
    "vec3": lambda: np.zeros(3, F32),
    "vec4": lambda: np.zeros(4, F32),
    "mat3": lambda: np.zeros((3, 3), F32),
}


class EvaluatorError(Exception):
    """Internal evaluator failure; unreachable for validated shaders."""


class EvalBudgetExceeded(EvaluatorError):
    def __init__(self, statements: int, pixel: tuple | None = None):
        self.statements = statements
        self.pixel = pixel
        at = f" at pixel {pixel}" if pixel else ""
        super().__init__(f"statement budget exceeded ({statements}){at}")


class _Texture:
    """Sampler-ready texture: float32 [0,1], rows bottom-up."""

    def __init__(self, image: Image):
        self.width = image.width
        self.height = image.height
        arr = image.to_array().astype(F32) / F32(255.0)
        self.texels = np.ascontiguousarray(arr[::-1])  # row 0 = bottom row, matching uv space


def _edge_index(coord: np.ndarray, size: int) -> np.ndarray:
    """Clamp a (possibly inf/NaN) texel coordinate into valid range."""
    safe = np.where(np.isnan(coord), 0.0, np.clip(coord, 0, size - 1))
    return safe.astype(np.intp)


def _bilinear(tex: _Texture, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Clamp-to-edge bilinear lookup; texel centers at (i + 0.5) / size."""
    x = u * F32(tex.width) - F32(0.5)
    y = v * F32(tex.height) - F32(0.5)
    x0 = np.floor(x)
    y0 = np.floor(y)
    tx = (x - x0)[..., None]
    ty = (y - y0)[..., None]
    i0 = _edge_index(x0, tex.width)
    i1 = _edge_index(x0 + 1, tex.width)
    j0 = _edge_index(y0, tex.height)
    j1 = _edge_index(y0 + 1, tex.height)
    t = tex.texels
    top = t[j0, i0] * (F32(1.0) - tx) + t[j0, i1] * tx
    bottom = t[j1, i0] * (F32(1.0) - tx) + t[j1, i1] * tx
    return top * (F32(1.0) - ty) + bottom * ty


def sample_texture(image: Image, uv) -> np.ndarray:
    """Sample one uv coordinate; returns an rgba float32 vector in [0,1]."""
    tex = _Texture(image)
    u = np.asarray([uv[0]], F32)
    v = np.asarray([uv[1]], F32)
    with np.errstate(all="ignore"):
        return _bilinear(tex, u, v)[0]


# -- values --
# A runtime value is (tag, data).  data shapes: float/int/bool scalars are
# () or (N,), vecK is (K,) or (N, K), mat3 is (3, 3) or (N, 3, 3).


def _align(a_tag, a, b_tag, b):
    """Pad the scalar side of a scalar-vector pair for broadcasting."""
    if a_tag == "float" and b_tag.startswith("vec"):
        return (np.asarray(a, F32)[..., None] if np.ndim(a) else a), b
    if b_tag == "float" and a_tag.startswith("vec"):
        return a, (np.asarray(b, F32)[..., None] if np.ndim(b) else b)
    return a, b


class _ReturnState:
    """Accumulates per-lane return values as lanes drop out of a call."""

    def __init__(self, return_type: str):
        self.value = _ZERO_VALUES.get(return_type, lambda: None)()


class _Context:
    def __init__(self, shader: ValidatedShader, uniforms: UniformSet, width: int,
                 texture: _Texture | None = None):
        self.functions = {f.name: f for f in shader.program.functions}
        self.output_name = shader.contract.output_name
        self.width = width
        self.statements = 0
        self.frag_color: np.ndarray = np.zeros((width, 4), F32)
        self.frag_color[:, 3] = F32(1.0)

        tex = texture if texture is not None else _Texture(uniforms.main_tex)
        res = uniforms.resolved_resolution()
        self.globals = {
            "uMainTex": ("sampler2D", tex),
            "uTime": ("float", F32(uniforms.time)),
            "uResolution": ("vec2", np.asarray(res, F32)),
        }

    def spend(self) -> None:
        self.statements += 1
        if self.statements > STATEMENT_BUDGET:
            raise EvalBudgetExceeded(self.statements)


class _Frame:
    """One function invocation: scoped variables plus return bookkeeping."""

    def __init__(self, ctx: _Context, return_type: str):
        self.ctx = ctx
        self.scopes: list[dict] = [{}]
        self.ret = _ReturnState(return_type)

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def get(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.ctx.globals[name]

    def declare(self, name: str, value):
        self.scopes[-1][name] = value

    def set(self, name: str, value):
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        raise EvaluatorError(f"store to undeclared {name!r}")  # pragma: no cover


def eval_lanes(shader: ValidatedShader, uv: np.ndarray, uniforms: UniformSet,
               texture: _Texture | None = None) -> np.ndarray:
    """Run main over a batch of fragments; uv is (N, 2) float32, the result
    is the final gl_FragColor per lane, (N, 4) float32, unclamped.

    `texture` lets a frame renderer prepare the sampler cache once instead
    of once per batch.
    """
    ctx = _Context(shader, uniforms, uv.shape[0], texture=texture)
    ctx.globals["vUv"] = ("vec2", np.asarray(uv, F32))
    main = ctx.functions["main"]
    frame = _Frame(ctx, "void")
    mask = np.ones(ctx.width, dtype=bool)
    with np.errstate(all="ignore"):
        _exec_block(ctx, frame, main.body, mask, own_scope=False)
    return ctx.frag_color


def eval_fragment(shader: ValidatedShader, uv, uniforms: UniformSet) -> np.ndarray:
    """Evaluate a single fragment; returns the rgba float32 result."""
    coords = np.asarray([[uv[0], uv[1]]], F32)
    return eval_lanes(shader, coords, uniforms)[0]


# -- statements --


def _exec_block(ctx, frame, block: n.Block, mask, own_scope=True):
    """Run a block; returns the mask of lanes that did not return."""
    if own_scope:
        frame.push()
    for stmt in block.stmts:
        mask = _exec_stmt(ctx, frame, stmt, mask)
        if not mask.any():
            break
    if own_scope:
        frame.pop()
    return mask


def _exec_stmt(ctx, frame, stmt: n.Stmt, mask):
    ctx.spend()

    if isinstance(stmt, n.VarDecl):
        if stmt.init is not None:
            tag, value = _eval(ctx, frame, stmt.init, mask)
        else:
            tag, value = stmt.type, _ZERO_VALUES[stmt.type]()
        frame.declare(stmt.name, (tag, value))
        return mask

    if isinstance(stmt, n.Assign):
        _exec_assign(ctx, frame, stmt, mask)
        return mask

    if isinstance(stmt, n.ExprStmt):
        _eval(ctx, frame, stmt.expr, mask)
        return mask

    if isinstance(stmt, n.If):
        _, cond = _eval(ctx, frame, stmt.cond, mask)
        then_mask = mask & cond
        else_mask = mask & ~cond
        survive_then = then_mask
        survive_else = else_mask
        if then_mask.any():
            survive_then = _exec_block(ctx, frame, stmt.then, then_mask)
        if stmt.other is not None and else_mask.any():
            if isinstance(stmt.other, n.If):
                survive_else = _exec_stmt(ctx, frame, stmt.other, else_mask)
            else:
                survive_else = _exec_block(ctx, frame, stmt.other, else_mask)
        return survive_then | survive_else

    if isinstance(stmt, n.For):
        step = stmt.update.amount if stmt.update.op in ("+=", "-=") else 1
        stop = stmt.bound + 1 if stmt.cmp == "<=" else stmt.bound
        frame.push()
        for i in range(stmt.start, stop, step):
            frame.scopes[-1][stmt.var] = ("int", I32(i))
            ctx.spend()
            mask = _exec_block(ctx, frame, stmt.body, mask)
            if not mask.any():
                break
        frame.pop()
        return mask

    if isinstance(stmt, n.Return):
        if stmt.value is not None:
            _, value = _eval(ctx, frame, stmt.value, mask)
            ret = frame.ret
            ret.value = _select(mask, value, ret.value)
        return np.zeros_like(mask)

    if isinstance(stmt, n.Block):
        return _exec_block(ctx, frame, stmt, mask)

    raise EvaluatorError(f"unknown statement node: {stmt!r}")  # pragma: no cover


def _select(mask, new, old):
    """Masked merge; pads the mask when the payload has component axes."""
    extra = max(np.ndim(new), np.ndim(old)) - 1
    m = mask.reshape(mask.shape + (1,) * extra) if extra > 0 else mask
    return np.where(m, new, old)


def _exec_assign(ctx, frame, stmt: n.Assign, mask):
    vtag, value = _eval(ctx, frame, stmt.value, mask)

    if stmt.target == ctx.output_name:
        cur_tag, cur = "vec4", ctx.frag_color
    else:
        cur_tag, cur = frame.get(stmt.target)

    if stmt.swizzle is None:
        if stmt.op != "=":
            value = _arith(stmt.op[0], cur_tag, cur, vtag, value)[1]
        merged = _select(mask, value, cur)
    else:
        ncomp = int(cur_tag[3])
        full = np.broadcast_to(cur, (ctx.width, ncomp)).copy() if stmt.target != ctx.output_name \
            else cur.copy()
        idxs = [_SWIZZLE_INDEX[ch] for ch in stmt.swizzle]
        for t, ci in enumerate(idxs):
            comp = value[..., t] if len(idxs) > 1 else value
            if stmt.op != "=":
                comp = _arith(stmt.op[0], "float", full[:, ci], "float", comp)[1]
            full[:, ci] = np.where(mask, comp, full[:, ci])
        merged = full

    if stmt.target == ctx.output_name:
        ctx.frag_color = np.asarray(np.broadcast_to(merged, (ctx.width, 4)), F32).copy() \
            if merged.shape != (ctx.width, 4) else merged
    else:
        frame.set(stmt.target, (cur_tag, merged))


# -- expressions --


def _eval(ctx, frame, expr: n.Expr, mask):
    if isinstance(expr, n.FloatLit):
        return "float", F32(expr.value)
    if isinstance(expr, n.IntLit):
        return "int", I32(expr.value)
    if isinstance(expr, n.BoolLit):
        return "bool", np.bool_(expr.value)
    if isinstance(expr, n.VarRef):
        return frame.get(expr.name)
    if isinstance(expr, n.Swizzle):
        tag, base = _eval(ctx, frame, expr.base, mask)
        idxs = [_SWIZZLE_INDEX[ch] for ch in expr.components]
        if len(idxs) == 1:
            return "float", base[..., idxs[0]]
        return f"vec{len(idxs)}", base[..., idxs]
    if isinstance(expr, n.Unary):
        tag, operand = _eval(ctx, frame, expr.operand, mask)
        if expr.op == "!":
            return "bool", ~np.asarray(operand, dtype=bool)
        return tag, -operand
    if isinstance(expr, n.Binary):
        return _eval_binary(ctx, frame, expr, mask)
    if isinstance(expr, n.Ternary):
        _, cond = _eval(ctx, frame, expr.cond, mask)
        then_tag, then_val = _eval(ctx, frame, expr.then, mask)
        _, other_val = _eval(ctx, frame, expr.other, mask)
        return then_tag, _select(np.asarray(cond, bool), then_val, other_val)
    if isinstance(expr, n.Call):
        return _eval_call(ctx, frame, expr, mask)
    raise EvaluatorError(f"unknown expression node: {expr!r}")  # pragma: no cover


def _eval_binary(ctx, frame, expr: n.Binary, mask):
    op = expr.op
    ltag, left = _eval(ctx, frame, expr.left, mask)
    rtag, right = _eval(ctx, frame, expr.right, mask)

    if op == "&&":
        return "bool", np.asarray(left, bool) & np.asarray(right, bool)
    if op == "||":
        return "bool", np.asarray(left, bool) | np.asarray(right, bool)
    if op == "<":
        return "bool", left < right
    if op == ">":
        return "bool", left > right
    if op == "<=":
        return "bool", left <= right
    if op == ">=":
        return "bool", left >= right
    if op == "==":
        return "bool", left == right
    if op == "!=":
        return "bool", left != right
    return _arith(op, ltag, left, rtag, right)


def _arith(op: str, ltag: str, left, rtag: str, right):
    if ltag == "mat3":  # checker only admits mat3 * vec3
        result = np.einsum("...ij,...j->...i", left, right).astype(F32, copy=False)
        return "vec3", result
    if ltag == "int" and rtag == "int":
        if op == "+":
            return "int", left + right
        if op == "-":
            return "int", left - right
        if op == "*":
            return "int", left * right
        # GLSL-style int division: truncate toward zero, define x/0 as 0
        denom = np.where(right == 0, I32(1), right)
        quot = np.trunc(np.asarray(left, F32) / np.asarray(denom, F32)).astype(I32)
        return "int", np.where(right == 0, I32(0), quot)

    tag = ltag if ltag.startswith("vec") else rtag
    left, right = _align(ltag, left, rtag, right)
    if op == "+":
        return tag, left + right
    if op == "-":
        return tag, left - right
    if op == "*":
        return tag, left * right
    if op == "/":
        return tag, np.divide(left, right)
    raise EvaluatorError(f"unknown operator {op!r}")  # pragma: no cover


def _eval_call(ctx, frame, expr: n.Call, mask):
    args = [_eval(ctx, frame, a, mask) for a in expr.args]
    name = expr.name

    if name in _BUILTINS:
        return _BUILTINS[name](args)
    if name in ("float", "int", "vec2", "vec3", "vec4", "mat3"):
        return _construct(ctx, name, args)

    fn = ctx.functions[name]
    callee = _Frame(ctx, fn.return_type)
    for param, (tag, value) in zip(fn.params, args):
        callee.declare(param.name, (tag, value))
    _exec_block(ctx, callee, fn.body, mask, own_scope=False)
    if fn.return_type == "void":
        return "void", None
    return fn.return_type, callee.ret.value


def _construct(ctx, name: str, args):
    if name == "float":
        tag, v = args[0]
        return "float", np.asarray(v, F32) if tag != "float" else v
    if name == "int":
        tag, v = args[0]
        if tag == "int":
            return "int", v
        return "int", np.trunc(np.nan_to_num(np.asarray(v, np.float64),
                                             nan=0.0, posinf=0.0, neginf=0.0)).astype(I32)
    if name == "mat3":
        return "mat3", _construct_mat3(ctx, args)

    size = {"vec2": 2, "vec3": 3, "vec4": 4}[name]
    if len(args) == 1 and args[0][0] in ("float", "int"):
        v = np.asarray(args[0][1], F32)
        return name, np.repeat(v[..., None], size, axis=-1)

    parts = []
    for tag, v in args:
        v = np.asarray(v, F32)
        parts.append(v[..., None] if tag in ("float", "int") else v)
    lanes = max((p.shape[0] for p in parts if p.ndim > 1), default=0)
    if lanes:
        parts = [np.broadcast_to(p, (lanes, p.shape[-1])) for p in parts]
    return name, np.concatenate(parts, axis=-1)


def _construct_mat3(ctx, args):
    if len(args) == 1:
        s = np.asarray(args[0][1], F32)
        eye = np.eye(3, dtype=F32)
        return eye * s[..., None, None] if s.ndim else eye * s
    if len(args) == 3:  # three vec3 columns
        cols = [np.asarray(v, F32) for _, v in args]
        lanes = max((c.shape[0] for c in cols if c.ndim > 1), default=0)
        if lanes:
            cols = [np.broadcast_to(c, (lanes, 3)) for c in cols]
        return np.stack(cols, axis=-1)
    # nine scalars, column-major
    vals = [np.asarray(v, F32) for _, v in args]
    lanes = next((v.shape[0] for v in vals if v.ndim), 0)
    if lanes:
        vals = [np.broadcast_to(v, (lanes,)) for v in vals]
    flat = np.stack(vals, axis=-1)  # (..., 9) in column-major order
    mat = flat.reshape(flat.shape[:-1] + (3, 3))
    return np.swapaxes(mat, -1, -2)


# -- builtins --


def _tagged_unary(fn):
    def apply(args):
        tag, v = args[0]
        return tag, fn(np.asarray(v, F32))
    return apply


def _broadcast_pair(args):
    (ltag, left), (rtag, right) = args
    tag = ltag if ltag.startswith("vec") else rtag
    left, right = _align(ltag, np.asarray(left, F32), rtag, np.asarray(right, F32))
    return tag, left, right


def _builtin_mod(args):
    tag, x, y = _broadcast_pair(args)
    return tag, x - y * np.floor(np.divide(x, y))


def _builtin_clamp(args):
    tag, v = args[0]
    lo = _align(args[1][0], np.asarray(args[1][1], F32), tag, v)[0]
    hi = _align(args[2][0], np.asarray(args[2][1], F32), tag, v)[0]
    return tag, np.minimum(np.maximum(np.asarray(v, F32), lo), hi)


def _builtin_mix(args):
    tag, x = args[0]
    _, y = args[1]
    a = _align(args[2][0], np.asarray(args[2][1], F32), tag, x)[0]
    x = np.asarray(x, F32)
    y = np.asarray(y, F32)
    return tag, x * (F32(1.0) - a) + y * a


def _builtin_step(args):
    (etag, edge), (xtag, x) = args
    tag = xtag if xtag.startswith("vec") else etag
    edge, x = _align(etag, np.asarray(edge, F32), xtag, np.asarray(x, F32))
    return tag, np.where(x < edge, F32(0.0), F32(1.0))


def _builtin_smoothstep(args):
    (e0tag, e0), (e1tag, e1), (xtag, x) = args
    tag = xtag
    e0 = _align(e0tag, np.asarray(e0, F32), xtag, x)[0]
    e1 = _align(e1tag, np.asarray(e1, F32), xtag, x)[0]
    t = np.minimum(np.maximum(np.divide(np.asarray(x, F32) - e0, e1 - e0), F32(0.0)), F32(1.0))
    return tag, t * t * (F32(3.0) - F32(2.0) * t)


def _dot_data(xtag, x, y):
    if xtag == "float":
        return x * y
    return np.sum(x * y, axis=-1)


def _builtin_dot(args):
    (xtag, x), (_, y) = args
    return "float", _dot_data(xtag, np.asarray(x, F32), np.asarray(y, F32))


def _builtin_length(args):
    tag, v = args[0]
    v = np.asarray(v, F32)
    return "float", np.sqrt(_dot_data(tag, v, v))


def _builtin_distance(args):
    (tag, a), (_, b) = args
    d = np.asarray(a, F32) - np.asarray(b, F32)
    return "float", np.sqrt(_dot_data(tag, d, d))


def _builtin_normalize(args):
    tag, v = args[0]
    v = np.asarray(v, F32)
    norm = np.sqrt(_dot_data(tag, v, v))
    if tag != "float":
        norm = norm[..., None]
    return tag, np.divide(v, norm)


def _builtin_minmax(fn):
    def apply(args):
        tag, x, y = _broadcast_pair(args)
        return tag, fn(x, y)
    return apply


def _builtin_pow(args):
    tag, x, y = _broadcast_pair(args)
    return tag, np.power(x, y)


def _builtin_texture2d(args):
    (_, tex), (_, uv) = args
    uv = np.asarray(uv, F32)
    return "vec4", _bilinear(tex, uv[..., 0], uv[..., 1])


_BUILTINS = {
    "sin": _tagged_unary(np.sin),
    "cos": _tagged_unary(np.cos),
    "abs": _tagged_unary(np.abs),
    "floor": _tagged_unary(np.floor),
    "fract": _tagged_unary(lambda v: v - np.floor(v)),
    "exp": _tagged_unary(np.exp),
    "sqrt": _tagged_unary(np.sqrt),
    "mod": _builtin_mod,
    "pow": _builtin_pow,
    "min": _builtin_minmax(np.minimum),
    "max": _builtin_minmax(np.maximum),
    "clamp": _builtin_clamp,
    "mix": _builtin_mix,
    "step": _builtin_step,
    "smoothstep": _builtin_smoothstep,
    "dot": _builtin_dot,
    "length": _builtin_length,
    "distance": _builtin_distance,
    "normalize": _builtin_normalize,
    "texture2D": _builtin_texture2d,
}
