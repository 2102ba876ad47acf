from hypothesis import given, settings, strategies as st

from minifrag.lang import nodes as n
from minifrag.lang.lexer import tokenize
from minifrag.lang.parser import parse
from minifrag.lang.printer import format_program


def parse_source(source):
    lexed = tokenize(source)
    assert lexed.ok, lexed.error
    return parse(lexed.tokens)


def parse_ok(source):
    result = parse_source(source)
    assert result.program is not None, [str(d) for d in result.diagnostics]
    return result.program


PASSTHROUGH = """
uniform sampler2D uMainTex;
varying vec2 vUv;
void main() { gl_FragColor = texture2D(uMainTex, vUv); }
"""


def test_contract_passthrough():
    program = parse_ok(PASSTHROUGH)
    assert len(program.functions) == 1
    assert program.functions[0].name == "main"
    assert [g.name for g in program.globals] == ["uMainTex", "vUv"]


def test_while_is_unsupported_construct():
    result = parse_source("void main(){ while(true){} }")
    codes = [(d.code, d.message) for d in result.diagnostics]
    assert codes[0][0] == "E005"
    assert "unsupported construct: while" in codes[0][1]


def test_first_syntax_error_is_e010():
    result = parse_source("void main(){ float = 3.0; }")
    assert result.program is None
    assert result.diagnostics[0].code == "E010"
    assert result.diagnostics[0].line == 1


def test_recovery_collects_multiple_errors():
    lines = "\n".join(f"    float x{i} = ;" for i in range(6))
    result = parse_source("void main(){\n" + lines + "\n}")
    assert result.program is None
    assert len(result.diagnostics) == 6
    assert sorted(d.line for d in result.diagnostics) == list(range(2, 8))


def test_error_cap_is_ten():
    lines = "\n".join(f"    float x{i} = ;" for i in range(25))
    result = parse_source("void main(){\n" + lines + "\n}")
    assert len(result.diagnostics) == 10


def test_unsupported_constructs():
    cases = {
        "void main(){ do {} while(true); }": "do",
        "struct S { float x; };": "struct",
        "void main(){ discard; }": "discard",
        "void main(){ float a[3]; }": "array",
        "#version 100\nvoid main(){}": "preprocessor",
        "void main(){ int i; i++; }": "++",
        "const float PI = 3.1;": "global constant",
    }
    for source, needle in cases.items():
        result = parse_source(source)
        found = [d for d in result.diagnostics if d.code == "E005"]
        assert found and needle in found[0].message, (source, result.diagnostics)


def test_for_loop_shape_is_enforced():
    ok = parse_source("void main(){ for (int i = 0; i < 4; i++) { } }")
    assert ok.program is not None
    bad_bound = parse_source("void main(){ int n = 4; for (int i = 0; i < n; i++) { } }")
    assert any(d.code == "E005" and "non-constant" in d.message
               for d in bad_bound.diagnostics)
    bad_var = parse_source("void main(){ for (int i = 0; j < 4; i++) { } }")
    assert any(d.code == "E005" for d in bad_var.diagnostics)


def test_precedence():
    program = parse_ok("void main(){ float x = 1.0 + 2.0 * 3.0; }")
    init = program.functions[0].body.stmts[0].init
    assert isinstance(init, n.Binary) and init.op == "+"
    assert isinstance(init.right, n.Binary) and init.right.op == "*"


def test_dangling_else_binds_inner():
    program = parse_ok(
        "void main(){ if (true) if (false) return; else return; gl_FragColor = vec4(1.0); }"
    )
    outer = program.functions[0].body.stmts[0]
    assert outer.other is None
    inner = outer.then.stmts[0]
    assert inner.other is not None


# -- round-trip: print(parse(x)) reparses to an equal tree --


_NAMES = st.sampled_from(["a", "b", "c", "foo", "tmp", "x1", "col"])
_TYPES = st.sampled_from(["float", "int", "bool", "vec2", "vec3", "vec4", "mat3"])
_SWIZZLES = st.sampled_from(["x", "xy", "rgb", "xyzw", "rgba", "yx", "w"])
_CALL_NAMES = st.sampled_from(
    ["sin", "cos", "mix", "clamp", "vec2", "vec3", "vec4", "float", "mat3", "foo"]
)
_FLOATS = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)


def _exprs():
    leaves = st.one_of(
        st.builds(n.FloatLit, _FLOATS, st.just("")),
        st.builds(n.IntLit, st.integers(min_value=0, max_value=10_000)),
        st.builds(n.BoolLit, st.booleans()),
        st.builds(n.VarRef, _NAMES),
    )

    def extend(children):
        return st.one_of(
            st.builds(n.Unary, st.sampled_from(["-", "!"]), children),
            st.builds(
                n.Binary,
                st.sampled_from(["+", "-", "*", "/", "<", ">", "<=", ">=",
                                 "==", "!=", "&&", "||"]),
                children,
                children,
            ),
            st.builds(n.Ternary, children, children, children),
            st.builds(n.Swizzle, children, _SWIZZLES),
            st.builds(n.Call, _CALL_NAMES, st.lists(children, max_size=3)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


def _stmts():
    base = st.one_of(
        st.builds(n.VarDecl, _TYPES, _NAMES, st.one_of(st.none(), _exprs()),
                  st.booleans()),
        st.builds(
            n.Assign,
            _NAMES,
            st.one_of(st.none(), _SWIZZLES),
            st.sampled_from(["=", "+=", "-=", "*=", "/="]),
            _exprs(),
        ),
        st.builds(n.ExprStmt, _exprs()),
        st.builds(n.Return, st.one_of(st.none(), _exprs())),
    )

    def extend(children):
        blocks = st.builds(n.Block, st.lists(children, max_size=3))
        return st.one_of(
            blocks,
            st.builds(n.If, _exprs(), blocks,
                      st.one_of(st.none(), blocks)),
            st.builds(
                n.For,
                _NAMES,
                st.integers(min_value=-8, max_value=8),
                st.sampled_from(["<", "<="]),
                st.integers(min_value=-8, max_value=8),
                st.builds(n.ForUpdate, _NAMES, st.sampled_from(["++", "--", "+=", "-="]),
                          st.integers(min_value=1, max_value=4)),
                blocks,
            ),
        )

    return st.recursive(base, extend, max_leaves=8)


def _fix_for_vars(program: n.Program) -> n.Program:
    """For-loop condition/update must reuse the loop variable."""

    def walk(stmt):
        if isinstance(stmt, n.For):
            stmt.update.var = stmt.var
            walk(stmt.body)
        elif isinstance(stmt, n.Block):
            for child in stmt.stmts:
                walk(child)
        elif isinstance(stmt, n.If):
            walk(stmt.then)
            if stmt.other is not None:
                walk(stmt.other)

    for fn in program.functions:
        walk(fn.body)
    return program


_PROGRAMS = st.builds(
    n.Program,
    st.booleans(),
    st.lists(
        st.builds(n.GlobalDecl, st.sampled_from(["uniform", "varying"]),
                  st.sampled_from(["float", "vec2", "vec3", "sampler2D"]), _NAMES),
        max_size=3,
    ),
    st.lists(
        st.builds(
            n.FunctionDef,
            st.sampled_from(["void", "float", "vec3"]),
            _NAMES,
            st.lists(st.builds(n.Param, _TYPES, _NAMES), max_size=3),
            st.builds(n.Block, st.lists(_stmts(), max_size=4)),
        ),
        max_size=3,
    ),
).map(_fix_for_vars)


@settings(max_examples=200, deadline=None)
@given(_PROGRAMS)
def test_round_trip(program):
    text = format_program(program)
    lexed = tokenize(text)
    assert lexed.ok, (text, lexed.error)
    reparsed = parse(lexed.tokens)
    assert reparsed.program is not None, (text, [str(d) for d in reparsed.diagnostics])
    assert reparsed.program == program, text


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet=" \nabxyz_0123.+-*/<>=!&|(){};,?:forintvec", max_size=80))
def test_parser_never_crashes(source):
    lexed = tokenize(source)
    if lexed.ok:
        result = parse(lexed.tokens)
        assert len(result.diagnostics) <= 10


def test_library_round_trip(library_shaders):
    for name, shader in library_shaders.items():
        text = format_program(shader.program)
        reparsed = parse(tokenize(text).tokens)
        assert reparsed.program == shader.program, name
