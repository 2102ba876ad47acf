import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minifrag.eval import (
    EvalBudgetExceeded,
    Image,
    UniformSet,
    eval_fragment,
    render_frame,
    sample_texture,
)
from minifrag.lang import validate

HEADER = "uniform sampler2D uMainTex;\nuniform float uTime;\nvarying vec2 vUv;\n"


def shader(body, header=HEADER):
    result = validate(f"{header}void main() {{\n{body}\n}}\n")
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.shader


def shader_full(source):
    result = validate(source)
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.shader


def test_image_invariants():
    with pytest.raises(ValueError):
        Image(0, 1, b"")
    with pytest.raises(ValueError):
        Image(2, 2, b"\x00" * 15)  # needs 16 bytes
    img = Image.filled(2, 2, (1, 2, 3, 4))
    assert len(img.data) == 16


# -- texture sampling --


def test_single_texel_everywhere():
    img = Image.filled(1, 1, (255, 0, 0, 255))
    for uv in ((0.0, 0.0), (0.5, 0.5), (0.99, 0.01), (-2.0, 7.0)):
        assert np.allclose(sample_texture(img, uv), [1, 0, 0, 1])


def test_bilinear_midpoint():
    img = Image.from_array(
        np.array([[[0, 0, 0, 255], [255, 255, 255, 255]]], dtype=np.uint8)
    )
    # texel centers at u = 0.25 and 0.75; u = 0.5 blends them equally
    assert np.allclose(sample_texture(img, (0.5, 0.5)), [0.5, 0.5, 0.5, 1.0], atol=1e-6)


def test_clamp_to_edge():
    img = Image.from_array(
        np.array([[[10, 20, 30, 255], [200, 210, 220, 255]]], dtype=np.uint8)
    )
    far_left = sample_texture(img, (-3.0, 0.5))
    at_edge = sample_texture(img, (1e-6, 0.5))
    assert np.allclose(far_left, at_edge)
    assert np.allclose(far_left, np.array([10, 20, 30, 255]) / 255.0)


def test_uv_origin_is_bottom_left():
    # top row black, bottom row white (in display order)
    img = Image.from_array(
        np.array([[[0, 0, 0, 255]], [[255, 255, 255, 255]]], dtype=np.uint8)
    )
    assert np.allclose(sample_texture(img, (0.5, 0.25))[0], 1.0)  # bottom -> white
    assert np.allclose(sample_texture(img, (0.5, 0.75))[0], 0.0)  # top -> black


# -- fragment evaluation --


def test_passthrough_fragment():
    img = Image.filled(1, 1, (12, 34, 56, 255))
    sh = shader("gl_FragColor = texture2D(uMainTex, vUv);")
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=img))
    assert np.allclose(out, sample_texture(img, (0.5, 0.5)))


def test_invert_fragment():
    img = Image.filled(1, 1, (64, 128, 191, 255))  # 0.25, ~0.5, ~0.75
    sh = shader(
        "vec4 c = texture2D(uMainTex, vUv);\ngl_FragColor = vec4(1.0 - c.rgb, c.a);"
    )
    out = eval_fragment(sh, (0.3, 0.7), UniformSet(main_tex=img))
    assert np.allclose(out, [1 - 64 / 255, 1 - 128 / 255, 1 - 191 / 255, 1.0], atol=1e-6)


def test_grayscale_on_pure_red():
    img = Image.filled(1, 1, (255, 0, 0, 255))
    sh = shader(
        "vec4 c = texture2D(uMainTex, vUv);\n"
        "float y = dot(c.rgb, vec3(0.2126, 0.7152, 0.0722));\n"
        "gl_FragColor = vec4(y, y, y, c.a);"
    )
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=img))
    assert np.allclose(out, [0.2126, 0.2126, 0.2126, 1.0], atol=1e-6)


def test_default_output_when_branch_not_taken():
    sh = shader("if (uTime > 5.0) { gl_FragColor = vec4(1.0); }")
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=Image.filled(1, 1, (0, 0, 0, 255))))
    assert np.allclose(out, [0, 0, 0, 1])


def test_branching_matches_scalar_semantics():
    sh = shader(
        "vec4 c = texture2D(uMainTex, vUv);\n"
        "float v = 0.0;\n"
        "if (vUv.x < 0.5) { v = 1.0; } else { v = c.r; }\n"
        "gl_FragColor = vec4(v, 0.0, 0.0, 1.0);"
    )
    img = Image.filled(1, 1, (128, 0, 0, 255))
    left = eval_fragment(sh, (0.25, 0.5), UniformSet(main_tex=img))
    right = eval_fragment(sh, (0.75, 0.5), UniformSet(main_tex=img))
    assert left[0] == 1.0
    assert abs(right[0] - 128 / 255) < 1e-6


def test_for_loop_accumulates():
    sh = shader(
        "float acc = 0.0;\n"
        "for (int i = 0; i < 4; i++) { acc = acc + 0.125; }\n"
        "gl_FragColor = vec4(acc, 0.0, 0.0, 1.0);"
    )
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=Image.filled(1, 1, (0, 0, 0, 255))))
    assert abs(out[0] - 0.5) < 1e-7


def test_helper_function_with_early_return():
    src = HEADER + """
float pick(float x) {
    if (x < 0.5) {
        return 0.0;
    }
    return 1.0;
}
void main() {
    gl_FragColor = vec4(pick(vUv.x), pick(vUv.y), 0.0, 1.0);
}
"""
    sh = shader_full(src)
    img = Image.filled(1, 1, (0, 0, 0, 255))
    out = eval_fragment(sh, (0.25, 0.75), UniformSet(main_tex=img))
    assert out[0] == 0.0 and out[1] == 1.0


def test_division_by_zero_is_ieee():
    sh = shader(
        "float inf = 1.0 / 0.0;\n"
        "float nan = 0.0 / 0.0;\n"
        "gl_FragColor = vec4(inf, nan, -1.0 / 0.0, 1.0);"
    )
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=Image.filled(1, 1, (0, 0, 0, 255))))
    assert np.isinf(out[0]) and out[0] > 0
    assert np.isnan(out[1])
    assert np.isinf(out[2]) and out[2] < 0


def test_swizzle_write():
    sh = shader(
        "vec4 c = vec4(0.0, 0.0, 0.0, 1.0);\n"
        "c.rg = vec2(0.25, 0.5);\n"
        "c.b += 0.75;\n"
        "gl_FragColor = c;"
    )
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=Image.filled(1, 1, (0, 0, 0, 255))))
    assert np.allclose(out, [0.25, 0.5, 0.75, 1.0])


def test_mat3_column_major():
    # mat3 columns: first three scalars are column 0
    sh = shader(
        "mat3 m = mat3(0.0, 1.0, 0.0,  0.0, 0.0, 1.0,  1.0, 0.0, 0.0);\n"
        "vec3 v = m * vec3(1.0, 0.0, 0.0);\n"
        "gl_FragColor = vec4(v, 1.0);"
    )
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=Image.filled(1, 1, (0, 0, 0, 255))))
    # column 0 = (0,1,0): rotating x into y
    assert np.allclose(out[:3], [0.0, 1.0, 0.0])


def test_uniforms_bound():
    sh = shader(
        "gl_FragColor = vec4(uTime / 4.0, uResolution.x / 8.0, uResolution.y / 8.0, 1.0);",
        header=HEADER + "uniform vec2 uResolution;\n",
    )
    img = Image.filled(4, 2, (0, 0, 0, 255))
    out = eval_fragment(sh, (0.5, 0.5), UniformSet(main_tex=img, time=2.0))
    assert np.allclose(out, [0.5, 0.5, 0.25, 1.0])


# -- frame rendering --


def test_render_passthrough_identity(test_card):
    out = render_frame(shader("gl_FragColor = texture2D(uMainTex, vUv);"), test_card)
    assert out.data == test_card.data


def test_render_grayscale_2x2_card():
    card = Image.from_array(
        np.array(
            [
                [[255, 0, 0, 255], [0, 255, 0, 255]],
                [[0, 0, 255, 255], [255, 255, 255, 255]],
            ],
            dtype=np.uint8,
        )
    )
    sh = shader(
        "vec4 c = texture2D(uMainTex, vUv);\n"
        "float y = dot(c.rgb, vec3(0.2126, 0.7152, 0.0722));\n"
        "gl_FragColor = vec4(y, y, y, c.a);"
    )
    out = render_frame(sh, card).to_array()
    assert out[0, 0, 0] == 54    # red   -> 0.2126 * 255
    assert out[0, 1, 0] == 182   # green -> 0.7152 * 255
    assert out[1, 0, 0] == 18    # blue  -> 0.0722 * 255
    assert out[1, 1, 0] == 255
    assert (out[..., 3] == 255).all()
    for ch in (1, 2):
        assert (out[..., ch] == out[..., 0]).all()


def test_render_heat_vision_on_black():
    from minifrag.effects import effect_source

    sh = shader_full(effect_source("heat_vision"))
    black = Image.filled(8, 8, (0, 0, 0, 255))
    out = render_frame(sh, black).to_array()
    assert (out[..., 0] == 0).all()
    assert (out[..., 1] == 0).all()
    assert (out[..., 2] == 255).all()


def test_nan_quantizes_to_zero():
    sh = shader("gl_FragColor = vec4(0.0 / 0.0, 1.0 / 0.0, -1.0 / 0.0, 1.0);")
    out = render_frame(sh, Image.filled(2, 2, (0, 0, 0, 255))).to_array()
    assert (out[..., 0] == 0).all()    # NaN -> 0
    assert (out[..., 1] == 255).all()  # +inf clamps to 1
    assert (out[..., 2] == 0).all()    # -inf clamps to 0


def test_rounding_is_half_up():
    # 0.5 * 255 = 127.5 rounds up to 128
    sh = shader("gl_FragColor = vec4(0.5, 0.0, 0.0, 1.0);")
    out = render_frame(sh, Image.filled(1, 1, (0, 0, 0, 255))).to_array()
    assert out[0, 0, 0] == 128


def test_budget_exceeded():
    body = (
        "float acc = 0.0;\n"
        + "\n".join(
            f"for (int i{k} = 0; i{k} < 9999; i{k}++) {{ acc += 1.0; }}" for k in range(3)
        )
        + "\ngl_FragColor = vec4(acc);"
    )
    # 3 sequential big loops are fine (~60k statements)
    sh = shader(body)
    render_frame(sh, Image.filled(1, 1, (0, 0, 0, 255)))

    nested = HEADER + """
void main() {
    float acc = 0.0;
    for (int i = 0; i < 9999; i++) {
        for (int j = 0; j < 9999; j++) {
            acc += 1.0;
        }
    }
    gl_FragColor = vec4(acc);
}
"""
    sh2 = shader_full(nested)
    with pytest.raises(EvalBudgetExceeded) as exc:
        render_frame(sh2, Image.filled(1, 1, (0, 0, 0, 255)))
    assert exc.value.pixel is not None


def test_render_deterministic_across_threads(test_card, library_shaders):
    for name, sh in library_shaders.items():
        single = render_frame(sh, test_card, 1.7, threads=1)
        multi = render_frame(sh, test_card, 1.7, threads=4)
        assert single.data == multi.data, name


def test_render_deterministic_across_runs(test_card, library_shaders):
    sh = library_shaders["underwater"]
    assert render_frame(sh, test_card, 1.7).data == render_frame(sh, test_card, 1.7).data


def test_output_dimensions_match_input():
    sh = shader("gl_FragColor = texture2D(uMainTex, vUv);")
    img = Image.filled(7, 3, (1, 2, 3, 255))
    out = render_frame(sh, img)
    assert (out.width, out.height) == (7, 3)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=9),
    st.integers(min_value=1, max_value=9),
    st.randoms(use_true_random=False),
)
def test_range_property_random_images(w, h, rng):
    arr = np.array(
        [[[rng.randrange(256) for _ in range(4)] for _ in range(w)] for _ in range(h)],
        dtype=np.uint8,
    )
    img = Image.from_array(arr)
    sh = shader(
        "vec4 c = texture2D(uMainTex, vUv);\n"
        "vec3 warped = c.rgb / (c.b - 0.5);\n"  # may divide by ~zero
        "gl_FragColor = vec4(warped, c.a);"
    )
    out = render_frame(sh, img)
    assert len(out.data) == w * h * 4  # all bytes in range by construction


def test_grayscale_idempotent(test_card, library_shaders):
    sh = library_shaders["grayscale"]
    once = render_frame(sh, test_card).to_array().astype(int)
    twice = render_frame(sh, render_frame(sh, test_card)).to_array().astype(int)
    assert np.abs(once - twice).max() <= 1
