"""The fixed binding surface every accepted shader must stay inside."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class InterfaceContract:
    """Names and types a shader may declare and the output it must write.

    The defaults are constants of the whole system: the renderer, the
    prompts, and the browser preview all bind exactly these.
    """

    output_name: str = "gl_FragColor"
    output_type: str = "vec4"
    uniforms: dict = field(
        default_factory=lambda: {
            "uMainTex": "sampler2D",
            "uTime": "float",
            "uResolution": "vec2",
        }
    )
    varyings: dict = field(default_factory=lambda: {"vUv": "vec2"})


DEFAULT_CONTRACT = InterfaceContract()
