"""Natural-language-to-shader pipeline with a validated shader subset,
a CPU reference renderer, and a live-preview service."""

__version__ = "0.1.0"
