"""Report renderers package."""

from .base import BaseRenderer
from .machine import MachineRenderer
from .text import TextRenderer

RENDERERS = {"text": TextRenderer, "machine": MachineRenderer}


def get_renderer(name: str) -> BaseRenderer:
    """Get the renderer for ``--format``; unknown names fall back to text."""
    return RENDERERS.get(name, TextRenderer)()


__all__ = ["BaseRenderer", "MachineRenderer", "TextRenderer", "RENDERERS", "get_renderer"]
