"""Bundled 5x7 bitmap font used for every label.

Shipping the font as data keeps renders byte-identical across platforms and lets
the mock decoder read labels back by exact template matching.
"""

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from framecue.errors import LabelDecodeError, RenderError

GLYPH_W = 5
GLYPH_H = 7
ADVANCE = GLYPH_W + 1

# Every glyph a label can start with lights column 0, and every digit lights
# rows 0 and 6, so a label's bounding box pins down both the cell grid and
# the scale factor.
_GLYPH_ROWS: dict[str, tuple[str, ...]] = {
    "0": (".XXX.", "X...X", "X..XX", "X.X.X", "XX..X", "X...X", ".XXX."),
    "1": ("..X..", ".XX..", "X.X..", "..X..", "..X..", "..X..", "XXXXX"),
    "2": (".XXX.", "X...X", "....X", "...X.", "..X..", ".X...", "XXXXX"),
    "3": ("XXXX.", "....X", "....X", ".XXX.", "....X", "....X", "XXXX."),
    "4": ("...X.", "..XX.", ".X.X.", "X..X.", "XXXXX", "...X.", "...X."),
    "5": ("XXXXX", "X....", "XXXX.", "....X", "....X", "X...X", ".XXX."),
    "6": ("..XX.", ".X...", "X....", "XXXX.", "X...X", "X...X", ".XXX."),
    "7": ("XXXXX", "....X", "...X.", "..X..", ".X...", ".X...", ".X..."),
    "8": (".XXX.", "X...X", "X...X", ".XXX.", "X...X", "X...X", ".XXX."),
    "9": (".XXX.", "X...X", "X...X", ".XXXX", "....X", "...X.", ".XX.."),
    "f": ("..XX.", ".X...", "XXXX.", ".X...", ".X...", ".X...", ".X..."),
    "r": (".....", ".....", "X.XX.", "XX..X", "X....", "X....", "X...."),
    "a": (".....", ".....", ".XXX.", "....X", ".XXXX", "X...X", ".XXXX"),
    "m": (".....", ".....", "XX.X.", "X.X.X", "X.X.X", "X...X", "X...X"),
    "e": (".....", ".....", ".XXX.", "X...X", "XXXXX", "X....", ".XXX."),
    "#": (".X.X.", ".X.X.", "XXXXX", ".X.X.", "XXXXX", ".X.X.", ".X.X."),
    "t": (".X...", ".X...", "XXXX.", ".X...", ".X...", ".X..X", "..XX."),
    "=": (".....", ".....", "XXXXX", ".....", "XXXXX", ".....", "....."),
    ":": (".....", ".XX..", ".XX..", ".....", ".XX..", ".XX..", "....."),
    " ": (".....",) * GLYPH_H,
}


def _to_array(rows: tuple[str, ...]) -> np.ndarray:
    return np.array([[cell == "X" for cell in row] for row in rows], dtype=bool)


@dataclass(frozen=True)
class GlyphAtlas:
    glyphs: dict[str, np.ndarray] = field(
        default_factory=lambda: {char: _to_array(rows) for char, rows in _GLYPH_ROWS.items()}
    )

    @staticmethod
    def scale_for(fontsize: int) -> int:
        return max(1, fontsize // GLYPH_H)

    @staticmethod
    def text_size(text: str, scale: int) -> tuple[int, int]:
        return ((ADVANCE * len(text) - 1) * scale, GLYPH_H * scale)

    def text_mask(self, text: str, scale: int) -> np.ndarray:
        """Boolean (h, w) mask of `text` with every font pixel blown up to scale x scale."""
        missing = sorted({char for char in text if char not in self.glyphs})
        if missing:
            raise RenderError(f"Label characters not in the glyph atlas: {missing}")
        width, height = self.text_size(text, scale)
        mask = np.zeros((height, width), dtype=bool)
        block = np.ones((scale, scale), dtype=bool)
        for position, char in enumerate(text):
            x0 = position * ADVANCE * scale
            mask[:, x0 : x0 + GLYPH_W * scale] = np.kron(self.glyphs[char], block)
        return mask

    def decode(self, mask: np.ndarray) -> str:
        """Read back the text drawn into a boolean pixel mask (True where the fill color is)."""
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        if rows.size == 0:
            raise LabelDecodeError("no label pixels found")
        y0, y1, x0, x1 = rows[0], rows[-1], cols[0], cols[-1]
        height = y1 - y0 + 1
        if height % GLYPH_H:
            raise LabelDecodeError(f"label height {height} is not a multiple of {GLYPH_H}")
        scale = height // GLYPH_H
        cells = -(-(x1 - x0 + 1) // (ADVANCE * scale))

        lookup = {glyph.tobytes(): char for char, glyph in self.glyphs.items()}
        chars = []
        for cell in range(cells):
            left = x0 + cell * ADVANCE * scale
            region = mask[y0 : y0 + height, left : left + GLYPH_W * scale]
            if region.shape != (height, GLYPH_W * scale):
                region = np.pad(region, ((0, 0), (0, GLYPH_W * scale - region.shape[1])))
            sampled = np.ascontiguousarray(region[::scale, ::scale])
            char = lookup.get(sampled.tobytes())
            if char is None or not np.array_equal(np.kron(sampled, np.ones((scale, scale), dtype=bool)), region):
                raise LabelDecodeError(f"cell {cell} matches no glyph")
            chars.append(char)
        return "".join(chars)

    def read(self, image: Image.Image, color: tuple[int, int, int]) -> str:
        """Decode the label drawn in `color` anywhere in an RGB image."""
        pixels = np.asarray(image.convert("RGB"))
        return self.decode(np.all(pixels == np.array(color, dtype=np.uint8), axis=-1))


DEFAULT_ATLAS = GlyphAtlas()
