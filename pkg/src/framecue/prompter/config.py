from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt

Position = Literal["TL", "TR", "BL", "BR"]
Style = Literal["style1", "style2", "style3", "style4"]
PaddingMode = Literal["overlay", "letterbox"]
Numbering = Literal["sequential", "random"]
RGB = tuple[int, int, int]

POSITIONS: tuple[Position, ...] = ("TL", "TR", "BL", "BR")

POSITION_WORDS: dict[Position, str] = {
    "TL": "top-left",
    "TR": "top-right",
    "BL": "bottom-left",
    "BR": "bottom-right",
}


class VpConfig(BaseModel):
    """How frame-index labels are drawn into each frame."""

    model_config = ConfigDict(frozen=True)

    position: Position = "BL"
    style: Style = "style1"
    size_divisor: PositiveInt = Field(default=12, description="s: fontsize = floor(min(w, h) / s)")
    outline: bool = Field(default=False, description="o: stroke every glyph before filling it")
    padding_mode: PaddingMode = "overlay"
    text_color: RGB = (255, 0, 0)
    outline_color: RGB = (0, 0, 0)
    margin_px: NonNegativeInt | Literal["auto"] = "auto"
    numbering: Numbering = "sequential"
    numbering_seed: int = 0

    @property
    def is_top(self) -> bool:
        return self.position in ("TL", "TR")

    @property
    def is_left(self) -> bool:
        return self.position in ("TL", "BL")

    @property
    def position_word(self) -> str:
        return POSITION_WORDS[self.position]
