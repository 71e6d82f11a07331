"""Layer-wise attention mass on image tokens, from exported attention dumps.

A dump holds one (H, T, K) softmax tensor per layer and a length-K mask picking
the image-token columns. Two containers are supported:

  - `.json`: {"query_mode", "image_token_mask": [bool], "layers": [[[[float]]]]}
    with layers indexed [layer][head][row][column];
  - `.npz`: arrays `attention` (L, H, T, K), `image_token_mask` (K,) and
    `query_mode` (0-d string).
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from framecue.errors import DumpError

logger = logging.getLogger(__name__)

QueryMode = Literal["all_rows", "last_row"]

ROW_SUM_TOLERANCE = 1e-4


@dataclass(frozen=True, eq=False)
class AttentionDump:
    attention: np.ndarray  # (L, H, T, K)
    image_token_mask: np.ndarray  # (K,) bool
    query_mode: QueryMode = "all_rows"

    def __post_init__(self):
        attention = np.asarray(self.attention, dtype=np.float64)
        mask = np.asarray(self.image_token_mask)
        object.__setattr__(self, "attention", attention)
        object.__setattr__(self, "image_token_mask", mask.astype(bool))
        self.validate()

    @property
    def num_layers(self) -> int:
        return self.attention.shape[0]

    @property
    def num_heads(self) -> int:
        return self.attention.shape[1]

    def validate(self) -> None:
        attention, mask = self.attention, self.image_token_mask
        if self.query_mode not in ("all_rows", "last_row"):
            raise DumpError(f"unknown query_mode '{self.query_mode}'")
        if attention.ndim != 4 or 0 in attention.shape:
            raise DumpError(f"attention must be a non-empty (layers, heads, rows, columns) array, got shape {attention.shape}")
        if mask.ndim != 1 or mask.shape[0] != attention.shape[3]:
            raise DumpError(f"image_token_mask has shape {mask.shape}, expected ({attention.shape[3]},)")
        if not mask.any():
            raise DumpError("image_token_mask selects no columns")
        if not np.all(np.isfinite(attention)):
            raise DumpError(f"non-finite attention at (layer, head, row, column) {_first(~np.isfinite(attention))}")
        if np.any(attention < 0):
            raise DumpError(f"negative attention at (layer, head, row, column) {_first(attention < 0)}")
        bad_rows = np.abs(attention.sum(axis=-1) - 1.0) > ROW_SUM_TOLERANCE
        if bad_rows.any():
            layer, head, row = _first(bad_rows)
            total = attention[layer, head, row].sum()
            raise DumpError(f"layer {layer} head {head} row {row} sums to {total:.6f}, expected 1 +/- {ROW_SUM_TOLERANCE}")


def _first(flags: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argwhere(flags)[0])


def layer_mean_attention(dump: AttentionDump) -> list[float]:
    """Per layer: image-column mass per query row, averaged over rows and heads."""
    attention = dump.attention
    if dump.query_mode == "last_row":
        attention = attention[:, :, -1:, :]
    image_mass = attention[..., dump.image_token_mask].sum(axis=-1)  # (L, H, T)
    return [float(value) for value in image_mass.mean(axis=(1, 2))]


@dataclass(frozen=True)
class RelativeChange:
    per_layer: list[float]
    layer_mean: float
    overall: float


def relative_change(with_vp: Sequence[float], without_vp: Sequence[float]) -> RelativeChange:
    """Relative increase of image attention with visual prompts, per layer and overall.

    `layer_mean` averages the per-layer ratios; `overall` compares the layer
    averages. The two differ whenever baselines vary across layers.
    """
    a = np.asarray(with_vp, dtype=np.float64)
    b = np.asarray(without_vp, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError(f"need two equal-length non-empty layer lists, got {a.shape} and {b.shape}")
    if np.any(b <= 0):
        raise ValueError(f"baseline attention must be positive, layer {int(np.flatnonzero(b <= 0)[0])} is {b[b <= 0][0]}")
    per_layer = (a - b) / b
    overall = (a.mean() - b.mean()) / b.mean()
    return RelativeChange(per_layer=per_layer.tolist(), layer_mean=float(per_layer.mean()), overall=float(overall))


def load_dump(path: str | Path) -> AttentionDump:
    path = Path(path)
    if not path.is_file():
        raise DumpError(f"dump not found: {path}")
    if path.suffix == ".npz":
        try:
            with np.load(path, allow_pickle=False) as archive:
                attention = archive["attention"]
                mask = archive["image_token_mask"]
                query_mode = str(archive["query_mode"]) if "query_mode" in archive.files else "all_rows"
        except (KeyError, OSError, ValueError) as e:
            raise DumpError(f"{path}: unreadable npz dump: {e}") from e
        return AttentionDump(attention=attention, image_token_mask=mask, query_mode=query_mode)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DumpError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(data, dict) or "layers" not in data or "image_token_mask" not in data:
        raise DumpError(f"{path}: expected an object with 'layers' and 'image_token_mask'")
    return AttentionDump(
        attention=_layers_to_array(data["layers"]),
        image_token_mask=np.asarray(data["image_token_mask"], dtype=bool),
        query_mode=data.get("query_mode", "all_rows"),
    )


def _layers_to_array(layers: list) -> np.ndarray:
    """Stack nested per-layer, per-head matrices, naming the first ragged one."""
    if not isinstance(layers, list) or not layers:
        raise DumpError("'layers' must be a non-empty list")
    expected: tuple[int, ...] | None = None
    for layer_index, layer in enumerate(layers):
        if not isinstance(layer, list) or not layer:
            raise DumpError(f"layer {layer_index} must be a non-empty list of heads")
        for head_index, head in enumerate(layer):
            try:
                shape = np.asarray(head, dtype=np.float64).shape
            except ValueError as e:
                raise DumpError(f"layer {layer_index} head {head_index} is ragged: {e}") from e
            shape = (len(layer), *shape)
            if expected is None:
                expected = shape
            elif shape != expected:
                raise DumpError(f"layer {layer_index} head {head_index} has shape {shape}, expected {expected}")
    return np.asarray(layers, dtype=np.float64)


def save_dump(dump: AttentionDump, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".npz":
        with path.open("wb") as handle:
            np.savez(
                handle,
                attention=dump.attention,
                image_token_mask=dump.image_token_mask,
                query_mode=np.array(dump.query_mode),
            )
        return
    data = {
        "query_mode": dump.query_mode,
        "image_token_mask": dump.image_token_mask.tolist(),
        "layers": dump.attention.tolist(),
    }
    path.write_text(json.dumps(data) + "\n", encoding="utf-8")
