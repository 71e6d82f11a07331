"""Run configuration: a TOML file validated into `RunConfig`.

Backends are declared as tables with a `type` key, e.g.

    [kfm.embedder]
    type = "http"
    endpoint_url = "${EMBED_URL}"

`${NAME}` is replaced from the environment (after loading `.env`), and relative
paths resolve against the config file's directory.
"""

from __future__ import annotations

import inspect
import logging
import os
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from abc import ABCMeta, abstractmethod
from importlib import resources
from pathlib import Path
from typing import Annotated, Any, ClassVar, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator

from framecue.backends.config import backends_config
from framecue.backends.shared.base_http import DEFAULT_RETRY_POLICY, RetryPolicy
from framecue.errors import ConfigError
from framecue.frames.sampling import FixedStep, SamplingStepUnion
from framecue.prompter.config import POSITIONS, Position, RGB, VpConfig
from framecue.prompter.marker import default_marker, load_marker
from framecue.prompting import DatasetStyle

logger = logging.getLogger(__name__)

_ENV_VAR = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

# ############################################################
# Backend specs
# ############################################################

SPEC_REGISTRY: dict[str, dict[str, type[BackendSpec]]] = {"embedder": {}, "extractor": {}, "model": {}}


class BackendSpec(BaseModel, metaclass=ABCMeta):
    """Configuration for one backend; `build()` instantiates the registered class for `type`."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    role: ClassVar[str]

    @classmethod
    def __pydantic_init_subclass__(cls, **kwargs: Any):
        super().__pydantic_init_subclass__(**kwargs)
        if not inspect.isabstract(cls) and "type" in cls.model_fields:
            SPEC_REGISTRY[cls.role][cls.model_fields["type"].default] = cls

    @property
    def backend_class(self) -> type:
        return backends_config[self.role][self.type]  # type: ignore[attr-defined]

    @abstractmethod
    def build(self) -> Any:
        raise NotImplementedError


class HttpSpec(BackendSpec, metaclass=ABCMeta):
    endpoint_url: str
    auth_token: str | None = None
    timeout_s: float = Field(default=60.0, gt=0)
    retry: RetryPolicy = DEFAULT_RETRY_POLICY


class HashEmbedderSpec(BackendSpec):
    role: ClassVar[str] = "embedder"
    type: Literal["hash"] = "hash"
    dim: int = Field(default=64, ge=2)
    seed: int = 0

    def build(self):
        return self.backend_class(dim=self.dim, seed=self.seed)


class HttpEmbedderSpec(HttpSpec):
    role: ClassVar[str] = "embedder"
    type: Literal["http"] = "http"
    batch_size: PositiveInt = 32

    def build(self):
        return self.backend_class(
            self.endpoint_url, self.auth_token, batch_size=self.batch_size, timeout_s=self.timeout_s, retry=self.retry
        )


class RuleExtractorSpec(BackendSpec):
    role: ClassVar[str] = "extractor"
    type: Literal["rule"] = "rule"

    def build(self):
        return self.backend_class()


class LlmExtractorSpec(HttpSpec):
    role: ClassVar[str] = "extractor"
    type: Literal["llm"] = "llm"
    model_name: str
    max_tokens: PositiveInt = 128

    def build(self):
        return self.backend_class(
            self.endpoint_url,
            self.model_name,
            self.auth_token,
            max_tokens=self.max_tokens,
            timeout_s=self.timeout_s,
            retry=self.retry,
        )


class MockModelSpec(BackendSpec):
    role: ClassVar[str] = "model"
    type: Literal["mock"] = "mock"
    marker: Path | None = None
    marker_word: str = "panda"
    text_color: RGB = (255, 0, 0)
    strict: bool = False

    def build(self):
        marker = load_marker(self.marker) if self.marker else default_marker()
        return self.backend_class(marker=marker, marker_word=self.marker_word, text_color=self.text_color, strict=self.strict)


class ChatModelSpec(HttpSpec):
    role: ClassVar[str] = "model"
    type: Literal["chat"] = "chat"
    model_name: str
    max_tokens: PositiveInt = 256
    temperature: float = Field(default=0.0, ge=0)
    frame_text: Literal["none", "interleaved"] = "none"
    max_payload_bytes: PositiveInt = 20 * 1024 * 1024

    def build(self):
        return self.backend_class(
            self.endpoint_url,
            self.model_name,
            self.auth_token,
            max_tokens=self.max_tokens,
            temperature=self.temperature,
            frame_text=self.frame_text,
            max_payload_bytes=self.max_payload_bytes,
            timeout_s=self.timeout_s,
            retry=self.retry,
        )


EmbedderSpec = Annotated[HashEmbedderSpec | HttpEmbedderSpec, Field(discriminator="type")]
ExtractorSpec = Annotated[RuleExtractorSpec | LlmExtractorSpec, Field(discriminator="type")]
ModelSpec = Annotated[MockModelSpec | ChatModelSpec, Field(discriminator="type")]

# ############################################################
# Run configuration
# ############################################################


class SamplingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps: list[SamplingStepUnion] = Field(default_factory=lambda: [FixedStep(n=8)], min_length=1)


class KfmConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tau: float = Field(default=0.22, ge=-1.0, le=1.0)
    embedder: EmbedderSpec = Field(default_factory=HashEmbedderSpec)
    extractor: ExtractorSpec = Field(default_factory=RuleExtractorSpec)


class ProbeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frame_counts: list[PositiveInt] = Field(default_factory=lambda: [8, 16, 32, 64], min_length=1)
    positions: list[Position] = Field(default_factory=lambda: list(POSITIONS), min_length=1)
    synthetic_videos: PositiveInt = 20
    synthetic_size: tuple[PositiveInt, PositiveInt] = (224, 224)
    marker: Path | None = None
    marker_word: str = Field(default="panda", min_length=1)
    include_no_vp: bool = True


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    vp: VpConfig = Field(default_factory=VpConfig)
    vp_enabled: bool = True
    kfm: KfmConfig = Field(default_factory=KfmConfig)
    model: ModelSpec = Field(default_factory=MockModelSpec)
    prompt_profile: DatasetStyle = "generic"
    in_flight: PositiveInt = 4
    seed: int = 0
    timeline: bool = False
    manifest: Path | None = None
    questions: Path | None = None
    output_dir: Path = Path("runs")
    probe: ProbeConfig = Field(default_factory=ProbeConfig)

    @field_validator("prompt_profile", mode="before")
    @classmethod
    def _lower(cls, value: Any) -> Any:
        return value.lower() if isinstance(value, str) else value


# ############################################################
# Loading
# ############################################################

_PATH_KEYS: tuple[tuple[str, ...], ...] = (
    ("manifest",),
    ("questions",),
    ("output_dir",),
    ("probe", "marker"),
    ("model", "marker"),
)


def interpolate_env(value: Any, where: str = "") -> Any:
    """Replace ${NAME} in every string of a nested structure; unknown names are a ConfigError."""
    if isinstance(value, dict):
        return {key: interpolate_env(item, f"{where}.{key}" if where else key) for key, item in value.items()}
    if isinstance(value, list):
        return [interpolate_env(item, f"{where}[{i}]") for i, item in enumerate(value)]
    if isinstance(value, str):

        def substitute(match: re.Match[str]) -> str:
            name = match.group(1)
            if name not in os.environ:
                raise ConfigError(f"{where}: environment variable '{name}' is not set")
            return os.environ[name]

        return _ENV_VAR.sub(substitute, value)
    return value


def _resolve_paths(data: dict[str, Any], base_dir: Path) -> None:
    for keys in _PATH_KEYS:
        node = data
        for key in keys[:-1]:
            node = node.get(key) if isinstance(node, dict) else None
        if isinstance(node, dict) and isinstance(node.get(keys[-1]), str):
            path = Path(node[keys[-1]]).expanduser()
            node[keys[-1]] = str(path if path.is_absolute() else base_dir / path)


def read_config_data(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: invalid TOML: {e}") from e
    load_dotenv()
    data = interpolate_env(data)
    _resolve_paths(data, path.parent.resolve())
    return data


def validate_config(data: dict[str, Any], source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {e}") from e


def load_run_config(path: str | Path | None = None) -> RunConfig:
    if path is None:
        return RunConfig()
    return validate_config(read_config_data(path), str(path))


def merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Recursive dict update; override values win."""
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def with_overrides(config: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    data = merge(config.model_dump(mode="json"), overrides)
    return validate_config(data, "overrides")


# ############################################################
# Presets
# ############################################################


def load_presets() -> dict[str, Any]:
    text = resources.files("framecue.configs").joinpath("presets.toml").read_text(encoding="utf-8")
    return tomllib.loads(text)


def preset_names() -> list[str]:
    return sorted(load_presets()["presets"])


def preset_overrides(name: str) -> dict[str, Any]:
    """Config overrides for "<model>/<dataset>/<regime>": tau, s, o, prompt profile and sampling."""
    presets = load_presets()
    if name not in presets["presets"]:
        raise ConfigError(f"unknown preset '{name}', expected one of: {', '.join(sorted(presets['presets']))}")
    row = presets["presets"][name]
    _, dataset, regime = name.split("/")
    return {
        "kfm": {"tau": row["tau"]},
        "vp": {"size_divisor": row["s"], "outline": row["o"]},
        "prompt_profile": dataset,
        "sampling": {"steps": presets["regimes"][regime]["steps"]},
    }
