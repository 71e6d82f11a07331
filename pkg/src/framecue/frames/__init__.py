from framecue.frames.source import SampledItem, SampledSequence, VideoSource, dump_manifest, load_manifest
from framecue.frames.sampling import (
    FixedStep,
    FpsCappedStep,
    FractionStep,
    SamplingStepUnion,
    apply_steps,
    sample_fixed,
    sample_fps_capped,
    sample_fraction,
    uniform_indices,
)

__all__ = [
    "SampledItem",
    "SampledSequence",
    "VideoSource",
    "dump_manifest",
    "load_manifest",
    "FixedStep",
    "FpsCappedStep",
    "FractionStep",
    "SamplingStepUnion",
    "apply_steps",
    "sample_fixed",
    "sample_fps_capped",
    "sample_fraction",
    "uniform_indices",
]
