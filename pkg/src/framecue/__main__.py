import argparse
import json
import logging
import sys
import tempfile
from pathlib import Path
from typing import Any, get_args

from halo import Halo

from framecue.analysis.attention import layer_mean_attention, load_dump, relative_change
from framecue.analysis.position_lab import DEGRADATION_MODES, MRopeTriplet, RopeLayout, layout_table, mrope_layout_table
from framecue.errors import ConfigError, FramecueError
from framecue.frames.sampling import apply_steps
from framecue.frames.source import VideoSource, load_manifest
from framecue.harness.config import (
    MockModelSpec,
    RunConfig,
    load_run_config,
    preset_names,
    preset_overrides,
    with_overrides,
)
from framecue.harness.pipeline import Backends, Pipeline, StageFailure, plan_requests
from framecue.harness.questions import load_questions
from framecue.harness.report import aggregate, report_text, timing
from framecue.probe.bench import run_probe_suite
from framecue.probe.synthetic import make_synthetic_videos
from framecue.prompter.config import POSITIONS, Style
from framecue.prompter.marker import default_marker, load_marker
from framecue.prompter.render import apply_sequence
from framecue.prompting import DATASET_STYLES
from framecue.utils import dumps_stable, save_png

logger = logging.getLogger("framecue")

EXIT_OK, EXIT_STAGE_ERROR, EXIT_CONFIG_ERROR = 0, 1, 2


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    _ = parser.add_argument("--config", type=Path, help="Run configuration (TOML).", default=None)
    _ = parser.add_argument(
        "--preset",
        choices=preset_names(),
        metavar="MODEL/DATASET/REGIME",
        help="Apply a published tau/s/o setting, e.g. llava-video/videomme/20pct.",
        default=None,
    )
    _ = parser.add_argument("--vp-position", choices=POSITIONS, default=None)
    _ = parser.add_argument("--vp-style", choices=get_args(Style), default=None)
    _ = parser.add_argument("--vp-s", type=int, help="Font size divisor s.", default=None)
    _ = parser.add_argument(
        "--vp-outline", action=argparse.BooleanOptionalAction, help="Outline the label glyphs.", default=None
    )
    _ = parser.add_argument("--vp-padding", choices=["overlay", "letterbox"], default=None)
    _ = parser.add_argument("--no-vp", action="store_true", help="Run without frame labels.")
    _ = parser.add_argument("--tau", type=float, help="Keyword-frame similarity threshold.", default=None)
    _ = parser.add_argument("--seed", type=int, default=None)
    _ = parser.add_argument("--in-flight", type=int, help="Questions processed concurrently.", default=None)
    _ = parser.add_argument(
        "--profile",
        choices=DATASET_STYLES,
        help="Dataset prompt profile.",
        default=None,
    )
    _ = parser.add_argument("--manifest", type=Path, help="Video manifest (overrides the config).", default=None)
    _ = parser.add_argument("--output-dir", type=Path, default=None)
    _ = parser.add_argument("--debug", action="store_true", help="Enable debug logging.")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="framecue", description="Frame-index visual prompting and keyword-frame mapping for VideoLLMs."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    _ = commands.add_parser("render", parents=[common], help="Write labeled frames for every video in the manifest.")

    map_parser = commands.add_parser("map", parents=[common], help="Map question keywords to frames and print prompts.")
    _ = map_parser.add_argument("--questions", type=Path, default=None)

    eval_parser = commands.add_parser("eval", parents=[common], help="Run the full pipeline and write a report.")
    _ = eval_parser.add_argument("--questions", type=Path, default=None)
    _ = eval_parser.add_argument(
        "--dry-run", action="store_true", help="Print the resolved config and planned requests, contact nothing."
    )

    probe_parser = commands.add_parser("probe", parents=[common], help="Run the frame lookup / reverse-lookup probe.")
    _ = probe_parser.add_argument(
        "--model",
        choices=["mock", "config"],
        help="'mock' reads labels back from pixels; 'config' uses the [model] table of the config file.",
        default="mock",
    )
    _ = probe_parser.add_argument("--marker", type=Path, help="Marker image (defaults to a drawn face).", default=None)
    _ = probe_parser.add_argument("--marker-word", type=str, default=None)
    _ = probe_parser.add_argument("--videos", type=int, help="Synthetic videos when no manifest is given.", default=None)
    _ = probe_parser.add_argument("--frame-counts", type=int, nargs="+", default=None)

    pos_parser = commands.add_parser("poslab", parents=[common], help="Print position-index tables.")
    _ = pos_parser.add_argument("--text-len", type=int, default=10)
    _ = pos_parser.add_argument("--tokens-per-frame", type=int, default=4)
    _ = pos_parser.add_argument("--frames", type=int, default=2)
    _ = pos_parser.add_argument("--mode", choices=DEGRADATION_MODES, default=None, help="Only this mode.")
    _ = pos_parser.add_argument("--mrope", action="store_true", help="Print (t, h, w) triplets instead.")
    _ = pos_parser.add_argument("--grid", type=int, nargs=2, metavar=("H", "W"), default=(2, 2))

    attn_parser = commands.add_parser("attn", parents=[common], help="Layer-wise attention on image tokens.")
    _ = attn_parser.add_argument("dump", type=Path, help="Attention dump (.json or .npz).")
    _ = attn_parser.add_argument("--baseline", type=Path, help="Dump of the same input without labels.", default=None)
    return parser


def setup_logging(debug: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def flag_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    vp = {
        key: value
        for key, value in {
            "position": args.vp_position,
            "style": args.vp_style,
            "size_divisor": args.vp_s,
            "outline": args.vp_outline,
            "padding_mode": args.vp_padding,
        }.items()
        if value is not None
    }
    if vp:
        overrides["vp"] = vp
    if args.no_vp:
        overrides["vp_enabled"] = False
    if args.tau is not None:
        overrides["kfm"] = {"tau": args.tau}
    for key in ("seed", "in_flight", "manifest", "output_dir", "questions"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value) if isinstance(value, Path) else value
    if args.profile is not None:
        overrides["prompt_profile"] = args.profile
    return overrides


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """File values, then the preset, then individual flags."""
    config = load_run_config(args.config)
    if args.preset:
        config = with_overrides(config, preset_overrides(args.preset))
    return with_overrides(config, flag_overrides(args))


def _sources(config: RunConfig) -> list[VideoSource]:
    if config.manifest is None:
        raise ConfigError("no video manifest: set 'manifest' in the config or pass --manifest")
    return load_manifest(config.manifest)


def cmd_render(config: RunConfig, args: argparse.Namespace) -> int:
    out_dir = config.output_dir / "frames"
    sources = _sources(config)
    with Halo(text="Rendering", stream=sys.stderr, enabled=sys.stderr.isatty()) as halo:
        for source in sources:
            halo.text = f"Rendering {source.video_id}"
            seq = apply_steps(source, config.sampling.steps)
            for frame in apply_sequence(seq, config.vp, enabled=config.vp_enabled, max_workers=config.in_flight):
                save_png(frame.pixels, out_dir / source.video_id / f"{frame.display_index:04d}.png")
    logger.info(f"Wrote labeled frames for {len(sources)} videos to {out_dir}")
    return EXIT_OK


def _questions(config: RunConfig):
    if config.questions is None:
        raise ConfigError("no question file: set 'questions' in the config or pass --questions")
    return load_questions(config.questions)


def cmd_map(config: RunConfig, args: argparse.Namespace) -> int:
    pipeline = Pipeline(config, Backends.from_config(config), _sources(config))
    status = EXIT_OK
    for question in _questions(config):
        try:
            prepared = pipeline.prepare(question)
        except StageFailure as e:
            logger.warning(f"{question.id}: {e}")
            status = EXIT_STAGE_ERROR
            continue
        row = {
            "question_id": question.id,
            "mappings": [mapping.model_dump(mode="json") for mapping in prepared.mappings],
            "augmented_prompt": prepared.user_prompt,
        }
        print(json.dumps(row, ensure_ascii=False))
    return status


def cmd_eval(config: RunConfig, args: argparse.Namespace) -> int:
    questions = _questions(config)
    sources = _sources(config)
    if args.dry_run:
        print(dumps_stable({"config": config.model_dump(mode="json"), "plan": plan_requests(questions, sources, config)}), end="")
        return EXIT_OK

    pipeline = Pipeline(config, Backends.from_config(config), sources)
    with Halo(text=f"Answering {len(questions)} questions", stream=sys.stderr, enabled=sys.stderr.isatty()):
        records = pipeline.run_all(questions)

    report = aggregate(records)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(dumps_stable(report), encoding="utf-8")
    (out_dir / "report.txt").write_text(report_text(report), encoding="utf-8")
    (out_dir / "timing.json").write_text(dumps_stable(timing(records)), encoding="utf-8")
    with (out_dir / "records.jsonl").open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.model_dump_json() + "\n")
    print(report_text(report), end="")
    logger.info(f"Report written to {out_dir}")
    return EXIT_OK if all(record.evaluated for record in records) else EXIT_STAGE_ERROR


def cmd_probe(config: RunConfig, args: argparse.Namespace) -> int:
    probe = config.probe
    marker_path = args.marker or probe.marker
    marker = load_marker(marker_path) if marker_path else default_marker()
    marker_word = args.marker_word or probe.marker_word

    if args.model == "config":
        model = config.model.build()
    else:
        # the mock must look for the same marker the suite pastes in
        model = MockModelSpec(marker=marker_path, marker_word=marker_word, text_color=config.vp.text_color).build()

    with tempfile.TemporaryDirectory() as scratch:
        if config.manifest is not None:
            sources = load_manifest(config.manifest)
        else:
            sources = make_synthetic_videos(
                Path(scratch),
                count=args.videos or probe.synthetic_videos,
                frames=max(args.frame_counts or probe.frame_counts),
                size=probe.synthetic_size,
                seed=config.seed,
            )
        table = run_probe_suite(
            sources,
            args.frame_counts or probe.frame_counts,
            probe.positions,
            model,
            config.vp,
            config.seed,
            marker=marker,
            marker_word=marker_word,
            include_no_vp=probe.include_no_vp,
            in_flight=config.in_flight,
            spinner=sys.stderr.isatty(),
        )

    config.output_dir.mkdir(parents=True, exist_ok=True)
    (config.output_dir / "probe.json").write_text(dumps_stable(table.to_dict()), encoding="utf-8")
    print(table.to_text(), end="")
    return EXIT_STAGE_ERROR if table.failures else EXIT_OK


def cmd_poslab(config: RunConfig, args: argparse.Namespace) -> int:
    modes = [args.mode] if args.mode else list(DEGRADATION_MODES)
    if args.mrope:
        grid_h, grid_w = args.grid
        for mode in modes:
            print(f"[{mode}]")
            for base, degraded in mrope_layout_table(grid_h, grid_w, args.frames, mode, MRopeTriplet(args.text_len, 0, 0)):
                print(f"  {base.as_tuple()} -> {degraded.as_tuple()}")
        return EXIT_OK

    layout = RopeLayout(text_len=args.text_len, tokens_per_frame=args.tokens_per_frame, num_frames=args.frames)
    width = len(str(layout.text_len + layout.num_frames * layout.tokens_per_frame))
    for mode in modes:
        table = layout_table(layout, mode)
        rows = [table[i : i + layout.tokens_per_frame] for i in range(0, len(table), layout.tokens_per_frame)]
        print(f"[{mode}]")
        for k, row in enumerate(rows, start=1):
            print(f"  frame {k}: " + " ".join(f"{value:>{width}}" for value in row))
    return EXIT_OK


def cmd_attn(config: RunConfig, args: argparse.Namespace) -> int:
    means = layer_mean_attention(load_dump(args.dump))
    if args.baseline is None:
        for layer, value in enumerate(means):
            print(f"layer {layer:>3}  {value:.6f}")
        return EXIT_OK

    baseline = layer_mean_attention(load_dump(args.baseline))
    change = relative_change(means, baseline)
    print(f"{'layer':>5}  {'with':>10}  {'without':>10}  {'change':>8}")
    for layer, (a, b, c) in enumerate(zip(means, baseline, change.per_layer)):
        print(f"{layer:>5}  {a:>10.6f}  {b:>10.6f}  {c * 100:>7.2f}%")
    print(f"overall change {change.overall * 100:.2f}%, mean of layer changes {change.layer_mean * 100:.2f}%")
    return EXIT_OK


COMMANDS = {
    "render": cmd_render,
    "map": cmd_map,
    "eval": cmd_eval,
    "probe": cmd_probe,
    "poslab": cmd_poslab,
    "attn": cmd_attn,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.debug)
    try:
        config = resolve_config(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    try:
        return COMMANDS[args.command](config, args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except (FramecueError, OSError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_STAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
