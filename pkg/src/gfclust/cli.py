"""Command-line entry point: run / ablate / spectrum / synth.

Configuration comes from a single JSON file (``--config``) whose keys mirror
TrainConfig plus a data source (exactly one of ``manifest`` or ``synthetic``);
command-line flags override file values. Relative manifest paths resolve
against the config file's directory. Exit codes: 0 success, 1 configuration
or data errors, 2 numeric divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .datasets import (
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    save_dataset,
    save_embedding,
    save_report,
)
from .encoders import EmbeddingPair, EncoderConfig, encode
from .errors import ConfigError, DivergenceError
from .filters import FilterConfig
from .graphs import MultiViewGraph
from .spectral import compare_spectra
from .training import TrainConfig, TrainingPipeline, train

VARIANTS = ("no_rec", "no_kl", "raw_adjacency", "low_pass_only", "raw_adjacency_low_pass")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route everything through
    # ConfigError so usage problems consistently exit 1
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gfclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--order", type=int, default=None)
        p.add_argument("--rho", type=float, default=None)
        p.add_argument("--gamma-rec", type=float, default=None, dest="gamma_rec")
        p.add_argument("--gamma-kl", type=float, default=None, dest="gamma_kl")

    common(sub.add_parser("run", help="train and report metrics"))
    ablate = sub.add_parser("ablate", help="train one ablation variant")
    common(ablate)
    ablate.add_argument("--variant", default=None, help="|".join(VARIANTS))
    common(sub.add_parser("spectrum", help="pretrain, then compare kernel spectra"))
    synth = sub.add_parser("synth", help="materialize a synthetic dataset")
    common(synth)
    return parser


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        payload = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a JSON object")
    return payload


def _train_config(payload: dict, args) -> TrainConfig:
    try:
        filter_cfg = FilterConfig(**payload.get("filter", {}))
        encoder_cfg = EncoderConfig(**payload.get("encoder", {}))
        cfg = TrainConfig(
            epochs=payload.get("epochs", 200),
            hr_refresh_interval=payload.get("hr_refresh_interval", 5),
            rho=payload.get("rho", 1.0),
            gamma_rec=payload.get("gamma_rec", 1.0),
            gamma_kl=payload.get("gamma_kl", 0.1),
            filter=filter_cfg,
            encoder=encoder_cfg,
            seed=payload.get("seed", 0),
            detach_s=payload.get("detach_s"),
            learning_rate=payload.get("learning_rate"),
        )
    except TypeError as exc:
        raise ConfigError(f"unknown config field: {exc}") from exc
    if args.epochs is not None:
        cfg = replace(cfg, epochs=args.epochs)
    if args.rho is not None:
        cfg = replace(cfg, rho=args.rho)
    if args.gamma_rec is not None:
        cfg = replace(cfg, gamma_rec=args.gamma_rec)
    if args.gamma_kl is not None:
        cfg = replace(cfg, gamma_kl=args.gamma_kl)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.order is not None:
        cfg = replace(cfg, filter=replace(cfg.filter, order=args.order))
    return cfg


def _load_graph(payload: dict, args) -> MultiViewGraph:
    has_manifest = "manifest" in payload
    has_synthetic = "synthetic" in payload
    if has_manifest == has_synthetic:
        raise ConfigError("config needs exactly one data source: 'manifest' or 'synthetic'")
    if has_manifest:
        base = Path(args.config).parent if args.config else Path.cwd()
        return load_dataset(base / payload["manifest"])
    return generate_synthetic(_synthetic_spec(payload, args))


def _synthetic_spec(payload: dict, args) -> SyntheticSpec:
    if "synthetic" not in payload:
        raise ConfigError("config has no 'synthetic' section")
    try:
        spec = SyntheticSpec(**payload["synthetic"])
    except TypeError as exc:
        raise ConfigError(f"bad synthetic spec: {exc}") from exc
    if args.seed is not None and args.command == "synth":
        spec = replace(spec, seed=args.seed)
    return spec


def _out_dir(payload: dict, args) -> Path:
    return Path(args.out) if args.out is not None else Path(payload.get("out", "gfclust-out"))


def _metrics_line(final: dict) -> str:
    def fmt(key):
        value = final.get(key)
        return "nan" if value is None else f"{value:.6f}"

    return f"NMI={fmt('nmi')} ARI={fmt('ari')} ACC={fmt('acc')} F1={fmt('f1')}"


def cmd_run(payload: dict, args) -> int:
    cfg = _train_config(payload, args)
    g = _load_graph(payload, args)
    report = train(g, cfg)
    out = _out_dir(payload, args)
    out.mkdir(parents=True, exist_ok=True)
    save_report(report, out / "report.json")
    save_embedding(report.state.consensus, out / "embedding.csv")
    print(_metrics_line(report.final))
    return 0


def apply_variant(cfg: TrainConfig, variant: str) -> TrainConfig:
    """Translate an ablation name into the matching config change."""
    if variant == "no_rec":
        return replace(cfg, gamma_rec=0.0)
    if variant == "no_kl":
        return replace(cfg, gamma_kl=0.0)
    if variant == "raw_adjacency":
        return replace(cfg, filter=replace(cfg.filter, matrix_source="raw_adjacency"))
    if variant == "low_pass_only":
        return replace(cfg, filter=replace(cfg.filter, family="low_pass"))
    if variant == "raw_adjacency_low_pass":
        return replace(
            cfg,
            filter=replace(cfg.filter, matrix_source="raw_adjacency", family="low_pass"),
        )
    raise ConfigError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def cmd_ablate(payload: dict, args) -> int:
    variant = args.variant if args.variant is not None else payload.get("variant")
    if variant is None:
        raise ConfigError("ablate needs --variant")
    cfg = apply_variant(_train_config(payload, args), variant)
    g = _load_graph(payload, args)
    report = train(g, cfg)
    out = _out_dir(payload, args)
    out.mkdir(parents=True, exist_ok=True)
    save_report(report, out / f"report_{variant}.json")
    save_embedding(report.state.consensus, out / f"embedding_{variant}.csv")
    print(_metrics_line(report.final))
    return 0


def cmd_spectrum(payload: dict, args) -> int:
    cfg = _train_config(payload, args)
    g = _load_graph(payload, args)
    pipeline = TrainingPipeline(g, cfg)
    out = _out_dir(payload, args)
    out.mkdir(parents=True, exist_ok=True)
    for view, (params_x, params_a) in enumerate(pipeline.models):
        pair = EmbeddingPair(
            z_x=encode(params_x, g.features), z_a=encode(params_a, g.adjacencies[view])
        )
        rep_a, rep_s = compare_spectra(g, view, pair, out_dir=out)
        print(
            f"view {view}: largest gap adjacency_rw={rep_a.summary['largest_gap']:.6f} "
            f"joint_aggregation_rw={rep_s.summary['largest_gap']:.6f}"
        )
    return 0


def cmd_synth(payload: dict, args) -> int:
    spec = _synthetic_spec(payload, args)
    g = generate_synthetic(spec)
    out = _out_dir(payload, args)
    manifest = save_dataset(g, out, name=payload.get("name", g.name))
    print(f"wrote {manifest}")
    return 0


_COMMANDS = {"run": cmd_run, "ablate": cmd_ablate, "spectrum": cmd_spectrum, "synth": cmd_synth}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        payload = _load_config(args)
        return _COMMANDS[args.command](payload, args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
