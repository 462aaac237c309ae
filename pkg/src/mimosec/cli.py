"""Command-line front end: config parsing, orchestration, CSV/JSON output.

Config files are flat `key = value` lines with `#` comments. Results go to
a CSV with a pinned header and 12-significant-digit formatting plus a JSON
manifest that is sufficient to reproduce the run.
"""

import argparse
import datetime
import json
import sys
from dataclasses import asdict, dataclass

from . import __version__, complexity
from .channel import SystemDims
from .exceptions import ConfigError
from .simulator import ExperimentConfig, run_experiment

CSV_HEADER = "algorithm,snr_db,ber,secrecy_rate_bits,flops,frames,bit_errors"

_INT_KEYS = ("n_t", "t_users", "n_r", "k_eves", "n_k", "frames_per_point", "seed")
_FLOAT_KEYS = ("m_ratio", "rho", "csi_error_var", "e_s")
_KNOWN_KEYS = set(_INT_KEYS) | set(_FLOAT_KEYS) | {"snr_db", "algorithms", "an_enabled"}


@dataclass
class RunManifest:
    """Reproducibility record paired with every result file."""

    config: dict
    toolkit_version: str
    seed: int
    started_at: str
    finished_at: str
    output_files: list
    an_power_fraction: float


def _parse_bool(raw, lineno):
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"line {lineno}: expected a boolean, got {raw!r}")


def parse_config(text):
    """Parse and validate a flat key=value configuration document."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key == "an_enabled":
                values[key] = _parse_bool(val, lineno)
            elif key == "snr_db":
                values[key] = tuple(float(v) for v in val.split(",") if v.strip())
            elif key == "algorithms":
                values[key] = tuple(v.strip() for v in val.split(",") if v.strip())
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc

    defaults = ExperimentConfig()
    try:
        dims = SystemDims(
            n_t=values.pop("n_t", defaults.dims.n_t),
            t_users=values.pop("t_users", defaults.dims.t_users),
            n_r=values.pop("n_r", defaults.dims.n_r),
            k_eves=values.pop("k_eves", defaults.dims.k_eves),
            n_k=values.pop("n_k", defaults.dims.n_k),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = ExperimentConfig(
        dims=dims,
        snr_db_list=values.pop("snr_db", defaults.snr_db_list),
        algorithms=values.pop("algorithms", defaults.algorithms),
        m_ratio=values.pop("m_ratio", defaults.m_ratio),
        rho=values.pop("rho", defaults.rho),
        csi_error_var=values.pop("csi_error_var", defaults.csi_error_var),
        an_enabled=values.pop("an_enabled", defaults.an_enabled),
        frames_per_point=values.pop("frames_per_point", defaults.frames_per_point),
        seed=values.pop("seed", defaults.seed),
        e_s=values.pop("e_s", defaults.e_s),
    )
    return cfg.validate()


def _fmt(x):
    return f"{x:.12g}"


def result_csv_text(result):
    lines = [CSV_HEADER]
    for row in result.rows():
        lines.append(
            ",".join(
                [
                    row["algorithm"],
                    _fmt(row["snr_db"]),
                    _fmt(row["ber"]),
                    _fmt(row["secrecy_rate_bits"]),
                    _fmt(row["flops"]),
                    str(row["frames"]),
                    str(row["bit_errors"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_results(result, manifest, out_dir, stem="results"):
    """Write the CSV grid and its JSON manifest; returns the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    manifest_path = out_dir / f"{stem}.manifest.json"
    csv_path.write_text(result_csv_text(result), encoding="utf-8")
    manifest.output_files = [str(csv_path)]
    manifest_path.write_text(
        json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return csv_path, manifest_path


def load_results_csv(text):
    """Reload an emitted CSV into row dictionaries (round-trip helper)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header: {lines[0]!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(
            {
                "algorithm": parts[0],
                "snr_db": float(parts[1]),
                "ber": float(parts[2]),
                "secrecy_rate_bits": float(parts[3]),
                "flops": float(parts[4]),
                "frames": int(parts[5]),
                "bit_errors": int(parts[6]),
            }
        )
    return rows


def _manifest_for(cfg, started, finished):
    return RunManifest(
        config={**asdict(cfg), "dims": asdict(cfg.dims)},
        toolkit_version=__version__,
        seed=cfg.seed,
        started_at=started,
        finished_at=finished,
        output_files=[],
        an_power_fraction=(1.0 - cfg.rho) if cfg.an_enabled else 0.0,
    )


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _load_cfg(args, **overrides):
    if args.config:
        from pathlib import Path

        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    else:
        cfg = ExperimentConfig()
    updates = dict(overrides)
    if args.seed is not None:
        updates["seed"] = args.seed
    if updates:
        from dataclasses import replace

        cfg = replace(cfg, **updates).validate()
    return cfg


def _run_and_emit(cfg, args, stem):
    from pathlib import Path

    started = _now()
    result = run_experiment(cfg, workers=args.threads)
    manifest = _manifest_for(cfg, started, _now())
    csv_path, manifest_path = emit_results(result, manifest, Path(args.out), stem=stem)
    print(f"wrote {csv_path} and {manifest_path}")
    return 0


def _cmd_ber_sweep(args):
    return _run_and_emit(_load_cfg(args), args, "ber_sweep")


def _cmd_secrecy_sweep(args):
    return _run_and_emit(_load_cfg(args), args, "secrecy_sweep")


def _cmd_complexity(args):
    from pathlib import Path

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "complexity.csv"
    lines = ["algorithm,n_t,flops"]
    for n_t in (4, 6, 8):
        dims = complexity.figure_dims(n_t)
        for tag in complexity.COMPLEXITY_FIGURE_SET:
            lines.append(f"{tag},{n_t},{_fmt(complexity.flops_algorithm(tag, dims))}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    return 0


_FIGURE_PRESETS = {
    3: dict(
        algorithms=("zf", "mmse", "bd", "gmi", "sgmi", "so-thp", "so-thp-sgmi"),
        snr_db_list=tuple(float(s) for s in range(0, 21, 2)),
        m_ratio=0.5,
    ),
    4: dict(
        algorithms=("zf", "mmse", "bd", "gmi", "sgmi", "so-thp", "so-thp-sgmi"),
        snr_db_list=tuple(float(s) for s in range(0, 41, 5)),
        m_ratio=0.5,
        frames_per_point=500,
    ),
    5: dict(
        algorithms=("zf", "mmse", "bd", "sgmi", "so-thp", "so-thp-sgmi"),
        snr_db_list=tuple(float(s) for s in range(0, 41, 5)),
        m_ratio=0.5,
        csi_error_var=0.05,
        an_enabled=True,
        rho=0.6,
        frames_per_point=500,
    ),
}
# figure 6 is figure 5 with the statistically stronger eavesdropper
_FIGURE_PRESETS[6] = dict(_FIGURE_PRESETS[5], m_ratio=2.0)


def _cmd_reproduce_figure(args):
    from dataclasses import replace

    fig = args.figure
    if fig == 2:
        return _cmd_complexity(args)
    preset = dict(_FIGURE_PRESETS[fig])
    cfg = ExperimentConfig()
    if fig in (5, 6):
        # AN needs spare transmit dimensions: one stream/antenna per user
        cfg = replace(cfg, dims=SystemDims(4, 2, 1, 2, 2))
    cfg = replace(cfg, **preset)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    cfg.validate()
    return _run_and_emit(cfg, args, f"figure{fig}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mimosec",
        description="MU-MIMO precoding and physical-layer security simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("ber-sweep", _cmd_ber_sweep),
        ("secrecy-sweep", _cmd_secrecy_sweep),
        ("complexity", _cmd_complexity),
    ):
        p = sub.add_parser(name)
        _common_flags(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("reproduce-figure")
    p.add_argument("figure", type=int, choices=(2, 3, 4, 5, 6))
    _common_flags(p)
    p.set_defaults(func=_cmd_reproduce_figure)
    return parser


def _common_flags(p):
    p.add_argument("--config", default=None, help="path to a key=value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count; affects wall time only, never results",
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
