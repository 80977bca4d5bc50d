"""Command-line driver: BER sweeps, operating points, density search, complexity tables.

Usage::

    beamsparse {ber,opoint,deltamin,complexity} --config run.ini [--out DIR]
               [--seed N] [--workers N] [--set section.key=value ...]

Exit status is 0 on success, 2 for configuration errors and 3 when the
channel geometry is infeasible or a density search finds no admissible
density. ``--config`` also accepts a ``manifest.json`` written by a previous
run, which reproduces that run exactly.
"""

import argparse
import configparser
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from ._validation import density_to_beams
from .channel import ChannelProfile
from .complexity import COMPLEXITY_ALGORITHMS, mult_count
from .equalizers import ALGORITHMS
from .exceptions import PlacementError
from .simulator import SimConfig, ber_curves, delta_min_search, snr_operating_point

COMMANDS = ("ber", "opoint", "deltamin", "complexity")

BER_HEADER = ["algorithm", "delta", "K", "snr_db", "ber", "bit_errors", "bit_count", "seed"]
OPOINT_HEADER = ["algorithm", "delta", "K", "target_ber", "snr_db", "reachable"]
DELTAMIN_HEADER = ["algorithm", "gap_db", "delta_min", "K_min", "lmmse_snr_db"]
COMPLEXITY_HEADER = [
    "algorithm", "B", "U", "K", "T",
    "preprocessing_mults", "equalization_mults", "fft_mults", "total_mults",
]


class ConfigError(Exception):
    pass


def _split(text):
    return [item.strip() for item in text.replace(",", " ").split() if item.strip()]


def _float_list(text):
    """Comma/space separated floats, or ``start:step:stop`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(v) for v in _split(text)]


def _int_list(text):
    return [int(v) for v in _split(text)]


def _algorithms(allowed):
    def parse(text):
        algs = _split(text)
        bad = [a for a in algs if a not in allowed]
        if bad or not algs:
            raise ValueError(f"unknown algorithm(s) {bad}; choose from {', '.join(allowed)}")
        return algs
    return parse


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _gap(text):
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


REQUIRED = object()

# section -> key -> (parser, default); defaults are raw strings
SCHEMA = {
    "system": {
        "B": (int, REQUIRED),
        "U": (int, REQUIRED),
        "seed": (int, "0"),
        "profile": (_choice("LoS", "nonLoS"), "LoS"),
        "paths_per_user": (int, ""),
        "sector_deg": (float, "120"),
        "min_separation_deg": (float, "1"),
        "csi": (_choice("estimated", "perfect"), "estimated"),
        "modulation": (_choice("16qam"), "16qam"),
    },
    "ber": {
        "algorithms": (_algorithms(ALGORITHMS), "LMMSE, COMP, LC, EOMP, LE"),
        "delta": (_float_list, "0.0625, 0.125, 0.25, 0.5, 1"),
        "snr_db": (_float_list, "-14:1:0"),
        "trials": (int, "100"),
        "block_length": (int, "100"),
    },
    "opoint": {"target_ber": (float, "0.01")},
    "deltamin": {"gap_db": (_gap, "1.0")},
    "complexity": {
        "algorithms": (_algorithms(COMPLEXITY_ALGORITHMS), ", ".join(COMPLEXITY_ALGORITHMS)),
        "T": (_int_list, "10, 100, 1000, 10000, 100000"),
        "K": (_int_list, ""),
        "delta": (_float_list, ""),
        "deltamin_csv": (str, ""),
    },
}


def read_raw_config(path):
    """Return ``{section: {key: raw string}}`` from an INI file or a run manifest."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: config file not found")
    text = path.read_text()
    if path.suffix == ".json":
        try:
            manifest = json.loads(text)
            return {s: dict(v) for s, v in manifest["config"].items()}
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"{path}: not a run manifest ({exc})") from None
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None, default_section="__none__"
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(" ".join(str(exc).split())) from None
    return {s: dict(parser.items(s)) for s in parser.sections()}


def apply_overrides(raw, overrides):
    raw = {s: dict(v) for s, v in raw.items()}
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        raw.setdefault(section, {})[name] = value.strip()
    return raw


def resolve_config(raw):
    """Validate raw strings against the schema; returns (parsed, resolved raw)."""
    for section, values in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in values:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
    parsed, resolved = {}, {}
    for section, fields in SCHEMA.items():
        parsed[section], resolved[section] = {}, {}
        for key, (parse, default) in fields.items():
            text = raw.get(section, {}).get(key)
            if text is None:
                if default is REQUIRED:
                    raise ConfigError(f"missing required field '{key}' in [{section}]")
                text = default
            resolved[section][key] = text
            if text == "":
                parsed[section][key] = None
                continue
            try:
                parsed[section][key] = parse(text)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key} = {text!r}: {exc}") from None
    return parsed, resolved


def build_sim_config(parsed, command):
    system, ber = parsed["system"], parsed["ber"]
    profile_kwargs = {"scenario": system["profile"], "sector_deg": system["sector_deg"],
                      "min_separation_deg": system["min_separation_deg"]}
    paths = system["paths_per_user"] or (3 if system["profile"] == "LoS" else 8)
    deltas = ber["delta"]
    if command == "deltamin" and 1.0 not in deltas:
        raise ConfigError("[ber] delta must include 1 for the deltamin command")
    try:
        profile = ChannelProfile(paths_per_user=paths, **profile_kwargs)
        return SimConfig(
            B=system["B"], U=system["U"], snr_grid=tuple(ber["snr_db"]),
            delta_grid=tuple(deltas), trials=ber["trials"],
            block_length=ber["block_length"], seed=system["seed"], profile=profile,
            csi=system["csi"], modulation=system["modulation"],
            target_ber=parsed["opoint"]["target_ber"], gap_db=parsed["deltamin"]["gap_db"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fmt_float(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(x, ".10g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _ber_rows(curves, seed):
    for (alg, delta), curve in curves.items():
        for snr, ber, errs, bits in zip(curve.snr_db, curve.ber, curve.bit_errors, curve.bit_count):
            yield [alg, _fmt_float(delta), curve.K, _fmt_float(float(snr)), f"{ber:.5e}",
                   int(errs), int(bits), seed]


def _complexity_rows(parsed, out_dir):
    system, section = parsed["system"], parsed["complexity"]
    B, U = system["B"], system["U"]
    per_alg = None
    if section["deltamin_csv"]:
        csv_path = Path(section["deltamin_csv"])
        if not csv_path.is_absolute() and not csv_path.exists():
            csv_path = out_dir / csv_path
        try:
            with open(csv_path, newline="") as fh:
                per_alg = {r["algorithm"]: [int(r["K_min"])] for r in csv.DictReader(fh) if r["K_min"]}
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"[complexity] deltamin_csv: cannot read {csv_path}: {exc}") from None
    if section["K"]:
        Ks = section["K"]
    elif section["delta"]:
        Ks = sorted({density_to_beams(d, B) for d in section["delta"]})
    elif per_alg is None:
        raise ConfigError("[complexity] needs one of K, delta or deltamin_csv")
    for alg in section["algorithms"]:
        if alg == "LMMSE":
            alg_Ks = [B]
        elif per_alg is not None:
            alg_Ks = per_alg.get(alg, [])
        else:
            alg_Ks = Ks
        for K in alg_Ks:
            for T in section["T"]:
                try:
                    report = mult_count(alg, B, U, K, T)
                except ValueError as exc:
                    raise ConfigError(f"[complexity] {alg} K={K} T={T}: {exc}") from None
                row = report.as_row()
                yield [row[h] for h in COMPLEXITY_HEADER]


def _write_manifest(path, command, resolved, algorithms, out_dir, extra=None):
    manifest = {
        "tool": "beamsparse",
        "version": __version__,
        "command": command,
        "algorithms": algorithms,
        "out_dir": str(out_dir),
        "config": resolved,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    manifest.update(extra or {})
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def run(config_path, command, overrides=(), out_dir="results", seed=None, workers=1, log=None):
    """Execute one command and return the process exit status."""
    log = log or (lambda msg: print(msg, file=sys.stderr))
    if command not in COMMANDS:
        log(f"error: unknown command {command!r}")
        return 2
    out_dir = Path(out_dir)
    try:
        raw = read_raw_config(config_path)
        if seed is not None:
            overrides = [*overrides, f"system.seed={seed}"]
        raw = apply_overrides(raw, overrides)
        parsed, resolved = resolve_config(raw)
        if command == "complexity":
            algorithms = parsed["complexity"]["algorithms"]
        else:
            config = build_sim_config(parsed, command)
            algorithms = parsed["ber"]["algorithms"]
            if command == "deltamin" and "LMMSE" not in algorithms:
                algorithms = ["LMMSE", *algorithms]
    except ConfigError as exc:
        log(f"config error: {exc}")
        return 2

    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    manifest = _write_manifest(manifest_path, command, resolved, algorithms, out_dir)
    t0 = time.perf_counter()
    status = 0

    if command == "complexity":
        try:
            rows = list(_complexity_rows(parsed, out_dir))
        except ConfigError as exc:
            log(f"config error: {exc}")
            return 2
        _write_csv(out_dir / "complexity.csv", COMPLEXITY_HEADER, rows)
    else:
        try:
            curves = ber_curves(config, algorithms, workers=workers)
        except PlacementError as exc:
            log(f"placement error: {exc} (B={config.B}, U={config.U}, profile={config.profile})")
            return 3
        if command == "ber":
            _write_csv(out_dir / "ber.csv", BER_HEADER, _ber_rows(curves, config.seed))
        elif command == "opoint":
            rows = []
            for curve in curves.values():
                op = snr_operating_point(curve, config.target_ber)
                rows.append([op.algorithm, _fmt_float(op.delta), op.K, f"{op.target_ber:.5e}",
                             _fmt_float(op.snr_db), str(op.reachable).lower()])
            _write_csv(out_dir / "opoint.csv", OPOINT_HEADER, rows)
        else:
            rows = []
            for alg in algorithms:
                if alg == "LMMSE":
                    continue
                result = delta_min_search(config, alg, curves)
                rows.append([alg, _fmt_float(result.gap_db), _fmt_float(result.delta_min),
                             "" if result.K_min is None else result.K_min,
                             _fmt_float(result.lmmse_snr_db)])
                if not result.found:
                    log(f"search failed for {alg}: {result.diagnostics}")
                    status = 3
            _write_csv(out_dir / "deltamin.csv", DELTAMIN_HEADER, rows)

    manifest["elapsed_s"] = round(time.perf_counter() - t0, 3)
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return status


def main(argv=None):
    parser = argparse.ArgumentParser(prog="beamsparse", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="INI config or manifest.json")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override [system] seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override a config value")
    args = parser.parse_args(argv)
    return run(args.config, args.command, args.overrides, args.out, args.seed, args.workers)


if __name__ == "__main__":
    sys.exit(main())
