"""Command-line front end: design lifts, report spectra, run simulations.

Every command writes a run manifest next to its outputs.  The manifest
records the resolved configuration, a hash covering the config and the
bytes of every input file, the tool version, and the paths written, so
a run can be reproduced from the manifest alone.  Output files carry no
timestamps; rerunning a command with the same inputs and seed writes
byte-identical results.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .alist import load_alist, save_alist
from .design import DesignReport, algorithm1, greedy_optimize
from .graph import EnumerationBoundError, load_protograph
from .lifting import expand, save_shifts
from .simulate import SimConfig, monte_carlo
from .walks import ACESpectrum, ace_spectrum

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNMET = 2
EXIT_BOUND = 3


def load_graph(path):
    """Read a Tanner graph from a protograph JSON or an alist file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return load_protograph(path)
    return load_alist(path)


def _file_sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(params, input_paths):
    """Digest of the resolved parameters plus every input file's bytes.

    Input paths themselves stay out of the digest so renaming a file
    does not change the hash; the file contents do.
    """
    h = hashlib.sha256()
    h.update(json.dumps(params, sort_keys=True).encode())
    for p in input_paths:
        h.update(b"\x00")
        h.update(Path(p).read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    """Record of one command invocation and everything it wrote."""

    command: str
    config: dict
    inputs: list
    config_hash: str
    tool_version: str
    seed: int
    outputs: list = field(default_factory=list)
    wall_clock_s: float = 0.0

    @classmethod
    def start(cls, command, config, input_paths, seed):
        # input files enter the hash by content, never by name
        names = {str(p) for p in input_paths}
        params = {k: v for k, v in config.items() if str(v) not in names}
        params["command"] = command
        return cls(
            command=command,
            config=config,
            inputs=[{"path": str(p), "sha256": _file_sha256(p)}
                    for p in input_paths],
            config_hash=config_hash(params, input_paths),
            tool_version=__version__,
            seed=seed,
        )

    def to_json(self):
        return {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "outputs": self.outputs,
            "wall_clock_s": round(self.wall_clock_s, 3),
        }

    def write(self, out_dir, t0):
        self.wall_clock_s = time.perf_counter() - t0
        path = Path(out_dir) / "manifest.json"
        _write_json(path, self.to_json())
        return path


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _out_dir(args):
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _resolve_seed(args):
    if args.seed is not None:
        return int(args.seed)
    return int.from_bytes(os.urandom(4), "big")


def cmd_design(args):
    """Design cyclic lift shifts for a base graph and write the results.

    With --target, runs the fixed-target swap algorithm (retrying with
    derived seeds up to --attempts times); without it, greedily
    maximizes the spectrum component by component up to depth --dmax.
    Exits nonzero when the verified spectrum misses the target.
    """
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    base = load_graph(args.base)
    out = _out_dir(args)
    cfg = {
        "base": str(args.base),
        "N": args.N,
        "dmax": args.dmax,
        "target": args.target,
        "seed": seed,
        "attempts": args.attempts,
        "continue_on_failure": bool(args.continue_on_failure),
    }
    manifest = RunManifest.start("design", cfg, [args.base], seed)

    if args.target is not None:
        target = ACESpectrum.parse(args.target)
        if target.d_max != args.dmax:
            raise SystemExit(
                f"error: target has {target.d_max} entries, --dmax is "
                f"{args.dmax}")
        report = None
        for attempt in range(max(1, args.attempts)):
            report = algorithm1(
                base, target, args.N, seed=seed + attempt,
                continue_on_failure=args.continue_on_failure)
            if report.success:
                break
    else:
        report = greedy_optimize(base, args.N, args.dmax,
                                 attempts=args.attempts, seed=seed)

    code = expand(base, report.assignment)
    shifts_path = out / "shifts.json"
    report_path = out / "report.json"
    alist_path = out / "expanded.alist"
    save_shifts(report.assignment, shifts_path, base=base)
    _write_json(report_path, report.to_json())
    save_alist(code.expanded, alist_path)
    manifest.outputs = [str(shifts_path), str(report_path), str(alist_path)]
    manifest.write(out, t0)

    status = "ok" if report.success else "TARGET NOT MET"
    print(f"design {status}: N={report.N} spectrum={report.spectrum.render()}"
          f" target={report.target.render()} swaps={len(report.swaps)}")
    return EXIT_OK if report.success else EXIT_UNMET


def cmd_spectrum(args):
    """Print the exact cycle ACE spectrum of a graph, one entry per
    even length up to 2*--dmax; infinite entries render as "inf"."""
    t0 = time.perf_counter()
    graph = load_graph(args.base)
    try:
        spectrum = ace_spectrum(graph, args.dmax)
    except EnumerationBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    print(spectrum.render())
    if args.out_dir is not None:
        out = _out_dir(args)
        cfg = {"base": str(args.base), "dmax": args.dmax}
        manifest = RunManifest.start("spectrum", cfg, [args.base], 0)
        spath = out / "spectrum.json"
        _write_json(spath, {"dmax": args.dmax,
                            "spectrum": spectrum.to_json(),
                            "rendered": spectrum.render()})
        manifest.outputs = [str(spath)]
        manifest.write(out, t0)
    return EXIT_OK


def cmd_simulate(args):
    """Monte-Carlo FER/BER of a code over BI-AWGN; writes CSV + JSON."""
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    graph = load_graph(args.base)
    try:
        ebn0 = tuple(float(tok) for tok in args.ebn0.split(",") if tok.strip())
        cfg = SimConfig(ebn0_db=ebn0, frames=args.frames,
                        max_errors=args.max_errors,
                        max_iterations=args.max_iter, seed=seed)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    out = _out_dir(args)
    manifest = RunManifest.start(
        "simulate", dict(cfg.to_json(), base=str(args.base)),
        [args.base], seed)

    result = monte_carlo(graph, cfg)

    rows = ["EbN0_dB,frames,frame_errors,bit_errors,avg_iters"]
    for pt in result.points:
        rows.append(f"{pt.ebn0_db:g},{pt.frames},{pt.frame_errors},"
                    f"{pt.bit_errors},{pt.avg_iterations:.6f}")
    csv_path = out / "results.csv"
    json_path = out / "results.json"
    csv_path.write_text("\n".join(rows) + "\n")
    _write_json(json_path, result.to_json())
    manifest.outputs = [str(csv_path), str(json_path)]
    manifest.write(out, t0)

    for pt in result.points:
        print(f"EbN0 {pt.ebn0_db:g} dB: FER {pt.fer:.3g} "
              f"({pt.frame_errors}/{pt.frames} frames)")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="qcforge",
        description="Quasi-cyclic LDPC code design by ACE-constrained "
                    "cyclic lifting")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="design lift shifts for a base graph")
    d.add_argument("--base", required=True,
                   help="base graph file (protograph JSON or alist)")
    d.add_argument("--N", type=int, required=True, help="lift order")
    d.add_argument("--dmax", type=int, required=True,
                   help="spectrum depth (max cycle length / 2)")
    d.add_argument("--target", default=None,
                   help="comma list like inf,3,1; omit to maximize greedily")
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--attempts", type=int, default=4)
    d.add_argument("--out-dir", default=".")
    d.add_argument("--continue-on-failure", action="store_true",
                   help="keep processing walks after one proves "
                        "unsatisfiable")
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("spectrum", help="exact ACE spectrum of a graph")
    s.add_argument("--base", required=True,
                   help="graph file (protograph JSON or alist)")
    s.add_argument("--dmax", type=int, required=True)
    s.add_argument("--out-dir", default=None,
                   help="also write spectrum.json and a manifest here")
    s.set_defaults(func=cmd_spectrum)

    m = sub.add_parser("simulate", help="Monte-Carlo FER/BER over BI-AWGN")
    m.add_argument("--base", required=True,
                   help="code graph file (alist or protograph JSON)")
    m.add_argument("--ebn0", required=True, help="comma list of Eb/N0 in dB")
    m.add_argument("--frames", type=int, default=100000)
    m.add_argument("--max-errors", type=int, default=100)
    m.add_argument("--max-iter", type=int, default=100)
    m.add_argument("--seed", type=int, default=None)
    m.add_argument("--out-dir", default=".")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
