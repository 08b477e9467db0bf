"""Batch command-line front end.

One verb per pipeline: `spectrum`, `count`, `weyl`, `profile`,
`toy-check`, `transport`, `classical`, plus `manifest` to inspect a
finished run.  Each verb reads a flat key-value config file and writes
deterministic CSV/JSON artifacts plus a run manifest into the output
directory.  Exit codes: 0 all jobs succeeded, 1 invalid config, 2 some
jobs failed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classical import OpenBakerSpec, escape_grid, fractal_dimensions, transfer_matrix
from .config import (ConfigError, get_dimensions, get_float, get_float_list,
                     get_int, get_int_list, get_spec, get_str, load_config)
from .quantize import build_toy_diagonal, parity_restrict, quantize_closed, \
    quantize_open, walsh_quantize
from .serialize import (write_counts_csv, write_escape_grid_csv, write_json,
                        write_profile_csv, write_spectrum_csv,
                        write_transmission_csv)
from .spectral import (SectorQuery, Spectrum, compare_spectra, count_sector,
                       eigen_spectrum, invariant_nonzero_spectrum,
                       kernel_dimension, profile_curve, toy_closed_spectrum,
                       weyl_fit)
from .transport import transport_asymptotics, transport_result

WORKERS_ENV = "OPENBAKER_WORKERS"


def build_map(family: str, spec: OpenBakerSpec, N: int, variant: str = "W") -> np.ndarray:
    """Dense propagator for one (family, spec, N) combination."""
    if family == "dft":
        if spec.is_open:
            return quantize_open(spec, N)
        return quantize_closed(spec.D, N)
    if family == "toy":
        return build_toy_diagonal(N)
    if family == "walsh":
        k = round(math.log(N) / math.log(spec.D))
        if spec.D**k != N:
            raise ValueError(f"walsh family needs N = {spec.D}^k, got {N}")
        return walsh_quantize(spec, k, variant)
    raise ValueError(f"unknown map family {family!r}")


def map_spectrum(family: str, spec: OpenBakerSpec, N: int, parity: str,
                 variant: str = "W") -> Spectrum:
    """Spectrum of one map, parity-reduced when requested."""
    M = build_map(family, spec, N, variant)
    label = f"{family}-D{spec.D}-kept{''.join(map(str, spec.kept))}-N{N}-{parity}"
    if parity == "full":
        return eigen_spectrum(M, N=N, label=label)
    return eigen_spectrum(parity_restrict(M, parity), N=N, label=label)


class JobRunner:
    """Runs independent jobs, isolating per-job failures, and assembles
    the run manifest."""

    def __init__(self, outdir: Path, cfg: dict, workers: int = 1):
        self.outdir = outdir
        self.cfg = cfg
        self.workers = max(1, workers)
        self.jobs = []

    def run(self, named_jobs) -> int:
        def call(item):
            name, fn = item
            start = time.monotonic()
            try:
                outputs = fn()
                return {"name": name, "status": "ok",
                        "outputs": sorted(outputs),
                        "seconds": round(time.monotonic() - start, 3)}
            except Exception as exc:  # isolate sibling jobs
                return {"name": name, "status": "failed", "error": str(exc),
                        "outputs": [],
                        "seconds": round(time.monotonic() - start, 3)}

        named_jobs = list(named_jobs)
        if self.workers == 1 or len(named_jobs) <= 1:
            results = [call(j) for j in named_jobs]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(call, named_jobs))
        self.jobs = sorted(results, key=lambda j: j["name"])
        failed = [j for j in self.jobs if j["status"] != "ok"]
        for j in failed:
            print(f"job {j['name']} failed: {j['error']}", file=sys.stderr)
        self.write_manifest()
        return 2 if failed else 0

    def write_manifest(self):
        outputs = sorted({f for j in self.jobs for f in j["outputs"]})
        manifest = {
            "tool": "openbaker",
            "version": __version__,
            "config": self.cfg,
            "jobs": self.jobs,
            "outputs": outputs,
        }
        write_json(self.outdir / "manifest.json", manifest)


def _outdir(cfg: dict, args) -> Path:
    out = Path(args.output or cfg.get("output.dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    return int(os.environ.get(WORKERS_ENV, "1"))


def _spectrum_params(cfg: dict):
    family = get_str(cfg, "map.family", choices={"dft", "toy", "walsh"})
    spec = get_spec(cfg)
    if family == "toy" and spec.D != 3:
        raise ConfigError("toy family requires map.D = 3")
    dims = get_dimensions(cfg, spec.D)
    parity = get_str(cfg, "spectrum.parity", default="full",
                     choices={"even", "odd", "full"})
    variant = get_str(cfg, "map.variant", default="W", choices={"V", "W"})
    return family, spec, dims, parity, variant


def _spectrum_jobs(cfg: dict, outdir: Path, store: dict):
    family, spec, dims, parity, variant = _spectrum_params(cfg)

    def make(N):
        def job():
            s = map_spectrum(family, spec, N, parity, variant)
            store[N] = s
            fname = f"spectrum_N{N}_{parity}.csv"
            write_spectrum_csv(outdir / fname, s)
            return [fname]
        return job

    return [(f"spectrum-N{N}", make(N)) for N in dims]


def cmd_spectrum(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    store: dict = {}
    runner = JobRunner(outdir, cfg, _workers(args))
    return runner.run(_spectrum_jobs(cfg, outdir, store))


def _counts(cfg, store, dims, radii):
    theta = get_float(cfg, "sector.theta", default=0.0)
    rho = get_float(cfg, "sector.rho", default=math.pi)
    counts = []
    for N in dims:
        if N not in store:
            continue
        for r in radii:
            c = count_sector(store[N], SectorQuery(r, theta, rho))
            counts.append((N, r, c))
    return counts


def cmd_count(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    radii = get_float_list(cfg, "count.radii", default=[])
    _, spec, dims, _, _ = _spectrum_params(cfg)
    store: dict = {}
    runner = JobRunner(outdir, cfg, _workers(args))

    jobs = _spectrum_jobs(cfg, outdir, store)

    def counts_job():
        if not radii:
            return []
        write_counts_csv(outdir / "counts.csv", _counts(cfg, store, dims, radii))
        return ["counts.csv"]

    code = runner.run(jobs)
    # counting runs after all spectra are available
    result = counts_job()
    if result:
        runner.jobs.append({"name": "counts", "status": "ok",
                            "outputs": result, "seconds": 0.0})
        runner.jobs.sort(key=lambda j: j["name"])
        runner.write_manifest()
    return code


def cmd_weyl(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    r = get_float(cfg, "weyl.r")
    _, spec, dims, _, _ = _spectrum_params(cfg)
    store: dict = {}
    runner = JobRunner(outdir, cfg, _workers(args))
    code = runner.run(_spectrum_jobs(cfg, outdir, store))
    series = [(N, count_sector(store[N], SectorQuery(r))) for N in dims
              if N in store]
    try:
        fit = weyl_fit(series)
    except ValueError as exc:
        print(f"weyl fit failed: {exc}", file=sys.stderr)
        return 2
    write_json(outdir / "weyl_fit.json", fit.as_dict())
    runner.jobs.append({"name": "weyl-fit", "status": "ok",
                        "outputs": ["weyl_fit.json"], "seconds": 0.0})
    runner.jobs.sort(key=lambda j: j["name"])
    runner.write_manifest()
    return code


def cmd_profile(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    radii = get_float_list(cfg, "profile.radii")
    _, spec, dims, _, _ = _spectrum_params(cfg)
    if spec.is_open:
        default_mu = math.log(spec.s) / math.log(spec.D)
    else:
        default_mu = 1.0
    mu = get_float(cfg, "profile.mu", default=default_mu)
    store: dict = {}
    runner = JobRunner(outdir, cfg, _workers(args))
    code = runner.run(_spectrum_jobs(cfg, outdir, store))
    present = [N for N in dims if N in store]
    table = profile_curve([store[N] for N in present], mu, radii, spec.D)
    write_profile_csv(outdir / "profile.csv", radii, present, table)
    runner.jobs.append({"name": "profile", "status": "ok",
                        "outputs": ["profile.csv"], "seconds": 0.0})
    runner.jobs.sort(key=lambda j: j["name"])
    runner.write_manifest()
    return code


def cmd_toy_check(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    ks = get_int_list(cfg, "toy.k")
    tol = get_float(cfg, "toy.tol", default=1e-8)
    runner = JobRunner(outdir, cfg, _workers(args))

    def make(k):
        def job():
            # the k-th-power factorization isolates the nonzero spectrum
            # from the defective kernel, which a direct dense eigensolve
            # would scatter across |lambda| up to ~1e-3
            vals, kdim = invariant_nonzero_spectrum(build_toy_diagonal(3**k), k)
            s = Spectrum(np.concatenate([vals, np.zeros(kdim, dtype=complex)]),
                         N=3**k, label=f"toy-k{k}")
            ref = toy_closed_spectrum(k)
            report = compare_spectra(s, ref, tol)
            payload = {
                "k": k,
                "max_distance": report.max_distance,
                "unmatched": report.unmatched,
                "ring_totals": {str(p): c for p, c in
                                sorted(report.ring_totals.items())},
                "kernel_dimension": kdim,
                "expected_kernel_dimension": 3**k - 2**k,
            }
            fname = f"toy_check_k{k}.json"
            write_json(outdir / fname, payload)
            return [fname]
        return job

    return runner.run([(f"toy-check-k{k}", make(k)) for k in ks])


def cmd_transport(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    ks = get_int_list(cfg, "transport.k")
    thetas = get_float_list(cfg, "transport.theta", default=[0.0])
    method = get_str(cfg, "transport.method", default="resolvent",
                     choices={"resolvent", "series"})
    tol = get_float(cfg, "transport.tol", default=1e-12)
    if any(k < 1 for k in ks):
        raise ConfigError("transport.k values must be >= 1")
    runner = JobRunner(outdir, cfg, _workers(args))
    results = {}

    def make(k, theta, i):
        def job():
            res = transport_result(k, theta, method, tol)
            results[(k, i)] = res
            base = f"transport_k{k}_theta{i}"
            write_json(outdir / f"{base}.json", res.as_dict())
            write_transmission_csv(outdir / f"{base}_T.csv", res.T)
            return [f"{base}.json", f"{base}_T.csv"]
        return job

    jobs = [(f"transport-k{k}-theta{i}", make(k, t, i))
            for k in ks for i, t in enumerate(thetas)]
    code = runner.run(jobs)
    done = [res for res in results.values()]
    if done:
        rows = []
        for k in ks:
            gs = [r.g for (kk, _), r in sorted(results.items()) if kk == k]
            for (kk, i), r in sorted(results.items()):
                if kk != k:
                    continue
                rows.append({"k": k, "theta": r.theta, "g": r.g,
                             "g_normalized": r.g / (4 ** (k - 1) / 2.0),
                             "P": r.P, "P_normalized": r.P / 2 ** (k - 1),
                             "F": r.F})
        report = {
            "rows": rows,
            "reference": {"shot_noise_constant": 11.0 / 80.0,
                          "random_matrix_fano": 1.0 / 8.0},
        }
        write_json(outdir / "transport_asymptotics.json", report)
        runner.jobs.append({"name": "transport-asymptotics", "status": "ok",
                            "outputs": ["transport_asymptotics.json"],
                            "seconds": 0.0})
        runner.jobs.sort(key=lambda j: j["name"])
        runner.write_manifest()
    return code


def cmd_classical(cfg, args) -> int:
    outdir = _outdir(cfg, args)
    spec = get_spec(cfg)
    M = get_int(cfg, "classical.M", default=81)
    t_max = get_int(cfg, "classical.tmax", default=20)
    runner = JobRunner(outdir, cfg, _workers(args))

    def grids_job():
        files = []
        for direction in ("forward", "backward"):
            g = escape_grid(spec, M, direction, t_max)
            fname = f"escape_{direction}.csv"
            write_escape_grid_csv(outdir / fname, g)
            files.append(fname)
        return files

    def dims_job():
        write_json(outdir / "dimensions.json", fractal_dimensions(spec))
        return ["dimensions.json"]

    jobs = [("escape-grids", grids_job), ("dimensions", dims_job)]
    if "classical.toy_k" in cfg:
        k = get_int(cfg, "classical.toy_k")

        def transfer_job():
            T = transfer_matrix(build_toy_diagonal(3**k))
            s = eigen_spectrum(T.astype(complex), label=f"transfer-k{k}")
            nontrivial = [complex(z) for z in s.values if abs(z) > 1e-10]
            payload = {
                "k": k,
                "nontrivial_eigenvalues": [[z.real, z.imag] for z in nontrivial],
                "kernel_dimension": kernel_dimension(s, 1e-10),
            }
            write_json(outdir / "transfer_report.json", payload)
            return ["transfer_report.json"]

        jobs.append(("transfer-spectrum", transfer_job))
    return runner.run(jobs)


def cmd_manifest(args) -> int:
    path = Path(args.rundir) / "manifest.json"
    if not path.exists():
        print(f"no manifest at {path}", file=sys.stderr)
        return 1
    import json
    manifest = json.loads(path.read_text())
    missing = [f for f in manifest.get("outputs", [])
               if not (Path(args.rundir) / f).exists()]
    print(f"run of openbaker {manifest.get('version', '?')}: "
          f"{len(manifest.get('jobs', []))} jobs, "
          f"{len(manifest.get('outputs', []))} artifacts")
    for job in manifest.get("jobs", []):
        print(f"  {job['name']}: {job['status']} ({job['seconds']}s)")
    if missing:
        print(f"missing artifacts: {missing}", file=sys.stderr)
        return 2
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openbaker",
        description="Quantized open baker's maps: spectra, Weyl counting, transport.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [("spectrum", cmd_spectrum), ("count", cmd_count),
                     ("weyl", cmd_weyl), ("profile", cmd_profile),
                     ("toy-check", cmd_toy_check), ("transport", cmd_transport),
                     ("classical", cmd_classical)]:
        p = sub.add_parser(name)
        p.add_argument("config", help="run configuration file")
        p.add_argument("-o", "--output", help="output directory (overrides output.dir)")
        p.add_argument("--workers", type=int, default=None,
                       help=f"parallel jobs (default: ${WORKERS_ENV} or 1)")
        p.set_defaults(fn=fn)
    m = sub.add_parser("manifest")
    m.add_argument("rundir", help="directory of a previous run")
    m.set_defaults(fn=None)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.command == "manifest":
        return cmd_manifest(args)
    try:
        cfg = load_config(args.config)
        return args.fn(cfg, args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
