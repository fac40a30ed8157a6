"""Command-line entry point: ``cee <command> ...``.

Exit codes: 0 success, 2 input error, 3 budget exceeded (partial report written).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import NOISY_EPSILON, DEFAULT_EPSILON, factorize, product_residual, tensor_product
from .errors import CeeError
from .euclid import HalfRingEncoder, SimConfig, empirical_tpm, hologram_entropy, physicality, simulate, trajectory_to_dict
from .grain import GrainBudget, grain_search
from .metrics import METRICS
from .report import (
    base_report,
    ces_dict,
    csv_text,
    dumps,
    emit,
    factorization_dict,
    grain_csv,
    grain_report_dict,
    search_dict,
    sha256_file,
    state_string,
    tpm_digest,
    write_atomic,
)
from .states import SystemState
from .system import PHI_MODES, cause_effect_structure, find_complexes
from .tpm import load_tpm, tpm_to_dict

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("stride set must be positive integers")
    return vals


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _phi_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", choices=METRICS, default="emd", help="repertoire distance (default: emd)")
    p.add_argument("--phi-mode", choices=PHI_MODES, default="mip", help="system phi construction (default: mip)")


def _load_config(path, seed):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CeeError("bad-json", str(exc)) from None
    if not isinstance(data, dict):
        raise CeeError("bad-config", "config must be a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]  # accept a trajectory file as config source
    if seed is not None:
        data = {**data, "seed": seed}
    try:
        return SimConfig.from_dict(data)
    except TypeError as exc:
        raise CeeError("bad-config", str(exc)) from None


def _complex_section(tpm, state, args) -> dict:
    search = find_complexes(tpm, state, metric=args.metric, mode=args.phi_mode)
    out = search_dict(search)
    out["ces"] = {
        ",".join(map(str, c["elements"])): ces_dict(
            cause_effect_structure(tpm, c["mask"], state, metric=args.metric, relations_order=args.relations_order)
        )
        for c in out["excluded"]
    }
    return out


def cmd_analyze(args) -> int:
    tpm = load_tpm(args.tpm_file)
    state = SystemState.parse(args.state, tpm.n)
    report = base_report(
        "analyze",
        inputs={"tpm_sha256": sha256_file(args.tpm_file), "n": tpm.n, "state": str(state)},
        phi_metric=args.metric,
        phi_mode=args.phi_mode,
        relations_order=args.relations_order,
    )
    report.update(_complex_section(tpm, state.index, args))
    emit(dumps(report), args.out)
    return EXIT_OK


def cmd_factorize(args) -> int:
    tpm = load_tpm(args.tpm_file)
    f = factorize(tpm, args.epsilon)
    report = base_report(
        "factorize",
        inputs={"tpm_sha256": sha256_file(args.tpm_file), "n": tpm.n},
        epsilon=args.epsilon,
        factorization=factorization_dict(f),
    )
    emit(dumps(report), args.out)
    return EXIT_OK


def cmd_compose(args) -> int:
    t = tensor_product(load_tpm(args.tpm_a), load_tpm(args.tpm_b))
    emit(dumps(tpm_to_dict(t)), args.out)
    return EXIT_OK


def cmd_grain(args) -> int:
    tpm = load_tpm(args.tpm_file)
    state = SystemState.parse(args.state, tpm.n)
    budget = GrainBudget(max_elements=args.max_elements, max_grains=args.budget, strides=args.stride_set)
    result = grain_search(tpm, state.index, budget, metric=args.metric, mode=args.phi_mode)
    report = base_report(
        "grain",
        inputs={"tpm_sha256": sha256_file(args.tpm_file), "n": tpm.n, "state": str(state)},
        budget={"max_elements": budget.max_elements, "max_grains": budget.max_grains, "strides": list(budget.strides)},
        phi_metric=args.metric,
        phi_mode=args.phi_mode,
        partial=result.partial,
        grain_search=grain_report_dict(result),
    )
    emit(dumps(report), args.out)
    if args.csv:
        write_atomic(args.csv, grain_csv(result))
    return EXIT_BUDGET if result.partial else EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args.config, args.seed)
    ensemble, ledger = simulate(config)
    emit(dumps(trajectory_to_dict(config, ensemble, ledger)), args.out)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    config = _load_config(args.config, args.seed)
    ensemble, ledger = simulate(config)
    encoder = HalfRingEncoder(config.num_particles, config.lattice_size, config.dims)
    tpm = empirical_tpm(ensemble, encoder, smoothing=args.smoothing)
    final = encoder(ensemble.paths[:, -1])
    f = factorize(tpm, args.epsilon)
    work = physicality("euclidean", False, args.k_b_t)
    report = base_report(
        "pipeline",
        inputs={"config_sha256": sha256_file(args.config), "config": config.to_dict()},
        phi_metric=args.metric,
        phi_mode=args.phi_mode,
        relations_order=args.relations_order,
        epsilon=args.epsilon,
        smoothing=args.smoothing,
        empirical_tpm={"sha256": tpm_digest(tpm), **tpm_to_dict(tpm)},
        state=state_string(final, tpm.n),
        factorization=factorization_dict(f),
        ledger={
            "s_e0": ledger.s_e0,
            "information": ledger.information,
            "bits": ledger.bits,
            "entropy_area_bits": hologram_entropy(config.area_tn),
            "physicality": {"regime": "euclidean", "work": work.work, "physical": work.physical},
        },
    )
    report.update(_complex_section(tpm, final, args))
    emit(dumps(report), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _load_config(args.config, None)
    rows = []
    for g in args.couplings:
        for seed in range(args.seeds):
            config = SimConfig.from_dict({**base.to_dict(), "coupling": g, "seed": base.seed + seed})
            tpm = empirical_tpm(simulate(config)[0], smoothing=args.smoothing)
            groups = [1 << i for i in range(tpm.n)]
            rows.append((float(g), config.seed, product_residual(tpm, groups)))
    emit(csv_text(("coupling", "seed", "residual"), rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cee", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cee {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="complexes and cause-effect structures of a TPM file")
    a.add_argument("tpm_file")
    a.add_argument("--state", required=True, help="current state as bits, element 0 first (e.g. 101)")
    _phi_flags(a)
    a.add_argument("--relations-order", type=int, choices=(2, 3), default=2)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("factorize", help="split a TPM into independent factors")
    f.add_argument("tpm_file")
    f.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    f.add_argument("--out")
    f.set_defaults(func=cmd_factorize)

    c = sub.add_parser("compose", help="tensor product of two TPM files (A on the low bits)")
    c.add_argument("tpm_a")
    c.add_argument("tpm_b")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compose)

    g = sub.add_parser("grain", help="search coarse-grainings for maximal phi")
    g.add_argument("tpm_file")
    g.add_argument("--state", required=True)
    _phi_flags(g)
    g.add_argument("--stride-set", type=_int_list, default=(1, 2, 4))
    g.add_argument("--budget", type=int, default=GrainBudget.max_grains, help="maximum grains to evaluate")
    g.add_argument("--max-elements", type=int, default=GrainBudget.max_elements)
    g.add_argument("--csv", help="also write phi-vs-grain rows here")
    g.add_argument("--out")
    g.set_defaults(func=cmd_grain)

    s = sub.add_parser("simulate", help="run the lattice simulator, write a trajectory file")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    pl = sub.add_parser("pipeline", help="simulate -> empirical TPM -> complexes -> factorization")
    pl.add_argument("config")
    pl.add_argument("--seed", type=int)
    _phi_flags(pl)
    pl.add_argument("--relations-order", type=int, choices=(2, 3), default=2)
    pl.add_argument("--epsilon", type=float, default=NOISY_EPSILON)
    pl.add_argument("--smoothing", type=float, default=1.0)
    pl.add_argument("--k-b-t", type=float, default=1.0, help="thermal energy for the work ledger")
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_pipeline)

    sw = sub.add_parser("sweep", help="residual-vs-coupling CSV over seeds")
    sw.add_argument("config")
    sw.add_argument("--couplings", type=_float_list, default=(0.0, 0.25, 0.5, 1.0))
    sw.add_argument("--seeds", type=int, default=10)
    sw.add_argument("--smoothing", type=float, default=1.0)
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CeeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
