"""Deterministic JSON/CSV serialization of analysis results."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .algebra import Factorization
from .grain import CoarseGraining, GrainSearchResult
from .mechanism import Distinction, Mice
from .states import elements, index_to_bits, popcount
from .system import CauseEffectStructure, Complex, ComplexSearch, SystemCut
from .tpm import Tpm, tpm_to_dict

SIG_DIGITS = 12


def canonical(obj):
    """Recursively convert to JSON-ready values with floats at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x  # drop negative zero
    return obj


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def tpm_digest(tpm: Tpm) -> str:
    return sha256_bytes(dumps(tpm_to_dict(tpm)).encode())


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory and rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        print(text, end="")
    else:
        write_atomic(out, text)


def base_report(command: str, **extra) -> dict:
    return {"tool": "cee", "version": __version__, "command": command, **extra}


def state_string(state: int, n: int) -> str:
    return "".join(str(b) for b in index_to_bits(state, n))


def cut_dict(cut: Optional[SystemCut]) -> Optional[dict]:
    if cut is None:
        return None
    return {"source": elements(cut.source), "target": elements(cut.target), "bidirectional": cut.bidirectional}


def complex_dict(c: Complex) -> dict:
    return {
        "elements": elements(c.elements),
        "mask": c.elements,
        "big_phi": c.big_phi,
        "state": state_string(c.state, popcount(c.elements)),
        "cut": cut_dict(c.cut),
        "exclusive": c.exclusive,
    }


def mice_dict(m: Mice) -> dict:
    return {
        "purview": elements(m.purview),
        "phi": m.phi,
        "repertoire": m.repertoire.probs,
        "cut": {
            "part1": [elements(m.cut.part1[0]), elements(m.cut.part1[1])],
            "part2": [elements(m.cut.part2[0]), elements(m.cut.part2[1])],
        },
    }


def distinction_dict(d: Distinction) -> dict:
    return {"mechanism": elements(d.mechanism), "phi": d.phi, "cause": mice_dict(d.cause), "effect": mice_dict(d.effect)}


def ces_dict(ces: CauseEffectStructure) -> dict:
    return {
        "elements": elements(ces.subset),
        "distinctions": [distinction_dict(d) for d in ces.distinctions],
        "reducible": [elements(m) for m in ces.reducible],
        "relations": [
            {
                "members": list(r.members),
                "mechanisms": [elements(m) for m in r.mechanisms],
                "faces": list(r.faces),
                "overlap": elements(r.overlap),
            }
            for r in ces.relations
        ],
        "sum_phi": ces.sum_phi,
    }


def search_dict(search: ComplexSearch) -> dict:
    return {
        "complexes": [complex_dict(c) for c in search.complexes],
        "excluded": [complex_dict(c) for c in search.exclusive],
    }


def factorization_dict(f: Factorization) -> dict:
    return {
        "groups": [elements(g) for g in f.groups],
        "masks": list(f.groups),
        "residual": f.residual,
        "split_residual": f.split_residual,
        "factors": [tpm_to_dict(t) for t in f.factors],
    }


def grain_dict(g: CoarseGraining) -> dict:
    return g.to_dict()


def grain_report_dict(result: GrainSearchResult) -> dict:
    return {
        "maximal": [{"grain": grain_dict(g), "big_phi": phi} for g, phi in result.maximal],
        "max_phi": result.max_phi,
        "evaluated": len(result.evaluated),
        "partial": result.partial,
    }


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([f"{v:.{SIG_DIGITS}g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def grain_csv(result: GrainSearchResult) -> str:
    maximal = {id(g) for g, _ in result.maximal}
    rows = []
    for g, phi in result.evaluated:
        groups = ";".join("-".join(str(e) for e in grp) for grp in g.groups)
        thresholds = ";".join(str(t) for t in g.thresholds)
        rows.append((groups, thresholds, g.stride, float(phi), int(id(g) in maximal)))
    return csv_text(("groups", "thresholds", "stride", "big_phi", "maximal"), rows)

