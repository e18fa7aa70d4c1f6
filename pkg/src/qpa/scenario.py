"""Scenario files (JSON) and result rows (CSV/JSON).

Schema, version 1::

    {
      "schema_version": 1,
      "id": "toeplitz-n2",
      "n": 2, "s": 1, "eps": 0.1,
      "family": "toeplitz" | "gf2n_mult" | "all_functions",
      "source": {
        "generator": "uniform" | "trivial" | "perfect-copy" | "depolarized-copy"
                     | "bsc-correlated-classical" | "random" | "explicit",
        "probs": [...],            # optional except for trivial/explicit; "a/b" strings are exact
        "p": 0.1,                  # noise parameter for depolarized-copy / bsc
        "dim": 2,                  # adversary dimension for random
        "conditionals": [{"re": [[...]], "im": [[...]]}, ...]   # explicit only
      },
      "sweep": {"s": [...], "eps": [...], "p": [...]},          # optional
      "rng_seed": 0,
      "cap_seeds": 24                                           # optional, log2 of the seed cap
    }

Generators:

* ``uniform``: ``Z`` uniform, adversary holds nothing (dimension 1).
* ``trivial``: given ``probs``, adversary holds nothing.
* ``perfect-copy``: adversary holds ``|z><z|``.
* ``depolarized-copy``: ``(1 - p)|z><z| + p I / 2^n``.
* ``bsc-correlated-classical``: adversary holds ``W``, each bit of ``Z`` flipped
  with probability ``p``, as a diagonal state.
* ``random``: rational ``probs`` and random conditionals of size ``dim``
  drawn from ``rng_seed``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import hashing, pa, states
from .errors import ParseError, ValidationError

SCHEMA_VERSION = 1
RNG_ALGORITHM = "PCG64"
GENERATORS = (
    "uniform",
    "trivial",
    "perfect-copy",
    "depolarized-copy",
    "bsc-correlated-classical",
    "random",
    "explicit",
)

CSV_COLUMNS = [
    "scenario_id",
    "family",
    "n",
    "s",
    "eps",
    "p",
    "exact_d",
    "thm1_bound",
    "cor1_bound",
    "key_len",
    "key_len_rhs",
    "rate",
    "thm1_pass",
    "cor1_pass",
    "eps_secure",
    "passed",
    "rng_algorithm",
    "rng_seed",
]
TIMING_COLUMN = "runtime_ms"


def make_rng(seed):
    """The one generator used for every randomized path."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class Scenario:
    id: str
    n: int
    s: int
    eps: float
    family: str
    source: dict
    sweep: dict = field(default_factory=dict)
    rng_seed: int = 0
    cap_seeds: int = hashing.SEED_CAP_BITS
    raw: Optional[dict] = None

    def points(self):
        """Sweep grid as (s, eps, p) tuples in deterministic order."""
        ss = self.sweep.get("s", [self.s])
        es = self.sweep.get("eps", [self.eps])
        ps = self.sweep.get("p", [self.source.get("p")])
        return [(s, e, p) for s in ss for e in es for p in ps]

    def instance(self, s=None, eps=None, p=None):
        s = self.s if s is None else s
        eps = self.eps if eps is None else eps
        src = dict(self.source)
        if p is not None:
            src["p"] = p
        ensemble = build_source(src, self.n, make_rng(self.rng_seed))
        try:
            fam = hashing.HashFamily(self.family, self.n, int(s))
        except ValueError as exc:
            raise ValidationError("family", str(exc)) from exc
        return pa.PaInstance(ensemble, fam, float(eps))


def parse_prob(x, field_name="source.probs"):
    if isinstance(x, bool):
        raise ValidationError(field_name, "boolean is not a probability")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(field_name, "cannot parse %r" % x) from exc
    if isinstance(x, float):
        return x
    raise ValidationError(field_name, "unsupported entry %r" % (x,))


def _probs(src, size):
    if "probs" not in src:
        return [Fraction(1, size)] * size
    raw = src["probs"]
    if not isinstance(raw, list) or len(raw) != size:
        raise ValidationError("source.probs", "expected a list of %d entries" % size)
    vals = [parse_prob(x) for x in raw]
    if any(isinstance(v, float) for v in vals):
        vals = [float(v) for v in vals]
        total = math.fsum(vals)
        if abs(total - 1.0) > states.PROB_TOL:
            raise ValidationError("source.probs", "probabilities sum to %.15g, not 1" % total)
    elif sum(vals) != 1:
        raise ValidationError("source.probs", "probabilities sum to %s, not 1" % sum(vals))
    if any(v < 0 for v in vals):
        raise ValidationError("source.probs", "negative probability")
    return vals


def _param(src, name="p"):
    if src.get(name) is None:
        raise ValidationError("source.%s" % name, "required by generator %r" % src["generator"])
    v = float(src[name])
    if not 0.0 <= v <= 1.0:
        raise ValidationError("source.%s" % name, "must lie in [0, 1]")
    return v


def _matrix(entry, field_name):
    try:
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(field_name, "matrices need 're' (and optional 'im') lists") from exc
    if re.shape != im.shape or re.ndim != 2:
        raise ValidationError(field_name, "malformed matrix shape")
    return re + 1j * im


def build_source(src, n, rng):
    """Ensemble over ``0 .. 2^n - 1`` described by a ``source`` mapping."""
    gen = src.get("generator")
    if gen not in GENERATORS:
        raise ValidationError("source.generator", "unknown generator %r" % (gen,))
    size = 1 << n
    values = range(size)
    try:
        if gen == "uniform":
            return states.CqEnsemble.trivial_adversary([Fraction(1, size)] * size)
        if gen == "trivial":
            if "probs" not in src:
                raise ValidationError("source.probs", "required by generator 'trivial'")
            return states.CqEnsemble.trivial_adversary(_probs(src, size))
        if gen == "perfect-copy":
            return states.CqEnsemble.perfect_copy(_probs(src, size))
        if gen == "depolarized-copy":
            p = _param(src)
            rhos = np.array([(1 - p) * np.diag(np.eye(size)[z]) + p * np.eye(size) / size for z in values])
            return states.CqEnsemble(values, _probs(src, size), rhos)
        if gen == "bsc-correlated-classical":
            p = _param(src)
            rhos = []
            for z in values:
                flips = [bin(z ^ w).count("1") for w in range(size)]
                rhos.append(np.diag([p**k * (1 - p) ** (n - k) for k in flips]))
            return states.CqEnsemble(values, _probs(src, size), np.array(rhos))
        if gen == "random":
            dim = int(src.get("dim", 2))
            probs = src["probs"] if "probs" in src else None
            probs = _probs(src, size) if probs is not None else states.random_rational_probs(rng, size)
            rhos = [states.random_density(rng, dim) for _ in values]
            return states.CqEnsemble(values, probs, rhos)
        # explicit
        conds = src.get("conditionals")
        if not isinstance(conds, list) or len(conds) != size:
            raise ValidationError("source.conditionals", "expected %d matrices" % size)
        rhos = np.array([_matrix(c, "source.conditionals[%d]" % i) for i, c in enumerate(conds)])
        return states.CqEnsemble(values, _probs(src, size), rhos)
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError("source", str(exc)) from exc


def parse_scenario(text, origin="<string>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("%s: %s" % (origin, exc.msg), lineno=exc.lineno) from exc
    return scenario_from_dict(data)


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), origin=str(path))


def scenario_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("<root>", "scenario must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError("schema_version", "expected %d, got %r" % (SCHEMA_VERSION, version))
    for key in ("id", "n", "family", "source"):
        if key not in data:
            raise ValidationError(key, "missing")
    n = data["n"]
    if not isinstance(n, int) or not 1 <= n <= 24:
        raise ValidationError("n", "must be an integer in [1, 24]")
    s = data.get("s", 1)
    if not isinstance(s, int) or not 1 <= s <= n:
        raise ValidationError("s", "must be an integer in [1, n]")
    if data["family"] not in ("toeplitz", "gf2n_mult", "all_functions"):
        raise ValidationError("family", "unknown family %r" % (data["family"],))
    eps = data.get("eps", 0.0)
    if not isinstance(eps, (int, float)) or isinstance(eps, bool) or not 0 <= eps < 1:
        raise ValidationError("eps", "must be a number in [0, 1)")
    src = data["source"]
    if not isinstance(src, dict):
        raise ValidationError("source", "must be an object")
    sweep = data.get("sweep", {}) or {}
    if not isinstance(sweep, dict) or set(sweep) - {"s", "eps", "p"}:
        raise ValidationError("sweep", "allowed keys are s, eps, p")
    for key, vals in sweep.items():
        if not isinstance(vals, list) or not vals:
            raise ValidationError("sweep.%s" % key, "must be a non-empty list")
    scn = Scenario(
        id=str(data["id"]),
        n=n,
        s=s,
        eps=float(eps),
        family=data["family"],
        source=src,
        sweep=sweep,
        rng_seed=int(data.get("rng_seed", 0)),
        cap_seeds=int(data.get("cap_seeds", hashing.SEED_CAP_BITS)),
        raw=data,
    )
    # fail early on an unbuildable source
    build_source(src, n, make_rng(scn.rng_seed))
    return scn


def _fmt_prob(p):
    return str(p) if isinstance(p, Fraction) else repr(float(p))


def instance_to_dict(inst, scenario_id, rng_seed=0, **extra):
    """Explicit, replayable scenario for ``inst``."""
    src = inst.source
    probs = src.exact_probs if src.exact_probs is not None else src.probs
    data = {
        "schema_version": SCHEMA_VERSION,
        "id": scenario_id,
        "n": inst.n,
        "s": inst.s,
        "eps": inst.eps,
        "family": inst.family.kind,
        "source": {
            "generator": "explicit",
            "probs": [_fmt_prob(p) for p in probs],
            "conditionals": [
                {"re": rho.real.tolist(), "im": rho.imag.tolist()} for rho in src.rhos
            ],
        },
        "rng_seed": rng_seed,
    }
    data.update(extra)
    return data


@dataclass
class ResultRow:
    scenario_id: str
    family: str
    n: int
    s: int
    eps: float
    p: Optional[float]
    exact_d: Optional[float]
    thm1_bound: float
    cor1_bound: float
    key_len: int
    key_len_rhs: Optional[float]
    rate: float
    thm1_pass: Optional[bool]
    cor1_pass: Optional[bool]
    eps_secure: Optional[bool]
    passed: bool
    rng_algorithm: str
    rng_seed: int
    runtime_ms: float = 0.0
    report: Optional[object] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_report(cls, scenario_id, report, p, rng_seed):
        return cls(
            scenario_id=scenario_id,
            family=report.family,
            n=report.n,
            s=report.s,
            eps=report.eps,
            p=p,
            exact_d=report.exact_d,
            thm1_bound=report.thm1_bound,
            cor1_bound=report.cor1_bound,
            key_len=report.key_len,
            key_len_rhs=report.key_len_rhs,
            rate=report.rate,
            thm1_pass=report.thm1_pass,
            cor1_pass=report.cor1_pass,
            eps_secure=report.eps_secure,
            passed=report.passed,
            rng_algorithm=RNG_ALGORITHM,
            rng_seed=rng_seed,
            runtime_ms=report.runtime_ms,
            report=report,
        )


def format_value(v):
    """CSV cell: 12 significant digits, blank for missing, lowercase booleans."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def rows_to_csv(rows, timing=False, columns=None):
    columns = list(CSV_COLUMNS if columns is None else columns)
    if timing:
        columns.append(TIMING_COLUMN)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        get = row.get if isinstance(row, dict) else lambda k: getattr(row, k)
        writer.writerow([format_value(get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(format(v, ".12g")) if math.isfinite(v) else None
    return v


def rows_to_json(rows, timing=False):
    out = []
    for row in rows:
        if isinstance(row, dict):
            d = dict(row)
        else:
            d = {c: getattr(row, c) for c in CSV_COLUMNS}
            if row.report is not None:
                rep = row.report.to_dict()
                d["entropies"] = rep["entropies"]
                d["witnesses"] = rep["witnesses"]
                d["sampled_d"] = rep["sampled_d"]
                d["sampled_d_stderr"] = rep["sampled_d_stderr"]
            if timing:
                d[TIMING_COLUMN] = row.runtime_ms
        out.append(_jsonable(d))
    return json.dumps({"rng_algorithm": RNG_ALGORITHM, "rows": out}, indent=2) + "\n"
