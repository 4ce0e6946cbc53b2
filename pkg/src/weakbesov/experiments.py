"""Reproducible verification scenarios.

Every scenario builds its inputs from the library, records the numbers it
measured, and derives pass/fail from those numbers alone through a
predicate that ``recheck`` can re-run on a stored report.  All verdicts
are finite-depth evidence; no scenario certifies an infinite-depth
property.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .blaschke import (
    BlaschkeProduct,
    SingularAtom,
    ZeroSequence,
    gen_exponential,
    gen_growing_density,
    gen_stacked_carleson,
    stacked_box,
)
from .disc import PseudoDisc
from .errors import InconclusiveDepth
from .measure import PolarGrid
from .norms import (
    LambdaGrid,
    growth_trace,
    hardy_norm,
    hardy_weak_norm,
    tilde_L1w_norm,
    weak_norm_curve,
    weak_quasinorm_mu_p,
)
from .zeros import carleson_ratio, classify

SCENARIOS = ("theorem1", "theorem2", "inclusions", "lemma3", "prop2")
EVIDENCE_NOTE = "evidence-level: finite-depth numerics, not a certificate of the infinite-depth property"


@dataclass
class ExperimentConfig:
    scenario: str = "theorem1"
    p: float = 2.0
    seed: int = 0
    grid_depth: int = 8
    max_depth: int = 40
    max_steps: int = 8
    # theorem1
    M: int = 1
    forward_J: tuple = (15, 20, 25)
    forward_tol: float = 0.05
    converse_J: tuple = (10, 20)
    converse_steps: int = 4
    converse_factor: float = 2.0
    # theorem2
    finite_zeros: int = 5
    tilde_J: tuple = (10, 20, 30)
    tilde_lam_max: float = 1e11
    tilde_density: int = 8
    tilde_growth: float = 0.5
    # lemma3
    stack_K: tuple = (100, 1000, 10000)
    stack_level: int = 8
    samples: int = 200
    # inclusions
    lacunary_terms: int = 50
    # prop2
    atom_mass: float = 1.0
    control_J: int = 20
    # outputs
    output: str | None = None
    curves: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if not (1.0 < float(self.p) < math.inf):
            raise ValueError("p must lie in (1, inf)")
        for name in ("grid_depth", "max_depth", "max_steps", "M", "finite_zeros", "stack_level",
                     "samples", "lacunary_terms", "control_J", "converse_steps", "tilde_density"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.grid_depth > self.max_depth:
            raise ValueError("grid_depth exceeds max_depth")
        for name in ("forward_J", "converse_J", "tilde_J", "stack_K"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if self.atom_mass <= 0 or self.tilde_lam_max <= 1:
            raise ValueError("atom_mass must be positive and tilde_lam_max > 1")

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self):
        doc = dataclasses.asdict(self)
        for k, v in doc.items():
            if isinstance(v, tuple):
                doc[k] = list(v)
        doc.pop("output")
        doc.pop("curves")
        return doc

    def grid(self):
        return PolarGrid(depth=self.grid_depth, max_depth=self.max_depth)


@dataclass
class Report:
    scenario: str
    inputs: dict
    results: dict
    passed: bool
    predicate: str
    curves: dict = field(default_factory=dict)
    wall_clock: float | None = None

    def to_json(self):
        doc = {
            "scenario": self.scenario,
            "inputs": self.inputs,
            "results": self.results,
            "passed": self.passed,
            "predicate": self.predicate,
            "note": EVIDENCE_NOTE,
        }
        if self.wall_clock is not None:
            doc["wall_clock"] = self.wall_clock
        return doc

    def dumps(self):
        return json.dumps(_clean(self.to_json()), indent=1, sort_keys=True) + "\n"


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _num(x):
    # non-finite floats are stored as their repr
    return float(x)


def _rel_spread(values):
    values = [_num(v) for v in values]
    hi, lo = max(values), min(values)
    return 0.0 if hi == 0 else (hi - lo) / hi


# ---------------------------------------------------------------- predicates
# Each takes the recorded results dict and returns a bool.

def _pred_theorem1(res, inputs):
    fwd = res["forward"]
    ok_fwd = all(r["norm"]["verdict"] == "finite" for r in fwd)
    ok_fwd &= _rel_spread([r["norm"]["value"] for r in fwd]) <= inputs["forward_tol"]
    conv = res["converse"]
    vals = [_num(r["norm"]["value"]) for r in conv]
    ok_conv = all(b > a for a, b in zip(vals, vals[1:]))
    ok_conv &= vals[-1] >= inputs["converse_factor"] * vals[0]
    return bool(ok_fwd and ok_conv)


def _pred_theorem2(res, inputs):
    if res["finite"]["norm"]["verdict"] != "finite":
        return False
    vals = [_num(r["value"]) for r in res["exponential"]]
    if not all(b > a for a, b in zip(vals, vals[1:])):
        return False
    return vals[-1] >= (1.0 + inputs["tilde_growth"]) * vals[0]


def _pred_lemma3(res, inputs):
    rows = res["stacks"]
    ok = all(r["bound_violations"] == 0 and r["geometry_violations"] == 0 for r in rows)
    mx = [_num(r["max_abs_B"]) for r in rows]
    return bool(ok and all(b < a for a, b in zip(mx, mx[1:])))


CHAIN = ("H1", "tilde_L1w", "H1_w", "Lp_w", "A-1")


def _chain_violations(verdicts):
    bad = []
    for i, a in enumerate(CHAIN):
        for b in CHAIN[i + 1:]:
            if verdicts[a] == "finite" and verdicts[b] == "diverging":
                bad.append([a, b])
    return bad


def _pred_inclusions(res, inputs):
    ok = all(not _chain_violations(r["verdicts"]) for r in res["functions"].values())
    pole = res["functions"]["pole"]["verdicts"]
    return bool(ok and pole["H1_w"] == "finite" and pole["tilde_L1w"] == "diverging")


def _pred_prop2(res, inputs):
    return bool(res["atom"]["verdict"] == "diverging"
                and res["exponential"]["verdict"] == "finite"
                and _num(res["constant"]["value"]) == 0.0)


PREDICATES = {
    "theorem1": (_pred_theorem1, "forward verdicts finite and values within forward_tol; "
                                 "converse values strictly increasing with last >= converse_factor * first"),
    "theorem2": (_pred_theorem2, "finite product verdict finite; exponential sups strictly increasing "
                                 "with last >= (1 + tilde_growth) * first"),
    "lemma3": (_pred_lemma3, "no bound or geometry violations; max |B| strictly decreasing in K"),
    "inclusions": (_pred_inclusions, "no finite-then-diverging pair along the chain; "
                                     "pole finite in H1_w and diverging in tilde_L1w"),
    "prop2": (_pred_prop2, "atom diverging, exponential control finite, constant control zero"),
}


def recheck(report):
    """Recompute pass/fail from a report dict (as written to disk)."""
    pred, _ = PREDICATES[report["scenario"]]
    return pred(report["results"], report["inputs"])


def _finish(config, results, curves, t0):
    inputs = config.to_json()
    pred, text = PREDICATES[config.scenario]
    clean = _clean(results)
    return Report(config.scenario, inputs, clean, bool(pred(clean, inputs)), text, curves,
                  wall_clock=time.perf_counter() - t0)


def _curve(name, f, p, grid, lam=LambdaGrid(0.1, 1e4, 8)):
    lams, vals = weak_norm_curve(f, p, lam.values(), grid.refine().refine())
    return name, (lams.tolist(), vals.tolist())


def _classify_json(seq, J):
    try:
        return classify(seq, J).to_json()
    except InconclusiveDepth as exc:
        return {"kind": "inconclusive", "detail": str(exc)}


# ---------------------------------------------------------------- scenarios

def run_theorem1(config):
    t0 = time.perf_counter()
    grid = config.grid()
    results = {"forward": [], "converse": []}
    curves = {}
    for J in config.forward_J:
        seq = gen_exponential(config.M, J)
        B = BlaschkeProduct(seq.finite_part())
        est = weak_quasinorm_mu_p(B.prime, config.p, grid=grid, max_steps=config.max_steps)
        results["forward"].append({"J": J, "norm": est.to_json(), "classification": _classify_json(seq, J)})
        name, data = _curve(f"exponential_M{config.M}_J{J}", B.prime, config.p, grid)
        curves[name] = data
    for J in config.converse_J:
        seq = gen_growing_density(1, J)
        B = BlaschkeProduct(seq.finite_part())
        est = weak_quasinorm_mu_p(B.prime, config.p, grid=grid, max_steps=config.converse_steps)
        results["converse"].append({"J": J, "norm": est.to_json(), "classification": _classify_json(seq, J)})
        name, data = _curve(f"growing_s1_J{J}", B.prime, config.p, grid)
        curves[name] = data
    vals = [r["norm"]["value"] for r in results["converse"]]
    results["converse_ratio"] = vals[-1] / vals[0] if vals[0] else math.inf
    results["calibration"] = {"forward_tol": config.forward_tol, "converse_factor": config.converse_factor}
    return _finish(config, results, curves, t0)


def random_zeros(n, rng, r_max=0.9):
    """n zeros uniform in area on |z| <= r_max."""
    r = r_max * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def k_lambda_bound(seq, lam):
    """#K(lambda) * pi / (2 (1+pi)^2), K(lambda) = {k : (1-|z_k|)^2 > 1/((1+pi)^2 lambda)}.

    Lower bound for lambda * Area{|B'| > lambda (1-|z|)} built from disjoint
    discs around the zeros with 1-|z_k| well above the scale 1/lambda.
    """
    t = 1.0 - np.abs(seq.expanded())
    count = int(np.count_nonzero(t ** 2 > 1.0 / ((1.0 + math.pi) ** 2 * lam)))
    return count, count * math.pi / (2.0 * (1.0 + math.pi) ** 2)


def run_theorem2(config):
    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    grid = config.grid()
    seq = ZeroSequence.from_points(random_zeros(config.finite_zeros, rng))
    B = BlaschkeProduct(seq)
    est = tilde_L1w_norm(B.prime, grid=grid, max_steps=config.max_steps)
    results = {"finite": {"zeros": seq.to_json()["zeros"], "norm": est.to_json()}, "exponential": []}
    # one fixed grid for every J so the values are directly comparable
    lam = LambdaGrid(0.1, config.tilde_lam_max)
    fixed = PolarGrid(depth=config.grid_depth, density=config.tilde_density, max_depth=config.max_depth)
    for J in config.tilde_J:
        seqJ = gen_exponential(1, J).finite_part()
        BJ = BlaschkeProduct(seqJ)
        e = tilde_L1w_norm(BJ.prime, lam_grid=lam, grid=fixed, ladder=0, max_steps=1, on_edge="ignore")
        count, bound = k_lambda_bound(seqJ, e.lambda_star)
        results["exponential"].append({
            "J": J, "value": e.value, "value_lower": e.value_lower, "value_center": e.value_center,
            "lambda_star": e.lambda_star, "K_count": count, "K_bound": bound,
        })
    results["calibration"] = {"tilde_growth": config.tilde_growth, "tilde_lam_max": config.tilde_lam_max}
    return _finish(config, results, {}, t0)


def run_lemma3(config):
    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    box = stacked_box(config.stack_level)
    rows = []
    for K in config.stack_K:
        seq = gen_stacked_carleson(K, config.stack_level)
        S = carleson_ratio(seq, [box])
        m = 1.0 - S ** -0.5
        centre = box.top_point()
        if m > 0.0:
            pts = PseudoDisc(centre, m).sample(config.samples, rng)
        else:
            # S <= 1: the disc of radius m collapses to its centre
            pts = np.full(config.samples, centre, dtype=complex)
        absB = np.abs(BlaschkeProduct(seq)(pts))
        with np.errstate(divide="ignore"):
            log_inv = -np.log(absB)
        bound = math.sqrt(S) / 144.0
        geom = (1.0 - np.abs(pts)) > (1.0 - m) * box.side / 8.0
        rows.append({
            "K": K, "S": S, "m": m, "bound": bound, "degenerate": bool(m <= 0.0),
            "min_log_inv_B": float(np.min(log_inv)),
            "max_abs_B": float(np.max(absB)),
            "bound_violations": int(np.count_nonzero(~(log_inv >= bound))),
            "geometry_violations": int(np.count_nonzero(~geom)),
        })
    return _finish(config, {"stacks": rows}, {}, t0)


def lacunary(n_terms=50):
    """f(z) = sum_{n < n_terms} z^(2^n), by repeated squaring."""

    def f(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        w = z.copy()
        for _ in range(n_terms):
            out += w
            w = w * w
        return out

    return f


def lacunary_tail_bound(r, n_terms=50):
    """Bound on sum_{n >= n_terms} r^(2^n) (geometric once r^(2^n) <= 1/2)."""
    q = math.exp(2.0 ** n_terms * math.log(r)) if r > 0 else 0.0
    return 2.0 * q if q <= 0.5 else math.inf


def _inclusion_functions(config):
    """Test functions with the settings each diagnostic needs.

    The lacunary series oscillates at every scale, so its grids stay shallow.
    """
    deep = {"grid": PolarGrid(8, max_depth=config.max_depth), "lam": LambdaGrid(), "k_max": 16,
            "ladder": 3, "steps": config.max_steps, "tilde_lam": LambdaGrid(),
            "tilde_steps": config.max_steps}
    shallow = {"grid": PolarGrid(4, max_depth=config.max_depth), "lam": LambdaGrid(0.1, 20.0),
               "k_max": 8, "ladder": 0, "steps": 5, "tilde_lam": LambdaGrid(0.1, 100.0),
               "tilde_steps": 4}
    return {
        "constant": (lambda z: np.ones(np.shape(z), dtype=complex), deep),
        "inverse_sqrt": (lambda z: (1.0 - np.asarray(z)) ** -0.5, deep),
        "pole": (lambda z: 1.0 / (1.0 - np.asarray(z)), deep),
        "lacunary": (lacunary(config.lacunary_terms), shallow),
    }


def run_inclusions(config):
    t0 = time.perf_counter()
    out = {}
    for name, (f, st) in _inclusion_functions(config).items():
        diag = {
            "H1": hardy_norm(f, 1.0, k_max=st["k_max"]),
            "tilde_L1w": tilde_L1w_norm(f, lam_grid=st["tilde_lam"], grid=st["grid"],
                                        ladder=3, max_steps=st["tilde_steps"]),
            "H1_w": hardy_weak_norm(f, 1.0, k_max=st["k_max"]),
            "Lp_w": weak_quasinorm_mu_p(f, config.p, lam_grid=st["lam"], grid=st["grid"],
                                        ladder=st["ladder"], max_steps=st["steps"]),
            "A-1": growth_trace(f, 1.0, grid=st["grid"], steps=4),
        }
        verdicts = {k: v.verdict for k, v in diag.items()}
        out[name] = {
            "verdicts": verdicts,
            "norms": {k: v.to_json() for k, v in diag.items()},
            "violations": _chain_violations(verdicts),
        }
    r_deep = 1.0 - 2.0 ** -config.max_depth
    results = {
        "chain": list(CHAIN),
        "functions": out,
        "lacunary_tail_bound": {"r": r_deep, "bound": lacunary_tail_bound(r_deep, config.lacunary_terms)},
    }
    return _finish(config, results, {}, t0)


def run_prop2(config):
    t0 = time.perf_counter()
    grid = config.grid()
    atom = SingularAtom(1.0, config.atom_mass)
    e_atom = weak_quasinorm_mu_p(atom.derivative, config.p, grid=grid, max_steps=config.max_steps)
    seq = gen_exponential(1, config.control_J).finite_part()
    e_exp = weak_quasinorm_mu_p(BlaschkeProduct(seq).prime, config.p, grid=grid, max_steps=config.max_steps)
    # same zero count packed into one Carleson box
    stacked = gen_stacked_carleson(config.control_J, 6)
    e_stack = weak_quasinorm_mu_p(BlaschkeProduct(stacked).prime, config.p, grid=grid,
                                  max_steps=min(config.max_steps, 6))
    e_const = weak_quasinorm_mu_p(BlaschkeProduct(ZeroSequence.empty()).prime, config.p, grid=grid)
    results = {
        "atom": e_atom.to_json(),
        "exponential": e_exp.to_json(),
        "stacked": e_stack.to_json(),
        "stacked_exceeds_exponential": bool(e_stack.value > e_exp.value),
        "constant": e_const.to_json(),
    }
    return _finish(config, results, {}, t0)


RUNNERS = {
    "theorem1": run_theorem1,
    "theorem2": run_theorem2,
    "inclusions": run_inclusions,
    "lemma3": run_lemma3,
    "prop2": run_prop2,
}


def run(config):
    return RUNNERS[config.scenario](config)


# ---------------------------------------------------------------- output

def atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_report(report, path, timing=False):
    if not timing:
        report = dataclasses.replace(report, wall_clock=None)
    atomic_write(path, report.dumps())


def write_curves(report, directory):
    """One CSV per weak-norm profile, header lambda,value."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, (lams, vals) in sorted(report.curves.items()):
        path = os.path.join(directory, f"{report.scenario}_{name}.csv")
        rows = ["lambda,value"] + [f"{lam!r},{val!r}" for lam, val in zip(lams, vals)]
        atomic_write(path, "\n".join(rows) + "\n")
        written.append(path)
    return written
