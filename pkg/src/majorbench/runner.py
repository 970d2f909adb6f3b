"""Config-driven experiments: reference curves, circuit ensembles and reports.

A run samples ``ensemble_size`` circuits per gate count, each from its own
RNG stream derived from the master seed, simulates them on the statevector or
density-matrix backend, and reduces the per-circuit results in circuit-index
order so that the report does not depend on the number of worker threads.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
import yaml

from . import majorization as mj
from .core import clean_probabilities
from .gates import GateSet, gate_set_from_config, gate_set_to_config
from .noise import NoiseSpec, schedule_noise
from .sampler import (BOOTSTRAP, CLIFFORD, DEVICE, HAAR, PLACEMENT_WEIGHTINGS, SHOTS, RngStream,
                      sample_circuit, sample_clifford_circuit, sample_haar_states, stream_id)
from .simulate import evolve_mixed, evolve_pure
from .topology import TopologyGraph, topology_from_config

log = logging.getLogger(__name__)

BACKENDS = ("auto", "pure", "mixed")


class ConfigError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """A Clifford reference did not settle within the allowed doublings."""

    def __init__(self, msg: str, history: list):
        super().__init__(msg)
        self.history = history


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ReferenceConfig:
    """Which reference curves to build and how.

    ``cliff_tolerance`` is either a positive number or ``"auto"``, in which
    case consecutive Clifford curves count as converged once their distance
    drops below three times its expected statistical spread.
    """

    haar: bool = True
    haar_samples: int = 5000
    cliff: bool = False
    cliff_ensemble_size: int = 1000
    cliff_tolerance: Union[float, str] = "auto"
    cliff_start_gates: Optional[int] = None
    cliff_max_doublings: int = 6

    def __post_init__(self):
        if self.haar_samples < 2 or self.cliff_ensemble_size < 2:
            raise ConfigError("reference ensembles need at least 2 members")
        tol = self.cliff_tolerance
        if isinstance(tol, str):
            if tol != "auto":
                raise ConfigError(f"cliff tolerance must be a number or 'auto', got {tol!r}")
        elif not tol > 0:
            raise ConfigError("cliff tolerance must be > 0")

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "ReferenceConfig":
        d = dict(d or {})
        haar = d.pop("haar", {}) or {}
        cliff = d.pop("cliff", {}) or {}
        if d:
            raise ConfigError(f"unknown reference keys: {sorted(d)}")
        if isinstance(haar, bool):
            haar = {"enabled": haar}
        if isinstance(cliff, bool):
            cliff = {"enabled": cliff}
        _check_keys("references.haar", haar, {"enabled", "samples"})
        _check_keys("references.cliff", cliff,
                    {"enabled", "ensemble_size", "tolerance", "start_gates", "max_doublings"})
        tol = cliff.get("tolerance", "auto")
        return cls(
            haar=bool(haar.get("enabled", True)),
            haar_samples=int(haar.get("samples", 5000)),
            cliff=bool(cliff.get("enabled", False)),
            cliff_ensemble_size=int(cliff.get("ensemble_size", 1000)),
            cliff_tolerance=tol if isinstance(tol, str) else float(tol),
            cliff_start_gates=cliff.get("start_gates"),
            cliff_max_doublings=int(cliff.get("max_doublings", 6)),
        )

    def to_dict(self) -> dict:
        return {
            "haar": {"enabled": self.haar, "samples": self.haar_samples},
            "cliff": {"enabled": self.cliff, "ensemble_size": self.cliff_ensemble_size,
                      "tolerance": self.cliff_tolerance, "start_gates": self.cliff_start_gates,
                      "max_doublings": self.cliff_max_doublings},
        }


def _check_keys(where: str, d: dict, known: set) -> None:
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


@dataclass
class ExperimentConfig:
    """Everything a run needs. See ``docs/config.md`` for the file format."""

    gate_set: GateSet
    topology: TopologyGraph
    gate_counts: tuple
    ensemble_size: int
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    references: ReferenceConfig = field(default_factory=ReferenceConfig)
    seed: int = 0
    shots: Optional[int] = None
    placement_weighting: str = "by_kind"
    backend: str = "auto"
    threads: int = 1
    max_mixed_qubits: int = 10
    cache_dir: Optional[str] = None
    bootstrap: int = 0
    keep_cumulants: bool = False
    # echo of the device section as written in the config file
    device_echo: Optional[dict] = None

    def __post_init__(self):
        self.gate_counts = tuple(int(g) for g in self.gate_counts)
        if not self.gate_counts or min(self.gate_counts) < 0:
            raise ConfigError("gate_counts must be a nonempty list of nonnegative integers")
        if self.ensemble_size < 2:
            raise ConfigError("ensemble_size must be >= 2")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1 when given")
        if self.placement_weighting not in PLACEMENT_WEIGHTINGS:
            raise ConfigError(f"placement_weighting must be one of {PLACEMENT_WEIGHTINGS}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.bootstrap < 0:
            raise ConfigError("bootstrap must be >= 0")
        if self.gate_set.max_arity > 2:
            raise ConfigError("gate kinds of arity > 2 are not supported")

    @property
    def n_qubits(self) -> int:
        return self.topology.n_qubits

    @property
    def mixed(self) -> bool:
        if self.backend == "auto":
            return self.noise.needs_density_matrix
        return self.backend == "mixed"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {"device", "gate_counts", "ensemble_size", "noise", "references", "seed", "shots",
                 "placement_weighting", "backend", "threads", "max_mixed_qubits", "cache_dir",
                 "bootstrap"}
        _check_keys("config", d, known)
        for req in ("device", "gate_counts", "ensemble_size"):
            if req not in d:
                raise ConfigError(f"config is missing {req!r}")
        device = d["device"]
        _check_keys("device", device, {"gate_set", "topology"})
        try:
            gs = gate_set_from_config(device["gate_set"])
            topo = topology_from_config(device["topology"])
            noise = NoiseSpec.from_dict(d.get("noise"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(
            gate_set=gs,
            topology=topo,
            gate_counts=tuple(d["gate_counts"]),
            ensemble_size=int(d["ensemble_size"]),
            noise=noise,
            references=ReferenceConfig.from_dict(d.get("references")),
            seed=int(d.get("seed", 0)),
            shots=None if d.get("shots") is None else int(d["shots"]),
            placement_weighting=d.get("placement_weighting", "by_kind"),
            backend=d.get("backend", "auto"),
            threads=int(d.get("threads", 1)),
            max_mixed_qubits=int(d.get("max_mixed_qubits", 10)),
            cache_dir=d.get("cache_dir"),
            bootstrap=int(d.get("bootstrap", 0)),
            device_echo={"gate_set": device["gate_set"], "topology": device["topology"]},
        )

    def to_dict(self) -> dict:
        device = self.device_echo or {
            "gate_set": gate_set_to_config(self.gate_set),
            "topology": {"n_qubits": self.topology.n_qubits,
                         "edges": [list(e) for e in self.topology.sorted_edges]},
        }
        return {
            "device": device,
            "gate_counts": list(self.gate_counts),
            "ensemble_size": self.ensemble_size,
            "noise": self.noise.to_dict(),
            "references": self.references.to_dict(),
            "seed": int(self.seed),
            "shots": self.shots,
            "placement_weighting": self.placement_weighting,
            "backend": self.backend,
            "threads": self.threads,
            "max_mixed_qubits": self.max_mixed_qubits,
            "cache_dir": self.cache_dir,
            "bootstrap": self.bootstrap,
        }


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    with open(path) as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return ExperimentConfig.from_dict(d)


# ---------------------------------------------------------------------------
# parallel map with index-ordered results


def _ordered_map(fn: Callable[[int], object], count: int, threads: int) -> list:
    if threads <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count), chunksize=max(1, count // (8 * threads))))


# ---------------------------------------------------------------------------
# references


@dataclass
class ReferenceCurve:
    """A reference fluctuation curve plus how it was produced."""

    kind: str
    curve: mj.FluctuationCurve
    seed: int
    gate_count: Optional[int] = None
    final_distance: Optional[float] = None
    tolerance: Optional[float] = None
    history: list = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.curve.n_qubits

    def meta(self) -> dict:
        return {"kind": self.kind, "n_qubits": self.n_qubits, "ensemble_size": self.curve.ensemble_size,
                "seed": int(self.seed), "gate_count": self.gate_count,
                "final_distance": self.final_distance, "tolerance": self.tolerance,
                "history": self.history}


def haar_cumulants(n: int, samples: int, rng, chunk: int = 4096) -> np.ndarray:
    """Lorenz cumulants of ``samples`` Haar-random ``n``-qubit states, one row each."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    out = np.empty((samples, 2**n))
    for start in range(0, samples, chunk):
        m = min(chunk, samples - start)
        amps = sample_haar_states(n, m, gen)
        out[start:start + m] = mj.lorenz_cumulants(np.abs(amps) ** 2)
    return out


def generate_haar_reference(n: int, samples: int, rng) -> mj.FluctuationCurve:
    """Fluctuation curve of ``samples`` Haar-random ``n``-qubit pure states."""
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    return mj.ensemble_fluctuations(haar_cumulants(n, samples, rng))


def _clifford_cumulants(n: int, n_gates: int, size: int, seed: int, threads: int) -> np.ndarray:
    def member(i):
        c = sample_clifford_circuit(n, n_gates, RngStream(seed, stream_id(CLIFFORD, n_gates, i)))
        return mj.lorenz_cumulants(clean_probabilities(np.abs(evolve_pure(c)) ** 2))

    return np.array(_ordered_map(member, size, threads))


def _auto_tolerance(cumulants: np.ndarray, seed: int, n_gates: int) -> float:
    # distance between two independent curves of this size is roughly
    # sqrt(2 * sum_k se_k^2); allow three times that
    gen = RngStream(seed, stream_id(BOOTSTRAP, n_gates, 2**32 - 1)).generator()
    se = mj.bootstrap_curve_se(cumulants, 200, gen)
    return 3.0 * float(np.sqrt(2.0 * np.sum(se**2)))


def generate_clifford_reference(n: int, ensemble_size: int, tolerance: Union[float, str], seed: int,
                                start_gates: Optional[int] = None, max_doublings: int = 6,
                                threads: int = 1) -> ReferenceCurve:
    """Run Clifford ensembles at doubling gate counts until the curve settles.

    Starts from ``start_gates`` (default ``10 n^2``) and doubles until the
    distance between consecutive curves falls below ``tolerance``.

    Raises:
        ConvergenceError: if no consecutive pair is within tolerance after
            ``max_doublings`` doublings. The error carries the history.
    """
    if not isinstance(tolerance, str) and not tolerance > 0:
        raise ConfigError("tolerance must be > 0")
    g = int(start_gates) if start_gates is not None else 10 * n * n
    if g < 1:
        raise ConfigError("start_gates must be >= 1")
    history: list = []
    prev = mj.ensemble_fluctuations(_clifford_cumulants(n, g, ensemble_size, seed, threads))
    for _ in range(max_doublings):
        g2 = 2 * g
        cum = _clifford_cumulants(n, g2, ensemble_size, seed, threads)
        cur = mj.ensemble_fluctuations(cum)
        tol = _auto_tolerance(cum, seed, g2) if tolerance == "auto" else float(tolerance)
        d = mj.distance_to_reference(prev, cur)
        history.append({"gates": g2, "distance": d, "tolerance": tol})
        log.info("Cliff-%d: %d -> %d gates, D = %.3g (tol %.3g)", n, g, g2, d, tol)
        if d < tol:
            return ReferenceCurve("cliff", cur, seed, gate_count=g2, final_distance=d,
                                  tolerance=tol, history=history)
        prev, g = cur, g2
    raise ConvergenceError(f"Cliff-{n} did not converge within {max_doublings} doublings", history)


def _cache_path(cache_dir: str, kind: str, n: int, size: int, seed: int, tol) -> Path:
    return Path(cache_dir) / f"{kind}{n}_m{size}_seed{seed}_tol{tol}.npz"


def _load_cached(path: Path) -> Optional[ReferenceCurve]:
    if not path.exists():
        return None
    with np.load(path) as z:
        meta = json.loads(str(z["meta"]))
        values = z["values"]
    curve = mj.FluctuationCurve(meta["n_qubits"], values, meta["ensemble_size"])
    return ReferenceCurve(meta["kind"], curve, meta["seed"], meta["gate_count"],
                          meta["final_distance"], meta["tolerance"], meta["history"])


def _store_cached(path: Path, ref: ReferenceCurve) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp.npz")
    np.savez(tmp, values=ref.curve.values, meta=json.dumps(ref.meta()))
    tmp.replace(path)


def build_references(cfg: ExperimentConfig) -> dict:
    """Reference curves enabled in ``cfg``, keyed ``"haar"`` / ``"cliff"``."""
    refs: dict = {}
    rc = cfg.references
    n = cfg.n_qubits
    jobs = []
    if rc.haar:
        jobs.append(("haar", rc.haar_samples, None))
    if rc.cliff:
        jobs.append(("cliff", rc.cliff_ensemble_size, rc.cliff_tolerance))
    for kind, size, tol in jobs:
        path = _cache_path(cfg.cache_dir, kind, n, size, cfg.seed, tol) if cfg.cache_dir else None
        ref = _load_cached(path) if path else None
        if ref is None:
            if kind == "haar":
                curve = generate_haar_reference(n, size, RngStream(cfg.seed, stream_id(HAAR)))
                ref = ReferenceCurve("haar", curve, cfg.seed)
            else:
                ref = generate_clifford_reference(n, size, tol, cfg.seed, rc.cliff_start_gates,
                                                  rc.cliff_max_doublings, cfg.threads)
            if path:
                _store_cached(path, ref)
        refs[kind] = ref
    return refs


# ---------------------------------------------------------------------------
# ensembles


@dataclass
class GateCountResult:
    gate_count: int
    curve: mj.FluctuationCurve
    distances: dict
    distance_se: dict = field(default_factory=dict)
    mean_purity: Optional[float] = None
    mean_fidelity: Optional[float] = None
    seconds: float = 0.0
    cumulants: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"gate_count": self.gate_count, "ensemble_size": self.curve.ensemble_size,
                "distances": self.distances, "distance_se": self.distance_se,
                "mean_purity": self.mean_purity, "mean_fidelity": self.mean_fidelity,
                "seconds": self.seconds}


def _member_result(cfg: ExperimentConfig, n_gates: int, i: int):
    c = sample_circuit(cfg.gate_set, cfg.topology, n_gates,
                       RngStream(cfg.seed, stream_id(DEVICE, n_gates, i)), cfg.placement_weighting)
    purity = fid = np.nan
    if cfg.mixed:
        rho = evolve_mixed(schedule_noise(c, cfg.noise))
        p = clean_probabilities(np.real(np.diagonal(rho)))
        purity = float(np.vdot(rho, rho).real)
        psi = evolve_pure(c)
        fid = float(np.vdot(psi, rho @ psi).real)
    else:
        p = clean_probabilities(np.abs(evolve_pure(c)) ** 2)
        if cfg.noise.variant == "white_noise":
            p = mj.white_noise_transform(p, cfg.noise.f)
    if cfg.shots:
        p = mj.sample_shots(p, cfg.shots, RngStream(cfg.seed, stream_id(SHOTS, n_gates, i)).generator())
    return mj.lorenz_cumulants(p), purity, fid


def run_gate_count(cfg: ExperimentConfig, n_gates: int, references: dict) -> GateCountResult:
    """Simulate one ensemble and compare it with ``references``."""
    t0 = time.perf_counter()
    rows = _ordered_map(lambda i: _member_result(cfg, n_gates, i), cfg.ensemble_size, cfg.threads)
    cum = np.array([r[0] for r in rows])
    curve = mj.ensemble_fluctuations(cum)
    dist = {k: mj.distance_to_reference(curve, ref.curve) for k, ref in references.items()}
    se = {}
    if cfg.bootstrap:
        for j, (k, ref) in enumerate(sorted(references.items())):
            gen = RngStream(cfg.seed, stream_id(BOOTSTRAP, n_gates, j)).generator()
            se[k] = mj.bootstrap_distance_se(cum, ref.curve, cfg.bootstrap, gen)
    purity = fid = None
    if cfg.mixed:
        purity = float(np.mean([r[1] for r in rows]))
        fid = float(np.mean([r[2] for r in rows]))
    return GateCountResult(n_gates, curve, dist, se, purity, fid, time.perf_counter() - t0,
                           cum if cfg.keep_cumulants else None)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    results: list
    references: dict
    timings: dict = field(default_factory=dict)

    def result(self, gate_count: int) -> GateCountResult:
        for r in self.results:
            if r.gate_count == gate_count:
                return r
        raise KeyError(gate_count)

    def to_dict(self, include_runtime: bool = True) -> dict:
        """Plain-data form of the report.

        ``include_runtime=False`` drops wall times and the thread count, which
        leaves exactly the part that must not depend on how the run was
        executed.
        """
        d = {
            "config": self.config.to_dict(),
            "n_qubits": self.config.n_qubits,
            "references": {k: r.meta() for k, r in self.references.items()},
            "results": [r.to_dict() for r in self.results],
        }
        if include_runtime:
            d["timings"] = self.timings
        else:
            d["config"].pop("threads")
            for r in d["results"]:
                r.pop("seconds")
        return d

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write one CSV per curve plus ``summary.json``; returns the summary path."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, ref in self.references.items():
            mj.write_curve_csv(out / f"reference_{k}.csv", ref.curve)
        for r in self.results:
            mj.write_curve_csv(out / f"curve_g{r.gate_count}.csv", r.curve)
        path = out / "summary.json"
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return path

    @classmethod
    def load(cls, out_dir: Union[str, Path]) -> "ExperimentReport":
        out = Path(out_dir)
        d = json.loads((out / "summary.json").read_text())
        cfg = ExperimentConfig.from_dict(d["config"])
        refs = {}
        for k, meta in d["references"].items():
            curve = mj.read_curve_csv(out / f"reference_{k}.csv", meta["ensemble_size"])
            refs[k] = ReferenceCurve(meta["kind"], curve, meta["seed"], meta["gate_count"],
                                     meta["final_distance"], meta["tolerance"], meta["history"])
        results = []
        for r in d["results"]:
            curve = mj.read_curve_csv(out / f"curve_g{r['gate_count']}.csv", r["ensemble_size"])
            results.append(GateCountResult(r["gate_count"], curve, r["distances"], r["distance_se"],
                                           r["mean_purity"], r["mean_fidelity"], r["seconds"]))
        return cls(cfg, results, refs, d.get("timings", {}))


def run_experiment(cfg: ExperimentConfig, references: Optional[dict] = None) -> ExperimentReport:
    """Run every gate count of ``cfg``.

    Args:
        cfg: the experiment.
        references: prebuilt reference curves; built from ``cfg.references``
            (and the cache) when omitted.
    """
    if cfg.mixed and cfg.n_qubits > cfg.max_mixed_qubits:
        raise ConfigError(f"density-matrix runs are capped at {cfg.max_mixed_qubits} qubits "
                          f"(got {cfg.n_qubits}); raise max_mixed_qubits to override")
    t0 = time.perf_counter()
    if references is None:
        references = build_references(cfg)
    for k, ref in references.items():
        if ref.n_qubits != cfg.n_qubits:
            raise ConfigError(f"reference {k!r} has {ref.n_qubits} qubits, device has {cfg.n_qubits}")
    t_ref = time.perf_counter() - t0
    results = []
    for g in cfg.gate_counts:
        r = run_gate_count(cfg, g, references)
        log.info("%d gates: %s (%.1fs)", g, r.distances, r.seconds)
        results.append(r)
    timings = {"references_s": t_ref, "total_s": time.perf_counter() - t0}
    return ExperimentReport(cfg, results, references, timings)
