"""Run configuration: JSON schema, validation, and defaults.

A config names exactly one geometry (model + N, with optional position
override for fcc/custom), one analysis, and the analysis parameters.
Unknown keys are rejected so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .errors import ConfigError

ANALYSES = (
    "spectrum",
    "lsi",
    "lsi_profile",
    "npc",
    "components",
    "observables",
    "concentration",
    "evolve",
    "goe_reference",
)

MODELS = ("chain", "chain_nn", "fcc", "custom")

_KNOWN_KEYS = {
    "model", "N", "analysis", "positions", "field_axis", "exponent",
    "legacy_3d_scale", "xx_model", "sz", "parity", "bandwidth", "truncate",
    "window_levels", "time_grid", "initial_state", "observable", "sites",
    "sizes", "e_star", "window", "goe_dim", "n_vectors", "row_min",
    "seed", "out_dir", "memory_cap_gib",
}


@dataclass
class RunConfig:
    model: str
    n: int
    analysis: str
    sz: int
    parity: str
    positions: list | None = None
    field_axis: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    exponent: float = 3.0
    legacy_3d_scale: bool = False
    xx_model: bool = False
    bandwidth: float | None = None
    truncate: int = 10
    window_levels: int = 400
    time_end: float = 100.0
    time_steps: int = 1000
    initial_state: str = "highest_npc"
    observable: str = "sigma_z"
    sites: list = field(default_factory=list)
    sizes: list = field(default_factory=lambda: [9, 11, 13, 15])
    e_star: float = 0.0
    window: float = 0.1
    goe_dim: int = 3000
    n_vectors: int = 100
    row_min: float = 100.0
    seed: int = 0
    out_dir: str = "out"
    memory_cap_gib: float = 4.0

    def dimension_cap(self) -> int:
        """Largest dense dimension fitting the memory cap (8-byte entries)."""
        return int((self.memory_cap_gib * 2**30 / 8.0) ** 0.5)

    def as_dict(self) -> dict:
        return asdict(self)


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def _int(raw, path, default=None):
    if raw is None:
        return default
    _expect(isinstance(raw, int) and not isinstance(raw, bool), path, "expected an integer")
    return raw


def _num(raw, path, default=None):
    if raw is None:
        return default
    _expect(isinstance(raw, (int, float)) and not isinstance(raw, bool), path, "expected a number")
    return float(raw)


def _bool(raw, path, default=False):
    if raw is None:
        return default
    _expect(isinstance(raw, bool), path, "expected true/false")
    return raw


def parse_config(text: str | dict) -> RunConfig:
    """Validate a JSON config and fill defaults.

    Raises ConfigError with the offending key path on any schema
    violation; unknown keys are rejected.
    """
    if isinstance(text, str):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        raw = dict(text)
    _expect(isinstance(raw, dict), "$", "config must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    _expect(not unknown, sorted(unknown)[0] if unknown else "", "unknown key")

    model = raw.get("model")
    _expect(model in MODELS, "model", f"must be one of {MODELS}")
    analysis = raw.get("analysis")
    _expect(analysis in ANALYSES, "analysis", f"must be one of {ANALYSES}")

    positions = raw.get("positions")
    if positions is not None:
        _expect(model in ("fcc", "custom"), "positions",
                "positions may only override fcc/custom geometries")
        _expect(isinstance(positions, list) and positions
                and all(isinstance(p, list) and len(p) == 3 for p in positions),
                "positions", "expected a list of [x, y, z] triples")

    if model == "fcc":
        n = _int(raw.get("N"), "N", default=14 if positions is None else len(positions))
        if positions is not None:
            _expect(n == len(positions), "N", "must match the number of positions")
        else:
            _expect(n == 14, "N", "default FCC geometry has 14 sites")
    elif model == "custom":
        _expect(positions is not None, "positions", "custom geometry requires positions")
        n = _int(raw.get("N"), "N", default=len(positions))
        _expect(n == len(positions), "N", "must match the number of positions")
    else:
        n = _int(raw.get("N"), "N")
        _expect(n is not None, "N", "chain models require N")
    _expect(2 <= n <= 24, "N", "supported range is 2..24")

    sz = _int(raw.get("sz"), "sz", default=1 if n % 2 else 2)
    _expect(abs(sz) <= n and (n - sz) % 2 == 0, "sz",
            f"no sector with N={n}, sz={sz}")

    default_parity = "none"
    if model in ("chain", "chain_nn") and analysis not in ("evolve", "goe_reference"):
        default_parity = "symmetric"
    parity = raw.get("parity", default_parity)
    _expect(parity in ("none", "symmetric", "antisymmetric"), "parity",
            "must be none/symmetric/antisymmetric")
    _expect(parity == "none" or model in ("chain", "chain_nn"), "parity",
            "only the mirror-symmetric chain supports parity sectors")

    grid = raw.get("time_grid", {})
    _expect(isinstance(grid, dict) and not set(grid) - {"end", "steps"},
            "time_grid", "expected {end, steps}")

    sites = raw.get("sites")
    observable = raw.get("observable", "sigma_z" if not sites or len(sites) == 1 else "pair_energy")
    _expect(observable in ("sigma_z", "pair_energy"), "observable",
            "must be sigma_z or pair_energy")
    if sites is None:
        sites = [min(4, n)] if observable == "sigma_z" else [min(4, n - 1), min(5, n)]
    _expect(isinstance(sites, list) and all(isinstance(s, int) for s in sites),
            "sites", "expected a list of site indices")
    for s in sites:
        _expect(1 <= s <= n, "sites", f"site {s} out of range 1..{n}")
    if observable == "pair_energy":
        _expect(len(sites) == 2 and sites[0] < sites[1], "sites",
                "pair_energy needs two sites with i < j")

    sizes = raw.get("sizes", [9, 11, 13, 15])
    _expect(isinstance(sizes, list) and len(sizes) >= 3
            and all(isinstance(s, int) and 2 <= s <= 24 for s in sizes),
            "sizes", "expected at least 3 sizes in 2..24")

    truncate = _int(raw.get("truncate"), "truncate", default=10)
    _expect(truncate >= 0, "truncate", "must be non-negative")
    window_levels = _int(raw.get("window_levels"), "window_levels", default=400)
    goe_dim = _int(raw.get("goe_dim"), "goe_dim", default=3000)
    n_vectors = _int(raw.get("n_vectors"), "n_vectors", default=100)
    seed = _int(raw.get("seed"), "seed", default=0)
    _expect(seed >= 0, "seed", "must be a non-negative integer")

    initial_state = raw.get("initial_state", "highest_npc")
    _expect(isinstance(initial_state, str), "initial_state", "expected a string")
    if initial_state != "highest_npc":
        bits = initial_state.removeprefix("combo:")
        _expect(set(bits) <= {"0", "1"} and len(bits) == n, "initial_state",
                f"expected an {n}-bit string, 'combo:<bits>' or 'highest_npc'")

    return RunConfig(
        model=model,
        n=n,
        analysis=analysis,
        sz=sz,
        parity=parity,
        positions=positions,
        field_axis=raw.get("field_axis", [0.0, 0.0, 1.0]),
        exponent=_num(raw.get("exponent"), "exponent", 3.0),
        legacy_3d_scale=_bool(raw.get("legacy_3d_scale"), "legacy_3d_scale"),
        xx_model=_bool(raw.get("xx_model"), "xx_model"),
        bandwidth=_num(raw.get("bandwidth"), "bandwidth"),
        truncate=truncate,
        window_levels=window_levels,
        time_end=_num(grid.get("end"), "time_grid.end", 100.0),
        time_steps=_int(grid.get("steps"), "time_grid.steps", 1000),
        initial_state=initial_state,
        observable=observable,
        sites=sites,
        sizes=sizes,
        e_star=_num(raw.get("e_star"), "e_star", 0.0),
        window=_num(raw.get("window"), "window", 0.1),
        goe_dim=goe_dim,
        n_vectors=n_vectors,
        row_min=_num(raw.get("row_min"), "row_min", 100.0),
        seed=seed,
        out_dir=raw.get("out_dir", "out"),
        memory_cap_gib=_num(raw.get("memory_cap_gib"), "memory_cap_gib", 4.0),
    )


def geometry_from_config(cfg: RunConfig):
    """Build the SpinGeometry described by a config."""
    from .hamiltonian import SpinGeometry, chain_geometry, fcc_geometry

    if cfg.model in ("chain", "chain_nn"):
        variant = "long_range" if cfg.model == "chain" else "nearest_neighbor"
        geo = chain_geometry(cfg.n, variant, cfg.exponent)
        if cfg.field_axis != [0.0, 0.0, 1.0]:
            geo = SpinGeometry(geo.positions, cfg.field_axis, cfg.exponent, geo.model)
        return geo
    if cfg.model == "fcc":
        geo = fcc_geometry(cfg.positions, cfg.legacy_3d_scale)
        return SpinGeometry(geo.positions, cfg.field_axis, cfg.exponent, "fcc",
                            cfg.legacy_3d_scale)
    return SpinGeometry(cfg.positions, cfg.field_axis, cfg.exponent, "custom",
                        cfg.legacy_3d_scale)
