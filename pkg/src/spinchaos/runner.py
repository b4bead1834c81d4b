"""Pipeline orchestration: run one configured analysis and emit files.

Every run writes the analysis-specific CSV/JSON outputs plus a manifest
(config hash, package versions, wall time).  Outputs are deterministic
for a fixed config and seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import RunConfig, geometry_from_config
from .errors import NumericsError
from . import dynamics as dyn
from . import eigvec
from . import hilbert
from . import observables as obs
from . import spectral
from .hamiltonian import assemble_sector_hamiltonian, couplings


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _sector_pipeline(cfg: RunConfig):
    """Geometry -> couplings -> sector basis -> H, honoring parity."""
    geo = geometry_from_config(cfg)
    c = couplings(geo)
    basis = hilbert.sector_basis(cfg.n, cfg.sz)
    ising = 0.0 if cfg.xx_model else -2.0
    h = assemble_sector_hamiltonian(c, basis, ising=ising, dim_cap=cfg.dimension_cap())
    if cfg.parity != "none":
        sym, anti = hilbert.desymmetrize(h)
        h = sym if cfg.parity == "symmetric" else anti
        basis = h.basis
    return geo, c, basis, h


def _spectrum_files(cfg, out, basis, spec):
    dens, e_tilde = spectral.level_density(spec.eigenvalues, cfg.bandwidth)
    _write_csv(
        out / "spectrum.csv",
        ["index", "E", "E_tilde", "omega"],
        (
            (k, _fmt(e), _fmt(et), _fmt(om))
            for k, (e, et, om) in enumerate(zip(spec.eigenvalues, e_tilde, dens.y))
        ),
    )
    return dens


def _summary(cfg, basis, extra=None):
    payload = {
        "model": cfg.model,
        "N": cfg.n,
        "sz": cfg.sz,
        "parity": cfg.parity,
        "dimension": basis.dimension if basis is not None else None,
    }
    if extra:
        payload.update(extra)
    return payload


def _run_spectrum(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    dens = _spectrum_files(cfg, out, basis, spec)
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "bandwidth": dens.bandwidth,
        "E_sigma": float(spec.eigenvalues.std()),
    }))
    return ["spectrum.csv", "summary.json"]


def _lsi_outputs(cfg, out, basis, spec):
    dens = _spectrum_files(cfg, out, basis, spec)
    sample = spectral.unfold(spec.eigenvalues, dens, cfg.truncate)
    eta = spectral.lsi(sample)
    hist = spectral.spacing_histogram(sample)
    _write_csv(out / "spacings.csv", ["s_tilde"], ((_fmt(s),) for s in sample.spacings))
    _write_csv(
        out / "histogram.csv",
        ["left_edge", "height"],
        ((_fmt(e), _fmt(ht)) for e, ht in zip(hist.edges[:-1], hist.heights)),
    )
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "lsi": eta,
        "s0": spectral.S0,
        "bandwidth": dens.bandwidth,
        "truncate": cfg.truncate,
        "mean_spacing": float(sample.spacings.mean()),
        "spacing_count": len(sample),
    }))
    return ["spectrum.csv", "spacings.csv", "histogram.csv", "summary.json"]


def _run_lsi(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    return _lsi_outputs(cfg, out, basis, spec)


def _run_lsi_profile(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    prof = spectral.lsi_profile(spec.eigenvalues, cfg.window_levels, cfg.bandwidth)
    _write_csv(
        out / "lsi_profile.csv",
        ["E", "eta", "unreliable"],
        (
            (_fmt(e), _fmt(eta), int(bad))
            for e, eta, bad in zip(prof.x, prof.y, prof.unreliable)
        ),
    )
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "window_levels": cfg.window_levels,
        "bandwidth": prof.bandwidth,
        "eta_min": float(prof.y.min()),
        "eta_min_energy": float(prof.x[np.argmin(prof.y)]),
    }))
    return ["lsi_profile.csv", "summary.json"]


def _npc_payload(profile):
    return {
        "reference": profile.reference,
        "columns": {
            "min": float(profile.column_npc.min()),
            "max": float(profile.column_npc.max()),
            "mean": float(profile.column_npc.mean()),
        },
        "rows": {
            "min": float(profile.row_npc.min()),
            "max": float(profile.row_npc.max()),
            "mean": float(profile.row_npc.mean()),
        },
    }


def _run_npc(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    prof = eigvec.npc_profile(spec)
    _write_csv(
        out / "npc_columns.csv",
        ["alpha", "E", "npc"],
        (
            (k, _fmt(e), _fmt(x))
            for k, (e, x) in enumerate(zip(spec.eigenvalues, prof.column_npc))
        ),
    )
    _write_csv(
        out / "npc_rows.csv",
        ["row", "npc"],
        ((k, _fmt(x)) for k, x in enumerate(prof.row_npc)),
    )
    _write_json(out / "summary.json", _summary(cfg, basis, {"npc": _npc_payload(prof)}))
    return ["npc_columns.csv", "npc_rows.csv", "summary.json"]


def _run_components(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    prof = eigvec.npc_profile(spec)
    sel = eigvec.select_components(prof, cfg.n_vectors, cfg.row_min)
    sample = eigvec.unfold_components(spec, sel, cfg.bandwidth)
    rows = []
    for a, i in enumerate(sample.rows):
        for b, alpha in enumerate(sample.columns):
            rows.append(
                (int(i), int(alpha), _fmt(sample.energies[b]),
                 _fmt(sample.raw[a, b]), _fmt(sample.rescaled[a, b]))
            )
    _write_csv(out / "components.csv", ["row", "col", "E", "c", "c_tilde"], rows)
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "npc": _npc_payload(prof),
        "count": sample.count,
        "n_vectors": cfg.n_vectors,
        "row_min": cfg.row_min,
        "sample_variance": float(sample.values.var()),
        "sample_mean": float(sample.values.mean()),
    }))
    return ["components.csv", "summary.json"]


def _run_observables(cfg, out):
    _, c, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    if cfg.observable == "sigma_z":
        op = obs.local_sigma_z(cfg.sites[0], basis)
    else:
        op = obs.pair_energy_op(cfg.sites[0], cfg.sites[1], c, basis)
    series = obs.detrend_and_rescale(
        obs.eigen_expectations(op, spec), cfg.bandwidth
    )
    _write_csv(
        out / "observables.csv",
        ["alpha", "E", "value", "trend", "residual", "rescaled", "sampled_flag"],
        (
            (k, _fmt(e), _fmt(v), _fmt(g), _fmt(v - g), _fmt(r), int(flag))
            for k, (e, v, g, r, flag) in enumerate(
                zip(series.energies, series.values, series.trend,
                    series.rescaled, series.sampled)
            )
        ),
    )
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "observable": cfg.observable,
        "sites": cfg.sites,
        "sampled_variance": float(series.rescaled[series.sampled].var()),
        "trend_mean": float(series.trend.mean()),
    }))
    return ["observables.csv", "summary.json"]


def _run_concentration(cfg, out):
    scan = obs.concentration_scan(
        cfg.sizes,
        sites=tuple(cfg.sites) if cfg.observable == "pair_energy" else (4, 5),
        model=cfg.model,
        parity=cfg.parity,
        e_star=cfg.e_star,
        window=cfg.window,
    )
    _write_csv(
        out / "concentration.csv",
        ["N", "ln_var", "ln_inv_density", "E_star"],
        (
            (int(n), _fmt(v), _fmt(d), _fmt(scan.e_star))
            for n, v, d in zip(scan.sizes, scan.ln_variance, scan.ln_inv_density)
        ),
    )
    _write_json(out / "summary.json", {
        "model": cfg.model,
        "sizes": [int(s) for s in scan.sizes],
        "e_star": scan.e_star,
        "window": scan.window,
        "variance_slope": scan.variance_slope,
        "variance_stderr": scan.variance_stderr,
        "density_slope": scan.density_slope,
        "density_stderr": scan.density_stderr,
    })
    return ["concentration.csv", "summary.json"]


def _run_evolve(cfg, out):
    _, _, basis, h = _sector_pipeline(cfg)
    spec = spectral.eigendecompose(h)
    grid = dyn.TimeGrid(cfg.time_end, cfg.time_steps)
    label = cfg.initial_state
    if cfg.initial_state == "highest_npc":
        j, _ = dyn.highest_npc_state(basis, spec)
        label = hilbert.to_bitstring(basis.states[j], cfg.n)
        psi0 = np.zeros(basis.dimension)
        psi0[j] = 1.0
    elif cfg.initial_state.startswith("combo:"):
        psi0 = dyn.reflection_combo_state(basis, cfg.initial_state[6:])
    else:
        psi0 = dyn.computational_state(basis, cfg.initial_state)
    if basis.parity == "none":
        t, values, total = dyn.evolve_sigma_z_batch(psi0, basis, spec, grid, label)
        npc_0 = total.initial_npc
    else:
        results = [
            dyn.evolve_expectation(psi0, obs.local_sigma_z(i, basis), spec, grid, label)
            for i in range(1, cfg.n + 1)
        ]
        t = grid.times
        values = np.vstack([r.values for r in results])
        npc_0 = results[0].initial_npc
    header = ["t"] + [f"spin_{i}" for i in range(1, cfg.n + 1)]
    _write_csv(
        out / "evolution.csv",
        header,
        (
            [_fmt(ti)] + [_fmt(values[i, k]) for i in range(cfg.n)]
            for k, ti in enumerate(t)
        ),
    )
    curve, proj_npc = dyn.support_density(psi0, spec, cfg.bandwidth)
    _write_csv(
        out / "support_density.csv",
        ["E", "P"],
        ((_fmt(x), _fmt(y)) for x, y in zip(curve.x, curve.y)),
    )
    _write_json(out / "summary.json", _summary(cfg, basis, {
        "initial_state": label,
        "initial_npc": npc_0,
        "microcanonical": dyn.microcanonical_value(cfg.n, cfg.sz),
        "time_end": cfg.time_end,
        "time_steps": cfg.time_steps,
        "xx_model": cfg.xx_model,
    }))
    return ["evolution.csv", "support_density.csv", "summary.json"]


def _run_goe_reference(cfg, out):
    goe = spectral.sample_goe(cfg.goe_dim, cfg.seed)
    spec = spectral.eigendecompose(goe)
    dens, _ = spectral.level_density(spec.eigenvalues, cfg.bandwidth)
    sample = spectral.unfold(spec.eigenvalues, dens, cfg.truncate)
    hist = spectral.spacing_histogram(sample)
    eta = spectral.lsi(sample)
    prof = eigvec.npc_profile(spec)
    sel = eigvec.select_components(prof, cfg.n_vectors, cfg.row_min)
    comp = eigvec.unfold_components(spec, sel, cfg.bandwidth)
    _write_csv(
        out / "histogram.csv",
        ["left_edge", "height"],
        ((_fmt(e), _fmt(ht)) for e, ht in zip(hist.edges[:-1], hist.heights)),
    )
    _write_csv(out / "spacings.csv", ["s_tilde"], ((_fmt(s),) for s in sample.spacings))
    _write_json(out / "summary.json", {
        "model": "goe",
        "dimension": cfg.goe_dim,
        "seed": cfg.seed,
        "lsi": eta,
        "s0": spectral.S0,
        "mean_spacing": float(sample.spacings.mean()),
        "npc": _npc_payload(prof),
        "component_count": comp.count,
        "component_variance": float(comp.values.var()),
    })
    return ["histogram.csv", "spacings.csv", "summary.json"]


_ANALYSIS_RUNNERS = {
    "spectrum": _run_spectrum,
    "lsi": _run_lsi,
    "lsi_profile": _run_lsi_profile,
    "npc": _run_npc,
    "components": _run_components,
    "observables": _run_observables,
    "concentration": _run_concentration,
    "evolve": _run_evolve,
    "goe_reference": _run_goe_reference,
}


def run(cfg: RunConfig) -> list[str]:
    """Execute the configured analysis; returns the emitted file names.

    Writes a manifest.json recording the resolved config, its hash, and
    library versions so a run can be reproduced bit for bit.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.time()
    files = _ANALYSIS_RUNNERS[cfg.analysis](cfg, out)
    resolved = cfg.as_dict()
    manifest = {
        "analysis": cfg.analysis,
        "config": resolved,
        "config_sha256": hashlib.sha256(
            json.dumps(resolved, sort_keys=True).encode()
        ).hexdigest(),
        "versions": {
            "spinchaos": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": round(time.time() - start, 3),
        "outputs": files,
    }
    _write_json(out / "manifest.json", manifest)
    return files + ["manifest.json"]
