"""Command-line front end.

Subcommands compute one artifact family each and write CSV data plus
matplotlib-rendered SVG figures into the output directory, together
with a manifest of content hashes.  Exit codes: 0 success, 2 unknown
subcommand or bad usage, 3 invalid configuration value, 4 unwritable
output; oracle-compare exits 1 when the deviation bound is exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import engine, kernel, oracle, velocity
from .config import RunConfig, config_keys, parse_config
from .csvio import ArtifactManifest, snapshot_comments, write_csv
from .errors import ConfigError, OutputError, ParameterError, SpinwaveError
from .figures import line_plot
from .spectrum import build_spectrum

SUBCOMMANDS = (
    "profile",
    "timeseries",
    "velocities",
    "lr-bound",
    "pulse-train",
    "transport",
    "oracle-compare",
    "reproduce-figures",
)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spinwave",
        description="Spin response of a locally pulsed periodic anisotropic XY ring.",
    )
    p.add_argument("command", choices=SUBCOMMANDS, help="artifact family to compute")
    p.add_argument("--config", metavar="PATH", help="key = value configuration file")
    p.add_argument("--out", metavar="DIR", default=".", help="output directory")
    p.add_argument(
        "--seedless",
        action="store_true",
        help="reserved: the package contains no random number generator; "
        "setting this flag is rejected to document that determinism",
    )
    group = p.add_argument_group("configuration overrides")
    for key in config_keys():
        group.add_argument(f"--{key}", dest=f"cfg::{key}", metavar="VALUE")
    return p


def _prepare_out_dir(out_dir: str) -> str:
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise OutputError(f"output directory {out_dir!r} is not writable: {exc}") from exc
    return out_dir


def _build_kernel(config: RunConfig) -> kernel.ResponseKernel:
    spec = build_spectrum(config.chain())
    return kernel.build_kernel(spec, config.pulse(), config.kernel_sector)


def _trace_rows(trace):
    for i, site in enumerate(trace.grid.sites):
        for j, t in enumerate(trace.grid.times):
            yield (int(site), float(t), float(trace.values[i, j]))


def _emit_trace(trace, out_dir, stem, manifest, plot_kind):
    comments = snapshot_comments(trace.provenance)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    digest = write_csv(csv_path, comments, ["site", "time", "value"], _trace_rows(trace))
    manifest.add(csv_path, digest)
    svg_path = os.path.join(out_dir, f"{stem}.svg")
    if plot_kind == "profile":
        t = trace.grid.times[0]
        line_plot(
            svg_path,
            trace.grid.sites,
            [(f"t = {t:g}", trace.values[:, 0])],
            "site n",
            "z-component deviation",
            f"spin profile at t = {t:g}",
            marker="o",
        )
    else:
        site = trace.grid.sites[0]
        line_plot(
            svg_path,
            trace.grid.times,
            [(f"site {site}", trace.values[0, :])],
            "time",
            "z-component deviation",
            f"z-component at site n = {site}",
        )
    manifest.add(svg_path)


def _scan_times(config: RunConfig) -> np.ndarray:
    n_steps = int(round((config.scan_t_max - config.scan_t_min) / config.scan_dt))
    return config.scan_t_min + config.scan_dt * np.arange(n_steps + 1)


def cmd_profile(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    kern = _build_kernel(config)
    site_max = config.scan_site_max or config.chain_N
    sites = np.arange(1, site_max + 1)
    trace = engine.profile_at_time(
        kern, config.scan_t, sites, include_c_offset=config.include_c_offset
    )
    _emit_trace(trace, out_dir, "profile", manifest, "profile")


def cmd_timeseries(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    kern = _build_kernel(config)
    trace = engine.timeseries_at_site(
        kern, config.scan_site, _scan_times(config), include_c_offset=config.include_c_offset
    )
    _emit_trace(trace, out_dir, "timeseries", manifest, "series")


def _velocity_artifacts(config: RunConfig, out_dir: str, manifest: ArtifactManifest,
                        stems=("vmax", "vavg")):
    spec = build_spectrum(config.chain())
    table = velocity.build_dispersion(spec)
    curve = velocity.group_velocities(table)
    comments = snapshot_comments(
        {"chain": config.chain().as_dict(), "energy_scale": curve.energy_scale}
    )
    for stem, omega, v in (
        (stems[0], table.omega_max, curve.v_max),
        (stems[1], table.omega_avg, curve.v_avg),
    ):
        path = os.path.join(out_dir, f"{stem}.csv")
        rows = zip(table.kappa, table.K, omega, v)
        digest = write_csv(path, comments, ["kappa", "K", "omega", "v"], rows)
        manifest.add(path, digest)
    return table, curve


def cmd_velocities(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    table, curve = _velocity_artifacts(config, out_dir, manifest)
    svg_path = os.path.join(out_dir, "velocities.svg")
    line_plot(
        svg_path,
        curve.K,
        [("max branch", curve.v_max), ("avg branch", curve.v_avg)],
        "wavenumber K",
        "group velocity (sites/time)",
        "group velocity vs wavenumber",
    )
    manifest.add(svg_path)


def cmd_lr_bound(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    params = config.chain()
    norm = velocity.hamiltonian_norm(params, config.norm_strategy, config.norm_value)
    result = velocity.lr_bound(norm, params.N, strategy=config.norm_strategy)
    comments = snapshot_comments(
        {"chain": params.as_dict(), "norm": {"strategy": config.norm_strategy, "value": norm}}
    )
    summary = os.path.join(out_dir, "lr_bound.csv")
    digest = write_csv(
        summary,
        comments,
        ["N", "norm_H", "strategy", "v_lr", "a_star"],
        [(params.N, norm, config.norm_strategy, result.v_lr, result.a_star)],
    )
    manifest.add(summary, digest)
    curve_path = os.path.join(out_dir, "va_curve.csv")
    digest = write_csv(
        curve_path, comments, ["a", "v_a"], zip(result.a_grid, result.v_a)
    )
    manifest.add(curve_path, digest)
    svg_path = os.path.join(out_dir, "va_curve.svg")
    line_plot(
        svg_path,
        result.a_grid,
        [("v(a)", result.v_a)],
        "decay parameter a",
        "bound velocity v(a)",
        f"variational bound, minimum at a = 1/N = {1.0 / params.N:g}",
        logx=True,
    )
    manifest.add(svg_path)
    print(f"v_LR = {result.v_lr:.6g} (norm {norm:.6g}, strategy {config.norm_strategy})")


def cmd_pulse_train(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    kern = _build_kernel(config)
    train = engine.PulseTrain(
        n_pulses=config.train_n_pulses, t0=config.train_t0, base=config.pulse()
    )
    t_lo = train.n_pulses * train.t0 + config.scan_dt
    times = np.arange(t_lo, config.train_t_max + 1e-12, config.scan_dt)
    if len(times) == 0:
        raise ConfigError(
            "train.t_max leaves no sample times past the train "
            f"(needs > {t_lo})", field="train.t_max",
        )
    rows = []
    values = []
    for t in times:
        res = engine.pulse_train_terms(
            kern, train, config.train_site, float(t), config.eq14_literal
        )
        rows.append(
            (float(t), res.total, res.transient_term, res.coherent_term, res.resonant_modes)
        )
        values.append(res.total)
    comments = snapshot_comments(
        {
            "chain": config.chain().as_dict(),
            "pulse": config.pulse().as_dict(),
            "train": {
                "n_pulses": train.n_pulses,
                "t0": train.t0,
                "site": config.train_site,
                "eq14_literal": config.eq14_literal,
            },
        }
    )
    path = os.path.join(out_dir, "pulse_train.csv")
    digest = write_csv(
        path, comments, ["time", "total", "transient", "coherent", "resonant_modes"], rows
    )
    manifest.add(path, digest)
    svg_path = os.path.join(out_dir, "pulse_train.svg")
    line_plot(
        svg_path,
        times,
        [(f"site {config.train_site}", np.array(values))],
        "time",
        "z-component deviation",
        f"{train.n_pulses}-pulse train response",
    )
    manifest.add(svg_path)


def cmd_transport(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    kern = _build_kernel(config)
    hops = engine.run_transport_protocol(
        kern,
        n_hops=config.transport_hops,
        t_pick=config.transport_t_pick,
        hop_spacing=config.transport_spacing,
        settle=config.transport_settle,
    )
    comments = snapshot_comments(
        {
            "chain": config.chain().as_dict(),
            "pulse": config.pulse().as_dict(),
            "transport": {
                "hops": config.transport_hops,
                "t_pick": config.transport_t_pick,
                "spacing": config.transport_spacing,
                "settle": config.transport_settle,
            },
        }
    )
    rows = [
        (i + 1, h.site, h.t_apply, h.h1_applied, h.achieved, h.target,
         abs(h.achieved - h.target))
        for i, h in enumerate(hops)
    ]
    path = os.path.join(out_dir, "transport.csv")
    digest = write_csv(
        path, comments,
        ["hop", "site", "t_apply", "h1_applied", "achieved", "target", "abs_error"],
        rows,
    )
    manifest.add(path, digest)
    svg_path = os.path.join(out_dir, "transport.svg")
    line_plot(
        svg_path,
        [r[0] for r in rows],
        [("correction field", np.array([r[3] for r in rows]))],
        "hop",
        "applied field h1'",
        "amplitude-forwarding corrections",
        marker="o",
    )
    manifest.add(svg_path)
    worst = max(r[6] for r in rows)
    print(f"transported amplitude preserved to {worst:.3e} over {len(rows)} hops")


def cmd_oracle_compare(config: RunConfig, out_dir: str, manifest: ArtifactManifest) -> int:
    n = config.oracle_N
    params = config.chain()
    if params.N != n:
        from .spectrum import ChainParams

        params = ChainParams(N=n, J=params.J, gamma=params.gamma, h0=params.h0)
    pulse = kernel.PulseSpec(
        h1=config.pulse_h1, tau_H=config.pulse_tau_H, source_site=n
    )
    kern = kernel.build_kernel(build_spectrum(params), pulse, config.kernel_sector)
    times = np.arange(0.0, config.oracle_t_max + 1e-12, config.oracle_dt)
    chain = oracle.build_dense_chain(params, source_site=n)
    exact, info = oracle.sz_deviation_trace(chain, pulse, times)
    sites = np.arange(1, n + 1)
    pert = kern.evaluate(sites, times).T  # (times, sites), matching `exact`
    peak = float(np.max(np.abs(exact)))
    max_diff = float(np.max(np.abs(exact - pert)))
    rel = max_diff / peak if peak > 0 else 0.0
    ok = rel <= config.oracle_tolerance

    comments = snapshot_comments(
        {"chain": params.as_dict(), "pulse": pulse.as_dict(),
         "oracle": {"t_max": config.oracle_t_max, "dt": config.oracle_dt,
                    "tolerance": config.oracle_tolerance}}
    )
    rows = []
    trace_rows = []
    for i, site in enumerate(sites):
        for t, ex in zip(times, exact[:, i]):
            trace_rows.append((int(site), float(t), float(ex)))
    for j, t in enumerate(times):
        for i, site in enumerate(sites):
            rows.append((int(site), float(t), exact[j, i], pert[j, i],
                         exact[j, i] - pert[j, i]))
    # exact trace in the same site,time,value schema the scans emit
    trace_path = os.path.join(out_dir, "oracle_trace.csv")
    digest = write_csv(trace_path, comments, ["site", "time", "value"], trace_rows)
    manifest.add(trace_path, digest)
    path = os.path.join(out_dir, "oracle_compare.csv")
    digest = write_csv(
        path, comments, ["site", "time", "exact", "perturbative", "diff"], rows
    )
    manifest.add(path, digest)
    summary = os.path.join(out_dir, "oracle_summary.csv")
    digest = write_csv(
        summary,
        comments,
        ["peak_exact", "max_abs_diff", "max_relative_deviation", "tolerance",
         "within_bound", "ground_sector", "final_norm"],
        [(peak, max_diff, rel, config.oracle_tolerance, ok, kern.ground_sector,
          info["final_norm"])],
    )
    manifest.add(summary, digest)
    svg_path = os.path.join(out_dir, "oracle_compare.svg")
    line_plot(
        svg_path,
        times,
        [("exact", exact[:, n - 1]), ("perturbative", pert[:, n - 1])],
        "time",
        "z-component deviation",
        f"source-site response, exact vs first order (N = {n})",
    )
    manifest.add(svg_path)
    print(f"max relative deviation {rel:.3e} (tolerance {config.oracle_tolerance:g}) "
          f"-> {'within bound' if ok else 'EXCEEDS BOUND'}")
    return 0 if ok else 1


def cmd_reproduce_figures(config: RunConfig, out_dir: str, manifest: ArtifactManifest):
    kern = _build_kernel(config)
    site_max = config.scan_site_max or min(50, config.chain_N)
    sites = np.arange(1, site_max + 1)
    times = _scan_times(config)

    for stem, t in (("fig1_profile_t1", 1.0), ("fig2_profile_t200", 200.0)):
        trace = engine.profile_at_time(kern, t, sites, config.include_c_offset)
        _emit_trace(trace, out_dir, stem, manifest, "profile")
    for stem, site in (("fig3_series_site1", 1), ("fig4_series_site40", 40)):
        trace = engine.timeseries_at_site(kern, site, times, config.include_c_offset)
        _emit_trace(trace, out_dir, stem, manifest, "series")

    table, curve = _velocity_artifacts(
        config, out_dir, manifest, stems=("fig5_vmax", "fig6_vavg")
    )
    for stem, branch, label in (
        ("fig5_vmax", curve.v_max, "max branch"),
        ("fig6_vavg", curve.v_avg, "avg branch"),
    ):
        svg_path = os.path.join(out_dir, f"{stem}.svg")
        line_plot(
            svg_path,
            curve.K,
            [(label, branch)],
            "wavenumber K(k,l)",
            "group velocity (sites/time)",
            f"{label} group velocity, N = {config.chain_N}",
        )
        manifest.add(svg_path)


_HANDLERS = {
    "profile": cmd_profile,
    "timeseries": cmd_timeseries,
    "velocities": cmd_velocities,
    "lr-bound": cmd_lr_bound,
    "pulse-train": cmd_pulse_train,
    "transport": cmd_transport,
    "oracle-compare": cmd_oracle_compare,
    "reproduce-figures": cmd_reproduce_figures,
}


def run_subcommand(name: str, config: RunConfig, out_dir: str):
    """Dispatch one subcommand; returns (manifest, exit_code)."""
    out_dir = _prepare_out_dir(out_dir)
    manifest = ArtifactManifest(params=config.snapshot())
    code = _HANDLERS[name](config, out_dir, manifest) or 0
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return manifest, code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.seedless:
            raise ConfigError(
                "--seedless is reserved documentation: no random number "
                "generator exists anywhere in this package, so the flag "
                "must not be set"
            )
        overrides = {
            key.split("::", 1)[1]: value
            for key, value in vars(args).items()
            if key.startswith("cfg::") and value is not None
        }
        config = parse_config(args.config, overrides)
        manifest, code = run_subcommand(args.command, config, args.out)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 4
    except SpinwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.files)} artifacts + manifest.json to {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
