"""Batch front door: flat-text configs, run orchestration, reports.

Config format: one `key = value` per line, `#` comments, dotted keys.
Unknown keys are fatal.  Every subcommand is deterministic given the config
(plus seed), and MFLD1 outputs are byte-identical across reruns.

Exit codes: 0 success, 2 validation error, 3 numerical-instability abort.

The environment variable M3LAB_THREADS caps the BLAS/OpenMP thread pools;
it must be applied before numpy loads, so this module keeps its imports
light and pulls the numerical modules in lazily.
"""

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

from .errors import ConfigError, M3LabError, NumericalError

SPIN_SLICE_COMPS = ("S1", "S2", "S3", "u", "v")
NLS_SLICE_COMPS = ("Re q", "Im q", "Re p", "Im p", "v")


def _apply_thread_cap():
    cap = os.environ.get("M3LAB_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_SCALAR_KEYS = {
    "grid.nx": int,
    "grid.ny": int,
    "grid.lx": float,
    "grid.ly": float,
    "scheme": str,
    "model": str,
    "spin.model": str,
    "nls.model": str,
    "params.c": float,
    "params.d": float,
    "params.l": float,
    "params.beta": int,
    "spin.init": str,
    "nls.init": str,
    "dt": float,
    "t_end": float,
    "save_every": int,
    "output_dir": str,
    "seed": int,
}
_PREFIX_KEYS = ("spin.init.", "nls.init.")

_DEFAULTS = {
    "grid.nx": 64, "grid.ny": 64,
    "grid.lx": 6.283185307179586, "grid.ly": 6.283185307179586,
    "scheme": "spectral",
    "model": "",
    "spin.model": "",
    "nls.model": "",
    "params.c": 0.0, "params.d": 1.0, "params.l": 0.0, "params.beta": 1,
    "spin.init": "modulated-helix",
    "nls.init": "plane-wave",
    "dt": 0.0,
    "t_end": 0.1,
    "save_every": 10,
    "output_dir": "run",
    "seed": 0,
}


def parse_config_text(text: str) -> dict:
    """Flat `key = value` lines to a typed dict; unknown keys are fatal."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _SCALAR_KEYS:
            caster = _SCALAR_KEYS[key]
        elif any(key.startswith(p) for p in _PREFIX_KEYS):
            caster = None  # numeric init parameter
        else:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            if caster is None:
                parsed = float(val)
                parsed = int(parsed) if parsed == int(parsed) else parsed
            elif caster is str:
                parsed = val
            else:
                parsed = caster(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = parsed
    return values


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(repr=False)
    sha: str = ""

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        parsed = parse_config_text(text)
        values = dict(_DEFAULTS)
        values.update(parsed)
        canon = "\n".join(f"{k} = {values[k]!r}" for k in sorted(values))
        return cls(values=values, sha=hashlib.sha256(canon.encode()).hexdigest())

    def __getitem__(self, key):
        return self.values[key]

    def init_args(self, prefix: str) -> dict:
        plen = len(prefix)
        return {k[plen:]: v for k, v in self.values.items() if k.startswith(prefix)}

    def grid(self):
        from .fields import Grid2
        return Grid2(self["grid.nx"], self["grid.ny"], self["grid.lx"], self["grid.ly"])

    def spin_params(self):
        from .spin import SpinParams
        model = self["spin.model"] or self["model"] or "M3"
        return SpinParams(c=self["params.c"], d=self["params.d"], l=self["params.l"],
                          beta=self["params.beta"], model=model)

    def nls_params(self):
        from .nls import NlsParams
        model = self["nls.model"] or self["model"] or "M3q"
        return NlsParams(c=self["params.c"], d=self["params.d"],
                         beta=self["params.beta"], model=model)


def _initial_from_file(path: str, grid, comps: int):
    from .fields import read_mfld1
    if not os.path.exists(path):
        raise ConfigError(f"initial-condition file {path!r} does not exist")
    fgrid, data = read_mfld1(path)
    if (fgrid.nx, fgrid.ny) != (grid.nx, grid.ny):
        raise ConfigError(f"{path}: grid {fgrid.nx}x{fgrid.ny} does not match "
                          f"configured {grid.nx}x{grid.ny}")
    if data.shape[2] < comps:
        raise ConfigError(f"{path}: {data.shape[2]} components, need at least {comps}")
    return data


def _make_initial_spin(cfg: RunConfig):
    from .spin import INITIAL_CONDITIONS
    name = cfg["spin.init"]
    if name.endswith(".mfld1"):
        def from_file(grid):
            return _initial_from_file(name, grid, 3)[..., 0:3]
        return from_file
    if name not in INITIAL_CONDITIONS:
        raise ConfigError(f"unknown spin.init {name!r}; have {sorted(INITIAL_CONDITIONS)}")
    gen = INITIAL_CONDITIONS[name]
    args = cfg.init_args("spin.init.")
    try:
        return lambda grid: gen(grid, **args)
    except TypeError as exc:  # pragma: no cover - signature errors surface on call
        raise ConfigError(str(exc)) from exc


def _timestep(cfg: RunConfig, grid) -> float:
    from .spin import default_dt
    dt = cfg["dt"]
    return dt if dt > 0.0 else default_dt(grid)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_simulate_spin(args) -> int:
    import numpy as np
    from .fields import write_mfld1
    from .frames import coeffs_from_frame, frame_from_spin
    from .invariants import charges
    from .spin import make_state, run_spin

    cfg = RunConfig.load(args.config)
    grid = cfg.grid()
    par = cfg.spin_params()
    scheme = cfg["scheme"]
    S0 = _make_initial_spin(cfg)(grid)
    dt = _timestep(cfg, grid)
    n_steps = max(1, int(round(cfg["t_end"] / dt)))
    state = make_state(grid, S0, par, scheme=scheme)
    state.validate()
    saved = run_spin(grid, state, par, dt, n_steps, cfg["save_every"], scheme)

    out = os.path.join(args.output_dir, cfg["output_dir"])
    os.makedirs(out, exist_ok=True)
    slices, rows = [], []
    for idx, st in enumerate(saved):
        name = f"spin_{idx:06d}.mfld1"
        data = np.concatenate([st.S, st.u[..., None], st.v[..., None]], axis=-1)
        write_mfld1(os.path.join(out, name), grid, data)
        slices.append(name)
        F = frame_from_spin(grid, st.S, scheme)
        rep = charges(grid, F, coeffs_from_frame(grid, F, scheme), scheme, par.beta)
        rows.append([st.t] + rep.as_row())
    with open(os.path.join(out, "invariants.csv"), "w") as fh:
        fh.write("t,K1,K2,K3,Kc1,Kc2,Kc3,Q1,Q2,Q3\n")
        for row in rows:
            fh.write(",".join(repr(x) for x in row) + "\n")
    _write_json(os.path.join(out, "meta.json"), {
        "kind": "spin",
        "config_hash": cfg.sha,
        "config": cfg.values,
        "dt": dt,
        "times": [st.t for st in saved],
        "slices": slices,
        "max_renorm": max(st.renorm for st in saved),
    })
    print(f"saved {len(saved)} slices to {out}")
    return 0


def cmd_simulate_nls(args) -> int:
    import numpy as np
    from .fields import write_mfld1
    from .nls import INITIAL_CONDITIONS, make_state, run_nls

    cfg = RunConfig.load(args.config)
    grid = cfg.grid()
    par = cfg.nls_params()
    scheme = cfg["scheme"]
    name = cfg["nls.init"]
    if name.endswith(".mfld1"):
        data = _initial_from_file(name, grid, 2)
        q0 = data[..., 0] + 1j * data[..., 1]
    elif name not in INITIAL_CONDITIONS:
        raise ConfigError(f"unknown nls.init {name!r}; have {sorted(INITIAL_CONDITIONS)}")
    else:
        q0 = INITIAL_CONDITIONS[name](grid, **cfg.init_args("nls.init."))
    dt = _timestep(cfg, grid)
    n_steps = max(1, int(round(cfg["t_end"] / dt)))
    state = make_state(grid, q0, par, scheme=scheme)
    saved = run_nls(grid, state, par, dt, n_steps, cfg["save_every"], scheme)

    out = os.path.join(args.output_dir, cfg["output_dir"])
    os.makedirs(out, exist_ok=True)
    slices = []
    for idx, st in enumerate(saved):
        name = f"nls_{idx:06d}.mfld1"
        data = np.stack([st.q.real, st.q.imag, st.p.real, st.p.imag, st.v], axis=-1)
        write_mfld1(os.path.join(out, name), grid, data)
        slices.append(name)
    with open(os.path.join(out, "norms.csv"), "w") as fh:
        fh.write("t,max_abs_q,conj_dev\n")
        for st in saved:
            fh.write(f"{st.t!r},{float(np.max(np.abs(st.q)))!r},{st.conj_dev!r}\n")
    _write_json(os.path.join(out, "meta.json"), {
        "kind": "nls",
        "config_hash": cfg.sha,
        "config": cfg.values,
        "dt": dt,
        "times": [st.t for st in saved],
        "slices": slices,
    })
    print(f"saved {len(saved)} slices to {out}")
    return 0


def _load_run(run_dir: str):
    meta_path = os.path.join(run_dir, "meta.json")
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {meta_path}: {exc}") from exc
    return meta


def _load_slice(run_dir: str, meta: dict, idx: int):
    from .fields import read_mfld1
    grid, data = read_mfld1(os.path.join(run_dir, meta["slices"][idx]))
    return grid, data


def cmd_frame(args) -> int:
    import numpy as np
    from .fields import write_mfld1
    from .frames import coeffs_from_frame, frame_dt, frame_from_spin, mlxii_residual

    run_dir = os.path.join(args.output_dir, args.run_dir)
    meta = _load_run(run_dir)
    if meta["kind"] != "spin":
        raise ConfigError("frame extraction needs a spin run directory")
    scheme = meta["config"].get("scheme", "spectral")
    beta = meta["config"].get("params.beta", 1)
    times = meta["times"]
    frames = []
    grid = None
    for idx in range(len(times)):
        grid, data = _load_slice(run_dir, meta, idx)
        frames.append(frame_from_spin(grid, data[..., 0:3], scheme))
        fr = frames[-1]
        write_mfld1(os.path.join(run_dir, f"frame_{idx:06d}.mfld1"), grid,
                    np.concatenate([fr.e1, fr.e2, fr.e3], axis=-1))
    report = {"config_hash": meta["config_hash"], "residuals": []}
    for idx in range(1, len(times) - 1):
        dt2 = times[idx + 1] - times[idx - 1]
        dF = frame_dt(frames[idx - 1], frames[idx + 1], dt2)
        co = coeffs_from_frame(grid, frames[idx], scheme, dF_dt=dF)
        stack = np.stack([co.k, co.sigma, co.tau, co.m1, co.m2, co.m3,
                          co.w1, co.w2, co.w3], axis=-1)
        write_mfld1(os.path.join(run_dir, f"coeffs_{idx:06d}.mfld1"), grid, stack)
        res = mlxii_residual(grid, co, scheme, beta,
                             coeffs_before=coeffs_from_frame(grid, frames[idx - 1], scheme),
                             coeffs_after=coeffs_from_frame(grid, frames[idx + 1], scheme),
                             dt2=dt2, frame=frames[idx])
        report["residuals"].append({"t": times[idx], **res})
    _write_json(os.path.join(run_dir, "frame_report.json"), report)
    print(f"wrote {len(times)} frame dumps and {max(0, len(times) - 2)} coefficient dumps to {run_dir}")
    return 0


def cmd_equiv_check(args) -> int:
    from .equivalence import l_equiv_check
    from .spin import SpinParams

    run_dir = os.path.join(args.output_dir, args.run_dir)
    meta = _load_run(run_dir)
    cfgv = meta["config"]
    par = SpinParams(c=cfgv["params.c"], d=cfgv["params.d"], l=cfgv["params.l"],
                     beta=cfgv["params.beta"],
                     model=cfgv.get("spin.model") or cfgv["model"] or "M3")
    cfg = RunConfig(values=cfgv, sha=meta["config_hash"])
    sizes = tuple(int(s) for s in args.ladder.split(","))
    report = l_equiv_check(par, _make_initial_spin(cfg), sizes=sizes,
                           lx=cfgv["grid.lx"], ly=cfgv["grid.ly"],
                           scheme=cfgv.get("scheme", "spectral"))
    payload = {"config_hash": meta["config_hash"], **report.as_dict()}
    out_path = os.path.join(run_dir, "equiv_report.json")
    _write_json(out_path, payload)
    print(f"order estimate: {report.order:.3f}")
    print(f"ladder: {[(round(h, 4), r) for h, r in report.ladder]}")
    print(f"report written to {out_path}")
    return 0


def _parse_lambda(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise ConfigError(f"--lambda expects `re,im`, got {text!r}") from exc


def cmd_lax_check(args) -> int:
    from .lax import build_lax_spin, trace_deviation, zero_curvature_q

    run_dir = os.path.join(args.output_dir, args.run_dir)
    meta = _load_run(run_dir)
    lams = [_parse_lambda(text) for text in args.lam]
    cfgv = meta["config"]
    times = meta["times"]
    if len(times) < 3:
        raise ConfigError("lax-check needs at least three saved slices")
    mid = len(times) // 2 if len(times) // 2 + 1 < len(times) else len(times) - 2
    payload = {"config_hash": meta["config_hash"], "t": times[mid], "results": []}

    if args.spin_side:
        if meta["kind"] != "spin":
            raise ConfigError("--spin-side needs a spin run")
        from .spin import SpinParams
        par = SpinParams(c=cfgv["params.c"], d=cfgv["params.d"], l=cfgv["params.l"],
                         beta=cfgv["params.beta"],
                         model=cfgv.get("spin.model") or cfgv["model"] or "M3")
        grid, data = _load_slice(run_dir, meta, mid)
        S, u, v = data[..., 0:3], data[..., 3], data[..., 4]
        for lam in lams:
            entry = {"lam": [lam.real, lam.imag]}
            for grouping in ("factored", "split"):
                U, V = build_lax_spin(grid, S, u, v, par, lam,
                                      cfgv.get("scheme", "spectral"), grouping=grouping)
                entry[f"trace_U_{grouping}"] = trace_deviation(U)
                entry[f"trace_V_{grouping}"] = trace_deviation(V)
            payload["results"].append(entry)
    else:
        if meta["kind"] != "nls":
            raise ConfigError("q-side lax-check needs an nls run (or pass --spin-side)")
        from .nls import NlsParams
        par = NlsParams(c=cfgv["params.c"], d=cfgv["params.d"],
                        beta=cfgv["params.beta"],
                        model=cfgv.get("nls.model") or cfgv["model"] or "M3q")
        triple = []
        grid = None
        for idx in (mid - 1, mid, mid + 1):
            grid, data = _load_slice(run_dir, meta, idx)
            q = data[..., 0] + 1j * data[..., 1]
            p = data[..., 2] + 1j * data[..., 3]
            triple.append((q, p, data[..., 4]))
        dt2 = times[mid + 1] - times[mid - 1]
        for lam in lams:
            rep = zero_curvature_q(grid, triple[0], triple[1], triple[2], par, lam,
                                   dt2, cfgv.get("scheme", "spectral"))
            payload["results"].append({"lam": [lam.real, lam.imag],
                                       "residual": rep["residual"],
                                       "trace_U": rep["trace_U"],
                                       "trace_V": rep["trace_V"]})

    out_path = os.path.join(run_dir, "lax_report.json")
    _write_json(out_path, payload)
    if len(lams) > 1 and not args.spin_side:
        scan_path = os.path.join(run_dir, "lax_scan.csv")
        with open(scan_path, "w") as fh:
            fh.write("lam_re,lam_im,residual\n")
            for entry in payload["results"]:
                fh.write(f"{entry['lam'][0]!r},{entry['lam'][1]!r},{entry['residual']!r}\n")
        print(f"lambda scan written to {scan_path}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_charges(args) -> int:
    from .frames import coeffs_from_frame, frame_from_spin
    from .invariants import charges

    run_dir = os.path.join(args.output_dir, args.run_dir)
    meta = _load_run(run_dir)
    if meta["kind"] != "spin":
        raise ConfigError("charges needs a spin run directory")
    scheme = meta["config"].get("scheme", "spectral")
    beta = meta["config"].get("params.beta", 1)
    out_path = os.path.join(run_dir, "charges.csv")
    with open(out_path, "w") as fh:
        fh.write("t,K1,K2,K3,Kc1,Kc2,Kc3,Q1,Q2,Q3\n")
        for idx, t in enumerate(meta["times"]):
            grid, data = _load_slice(run_dir, meta, idx)
            F = frame_from_spin(grid, data[..., 0:3], scheme)
            rep = charges(grid, F, coeffs_from_frame(grid, F, scheme), scheme, beta)
            fh.write(",".join(repr(x) for x in [t] + rep.as_row()) + "\n")
    print(f"charge series written to {out_path}")
    return 0


def cmd_lambda_check(args) -> int:
    import numpy as np
    from .lax import lambda_residual

    ys = np.linspace(0.1, 2.0, args.samples)
    ts = np.linspace(0.0, 0.3, args.samples)
    print("y,t,residual_analytic,residual_fd")
    worst_analytic = worst_fd = 0.0
    for y in ys:
        for t in ts:
            rep = lambda_residual(float(y), float(t), args.n, args.k, args.a, args.c)
            worst_analytic = max(worst_analytic, rep["analytic"])
            worst_fd = max(worst_fd, rep["fd"])
            print(f"{float(y)!r},{float(t)!r},{rep['analytic']!r},{rep['fd']!r}")
    print(f"# max analytic residual: {worst_analytic:.3e}")
    print(f"# max finite-difference residual: {worst_fd:.3e}")
    return 0


def cmd_selftest(args) -> int:
    import numpy as np
    from .fields import Grid2, ddx, inv_dx, meanx
    from .lax import build_lax_q, pauli_identities, trace_deviation
    from .nls import NlsParams, nls_rhs, solve_v_nls
    from .spin import SpinParams, init_modulated_helix, spin_rhs
    from .fields import dot3

    failures = []

    def check(name, ok):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)

    rep = pauli_identities()
    check("pauli product table exact", rep["pass"])

    grid = Grid2(64, 64)
    rng = np.random.default_rng(0)
    modes = np.zeros((grid.ny, grid.nx), dtype=complex)
    modes[1:4, 1:4] = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    f = np.fft.ifft2(modes).real
    f = f / np.max(np.abs(f))
    g_field, _ = inv_dx(grid, f)
    rt = np.max(np.abs(ddx(grid, g_field) - (f - meanx(f))))
    check(f"inv_dx round-trip ({rt:.2e} < 1e-10)", rt < 1e-10)

    from .fields import ddy
    X, Y = grid.meshgrid()
    par = NlsParams(c=0.0, d=1.0, model="Zakharov")
    q = 0.4 * np.exp(1j * X) + 0.1 * np.exp(1j * (Y - 2 * X))
    p = np.conj(q)
    v, _, _ = solve_v_nls(grid, q, p)
    qt_a, _ = nls_rhs(grid, q, p, v, par)
    qt_zak = -1j * (ddy(grid, ddx(grid, q)) + 2.0 * v * q)
    check("M3q rhs at (c,d)=(0,1) equals Zakharov rhs exactly",
          bool(np.array_equal(qt_a, qt_zak)))

    spar3 = SpinParams(c=0.4, d=0.0, l=0.3, model="M3")
    spar2 = SpinParams(c=0.4, d=0.0, l=0.3, model="M2")
    S = init_modulated_helix(grid, kappa=1, eps=0.1)
    r3 = spin_rhs(grid, S, spar3)
    r2 = spin_rhs(grid, S, spar2)
    check("spin M3 rhs at d=0 equals M2 rhs exactly", bool(np.array_equal(r3, r2)))

    tang = float(np.max(np.abs(dot3(S, r3))))
    check(f"spin rhs tangency ({tang:.2e} < 1e-9)", tang < 1e-9)

    U, V = build_lax_q(grid, q, p, v, par, 0.3 + 0.1j)
    tr = max(trace_deviation(U), trace_deviation(V))
    check(f"lax builders traceless ({tr:.2e} < 1e-12)", tr < 1e-12)

    print("selftest:", "all passed" if not failures else f"{len(failures)} failure(s)")
    return 0 if not failures else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="m3lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--output-dir", default=".",
                        help="base directory for runs and reports (default: .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-spin", help="run the spin model from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate_spin)

    p = sub.add_parser("simulate-nls", help="run the NLS-type model from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate_nls)

    p = sub.add_parser("frame", help="emit frames and transport coefficients for a spin run")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("equiv-check", help="grid-ladder equivalence residual report")
    p.add_argument("run_dir")
    p.add_argument("--ladder", default="32,64,128")
    p.set_defaults(func=cmd_equiv_check)

    p = sub.add_parser("lax-check", help="zero-curvature residual at spectral parameters")
    p.add_argument("run_dir")
    p.add_argument("--lambda", dest="lam", required=True, metavar="RE,IM",
                   action="append", help="repeatable; several values produce a scan CSV")
    p.add_argument("--spin-side", action="store_true")
    p.set_defaults(func=cmd_lax_check)

    p = sub.add_parser("charges", help="topological charge time series for a spin run")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_charges)

    p = sub.add_parser("lambda-check", help="spectral-parameter flow residual table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_lambda_check)

    p = sub.add_parser("selftest", help="fast structural checks; exit 0 iff all pass")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    except M3LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
