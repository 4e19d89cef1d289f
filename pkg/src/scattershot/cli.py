"""Command-line surface tying the modules together.

Artifacts are CSV for curves and tables, JSON for matrices and
distributions, each carrying a metadata header (version, command, seed and
the scientific config). Execution-only knobs such as --threads and output
paths stay out of the metadata so reruns produce byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import distribution as dstr
from . import sources as src
from . import states as st
from . import supremacy as sup
from . import validation as val
from .errors import InvalidConfigurationError, ScattershotError
from .linalg import haar_random_unitary, matrix_from_json
from .permanent import permanent_glynn, permanent_glynn_parallel, permanent_naive


class UsageError(Exception):
    pass


def _default_threads() -> int:
    import os

    env = os.environ.get("SCATTERSHOT_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _meta_lines(command: str, config: dict) -> list[str]:
    cfg = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return [
        f"# scattershot {__version__}",
        f"# command: {command}",
        f"# config: {cfg}",
    ]


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------- configs


def load_platform_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict) or "platform" not in doc:
        raise UsageError("config must be a JSON object with a 'platform' key")
    if doc["platform"] not in ("spdc", "qd", "mw"):
        raise UsageError(f"unknown platform {doc['platform']!r}")
    return doc


def eta_schedule_from_config(doc: dict):
    sched = doc.get("eta_D_schedule")
    if sched is None:
        if "eta_D" in doc:
            return sup.constant_eta_schedule(float(doc["eta_D"]))
        return sup.linear_eta_schedule()
    kind = sched.get("kind")
    if kind == "linear":
        return sup.linear_eta_schedule(
            a=float(sched.get("a", 0.6)),
            b=float(sched.get("b", 0.25)),
            m0=int(sched.get("m0", 10)),
            span=int(sched.get("span", 90)),
        )
    if kind == "constant":
        return sup.constant_eta_schedule(float(sched["value"]))
    raise UsageError(f"unknown eta_D schedule kind {kind!r}")


def params_from_config(doc: dict, m: int | None = None):
    """Build the platform parameter bundle; m resolves an eta_D schedule."""
    platform = doc["platform"]
    try:
        if platform == "spdc":
            eta_d = doc.get("eta_D")
            if eta_d is None:
                if m is None:
                    raise UsageError("spdc config with a schedule needs m to resolve eta_D")
                eta_d = eta_schedule_from_config(doc)(m)
            return src.SpdcParams(
                g=float(doc["g"]),
                eta_t=float(doc["eta_T"]),
                p_in=float(doc["p_in"]),
                eta_d=float(eta_d),
                pump_rate=float(doc.get("pump_rate", 8.0e7)),
            )
        if platform == "qd":
            eta_d = doc.get("eta_D")
            if eta_d is None:
                if m is None:
                    raise UsageError("qd config with a schedule needs m to resolve eta_D")
                eta_d = eta_schedule_from_config(doc)(m)
            return src.QdParams(
                eta=float(doc["eta"]),
                eta_dm=float(doc.get("eta_dm", 1.0)),
                p_in=float(doc["p_in"]),
                eta_d=float(eta_d),
            )
        return src.MwParams(
            p_in=float(doc["p_in"]),
            eta_d=float(doc["eta_D"]),
            p_dark=float(doc.get("p_dark", 0.0)),
            t_step=float(doc.get("t_step", 0.3e-6)),
        )
    except KeyError as exc:
        raise UsageError(f"config missing key {exc}") from exc


# ------------------------------------------------------- distribution io


def distribution_to_json(dist: dstr.OutputDistribution, command: str, config: dict) -> str:
    doc = {
        "meta": {"version": __version__, "command": command, "config": config},
        "m": dist.m,
        "n": dist.n_detected,
        "family": dist.family,
        "renormalized": dist.renormalized,
        "raw_mass": dist.raw_mass,
        "states": [st.state_to_string(row) for row in dist.states],
        "probs": [float(p) for p in dist.probs],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def distribution_to_csv(dist: dstr.OutputDistribution, command: str, config: dict) -> str:
    lines = _meta_lines(command, config)
    lines.append(
        f"# m={dist.m} n={dist.n_detected} family={dist.family} "
        f"renormalized={dist.renormalized} raw_mass={_fmt(dist.raw_mass)}"
    )
    lines.append("state,probability")
    for row, p in zip(dist.states, dist.probs):
        lines.append(f"{st.state_to_string(row)},{_fmt(p)}")
    return "\n".join(lines) + "\n"


def distribution_from_file(path: str) -> dstr.OutputDistribution:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        states = np.array([st.state_from_string(s) for s in doc["states"]], dtype=np.uint8)
        return dstr.OutputDistribution(
            m=int(doc["m"]),
            n_detected=int(doc["n"]),
            family=doc["family"],
            states=states,
            probs=np.array(doc["probs"], dtype=np.float64),
            raw_mass=float(doc["raw_mass"]),
            renormalized=bool(doc["renormalized"]),
        )
    header = {}
    states = []
    probs = []
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    header[k] = v
            continue
        if not line or line.startswith("state,"):
            continue
        state_s, prob_s = line.rsplit(",", 1)
        states.append(st.state_from_string(state_s))
        probs.append(float(prob_s))
    required = {"m", "n", "family", "renormalized", "raw_mass"}
    if not required <= header.keys():
        raise UsageError(f"distribution CSV header missing {required - header.keys()}")
    return dstr.OutputDistribution(
        m=int(header["m"]),
        n_detected=int(header["n"]),
        family=header["family"],
        states=np.array(states, dtype=np.uint8),
        probs=np.array(probs, dtype=np.float64),
        raw_mass=float(header["raw_mass"]),
        renormalized=header["renormalized"] == "True",
    )


# ----------------------------------------------------------- subcommands


def _resolve_unitary(args) -> tuple[np.ndarray, dict]:
    if args.unitary is not None:
        u = matrix_from_json(Path(args.unitary).read_text())
        return u, {"unitary": "file"}
    if args.m is None:
        raise UsageError("need --unitary FILE or --m with --seed")
    u = haar_random_unitary(args.m, np.random.SeedSequence(args.seed).spawn(2)[0])
    return u, {"m": args.m, "haar_seed": args.seed}


def cmd_permanent(args) -> int:
    a = matrix_from_json(Path(args.matrix).read_text())
    if args.method == "naive":
        value = permanent_naive(a)
    elif args.partitions > 1:
        value = permanent_glynn_parallel(a, args.partitions)
    else:
        value = permanent_glynn(a)
    print(f"{value.real:.15g} {value.imag:.15g}")
    return 0


def _build_distribution(args, u):
    input_state = st.state_from_string(args.input)
    if input_state.size != u.shape[0]:
        raise InvalidConfigurationError(
            f"input state length {input_state.size} != unitary dimension {u.shape[0]}"
        )
    if args.loss_in or args.loss_out:
        return dstr.lossy_distribution(
            u, input_state, dstr.LossConfig(args.loss_in, args.loss_out), model=args.model
        )
    return dstr.full_distribution(
        u, input_state, family=args.family, model=args.model, renormalize=args.renormalize
    )


def cmd_distribution(args) -> int:
    u, ucfg = _resolve_unitary(args)
    dist = _build_distribution(args, u)
    config = {
        **ucfg,
        "input": args.input,
        "family": dist.family,
        "model": args.model,
        "loss_in": args.loss_in,
        "loss_out": args.loss_out,
        "renormalized": dist.renormalized,
    }
    if args.format == "json":
        _write_text(args.out, distribution_to_json(dist, "distribution", config))
    else:
        _write_text(args.out, distribution_to_csv(dist, "distribution", config))
    return 0


def cmd_sample(args) -> int:
    u, ucfg = _resolve_unitary(args)
    dist = _build_distribution(args, u)
    if not dist.renormalized:
        raise InvalidConfigurationError("sampling needs --renormalize or a lossy distribution")
    sample_ss = np.random.SeedSequence(args.seed).spawn(2)[1]
    rng = np.random.Generator(np.random.PCG64(sample_ss))
    events = dstr.sample_events(dist, rng, args.count)
    config = {**ucfg, "input": args.input, "model": args.model, "count": args.count,
              "seed": args.seed, "loss_in": args.loss_in, "loss_out": args.loss_out}
    lines = _meta_lines("sample", config)
    lines.append("event")
    lines.extend(st.state_to_string(row) for row in events)
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_tvd(args) -> int:
    p = distribution_from_file(args.p)
    q = distribution_from_file(args.q)
    print(_fmt(dstr.total_variation_distance(p, q)))
    return 0


def cmd_validate(args) -> int:
    loss = dstr.LossConfig(args.loss_in, args.loss_out)
    result = val.min_samples_to_validate(
        m=args.m,
        n=args.n,
        loss=loss,
        ensemble=args.ensemble,
        trials=args.trials,
        confidence=args.confidence,
        seed=args.seed,
        max_samples=args.max_samples,
    )
    config = {
        "m": args.m, "n": args.n, "loss_in": args.loss_in, "loss_out": args.loss_out,
        "ensemble": args.ensemble, "trials": args.trials,
        "confidence": args.confidence, "seed": args.seed,
    }
    lines = _meta_lines("validate", config)
    lines.append("m,n,n_detected,loss_in,loss_out,min_samples_mean,min_samples_std,"
                 "unitaries,trials,confidence")
    lines.append(
        f"{result.m},{result.n},{result.n_detected},{loss.n_lost_in},{loss.n_lost_out},"
        f"{_fmt(result.min_samples_mean)},{_fmt(result.min_samples_std)},"
        f"{result.unitaries_used},{result.trials_per_unitary},{_fmt(result.confidence)}"
    )
    _write_text(args.out, "\n".join(lines) + "\n")
    if args.detail:
        dl = _meta_lines("validate", config)
        dl.append("unitary_index,min_samples")
        dl.extend(f"{i},{v}" for i, v in enumerate(result.per_unitary))
        Path(args.detail).write_text("\n".join(dl) + "\n")
    return 0


def cmd_sources(args) -> int:
    doc = load_platform_config(args.config)
    params = params_from_config(doc, m=args.m)
    lines = []
    if doc["platform"] == "spdc":
        mc = src.monte_carlo_spdc(
            args.m, args.n, max(args.n_lost, 1), params, args.trials, args.seed,
            workers=args.threads,
        )
        rows = [
            ("success", src.p_sbs(args.m, args.n, params), mc.success),
            ("fake", src.p_sbs_fake(args.m, args.n, params), mc.fake),
        ]
        for k, est in mc.lossy.items():
            rows.append((f"lossy{k}", src.p_sbs_lossy(args.m, args.n, k, params), est))
        lines.append("class,analytic,mc_estimate,mc_stderr,sigmas")
        for name, analytic, est in rows:
            lines.append(
                f"{name},{_fmt(analytic)},{_fmt(est.probability)},{_fmt(est.stderr)},"
                f"{_fmt(est.sigmas_from(analytic))}"
            )
    elif doc["platform"] == "mw":
        mc = src.monte_carlo_mw(args.m, args.n, params, args.trials, args.seed)
        lines.append("class,analytic,mc_estimate,mc_stderr,sigmas")
        for k in range(0, args.n_lost + 1):
            analytic = src.p_mw_lossy_dark(args.m, args.n, k, params)
            est = mc[k]
            lines.append(
                f"lossy{k},{_fmt(analytic)},{_fmt(est.probability)},{_fmt(est.stderr)},"
                f"{_fmt(est.sigmas_from(analytic))}"
            )
    else:
        lines.append("class,analytic")
        for demux in ("passive", "active"):
            lines.append(f"{demux},{_fmt(src.p_qd(args.n, args.n, params, demux))}")
    config = {"platform": doc["platform"], "m": args.m, "n": args.n,
              "n_lost": args.n_lost, "trials": args.trials, "seed": args.seed}
    _write_text(args.out, "\n".join(_meta_lines("sources", config) + lines) + "\n")
    return 0


def cmd_supremacy(args) -> int:
    doc = load_platform_config(args.config)
    platform = doc["platform"]
    m_range = range(args.m_min, args.m_max + 1, args.step)
    if platform == "spdc":
        params = params_from_config(doc, m=args.m_min)
        points = sup.supremacy_sweep_spdc(
            m_range, params, a_prime=args.a_prime,
            eta_schedule=eta_schedule_from_config(doc),
            include_lossy_up_to=args.include_lossy,
        )
    elif platform == "qd":
        params = params_from_config(doc, m=args.m_min)
        points = sup.supremacy_sweep_qd(
            m_range, params, demux=args.demux,
            rep_rate=float(doc.get("rep_rate", 8.0e7)), a_prime=args.a_prime,
            eta_schedule=eta_schedule_from_config(doc),
        )
    else:
        params = params_from_config(doc)
        points = sup.supremacy_sweep_mw(
            m_range, params, a_prime=args.a_prime, include_dark=not args.no_dark
        )
    config = {"platform": platform, "m_min": args.m_min, "m_max": args.m_max,
              "step": args.step, "a_prime": args.a_prime,
              "include_lossy": args.include_lossy}
    lines = _meta_lines("supremacy", config)
    lines.append("m,n_policy,event_class,t_c,t_q,ratio")
    for p in points:
        lines.append(
            f"{p.m},{p.n_policy},{p.event_class},{_fmt(p.t_c)},{_fmt(p.t_q)},{_fmt(p.ratio)}"
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scattershot",
        description="Lossy scattershot boson sampling simulator and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=f"scattershot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_threads(q):
        q.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker count for parallel chunks (default: "
                            "SCATTERSHOT_THREADS or all cores); never changes results")

    p = sub.add_parser("permanent", help="permanent of a JSON matrix")
    add_threads(p)
    p.add_argument("--matrix", required=True, help="matrix JSON file {m, re, im}")
    p.add_argument("--method", choices=("glynn", "naive"), default="glynn")
    p.add_argument("--partitions", type=int, default=1)
    p.set_defaults(func=cmd_permanent)

    def add_dist_args(q):
        q.add_argument("--unitary", help="unitary JSON file; otherwise Haar from --m/--seed")
        q.add_argument("--m", type=int, help="modes for a Haar-random unitary")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--input", required=True, help="input state, e.g. 1:1:1:0")
        q.add_argument("--family", choices=(st.COLLISION_FREE, st.FULL_FOCK),
                       default=st.COLLISION_FREE)
        q.add_argument("--model", choices=(dstr.INDISTINGUISHABLE, dstr.DISTINGUISHABLE),
                       default=dstr.INDISTINGUISHABLE)
        q.add_argument("--loss-in", type=int, default=0)
        q.add_argument("--loss-out", type=int, default=0)
        q.add_argument("--renormalize", action="store_true")
        q.add_argument("--out", help="output path (stdout if omitted)")

    p = sub.add_parser("distribution", help="exact output distribution")
    add_threads(p)
    add_dist_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("sample", help="draw events from a distribution")
    add_threads(p)
    add_dist_args(p)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("tvd", help="total variation distance of two saved distributions")
    add_threads(p)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.set_defaults(func=cmd_tvd)

    p = sub.add_parser("validate", help="minimum samples to certify against distinguishable")
    add_threads(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True,
                   help="photons propagated through the interferometer")
    p.add_argument("--loss-in", type=int, default=0)
    p.add_argument("--loss-out", type=int, default=0)
    p.add_argument("--ensemble", type=int, default=50)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-samples", type=int, default=2000)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--detail", help="optional per-unitary CSV path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sources", help="analytic source probabilities vs Monte-Carlo")
    add_threads(p)
    p.add_argument("--config", required=True, help="platform config JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-lost", type=int, default=1)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_sources)

    p = sub.add_parser("supremacy", help="classical vs quantum time sweep")
    add_threads(p)
    p.add_argument("--platform", choices=("spdc", "qd", "mw"),
                   help="must match the config's platform if given")
    p.add_argument("--config", required=True)
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--a-prime", type=float, default=sup.A_PRIME_TIANHE2)
    p.add_argument("--include-lossy", type=int, default=1)
    p.add_argument("--demux", choices=("passive", "active"), default="active")
    p.add_argument("--no-dark", action="store_true")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_supremacy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "platform", None) and args.command == "supremacy":
        doc = load_platform_config(args.config)
        if doc["platform"] != args.platform:
            print(f"usage-error: config platform {doc['platform']!r} != --platform "
                  f"{args.platform!r}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage-error: {exc}", file=sys.stderr)
        return 2
    except ScattershotError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
