"""Command-line surface: training, prediction, bound calculators, the
two-stage protocol and the brute-force margin oracle.

Exit codes: 0 on success (training converged), 1 on input or validation
errors, 2 when training hit the epoch cap or a protocol stage failed to
converge.  Models are versioned plain text with round-trip-exact decimal
floats; reports are JSON (schema in docs/report-schema.json).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, engine
from .analysis import BoundInputs, OracleLimitError
from .dataset import (
    DatasetError,
    TrainingSet,
    build_training_set,
    load_svmlight,
    parse_prediction_data,
)
from .engine import HyperParams, MarginSummary, ModelState, Variant
from .trainer import ProtocolError, TrainReport, successive_runnings, train

__all__ = ["main", "save_model", "load_model", "LoadedModel"]

MODEL_MAGIC = "margitron-model"
MODEL_VERSION = 1


# --------------------------------------------------------------------------
# model persistence
# --------------------------------------------------------------------------

@dataclass
class LoadedModel:
    variant: Variant
    epsilon: float
    b: float
    rho: float
    delta: float
    base_dim: int
    t_c: int
    a_aug: float
    w: np.ndarray
    counts: np.ndarray | None = None


def _fmt(x: float) -> str:
    return repr(float(x))


def save_model(
    path,
    *,
    variant: Variant,
    epsilon: float,
    b: float,
    rho: float,
    delta: float,
    state: ModelState,
    save_counts: bool = False,
) -> Path:
    """Write the trained model as versioned plain text.

    Floats are written with shortest round-trip precision so a loaded model
    predicts bit-for-bit like the in-memory state.  Weights are stored
    sparsely (nonzero entries only); per-pattern update counts are included
    only on request, for audit or replay.
    """
    path = Path(path)
    nz = np.flatnonzero(state.w)
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"variant {Variant(variant).value}",
        f"epsilon {_fmt(epsilon)}",
        f"b {_fmt(b)}",
        f"rho {_fmt(rho)}",
        f"delta {_fmt(delta)}",
        f"base_dim {len(state.w)}",
        f"t_c {state.t}",
        f"a_aug {_fmt(state.a_aug)}",
        f"weights {len(nz)}",
    ]
    lines.extend(f"{int(i)} {_fmt(state.w[i])}" for i in nz)
    if save_counts:
        nzc = np.flatnonzero(state.counts)
        lines.append(f"counts {len(state.counts)} {len(nzc)}")
        lines.extend(f"{int(k)} {int(state.counts[k])}" for k in nzc)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def load_model(path) -> LoadedModel:
    """Read a model file written by :func:`save_model`."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        magic, version = lines[0].split()
        if magic != MODEL_MAGIC:
            raise ValueError(f"not a model file (header {lines[0]!r})")
        if int(version) != MODEL_VERSION:
            raise ValueError(f"unsupported model version {version}")
        fields: dict[str, str] = {}
        pos = 1
        for _ in range(9):  # variant .. weights
            key, value = lines[pos].split(maxsplit=1)
            fields[key] = value
            pos += 1
        base_dim = int(fields["base_dim"])
        w = np.zeros(base_dim, dtype=np.float64)
        n_weights = int(fields["weights"])
        for _ in range(n_weights):
            si, sv = lines[pos].split()
            w[int(si)] = float(sv)
            pos += 1
        counts = None
        if pos < len(lines) and lines[pos].startswith("counts "):
            _, n_str, nnz_str = lines[pos].split()
            pos += 1
            counts = np.zeros(int(n_str), dtype=np.int64)
            for _ in range(int(nnz_str)):
                sk, sc = lines[pos].split()
                counts[int(sk)] = int(sc)
                pos += 1
        return LoadedModel(
            variant=Variant(fields["variant"]),
            epsilon=float(fields["epsilon"]),
            b=float(fields["b"]),
            rho=float(fields["rho"]),
            delta=float(fields["delta"]),
            base_dim=base_dim,
            t_c=int(fields["t_c"]),
            a_aug=float(fields["a_aug"]),
            w=w,
            counts=counts,
        )
    except (IndexError, KeyError, ValueError) as exc:
        raise ValueError(f"malformed model file {path}: {exc}") from exc


# --------------------------------------------------------------------------
# report helpers
# --------------------------------------------------------------------------

def _num(x):
    """JSON-safe number: non-finite values become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _margins_dict(m: MarginSummary) -> dict:
    return {
        "min_functional": _num(m.min_functional),
        "directional": _num(m.directional_margin),
        "geometric": _num(m.geometric_margin),
    }


def _train_report_dict(rep: TrainReport) -> dict:
    return {
        "converged": rep.converged,
        "t_c": rep.t_c,
        "full_epochs": rep.full_epochs,
        "mini_epochs": rep.mini_epochs,
        "wall_time": _num(rep.wall_time),
        "margins": _margins_dict(rep.margins),
        "f_est": _num(rep.f_est),
        "gamma_up": _num(rep.gamma_up),
    }


def _write_json(payload: dict, path: str | None) -> None:
    # allow_nan=False guards the report contract: every number is finite
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _before_running_fields(variant: Variant, epsilon: float, b: float, radius: float) -> dict:
    inputs = BoundInputs(epsilon=epsilon, b=b, radius=radius)
    lower = None
    if epsilon <= 1.0:
        lower = (
            analysis.fraction_lower_t(inputs)
            if variant is Variant.T
            else analysis.fraction_lower_l(inputs)
        )
    return {
        "fraction_lower": _num(lower),
        "fraction_asymptote": _num(analysis.fraction_asymptote(variant is Variant.T, epsilon)),
    }


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _load_set(args) -> TrainingSet:
    patterns = load_svmlight(args.data, zero_based=args.zero_based)
    return build_training_set(patterns, args.rho, args.delta_ext)


def _cmd_train(args) -> int:
    tset = _load_set(args)
    b = args.b if args.b is not None else args.b_over_r * tset.radius ** (1.0 + args.epsilon)
    params = HyperParams(
        variant=Variant(args.variant),
        epsilon=args.epsilon,
        b=b,
        n_ep=args.miniepochs,
        max_full_epochs=args.max_epochs,
    )
    state, rep = train(tset, params, shuffle_seed=args.shuffle)
    payload = {
        "command": "train",
        "variant": params.variant.value,
        "epsilon": params.epsilon,
        "b": params.b,
        "rho": tset.rho,
        "delta": tset.delta,
        "n": tset.n,
        "base_dim": tset.base_dim,
        "radius": tset.radius,
        **_train_report_dict(rep),
        **_before_running_fields(params.variant, params.epsilon, params.b, tset.radius),
    }
    if args.model:
        save_model(
            args.model,
            variant=params.variant,
            epsilon=params.epsilon,
            b=params.b,
            rho=tset.rho,
            delta=tset.delta,
            state=state,
            save_counts=args.save_counts,
        )
    if args.report:
        _write_json(payload, args.report)
    if args.plot:
        _render_train_plots(rep, params, args.plot)
    status = "converged" if rep.converged else "hit the epoch cap"
    print(
        f"{status}: t_c={rep.t_c} full_epochs={rep.full_epochs} "
        f"directional_margin={rep.margins.directional_margin:.6g}"
        + (f" f_est={rep.f_est:.4f}" if rep.f_est is not None else "")
    )
    return 0 if rep.converged else 2


def _render_train_plots(rep: TrainReport, params: HyperParams, outdir: str) -> None:
    from . import plots  # deferred: pulls in matplotlib

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    plots.write_trace_csv(rep.trace, out / "trace.csv")
    title = f"variant={params.variant.value} epsilon={params.epsilon:g} b={params.b:g}"
    plots.save_convergence_figure(rep.trace, title, out / "convergence.png")


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    raw = Path(args.data).read_bytes()
    rows = parse_prediction_data(raw, zero_based=args.zero_based)
    out_fh = open(args.out, "w") if args.out else sys.stdout
    ignored = 0
    hits = 0
    labelled = 0
    try:
        for label, idx, vals in rows:
            keep = idx < model.base_dim
            if not np.all(keep):
                ignored += int(np.sum(~keep))
                idx, vals = idx[keep], vals[keep]
            pred = engine.predict(model.w, model.a_aug, model.rho, idx, vals)
            out_fh.write("+1\n" if pred > 0 else "-1\n")
            if label is not None:
                labelled += 1
                hits += int(pred == label)
    finally:
        if args.out:
            out_fh.close()
    if ignored:
        print(f"warning: ignored {ignored} feature(s) outside the model dimension", file=sys.stderr)
    if labelled:
        print(f"accuracy {hits / labelled:.6f} ({hits}/{labelled})", file=sys.stderr)
    return 0


def _cmd_estimate(args) -> int:
    inputs = BoundInputs(
        epsilon=args.epsilon,
        b=args.b,
        radius=args.radius,
        gamma_d=args.gamma_d,
        t_c=args.t_c,
        gamma_prime_d=args.gamma_prime_d,
    )
    estimates: dict[str, object] = {}
    unavailable: dict[str, str] = {}

    def attempt(name: str, fn):
        try:
            estimates[name] = fn()
        except ValueError as exc:
            unavailable[name] = str(exc)

    attempt("fraction_lower_t", lambda: analysis.fraction_lower_t(inputs))
    attempt("fraction_est_t", lambda: analysis.fraction_est_t(inputs))
    attempt("update_bound_t", lambda: analysis.update_bound_t(inputs))
    attempt("gamma_upper_t", lambda: analysis.gamma_upper_t(inputs))
    attempt("fraction_lower_l", lambda: analysis.fraction_lower_l(inputs))
    attempt("update_bound_l", lambda: analysis.update_bound_l(inputs))
    estimates["fraction_asymptote_t"] = analysis.fraction_asymptote(True, args.epsilon)
    estimates["fraction_asymptote_l"] = analysis.fraction_asymptote(False, args.epsilon)

    def strong():
        res = analysis.fraction_lower_t_strong(inputs)
        return {"value": res.value, "root": res.root, "t_star": _num(res.t_star)}

    attempt("fraction_lower_t_strong", strong)

    def est_l():
        choice = analysis.choose_estimate_n(inputs)
        return {
            "value": analysis.fraction_est_l(inputs, choice),
            "n": choice.chosen,
            "n_opt": choice.n_opt,
            "constraint": choice.constraint_satisfied,
        }

    attempt("fraction_est_l", est_l)

    payload = {
        "command": "estimate",
        "inputs": {
            "epsilon": args.epsilon,
            "b": args.b,
            "radius": args.radius,
            "gamma_d": _num(args.gamma_d),
            "t_c": args.t_c,
            "gamma_prime_d": _num(args.gamma_prime_d),
        },
        "estimates": estimates,
        "unavailable": unavailable,
    }

    if args.select_b:
        if args.delta is None:
            raise ValueError("missing symbol: delta (required by --select-b)")
        if args.gamma_d is None:
            raise ValueError("missing symbol: gamma_d (required by --select-b)")
        selector = {
            "t": analysis.select_b_t,
            "l": analysis.select_b_l,
            "small-eps": analysis.select_b_small_eps,
        }[args.select_b]
        sel = selector(args.epsilon, args.delta, args.gamma_d, args.radius)
        payload["b_selection"] = {
            "rule": args.select_b,
            "delta": sel.delta,
            "b": sel.b,
            "guaranteed_fraction": sel.guaranteed_fraction,
            "omega": _num(sel.omega),
            "delta_constraint_ok": sel.delta_constraint_ok,
        }

    _write_json(payload, args.report)
    return 0


def _cmd_protocol(args) -> int:
    tset = _load_set(args)
    try:
        state, rep = successive_runnings(
            tset,
            args.epsilon2,
            args.miniepochs,
            variant=Variant(args.variant),
            max_full_epochs=args.max_epochs,
            shuffle_seed=args.shuffle,
        )
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "command": "protocol",
        "variant": args.variant,
        "rho": tset.rho,
        "delta": tset.delta,
        "n": tset.n,
        "base_dim": tset.base_dim,
        "radius": tset.radius,
        "gamma_up_raw": _num(rep.gamma_up_raw),
        "gamma_up": _num(rep.gamma_up),
        "b2": rep.b2,
        "margins": _margins_dict(rep.margins),
        "stage1": {"epsilon": rep.stage1.epsilon, "b": rep.stage1.b, **_train_report_dict(rep.stage1.train)},
        "stage2": {"epsilon": rep.stage2.epsilon, "b": rep.stage2.b, **_train_report_dict(rep.stage2.train)},
    }
    if args.model:
        save_model(
            args.model,
            variant=Variant(args.variant),
            epsilon=args.epsilon2,
            b=rep.b2,
            rho=tset.rho,
            delta=tset.delta,
            state=state,
            save_counts=args.save_counts,
        )
    if args.report:
        _write_json(payload, args.report)
    if args.plot:
        from . import plots

        out = Path(args.plot)
        out.mkdir(parents=True, exist_ok=True)
        plots.write_trace_csv(rep.stage1.train.trace, out / "stage1_trace.csv")
        plots.write_trace_csv(rep.stage2.train.trace, out / "stage2_trace.csv")
        plots.save_protocol_figure(rep, out / "protocol.png")
    s2 = rep.stage2.train
    print(
        f"stage1: t_c={rep.stage1.train.t_c} gamma_up={rep.gamma_up:.6g}  "
        f"stage2: b={rep.b2:.6g} t_c={s2.t_c} "
        f"directional_margin={s2.margins.directional_margin:.6g}"
        + (f" f_est={s2.f_est:.4f}" if s2.f_est is not None else "")
    )
    return 0 if s2.converged else 2


def _cmd_oracle(args) -> int:
    tset = _load_set(args)
    value = analysis.max_directional_margin(tset)
    print("non-separable" if value is None else repr(value))
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="svmlight-format input file")
    p.add_argument("--rho", type=float, default=1.0, help="augmentation coordinate (default 1)")
    p.add_argument(
        "--delta-ext",
        type=float,
        default=1.0,
        help="soft-margin extension coordinate; 0 disables the extension (default 1)",
    )
    p.add_argument(
        "--zero-based",
        action="store_true",
        help="feature indices in the input already count from zero",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margitron",
        description="Perceptron-family large-margin training, bounds and estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one run and report margins and estimates")
    _add_data_args(p)
    p.add_argument("--variant", choices=["t", "l"], required=True, help="threshold schedule")
    p.add_argument("--epsilon", type=float, required=True, help="threshold decay exponent in (0, 2)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--b", type=float, help="margin parameter")
    group.add_argument(
        "--b-over-r",
        type=float,
        dest="b_over_r",
        help="set b = X * R**(1+epsilon) once the radius R is known",
    )
    p.add_argument("--miniepochs", type=int, default=50, help="mini-epochs per active set (default 50)")
    p.add_argument("--max-epochs", type=int, default=100_000, help="full-epoch safety cap")
    p.add_argument("--model", help="write the trained model here")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--save-counts", action="store_true", help="include per-pattern update counts in the model")
    p.add_argument("--shuffle", type=int, default=None, metavar="SEED", help="shuffle each full epoch with this seed")
    p.add_argument("--plot", metavar="DIR", help="render trace CSV and convergence figure into DIR")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("predict", help="predict labels with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="svmlight lines; label may be '?'")
    p.add_argument("--out", help="write predictions here instead of stdout")
    p.add_argument("--zero-based", action="store_true")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("estimate", help="evaluate every computable bound and estimate")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--gamma-d", type=float, dest="gamma_d", help="maximum directional margin, if known")
    p.add_argument("--t-c", type=int, dest="t_c", help="observed update count")
    p.add_argument("--gamma-prime-d", type=float, dest="gamma_prime_d", help="achieved directional margin")
    p.add_argument("--select-b", choices=["t", "l", "small-eps"], dest="select_b")
    p.add_argument("--delta", type=float, help="accuracy parameter for --select-b")
    p.add_argument("--report", help="write JSON here instead of stdout")
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("protocol", help="two-stage successive-runnings training")
    _add_data_args(p)
    p.add_argument("--epsilon2", type=float, required=True, help="stage-2 exponent in (0, 1)")
    p.add_argument("--miniepochs", type=int, default=50)
    p.add_argument("--variant", choices=["t", "l"], default="l")
    p.add_argument("--max-epochs", type=int, default=100_000)
    p.add_argument("--model", help="write the stage-2 model here")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--save-counts", action="store_true")
    p.add_argument("--shuffle", type=int, default=None, metavar="SEED")
    p.add_argument("--plot", metavar="DIR")
    p.set_defaults(fn=_cmd_protocol)

    p = sub.add_parser("oracle", help="brute-force maximum directional margin of a small dataset")
    _add_data_args(p)
    p.set_defaults(fn=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DatasetError, OracleLimitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
