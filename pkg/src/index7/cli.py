"""Command-line front end.

Every command writes its primary output (to --out or stdout) and, when --out is given, a
run manifest next to it.  Failures print a JSON error object on stderr and exit nonzero.
"""
from __future__ import annotations

import hashlib
import json
import os
import shlex
import sys
import time

import click

from . import __version__

SCHEMA_VERSION = 1


class CommandFailed(Exception):
    """A command ran but its result is a failure (e.g. a certificate that does not hold)."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _emit(ctx: click.Context, payload: dict, out: str | None, params: dict,
          text: str | None = None, manifest: str | None = None) -> None:
    """Write the primary output and its manifest."""
    data = text if text is not None else _dumps({"schemaVersion": SCHEMA_VERSION, **payload})
    if out:
        with open(out, "w") as fh:
            fh.write(data)
    else:
        click.echo(data, nl=False)
    manifest = manifest or (out + ".manifest.json" if out else None)
    if manifest:
        root = ctx.find_root()
        started = root.meta.get("index7.started", time.time())
        record = {
            "schemaVersion": SCHEMA_VERSION,
            "argv": root.meta.get("index7.argv", []),
            "commandLine": shlex.join(root.meta.get("index7.argv", [])),
            "command": ctx.command_path,
            "parameters": params,
            "version": __version__,
            "wallTime": round(time.time() - started, 3),
            "output": out,
            "outputDigest": "sha256:" + hashlib.sha256(data.encode()).hexdigest(),
        }
        with open(manifest, "w") as fh:
            fh.write(_dumps(record))


def _workers_default() -> int:
    return os.cpu_count() or 1


def _check_canonical(group: str) -> str:
    from .permgroup import CANONICAL_IDS

    if group not in CANONICAL_IDS:
        raise click.BadParameter(f"{group!r} is not one of {', '.join(CANONICAL_IDS)}",
                                 param_hint="--group")
    return group


def _check_any(group: str) -> str:
    from .permgroup import ALL_IDS

    if group not in ALL_IDS:
        raise click.BadParameter(f"{group!r} is not a known group id", param_hint="--group")
    return group


def _precision(ctx, param, value):
    if value is not None and value < 15:
        raise click.BadParameter("precision must be at least 15 digits")
    return value


# ---------------------------------------------------------------- hauptmodul

@click.group("hauptmodul")
def hauptmodul_group():
    """Hauptmodul expansions and unbounded-denominator certificates."""


@hauptmodul_group.command("solve")
@click.option("--group", "group", required=True)
@click.option("--order", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def hauptmodul_solve(ctx, group, order, out, manifest):
    """Solve for zhat to the given order, verify it and write the normalized table."""
    from .hauptmodul import export_normalized_table, verify_constants, verify_j_equations_series

    _check_canonical(group)
    consts = verify_constants(group)
    if not consts["passed"]:
        raise CommandFailed("constant verification failed", consts)
    table = export_normalized_table(group, order)
    check = verify_j_equations_series(group, order)
    if not check["passed"]:
        raise CommandFailed("series does not satisfy the j-equations", check)
    payload = {**table, "order": order, "verification": check}
    _emit(ctx, payload, out, {"group": group, "order": order}, manifest=manifest)


@hauptmodul_group.command("export")
@click.option("--group", "group", required=True)
@click.option("--order", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def hauptmodul_export(ctx, group, order, out, manifest):
    """Write the rows (n, ahat_n) only."""
    from .hauptmodul import export_normalized_table

    _check_canonical(group)
    payload = {**export_normalized_table(group, order), "order": order}
    _emit(ctx, payload, out, {"group": group, "order": order}, manifest=manifest)


@hauptmodul_group.command("certify-ubd")
@click.option("--group", "group", required=True)
@click.option("--order", type=click.IntRange(min=60), default=500, show_default=True)
@click.option("--residue", type=click.Choice(["auto", "2", "4"]), default="auto", show_default=True)
@click.option("--tail", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def hauptmodul_certify(ctx, group, order, residue, tail, out, manifest):
    """Reduce zhat modulo a prime over 7 and certify unbounded denominators."""
    from .exactfield import QZ3
    from .hauptmodul import load_constants, ubd_certificate

    _check_canonical(group)
    if residue != "auto" and load_constants(group)[1].field != QZ3:
        raise click.BadParameter("a residue choice only applies to U and V groups",
                                 param_hint="--residue")
    rep = ubd_certificate(group, order, residue if residue == "auto" else int(residue), tail)
    rep = {k: v for k, v in rep.items() if k != "nonzeroIndices"} | {
        "nonzeroIndices": rep["nonzeroIndices"]}
    params = {"group": group, "order": order, "residue": residue, "tail": tail}
    _emit(ctx, {"certificate": rep}, out, params, manifest=manifest)
    if not rep["passed"]:
        raise CommandFailed("certificate failed", {"failures": rep["failures"]})


# ---------------------------------------------------------------- eis

@click.group("eis")
def eis_group():
    """Eisenstein-series sums, exact weight 2 and statistics."""


@eis_group.command("sum")
@click.option("--group", "group", default="G1", show_default=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--k", "k", type=click.IntRange(min=4), default=4, show_default=True)
@click.option("--N", "N", type=click.IntRange(min=0), default=100000, show_default=True)
@click.option("--precision", type=int, default=30, show_default=True, callback=_precision)
@click.option("--chunk", type=click.IntRange(min=1), default=4096, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def eis_sum(ctx, group, n, k, N, precision, chunk, workers, out, manifest):
    """Partial sum of D(n, k) and the Fourier coefficient a_n of g_k."""
    import mpmath

    from .eisenstein import ComplexHP, D_partial, eisenstein_coefficient, u_branch
    from .exactfield import Q
    from .hauptmodul import load_constants

    _check_any(group)
    if k % 2:
        raise click.BadParameter("k must be even", param_hint="--k")
    workers = workers or _workers_default()
    ps = D_partial(n, k, N, chunk, precision, group, workers)
    payload = {"partialSum": ps.to_json()}
    if N > 0:
        coef = eisenstein_coefficient(n, k, N, precision, group, partial=ps)
        payload["coefficient"] = coef.to_json()
        if group in ("G1", "G3", "H1", "H3", "U1", "U6", "V1", "V6"):
            u = u_branch(group, P=precision)
            if load_constants(group)[1].field == Q:
                payload["normalized"] = {
                    "value": coef.normalized(u).to_json(),
                    "bound": coef.normalized_bound(u),
                    "u": ComplexHP(mpmath.mpc(u), precision).to_json(),
                }
    params = {"group": group, "n": n, "k": k, "N": N, "precision": precision, "chunk": chunk}
    _emit(ctx, payload, out, params, manifest=manifest)


@eis_group.command("g2")
@click.option("--group", "group", required=True)
@click.option("--order", type=click.IntRange(min=0), default=20, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def eis_g2(ctx, group, order, out, manifest):
    """Exact normalized coefficients a_n / u^n of the weight-2 form."""
    from .eisenstein import g2_exact
    from .hauptmodul import load_constants

    _check_canonical(group)
    s = g2_exact(group, order)
    payload = {
        "groupId": group,
        "uDescription": load_constants(group)[0].description,
        "rows": [[n, s.coeff(n).to_text()] for n in range(order + 1)],
    }
    _emit(ctx, payload, out, {"group": group, "order": order}, manifest=manifest)


@eis_group.command("g4fit")
@click.option("--N", "N", type=click.IntRange(min=300), default=100000, show_default=True)
@click.option("--precision", type=int, default=30, show_default=True, callback=_precision)
@click.option("--chunk", type=click.IntRange(min=1), default=4096, show_default=True)
@click.option("--predict", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def eis_g4fit(ctx, N, precision, chunk, predict, workers, out, manifest):
    """Fit the constant C of the g4 ansatz for G1 and predict a_2..a_n."""
    from .eisenstein import eisenstein_coefficient, g4_fit_and_predict, u_branch

    coef = eisenstein_coefficient(1, 4, N, precision, "G1", chunk, workers or _workers_default())
    u = u_branch("G1", coef.value.value, precision)
    a1 = coef.normalized(u)
    rep = g4_fit_and_predict(a1.value, coef.normalized_bound(u), predict, "G1", precision)
    params = {"N": N, "precision": precision, "chunk": chunk, "predict": predict}
    _emit(ctx, {"fit": rep}, out, params, manifest=manifest)


@eis_group.command("stats")
@click.option("--group", "group", default="G1", show_default=True)
@click.option("--n", "ns", type=click.IntRange(min=1), multiple=True, default=(1,), show_default=True)
@click.option("--cmax", type=click.IntRange(min=12), default=200000, show_default=True)
@click.option("--precision", type=int, default=30, show_default=True, callback=_precision)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def eis_stats(ctx, group, ns, cmax, precision, workers, csv_path, out, manifest):
    """Per-c records of X(n, c), the exception list and per-band summaries."""
    from .eisenstein import stats_scan, write_stats_csv

    _check_any(group)
    data = stats_scan(ns, cmax, precision, group, workers or _workers_default())
    if csv_path:
        write_stats_csv(data, ns[0], csv_path)
    summary = {str(n): s for n, s in data["summary"].items()}
    params = {"group": group, "n": list(ns), "cmax": cmax, "csv": csv_path}
    _emit(ctx, {"groupId": group, "cMax": cmax, "summary": summary}, out, params,
          manifest=manifest)


# ---------------------------------------------------------------- group

@click.group("group")
def group_group():
    """Subgroup data."""


@group_group.command("dump")
@click.option("--group", "group", default=None, help="one id; all 28 when omitted")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def group_dump(ctx, group, out, manifest):
    """Dump permutation data, widths and generators as JSON."""
    from .permgroup import ALL_IDS, get_group

    ids = [_check_any(group)] if group else list(ALL_IDS)
    payload = {"groups": [get_group(g).to_json() for g in ids]}
    _emit(ctx, payload, out, {"group": group}, manifest=manifest)


@group_group.command("outer")
@click.option("--group", "group", required=True)
@click.pass_context
def group_outer(ctx, group):
    """Print the id of the image under (a b; c d) -> (a -b; -c d)."""
    from .permgroup import outer_automorphism_image

    _check_any(group)
    click.echo(outer_automorphism_image(group))


# ---------------------------------------------------------------- root

@click.group("index7")
@click.version_option(__version__)
def root():
    """Modular-form data for the index-7 noncongruence subgroups."""


root.add_command(hauptmodul_group)
root.add_command(eis_group)
root.add_command(group_group)


@root.command("replay")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def replay(manifest):
    """Re-run a manifest's command and compare the output digest."""
    with open(manifest) as fh:
        rec = json.load(fh)
    argv = list(rec["argv"])[1:]  # drop the program name
    out = rec["output"]
    if not out:
        raise CommandFailed("manifest has no output file to compare")
    tmp = out + ".replay"
    argv = _replace_option(argv, "--out", tmp)
    argv = _replace_option(argv, "--manifest", tmp + ".manifest.json")
    status = _run(root, argv, prog="index7")
    if status:
        raise CommandFailed("replayed command failed", {"status": status})
    with open(tmp, "rb") as fh:
        digest = "sha256:" + hashlib.sha256(fh.read()).hexdigest()
    same = digest == rec["outputDigest"]
    click.echo(_dumps({"manifest": manifest, "identical": same, "digest": digest}), nl=False)
    if not same:
        raise CommandFailed("replayed output differs", {"expected": rec["outputDigest"], "got": digest})


def _replace_option(argv: list[str], name: str, value: str) -> list[str]:
    out = []
    skip = False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a == name:
            skip = True
            continue
        if a.startswith(name + "="):
            continue
        out.append(a)
    return out + [name, value]


def _error(kind: str, message: str, status: int, extra: dict | None = None) -> int:
    obj = {"error": kind, "message": message}
    if extra:
        obj["details"] = extra
    click.echo(json.dumps(obj, sort_keys=True, default=str), err=True)
    return status


def _run(cmd: click.Command, argv: list[str], prog: str) -> int:
    """Invoke a click command; all failures become a JSON object on stderr."""
    from .hauptmodul import HauptmodulError

    full = ["index7"] + ([] if cmd is root else [cmd.name]) + list(argv)
    meta = {"index7.argv": full, "index7.started": time.time()}
    try:
        with cmd.make_context(prog, list(argv)) as ctx:
            ctx.meta.update(meta)
            cmd.invoke(ctx)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        return _error("usage", exc.format_message(), 2)
    except click.ClickException as exc:
        return _error("usage", exc.format_message(), 2)
    except CommandFailed as exc:
        return _error("failed", str(exc), 1, exc.payload)
    except (HauptmodulError, ArithmeticError, ValueError, KeyError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), 1)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    return _run(root, argv, "index7")


def hauptmodul_main(argv=None) -> int:
    return _run(hauptmodul_group, sys.argv[1:] if argv is None else argv, "hauptmodul")


def eis_main(argv=None) -> int:
    return _run(eis_group, sys.argv[1:] if argv is None else argv, "eis")


def group_main(argv=None) -> int:
    return _run(group_group, sys.argv[1:] if argv is None else argv, "group")


if __name__ == "__main__":
    sys.exit(main())
