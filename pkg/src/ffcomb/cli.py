"""Command-line frontend.

Every subcommand is a thin client over the HTTP service: by default the
requests run in-process against the ASGI app (no socket, same wire format),
and --server points the same client at a remote instance. No domain logic
lives here.

Exit codes: 0 success, 1 usage/precondition error, 2 hard-assertion failure,
3 budget exhausted (incomplete result emitted).
"""

from __future__ import annotations

import json
import os
import sys

import click
import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HARD_FAIL = 2
EXIT_BUDGET = 3


def _budget_default() -> int:
    from .decompose import DEFAULT_BUDGET

    raw = os.environ.get("FFCOMB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"FFCOMB_BUDGET must be an integer, got {raw!r}")


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # in-process: same wire format, no socket
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    with _client(ctx.obj["server"]) as client:
        resp = client.post(path, json=payload)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        click.echo(f"error: {detail}", err=True)
        ctx.exit(EXIT_USAGE)
    resp.raise_for_status()
    return resp.json()


def _parse_elems(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError:
        raise click.UsageError(f"bad residue list {text!r}")


def _emit(ctx: click.Context, data: dict, human: str) -> None:
    fmt = ctx.obj["fmt"]
    if fmt == "json":
        click.echo(json.dumps(data, sort_keys=True))
    elif fmt == "csv":
        raise click.UsageError("csv output is only available for check/survey")
    else:
        click.echo(human)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Remote service URL (default: run in-process).")
@click.option("--format", "fmt", type=click.Choice(["human", "json", "csv"]),
              default="human", show_default=True)
@click.pass_context
def main(ctx: click.Context, server: str | None, fmt: str) -> None:
    """Exact finite-field additive-combinatorics toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["fmt"] = fmt


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-d", type=int, required=True)
@click.option("--xi", type=int, default=1, show_default=True,
              help="Coset representative.")
@click.pass_context
def subgroup(ctx: click.Context, p: int, d: int, xi: int) -> None:
    """Multiplicative subgroup of order d (or its coset xi*Gamma)."""
    data = _post(ctx, "/subgroup", {"p": p, "d": d, "xi": xi})
    _emit(ctx, data, data["formatted"])


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--op", type=click.Choice(["sum", "diff", "product", "ratio"]),
              required=True)
@click.option("--a", required=True, metavar="R1,R2,...")
@click.option("--b", required=True, metavar="R1,R2,...")
@click.option("--exclude-diagonal", is_flag=True,
              help="Ratio only: omit a/a pairs when A == B.")
@click.pass_context
def setop(ctx: click.Context, p: int, op: str, a: str, b: str,
          exclude_diagonal: bool) -> None:
    """Pointwise set operation A op B."""
    data = _post(ctx, "/setop", {"p": p, "op": op, "a": _parse_elems(a),
                                 "b": _parse_elems(b),
                                 "exclude_diagonal": exclude_diagonal})
    _emit(ctx, data, data["formatted"])


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--a", required=True, metavar="R1,R2,...")
@click.option("--b", default=None, metavar="R1,R2,...")
@click.option("--c", default=None, metavar="R1,R2,...")
@click.option("--d", default=None, metavar="R1,R2,...")
@click.pass_context
def energy(ctx: click.Context, p: int, a: str, b: str | None, c: str | None,
           d: str | None) -> None:
    """Additive energy E+(A), or the mixed energy when B, C, D are given."""
    payload: dict = {"p": p, "a": _parse_elems(a)}
    for key, val in (("b", b), ("c", c), ("d", d)):
        if val is not None:
            payload[key] = _parse_elems(val)
    data = _post(ctx, "/energy", payload)
    _emit(ctx, data, str(data["energy"]))


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--a", "--set", "a", required=True, metavar="R1,R2,...")
@click.option("--b", default=None, metavar="R1,R2,...")
@click.option("--c", default=None, metavar="R1,R2,...")
@click.option("--support", is_flag=True, help="Also report the support set.")
@click.pass_context
def triples(ctx: click.Context, p: int, a: str, b: str | None, c: str | None,
            support: bool) -> None:
    """Collinear triple counts T(A,B,C); B, C default to A."""
    payload: dict = {"p": p, "a": _parse_elems(a), "support": support}
    for key, val in (("b", b), ("c", c)):
        if val is not None:
            payload[key] = _parse_elems(val)
    data = _post(ctx, "/triples", payload)
    human = f"finite={data['finite']} geometric={data['geometric']}"
    if support:
        human += f" support_size={data['support_size']}"
    _emit(ctx, data, human)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--a", "--set", "a", required=True, metavar="R1,R2,...")
@click.option("--b", default=None, metavar="R1,R2,...")
@click.option("--c", default=None, metavar="R1,R2,...")
@click.option("--d", default=None, metavar="R1,R2,...")
@click.option("--oracle", is_flag=True,
              help="Also compute the line-enumeration oracle total.")
@click.pass_context
def quadruples(ctx: click.Context, p: int, a: str, b: str | None,
               c: str | None, d: str | None, oracle: bool) -> None:
    """Collinear quadruple count Q(A,B,C,D); defaults B=A, C=A, D=B."""
    payload: dict = {"p": p, "a": _parse_elems(a), "oracle": oracle}
    for key, val in (("b", b), ("c", c), ("d", d)):
        if val is not None:
            payload[key] = _parse_elems(val)
    data = _post(ctx, "/quadruples", payload)
    human = str(data["total"])
    if oracle:
        human += f" (oracle {data['oracle_total']})"
        if data["oracle_total"] != data["total"]:
            click.echo("error: oracle disagreement", err=True)
            _emit(ctx, data, human)
            ctx.exit(EXIT_HARD_FAIL)
    _emit(ctx, data, human)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--a", "--set", "a", required=True, metavar="R1,R2,...")
@click.option("--b", default=None, metavar="R1,R2,...")
@click.pass_context
def histogram(ctx: click.Context, p: int, a: str, b: str | None) -> None:
    """Dyadic line histogram over A x A and B x B incidences."""
    payload: dict = {"p": p, "a": _parse_elems(a)}
    if b is not None:
        payload["b"] = _parse_elems(b)
    data = _post(ctx, "/histogram", payload)
    lines = [f"L[{k}] = {v}" for k, v in sorted(data["buckets"].items())]
    lines.append(f"sum_exact={data['sum_exact']} "
                 f"sum_dyadic_lower={data['sum_dyadic_lower']} "
                 f"lines={data['lines_counted']}")
    _emit(ctx, data, "\n".join(lines))


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--name", required=True,
              type=click.Choice(["q_asymptotic", "qabab_upper", "t_support",
                                 "energy", "intersection", "sigma_product",
                                 "aa_shift"]))
@click.option("-d", type=int, default=None, help="Subgroup order.")
@click.option("--a", default=None, metavar="R1,R2,...")
@click.option("--b", default=None, metavar="R1,R2,...")
@click.option("--shifts", default=None, metavar="X1,X2,...")
@click.option("--xi", type=int, default=None)
@click.option("--eta1", type=int, default=1, show_default=True)
@click.option("--eta2", type=int, default=1, show_default=True)
@click.option("--omega1", default="0", show_default=True, metavar="R1,R2,...")
@click.option("--omega2", default="0", show_default=True, metavar="R1,R2,...")
@click.pass_context
def check(ctx: click.Context, p: int, name: str, d: int | None, a: str | None,
          b: str | None, shifts: str | None, xi: int | None, eta1: int,
          eta2: int, omega1: str, omega2: str) -> None:
    """Evaluate one family of inequality reports; exit 2 on hard failure."""
    payload: dict = {"p": p, "name": name,
                     "eta1": eta1, "eta2": eta2,
                     "omega1": _parse_elems(omega1),
                     "omega2": _parse_elems(omega2),
                     "max_clique_budget": _budget_default()}
    if d is not None:
        payload["d"] = d
    if a is not None:
        payload["a"] = _parse_elems(a)
    if b is not None:
        payload["b"] = _parse_elems(b)
    if shifts is not None:
        payload["shifts"] = _parse_elems(shifts)
    if xi is not None:
        payload["xi"] = xi
    data = _post(ctx, "/check", payload)
    fmt = ctx.obj["fmt"]
    if fmt == "csv":
        click.echo(_reports_csv(data["reports"]), nl=False)
    elif fmt == "json":
        click.echo(json.dumps(data, sort_keys=True))
    else:
        for r in data["reports"]:
            status = ("PASS" if r["passed"] else "FAIL") if r["hard"] else (
                f"ratio={r['ratio']:.6g}" if r["preconditions_met"]
                else "skipped (preconditions)")
            click.echo(f"{r['name']}: lhs={r['lhs']:.6g} rhs={r['rhs']:.6g} "
                       f"{status}")
    if data["hard_failures"]:
        ctx.exit(EXIT_HARD_FAIL)


def _reports_csv(reports: list[dict]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["name", "p", "d", "lhs", "rhs", "ratio", "preconditions_met"])
    for r in reports:
        inst = r.get("instance") or {}
        w.writerow([r["name"], inst.get("p", ""), inst.get("d", ""),
                    f"{r['lhs']:.6g}", f"{r['rhs']:.6g}",
                    f"{r['ratio']:.6g}", r["preconditions_met"]])
    return buf.getvalue()


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-d", type=int, required=True)
@click.option("--shifts", required=True, metavar="X1,X2,...")
@click.pass_context
def intersect(ctx: click.Context, p: int, d: int, shifts: str) -> None:
    """Intersection of Gamma with its additive translates."""
    data = _post(ctx, "/intersect", {"p": p, "d": d,
                                     "shifts": _parse_elems(shifts)})
    human = f"{p}:{{{','.join(str(x) for x in data['elements'])}}}"
    _emit(ctx, data, human)


def _emit_decomposition(ctx: click.Context, data: dict) -> None:
    if ctx.obj["fmt"] == "json":
        click.echo(json.dumps(data, sort_keys=True))
    else:
        if not data["witnesses"]:
            status = "irreducible" if data["exhaustive"] else \
                "no witness found (budget exhausted)"
            click.echo(status)
        for w in data["witnesses"]:
            click.echo(f"B={w['B']} C={w['C']}")
    if not data["exhaustive"]:
        ctx.exit(EXIT_BUDGET)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("--set", "elements", required=True, metavar="R1,R2,...")
@click.option("--all", "find_all", is_flag=True,
              help="Enumerate every canonical witness.")
@click.option("--oracle", is_flag=True, help="Use the subset-pair oracle.")
@click.pass_context
def decompose(ctx: click.Context, p: int, elements: str, find_all: bool,
              oracle: bool) -> None:
    """Search for A = B + C with both parts non-singleton."""
    data = _post(ctx, "/decompose", {"p": p, "elements": _parse_elems(elements),
                                     "find_all": find_all, "oracle": oracle,
                                     "budget": _budget_default()})
    _emit_decomposition(ctx, data)


@main.command(name="ratio-decompose")
@click.option("-p", type=int, required=True)
@click.option("--set", "elements", required=True, metavar="R1,R2,...")
@click.pass_context
def ratio_decompose(ctx: click.Context, p: int, elements: str) -> None:
    """Search for B with B/B = S (distinct-pair convention)."""
    data = _post(ctx, "/ratio-decompose",
                 {"p": p, "elements": _parse_elems(elements),
                  "budget": _budget_default()})
    _emit_decomposition(ctx, data)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-d", type=int, required=True)
@click.option("--xi", type=int, required=True)
@click.pass_context
def maxset(ctx: click.Context, p: int, d: int, xi: int) -> None:
    """Maximum A with A/A inside xi*Gamma + 1."""
    data = _post(ctx, "/maxset", {"p": p, "d": d, "xi": xi,
                                  "budget": _budget_default()})
    human = (f"{p}:{{{','.join(str(x) for x in data['elements'])}}} "
             f"size={data['size']}")
    _emit(ctx, data, human)
    if not data["exhaustive"]:
        ctx.exit(EXIT_BUDGET)


@main.command(name="dilate-check")
@click.option("-p", type=int, required=True)
@click.option("-d", type=int, required=True)
@click.option("--arbitrary-sets", is_flag=True,
              help="Scan all 2- and 3-element A, not just coset-structured.")
@click.pass_context
def dilate_check(ctx: click.Context, p: int, d: int,
                 arbitrary_sets: bool) -> None:
    """Find A (|A| in {2,3}) and xi with xi*(A-A) = Gamma plus {0}."""
    data = _post(ctx, "/dilate-check",
                 {"p": p, "d": d, "arbitrary_sets": arbitrary_sets})
    if data["found"]:
        human = (f"A={p}:{{{','.join(str(x) for x in data['a'])}}} "
                 f"xi={data['xi']}")
    else:
        human = "none"
    _emit(ctx, data, human)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="key = value config file.")
@click.option("--primes", default=None, metavar="LO,HI")
@click.option("--sizes", default=None, metavar="LO,HI")
@click.option("--max-exponent", type=float, default=None)
@click.option("--checks", default=None, metavar="NAME1,NAME2,...")
@click.option("--seed", default=None)
@click.option("--output", default=None, metavar="PATH")
@click.option("--csv-out", default=None, metavar="PATH",
              help="Also write a flat CSV projection of the records.")
@click.pass_context
def survey(ctx: click.Context, config_path: str | None, primes: str | None,
           sizes: str | None, max_exponent: float | None, checks: str | None,
           seed: str | None, output: str | None, csv_out: str | None) -> None:
    """Run a (p, d) grid survey; exit 2 on hard failures or large reducible
    subgroups."""
    from . import survey as survey_mod

    if config_path is not None:
        with open(config_path) as fh:
            try:
                cfg = survey_mod.parse_config(fh.read())
            except ValueError as exc:
                raise click.UsageError(str(exc))
    else:
        cfg = survey_mod.SurveyConfig()
    payload = {
        "prime_range": list(cfg.prime_range),
        "subgroup_size_range": list(cfg.subgroup_size_range),
        "max_subgroup_vs_p_exponent": cfg.max_subgroup_vs_p_exponent,
        "checks": list(cfg.checks),
        "seed": cfg.seed,
        "node_budget": cfg.node_budget if os.environ.get("FFCOMB_BUDGET") is None
        else _budget_default(),
        "shift_samples": cfg.shift_samples,
        "output_path": cfg.output_path,
    }
    if primes is not None:
        payload["prime_range"] = _parse_elems(primes)
    if sizes is not None:
        payload["subgroup_size_range"] = _parse_elems(sizes)
    if max_exponent is not None:
        payload["max_subgroup_vs_p_exponent"] = max_exponent
    if checks is not None:
        payload["checks"] = [s.strip() for s in checks.split(",") if s.strip()]
    if seed is not None:
        payload["seed"] = seed
    if output is not None:
        payload["output_path"] = output
    data = _post(ctx, "/survey", payload)["summary"]
    if csv_out is not None:
        records = survey_mod.read_records(data["output_path"])
        with open(csv_out, "w") as fh:
            fh.write(survey_mod.records_to_csv(records))
    if ctx.obj["fmt"] == "json":
        click.echo(json.dumps(data, sort_keys=True))
    else:
        click.echo(f"records={data['records_total']} "
                   f"hard_failures={data['hard_failures']} "
                   f"budget_exhausted={data['budget_exhausted']}")
        for name, ratio in sorted(data["max_ratios"].items()):
            click.echo(f"max ratio {name}: {ratio:.6g}")
        for item in data["large_reducible"]:
            click.echo(f"LARGE REDUCIBLE: p={item['p']} d={item['d']} "
                       f"witness={item['witness']}")
    if data["hard_failures"] or data["large_reducible"]:
        ctx.exit(EXIT_HARD_FAIL)


if __name__ == "__main__":
    sys.exit(main())
