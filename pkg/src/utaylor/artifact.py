"""Persistence: series artifacts, certificate reports, data tables.

Artifacts are line-oriented text with a magic header and a format version.
Scalars are stored as sign/mantissa-hex/exponent tokens taken from the
arbitrary-precision representation, so round trips are bit-exact and
re-running a command with the same configuration reproduces files byte for
byte (no timestamps or environment data in payloads).
"""

from __future__ import annotations

import hashlib
import io
import json
from typing import List, Optional

from mpmath import mp, mpc, mpf

from .poly import Poly
from .schedule import Schedule
from .universal import SeriesBlock, StepCertificate, UniversalSeries

MAGIC = "UTAYLOR-SERIES"
FORMAT_VERSION = 1


class ArtifactError(ValueError):
    """Malformed or corrupted artifact."""


# ---------------------------------------------------------------------------
# exact scalar tokens


def mpf_to_token(x) -> str:
    x = mpf(x)
    if x == 0:
        return "z"
    sign, man, exp, _ = x._mpf_
    if not isinstance(man, int):  # inf/nan carry non-int mantissa internals
        if x == mpf("inf"):
            return "inf"
        if x == mpf("-inf"):
            return "-inf"
        return "nan"
    return f"{'-' if sign else '+'}{man:x}p{exp}"


def token_to_mpf(tok: str) -> mpf:
    if tok == "z":
        return mpf(0)
    if tok in ("inf", "-inf", "nan"):
        return mpf(tok)
    sign = 1 if tok[0] == "-" else 0
    body = tok[1:]
    man_hex, exp_str = body.split("p")
    man = int(man_hex, 16)
    return mpf((sign, man, int(exp_str), man.bit_length()))


def mpc_to_tokens(z) -> str:
    z = mpc(z)
    return f"{mpf_to_token(z.real)} {mpf_to_token(z.imag)}"


def tokens_to_mpc(re_tok: str, im_tok: str) -> mpc:
    return mpc(token_to_mpf(re_tok), token_to_mpf(im_tok))


def config_digest(config: dict, schedule: Optional[Schedule] = None) -> str:
    payload = json.dumps(config, sort_keys=True, default=str)
    if schedule is not None:
        payload += schedule.canonical_yaml()
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# series artifact


def dump_series(series: UniversalSeries, config: Optional[dict] = None) -> str:
    out = io.StringIO()
    cfg = dict(config or {})
    w = out.write
    w(f"{MAGIC} {FORMAT_VERSION}\n")
    w(f"domain {series.domain_kind}\n")
    w(f"mode {series.mode}\n")
    w(f"precision_bits {series.precision_bits}\n")
    w(f"schedule_digest {series.schedule.digest()}\n")
    w(f"config_digest {config_digest(cfg, series.schedule)}\n")
    w(f"config {json.dumps(cfg, sort_keys=True, default=str)}\n")
    w("schedule_yaml_begin\n")
    for line in series.schedule.canonical_yaml().splitlines():
        w(f"| {line}\n")
    w("schedule_yaml_end\n")
    w(f"blocks {len(series.blocks)}\n")
    for block, cert in zip(series.blocks, series.certificates):
        w(
            f"block k={block.k} exponent={block.exponent} shift={block.shift} "
            f"coeffs={len(block.qstar.coeffs)}\n"
        )
        for j, c in enumerate(block.qstar.coeffs):
            w(f"c {j} {mpc_to_tokens(c)}\n")
        w(_cert_line(cert))
    w("end\n")
    return out.getvalue()


def _cert_line(cert: StepCertificate) -> str:
    fields = {
        "k": cert.k,
        "exponent": cert.exponent,
        "shift": cert.shift,
        "fit_degree": cert.fit_degree,
        "requested_growth_bound": cert.requested_growth_bound,
        "achieved_growth_margin": cert.achieved_growth_margin,
        "requested_target_err": cert.requested_target_err,
        "achieved_target_err": cert.achieved_target_err,
        "requested_fit_tol": cert.requested_fit_tol,
        "achieved_fit_err": cert.achieved_fit_err,
        "mergelyan_met": int(cert.mergelyan_met),
        "growth_points": cert.growth_points,
        "target_points": cert.target_points,
    }
    parts = " ".join(f"{k}={v!r}" for k, v in fields.items())
    extras = json.dumps(cert.extras, sort_keys=True)
    note = json.dumps(cert.relaxation_note)
    return f"cert {parts}\nextras {extras}\nnote {note}\n"


def load_series(text: str) -> UniversalSeries:
    lines = text.splitlines()
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ArtifactError("unexpected end of artifact")
        line = lines[pos]
        pos += 1
        return line

    header = take().split()
    if len(header) != 2 or header[0] != MAGIC:
        raise ArtifactError("bad magic line")
    if int(header[1]) != FORMAT_VERSION:
        raise ArtifactError(f"unsupported format version {header[1]}")
    meta = {}
    for key in ("domain", "mode", "precision_bits", "schedule_digest", "config_digest"):
        name, _, value = take().partition(" ")
        if name != key:
            raise ArtifactError(f"expected {key}, found {name}")
        meta[key] = value
    name, _, cfg_json = take().partition(" ")
    if name != "config":
        raise ArtifactError("expected config line")
    if take() != "schedule_yaml_begin":
        raise ArtifactError("expected schedule block")
    yaml_lines = []
    while True:
        line = take()
        if line == "schedule_yaml_end":
            break
        if not line.startswith("| "):
            raise ArtifactError("malformed schedule block")
        yaml_lines.append(line[2:])
    import yaml as _yaml

    schedule = Schedule.from_dict(_yaml.safe_load("\n".join(yaml_lines)))
    if schedule.digest() != meta["schedule_digest"]:
        raise ArtifactError("schedule digest mismatch: artifact corrupted")
    name, _, count = take().partition(" ")
    if name != "blocks":
        raise ArtifactError("expected blocks count")
    series = UniversalSeries(meta["domain"], meta["mode"], schedule)
    series.precision_bits = int(meta["precision_bits"])
    for _ in range(int(count)):
        head = take().split()
        if head[0] != "block":
            raise ArtifactError("expected block line")
        attrs = dict(part.split("=") for part in head[1:])
        n_coeffs = int(attrs["coeffs"])
        coeffs = []
        for j in range(n_coeffs):
            parts = take().split()
            if parts[0] != "c" or int(parts[1]) != j:
                raise ArtifactError("malformed coefficient line")
            coeffs.append(tokens_to_mpc(parts[2], parts[3]))
        block = SeriesBlock(
            int(attrs["k"]), int(attrs["exponent"]), int(attrs["shift"]), Poly(coeffs)
        )
        cert_line = take()
        if not cert_line.startswith("cert "):
            raise ArtifactError("expected certificate line")
        cert_fields = dict(part.split("=") for part in cert_line[5:].split())
        extras_line = take()
        if not extras_line.startswith("extras "):
            raise ArtifactError("expected extras line")
        note_line = take()
        if not note_line.startswith("note "):
            raise ArtifactError("expected note line")
        cert = StepCertificate(
            k=int(cert_fields["k"]),
            exponent=int(cert_fields["exponent"]),
            shift=int(cert_fields["shift"]),
            fit_degree=int(cert_fields["fit_degree"]),
            requested_growth_bound=float(cert_fields["requested_growth_bound"]),
            achieved_growth_margin=float(cert_fields["achieved_growth_margin"]),
            requested_target_err=float(cert_fields["requested_target_err"]),
            achieved_target_err=float(cert_fields["achieved_target_err"]),
            requested_fit_tol=float(cert_fields["requested_fit_tol"]),
            achieved_fit_err=float(cert_fields["achieved_fit_err"]),
            mergelyan_met=bool(int(cert_fields["mergelyan_met"])),
            growth_points=int(cert_fields["growth_points"]),
            target_points=int(cert_fields["target_points"]),
            relaxation_note=json.loads(note_line[5:]),
            extras=json.loads(extras_line[7:]),
        )
        series.append(block, cert)
    if take() != "end":
        raise ArtifactError("missing end marker")
    return series


def save_series(series: UniversalSeries, path, config: Optional[dict] = None) -> None:
    with open(path, "w") as fh:
        fh.write(dump_series(series, config))


def read_series(path) -> UniversalSeries:
    with open(path) as fh:
        return load_series(fh.read())


# ---------------------------------------------------------------------------
# report rendering


def certificate_table(series: UniversalSeries) -> str:
    out = io.StringIO()
    out.write(
        "k exponent shift fit_degree fit_err fit_tol fit_met growth_margin "
        "target_err target_req note\n"
    )
    for c in series.certificates:
        out.write(
            f"{c.k} {c.exponent} {c.shift} {c.fit_degree} "
            f"{c.achieved_fit_err:.6e} {c.requested_fit_tol:.6e} "
            f"{int(c.mergelyan_met)} {c.achieved_growth_margin:.6e} "
            f"{c.achieved_target_err:.6e} {c.requested_target_err:.6e} "
            f"{json.dumps(c.relaxation_note)}\n"
        )
    return out.getvalue()


def write_csv(path, header: List[str], rows: List[List]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")
