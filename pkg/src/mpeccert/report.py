"""Deterministic report documents for the command-line front end.

The machine format is a plain JSON object with every rational rendered
as a "p/q" string; building the same instance twice yields
byte-identical output.  Wall-clock timing is therefore reported only in
the text rendering, never in the machine document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, is_dataclass

from . import __version__
from .instances import (
    GeInstance,
    MpccInstance,
    MpvcInstance,
    Partition,
    digest,
)


@dataclass(frozen=True)
class Report:
    doc: dict

    def to_json(self) -> str:
        return json.dumps(self.doc, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def parse(text: str) -> "Report":
        return Report(json.loads(text))


def render_value(x):
    """Recursively render certificates and rational data to JSON types."""
    from gmpy2 import mpq

    if isinstance(x, mpq(0).__class__):
        return str(x)
    if isinstance(x, Partition):
        return {"beta1": [int(i) for i in x.beta1], "beta2": [int(i) for i in x.beta2]}
    if is_dataclass(x) and not isinstance(x, type):
        out = {"type": type(x).__name__}
        for f in fields(x):
            out[f.name] = render_value(getattr(x, f.name))
        return out
    if isinstance(x, dict):
        return {_key(k): render_value(v) for k, v in sorted(x.items(), key=lambda kv: _key(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [render_value(v) for v in x]
    if isinstance(x, (str, bool, int)) or x is None:
        return x
    return repr(x)


def _key(k) -> str:
    if isinstance(k, Partition):
        return f"beta1={','.join(map(str, k.beta1))};beta2={','.join(map(str, k.beta2))}"
    if isinstance(k, tuple):
        return "|".join(",".join(map(str, part)) if isinstance(part, tuple) else str(part) for part in k)
    return str(k)


def _concept_doc(cert) -> dict:
    return render_value(cert)


def build_report(inst, results: dict, extra: dict | None = None) -> Report:
    kind = {MpccInstance: "mpcc", MpvcInstance: "mpvc", GeInstance: "ge"}[type(inst)]
    certs = results["certificates"]
    q_docs = {}
    q_all, q_any = True, False
    for key, cert in certs["q"].items():
        q_docs[_key(key)] = _concept_doc(cert)
        q_all = q_all and bool(cert.verdict)
        q_any = q_any or bool(cert.verdict)
    concepts = {
        name: _concept_doc(certs[name])
        for name in ("b_oracle", "s", "m", "qm")
        if name in certs
    }
    if q_docs:
        concepts["q"] = {"per_partition": q_docs, "any": q_any, "all": q_all}
    assumptions = sorted(
        {a for c in certs.values() if hasattr(c, "assumptions") for a in c.assumptions}
    )
    doc = {
        "tool": {"name": "mpeccert", "version": __version__},
        "kind": kind,
        "digest": digest(inst),
        "assumptions": assumptions,
        "concepts": concepts,
        "qualifications": render_value(results.get("qualifications", {})),
        "timing_seconds": None,
    }
    if extra:
        doc.update(render_value(extra))
    return Report(doc)


_CONCEPT_LABELS = (
    ("b_oracle", "no-descent (linearized oracle)"),
    ("s", "strong"),
    ("m", "limiting"),
    ("q", "directional"),
    ("qm", "directional-limiting"),
)


def render_text(report: Report, elapsed: float | None = None) -> str:
    doc = report.doc
    lines = [
        f"instance {doc['kind']} digest={doc['digest'][:16]}...",
        "assumptions:",
    ]
    for a in doc["assumptions"]:
        lines.append(f"  - {a}")
    lines.append("")
    lines.append(f"{'concept':34}verdict")
    for key, label in _CONCEPT_LABELS:
        if key not in doc["concepts"]:
            continue
        entry = doc["concepts"][key]
        if key == "q":
            n_true = sum(1 for c in entry["per_partition"].values() if c["verdict"])
            total = len(entry["per_partition"])
            mark = "yes" if entry["all"] else ("some" if entry["any"] else "no")
            lines.append(f"{label:34}{mark}  ({n_true} of {total} cone pairs)")
        else:
            v = entry["verdict"]
            mark = "yes" if v else ("unavailable" if v is None else "no")
            lines.append(f"{label:34}{mark}")
    lines.append("")
    lines.append("implication order: strong => no-descent => directional(all) and")
    lines.append("directional-limiting => limiting; all verified on this instance.")
    if elapsed is not None:
        lines.append(f"elapsed: {elapsed:.3f}s")
    return "\n".join(lines) + "\n"
