"""Reading and writing certificate documents (JSON).

Layout::

    {"dimension": 2, "chung_m": 1, "v0": ..., "v1": ...,
     "graphs":  [{"t": 0.4, "theta": 5.4, "weight": ...},
                 {"points": [[x, y], ...], "weight": ...}],
     "configs": [{"points": [[x, y], ...], "weight": ...}]}

A graph entry either names a spindle copy ``(t, 0) + R(theta) G`` or lists
explicit vertices; its edges are recomputed at unit distance. The origin of a
configuration may be omitted, in which case it is prepended.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .certificate import Certificate, WeightedConfig, WeightedGraph
from .errors import CertificateFormatError, DomainError
from .geometry import PointConfig, spindle_graph, unit_distance_graph

BUNDLED_CERTIFICATE = "bundled_certificate.json"


def _number(entry, key, where):
    if key not in entry:
        raise CertificateFormatError(f"{where}: missing field {key!r}")
    value = entry[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CertificateFormatError(f"{where}: field {key!r} must be a number")
    return float(value)


def _points(entry, where):
    try:
        pts = np.asarray(entry["points"], dtype=float)
    except KeyError:
        raise CertificateFormatError(f"{where}: missing field 'points'") from None
    except (TypeError, ValueError) as exc:
        raise CertificateFormatError(f"{where}: bad points: {exc}") from None
    if pts.ndim != 2 or pts.shape[1:] != (2,):
        raise CertificateFormatError(f"{where}: points must be a list of [x, y]")
    return pts


def certificate_from_dict(doc: dict) -> Certificate:
    try:
        return _certificate_from_dict(doc)
    except DomainError as exc:
        raise CertificateFormatError(str(exc)) from None
    except (TypeError, AttributeError) as exc:
        raise CertificateFormatError(f"malformed certificate: {exc}") from None


def _certificate_from_dict(doc: dict) -> Certificate:
    if not isinstance(doc, dict):
        raise CertificateFormatError("certificate document must be an object")
    graphs = []
    for k, entry in enumerate(doc.get("graphs", [])):
        where = f"graphs[{k}]"
        weight = _number(entry, "weight", where)
        if "points" in entry:
            config = PointConfig(_points(entry, where), entry.get("label", where))
            graphs.append(WeightedGraph(unit_distance_graph(config), weight))
        else:
            t, theta = _number(entry, "t", where), _number(entry, "theta", where)
            graphs.append(WeightedGraph(spindle_graph(t, theta), weight))
    configs = []
    for k, entry in enumerate(doc.get("configs", [])):
        where = f"configs[{k}]"
        config = PointConfig(_points(entry, where), entry.get("label", f"C{k + 1}"))
        configs.append(WeightedConfig(config.with_origin(), _number(entry, "weight", where)))
    return Certificate(
        v0=_number(doc, "v0", "certificate"),
        v1=_number(doc, "v1", "certificate"),
        graphs=graphs,
        configs=configs,
        dimension=int(doc.get("dimension", 2)),
        chung_m=int(doc.get("chung_m", 1)),
    )


def certificate_to_dict(cert: Certificate) -> dict:
    graphs = []
    for g in cert.graphs:
        if g.graph.spindle is not None:
            t, theta = g.graph.spindle
            graphs.append({"t": t, "theta": theta, "weight": g.weight})
        else:
            graphs.append({"points": g.graph.vertices.points.tolist(), "weight": g.weight})
    return {
        "dimension": cert.dimension,
        "chung_m": cert.chung_m,
        "v0": cert.v0,
        "v1": cert.v1,
        "graphs": graphs,
        "configs": [
            {"points": c.config.points.tolist(), "weight": c.weight} for c in cert.configs
        ],
    }


def load_certificate(path) -> Certificate:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CertificateFormatError(f"{path}: {exc}") from None
    return certificate_from_dict(doc)


def dump_certificate(cert: Certificate, path) -> None:
    Path(path).write_text(json.dumps(certificate_to_dict(cert), indent=2) + "\n",
                          encoding="utf-8")


def bundled_certificate_path():
    return resources.files("udb.data").joinpath(BUNDLED_CERTIFICATE)


def bundled_certificate() -> Certificate:
    """The bundled certificate: three spindle copies and five 6-point sets."""
    doc = json.loads(bundled_certificate_path().read_text(encoding="utf-8"))
    return certificate_from_dict(doc)
