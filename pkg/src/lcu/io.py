"""Plain-text file formats.

All vertex ids on disk are 0-based. Floats are written with 17 significant
digits so every double survives a write/read cycle exactly. Readers report
1-based line numbers.
"""

import json

import numpy as np

from .errors import ParseError
from .graph import Dataset, Graph
from .unfolding import Prediction

REPORT_SCHEMA = "lcu-run-report/1"


def _fmt(x):
    return "%.17g" % x


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield lineno, text


def _int(token, lineno, path, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} {token!r} is not an integer", lineno, path) from None


def read_edge_list(path, num_vertices=None):
    """Read whitespace-separated ``i j`` pairs into an unlabeled :class:`Graph`."""
    edges = []
    for lineno, text in _lines(path):
        tokens = text.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 vertex ids, found {len(tokens)} fields", lineno, path)
        i, j = (_int(t, lineno, path, "vertex id") for t in tokens)
        if i < 0 or j < 0:
            raise ParseError("negative vertex id", lineno, path)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", lineno, path)
        edges.append((i, j))
    if not edges and num_vertices is None:
        raise ParseError("edge list is empty", None, path)
    n = max(max(e) for e in edges) + 1 if edges else 0
    if num_vertices is not None:
        if num_vertices < n:
            raise ParseError(f"vertex id {n - 1} exceeds the declared vertex count", None, path)
        n = num_vertices
    return Graph.from_edges(n, edges)


def write_edge_list(g, path):
    write_edges(g.edges, path)


def write_edges(edges, path):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in edges:
            fh.write(f"{int(i)} {int(j)}\n")


def read_labels(path, num_vertices, num_classes=None):
    """Read ``vertex,label`` rows; vertices not listed are unlabeled (0)."""
    labels = np.zeros(num_vertices, dtype=np.int64)
    seen = set()
    for lineno, text in _lines(path):
        fields = [f.strip() for f in text.split(",")]
        if fields == ["vertex", "label"]:
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 'vertex,label', found {len(fields)} fields", lineno, path)
        v = _int(fields[0], lineno, path, "vertex id")
        c = _int(fields[1], lineno, path, "label")
        if not 0 <= v < num_vertices:
            raise ParseError(f"vertex {v} out of range [0, {num_vertices})", lineno, path)
        if c < 0 or (num_classes is not None and c > num_classes):
            bound = f"0..{num_classes}" if num_classes is not None else ">= 0"
            raise ParseError(f"label {c} outside {bound}", lineno, path)
        if v in seen:
            raise ParseError(f"vertex {v} labeled twice", lineno, path)
        seen.add(v)
        labels[v] = c
    return labels


def write_labels(labels, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("vertex,label\n")
        for v in np.flatnonzero(labels):
            fh.write(f"{v},{int(labels[v])}\n")


def write_predictions(pred, path):
    C = pred.num_classes
    header = ["vertex", "label"] + [f"score_{c}" for c in range(1, C + 1)] + \
        ["bfs_depth_used", "overlapping"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for v in range(pred.labels.shape[0]):
            scores = ",".join(_fmt(s) for s in pred.scores[v])
            fh.write(f"{v},{int(pred.labels[v])},{scores},{int(pred.depth[v])},"
                     f"{int(bool(pred.overlapping[v]))}\n")


def read_predictions(path):
    rows = []
    width = None
    for lineno, text in _lines(path):
        fields = text.split(",")
        if fields[0] == "vertex":
            width = len(fields)
            continue
        if width is None or len(fields) != width:
            raise ParseError("prediction row does not match the header", lineno, path)
        if int(fields[0]) != len(rows):
            raise ParseError("vertices must be listed in order", lineno, path)
        rows.append(fields)
    C = width - 4
    labels = np.array([int(r[1]) for r in rows], dtype=np.int64)
    scores = np.array([[float(x) for x in r[2:2 + C]] for r in rows]).reshape(len(rows), C)
    if np.all(scores == np.rint(scores)):
        scores = scores.astype(np.int64)
    depth = np.array([int(r[2 + C]) for r in rows], dtype=np.int64)
    overlapping = np.array([r[3 + C] == "1" for r in rows], dtype=bool)
    return Prediction(labels, scores, depth, overlapping)


def read_points(path, label_column=False):
    """Read comma-separated feature rows, optionally with a trailing integer label."""
    rows, labels = [], []
    width = None
    for lineno, text in _lines(path):
        fields = [f.strip() for f in text.split(",")]
        if width is None:
            width = len(fields)
            if width < (2 if label_column else 1):
                raise ParseError("no feature columns", lineno, path)
        elif len(fields) != width:
            raise ParseError(f"row has {len(fields)} fields, expected {width}", lineno, path)
        feats = fields[:-1] if label_column else fields
        try:
            rows.append([float(x) for x in feats])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
        labels.append(_int(fields[-1], lineno, path, "label") if label_column else 0)
    if not rows:
        raise ParseError("no data rows", None, path)
    return Dataset(np.array(rows), np.array(labels, dtype=np.int64))


def write_points(data, path, label_column=True):
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in zip(data.points, data.labels):
            cells = [_fmt(v) for v in x] + ([str(int(y))] if label_column else [])
            fh.write(",".join(cells) + "\n")


def dump_domination(g, state, path):
    """Write nonzero cumulative domination as ``c i j value`` triplets sorted by (c, i, j)."""
    dom = np.asarray(state.domination, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# c i j value\n")
        for c in range(dom.shape[0]):
            for k in np.flatnonzero(dom[c]):
                fh.write(f"{c + 1} {int(g.row[k])} {int(g.indices[k])} {_fmt(dom[c, k])}\n")


def read_domination(g, path, num_classes=None):
    C = num_classes or g.num_classes
    dom = np.zeros((C, g.nnz))
    for lineno, text in _lines(path):
        tokens = text.split()
        if len(tokens) != 4:
            raise ParseError(f"expected 'c i j value', found {len(tokens)} fields", lineno, path)
        c, i, j = (_int(t, lineno, path, "index") for t in tokens[:3])
        if not 1 <= c <= C:
            raise ParseError(f"class {c} out of range", lineno, path)
        try:
            k = g.position(i, j)
            dom[c - 1, k] = float(tokens[3])
        except KeyError:
            raise ParseError(f"no edge {i}-{j} in the graph", lineno, path) from None
        except ValueError:
            raise ParseError(f"bad value {tokens[3]!r}", lineno, path) from None
    return dom


def dumps_report(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_report(report))


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema") not in (REPORT_SCHEMA, None):
        raise ParseError(f"unsupported report schema {data.get('schema')!r}", None, path)
    return data


def run_report(params, totals, unfolding, prediction=None, timings=None, extra=None):
    """Assemble the run-report mapping.

    ``totals`` is a ``(T + 1, C)`` array of class populations per iteration.
    """
    totals = np.asarray(totals, dtype=float)
    classes = []
    for c in range(unfolding.num_classes):
        classes.append({"class": c + 1,
                        "population_totals": totals[:, c].tolist(),
                        "unfolding_edges": int(unfolding.sizes()[c])})
    out = {"schema": REPORT_SCHEMA, "params": params, "classes": classes,
           "unassigned_edges": int((unfolding.owner == 0).sum()), "timings": timings}
    if prediction is not None:
        out["predictions"] = {
            "labels": prediction.labels.tolist(),
            "bfs_depth_used": prediction.depth.tolist(),
            "overlapping_vertices": np.flatnonzero(prediction.overlapping).tolist(),
        }
    if extra:
        out.update(extra)
    return out


def write_series_csv(path, x, y, sigma):
    """Plot-ready ``x,y,sigma`` columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,sigma\n")
        for a, b, s in zip(x, y, sigma):
            fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(s)}\n")
