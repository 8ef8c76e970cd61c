"""On-disk dataset format, ingestion with repair, and the synthetic generator.

Format: a JSON manifest pointing at a headerless comma-separated feature CSV,
an optional one-label-per-line file, and one whitespace-separated 0-indexed
undirected edge list per view ("i j" lines). Paths are relative to the
manifest's directory.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataRepairWarning
from .graphs import MultiViewGraph

__all__ = [
    "DatasetManifest",
    "SyntheticSpec",
    "load_dataset",
    "save_dataset",
    "generate_synthetic",
    "save_embedding",
    "load_embedding",
    "save_report",
]

MEAN_LAYOUTS = ("spread", "paired")


@dataclass
class DatasetManifest:
    name: str
    n_nodes: int
    n_views: int
    n_features: int
    n_clusters: int
    feature_file: str
    graph_files: list
    label_file: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_nodes": self.n_nodes,
            "n_views": self.n_views,
            "n_features": self.n_features,
            "n_clusters": self.n_clusters,
            "feature_file": self.feature_file,
            "label_file": self.label_file,
            "graph_files": list(self.graph_files),
        }

    @staticmethod
    def from_dict(payload: dict) -> "DatasetManifest":
        required = {
            "name",
            "n_nodes",
            "n_views",
            "n_features",
            "n_clusters",
            "feature_file",
            "graph_files",
        }
        missing = required - payload.keys()
        if missing:
            raise ValueError(f"manifest is missing fields: {sorted(missing)}")
        return DatasetManifest(
            name=payload["name"],
            n_nodes=int(payload["n_nodes"]),
            n_views=int(payload["n_views"]),
            n_features=int(payload["n_features"]),
            n_clusters=int(payload["n_clusters"]),
            feature_file=payload["feature_file"],
            graph_files=list(payload["graph_files"]),
            label_file=payload.get("label_file"),
        )


def _load_matrix(path: Path, what: str) -> np.ndarray:
    try:
        rows = [
            [float(cell) for cell in line.split(",")]
            for line in path.read_text().splitlines()
            if line.strip()
        ]
    except OSError as exc:
        raise OSError(f"reading {what} from {path}: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError(f"{what} file {path} is empty or ragged")
    return np.asarray(rows, dtype=np.float64)


def _load_edges(path: Path, n_nodes: int, view: int) -> np.ndarray:
    """Dense symmetric 0/1 adjacency from an edge list, with repairs recorded."""
    a = np.zeros((n_nodes, n_nodes))
    repairs = []
    self_loops = 0
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise OSError(f"reading view {view} edges from {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-integer endpoint in {line!r}") from exc
        if not (0 <= i < n_nodes and 0 <= j < n_nodes):
            raise ValueError(f"{path}:{lineno}: node id out of range [0, {n_nodes})")
        if i == j:
            self_loops += 1
            continue
        a[i, j] = 1.0
        a[j, i] = 1.0
    if self_loops:
        repairs.append(f"dropped {self_loops} self-loop lines")
    if repairs:
        warnings.warn(
            f"view {view} ({path.name}): " + "; ".join(repairs), DataRepairWarning, stacklevel=3
        )
    return a


def load_dataset(manifest_path) -> MultiViewGraph:
    """Load and validate a dataset; asymmetries and diagonals are repaired.

    Adjacencies are symmetrized as max(A, A^T) with the diagonal zeroed; any
    repair emits a DataRepairWarning rather than an error.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = DatasetManifest.from_dict(json.loads(manifest_path.read_text()))
    except OSError as exc:
        raise OSError(f"reading manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    base = manifest_path.parent
    if len(manifest.graph_files) != manifest.n_views:
        raise ValueError(
            f"manifest lists {len(manifest.graph_files)} graph files for {manifest.n_views} views"
        )

    features = _load_matrix(base / manifest.feature_file, "features")
    if features.shape != (manifest.n_nodes, manifest.n_features):
        raise ValueError(
            f"features shape {features.shape} != "
            f"({manifest.n_nodes}, {manifest.n_features}) from manifest"
        )

    labels = None
    if manifest.label_file is not None:
        raw = _load_matrix(base / manifest.label_file, "labels")
        labels = raw.ravel()
        if labels.size != manifest.n_nodes:
            raise ValueError(f"labels length {labels.size} != {manifest.n_nodes} nodes")
        if not np.array_equal(labels, labels.astype(np.int64)):
            raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)

    adjacencies = []
    for view, graph_file in enumerate(manifest.graph_files):
        a = _load_edges(base / graph_file, manifest.n_nodes, view)
        if not np.isin(a, (0.0, 1.0)).all():
            raise ValueError(f"view {view}: adjacency has non-binary entries")
        sym = np.maximum(a, a.T)
        np.fill_diagonal(sym, 0.0)
        if not np.array_equal(sym, a):
            warnings.warn(
                f"view {view}: adjacency symmetrized / diagonal zeroed",
                DataRepairWarning,
                stacklevel=2,
            )
        adjacencies.append(sym)

    return MultiViewGraph(
        features=features,
        adjacencies=adjacencies,
        n_clusters=manifest.n_clusters,
        labels=labels,
        name=manifest.name,
    )


def save_dataset(g: MultiViewGraph, out_dir, name: str | None = None) -> Path:
    """Write a graph in the manifest format; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = name or (g.name or "dataset")
    save_embedding(g.features, out_dir / "features.csv")
    label_file = None
    if g.labels is not None:
        label_file = "labels.csv"
        _write_text(out_dir / label_file, "\n".join(str(int(v)) for v in g.labels))
    graph_files = []
    for view, a in enumerate(g.adjacencies):
        rows, cols = np.nonzero(np.triu(a, k=1))
        graph_files.append(f"graph_{view}.txt")
        _write_text(
            out_dir / graph_files[-1], "\n".join(f"{i} {j}" for i, j in zip(rows, cols))
        )
    manifest = DatasetManifest(
        name=name,
        n_nodes=g.n_nodes,
        n_views=g.n_views,
        n_features=g.n_features,
        n_clusters=g.n_clusters,
        feature_file="features.csv",
        graph_files=graph_files,
        label_file=label_file,
    )
    manifest_path = out_dir / "manifest.json"
    _write_text(manifest_path, json.dumps(manifest.to_dict(), indent=2))
    return manifest_path


# ---------------------------------------------------------------------------
# synthetic generator
# ---------------------------------------------------------------------------


@dataclass
class SyntheticSpec:
    """Stochastic-block-model views over class-mean-separated Gaussian features.

    ``p_in``/``p_out`` may be scalars or one value per view. ``mean_layout``
    controls the class-mean geometry: "spread" places every class mean on its
    own orthogonal direction at distance ``mean_separation`` from the origin;
    "paired" gives consecutive class pairs a shared base direction separated
    within the pair by ``pair_separation * mean_separation``, so paired classes
    are nearly indistinguishable by features alone and must be told apart
    through their adjacency structure.
    """

    n_nodes: int
    n_clusters: int
    n_views: int
    p_in: float | tuple = 0.1
    p_out: float | tuple = 0.01
    n_features: int = 16
    mean_separation: float = 3.0
    noise_scale: float = 1.0
    seed: int = 0
    mean_layout: str = "spread"
    pair_separation: float = 0.25

    def __post_init__(self):
        if self.n_nodes < self.n_clusters or self.n_clusters < 1:
            raise ConfigError("need n_nodes >= n_clusters >= 1")
        if self.n_views < 1:
            raise ConfigError("n_views must be >= 1")
        if self.noise_scale <= 0:
            raise ConfigError("noise_scale must be positive")
        if self.mean_layout not in MEAN_LAYOUTS:
            raise ConfigError(f"mean_layout must be one of {MEAN_LAYOUTS}")
        if not 0.0 <= self.pair_separation:
            raise ConfigError("pair_separation must be nonnegative")
        for p in (*self.p_in_per_view(), *self.p_out_per_view()):
            if not 0.0 <= p <= 1.0:
                raise ConfigError("edge probabilities must lie in [0, 1]")
        if self.n_features < self._directions_needed():
            raise ConfigError(
                f"n_features must be >= {self._directions_needed()} for this layout"
            )

    def _directions_needed(self) -> int:
        # both layouts consume one orthogonal direction per class
        return self.n_clusters

    def _per_view(self, value) -> tuple:
        if np.isscalar(value):
            return (float(value),) * self.n_views
        value = tuple(float(v) for v in value)
        if len(value) != self.n_views:
            raise ConfigError(f"expected {self.n_views} per-view probabilities, got {len(value)}")
        return value

    def p_in_per_view(self) -> tuple:
        return self._per_view(self.p_in)

    def p_out_per_view(self) -> tuple:
        return self._per_view(self.p_out)

    def class_sizes(self) -> np.ndarray:
        sizes = np.full(self.n_clusters, self.n_nodes // self.n_clusters)
        sizes[: self.n_nodes % self.n_clusters] += 1
        return sizes

    def expected_hr(self) -> list:
        """Analytic expected homophily ratio per view."""
        sizes = self.class_sizes()
        intra_pairs = float((sizes * (sizes - 1) / 2).sum())
        total_pairs = self.n_nodes * (self.n_nodes - 1) / 2
        inter_pairs = total_pairs - intra_pairs
        out = []
        for p_in, p_out in zip(self.p_in_per_view(), self.p_out_per_view()):
            expected_edges = p_in * intra_pairs + p_out * inter_pairs
            if expected_edges == 0:
                raise ConfigError("expected edge count is zero for a view")
            out.append(p_in * intra_pairs / expected_edges)
        return out


def _class_mean_matrix(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    c, d = spec.n_clusters, spec.n_features
    directions, _ = np.linalg.qr(rng.normal(size=(d, spec._directions_needed())))
    mu = spec.mean_separation
    means = np.empty((c, d))
    if spec.mean_layout == "spread":
        for k in range(c):
            means[k] = mu * directions[:, k]
        return means
    n_pairs = c // 2
    for pair in range(n_pairs):
        base = mu * directions[:, pair]
        offset = 0.5 * spec.pair_separation * mu * directions[:, n_pairs + pair]
        means[2 * pair] = base + offset
        means[2 * pair + 1] = base - offset
    if c % 2:
        means[c - 1] = mu * directions[:, spec._directions_needed() - 1]
    return means


def generate_synthetic(spec: SyntheticSpec) -> MultiViewGraph:
    """Draw a multi-view SBM with class-dependent Gaussian features.

    Deterministic under ``spec.seed``; raises if a view's expected edge count
    is zero.
    """
    spec.expected_hr()  # validates the edge counts
    sizes = spec.class_sizes()
    labels = np.repeat(np.arange(spec.n_clusters), sizes)
    seq = np.random.SeedSequence(spec.seed).spawn(spec.n_views + 1)
    feat_rng = np.random.default_rng(seq[0])
    means = _class_mean_matrix(spec, feat_rng)
    features = means[labels] + spec.noise_scale * feat_rng.normal(
        size=(spec.n_nodes, spec.n_features)
    )
    same = labels[:, None] == labels[None, :]
    adjacencies = []
    for view, (p_in, p_out) in enumerate(zip(spec.p_in_per_view(), spec.p_out_per_view())):
        rng = np.random.default_rng(seq[view + 1])
        probs = np.where(same, p_in, p_out)
        draw = rng.random((spec.n_nodes, spec.n_nodes)) < probs
        upper = np.triu(draw, k=1)
        adjacencies.append((upper | upper.T).astype(np.float64))
    return MultiViewGraph(
        features=features,
        adjacencies=adjacencies,
        n_clusters=spec.n_clusters,
        labels=labels,
        name=f"synthetic_seed{spec.seed}",
    )


# ---------------------------------------------------------------------------
# flat-file helpers
# ---------------------------------------------------------------------------


def _write_text(path: Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def save_embedding(matrix: np.ndarray, path) -> None:
    """Headerless CSV, one row per node, '.'-decimal, full float precision."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    _write_text(Path(path), "\n".join(",".join("%.17g" % v for v in row) for row in matrix))


def load_embedding(path) -> np.ndarray:
    return _load_matrix(Path(path), "embedding")


def save_report(report, path) -> None:
    """Serialize a TrainReport (or plain dict) as JSON."""
    payload = report.to_dict() if hasattr(report, "to_dict") else report
    _write_text(Path(path), json.dumps(payload, indent=2))
