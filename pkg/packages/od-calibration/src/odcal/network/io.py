"""Network JSON interchange and the OD / counts CSV formats."""

from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import numpy.typing as npt
import pandas as pd

from odcal.errors import InvalidInputError
from odcal.network.types import Edge, Network, ODPair, ODVector, Route
from odcal.schema import validate_network_document

FLOAT_FORMAT = "%.6g"


class NetworkFileError(InvalidInputError):
    """Raised when a network document fails schema or consistency checks."""


# ── Network JSON ────────────────────────────────────────────────────────────


def network_to_document(network: Network) -> dict:
    return {
        "edges": [
            {"edge_id": e.edge_id, "free_flow_time": e.free_flow_time, "capacity": e.capacity,
             "is_measured": e.is_measured}
            for e in network.edges
        ],
        "od_pairs": [
            {"od_id": od.od_id, "origin_node": od.origin_node, "destination_node": od.destination_node,
             "prior_demand": od.prior_demand}
            for od in network.od_pairs
        ],
        "routes": [
            {"route_id": r.route_id, "od_id": r.od_id, "edge_sequence": list(r.edge_sequence),
             "travel_time": r.travel_time}
            for r in network.routes
        ],
        "measured_edges": list(network.measured_edges),
    }


def network_from_document(data: dict) -> Network:
    result = validate_network_document(data)
    if not result.valid:
        raise NetworkFileError("invalid network document: " + "; ".join(result.errors))
    return Network(
        edges=tuple(Edge(**e) for e in data["edges"]),
        od_pairs=tuple(ODPair(**od) for od in data["od_pairs"]),
        routes=tuple(
            Route(route_id=r["route_id"], od_id=r["od_id"], edge_sequence=tuple(r["edge_sequence"]),
                  travel_time=r["travel_time"])
            for r in data["routes"]
        ),
        measured_edges=tuple(data["measured_edges"]),
    )


def save_network(network: Network, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(network_to_document(network), f, indent=2)
        f.write("\n")
    return path


def load_network(path: Path) -> Network:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise NetworkFileError(f"{path}: invalid JSON: {e}") from e
    return network_from_document(data)


# ── CSV tables ──────────────────────────────────────────────────────────────


def read_table(path: Path, columns: Sequence[str], id_column: str | None = None) -> pd.DataFrame:
    """Read a headed numeric CSV; ``id_column`` must hold whole numbers."""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InvalidInputError(f"{path}: unreadable CSV: {e}") from e
    if list(frame.columns) != list(columns):
        raise InvalidInputError(f"{path}: expected header {','.join(columns)}, got {','.join(map(str, frame.columns))}")
    if frame.isna().any().any():
        raise InvalidInputError(f"{path}: missing values")
    for col in columns:
        if not pd.api.types.is_numeric_dtype(frame[col]):
            raise InvalidInputError(f"{path}: column {col} is not numeric")
    if id_column is not None and (frame[id_column] % 1 != 0).any():
        raise InvalidInputError(f"{path}: column {id_column} must hold integer ids")
    return frame


def read_od_vector(path: Path, network: Network) -> ODVector:
    """Read `od_id,demand`; every OD must appear exactly once."""
    frame = read_table(path, ("od_id", "demand"), id_column="od_id")
    ids = frame["od_id"].astype(int).tolist()
    if sorted(ids) != list(range(1, network.n_od + 1)):
        raise InvalidInputError(f"{path}: od ids must be exactly 1..{network.n_od}")
    vec = np.zeros(network.n_od, dtype=float)
    vec[np.asarray(ids) - 1] = frame["demand"].to_numpy(dtype=float)
    if np.any(vec < 0):
        raise InvalidInputError(f"{path}: demand must be >= 0")
    return vec


def write_od_vector(vec: npt.ArrayLike, path: Path) -> Path:
    values = np.asarray(vec, dtype=float)
    frame = pd.DataFrame({"od_id": np.arange(1, values.size + 1), "demand": values})
    return _write_frame(frame, path)


def read_counts(path: Path, network: Network) -> npt.NDArray[np.float64]:
    """Read `edge_id,count` and return counts in measured-edge order."""
    frame = read_table(path, ("edge_id", "count"), id_column="edge_id")
    ids = frame["edge_id"].astype(int).tolist()
    if sorted(ids) != sorted(network.measured_edges) or len(ids) != network.n_measured:
        raise InvalidInputError(f"{path}: edge ids must match the network's {network.n_measured} measured edges")
    by_edge = dict(zip(ids, frame["count"].to_numpy(dtype=float)))
    counts = np.array([by_edge[e] for e in network.measured_edges], dtype=float)
    if np.any(counts < 0):
        raise InvalidInputError(f"{path}: counts must be >= 0")
    return counts


def write_counts(counts: npt.ArrayLike, network: Network, path: Path) -> Path:
    frame = pd.DataFrame({"edge_id": list(network.measured_edges), "count": np.asarray(counts, dtype=float)})
    return _write_frame(frame, path)


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path
