"""Persistence: bit-exact model files, the append-only experiment store, and
linked-run manifests.

Model weights are stored as base64-wrapped little-endian IEEE-754 doubles
inside a canonical JSON document, so save -> load -> save reproduces the
file byte for byte.  Decimal text would risk last-bit drift, which would
break the memory-less tournament's "advances with identical networks"
guarantee.  Every file carries a content hash over its canonical payload;
the hash doubles as the model id that experiment records and manifests
reference.

The experiment store is an append-only JSONL file per directory: one row
per recorded run with the full spec snapshot, per-game outcomes, and the
aggregates, hashed for the determinism audit (equal spec hashes must yield
equal aggregate hashes).
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .game import Color, GameConfig
from .model import ValueNetwork, feature_dim
from .runner import GameRecord

FORMAT_VERSION = 1


class StoreError(RuntimeError):
    pass


class IntegrityError(StoreError):
    """A file failed its hash, version, or dimension checks."""


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _encode_array(arr) -> str:
    return base64.b64encode(np.asarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _decode_array(text: str, shape) -> np.ndarray:
    raw = base64.b64decode(text.encode("ascii"))
    return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()


def model_payload(
    net: ValueNetwork,
    config: GameConfig,
    parents: tuple = (),
    sessions: tuple = (),
) -> dict:
    """The hashable document for one network (hash field excluded)."""
    return {
        "format_version": FORMAT_VERSION,
        "config": {
            "n": config.n,
            "a": config.a,
            "beta": config.beta,
            "max_plies": config.max_plies,
        },
        "color": net.color.name.lower(),
        "dims": {"input": net.input_dim, "hidden": net.hidden_dim, "output": 1},
        "games_trained": net.games_trained,
        "lineage": {"parents": list(parents), "sessions": list(sessions)},
        "weights": {
            "w_ih": _encode_array(net.w_ih),
            "b_h": _encode_array(net.b_h),
            "w_ho": _encode_array(net.w_ho),
            "b_o": _encode_array([net.b_o]),
        },
    }


def model_id(net: ValueNetwork, config: GameConfig) -> str:
    """Content hash of the network itself (lineage excluded), so identical
    weights always map to one id."""
    payload = model_payload(net, config)
    payload.pop("lineage")
    payload.pop("games_trained")
    return hashlib.sha256(_canonical(payload)).hexdigest()


@dataclass
class LoadedModel:
    net: ValueNetwork
    config: GameConfig
    id: str
    games_trained: int
    lineage: dict


def save_model(
    net: ValueNetwork,
    config: GameConfig,
    path: str,
    parents: tuple = (),
    sessions: tuple = (),
) -> str:
    """Write the network to ``path`` and return its model id."""
    payload = model_payload(net, config, parents, sessions)
    payload["content_hash"] = hashlib.sha256(_canonical(payload)).hexdigest()
    payload["model_id"] = model_id(net, config)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    return payload["model_id"]


def load_model(path: str) -> LoadedModel:
    """Read a model file back, verifying version, hash, and dimensions."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise IntegrityError(f"unknown model format version {version!r}")
    stored_hash = payload.pop("content_hash", None)
    stored_id = payload.pop("model_id", None)
    actual = hashlib.sha256(_canonical(payload)).hexdigest()
    if stored_hash != actual:
        raise IntegrityError(f"content hash mismatch in {path}")
    config = GameConfig(**payload["config"])
    dims = payload["dims"]
    expected = feature_dim(config)
    if dims["input"] != expected or dims["hidden"] != expected // 2:
        raise IntegrityError(
            f"dims {dims} do not match the declared board configuration"
        )
    color = Color.WHITE if payload["color"] == "white" else Color.BLACK
    weights = payload["weights"]
    net = ValueNetwork(
        color=color,
        input_dim=dims["input"],
        hidden_dim=dims["hidden"],
        w_ih=_decode_array(weights["w_ih"], (dims["hidden"], dims["input"])),
        b_h=_decode_array(weights["b_h"], (dims["hidden"],)),
        w_ho=_decode_array(weights["w_ho"], (dims["hidden"],)),
        b_o=float(_decode_array(weights["b_o"], (1,))[0]),
        games_trained=payload["games_trained"],
    )
    if stored_id != model_id(net, config):
        raise IntegrityError(f"model id mismatch in {path}")
    return LoadedModel(
        net=net,
        config=config,
        id=stored_id,
        games_trained=payload["games_trained"],
        lineage=payload["lineage"],
    )


# --- experiment store --------------------------------------------------------


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def spec_hash(spec: dict) -> str:
    return hashlib.sha256(_canonical(spec)).hexdigest()


@dataclass
class ExperimentRecord:
    """One recorded run: full spec snapshot, per-game rows, aggregates."""

    run_id: str
    stage: str  # e.g. selfplay | tutor | compare | tournament | hc-session
    spec: dict
    games: list  # per-game dicts (GameRecord.to_dict shape)
    aggregates: dict
    input_models: list = field(default_factory=list)
    output_models: list = field(default_factory=list)
    started_at: str = field(default_factory=_now)
    finished_at: str = field(default_factory=_now)

    @property
    def spec_hash(self) -> str:
        return spec_hash(self.spec)

    @property
    def aggregates_hash(self) -> str:
        return hashlib.sha256(_canonical(self.aggregates)).hexdigest()

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "stage": self.stage,
            "spec": self.spec,
            "spec_hash": self.spec_hash,
            "games": self.games,
            "aggregates": self.aggregates,
            "aggregates_hash": self.aggregates_hash,
            "input_models": self.input_models,
            "output_models": self.output_models,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        return cls(
            run_id=d["run_id"],
            stage=d["stage"],
            spec=d["spec"],
            games=d["games"],
            aggregates=d["aggregates"],
            input_models=d.get("input_models", []),
            output_models=d.get("output_models", []),
            started_at=d.get("started_at", ""),
            finished_at=d.get("finished_at", ""),
        )


class ExperimentStore:
    """Append-only, file-backed store of experiment records.

    One writer at a time per store; readers see every fully written row.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._path = os.path.join(root, "experiments.jsonl")
        self._lock = threading.Lock()

    def record(self, record: ExperimentRecord) -> str:
        """Append ``record``; a run id may only recur with an identical spec,
        and such re-runs are dropped as duplicates."""
        with self._lock:
            existing = self._by_run_id(record.run_id)
            if existing is not None:
                if existing.spec_hash != record.spec_hash:
                    raise StoreError(
                        f"run id {record.run_id!r} already recorded with a different spec"
                    )
                return record.run_id
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        return record.run_id

    def _iter_records(self):
        if not os.path.exists(self._path):
            return
        with open(self._path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield ExperimentRecord.from_dict(json.loads(line))

    def _by_run_id(self, run_id: str) -> Optional[ExperimentRecord]:
        for record in self._iter_records():
            if record.run_id == run_id:
                return record
        return None

    def query(
        self,
        run_id: Optional[str] = None,
        model_id: Optional[str] = None,
        stage: Optional[str] = None,
        since: Optional[str] = None,
        until: Optional[str] = None,
    ) -> list:
        """Records filtered by id, referenced model, stage, or date window."""
        out = []
        for record in self._iter_records():
            if run_id is not None and record.run_id != run_id:
                continue
            if stage is not None and record.stage != stage:
                continue
            if model_id is not None and (
                model_id not in record.input_models
                and model_id not in record.output_models
            ):
                continue
            if since is not None and record.finished_at < since:
                continue
            if until is not None and record.started_at > until:
                continue
            out.append(record)
        return out

    def model_ids(self) -> set:
        ids = set()
        for record in self._iter_records():
            ids.update(record.input_models)
            ids.update(record.output_models)
        return ids

    def validate_lineage(self, known_model_ids: set) -> list:
        """Model ids referenced by records but missing from ``known_model_ids``."""
        return sorted(self.model_ids() - set(known_model_ids))


# --- linked-run manifests ------------------------------------------------------


@dataclass
class ManifestStage:
    name: str
    kind: str  # selfplay | tutor | compare | tournament | hc-session
    params: dict = field(default_factory=dict)
    depends_on: list = field(default_factory=list)
    input_models: list = field(default_factory=list)
    output_models: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": self.params,
            "depends_on": self.depends_on,
            "input_models": self.input_models,
            "output_models": self.output_models,
        }


@dataclass
class RunManifest:
    """A pre-designed series of linked experiment stages with data-flow edges."""

    name: str
    stages: list

    def validate(self, known_model_ids: Optional[set] = None) -> None:
        """Reject duplicate or unknown stage names, dependency cycles, and
        (when a model registry is given) dangling model references."""
        names = [s.name for s in self.stages]
        if len(set(names)) != len(names):
            raise StoreError("duplicate stage names in manifest")
        by_name = {s.name: s for s in self.stages}
        for stage in self.stages:
            for dep in stage.depends_on:
                if dep not in by_name:
                    raise StoreError(f"stage {stage.name!r} depends on unknown {dep!r}")
        # cycle check by depth-first search
        WHITE_MARK, GRAY, BLACK_MARK = 0, 1, 2
        marks = {name: WHITE_MARK for name in names}

        def visit(name):
            if marks[name] == GRAY:
                raise StoreError(f"dependency cycle through stage {name!r}")
            if marks[name] == BLACK_MARK:
                return
            marks[name] = GRAY
            for dep in by_name[name].depends_on:
                visit(dep)
            marks[name] = BLACK_MARK

        for name in names:
            visit(name)
        if known_model_ids is not None:
            produced = set()
            for stage in self.stages:
                produced.update(stage.output_models)
            for stage in self.stages:
                for mid in stage.input_models:
                    if mid not in known_model_ids and mid not in produced:
                        raise StoreError(
                            f"stage {stage.name!r} references unknown model {mid!r}"
                        )

    def execution_order(self) -> list:
        """Stage names in a dependency-respecting order."""
        self.validate()
        by_name = {s.name: s for s in self.stages}
        done: list = []
        seen: set = set()

        def visit(name):
            if name in seen:
                return
            seen.add(name)
            for dep in by_name[name].depends_on:
                visit(dep)
            done.append(name)

        for stage in self.stages:
            visit(stage.name)
        return done

    def to_dict(self) -> dict:
        return {"name": self.name, "stages": [s.to_dict() for s in self.stages]}

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(
            name=d["name"],
            stages=[ManifestStage(**s) for s in d.get("stages", [])],
        )


def save_manifest(manifest: RunManifest, path: str) -> None:
    manifest.validate()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)


def load_manifest(path: str) -> RunManifest:
    with open(path, encoding="utf-8") as fh:
        manifest = RunManifest.from_dict(json.load(fh))
    manifest.validate()
    return manifest


# --- helpers shared by the CLI and service -----------------------------------


def records_to_dicts(records: list) -> list:
    return [r.to_dict() if isinstance(r, GameRecord) else dict(r) for r in records]


_PAIR_RE = re.compile(r"^(?P<name>.+)\.(?P<color>white|black)\.json$")


def find_player_pairs(directory: str) -> dict:
    """Map player name -> {"white": path, "black": path} for every complete
    <name>.white.json / <name>.black.json pair in ``directory``."""
    found: dict = {}
    for entry in sorted(os.listdir(directory)):
        m = _PAIR_RE.match(entry)
        if m:
            found.setdefault(m.group("name"), {})[m.group("color")] = os.path.join(
                directory, entry
            )
    return {name: pair for name, pair in found.items() if set(pair) == {"white", "black"}}
