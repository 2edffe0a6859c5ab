"""Content-addressed artifact store.

A bundle is a named set of byte artifacts (model, contract IRs, dictionary,
rendered text, mode marker). Its key is the SHA-256 of a canonical
serialization, so identical content always maps to the same hash. The on-disk
layout is one file per artifact under <store>/<hash>/<artifact-name>.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


class NotFoundError(KeyError):
    pass


@dataclass
class ArtifactBundle:
    files: dict[str, bytes] = field(default_factory=dict)

    @classmethod
    def build(cls, bpmn_xml: bytes, contract_irs: list[bytes], dictionary: bytes,
              rendered_text: bytes, mode: str) -> "ArtifactBundle":
        files = {
            "model.bpmn": bpmn_xml,
            "dictionary.json": dictionary,
            "contracts.txt": rendered_text,
            "mode": mode.encode(),
        }
        for i, ir in enumerate(contract_irs):
            files[f"contract-{i:03d}.ir"] = ir
        return cls(files)

    @property
    def bpmn_xml(self) -> bytes:
        return self.files["model.bpmn"]

    @property
    def dictionary(self) -> bytes:
        return self.files["dictionary.json"]

    @property
    def rendered_text(self) -> bytes:
        return self.files["contracts.txt"]

    @property
    def mode(self) -> str:
        return self.files["mode"].decode()

    @property
    def contract_irs(self) -> list[bytes]:
        names = sorted(n for n in self.files if n.startswith("contract-") and n.endswith(".ir"))
        return [self.files[n] for n in names]

    def canonical_bytes(self) -> bytes:
        parts = []
        for name in sorted(self.files):
            data = self.files[name]
            parts.append(f"{name}\n{len(data)}\n".encode())
            parts.append(data)
            parts.append(b"\n")
        return b"".join(parts)

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()


class Repository:
    """Directory-backed store; pass root=None for a purely in-memory one."""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else None
        self._memory: dict[str, ArtifactBundle] = {}
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def put(self, bundle: ArtifactBundle) -> str:
        key = bundle.hash()
        if self.root is None:
            self._memory.setdefault(key, ArtifactBundle(dict(bundle.files)))
            return key
        target = self.root / key
        if not target.exists():
            staging = self.root / f".{key}.tmp"
            staging.mkdir(exist_ok=True)
            for name, data in bundle.files.items():
                (staging / name).write_bytes(data)
            staging.rename(target)
        return key

    def get(self, key: str) -> ArtifactBundle:
        if self.root is None:
            bundle = self._memory.get(key)
            if bundle is None:
                raise NotFoundError(key)
            return ArtifactBundle(dict(bundle.files))
        target = self.root / key
        if not target.is_dir():
            raise NotFoundError(key)
        files = {p.name: p.read_bytes() for p in sorted(target.iterdir())}
        return ArtifactBundle(files)

    def list(self) -> list[str]:
        if self.root is None:
            return sorted(self._memory)
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and not p.name.startswith("."))
