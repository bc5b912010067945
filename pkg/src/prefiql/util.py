"""Small shared helpers: stable stage seeds and artifact digests."""
from __future__ import annotations

import hashlib
from pathlib import Path


def derive_seed(base_seed: int, name: str) -> int:
    """Derive a stable 63-bit stage seed from a run seed and a stage name.

    SHA-256 based so reruns and platforms agree; distinct names give
    independent streams.
    """
    digest = hashlib.sha256(f"{base_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_dir(path) -> str:
    """Digest of a directory tree: (relative name, file digest) pairs, sorted."""
    root = Path(path)
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode())
            h.update(bytes.fromhex(sha256_file(p)))
    return h.hexdigest()
