"""Content hashing and version strings"""
import hashlib
import json
import subprocess
from functools import lru_cache

from config import config


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(payload) -> str:
    """Short sha256 of the canonical JSON form of payload"""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[:16]


@lru_cache(maxsize=1)
def version_string() -> str:
    """git describe output when available, otherwise the release version"""
    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=config.BASE_DIR,
            capture_output=True,
            text=True,
            timeout=5,
        )
        described = result.stdout.strip()
        if result.returncode == 0 and described:
            return f"{config.APP_VERSION}+{described}"
    except (OSError, subprocess.SubprocessError):
        pass
    return config.APP_VERSION
