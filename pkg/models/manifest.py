from dataclasses import asdict, dataclass, field
from typing import Dict


@dataclass
class RunManifest:
    """
    Everything needed to reproduce a solve: the resolved configuration with all
    defaults materialised, the hashes of the input files, the seed and the
    library version.
    """
    config: Dict[str, object]
    # role -> {"path": ..., "sha256": ...}
    inputs: Dict[str, Dict[str, str]] = field(default_factory=dict)
    seed: int = 0
    version: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        if not isinstance(data, dict) or "config" not in data:
            raise ValueError("manifest must be a mapping with a 'config' entry")
        return cls(
            config=dict(data["config"]),
            inputs=dict(data.get("inputs") or {}),
            seed=int(data.get("seed", 0)),
            version=str(data.get("version", "")),
        )
