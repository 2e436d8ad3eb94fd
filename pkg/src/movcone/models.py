"""Model files: JSON schema, canonical serialization, bundled models.

A model file records the intersection data and lattice maps of one threefold
model.  The top-level "convention" field must read "columns-are-images";
unknown fields are rejected so convention drift cannot pass silently.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .cones import C2Form, CYModel, LatticeMap, TriForm

CONVENTION = "columns-are-images"

_ALLOWED_KEYS = (
    "convention",
    "name",
    "tau1",
    "tau2",
    "sigma",
    "triform",
    "c2form",
    "ci",
    "ideal_files",
    "provenance",
)
_CI_KEYS = ("dims", "degrees")
_PROVENANCE_KEYS = ("triform", "c2form", "note")


class ModelParseError(ValueError):
    """Malformed model file."""


@dataclass
class ModelFile:
    name: str
    triform: tuple[int, int, int, int]
    c2form: tuple[int, int]
    tau1: tuple[int, int, int, int] | None = None
    tau2: tuple[int, int, int, int] | None = None
    sigma: tuple[int, int, int, int] | None = None
    ci: dict | None = None
    ideal_files: tuple[str, ...] | None = None
    provenance: dict | None = None
    path: Path | None = field(default=None, compare=False)

    def to_cymodel(self) -> CYModel:
        return CYModel(
            name=self.name,
            triform=TriForm(*self.triform),
            c2form=C2Form(*self.c2form),
            tau1=LatticeMap.from_flat(self.tau1) if self.tau1 else None,
            tau2=LatticeMap.from_flat(self.tau2) if self.tau2 else None,
            sigma_direct=LatticeMap.from_flat(self.sigma) if self.sigma else None,
        )

    def ideal_paths(self) -> list[Path]:
        if not self.ideal_files:
            return []
        base = self.path.parent if self.path else Path(".")
        return [base / name for name in self.ideal_files]

    def to_json(self) -> str:
        doc: dict = {"convention": CONVENTION, "name": self.name}
        if self.tau1 is not None:
            doc["tau1"] = list(self.tau1)
        if self.tau2 is not None:
            doc["tau2"] = list(self.tau2)
        if self.sigma is not None:
            doc["sigma"] = list(self.sigma)
        doc["triform"] = list(self.triform)
        doc["c2form"] = list(self.c2form)
        if self.ci is not None:
            doc["ci"] = {
                "dims": list(self.ci["dims"]),
                "degrees": [list(d) for d in self.ci["degrees"]],
            }
        if self.ideal_files is not None:
            doc["ideal_files"] = list(self.ideal_files)
        if self.provenance is not None:
            doc["provenance"] = {
                k: self.provenance[k] for k in _PROVENANCE_KEYS if k in self.provenance
            }
        text = json.dumps(doc, indent=2)
        # keep numeric lists on one line
        text = re.sub(
            r"\[\s+((?:-?\d+,\s+)*-?\d+)\s+\]",
            lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]",
            text,
        )
        return text + "\n"


def _int_quad(value, label: str) -> tuple[int, int, int, int]:
    if not isinstance(value, list) or len(value) != 4 or not all(isinstance(v, int) for v in value):
        raise ModelParseError(f"{label} must be a list of 4 integers, got {value!r}")
    return tuple(value)


def parse_model_text(text: str, path: Path | None = None) -> ModelFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelParseError("model file must contain a JSON object")
    unknown = set(doc) - set(_ALLOWED_KEYS)
    if unknown:
        raise ModelParseError(f"unknown fields {sorted(unknown)}")
    if doc.get("convention") != CONVENTION:
        raise ModelParseError(
            f'"convention" must equal "{CONVENTION}", got {doc.get("convention")!r}'
        )
    for key in ("name", "triform", "c2form"):
        if key not in doc:
            raise ModelParseError(f"missing required field {key!r}")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ModelParseError("name must be a non-empty string")

    tri = doc["triform"]
    if not isinstance(tri, list) or len(tri) != 4 or not all(isinstance(v, int) for v in tri):
        raise ModelParseError("triform must be a list of 4 integers")
    c2 = doc["c2form"]
    if not isinstance(c2, list) or len(c2) != 2 or not all(isinstance(v, int) for v in c2):
        raise ModelParseError("c2form must be a list of 2 integers")

    has_taus = "tau1" in doc or "tau2" in doc
    has_sigma = "sigma" in doc
    if has_taus and has_sigma:
        raise ModelParseError("give either tau1/tau2 or sigma, not both")
    if has_taus and ("tau1" not in doc or "tau2" not in doc):
        raise ModelParseError("tau1 and tau2 must be given together")
    if not has_taus and not has_sigma:
        raise ModelParseError("model must define tau1/tau2 or sigma")

    tau1 = _int_quad(doc["tau1"], "tau1") if has_taus else None
    tau2 = _int_quad(doc["tau2"], "tau2") if has_taus else None
    sigma = _int_quad(doc["sigma"], "sigma") if has_sigma else None

    ci = None
    if "ci" in doc:
        raw = doc["ci"]
        if not isinstance(raw, dict) or set(raw) != set(_CI_KEYS):
            raise ModelParseError('ci block must have exactly the keys "dims" and "degrees"')
        dims = raw["dims"]
        degrees = raw["degrees"]
        if not isinstance(dims, list) or not all(isinstance(v, int) for v in dims):
            raise ModelParseError("ci.dims must be a list of integers")
        if not isinstance(degrees, list) or not all(
            isinstance(d, list) and len(d) == len(dims) and all(isinstance(v, int) for v in d)
            for d in degrees
        ):
            raise ModelParseError("ci.degrees must be a list of multidegree lists")
        ci = {"dims": list(dims), "degrees": [list(d) for d in degrees]}

    ideal_files = None
    if "ideal_files" in doc:
        raw = doc["ideal_files"]
        if not isinstance(raw, list) or not all(isinstance(v, str) for v in raw) or not raw:
            raise ModelParseError("ideal_files must be a non-empty list of file names")
        ideal_files = tuple(raw)

    provenance = None
    if "provenance" in doc:
        raw = doc["provenance"]
        if not isinstance(raw, dict) or set(raw) - set(_PROVENANCE_KEYS):
            raise ModelParseError(f"provenance keys must be among {_PROVENANCE_KEYS}")
        provenance = dict(raw)

    return ModelFile(
        name=name,
        triform=tuple(tri),
        c2form=tuple(c2),
        tau1=tau1,
        tau2=tau2,
        sigma=sigma,
        ci=ci,
        ideal_files=ideal_files,
        provenance=provenance,
        path=path,
    )


def load_model(path) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelParseError(f"cannot read {path}: {exc}") from exc
    return parse_model_text(text, path)


def save_model(mf: ModelFile, path) -> None:
    Path(path).write_text(mf.to_json())


def data_dir() -> Path:
    return Path(__file__).parent / "data"


def bundled_model_path(name: str) -> Path:
    return data_dir() / f"{name}.model"


def list_bundled_models() -> list[str]:
    return sorted(p.stem for p in data_dir().glob("*.model"))
