"""Dataset layout, problem manifests, and run configuration.

A corpus directory holds ``exemplars.json`` and ``problems/<name>/`` with
``problem.json``, a description, the reference design, and (after
``svloop mutate``) ``bc01.sv``.. mutant files plus a ``manifest.json``
recording operator, site, seed, and witness stimulus per mutant.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from . import __version__
from .errors import ManifestError
from .frontend.ast import DesignSource
from .frontend.elaborate import ElaboratedDesign, elaborate_source
from .frontend.signature import DesignSignature, ResetSpec, extract_signature
from .gateway.config import Exemplar, GenConfig, ProblemSpec
from .mutate import MutantRecord, SkippedOperator
from .sim.stimulus import UnitTest, parse_stimulus

CORPUS_MANIFEST = "manifest.json"
PROBLEM_MANIFEST = "problem.json"


@dataclass(frozen=True)
class ProblemManifest:
    id: str
    kind: str                        # combinational | sequential
    description_path: str
    reference_path: str
    exemplars_path: Optional[str]
    clock: Optional[str] = None
    reset: Optional[ResetSpec] = None


@dataclass
class Problem:
    manifest: ProblemManifest
    root: Path
    description: str
    reference: DesignSource
    design: ElaboratedDesign
    signature: DesignSignature
    exemplars: tuple[Exemplar, ...]

    @property
    def id(self) -> str:
        return self.manifest.id

    def spec(self) -> ProblemSpec:
        return ProblemSpec(self.description, self.signature, self.reference, self.exemplars)

    def mutants(self) -> list[tuple[str, DesignSource, UnitTest]]:
        """(bc id, source, witness) for every mutant recorded on disk."""
        manifest_file = self.root / CORPUS_MANIFEST
        if not manifest_file.exists():
            return []
        data = json.loads(manifest_file.read_text("utf-8"))
        out = []
        for record in data.get("records", []):
            text = (self.root / record["file"]).read_text("utf-8")
            source = DesignSource(text, f"mutant {record['bc_id']}")
            witness = parse_stimulus(record["witness"], self.signature, "witness")
            out.append((record["bc_id"], source, witness))
        return out


def default_corpus_root() -> Path:
    """The desk corpus shipped inside the package."""
    return Path(str(resources.files("svloop.data").joinpath("corpus")))


def copy_corpus(dest) -> Path:
    dest = Path(dest)
    if dest.exists() and any(dest.iterdir()):
        raise ManifestError(f"destination {dest} exists and is not empty")
    shutil.copytree(default_corpus_root(), dest, dirs_exist_ok=True)
    return dest


def _load_exemplars(path: Path) -> tuple[Exemplar, ...]:
    data = json.loads(path.read_text("utf-8"))
    return tuple(
        Exemplar(e["description"], e["signature_text"], e["unit_test_text"]) for e in data
    )


def load_problem(problem_dir) -> Problem:
    problem_dir = Path(problem_dir)
    manifest_file = problem_dir / PROBLEM_MANIFEST
    if not manifest_file.exists():
        raise ManifestError(f"missing {PROBLEM_MANIFEST} in {problem_dir}")
    raw = json.loads(manifest_file.read_text("utf-8"))
    reset = None
    if raw.get("reset"):
        r = raw["reset"]
        reset = ResetSpec(r["name"], bool(r.get("active_high", True)),
                          bool(r.get("synchronous", False)))
    manifest = ProblemManifest(
        id=raw["id"],
        kind=raw["kind"],
        description_path=raw["description"],
        reference_path=raw["reference"],
        exemplars_path=raw.get("exemplars"),
        clock=raw.get("clock"),
        reset=reset,
    )
    if manifest.kind not in ("combinational", "sequential"):
        raise ManifestError(f"{manifest.id}: kind must be combinational or sequential")

    description_file = problem_dir / manifest.description_path
    reference_file = problem_dir / manifest.reference_path
    for f in (description_file, reference_file):
        if not f.exists():
            raise ManifestError(f"{manifest.id}: referenced file {f} does not exist")
    description = description_file.read_text("utf-8")
    reference = DesignSource(reference_file.read_text("utf-8"), "reference")
    design = elaborate_source(reference)
    if design.is_sequential != (manifest.kind == "sequential"):
        raise ManifestError(
            f"{manifest.id}: kind {manifest.kind!r} is inconsistent with the design "
            f"({len(design.seq_processes)} clocked processes)"
        )
    signature = extract_signature(design, manifest.clock, manifest.reset)

    exemplars: tuple[Exemplar, ...] = ()
    if manifest.exemplars_path:
        exemplar_file = (problem_dir / manifest.exemplars_path).resolve()
        if not exemplar_file.exists():
            raise ManifestError(f"{manifest.id}: exemplar library {exemplar_file} missing")
        exemplars = _load_exemplars(exemplar_file)
    return Problem(manifest, problem_dir, description, reference, design, signature, exemplars)


def load_corpus(corpus_root) -> list[Problem]:
    """All problems under <root>/problems, sorted by id."""
    corpus_root = Path(corpus_root)
    problems_dir = corpus_root / "problems"
    if not problems_dir.is_dir():
        raise ManifestError(f"{corpus_root} has no problems/ directory")
    problems = []
    for sub in sorted(problems_dir.iterdir()):
        if sub.is_dir() and (sub / PROBLEM_MANIFEST).exists():
            problems.append(load_problem(sub))
    if not problems:
        raise ManifestError(f"no problems found under {problems_dir}")
    return problems


def write_mutation_corpus(
    problem: Problem,
    records: list[MutantRecord],
    skipped: list[SkippedOperator],
    seed: int,
) -> Path:
    """Write bcXX.sv files plus the corpus manifest; deterministic bytes."""
    for record in records:
        name = f"{record.bc_id.lower()}.sv"
        (problem.root / name).write_text(record.source.text, "utf-8")
    manifest = {
        "problem": problem.id,
        "seed": seed,
        "records": [
            dict(record.as_dict(), file=f"{record.bc_id.lower()}.sv") for record in records
        ],
        "skipped": [asdict(s) for s in skipped],
    }
    out = problem.root / CORPUS_MANIFEST
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return out


@dataclass(frozen=True)
class RunConfig:
    strategy: str = "nlsc"
    shots: int = 0
    provider: str = "mock"
    script_dir: Optional[str] = None
    seed: int = 1
    iteration_cap: int = 5
    mismatch_limit: int = 20
    jobs: int = 1
    version: str = field(default=__version__)

    def gen_config(self) -> GenConfig:
        return GenConfig(strategy=self.strategy, shots=self.shots)

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "shots": self.shots,
            "provider": self.provider,
            "script_dir": self.script_dir,
            "seed": self.seed,
            "iteration_cap": self.iteration_cap,
            "mismatch_limit": self.mismatch_limit,
            "jobs": self.jobs,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)
