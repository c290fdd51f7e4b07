""" Reading of PDB structure files: parsing, C-alpha extraction and RCSB download with a local cache """

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AtomRecord:
    """One ATOM line of a PDB file"""

    name: str
    altloc: str
    res_name: str
    chain_id: str
    res_seq: int
    insertion_code: str
    position: tuple[float, float, float]
    occupancy: float
    line_number: int


@dataclass(frozen=True)
class StructureModel:
    """One MODEL of a structure. Atoms keep the file order"""

    pdb_id: str
    model_number: int
    atoms: tuple[AtomRecord, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class ResidueRecord:
    """A residue with its C-alpha position"""

    chain_id: str
    res_seq: int
    insertion_code: str
    res_name: str
    ca_position: tuple[float, float, float]

    @property
    def key(self) -> tuple[str, int, str]:
        """The sort and identity key of the residue"""
        return (self.chain_id, self.res_seq, self.insertion_code)

    @property
    def label(self) -> str:
        """The label of the residue, ie 'A:6:CYS'"""
        return residue_label(self.chain_id, self.res_seq, self.res_name, self.insertion_code)


def _parse_float(line: str, start: int, end: int, what: str, line_number: int) -> float:
    raw = line[start:end].strip()
    try:
        value = float(raw)
    except ValueError as err:
        raise PdbParseError(f"non numeric {what} field '{raw}'", line_number) from err
    if not math.isfinite(value):
        raise PdbParseError(f"non finite {what} field '{raw}'", line_number)
    return value


def _parse_atom(line: str, line_number: int) -> AtomRecord:
    """Fixed column readout of an ATOM record (0-based slices of the 1-based PDB columns)"""
    padded = line.rstrip("\r\n").ljust(80)
    raw_seq = padded[22:26].strip()
    try:
        res_seq = int(raw_seq)
    except ValueError as err:
        raise PdbParseError(f"non numeric residue sequence number '{raw_seq}'", line_number) from err

    position = (
        _parse_float(padded, 30, 38, "x", line_number),
        _parse_float(padded, 38, 46, "y", line_number),
        _parse_float(padded, 46, 54, "z", line_number),
    )
    occupancy = get_safe_float(padded[54:60].strip() or None)
    if occupancy is None:
        occupancy = 1.0

    return AtomRecord(
        name=padded[12:16].strip(),
        altloc=padded[16].strip(),
        res_name=padded[17:20].strip(),
        chain_id=padded[21].strip() or " ",
        res_seq=res_seq,
        insertion_code=padded[26].strip(),
        position=position,
        occupancy=occupancy,
        line_number=line_number,
    )


def parse_pdb(text: str, pdb_id: str | None = None) -> list[StructureModel]:
    """Parse PDB text into one StructureModel per MODEL record (a single model 1 when there is none).
    Only ATOM records are kept, HETATM and every other record type is skipped"""
    if not text or not text.strip():
        raise EmptyStructureError("the structure file is empty")

    header_id = None
    models: list[StructureModel] = []
    current_number: int | None = None
    current_atoms: list[AtomRecord] = []
    implicit_atoms: list[AtomRecord] = []
    atom_count = 0

    def close_model():
        models.append(StructureModel(pdb_id="", model_number=current_number, atoms=tuple(current_atoms)))

    for line_number, line in enumerate(text.splitlines(), start=1):
        record = line[0:6]
        if record == "HEADER" and len(line) >= 66:
            header_id = line[62:66].strip() or None
        elif record == "MODEL ":
            if current_number is not None:
                close_model()
            raw_number = line[10:14].strip()
            try:
                current_number = int(raw_number)
            except ValueError:
                current_number = len(models) + 1
            current_atoms = []
        elif record == "ENDMDL":
            if current_number is not None:
                close_model()
            current_number = None
            current_atoms = []
        elif record == "ATOM  ":
            atom = _parse_atom(line, line_number)
            atom_count += 1
            if current_number is None:
                implicit_atoms.append(atom)
            else:
                current_atoms.append(atom)

    if current_number is not None:
        close_model()

    if atom_count == 0:
        raise EmptyStructureError("the structure file holds no ATOM record")

    if not models:
        models = [StructureModel(pdb_id="", model_number=DEFAULT_MODEL, atoms=tuple(implicit_atoms))]

    resolved_id = (pdb_id or header_id or UNKNOWN_PDB_ID).upper()
    models = [StructureModel(pdb_id=resolved_id, model_number=model.model_number, atoms=model.atoms) for model in models]
    _LOGGER.info("Parsed structure %s: %d model(s), %d ATOM record(s)", resolved_id, len(models), atom_count)
    return models


def select_model(models: list[StructureModel], model_number: int = DEFAULT_MODEL) -> StructureModel:
    """Return the model with the given number"""
    for model in models:
        if model.model_number == model_number:
            return model
    raise UsageError(f"model {model_number} not found (available: {[m.model_number for m in models]})", stage=STAGE_INGEST)


def extract_ca(model: StructureModel, chain_filter: str | None = None) -> list[ResidueRecord]:
    """One ResidueRecord per residue having a CA atom, sorted by (chain, res_seq, insertion code).
    Among CA alternate locations the highest occupancy wins, the earliest in file order on ties"""
    best: dict[tuple[str, int, str], AtomRecord] = {}
    for atom in model.atoms:
        if atom.name != "CA":
            continue
        if chain_filter is not None and atom.chain_id != chain_filter:
            continue
        key = (atom.chain_id, atom.res_seq, atom.insertion_code)
        kept = best.get(key)
        if kept is None or atom.occupancy > kept.occupancy:
            best[key] = atom

    residues = [
        ResidueRecord(
            chain_id=atom.chain_id,
            res_seq=atom.res_seq,
            insertion_code=atom.insertion_code,
            res_name=atom.res_name,
            ca_position=atom.position,
        )
        for _, atom in sorted(best.items(), key=lambda item: item[0])
    ]
    if not residues:
        _LOGGER.warning("No CA atom found in model %d of %s (chain filter=%s)", model.model_number, model.pdb_id, chain_filter)
    else:
        _LOGGER.info("Extracted %d residue(s) from model %d of %s", len(residues), model.model_number, model.pdb_id)
    return residues


def resolve_cache_dir(cache_dir: str | os.PathLike | None = None) -> Path:
    """The cache directory: explicit value, then RINQ_CACHE_DIR, then the default"""
    return Path(cache_dir or os.environ.get(ENV_CACHE_DIR) or DEFAULT_CACHE_DIR).expanduser()


def resolve_mirror(mirror: str | None = None) -> str:
    """The download base URL: explicit value, then RINQ_PDB_MIRROR, then RCSB"""
    return (mirror or os.environ.get(ENV_PDB_MIRROR) or DEFAULT_PDB_MIRROR).rstrip("/")


def _write_atomically(path: Path, content: str):
    """create-then-rename so that concurrent readers never see a partial file"""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=path.parent, prefix=f".{path.stem}.", suffix=".part", delete=False) as tmp:
            tmp.write(content)
            tmp_name = tmp.name
        os.replace(tmp_name, path)
    except OSError as err:
        raise CacheIOError(f"cannot write {path}: {err}") from err


def fetch_pdb(
    pdb_id: str,
    cache_dir: str | os.PathLike | None = None,
    mirror: str | None = None,
    session: requests.Session | None = None,
    timeout: float = DEFAULT_HTTP_TIMEOUT_SEC,
) -> str:
    """Return the PDB text of pdb_id from the cache, downloading it on a cache miss"""
    pdb_id = normalize_pdb_id(pdb_id)
    path = resolve_cache_dir(cache_dir) / f"{pdb_id}.pdb"
    if path.is_file():
        _LOGGER.debug("Cache hit for %s at %s", pdb_id, path)
        return path.read_text(encoding="utf-8")

    url = f"{resolve_mirror(mirror)}/{pdb_id}.pdb"
    _LOGGER.info("Downloading %s from %s", pdb_id, url)
    http = session or requests
    try:
        response = http.get(url, timeout=timeout)
    except requests.RequestException as err:
        raise PdbFetchError(f"download of {pdb_id} from {url} failed: {err}") from err

    if response.status_code != 200:
        raise PdbFetchError(f"download of {pdb_id} from {url} failed", status=response.status_code)

    content = response.text
    _write_atomically(path, content)
    _LOGGER.info("Stored %s in %s", pdb_id, path)
    return content
