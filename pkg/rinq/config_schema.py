""" The voluptuous schemas of RinQ run configurations """

import voluptuous as vol
import yaml

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import

_LOGGER = logging.getLogger(__name__)


def _beta_range(value: dict) -> dict:
    """beta_min must stay strictly below beta_max"""
    if not 0 < value[CONF_BETA_MIN] < value[CONF_BETA_MAX]:
        raise vol.Invalid(f"expected 0 < beta_min < beta_max, got {value[CONF_BETA_MIN]} and {value[CONF_BETA_MAX]}")
    return value


def _chain_id(value) -> str | None:
    if value is None:
        return None
    value = str(value)
    if len(value) != 1:
        raise vol.Invalid(f"a chain identifier is a single character, got '{value}'")
    return value


schedule_schema = vol.Schema(
    vol.All(
        {
            vol.Optional(CONF_BETA_MIN, default=DEFAULT_BETA_MIN): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)),
            vol.Optional(CONF_BETA_MAX, default=DEFAULT_BETA_MAX): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)),
            vol.Optional(CONF_SWEEPS, default=DEFAULT_SWEEPS): vol.All(vol.Coerce(int), vol.Range(min=1)),
            vol.Optional(CONF_READS, default=DEFAULT_READS): vol.All(vol.Coerce(int), vol.Range(min=1)),
            vol.Optional(CONF_INTERPOLATION, default=DEFAULT_INTERPOLATION): vol.In(INTERPOLATIONS),
            vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(vol.Coerce(int), vol.Range(min=0, max=2**64 - 1)),
            vol.Optional(CONF_JOBS, default=DEFAULT_JOBS): vol.Coerce(int),
        },
        _beta_range,
    )
)

run_config_schema = vol.Schema(
    {
        vol.Optional(CONF_COMMAND): vol.In(COMMANDS),
        vol.Optional(CONF_SOURCE): str,
        vol.Optional(CONF_CHAIN, default=None): _chain_id,
        vol.Optional(CONF_MODEL, default=DEFAULT_MODEL): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_CUTOFF, default=DEFAULT_CUTOFF_A): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)),
        vol.Optional(CONF_MEASURE, default=MEASURE_EIGENVECTOR): vol.In(MEASURES),
        vol.Optional(CONF_FORMULATION, default=FORMULATION_SIMPLE): vol.In(FORMULATIONS),
        vol.Optional(CONF_TERM_READING, default=DEFAULT_TERM_READING): vol.In(TERM_READINGS),
        vol.Optional(CONF_TAU, default=DEFAULT_TAU): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_P0, default=None): vol.Any(None, vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))),
        vol.Optional(CONF_P1, default=None): vol.Any(None, vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))),
        vol.Optional(CONF_SCHEDULE, default={}): schedule_schema,
        vol.Optional(CONF_FORMAT, default=None): vol.Any(None, vol.In(OUTPUT_FORMATS)),
        vol.Optional(CONF_OUTPUT, default=None): vol.Any(None, str),
        vol.Optional(CONF_CACHE_DIR, default=None): vol.Any(None, str),
        vol.Optional(CONF_MIRROR, default=None): vol.Any(None, str),
        vol.Optional(CONF_TAU_SWEEP, default=False): bool,
        vol.Optional(CONF_NORMALIZE, default=False): bool,
        vol.Optional(CONF_MAX_CONCURRENCY, default=DEFAULT_MAX_CONCURRENCY): vol.All(vol.Coerce(int), vol.Range(min=1)),
    }
)

# The per protein overrides allowed on a corpus manifest line
corpus_line_schema = vol.Schema(
    {
        vol.Required(CONF_SOURCE): validate_pdb_id,
        vol.Optional(CONF_TAU): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_CHAIN): _chain_id,
        vol.Optional(CONF_MODEL): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_CUTOFF): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)),
        vol.Optional(CONF_MEASURE): vol.In(MEASURES),
        vol.Optional(CONF_FORMULATION): vol.In(FORMULATIONS),
        vol.Optional(CONF_SEED): vol.All(vol.Coerce(int), vol.Range(min=0)),
    }
)


def validate_config(schema: vol.Schema, data: dict) -> dict:
    """Validate data against schema, converting voluptuous errors to ConfigurationError"""
    try:
        return schema(data)
    except vol.Invalid as err:
        raise ConfigurationError(f"invalid configuration: {err}") from err


def load_config_file(path: str) -> dict:
    """Load a YAML run configuration. The result is not validated yet"""
    try:
        with open(path, encoding="utf-8") as file:
            data = yaml.safe_load(file)
    except OSError as err:
        raise ConfigurationError(f"cannot read configuration file {path}: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigurationError(f"configuration file {path} is not valid YAML: {err}") from err

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"configuration file {path} must hold a mapping")
    _LOGGER.debug("Configuration loaded from %s: %s", path, data)
    return data


def merge_config(defaults_file: dict, overrides: dict) -> dict:
    """File values override defaults, explicit overrides win over file values. The schedule block is merged key by key"""
    merged = dict(defaults_file)
    schedule = dict(merged.get(CONF_SCHEDULE) or {})
    for key, value in overrides.items():
        if value is None:
            continue
        if key == CONF_SCHEDULE:
            schedule.update({k: v for k, v in value.items() if v is not None})
        else:
            merged[key] = value
    merged[CONF_SCHEDULE] = schedule
    return validate_config(run_config_schema, merged)


def parse_corpus_manifest(text: str) -> list[dict]:
    """Parse a corpus manifest: one 'PDBID [key=value ...]' per line, '#' starts a comment"""
    entries = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        entry = {CONF_SOURCE: fields[0]}
        for field in fields[1:]:
            if "=" not in field:
                raise ConfigurationError(f"corpus manifest line {line_number}: expected key=value, got '{field}'")
            key, value = field.split("=", 1)
            entry[key.strip()] = value.strip()
        try:
            entries.append(corpus_line_schema(entry))
        except vol.Invalid as err:
            raise ConfigurationError(f"corpus manifest line {line_number}: {err}") from err
    return entries
