""" The tests of the configuration schemas, files and corpus manifests """
# pylint: disable=unused-argument, wildcard-import, unused-wildcard-import

from rinq.config_schema import load_config_file, merge_config, parse_corpus_manifest, run_config_schema, validate_config

from .commons import *

CONFIG_FILE = Path(__file__).parent.parent / "config" / "rinq.yaml"


def test_defaults():
    """An empty configuration gets every default"""
    config = validate_config(run_config_schema, {})

    assert config[CONF_CUTOFF] == DEFAULT_CUTOFF_A
    assert config[CONF_MEASURE] == MEASURE_EIGENVECTOR
    assert config[CONF_FORMULATION] == FORMULATION_SIMPLE
    assert config[CONF_TERM_READING] == TERM_READING_PUBLISHED
    assert config[CONF_TAU] == DEFAULT_TAU
    assert config[CONF_P0] is None and config[CONF_P1] is None
    assert config[CONF_CHAIN] is None
    assert config[CONF_SCHEDULE] == {
        CONF_BETA_MIN: DEFAULT_BETA_MIN,
        CONF_BETA_MAX: DEFAULT_BETA_MAX,
        CONF_SWEEPS: DEFAULT_SWEEPS,
        CONF_READS: DEFAULT_READS,
        CONF_INTERPOLATION: INTERPOLATION_GEOMETRIC,
        CONF_SEED: DEFAULT_SEED,
        CONF_JOBS: DEFAULT_JOBS,
    }


def test_invalid_values():
    """Values outside their range are configuration errors"""
    for config in [
        {CONF_CUTOFF: -1},
        {CONF_MEASURE: "katz"},
        {CONF_TAU: 0},
        {CONF_P1: 0},
        {CONF_CHAIN: "AB"},
        {CONF_SCHEDULE: {CONF_SWEEPS: 0}},
        {CONF_SCHEDULE: {CONF_BETA_MIN: 4.0, CONF_BETA_MAX: 4.0}},
        {"unknown": 1},
    ]:
        with pytest.raises(ConfigurationError):
            validate_config(run_config_schema, config)


def test_merge_config_precedence():
    """Explicit values beat the file, None means not given, the schedule merges key by key"""
    file_config = {CONF_TAU: 3, CONF_CUTOFF: 7.0, CONF_SCHEDULE: {CONF_READS: 50, CONF_SEED: 1}}
    config = merge_config(file_config, {CONF_TAU: 4, CONF_CUTOFF: None, CONF_SCHEDULE: {CONF_SEED: 9, CONF_SWEEPS: None}})

    assert config[CONF_TAU] == 4
    assert config[CONF_CUTOFF] == 7.0
    assert config[CONF_SCHEDULE][CONF_READS] == 50
    assert config[CONF_SCHEDULE][CONF_SEED] == 9
    assert config[CONF_SCHEDULE][CONF_SWEEPS] == DEFAULT_SWEEPS


def test_load_config_file(tmp_path):
    """YAML files are read as mappings, anything else is a configuration error"""
    path = tmp_path / "run.yaml"
    path.write_text("tau: 3\nschedule:\n  reads: 100\n", encoding="utf-8")
    assert load_config_file(str(path)) == {CONF_TAU: 3, CONF_SCHEDULE: {CONF_READS: 100}}

    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert load_config_file(str(empty)) == {}

    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    broken = tmp_path / "broken.yaml"
    broken.write_text("tau: [3\n", encoding="utf-8")
    for bad in [listing, broken, tmp_path / "missing.yaml"]:
        with pytest.raises(ConfigurationError):
            load_config_file(str(bad))


def test_shipped_config_is_valid():
    """The example configuration validates"""
    config = merge_config(load_config_file(str(CONFIG_FILE)), {})
    assert config[CONF_MEASURE] in MEASURES


def test_parse_corpus_manifest():
    """One id per line with optional overrides, comments and blank lines skipped"""
    entries = parse_corpus_manifest("# corpus\n1xy1\n\n2MLT tau=3 chain=A  # melittin\n1UBQ measure=estrada cutoff=7.5\n")

    assert entries == [
        {CONF_SOURCE: "1XY1"},
        {CONF_SOURCE: "2MLT", CONF_TAU: 3, CONF_CHAIN: "A"},
        {CONF_SOURCE: "1UBQ", CONF_MEASURE: MEASURE_ESTRADA, CONF_CUTOFF: 7.5},
    ]


def test_parse_corpus_manifest_errors():
    """Bad identifiers, keys and values are reported with their line"""
    for text in ["ubiquitin\n", "1UBQ tau\n", "1UBQ reads=10\n", "1XY1\n1UBQ tau=zero\n"]:
        with pytest.raises(ConfigurationError) as error:
            parse_corpus_manifest(text)
        assert "line" in str(error.value)


def test_shipped_corpus_manifest():
    """The example corpus lists the twelve reference proteins"""
    text = (CONFIG_FILE.parent / "corpus.txt").read_text(encoding="utf-8")
    assert sorted(entry[CONF_SOURCE] for entry in parse_corpus_manifest(text)) == sorted(TOP5_COMPARISON)
