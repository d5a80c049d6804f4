"""Active-IRS wireless powered network simulator."""

from ._irswpcn import (
    ConfigError,
    ModelError,
    channels,
    content_hash,
    csv_schema_version,
    default_config,
    solve,
    sweep,
    sweep_to_dir,
    version,
)

SCHEMES = ("ue_active", "ul_active", "static_active", "ue_passive", "static_passive")


def with_overrides(config, **sections):
    """Return `config` (INI text) with keys replaced, e.g.
    with_overrides(text, experiment={"num_realizations": 2})."""
    import configparser
    import io

    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_string(config)
    for section, values in sections.items():
        if not parser.has_section(section):
            parser.add_section(section)
        for key, value in values.items():
            if isinstance(value, (list, tuple)):
                value = ", ".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            parser.set(section, key, str(value))
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()


__all__ = [
    "ConfigError",
    "ModelError",
    "SCHEMES",
    "channels",
    "content_hash",
    "csv_schema_version",
    "default_config",
    "solve",
    "sweep",
    "sweep_to_dir",
    "version",
    "with_overrides",
]
