import os
from typing import Any, Dict, List, Mapping, Optional

import yaml

from nctest.document import DocumentOptions, RawScalar
from nctest.fragment import NoiseEnum
from nctest.numerics import DEFAULT_TOLERANCE, ArithmeticEnum


DEFAULT_CONFIG_FILE: str = "config.yaml"
TOLERANCE_ENVIRONMENT_VARIABLE: str = "NCTEST_TOLERANCE"


class ConfigException(Exception):
    pass


class Config:
    # Defaults read from the YAML config file. Every field is optional.

    def __init__(
        self,
        *,
        tolerance: Optional[float] = None,
        arithmetic: Optional[ArithmeticEnum] = None,
        noise: Optional[NoiseEnum] = None,
        jobs: Optional[int] = None,
    ) -> None:
        self.tolerance = tolerance
        self.arithmetic = arithmetic
        self.noise = noise
        self.jobs = jobs

    def __repr__(self) -> str:
        return (
            f"Config(tolerance={self.tolerance!r}, arithmetic={self.arithmetic!r}, "
            f"noise={self.noise!r}, jobs={self.jobs!r})"
        )

    @staticmethod
    def from_yaml(yaml_file: str) -> "Config":
        with open(yaml_file, "r") as fp:
            try:
                data = yaml.safe_load(fp)
            except yaml.YAMLError as e:
                raise ConfigException(f"Invalid YAML file format for {yaml_file}, {e}!")

        if data is None:
            # Assume this is an empty file
            return Config()

        if not isinstance(data, dict):
            raise ConfigException(f"Invalid YAML file format for {yaml_file}, missing config entries!")

        unknown = sorted(str(key) for key in data if key not in {'tolerance', 'arithmetic', 'noise', 'jobs'})
        if unknown:
            raise ConfigException(f"Invalid YAML file format for {yaml_file}, unknown setting {unknown[0]}!")

        tolerance = data.get('tolerance')
        if tolerance is not None:
            try:
                tolerance = float(tolerance)
            except (TypeError, ValueError):
                raise ConfigException(f"Invalid YAML file format for {yaml_file}, tolerance {tolerance} is not a number!")
            if not (tolerance > 0):
                raise ConfigException(f"Invalid YAML file format for {yaml_file}, tolerance must be positive!")

        arithmetic = None
        if data.get('arithmetic') is not None:
            try:
                arithmetic = ArithmeticEnum(data['arithmetic'])
            except ValueError:
                raise ConfigException(
                    f"Invalid YAML file format for {yaml_file}, arithmetic {data['arithmetic']} is not exact or float!"
                )

        noise = None
        if data.get('noise') is not None:
            try:
                noise = NoiseEnum(data['noise'])
            except ValueError:
                raise ConfigException(
                    f"Invalid YAML file format for {yaml_file}, noise {data['noise']} is not depolarizing, dephasing or custom!"
                )

        jobs = data.get('jobs')
        if jobs is not None and (isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 1):
            raise ConfigException(f"Invalid YAML file format for {yaml_file}, jobs must be a positive integer!")

        return Config(tolerance=tolerance, arithmetic=arithmetic, noise=noise, jobs=jobs)

    @staticmethod
    def load(yaml_file: Optional[str] = None) -> "Config":
        # An explicitly named file must exist, the default one may not.
        if yaml_file is None:
            if not os.path.isfile(DEFAULT_CONFIG_FILE):
                return Config()
            yaml_file = DEFAULT_CONFIG_FILE
        elif not os.path.isfile(yaml_file):
            raise ConfigException(f"Config file {yaml_file} does not exist!")
        return Config.from_yaml(yaml_file)


def environment_tolerance(environ: Optional[Mapping[str, str]] = None) -> Optional[float]:
    value = (os.environ if environ is None else environ).get(TOLERANCE_ENVIRONMENT_VARIABLE)
    if value is None or not value.strip():
        return None
    try:
        tolerance = float(value)
    except ValueError:
        raise ConfigException(f"{TOLERANCE_ENVIRONMENT_VARIABLE} has invalid value \"{value}\"!")
    if not (tolerance > 0):
        raise ConfigException(f"{TOLERANCE_ENVIRONMENT_VARIABLE} must be positive, got {value}!")
    return tolerance


class RunOptions:
    # Fully resolved options for one document. arithmetic stays None when
    # nobody asked for a mode, so the input format can pick one.

    def __init__(
        self,
        *,
        arithmetic: Optional[ArithmeticEnum] = None,
        tolerance: float = DEFAULT_TOLERANCE,
        noise: NoiseEnum = NoiseEnum.NOISE_DEPOLARIZING,
        noise_matrix: Optional[List[List[RawScalar]]] = None,
        max_mixed: Optional[List[RawScalar]] = None,
        validate: bool = True,
        quiet: bool = False,
    ) -> None:
        self.arithmetic = arithmetic
        self.tolerance = tolerance
        self.noise = noise
        self.noise_matrix = noise_matrix
        self.max_mixed = max_mixed
        self.validate = validate
        self.quiet = quiet

    def __repr__(self) -> str:
        return (
            f"RunOptions(arithmetic={self.arithmetic!r}, tolerance={self.tolerance!r}, noise={self.noise!r})"
        )


def _first(*values: Any) -> Any:
    for value in values:
        if value is not None:
            return value
    return None


def resolve_options(
    flags: Dict[str, Any],
    document: DocumentOptions,
    config: Config,
    environ: Optional[Mapping[str, str]] = None,
) -> RunOptions:
    """
    Layer the option sources, highest precedence first: command-line flags,
    the document's own options, the NCTEST_TOLERANCE environment variable
    (tolerance only), the config file, then the built-in defaults. Flags
    that were not given must be absent or None in the flags dictionary.
    """
    tolerance = _first(
        flags.get('tolerance'),
        document.tolerance,
        environment_tolerance(environ),
        config.tolerance,
        DEFAULT_TOLERANCE,
    )
    if not (tolerance > 0):
        raise ConfigException(f"Tolerance must be positive, got {tolerance}!")

    return RunOptions(
        arithmetic=_first(flags.get('arithmetic'), document.arithmetic, config.arithmetic),
        tolerance=float(tolerance),
        noise=_first(flags.get('noise'), document.noise, config.noise, NoiseEnum.NOISE_DEPOLARIZING),
        noise_matrix=_first(flags.get('noise_matrix'), document.noise_matrix),
        max_mixed=flags.get('max_mixed'),
        validate=not flags.get('skip_validation', False),
        quiet=bool(flags.get('quiet', False)),
    )
