#! /usr/bin/env python3
import argparse
import enum
import json
import sys
import traceback
from typing import Any, Dict, List, Optional

from nctest.config import Config, ConfigException, RunOptions, resolve_options
from nctest.document import InputDocument, InputParseException, load_documents
from nctest.fixtures import FIXTURES
from nctest.fragment import FragmentException, NoiseEnum
from nctest.log import log
from nctest.numerics import ArithmeticEnum
from nctest.pipeline import StageEnum, run_batch
from nctest.quantum import QuantumException
from nctest.report import OutputReport


EXIT_SUCCESS = 0
EXIT_INTERNAL_ERROR = 1
EXIT_INVALID_INPUT = 2
EXIT_NONCLASSICAL = 3


class EnumAction(argparse.Action):
    """
    Argparse action for handling Enums
    """
    def __init__(self, **kwargs: Any):
        # Pop off the type value
        enum_type = kwargs.pop("type", None)

        # Ensure an Enum subclass is provided
        if enum_type is None:
            raise ValueError("type must be assigned an Enum when using EnumAction")
        if not issubclass(enum_type, enum.Enum):
            raise TypeError("type must be an Enum when using EnumAction")

        # Generate choices from the Enum
        kwargs.setdefault("choices", tuple(e.value for e in enum_type))

        super(EnumAction, self).__init__(**kwargs)

        self._enum = enum_type

    def __call__(self, parser: Any, namespace: Any, values: Any, option_string: Any = None) -> None:
        # Convert value back into an Enum
        value = self._enum(values)
        setattr(namespace, self.dest, value)


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--arithmetic",
        metavar="MODE",
        type=ArithmeticEnum,
        action=EnumAction,
        default=None,
        help="Arithmetic to compute in. Choose from 'exact' or 'float'. Defaults to exact for GPT input and float for quantum input.",
    )
    parser.add_argument(
        "--tolerance",
        metavar="EPS",
        type=float,
        default=None,
        help="Tolerance for every comparison against zero in float arithmetic. Defaults to 1e-9.",
    )
    parser.add_argument(
        "--noise",
        metavar="NOISE",
        type=NoiseEnum,
        action=EnumAction,
        default=None,
        help="Noise to compute robustness against. Choose from 'depolarizing', 'dephasing' (quantum input only) or 'custom'. Defaults to 'depolarizing'.",
    )
    parser.add_argument(
        "--noise-matrix",
        metavar="FILE",
        type=str,
        default=None,
        help="JSON file holding the noise channel as a list of rows in the fragment's coordinates. Required for custom noise.",
    )
    parser.add_argument(
        "--max-mixed",
        metavar="ROW",
        type=str,
        default=None,
        help="Maximally mixed state to use for depolarizing noise, as a JSON list or comma-separated numbers or \"p/q\" strings.",
    )
    parser.add_argument(
        "--output",
        metavar="FILE",
        type=str,
        default=None,
        help="Write the report to this file instead of stdout.",
    )
    parser.add_argument(
        "--quiet",
        action="store_true",
        help="Only output the verdict and robustness, and do not log stage progress.",
    )
    parser.add_argument(
        "--skip-validation",
        action="store_true",
        help="Do not check that quantum states and effects are valid operators.",
    )
    parser.add_argument(
        "--config",
        metavar="FILE",
        type=str,
        default=None,
        help="Configuration file. Defaults to config.yaml in the current directory if it exists.",
    )
    parser.add_argument(
        "--jobs",
        metavar="N",
        type=int,
        default=None,
        help="Number of processes to spread a batch of documents over. Defaults to 1.",
    )


def _parse_row(text: str, context: List[str]) -> List[Any]:
    text = text.strip()
    if text.startswith("["):
        try:
            row = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputParseException(f"Row is not valid JSON: {e.msg}!", context)
    else:
        row = [entry.strip() for entry in text.split(",") if entry.strip()]
    if not isinstance(row, list) or not row:
        raise InputParseException(f"Row \"{text}\" must be a non-empty list!", context)
    return row


def _load_noise_matrix(path: str) -> List[List[Any]]:
    with open(path, "r") as fp:
        try:
            matrix = json.load(fp)
        except json.JSONDecodeError as e:
            raise InputParseException(f"Noise matrix is not valid JSON: {e.msg}!", [path])
    if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix) or not matrix:
        raise InputParseException("Noise matrix must be a non-empty list of rows!", [path])
    return matrix


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r") as fp:
        return fp.read()


def _write_output(reports: List[OutputReport], batch: bool, quiet: bool, path: Optional[str]) -> None:
    jsondata: Any = [report.to_json(quiet=quiet) for report in reports]
    if not batch:
        jsondata = jsondata[0]
    data = json.dumps(jsondata, indent=2)
    if path is None:
        print(data)
    else:
        with open(path, "w") as fp:
            fp.write(data + "\n")


def _run(args: argparse.Namespace, docs: List[InputDocument], batch: bool, stage: StageEnum) -> int:
    config = Config.load(args.config)

    flags: Dict[str, Any] = {
        'arithmetic': args.arithmetic,
        'tolerance': args.tolerance,
        'noise': args.noise,
        'noise_matrix': _load_noise_matrix(args.noise_matrix) if args.noise_matrix is not None else None,
        'max_mixed': _parse_row(args.max_mixed, ['--max-mixed']) if args.max_mixed is not None else None,
        'skip_validation': args.skip_validation,
        'quiet': args.quiet,
    }
    options: List[RunOptions] = [resolve_options(flags, doc.options, config) for doc in docs]
    if stage != StageEnum.STAGE_CHECK:
        for i, opts in enumerate(options):
            if opts.noise == NoiseEnum.NOISE_CUSTOM and opts.noise_matrix is None:
                raise InputParseException(
                    "Custom noise requires --noise-matrix or a noise_matrix option!",
                    [str(i), 'options'] if batch else ['options'],
                )

    jobs = args.jobs if args.jobs is not None else (config.jobs or 1)
    reports = run_batch(docs, options, stage, jobs)
    _write_output(reports, batch, args.quiet, args.output)

    if stage == StageEnum.STAGE_CHECK and not all(report.classical for report in reports):
        return EXIT_NONCLASSICAL
    return EXIT_SUCCESS


def _fixtures(args: argparse.Namespace) -> int:
    if args.name is None:
        for name in FIXTURES:
            print(name)
        return EXIT_SUCCESS

    if args.name not in FIXTURES:
        log(f"Unknown fixture {args.name}, choose from {', '.join(FIXTURES)}!")
        return EXIT_INVALID_INPUT
    doc = FIXTURES[args.name]()

    if args.dump:
        print(str(doc))
        return EXIT_SUCCESS
    return _run(args, [doc], False, args.stage)


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="Decide whether a prepare-measure scenario admits of a classical explanation, and how much noise it takes to get one.",
    )
    subparsers = parser.add_subparsers(help='Action to take', dest='action')

    check_parser = subparsers.add_parser(
        'check',
        help='Decide classicality. Exits 0 when classical and 3 when not.',
        description='Decide classicality. Exits 0 when classical and 3 when not.',
    )
    robustness_parser = subparsers.add_parser(
        'robustness',
        help='Compute the minimal noise robustness and the ontological model at that noise.',
        description='Compute the minimal noise robustness and the ontological model at that noise.',
    )
    report_parser = subparsers.add_parser(
        'report',
        help='Run every stage and report every intermediate result.',
        description='Run every stage and report every intermediate result.',
    )
    for subparser in [check_parser, robustness_parser, report_parser]:
        subparser.add_argument(
            "input",
            metavar="INPUT",
            type=str,
            help="JSON input document, or a list of documents to run as a batch. Use - for stdin.",
        )
        _add_run_arguments(subparser)

    fixtures_parser = subparsers.add_parser(
        'fixtures',
        help='List, dump or run the built-in worked examples.',
        description='List, dump or run the built-in worked examples.',
    )
    fixtures_parser.add_argument(
        "name",
        metavar="NAME",
        type=str,
        nargs="?",
        default=None,
        help="Fixture to dump or run. Lists every fixture when omitted.",
    )
    fixtures_parser.add_argument(
        "--dump",
        action="store_true",
        help="Print the fixture's input document instead of running it.",
    )
    fixtures_parser.add_argument(
        "--stage",
        metavar="STAGE",
        type=StageEnum,
        action=EnumAction,
        default=StageEnum.STAGE_REPORT,
        help="Stage to run the fixture through. Choose from 'check', 'robustness' or 'report'. Defaults to 'report'.",
    )
    _add_run_arguments(fixtures_parser)

    args = parser.parse_args(argv)

    try:
        if args.action == "fixtures":
            return _fixtures(args)
        elif args.action in {"check", "robustness", "report"}:
            docs, batch = load_documents(_read_input(args.input))
            return _run(args, docs, batch, StageEnum(args.action))
        else:
            parser.print_help(sys.stderr)
            return EXIT_INVALID_INPUT
    except (InputParseException, QuantumException, FragmentException, ConfigException) as e:
        log(f"Invalid input: {e}")
        return EXIT_INVALID_INPUT
    except OSError as e:
        log(f"Could not read or write a file: {e}")
        return EXIT_INVALID_INPUT
    except Exception:
        log(traceback.format_exc())
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
