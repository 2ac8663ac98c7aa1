"""
Command-Line Entry Point

Batch front-end over the same services the HTTP routers use. Every
subcommand reads one JSON document (where it needs input), prints one JSON
report on stdout or to ``--out`` and exits with:

    0  the report's checks passed
    1  the input was rejected (``InputError`` family, invalid JSON or schema)
    2  a construction or verification failed (``ComputationError`` family,
       or a report with ``success`` false)

Logs go to stderr so stdout carries only JSON.

Usage:
    python cli.py check isometry.json --kind adjoint
    python cli.py extend instance.json --method paper
    python cli.py race tangent.json --t1 2.0 --trials 50 --seed 7
    python cli.py seq adjoint example_242_Ustar --horizon 100000
    python cli.py suite --quick
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from config import (
    AppSettings,
    SolverSettings,
    ToleranceSettings,
    get_app_settings,
    get_solver_settings,
    get_tolerance_settings,
)
from core.exceptions import AGeometryError, ComputationError, InputError
from core.logging import setup_logging
from core.serialization import load_json
from features.a_space.dependency import get_a_space_service
from features.a_space.schemas import DouglasRequest, OperatorRequest, ProjectorRequest
from features.a_space.services import ASpaceService
from features.geodesics.dependency import get_geodesic_service
from features.geodesics.schemas import CurveRequest, RaceRequest, TangentRequest
from features.geodesics.services import GeodesicService
from features.isometry_manifold.dependency import get_isometry_service
from features.isometry_manifold.schemas import ConjugatorRequest, IsometryRequest, SectionRequest
from features.isometry_manifold.services import IsometryManifoldService
from features.krein_extension.dependency import get_krein_service
from features.krein_extension.schemas import KreinRequest
from features.krein_extension.services import KreinExtensionService
from features.sequence_models.dependency import get_sequence_repository, get_sequence_service
from features.sequence_models.services import SequenceModelService
from features.suite.dependency import get_suite_service
from features.suite.services import AcceptanceSuiteService
from models import AOperator

logger = logging.getLogger(__name__)

QUICK_SCALE = 0.05

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2


class RunConfig(BaseModel):
    """One CLI invocation, validated from argv."""

    command: str
    action: Optional[str] = None
    input: Optional[Path] = None
    out: Optional[Path] = None

    tol: Optional[float] = Field(default=None, gt=0.0)
    seed: Optional[int] = None
    horizon: Optional[int] = Field(default=None, ge=8)
    trials: Optional[int] = Field(default=None, ge=0)
    log_level: Optional[str] = None

    kind: Literal["isometry", "adjoint", "symmetrizable", "wold"] = "isometry"
    power: Optional[int] = Field(default=None, ge=1)
    method: Optional[Literal["auto", "paper", "completion", "dykstra"]] = None
    m: Optional[float] = Field(default=None, ge=1.0)
    t1: Optional[float] = Field(default=None, ge=0.0)
    operator: Optional[str] = None
    space: Optional[str] = None
    K: int = Field(default=1_000_000, ge=1)
    scale: float = Field(default=1.0, gt=0.0)
    quick: bool = False
    only: Optional[List[str]] = None


class Services:
    """Feature services sharing one set of settings for the whole run."""

    def __init__(self, app: AppSettings, tolerances: ToleranceSettings, solver: SolverSettings):
        self.app = app
        self.a_space: ASpaceService = get_a_space_service(tolerances, solver)
        self.isometry: IsometryManifoldService = get_isometry_service(tolerances, solver, self.a_space)
        self.krein: KreinExtensionService = get_krein_service(tolerances, solver)
        self.geodesics: GeodesicService = get_geodesic_service(tolerances, solver, app, self.krein)
        self.sequence: SequenceModelService = get_sequence_service(get_sequence_repository(), app)
        self.suite: AcceptanceSuiteService = get_suite_service(
            tolerances, app, self.a_space, self.isometry, self.krein, self.geodesics, self.sequence
        )

    @classmethod
    def from_config(cls, config: RunConfig) -> "Services":
        overrides = {
            name: getattr(config, name)
            for name in ("seed", "horizon", "trials")
            if getattr(config, name) is not None
        }
        app = get_app_settings().model_copy(update=overrides)
        tolerances = get_tolerance_settings().override(config.tol)
        return cls(app, tolerances, get_solver_settings())


def _read(config: RunConfig, schema: type, **fallbacks: Any) -> Any:
    """Validate the input document; ``fallbacks`` fill keys the document lacks."""
    if config.input is None:
        raise InputError(f"{config.command} needs an input JSON file")
    document = load_json(config.input)
    if isinstance(document, dict):
        document = {**{k: v for k, v in fallbacks.items() if v is not None}, **document}
    try:
        return schema.model_validate(document)
    except ValidationError as e:
        raise InputError(
            f"{config.input} is not a valid {schema.__name__}",
            details={"errors": e.errors(include_url=False, include_context=False)},
        )


def _tangent(request: TangentRequest, service: GeodesicService):
    T = request.to_isometry()
    if request.H is not None:
        return service.tangent_from_hermitian(T, request.H.to_array())
    return service.make_tangent(T, request.V.to_array())


# Subcommand handlers


def run_check(config: RunConfig, services: Services) -> BaseModel:
    if config.kind == "symmetrizable":
        request = _read(config, OperatorRequest)
        report = services.a_space.operator_report(
            AOperator(request.form.to_form(), request.operator.to_array())
        )
        return report.model_copy(
            update={
                "success": report.a_symmetric,
                "message": "Operator is A-symmetric" if report.a_symmetric else "Operator is not A-symmetric",
            }
        )
    request = _read(config, IsometryRequest)
    _, T = request.to_models()
    if config.kind == "adjoint":
        return services.isometry.equivalence_report(T)
    if config.kind == "wold":
        return services.isometry.wold_report(T)
    return services.isometry.check_report(T, config.power or request.power)


def run_project(config: RunConfig, services: Services) -> BaseModel:
    request = _read(config, ProjectorRequest)
    return services.a_space.projector_report(request.form.to_form(), request.basis.to_array())


def run_douglas(config: RunConfig, services: Services) -> BaseModel:
    request = _read(config, DouglasRequest)
    return services.a_space.douglas_report(request.A.to_array(), request.B.to_array())


def run_section(config: RunConfig, services: Services) -> BaseModel:
    T0, T = _read(config, SectionRequest).to_models()
    return services.isometry.section_report(T0, T)


def run_conjugate(config: RunConfig, services: Services) -> BaseModel:
    T1, T2, H = _read(config, ConjugatorRequest).to_models()
    return services.isometry.conjugator_report(T1, T2, H)


def run_extend(config: RunConfig, services: Services) -> BaseModel:
    request = _read(config, KreinRequest)
    method = config.method or request.method
    m = config.m if config.m is not None else request.m
    return services.krein.extend_report(request.to_instance(), method, m)


def run_geodesic(config: RunConfig, services: Services) -> BaseModel:
    request = _read(config, CurveRequest)
    t1 = config.t1 if config.t1 is not None else request.t1
    return services.geodesics.curve_report(_tangent(request, services.geodesics), request.ts, t1)


def run_race(config: RunConfig, services: Services) -> BaseModel:
    request = _read(config, RaceRequest, t1=config.t1)
    t1 = config.t1 if config.t1 is not None else request.t1
    trials = config.trials if config.trials is not None else request.trials
    seed = config.seed if config.seed is not None else request.seed
    return services.geodesics.race(_tangent(request, services.geodesics), t1, trials, seed)


def run_seq(config: RunConfig, services: Services) -> BaseModel:
    sequence = services.sequence
    if config.action == "demo":
        return sequence.divergence_report(config.K)
    if not config.operator:
        raise InputError(f"seq {config.action} needs an operator name")
    if config.action == "wold":
        return sequence.wold_report(config.operator, config.horizon)
    return sequence.adjointability_report(config.operator, config.space, config.horizon)


def run_suite(config: RunConfig, services: Services) -> BaseModel:
    scale = QUICK_SCALE if config.quick else config.scale
    return services.suite.suite_report(config.seed, scale, config.only)


HANDLERS: Dict[str, Callable[[RunConfig, Services], BaseModel]] = {
    "check": run_check,
    "project": run_project,
    "douglas": run_douglas,
    "section": run_section,
    "conjugate": run_conjugate,
    "extend": run_extend,
    "geodesic": run_geodesic,
    "race": run_race,
    "seq": run_seq,
    "suite": run_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="Override the relative verification tolerances")
    common.add_argument("--seed", type=int, help="Base seed of random draws")
    common.add_argument("--horizon", type=int, help="Index horizon of sequence diagnostics")
    common.add_argument("--trials", type=int, help="Competitors per race")
    common.add_argument("--out", type=Path, help="Write the JSON report here instead of stdout")
    common.add_argument("--log-level", dest="log_level", help="Logging level (stderr)")

    with_input = argparse.ArgumentParser(add_help=False, parents=[common])
    with_input.add_argument("input", type=Path, help="Input JSON document")

    parser = argparse.ArgumentParser(
        prog="a-geom",
        description="Operator calculus and minimal curves for isometries of a weighted inner product.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[with_input], help="Isometry, adjointability or symmetry checks")
    check.add_argument(
        "--kind", choices=["isometry", "adjoint", "symmetrizable", "wold"], default="isometry"
    )
    check.add_argument("--power", type=int, help="Also verify the k-th power")

    commands.add_parser("project", parents=[with_input], help="Compatible projector onto a subspace")
    commands.add_parser("douglas", parents=[with_input], help="Solvability of AX = B")
    commands.add_parser("section", parents=[with_input], help="A-unitary G with G T0 = T")
    commands.add_parser("conjugate", parents=[with_input], help="A-unitary K with K T1 = T2")

    extend = commands.add_parser("extend", parents=[with_input], help="Norm-one symmetric extension")
    extend.add_argument("--method", choices=["auto", "paper", "completion", "dykstra"])
    extend.add_argument("--m", type=float, help="Scaling parameter of the explicit construction")

    geodesic = commands.add_parser("geodesic", parents=[with_input], help="Minimal curve with a given velocity")
    geodesic.add_argument("--t1", type=float, help="Also report the length on [0, t1]")

    race = commands.add_parser("race", parents=[with_input], help="Race the minimal curve against competitors")
    race.add_argument("--t1", type=float)

    seq = commands.add_parser("seq", help="Weighted sequence-space diagnostics")
    seq_actions = seq.add_subparsers(dest="action", required=True)
    for action, text in (("wold", "Wold split of a basis isometry"), ("adjoint", "Adjointability verdict")):
        sub = seq_actions.add_parser(action, parents=[common], help=text)
        sub.add_argument("operator", help="Built-in operator name")
        sub.add_argument("--space", help="Built-in space name (default: the operator's own)")
    demo = seq_actions.add_parser("demo", parents=[common], help="Divergent witness partial sums")
    demo.add_argument("--K", type=int, default=1_000_000)

    suite = commands.add_parser("suite", parents=[common], help="Run the acceptance suite")
    suite.add_argument("--scale", type=float, default=1.0, help="Multiplier of every trial count")
    suite.add_argument("--quick", action="store_true", help=f"Shorthand for --scale {QUICK_SCALE}")
    suite.add_argument("--only", nargs="+", help="Run only these items")
    return parser


def _emit(payload: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(payload + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(payload + "\n", encoding="utf-8")


def _error_payload(error: AGeometryError) -> str:
    return json.dumps({"error": error.to_dict()}, indent=2, default=str)


def run(config: RunConfig) -> int:
    """
    Execute one validated invocation.

    Args:
        config (RunConfig): Parsed command line.

    Returns:
        int: Process exit code.
    """
    try:
        services = Services.from_config(config)
        report = HANDLERS[config.command](config, services)
    except AGeometryError as e:
        logger.error(f"{config.command} failed with {e.code}: {e.message}")
        _emit(_error_payload(e), config.out)
        return e.exit_code
    except Exception as e:
        logger.error(f"{config.command} crashed, error: {str(e)}", exc_info=True)
        error = ComputationError(f"{config.command} failed: {e}")
        _emit(_error_payload(error), config.out)
        return error.exit_code

    _emit(report.model_dump_json(indent=2), config.out)
    if not getattr(report, "success", True):
        logger.warning(f"{config.command}: {report.message}")
        return EXIT_FAILED
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    settings = get_app_settings()
    setup_logging(
        log_level=args.log_level or settings.log_level,
        log_file=settings.log_file,
        stream=sys.stderr,
    )
    try:
        config = RunConfig.model_validate(vars(args))
    except ValidationError as e:
        error = InputError(
            "invalid command line", details={"errors": e.errors(include_url=False, include_context=False)}
        )
        _emit(_error_payload(error), getattr(args, "out", None))
        return EXIT_INPUT
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
