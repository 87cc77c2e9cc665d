import argparse
import sys

from .config import PRESETS, output_directory, parse_and_resolve
from .exceptions import NanosphereCSLError
from .main import EntanglementStudy

SUBCOMMANDS = ["rates", "model", "entanglement", "sweep", "reproduce", "scaling-check"]
DISCRIMINATOR_HELP = (
    "With --csl both the summary carries a discriminator verdict. Its window is the lowest "
    "sweep.window fraction of the points where both curves are entangled (not of the whole grid) "
    "and needs at least 3 such points; otherwise no verdict is given."
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-c', '--config', default=None,
                        help="YAML configuration file (nested sections, unit suffixes allowed)")
    common.add_argument('-o', '--output', default=None,
                        help="Output directory for sweep and reproduce files "
                             "(default: $NANOSPHERE_CSL_OUTPUT or output/)")
    common.add_argument('--format', choices=['csv', 'table'], default=None,
                        help="Emit CSV or a pretty table")
    common.add_argument('--set', action='append', default=[], metavar='SECTION.KEY=VALUE',
                        help="Override one config value, e.g. --set csl.rate='1e-9 Hz'")
    common.add_argument('--omega1', default=None,
                        help="Trap frequency of sphere 1 for single-point commands (e.g. 10kHz)")
    common.add_argument('--lambda', dest='csl_rate', default=None,
                        help="CSL collapse rate (s^-1, or with Hz suffix)")
    common.add_argument('--csl', choices=['on', 'off', 'both'], default=None,
                        help="Which CSL variant(s) to compute")
    common.add_argument('--quiet', action='store_true', help="No status lines or progress bar")
    common.add_argument('--workers', type=int, default=1, help="Worker processes for sweeps")
    common.add_argument('--seedless', action='store_true',
                        help="Accepted for scripting; the pipeline uses no random numbers")

    parser = argparse.ArgumentParser(
        prog="nanosphere-csl",
        description="Steady-state entanglement of two levitated nanospheres under CSL noise",
    )
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('rates', parents=[common], help="Noise budget per mode at one trap frequency")
    sub.add_parser('model', parents=[common], help="Drift and diffusion matrices, eigenvalues, stability")
    sub.add_parser('entanglement', parents=[common], help="Symplectic eigenvalue and E_N at one point")

    sweep = sub.add_parser('sweep', parents=[common], help="Sweep omega1, R or lambda",
                           description=DISCRIMINATOR_HELP)
    sweep.add_argument('--param', choices=['omega1', 'R', 'lambda'], default='omega1')
    sweep.add_argument('--min', dest='start', type=float, default=None)
    sweep.add_argument('--max', dest='stop', type=float, default=None)
    sweep.add_argument('--points', type=int, default=None)
    spacing = sweep.add_mutually_exclusive_group()
    spacing.add_argument('--log', dest='log', action='store_true', default=True, help="Log spacing (default)")
    spacing.add_argument('--linear', dest='log', action='store_false', help="Linear spacing")

    reproduce = sub.add_parser('reproduce', parents=[common], help="Run a figure preset",
                               description=DISCRIMINATOR_HELP)
    reproduce.add_argument('preset', choices=sorted(PRESETS) + ['all'])

    sub.add_parser('scaling-check', parents=[common], help="Fit the diffusion-rate scaling laws")
    return parser


def _flag_layers(args) -> list:
    layers = []
    if args.omega1 is not None:
        layers.append({"sweep": {"omega1": args.omega1}})
    if args.csl_rate is not None:
        layers.append({"csl": {"rate": args.csl_rate}})
    if args.format is not None:
        layers.append({"output": {"format": args.format}})
    return layers


def _study(args, preset=None) -> EntanglementStudy:
    manifest = parse_and_resolve(args.command, config_path=args.config, overrides=args.set,
                                 flag_layers=_flag_layers(args), preset=preset)
    return EntanglementStudy(
        manifest,
        output_directory(args.output, manifest.config),
        quiet=args.quiet,
        workers=args.workers,
        fmt=manifest.config["output"]["format"],
    )


def run(args) -> None:
    if args.command == "reproduce":
        presets = sorted(PRESETS) if args.preset == "all" else [args.preset]
        for preset in presets:
            _study(args, preset=preset).reproduce(preset)
        return

    study = _study(args)
    if args.command == "sweep":
        spec = study.build_sweep_spec(parameter=args.param, start=args.start, stop=args.stop,
                                      points=args.points, log=args.log, csl=args.csl or "both")
        result = study.run_sweep(spec)
        study.generate_reports(f"sweep_{args.param}", result, study.discriminate(result))
        return

    if args.command == "rates":
        data = study.rates()
    elif args.command == "model":
        data = study.model(csl_on=(args.csl or "on") != "off")
    elif args.command == "entanglement":
        data = study.entanglement(csl=args.csl or "both")
    else:
        data = study.scaling_check()
    sys.stdout.write(data.decode("utf-8"))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run(args)
    except NanosphereCSLError as e:
        print(f"\n❌ {args.command} failed: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        print(f"\n❌ {args.command} failed: {str(e)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
