import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import List, Optional

import config
from cli.controller import ExperimentRunner
from cli.presets import preset_names
from models.enums import ExperimentName, RunStatus
from models.exceptions import ConfigurationException

SUBCOMMANDS = [name.value for name in ExperimentName] + ['all']

# Standard formatter for logging calls
formatter = logging.Formatter('%(asctime)s [%(filename)s:%(lineno)s - %(funcName)s() ] - %(levelname)s : %(message)s')


def setup_logging(level: str = config.logging_level):
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in list(root.handlers):
        root.removeHandler(handler)

    try:
        log_dir = os.path.dirname(config.logging_path)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        file_handler = RotatingFileHandler(
            filename=config.logging_path
            , maxBytes=config.logging_file_size
            , backupCount=config.logging_backup_count
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
    except Exception as logex:
        print(f"Error while setting logging file handler: {logex}", file=sys.stderr)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    stream_handler.setLevel(logging.WARNING)
    root.addHandler(stream_handler)
    # Conditioning, transient and confinement warnings go through the same handlers
    logging.captureWarnings(True)


def parse_h_list(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--h expects a comma separated list of numbers, got '{text}'")
    if not values:
        raise argparse.ArgumentTypeError("--h needs at least one value")
    return sorted(values, reverse=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bgk-spectra",
        description="Semiclassical spectral experiments for the BGK kinetic operator.",
    )
    parser.add_argument("command", choices=SUBCOMMANDS, help="Experiment to run, or 'all'")
    parser.add_argument("--config", type=str, default=None, help="JSON experiment configuration")
    parser.add_argument("--out", type=str, default=None, help="Output directory (overrides the config)")
    parser.add_argument("--seed", type=int, default=None, help="Arnoldi start-vector seed")
    parser.add_argument("--h", type=parse_h_list, default=None, help="Comma separated h values, e.g. 0.2,0.1")
    parser.add_argument("--preset", type=str, default=None, choices=preset_names(), help="Named preset")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    logging.info(f'Application Started - command={args.command}')

    experiments = None if args.command == 'all' else [args.command]
    try:
        if args.config is None and args.preset is None:
            raise ConfigurationException({'command': args.command}, "Either --config or --preset is required")
        experiment_config = ExperimentRunner.load_config(
            path=args.config, preset=args.preset, experiments=experiments,
            overrides={'h_values': args.h, 'arnoldi_seed': args.seed, 'output_dir': args.out})
    except ConfigurationException as e:
        logging.error(f"APPLICATION: Configuration error - {e.message}")
        print(f"configuration error: {e.message}", file=sys.stderr)
        return RunStatus.config_error.value[0]

    status = ExperimentRunner(experiment_config).run()
    print(f"{status.value[1]}: reports in {experiment_config.output_dir}")
    return status.value[0]


if __name__ == "__main__":
    sys.exit(main())
