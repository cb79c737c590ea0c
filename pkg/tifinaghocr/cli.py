"""Command line entry point exposing the full recognition pipeline.

Subcommands synthesize or ingest corpora, normalize single images, train, evaluate, run inference
and re-render training curves. Exit codes are 0 on success, 2 for usage, format and configuration
problems and 3 for problems with the data itself.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import argparse
import logging
import os
import sys
import typing

import numpy

import tifinaghocr
import tifinaghocr.curves
import tifinaghocr.dataset_io
import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.glyph_model
import tifinaghocr.image_io
import tifinaghocr.labels
import tifinaghocr.model
import tifinaghocr.numeric
import tifinaghocr.preprocess
import tifinaghocr.run_config
import tifinaghocr.synth
import tifinaghocr.training

from tifinaghocr.errors import EXIT_USAGE
from tifinaghocr.typesdef import OPT_STR

IMAGES_FILE = 'images.idx3-ubyte'
LABELS_FILE = 'labels.idx1-ubyte'
WRITERS_FILE = 'writers.txt'
WEIGHTS_FILE = 'weights.bin'
HISTORY_FILE = 'history.csv'
CURVES_FILE = 'curves.svg'
RUN_CONFIG_FILE = 'run.cfg'

DEFAULT_WRITERS = 102
DEFAULT_TOPK = 5
LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'
PROGRAM = 'tifinaghocr'

ARGS = typing.List[str]

LOGGER = logging.getLogger(__name__)


def configure_logging(verbose: bool):
    """Send log records to stderr, at DEBUG if verbose and WARNING otherwise."""
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def make_parser(command: str, description: str) -> argparse.ArgumentParser:
    """Create the argument parser of a subcommand with the shared --verbose flag."""
    parser = argparse.ArgumentParser(prog='%s %s' % (PROGRAM, command), description=description)
    parser.add_argument('--verbose', action='store_true', help='Log progress to stderr.')
    return parser


def parse_args(parser: argparse.ArgumentParser, args: ARGS) -> argparse.Namespace:
    """Parse arguments and configure logging accordingly."""
    parsed = parser.parse_args(args)
    configure_logging(parsed.verbose)
    return parsed


def get_data_paths(directory: str) -> typing.Tuple[str, str, str]:
    """Get the images, labels and writer sidecar locations within a data directory."""
    return (
        os.path.join(directory, IMAGES_FILE),
        os.path.join(directory, LABELS_FILE),
        os.path.join(directory, WRITERS_FILE)
    )


def write_data_dir(corpus: tifinaghocr.dataset_model.Corpus, directory: str):
    """Write a corpus as IDX files plus writer sidecar, creating the directory if needed."""
    os.makedirs(directory, exist_ok=True)
    images_path, labels_path, writers_path = get_data_paths(directory)
    tifinaghocr.dataset_io.write_idx(corpus, images_path, labels_path)
    tifinaghocr.dataset_io.write_writer_sidecar(corpus, writers_path)


def read_data_dir(directory: str) -> tifinaghocr.dataset_model.Corpus:
    """Read a data directory, using the writer sidecar when present."""
    images_path, labels_path, writers_path = get_data_paths(directory)
    sidecar: OPT_STR = writers_path if os.path.exists(writers_path) else None
    if sidecar is None:
        LOGGER.warning('No %s in %s, assigning every example to writer 0.', WRITERS_FILE,
            directory)

    return tifinaghocr.dataset_io.read_idx(
        images_path,
        labels_path,
        tifinaghocr.labels.build_registry(),
        writers_path=sidecar
    )


def format_metrics(name: str, metrics: tifinaghocr.training.Metrics) -> str:
    """Format metrics as one human readable line."""
    return '%s loss=%.6f top1=%.4f top5=%.4f' % (
        name,
        metrics.get_loss(),
        metrics.get_top1(),
        metrics.get_top5()
    )


def synth_main(args: ARGS) -> int:
    """Generate a synthetic corpus and write it as a data directory."""
    parser = make_parser('synth', 'Generate a synthetic writer-structured corpus.')
    parser.add_argument('--writers', type=int, default=DEFAULT_WRITERS)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out', required=True, help='Output data directory.')
    parsed = parse_args(parser, args)

    corpus = tifinaghocr.synth.synth_corpus(
        parsed.writers,
        parsed.seed,
        tifinaghocr.labels.build_registry()
    )
    write_data_dir(corpus, parsed.out)

    print('%d examples' % corpus.get_size())
    return 0


def build_dataset_main(args: ARGS) -> int:
    """Ingest a directory of captured glyphs into a data directory."""
    parser = make_parser('build-dataset', 'Ingest root/<writer_id>/<label_index>.pgm files.')
    parser.add_argument('--in', dest='input', required=True, help='Ingestion directory.')
    parser.add_argument('--out', required=True, help='Output data directory.')
    parsed = parse_args(parser, args)

    corpus = tifinaghocr.dataset_io.load_image_dir(
        parsed.input,
        tifinaghocr.labels.build_registry()
    )
    write_data_dir(corpus, parsed.out)

    print('%d examples' % corpus.get_size())
    return 0


def load_glyph_file(path: str) -> tifinaghocr.glyph_model.Glyph28:
    """Read and normalize a single image file, attaching the path to a missing ink error."""
    raw = tifinaghocr.image_io.load_raw_glyph(path)
    try:
        return tifinaghocr.preprocess.preprocess_glyph(raw)
    except tifinaghocr.errors.NoForegroundError as e:
        raise tifinaghocr.errors.NoForegroundError(str(e), path=path)


def preprocess_main(args: ARGS) -> int:
    """Normalize one image into a 28x28 PGM."""
    parser = make_parser('preprocess', 'Normalize a single glyph image to 28x28.')
    parser.add_argument('--in', dest='input', required=True, help='PGM or PNG input.')
    parser.add_argument('--out', required=True, help='PGM output.')
    parsed = parse_args(parser, args)

    glyph = load_glyph_file(parsed.input)
    tifinaghocr.image_io.write_pgm(parsed.out, glyph.get_pixels())
    return 0


def train_main(args: ARGS) -> int:
    """Split a data directory by writer, train, and write the run artifacts."""
    parser = make_parser('train', 'Train the network on a data directory.')
    parser.add_argument('--data', required=True, help='Data directory.')
    parser.add_argument('--config', default=None, help='key=value run configuration.')
    parser.add_argument('--out', required=True, help='Output directory.')
    parsed = parse_args(parser, args)

    run_config = tifinaghocr.run_config.load_run_config(parsed.config)
    corpus = read_data_dir(parsed.data)

    result = tifinaghocr.Experiment().set_corpus(corpus).set_run_config(run_config).execute()

    os.makedirs(parsed.out, exist_ok=True)
    history = result.get_history()
    tifinaghocr.model.save_weights(result.get_model(), os.path.join(parsed.out, WEIGHTS_FILE))
    tifinaghocr.curves.export_history_csv(history, os.path.join(parsed.out, HISTORY_FILE))
    tifinaghocr.curves.render_curves_svg(history, os.path.join(parsed.out, CURVES_FILE))
    tifinaghocr.run_config.save_run_config(run_config, os.path.join(parsed.out, RUN_CONFIG_FILE))

    final = history.get_final()
    print(format_metrics('train', final.get_train()))
    print(format_metrics('test', final.get_test()))
    return 0


def load_model_for(weights_path: str, config_path: OPT_STR) -> tifinaghocr.model.Model:
    """Load weights against the network configuration of an optional run configuration."""
    run_config = tifinaghocr.run_config.load_run_config(config_path)
    return tifinaghocr.model.load_weights(weights_path, run_config.get_cnn_config())


def eval_main(args: ARGS) -> int:
    """Report loss and top-k accuracy of saved weights on a data directory."""
    parser = make_parser('eval', 'Evaluate saved weights on a data directory.')
    parser.add_argument('--data', required=True, help='Data directory.')
    parser.add_argument('--weights', required=True, help='Weights file.')
    parser.add_argument('--config', default=None, help='Run configuration used for training.')
    parsed = parse_args(parser, args)

    model = load_model_for(parsed.weights, parsed.config)
    corpus = read_data_dir(parsed.data)
    metrics = tifinaghocr.training.evaluate(model, corpus)

    print(format_metrics('eval', metrics))
    return 0


def infer_main(args: ARGS) -> int:
    """Print the K most likely letters for one image."""
    parser = make_parser('infer', 'Classify a single glyph image.')
    parser.add_argument('--weights', required=True, help='Weights file.')
    parser.add_argument('--image', required=True, help='PGM or PNG input.')
    parser.add_argument('--topk', type=int, default=DEFAULT_TOPK)
    parser.add_argument('--config', default=None, help='Run configuration used for training.')
    parsed = parse_args(parser, args)

    model = load_model_for(parsed.weights, parsed.config)
    glyph = load_glyph_file(parsed.image)

    logits = model.forward(glyph.to_tensor(model.get_dtype())[None, :, :, :])
    probabilities = tifinaghocr.numeric.softmax(logits.astype(numpy.float64))[0]
    top = tifinaghocr.model.predict_topk(logits, parsed.topk)[0]

    registry = tifinaghocr.labels.build_registry()
    for index in top:
        print('%d\t%s\t%.6f' % (index, registry.get_name(int(index)), probabilities[index]))

    return 0


def curves_main(args: ARGS) -> int:
    """Render the SVG curves of an exported history."""
    parser = make_parser('curves', 'Render loss and accuracy curves from a history CSV.')
    parser.add_argument('--history', required=True, help='History CSV.')
    parser.add_argument('--out', required=True, help='SVG output.')
    parsed = parse_args(parser, args)

    history = tifinaghocr.curves.read_history_csv(parsed.history)
    tifinaghocr.curves.render_curves_svg(history, parsed.out)
    return 0


COMMANDS: typing.Dict[str, typing.Callable[[ARGS], int]] = {
    'synth': synth_main,
    'build-dataset': build_dataset_main,
    'preprocess': preprocess_main,
    'train': train_main,
    'eval': eval_main,
    'infer': infer_main,
    'curves': curves_main
}

USAGE_STR = '%s [%s] [options]' % (PROGRAM, ' | '.join(COMMANDS.keys()))


def run(argv: ARGS) -> int:
    """Dispatch to a subcommand.

    Args:
        argv: Arguments after the program name.

    Returns:
        Process exit code.
    """
    if len(argv) < 1 or argv[0] not in COMMANDS:
        print(USAGE_STR, file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[argv[0]](argv[1:])
    except tifinaghocr.errors.TifinaghError as e:
        print('error: %s' % str(e), file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print('error: %s' % str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE


def main(argv: typing.Optional[ARGS] = None) -> int:
    """Run the command line tool.

    Args:
        argv: Arguments after the program name. If None, taken from sys.argv.

    Returns:
        Process exit code.
    """
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == '__main__':
    sys.exit(main())
