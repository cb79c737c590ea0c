"""
Export of training histories as CSV tables and static SVG curves.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import csv
import typing

import matplotlib
import matplotlib.figure

import tifinaghocr.errors
import tifinaghocr.training

CSV_COLUMNS = [
    'epoch',
    'train_loss',
    'train_top1',
    'test_loss',
    'test_top1',
    'train_top5',
    'test_top5'
]
FIGURE_SIZE = (10, 4)
SVG_SETTINGS = {'svg.hashsalt': 'tifinaghocr', 'svg.fonttype': 'path'}


def check_nonempty(history: tifinaghocr.training.History):
    """Require at least one record before exporting."""
    if history.is_empty():
        raise tifinaghocr.errors.ConfigError('Cannot export an empty history.')


def serialize_record(record: tifinaghocr.training.EpochRecord) -> typing.List[str]:
    """Convert a record to CSV fields, writing floats at full precision."""
    train = record.get_train()
    test = record.get_test()
    return [
        str(record.get_epoch()),
        repr(train.get_loss()),
        repr(train.get_top1()),
        repr(test.get_loss()),
        repr(test.get_top1()),
        repr(train.get_top5()),
        repr(test.get_top5())
    ]


def export_history_csv(history: tifinaghocr.training.History, path: str):
    """Write a history as a CSV table with one row per recorded epoch.

    Args:
        history: Nonempty history.
        path: Location of the CSV file.
    """
    check_nonempty(history)

    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        writer.writerows(map(serialize_record, history.get_records()))


def parse_row(row: typing.Dict[str, str], line: int) -> tifinaghocr.training.EpochRecord:
    """Parse one CSV row into an epoch record."""
    try:
        return tifinaghocr.training.EpochRecord(
            int(row['epoch']),
            tifinaghocr.training.Metrics(
                float(row['train_loss']),
                float(row['train_top1']),
                float(row['train_top5'])
            ),
            tifinaghocr.training.Metrics(
                float(row['test_loss']),
                float(row['test_top1']),
                float(row['test_top5'])
            )
        )
    except (TypeError, ValueError, tifinaghocr.errors.InternalConsistencyError) as e:
        raise tifinaghocr.errors.FormatError('Invalid history row on line %d (%s)' % (
            line,
            str(e)
        ))


def read_history_csv(path: str) -> tifinaghocr.training.History:
    """Read a history written by export_history_csv.

    Args:
        path: Location of the CSV file.

    Returns:
        History with exactly the exported values.

    Raises:
        FormatError: Raised if the header or a row cannot be parsed.
    """
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_COLUMNS:
            raise tifinaghocr.errors.FormatError(
                'Unexpected history header %s' % reader.fieldnames,
                0
            )

        records = [parse_row(row, index + 2) for index, row in enumerate(reader)]

    return tifinaghocr.training.History(records)


def build_curves_figure(history: tifinaghocr.training.History) -> matplotlib.figure.Figure:
    """Draw loss and accuracy curves side by side.

    Args:
        history: Nonempty history.

    Returns:
        Figure with a loss panel and an accuracy panel, each with train and test series.
    """
    records = history.get_records()
    epochs = [x.get_epoch() for x in records]

    def get_series(getter: typing.Callable[[tifinaghocr.training.EpochRecord], float]):
        return [getter(x) for x in records]

    figure = matplotlib.figure.Figure(figsize=FIGURE_SIZE)
    loss_axis, accuracy_axis = figure.subplots(1, 2)

    loss_axis.plot(epochs, get_series(lambda x: x.get_train().get_loss()), label='train')
    loss_axis.plot(epochs, get_series(lambda x: x.get_test().get_loss()), label='test')
    loss_axis.set_title('Loss')
    loss_axis.set_xlabel('epoch')
    loss_axis.set_ylabel('cross-entropy')
    loss_axis.legend()

    accuracy_axis.plot(epochs, get_series(lambda x: x.get_train().get_top1()),
        label='train top-1')
    accuracy_axis.plot(epochs, get_series(lambda x: x.get_test().get_top1()),
        label='test top-1')
    accuracy_axis.plot(epochs, get_series(lambda x: x.get_train().get_top5()),
        label='train top-5', linestyle='--')
    accuracy_axis.plot(epochs, get_series(lambda x: x.get_test().get_top5()),
        label='test top-5', linestyle='--')
    accuracy_axis.set_title('Accuracy')
    accuracy_axis.set_xlabel('epoch')
    accuracy_axis.set_ylabel('share correct')
    accuracy_axis.set_ylim(0, 1.05)
    accuracy_axis.legend()

    figure.tight_layout()
    return figure


def render_curves_svg(history: tifinaghocr.training.History, path: str):
    """Render loss and accuracy curves to a static SVG file.

    Output is byte-for-byte reproducible for the same history.

    Args:
        history: Nonempty history.
        path: Location of the SVG file.
    """
    check_nonempty(history)

    with matplotlib.rc_context(SVG_SETTINGS):
        figure = build_curves_figure(history)
        figure.savefig(path, format='svg', metadata={'Date': None})
