"""
CSV output and the on-disk result cache.

Every file starts with a ``#`` metadata block (library version, command,
effective config), then one header line, then the rows. Floats are written
with 17 significant digits so that reading a file back gives the exact
values; lines end with LF.
"""
import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from pathlib import Path

from django.conf import settings

from . import __version__

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float) or hasattr(value, 'dtype'):
        return FLOAT_FORMAT % float(value)
    return str(value)


def metadata_lines(command, config):
    lines = [f'# bogoscatter {__version__}', f'# command: {command}']
    lines += [f'# {key} = {format_value(config[key])}' for key in sorted(config)]
    return lines


def render_csv(header, rows, metadata=()):
    """The complete file content as a string."""
    buffer = io.StringIO()
    for line in metadata:
        buffer.write(line + '\n')
    writer = csv.writer(buffer, lineterminator='\n', quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def write_atomic(path, content):
    """Write ``content`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def remove_partial(path):
    if path and os.path.exists(path):
        os.unlink(path)
        logger.info("Removed partial output %s", path)


def read_rows(path):
    """Data rows of a file written by ``render_csv`` (metadata and header skipped)."""
    with open(path, encoding='utf-8', newline='') as handle:
        lines = [line for line in handle if not line.startswith('#')]
    reader = csv.reader(lines)
    next(reader, None)
    return list(reader)


class ResultCache:
    """
    One CSV file per tabulated curve, named by the SHA-256 of its config and
    the library version. Only the calling process writes.
    """

    def __init__(self, directory=None):
        self.directory = Path(directory or settings.BOGOSCATTER_CACHE_DIR)

    def key(self, payload):
        blob = json.dumps({'payload': payload, 'version': __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode('utf-8')).hexdigest()

    def path(self, key):
        return self.directory / f'{key}.csv'

    def load(self, key):
        path = self.path(key)
        if not path.exists():
            return None
        try:
            return [float(row[1]) for row in read_rows(path)]
        except (ValueError, IndexError) as exc:
            logger.warning("Ignoring unreadable cache file %s: %s", path, exc)
            return None

    def store(self, key, energies, values):
        content = render_csv(
            ['E', 'value'],
            zip(energies, values),
            [f'# bogoscatter {__version__}', f'# cache key: {key}'],
        )
        write_atomic(self.path(key), content)
        logger.info("Cached %d values as %s", len(values), self.path(key).name)
