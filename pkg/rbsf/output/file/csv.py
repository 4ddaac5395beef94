# -*- coding: utf-8 -*-
""" CSV file writer module """

import csv
import math
import sys
from typing import Any, Iterable, Sequence

PRECISION = '%.12g'


def format_value(value: Any) -> str:
    """
    format_value - render one CSV cell. Floats use 12 significant digits,
    None becomes an empty cell

    :param value:
    :return:
    """
    if value is None:
        return ''
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, float):
        if math.isnan(value):
            return ''
        return PRECISION % value
    if hasattr(value, 'item'):
        # numpy scalar
        return format_value(value.item())
    return str(value)


class CSVFileWriter:
    """
    CSVFileWriter - CSV file writer. Header row is mandatory, '-' writes to stdout
    """

    def __init__(self, dst='-'):
        self.logger = None
        self.dst = dst

    def set_logger(self, logger) -> None:
        """
        set_logger - set up logger

        :param logger:
        :return:
        """
        self.logger = logger

    def write(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
        """
        write - write header and rows, return number of data rows written

        :param header:
        :param rows:
        :return:
        """
        if self.dst in (None, '-'):
            return self._write(sys.stdout, header, rows)
        with open(self.dst, 'w', encoding='utf-8', newline='') as csv_file:
            count = self._write(csv_file, header, rows)
        if self.logger is not None:
            self.logger.info(f'Wrote {count} rows to {self.dst}')
        return count

    @staticmethod
    def _write(stream, header, rows) -> int:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([format_value(value) for value in row])
            count += 1
        return count
