# -*- coding: utf-8 -*-
""" CSV file output module """


from .csv import CSVFileWriter, format_value
