# -*- coding: utf-8 -*-
""" Configuration module """

import configparser

DEFAULTS = {
    'DEFAULT': {
        'Debug': 'false',
        'SentryEnabled': 'false',
        'SentryDSN': '',
    },
    'Model': {
        'Tolerance': '1e-12',
    },
    'Recursion': {
        'Workers': '1',
    },
    'Simulation': {
        'HorizonDrifts': '50',
        'HorizonFallback': '200',
        'Threads': '1',
        'ChunkSize': '250',
    },
    'Compare': {
        'SEFactor': '4',
    },
}


class Config:
    """
    Config - two level configuration with functionality similar to dotted dict
    """

    def __init__(self, config_path="fluidruin.ini"):
        self.config_path = config_path
        self.config = None
        self.elements = []

    def read(self):
        """
        Read built-in defaults, then configuration file (if any) on top of them

        :return:
        """
        self.config = configparser.ConfigParser()
        # keys are CamelCase, keep them as written
        self.config.optionxform = str  # type: ignore[assignment,method-assign]
        self.config.read_dict(DEFAULTS)
        self.config.read(self.config_path)

    @staticmethod
    def enforce_type(value_type, value):
        """
        Enforce selected type

        :param value_type:
        :param value:
        :return:
        """
        return value.lower() == 'true' if value_type == bool else value_type(value)

    def __getattr__(self, attr):
        """
        Get attribute

        :param attr:
        :return:
        """
        if attr.startswith('__'):
            raise AttributeError(attr)
        if self.config is None:
            raise AttributeError('config is empty')
        if len(self.elements) < 2:
            self.elements.append(attr)
        if len(self.elements) == 2:
            section, key = self.elements
            self.elements = []
            return self.config[section][key]
        return self
