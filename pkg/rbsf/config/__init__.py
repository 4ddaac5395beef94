# -*- coding: utf-8 -*-
""" Config module """

from .config import Config
