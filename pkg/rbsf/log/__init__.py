# -*- coding: utf-8 -*-
""" Logging module """

from .log import conditional_log, setup_logger, LOGFORMAT, VERSION
