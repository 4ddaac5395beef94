# -*- coding: utf-8 -*-
""" memory cache """
#
from threading import RLock
from typing import Any, Hashable


class Memcache:
    """
    Memcache - in-memory, lock guarded cache for storing computed data.
    Writers fill, readers read; values are never mutated after set
    """

    def __init__(self, logger=None):
        self.lock = RLock()
        self.logger = logger
        self.cache = {}

    def get(self, key: Hashable) -> Any:
        """
        get - get data by key

        :param key:
        :return:
        """
        with self.lock:
            return self.cache.get(key)

    def set(self, key: Hashable, value: Any) -> None:
        """
        set - set data by key

        :param key:
        :param value:
        :return:
        """
        with self.lock:
            if self.logger is not None and key in self.cache:
                self.logger.warning(f'Overwriting key {key}...')
            self.cache[key] = value
