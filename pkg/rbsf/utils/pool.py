# -*- coding: utf-8 -*-
""" Named worker pool """

import threading
from concurrent.futures import ThreadPoolExecutor

from setproctitle import setthreadtitle


def _set_title() -> None:
    setthreadtitle(threading.current_thread().name)


def named_pool(workers: int, name: str) -> ThreadPoolExecutor:
    """
    named_pool - thread pool whose workers carry a readable OS thread title

    :param workers:
    :param name:
    :return:
    """
    return ThreadPoolExecutor(max_workers=max(1, workers), thread_name_prefix=name, initializer=_set_title)
