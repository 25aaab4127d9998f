"""
로깅 설정 유틸
- 콘솔 + 파일 핸들러(회전) 세팅
- 라이브러리 모듈은 get_logger 로 가져가고, 핸들러는 최초 1회만 붙인다
"""

import logging
from logging.handlers import RotatingFileHandler
from typing import Union

from .constants import LOGS_DIR

_FMT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"


def setup_logger(name: str = "central_spin", level: Union[int, str] = logging.INFO) -> logging.Logger:
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # 중복 핸들러 방지
    if logger.handlers:
        for h in logger.handlers:
            h.setLevel(level)
        return logger

    # 콘솔
    ch = logging.StreamHandler()
    ch.setLevel(level)
    ch.setFormatter(logging.Formatter(fmt=_FMT, datefmt=_DATEFMT))
    logger.addHandler(ch)

    # 파일(회전). 읽기 전용 환경이면 콘솔만 사용
    try:
        LOGS_DIR.mkdir(parents=True, exist_ok=True)
        fh = RotatingFileHandler(
            LOGS_DIR / f"{name}.log",
            maxBytes=5 * 1024 * 1024,  # 5MB
            backupCount=3,
            encoding="utf-8",
        )
        fh.setLevel(level)
        fh.setFormatter(logging.Formatter(fmt=_FMT, datefmt=_DATEFMT))
        logger.addHandler(fh)
    except OSError:
        pass

    logger.propagate = False
    return logger


def get_logger(module: str) -> logging.Logger:
    """하위 로거. 'central_spin.<module>' 이름으로 부모 핸들러를 공유."""
    parent = setup_logger("central_spin")
    child = parent.getChild(module)
    child.propagate = True
    return child
