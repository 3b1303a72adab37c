"""
File connector for .qp sources, rational CSV matrices and sample exports
"""
import hashlib
import logging
from pathlib import Path
from typing import Tuple, Union

import pandas as pd

from utils.exceptions import DimensionMismatchError, InputError
from utils.rational_linalg import RatMatrix, to_rational

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def digest(text: str) -> str:
    return 'sha256:' + hashlib.sha256(text.encode('utf-8')).hexdigest()


class QPFileConnector:
    """Reads and writes the files the CLI works with"""

    @staticmethod
    def read_source(path: PathLike) -> Tuple[str, str]:
        """
        Read a UTF-8 .qp file

        Returns:
            (text, digest) with a sha256 digest of the exact text
        """
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        except UnicodeDecodeError as exc:
            raise InputError(f"{path} is not UTF-8 text: byte {exc.start}: {exc.reason}") from exc
        logger.debug("read %s (%d bytes)", path, len(text))
        return text, digest(text)

    @staticmethod
    def read_matrix(path: PathLike) -> RatMatrix:
        """Rational matrix from a headerless CSV with "p/q" or decimal cells"""
        try:
            frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True, comment='#')
        except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            raise InputError(f"cannot read matrix from {path}: {exc}") from exc
        if frame.isnull().values.any():
            raise DimensionMismatchError(f"ragged or empty cells in {path}")
        try:
            rows = [[to_rational(cell) for cell in row] for row in frame.itertuples(index=False)]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"non-rational entry in {path}: {exc}") from exc
        return RatMatrix.from_rows(rows)

    @staticmethod
    def parse_matrix(rows) -> RatMatrix:
        try:
            return RatMatrix.from_rows([[to_rational(str(cell)) for cell in row] for row in rows])
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"non-rational matrix entry: {exc}") from exc

    @staticmethod
    def write_text(path: PathLike, text: str):
        Path(path).write_text(text, encoding='utf-8')
        logger.info("wrote %s", path)

    @staticmethod
    def write_samples(path: PathLike, frame: pd.DataFrame):
        frame.to_csv(path, index=False, float_format='%.17g')
        logger.info("wrote %d samples to %s", len(frame), path)
