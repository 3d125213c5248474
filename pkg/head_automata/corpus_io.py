"""
Line-oriented readers and writers.

Every reader streams its file and reports the first malformed line as an
InputFormatError naming the file and the 1-based line number.
"""

import json
import logging
import os
import sys
from typing import Any, Iterable, Iterator, List, Optional, TextIO, Tuple, Union

from .costs import round12
from .errors import InputFormatError
from .trees import OrderedDependencyTree, tree_from_json, tree_to_string

logger = logging.getLogger(__name__)

Sentence = Tuple[str, ...]


def _lines(path: str) -> Iterator[Tuple[int, str]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                yield number, line.rstrip("\n")
    except OSError as e:
        raise InputFormatError(f"cannot read file: {e.strerror}", path=path)
    except UnicodeDecodeError:
        raise InputFormatError("file is not valid UTF-8", path=path)


def _json_line(path: str, number: int, line: str) -> Any:
    try:
        return json.loads(line)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"invalid JSON: {e.msg}", path=path, line=number)


def read_trees(path: str) -> Iterator[OrderedDependencyTree]:
    """One JSON tree per non-blank line."""
    for number, line in _lines(path):
        if not line.strip():
            continue
        yield tree_from_json(_json_line(path, number, line), path=path, line=number)


def read_sentences(path: str, allow_empty: bool = False) -> Iterator[Sentence]:
    """
    Whitespace-tokenized sentences, one per line.

    A line that starts with ``{`` is read as a JSON tree and stands for its
    yield, so sampled trees can be fed back to the parser unchanged. Blank
    lines are the empty sentence when ``allow_empty`` is set and an error
    otherwise.
    """
    for number, line in _lines(path):
        stripped = line.strip()
        if not stripped and allow_empty:
            yield ()
        elif not stripped:
            raise InputFormatError("empty sentence", path=path, line=number)
        elif stripped.startswith("{"):
            tree = tree_from_json(_json_line(path, number, stripped), path=path, line=number)
            yield tree_to_string(tree)
        else:
            yield tuple(stripped.split())


def read_parallel_corpus(path: str) -> Iterator[Tuple[Sentence, Sentence]]:
    """One ``{"src": [...], "tgt": [...]}`` object per non-blank line."""
    for number, line in _lines(path):
        if not line.strip():
            continue
        record = _json_line(path, number, line)
        if not isinstance(record, dict) or set(record) != {"src", "tgt"}:
            raise InputFormatError('expected an object with exactly the keys "src" and "tgt"', path=path, line=number)
        sides = []
        for key in ("src", "tgt"):
            tokens = record[key]
            if not isinstance(tokens, list) or not tokens or not all(isinstance(t, str) and t for t in tokens):
                raise InputFormatError(f'"{key}" must be a non-empty array of tokens', path=path, line=number)
            sides.append(tuple(tokens))
        yield sides[0], sides[1]


def read_dictionary(path: str) -> List[Tuple[str, str]]:
    """Tab-separated ``source<TAB>target`` pairs; blank lines and ``#`` comments are skipped."""
    pairs = []
    for number, line in _lines(path):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise InputFormatError("expected source<TAB>target", path=path, line=number)
        pairs.append((fields[0], fields[1]))
    return pairs


def _rounded(value: Any) -> Any:
    if isinstance(value, float):
        return round12(value)
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def dumps_record(record: Any) -> str:
    """One JSON line with floats at 12 significant digits."""
    return json.dumps(_rounded(record), ensure_ascii=False, separators=(", ", ": "))


def open_output(path: Optional[str]) -> TextIO:
    """A writable text stream for ``path``; stdout when path is None or ``-``."""
    if path is None or path == "-":
        return sys.stdout
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def write_lines(lines: Iterable[str], path: Optional[str]) -> int:
    out = open_output(path)
    count = 0
    try:
        for line in lines:
            out.write(line)
            out.write("\n")
            count += 1
    finally:
        if out is not sys.stdout:
            out.close()
        else:
            out.flush()
    return count


def write_records(records: Iterable[Union[dict, list, None]], path: Optional[str]) -> int:
    return write_lines((dumps_record(record) for record in records), path)
