"""NVLang: typed actors compiled to Core Erlang, with a reference interpreter."""

from os import PathLike
from typing import Sequence, Union

from ._nvlang import Compilation, erlc_available
from . import _nvlang

__all__ = ["CompileError", "Compilation", "compile", "compile_file", "run", "erlc_available"]

StrPath = Union[str, PathLike]


class CompileError(Exception):
    """Raised when a program is rejected. `diagnostics` holds one dict per
    error with file, line, column, kind, message and the formatted text."""

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("\n".join(d["text"] for d in diagnostics))

    @property
    def kind(self):
        return self.diagnostics[0]["kind"]


def _unwrap(result):
    unit, diagnostics = result
    if unit is None:
        raise CompileError(diagnostics)
    return unit


def compile(source: str, name: str = "main", paths: Sequence[StrPath] = ()) -> Compilation:
    return _unwrap(_nvlang.check_source(source, name, list(paths)))


def compile_file(path: StrPath, paths: Sequence[StrPath] = ()) -> Compilation:
    return _unwrap(_nvlang.check_file(path, list(paths)))


def run(source: str, seed: int = 42, trace: bool = False) -> dict:
    return compile(source).run(seed=seed, trace=trace)
