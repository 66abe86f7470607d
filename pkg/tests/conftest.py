import importlib

import pytest

from towernorm import BaseSpace, TowerSpace, make_schedule


@pytest.fixture(scope="session")
def space():
    return TowerSpace(BaseSpace(3))


@pytest.fixture(scope="session")
def space2():
    return TowerSpace(BaseSpace(2))


@pytest.fixture(scope="session")
def short_space():
    return TowerSpace(BaseSpace(2), make_schedule(levels=3))


def _backends():
    out = [pytest.param(importlib.import_module("towernorm._pykernels"), id="python")]
    try:
        out.append(pytest.param(importlib.import_module("towernorm._ckernels"), id="cython"))
    except ImportError:
        out.append(pytest.param(None, id="cython",
                                marks=pytest.mark.skip(reason="extension not built")))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    return request.param
