import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult import kernels
from cohult.filters.cube import proj_table

BACKENDS = sorted(kernels.backends().items())


def test_compiled_backend_is_selected_when_built():
    assert kernels.BACKEND in ("cython", "python")
    if "cython" in kernels.backends():
        assert kernels.BACKEND == "cython"


def test_env_var_forces_pure_python():
    env = dict(os.environ, COHULT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from cohult import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_table_projects_points():
    # pi^{(0,1)}_{(1,)} on the 2-cube: index s0 + 2 s1 -> s1
    assert list(proj_table(2, (1,), (0, 1))) == [0, 0, 1, 1]


cases = st.tuples(st.integers(1, 3), st.sampled_from([((0,), (0, 1)), ((1,), (0, 1)), ((), (0,)), ((0, 2), (0, 1, 2))]))


@pytest.mark.parametrize("name,mod", BACKENDS)
@given(case=cases, data=st.data())
def test_backends_agree_on_mask_ops(name, mod, case, data):
    k, (a, b) = case
    ref = kernels.backends()["python"]
    tab = proj_table(k, a, b)
    big = data.draw(st.integers(0, (1 << k ** len(b)) - 1))
    small = data.draw(st.integers(0, (1 << k ** len(a)) - 1))
    assert mod.pullback(small, tab) == ref.pullback(small, tab)
    assert mod.pushforward(big, tab) == ref.pushforward(big, tab)
    assert mod.fullify(big, tab) == ref.fullify(big, tab)
    assert mod.is_full(big, tab) == ref.is_full(big, tab)


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_backends_agree_on_scans(name, mod):
    ref = kernels.backends()["python"]
    k = 2
    a, b, c = (0, 1), (0,), (0, 2)
    ab = ac = (0,)
    args = (
        proj_table(k, ac, c), proj_table(k, ac, a), proj_table(k, ab, a),
        proj_table(k, ab, ac), proj_table(k, b, c), k ** len(b), k ** len(a),
    )
    assert mod.nicefull_scan(*args) == ref.nicefull_scan(*args)
    t = proj_table(k, (0,), (0, 1))
    for core_a in range(4):
        for core_b in (0b0110, 0b1000, 0b1111):
            assert mod.coherence_scan(core_a, core_b, t, 2) == ref.coherence_scan(core_a, core_b, t, 2)
    dargs = (proj_table(k, (1,), (0, 1)), proj_table(k, (1,), (1, 2)),
             proj_table(k, (0, 1), (0, 1, 2)), proj_table(k, (1, 2), (0, 1, 2)), 2)
    assert mod.duud_scan(*dargs) == ref.duud_scan(*dargs)
