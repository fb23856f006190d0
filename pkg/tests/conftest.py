import numpy as np
import pytest

from ris_wideband.scenario import _scenario_from_dict, paper_scenario


@pytest.fixture(scope="session")
def paper():
    return paper_scenario()


def shrink(sc, *, n_ris=16, bs=(4, 4), k_design=3, k_eval=11,
           user_grid=(2, 2, 1), eve_grid=(2, 2, 1), **hyper):
    """Desk-scale scenario reduced for fast unit tests."""
    d = sc.to_dict()
    d["ris_elements"] = n_ris
    d["bs_shape"] = bs
    d["freq_plan"] = dict(d["freq_plan"], design_grid=k_design, eval_grid=k_eval)
    d["user_region"] = dict(d["user_region"], grid=user_grid)
    d["eve_region"] = dict(d["eve_region"], grid=eve_grid)
    hy = dict(d["hyper"])
    hy.update(hyper)
    d["hyper"] = hy
    return _scenario_from_dict(d)


@pytest.fixture()
def small(paper):
    return shrink(paper, t_max=2, scalable_j_max=3, scalable_i_max=10,
                  sdp_j_max=1, sdp_i_max=4)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
