import io

import numpy as np
import pytest

from fbsim import *


def test_defaults():
    cfg = RunConfig()
    assert cfg.ppr_config() == PprConfig()
    assert cfg.fbs_config() == FbsConfig()
    assert cfg.resolved_lambda == 0.5
    assert cfg.simrank_config().seed == 42


def test_saturation_lambda():
    cfg = RunConfig(combiner='saturation')
    assert cfg.combiner_spec() == CombinerSpec.saturation_preset()
    assert cfg.as_dict()['lam'] == 0.571
    assert RunConfig(combiner='saturation', lam=0.2).combiner_spec().lam == 0.2


def test_invalid_values():
    for kwargs in ({'k': 0}, {'folds': 1}, {'seed': -1}, {'epsilon': 0}, {'dangling': 'drop'},
                   {'combiner': 'max'}, {'n': 0}, {'lam': 2.0}):
        with pytest.raises(InvalidConfigException):
            RunConfig(**kwargs)


def test_merged():
    cfg = RunConfig().merged({'k': 3, 'lam': None, 'epsilon': 0.3})
    assert cfg.k == 3
    assert cfg.lam is None
    assert cfg.epsilon == 0.3
    with pytest.raises(InvalidConfigException):
        RunConfig().merged({'alpha': 1})


def test_read_config():
    values = read_config("# defaults for the DBLP runs\nlambda = 0.05\nn=30\n\ncombiner = saturation\n")
    assert values == {'lam': 0.05, 'n': 30, 'combiner': 'saturation'}
    with pytest.raises(InvalidConfigException):
        read_config("n = many\n")
    with pytest.raises(InvalidConfigException):
        read_config("beta = 1\n")
    with pytest.raises(InvalidConfigException):
        read_config("just words\n")


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("k = 5\nseed = 7\n")
    assert RunConfig().merged(load_config_file(str(path))).seed == 7


def test_registry(example):
    g, _ = example
    assert set(implementations) == {'ppr', 'fbs', 'psalsa', 'simrank', 'adamic-adar'}
    with pytest.raises(ValueError):
        get_measure('katz')
    cfg = RunConfig(k=2)
    G = g.node_id('G')
    for name, measure in implementations.items():
        assert measure.name == name
        scores = measure.score_map(g, G, cfg)
        assert len(scores) == 14
        assert measure.ranking(g, G, cfg, include_zero=True)[:1] in ([G], [g.node_id('D')])


def test_fbs_measure(example):
    g, _ = example
    measure = get_measure('fbs')
    cfg = RunConfig()
    G = g.node_id('G')
    assert measure.feature_names == ('fbs_forward', 'fbs_backward')
    assert measure.ranking(g, G, cfg) == fbs_query(g, G).ranking()
    assert measure.score_map(g, G, cfg).ranked() == fbs_query(g, G).ranking()
    features = measure.pair_features(g, [(G, 3), (3, G)], cfg)
    assert features.shape == (2, 2)


def test_pair_features_follow_score_maps(example):
    g, _ = example
    cfg = RunConfig()
    pairs = [(6, 3), (6, 7), (3, 0), (11, 7)]
    for name in ('ppr', 'psalsa', 'adamic-adar'):
        measure = get_measure(name)
        features = measure.pair_features(g, pairs, cfg)
        expected = [measure.score_map(g, u, cfg)[v] for u, v in pairs]
        assert features[:, 0] == pytest.approx(np.array(expected))


def test_write_query(example):
    g, _ = example
    stream = io.StringIO()
    get_measure('adamic-adar').write_query(g, g.node_id('G'), RunConfig(k=1), stream)
    assert stream.getvalue().startswith("1\tD\t")


def test_simrank_settings():
    values = read_config("simrank_c = 0.6\nsimrank_T = 20\nsimrank_R = 500\n")
    assert values == {'simrank_c': 0.6, 'simrank_t': 20, 'simrank_r': 500}
    cfg = RunConfig(seed=3).merged(values)
    assert cfg.simrank_config() == SimRankConfig(0.6, 20, 500, 3)
    for kwargs in ({'simrank_c': 1.0}, {'simrank_t': 0}, {'simrank_r': -5}):
        with pytest.raises(InvalidConfigException):
            RunConfig(**kwargs)
