"""Reference models: Bayesian network, job scheduling, Markov chain, corpus files."""

from fractions import Fraction as F

import pytest

from src.compiler import run_queries
from src.config import MODEL_EXTENSION
from src.errors import EmptyDistribution
from src.pex import tuple_of
from src.prob import condense
from src.statues import marg, p_true


def D(text: str) -> F:
    return F(text)


class TestRainSprinklerGrass:
    def test_marginals(self, rsg):
        assert p_true(rsg.sprinkler) == D('0.322')
        assert p_true(rsg.rain & rsg.sprinkler & rsg.grass_wet) == D('0.00198')
        assert p_true(rsg.grass_wet.given(rsg.rain)) == D('0.8019')

    def test_posteriors(self, rsg):
        r, s, g = rsg.rain, rsg.sprinkler, rsg.grass_wet
        assert p_true(r.given(g)) == F(891, 2491)
        assert p_true(r.given(g & ~s)) == 1
        assert float(p_true(r.given(~g | ~s))) == pytest.approx(0.27889355229430157, abs=1e-12)
        assert float(p_true((r | s).given(~g))) == pytest.approx(0.12983575649903917, abs=1e-12)
        assert float(p_true(r.eq(s).given(~g))) == pytest.approx(0.87020050034444, abs=1e-12)

    def test_joint(self, rsg):
        joint = marg(tuple_of([rsg.rain, rsg.sprinkler, rsg.grass_wet]))
        assert joint == condense({
            (False, False, False): D('0.48'),
            (False, True, False): D('0.032'),
            (False, True, True): D('0.288'),
            (True, False, False): D('0.0396'),
            (True, False, True): D('0.1584'),
            (True, True, False): D('0.00002'),
            (True, True, True): D('0.00198'),
        })
        assert len(joint) == 7

    def test_measure(self, rsg):
        assert marg(rsg.measure) == condense({
            0: D('0.27581'), 1: D('0.2068575'), 2: D('0.125'),
            3: D('0.1681425'), 4: D('0.22419'),
        })
        assert marg(rsg.measure.given(~rsg.rain)) == condense({
            0: D('0.32'), 1: D('0.24'), 2: D('0.125'), 3: D('0.135'), 4: D('0.18'),
        })

    def test_measure_evidence(self, rsg):
        assert p_true(rsg.measure.le(2).given(~rsg.rain)) == D('0.685')
        assert p_true((~rsg.rain).given(rsg.measure.le(2))) == D('0.548') / D('0.6076675')
        assert float(p_true((~rsg.rain).given(rsg.norm_measure.le(0)))) == \
            pytest.approx(0.9018089662521034, abs=1e-12)

    def test_normalized_measure(self, rsg):
        assert marg(rsg.norm_measure.given(~rsg.rain)) == condense({
            -1: D('0.32'), F(-1, 2): D('0.24'), 0: D('0.125'), F(1, 2): D('0.135'), 1: D('0.18'),
        })


class TestJobs:
    def test_makespan(self, jobs):
        assert marg(jobs.makespan) == condense({
            5: D('0.045'), 6: D('0.405'), 7: D('0.424'), 8: D('0.116'), 9: D('0.01'),
        })

    def test_makespan_by_scenario(self, jobs):
        assert marg(jobs.makespan.given(jobs.s.eq('CONSERVATIVE'))) == condense({
            5: D('0.05'), 6: D('0.45'), 7: D('0.45'), 8: D('0.05'),
        })
        assert marg(jobs.makespan.given(jobs.s.ne('CONSERVATIVE'))) == condense({
            5: D('0.0375'), 6: D('0.3375'), 7: D('0.385'), 8: D('0.215'), 9: D('0.025'),
        })

    def test_longest_makespan_means_disruption(self, jobs):
        assert marg(jobs.s.given(jobs.makespan.eq(9))) == condense({'DISRUPTIVE': 1})

    def test_rounded_posteriors(self, jobs):
        efforts = marg(jobs.efforts.given(jobs.s.eq('DISRUPTIVE') & jobs.efforts.le(14)))
        assert {int(v): round(float(p), 4) for v, p in efforts} == {12: 0.0183, 13: 0.2294, 14: 0.7523}

        makespan = marg(jobs.makespan.given(jobs.efforts.eq(8)))
        assert {int(v): round(float(p), 4) for v, p in makespan} == {5: 0.0803, 6: 0.9197}

        scenario = marg(jobs.s.given(jobs.makespan.le(7) & jobs.efforts.le(9)))
        assert {str(v): round(float(p), 4) for v, p in scenario} == \
            {'CONSERVATIVE': 0.8556, 'EVOLUTIVE': 0.1444}

    def test_durations_behind_a_makespan(self, jobs):
        durations = tuple_of([jobs.d_a, jobs.d_b, jobs.d_c])
        conservative = jobs.s.eq('CONSERVATIVE')
        five = marg(durations.given(jobs.makespan.eq(5) & conservative))
        assert five == condense({(3, 2, 2): D('0.7'), (3, 2, 3): D('0.3')})
        six = marg(durations.given(jobs.makespan.eq(6) & conservative))
        assert {tuple(int(x) for x in v): round(float(p), 4) for v, p in six} == {
            (3, 3, 2): 0.0778, (3, 3, 3): 0.0333, (4, 2, 2): 0.6222, (4, 2, 3): 0.2667,
        }


class TestCorpus:
    def test_weather_chain(self, load_corpus):
        results = run_queries(load_corpus('weather'))
        w1, w2, w3, w0 = (r.pmf for r in results)
        assert w1.prob_of('sunny') == D('0.66')
        assert w2.prob_of('sunny') == D('0.798')
        assert w3.prob_of('sunny') == D('0.8394')
        assert w0.prob_of('sunny') == D('0.1722') / D('0.8394')

    def test_weather_steps_are_independent_draws(self, load_corpus):
        model = load_corpus('weather')
        ids = {n.id for n in (model.names['w1'], model.names['w2'], model.names['w3'])}
        assert len(ids) == 3
        assert model.pmf_literals == 7

    def test_joint_distribution(self, load_corpus):
        weather, mood, both, same = (r.pmf for r in run_queries(load_corpus('joint')))
        assert weather == condense({'rainy': D('0.3'), 'sunny': D('0.7')})
        assert mood == condense({'sad': D('0.25'), 'happy': D('0.75')})
        assert both.p_true() == F(13, 20)
        assert same.p_true() == F(13, 20)

    def test_coins(self, load_corpus):
        fair, agree, same = (r.pmf for r in run_queries(load_corpus('coin')))
        assert fair == condense({'tail': 1, 'head': 1})
        assert agree.p_true() == F(5, 8)
        assert same.p_true() == 1

    def test_dice(self, load_corpus):
        results = run_queries(load_corpus('dice'))
        assert results[1].pmf == condense({6: 1, 7: 1})
        assert results[2].pmf == condense({1: 2, 2: 1})
        assert results[4].pmf == condense({1: F(1, 2), 2: F(1, 6), 6: F(1, 3)})
        assert results[5].pmf == condense({0: 1})

    def test_bag_of_dice(self, load_corpus):
        die, d6, halves = (r.pmf for r in run_queries(load_corpus('bag_of_dice')))
        assert die.prob_of(1) == F(5, 24)
        assert die.prob_of(6) == F(1, 12)
        assert d6 == condense({6: 1})
        assert halves == condense({1: 1, 2: 1})

    def test_mixture_of_clauses_equals_table(self, load_corpus):
        g_table, g_mix, r_table, r_mix = (r.pmf for r in run_queries(load_corpus('cpt_mixture')))
        assert g_table == g_mix
        assert g_table.p_true() == D('0.4643')
        assert r_table == r_mix
        assert r_table.p_true() == D('0.1603') / D('0.4643')

    def test_multi_model(self, load_corpus):
        results = run_queries(load_corpus('multi'))
        assert results[0].pmf == results[1].pmf
        assert results[2].pmf == condense({8: 1, 2: 1})
        assert results[3].pmf == condense({-1: F(1, 4), 1: F(3, 4)})

    def test_bad_model_reports_empty_distribution(self, load_corpus):
        (result,) = run_queries(load_corpus('bad'))
        assert isinstance(result.error, EmptyDistribution)
        assert result.pmf is None

    def test_every_model_agrees_with_oracle(self, models_dir, load_corpus):
        stems = sorted(p.stem for p in models_dir.glob(f'*{MODEL_EXTENSION}'))
        assert 'rsg_measure' in stems
        for stem in stems:
            for result in run_queries(load_corpus(stem), oracle=True):
                assert not result.mismatch, f"{stem}: {result.source}"
                assert not result.oracle_skipped
