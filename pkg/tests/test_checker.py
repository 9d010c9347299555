from geosched.checker import CheckReport, Crash, Steal, _explore, check, make_world, violations


def explore(n_dcs, counts, procs):
    rep = CheckReport(scenarios=1)
    w = make_world(n_dcs, counts)
    _explore(w, procs, rep)
    return rep


def test_initial_world_is_clean():
    w = make_world(3, (2, 1, 0))
    assert violations(w) == []
    assert w.store.head.primaries() == ["dc0#0"]


def test_election_during_inflight_steal():
    # dc1's manager steals from the primary while the primary crashes
    rep = explore(2, (2, 0), [Steal("dc1#0"), Crash("dc0#0")])
    assert rep.ok, rep.failures[:3]
    assert rep.paths >= 3


def test_stale_thief_cannot_take_tasks():
    # the thief itself dies between request and reply
    rep = explore(2, (0, 2), [Steal("dc0#0"), Crash("dc0#0")])
    assert rep.ok, rep.failures[:3]


def test_all_managers_down_aborts():
    rep = explore(2, (1, 1), [Crash("dc0#0"), Crash("dc1#0")])
    assert rep.ok


def test_exhaustive_small_scenarios():
    rep = check(max_dcs=3, max_events=2)
    assert rep.scenarios > 500
    assert rep.ok, rep.failures[:3]
