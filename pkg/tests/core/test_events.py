from core.events import Event, EventBus, EventFilter, EventPhase


def _event(phase=EventPhase.PRE_COMPUTE, agent=1, name="ctrl"):
    return Event(phase, agent, "controller", name, 0)


def test_filter_by_phase_and_agent():
    bus = EventBus()
    got = []
    bus.subscribe(EventFilter.of(phases="pre-compute", agent_ids=[2]), got.append)
    bus.emit(_event(agent=1))
    bus.emit(_event(agent=2))
    bus.emit(_event(EventPhase.POST_UPDATE, agent=2))
    assert [e.agent_id for e in got] == [2]


def test_callback_exception_does_not_propagate():
    bus = EventBus()
    got = []

    def broken(event):
        raise ValueError("bad subscriber")

    bus.subscribe(None, broken)
    bus.subscribe(None, got.append)
    bus.emit(_event())
    assert len(got) == 1


def test_unsubscribe_stops_delivery():
    bus = EventBus()
    got = []
    sub = bus.subscribe(None, got.append)
    bus.emit(_event())
    sub.unsubscribe()
    bus.emit(_event())
    assert len(got) == 1
