"""
Three users on a line
=====================

Users 0-1-2 form a path. After 0 and 1 meet they share a channel set, so a
later meeting of 1 and 2 can be relayed back to 0. This walks the knowledge
merge rule by hand with :func:`topodisc.step`.
"""
from topodisc import ChannelSet, KnowledgeState, Scenario, Topology, is_complete, step

sets = [ChannelSet({1, 2, 5}, 8), ChannelSet({1, 3, 5}, 8), ChannelSet({1, 4}, 8)]
scenario = Scenario(8, Topology(3, [(0, 1), (1, 2)]), sets, ChannelSet({1}, 8))
states = [KnowledgeState.initial(k, cs) for k, cs in enumerate(sets)]

for slot, decisions in enumerate([[5, 5, 4], [2, 1, 1], [5, 5, 4]], start=1):
    states = step(scenario, states, decisions)
    print(f"slot {slot} channels {decisions}")
    for s in states:
        print(f"  user {s.owner}: knows {sorted(s.known_users)} edges {sorted(s.known_edges)} "
              f"complete={is_complete(s, scenario)}")
