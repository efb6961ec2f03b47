"""Shared randomized differential runners.

Each runner drives one specialized collection and one baseline counterpart
through the same random operation sequence and asserts identical
observable results: per-operation returns, final size, and the final
iteration contents (ordered for linked maps and lists, as a multiset for
plain maps and sets).
"""

from __future__ import annotations

import random

from dsopt import NULL, Value, stable_hash
from dsopt.profiles import ElementTypeTag


def _payload(result):
    return None if result is None else result.payload


def _entry_multiset(pairs):
    return sorted(stable_hash((k.payload, v.payload)) for k, v in pairs)


def _entry_list(pairs):
    return [(k.payload, v.payload) for k, v in pairs]


def run_map_differential(
    make_specialized,
    make_baseline,
    sequences: int,
    seed: int,
    keyspace: int = 5,
    max_ops: int = 8,
    ordered: bool = False,
) -> None:
    rng = random.Random(seed)
    keys = [Value(i) for i in range(keyspace - 1)] + [NULL]
    values = [Value((i, "v")) for i in range(8)]
    nkeys, nvalues = len(keys), len(values)
    for sequence in range(sequences):
        a = make_specialized()
        b = make_baseline()
        for step in range(rng.randrange(1, max_ops)):
            op = rng.randrange(10)
            where = f"seq={sequence} step={step} seed={seed}"
            if op < 4:
                k = keys[rng.randrange(nkeys)]
                v = values[rng.randrange(nvalues)]
                ra, rb = a.put(k, v), b.put(k, v)
                assert _payload(ra) == _payload(rb), f"put diverged at {where}"
            elif op < 7:
                k = keys[rng.randrange(nkeys)]
                ra, rb = a.get(k), b.get(k)
                assert _payload(ra) == _payload(rb), f"get diverged at {where}"
            elif op < 9:
                k = keys[rng.randrange(nkeys)]
                ra, rb = a.remove(k), b.remove(k)
                assert _payload(ra) == _payload(rb), f"remove diverged at {where}"
            else:
                if ordered:
                    assert _entry_list(a.entries()) == _entry_list(b.entries()), (
                        f"iteration order diverged at {where}"
                    )
                else:
                    assert _entry_multiset(a.entries()) == _entry_multiset(b.entries()), (
                        f"iteration contents diverged at {where}"
                    )
        assert a.size() == b.size(), f"size diverged in seq={sequence} seed={seed}"
        if ordered:
            assert _entry_list(a.entries()) == _entry_list(b.entries())
        else:
            assert _entry_multiset(a.entries()) == _entry_multiset(b.entries())


def run_set_differential(
    make_specialized,
    make_baseline,
    sequences: int,
    seed: int,
    keyspace: int = 6,
    max_ops: int = 8,
) -> None:
    rng = random.Random(seed)
    elements = [Value(i) for i in range(keyspace - 1)] + [NULL]
    n = len(elements)
    for sequence in range(sequences):
        a = make_specialized()
        b = make_baseline()
        for step in range(rng.randrange(1, max_ops)):
            op = rng.randrange(10)
            e = elements[rng.randrange(n)]
            where = f"seq={sequence} step={step} seed={seed}"
            if op < 4:
                assert a.add(e) == b.add(e), f"add diverged at {where}"
            elif op < 8:
                assert a.contains(e) == b.contains(e), f"contains diverged at {where}"
            else:
                assert a.remove(e) == b.remove(e), f"remove diverged at {where}"
        assert a.size() == b.size(), f"size diverged in seq={sequence} seed={seed}"
        sa = sorted(stable_hash(e.payload) for e in a)
        sb = sorted(stable_hash(e.payload) for e in b)
        assert sa == sb, f"membership diverged in seq={sequence} seed={seed}"


def _list_snapshot(lst):
    return [e.payload for e in lst]


def run_list_differential(
    make_specialized,
    make_baseline,
    sequences: int,
    seed: int,
    max_ops: int = 8,
    element_maker=None,
) -> None:
    """Lists are ordered; iteration order is compared after every sequence."""
    rng = random.Random(seed)
    if element_maker is None:
        pool = [Value((i, "e")) for i in range(8)]
        element_maker = lambda r: pool[r.randrange(8)]
    for sequence in range(sequences):
        a = make_specialized()
        b = make_baseline()
        size = 0
        for step in range(rng.randrange(1, max_ops)):
            op = rng.randrange(10)
            where = f"seq={sequence} step={step} seed={seed}"
            if op < 5 or size == 0:
                e = element_maker(rng)
                a.add(e)
                b.add(e)
                size += 1
            elif op < 7:
                i = rng.randrange(size)
                ra, rb = a.get_at(i), b.get_at(i)
                assert _payload(ra) == _payload(rb), f"get_at diverged at {where}"
            elif op < 8:
                i = rng.randrange(size)
                e = element_maker(rng)
                ra, rb = a.set_at(i, e), b.set_at(i, e)
                assert _payload(ra) == _payload(rb), f"set_at diverged at {where}"
            else:
                i = rng.randrange(size)
                ra, rb = a.remove_at(i), b.remove_at(i)
                assert _payload(ra) == _payload(rb), f"remove_at diverged at {where}"
                size -= 1
        assert a.size() == b.size(), f"size diverged in seq={sequence} seed={seed}"
        assert _list_snapshot(a) == _list_snapshot(b), f"order diverged in seq={sequence}"


_PRIMITIVE_SAMPLES = {
    ElementTypeTag.BYTE: [0, 1, 100, 127],
    ElementTypeTag.SHORT: [0, 7, 2000],
    ElementTypeTag.INT: [0, 1, 2, 41, 1000],
    ElementTypeTag.LONG: [1 << 40, (1 << 40) + 3],
    ElementTypeTag.FLOAT: [0.5, 1.5, 7.25],
    ElementTypeTag.DOUBLE: [0.125, 9.75],
    ElementTypeTag.CHAR: ["a", "z", "Q"],
    ElementTypeTag.BOOLEAN: [True, False],
}


def primitive_element_maker(tag: ElementTypeTag, foreign_chance: float = 0.08):
    """Mostly tag-matching elements, sometimes a foreign one (forces fallback)."""
    samples = _PRIMITIVE_SAMPLES[tag]
    other_tags = [t for t in _PRIMITIVE_SAMPLES if t is not tag]

    def make(rng: random.Random) -> Value:
        roll = rng.random()
        if roll < foreign_chance / 2:
            return Value((rng.randrange(4), "obj"))  # untagged object element
        if roll < foreign_chance:
            other = other_tags[rng.randrange(len(other_tags))]
            return Value(_PRIMITIVE_SAMPLES[other][rng.randrange(len(_PRIMITIVE_SAMPLES[other]))], other)
        return Value(samples[rng.randrange(len(samples))], tag)

    return make
