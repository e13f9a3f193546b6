import pytest
from hypothesis import strategies as st

from nqgl.syntax import And, Atom, BOT, Box, ForAll, Implies, Not, TOP, Var

VARS = [Var(i) for i in range(3)]


def prop_formulas(max_leaves=8):
    leaves = st.sampled_from([Atom("P", ()), Atom("Q", ()), TOP, BOT])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Not, sub), st.builds(Box, sub), st.builds(And, sub, sub), st.builds(Implies, sub, sub)
        ),
        max_leaves=max_leaves,
    )


def fo_formulas(max_leaves=8):
    var = st.sampled_from(VARS)
    leaves = st.one_of(
        st.sampled_from([Atom("Q", ()), TOP, BOT]),
        st.builds(lambda v: Atom("P", (v,)), var),
        st.builds(lambda a, b: Atom("R", (a, b)), var, var),
    )
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Not, sub), st.builds(Box, sub), st.builds(And, sub, sub),
            st.builds(Implies, sub, sub), st.builds(ForAll, var, sub),
        ),
        max_leaves=max_leaves,
    )


@pytest.fixture(scope="session")
def gallery():
    from nqgl.gallery import gallery_proofs
    return gallery_proofs()
