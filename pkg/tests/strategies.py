from hypothesis import strategies as st

from reactsent.annotate import ReactionCounts

SINHALA = st.characters(min_codepoint=0x0D80, max_codepoint=0x0DFF)
NOISE_PIECES = st.sampled_from([
    " ", "  ", "\t", "\n", "\u200d", "\u200b", "\ufeff", "\u0007", "\u00a0", "\u3000",
    "https://ex.com/a", "www.news.lk", "@user", "#tag", "a.b@c.lk", "2020", "෧",
    "LOL", ",", ".", "!", "\U0001F600", "\ue000", "\u0378", "@", "#", "://",
])
SINHALA_WORD = st.text(SINHALA, min_size=1, max_size=6)


@st.composite
def noisy_messages(draw, max_pieces: int = 20):
    pieces = draw(st.lists(st.one_of(SINHALA_WORD, NOISE_PIECES), max_size=max_pieces))
    return "".join(pieces)


def reaction_counts(max_count: int = 10**6, allow_zero: bool = False):
    c = st.integers(0, max_count)
    counts = st.builds(ReactionCounts, love=c, wow=c, sad=c, angry=c, like=c, haha=c, thankful=c)
    if allow_zero:
        return counts
    return counts.filter(lambda r: r.love + r.wow + r.sad + r.angry > 0)
