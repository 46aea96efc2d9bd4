import pytest
from hypothesis import given, settings, strategies as st

from rposcan.mutations import (
    MutationTechnique,
    TechniqueNotApplicable,
    applicable_techniques,
    expand_stylesheet_targets,
    mutate,
)
from rposcan.payloads import NewlineVariant, build_reflection_payload, generate_nonce
from rposcan.urls import browser_base_directory, parse_url, serialize_url, server_view

T = MutationTechnique
PAYLOAD = build_reflection_payload(generate_nonce(0), NewlineVariant.LF)
P = PAYLOAD.encoded_text


def u(path, query=None):
    text = "http://example.com" + path
    if query is not None:
        text += "?" + query
    return parse_url(text)


def test_applicable_plain_page():
    techniques = applicable_techniques(u("/page.asp"))
    assert T.PATH_PARAM_SIMPLE in techniques
    assert T.ENCODED_PATH in techniques
    assert T.ENCODED_QUERY not in techniques
    assert T.PATH_PARAM_SLASH not in techniques
    assert T.COOKIE not in techniques


def test_applicable_semicolon_params():
    assert T.PATH_PARAM_SEMICOLON in applicable_techniques(u("/page.jsp;p1;p2"))


def test_applicable_slash_params():
    assert T.PATH_PARAM_SLASH in applicable_techniques(u("/page.php/p1/p2"))
    assert T.PATH_PARAM_SLASH not in applicable_techniques(u("/page.php/"))


def test_applicable_query_and_cookies():
    assert T.ENCODED_QUERY in applicable_techniques(u("/page.html", "k1=v1&k2=v2"))
    assert T.COOKIE in applicable_techniques(u("/x"), {"sid": "1"})


def test_fixed_ordering():
    techniques = applicable_techniques(u("/page.php/p1;a/p2", "k=v"), {"c": "1"})
    assert techniques == [
        T.PATH_PARAM_SIMPLE,
        T.PATH_PARAM_SLASH,
        T.PATH_PARAM_SEMICOLON,
        T.ENCODED_PATH,
        T.ENCODED_QUERY,
        T.COOKIE,
    ]


def test_mutate_path_param_simple():
    out = mutate(u("/page.asp"), T.PATH_PARAM_SIMPLE, PAYLOAD, slash_padding=2)
    assert out.url.path == f"/page.asp/{P}//"


def test_mutate_path_techniques_preserve_query():
    out = mutate(u("/page.asp", "id=9"), T.PATH_PARAM_SIMPLE, PAYLOAD, slash_padding=2)
    assert out.url.query == "id=9"


def test_mutate_path_param_slash():
    out = mutate(u("/page.php/param1/param2"), T.PATH_PARAM_SLASH, PAYLOAD, slash_padding=2)
    assert out.url.path == f"/page.php/{P}param1/{P}param2//"


def test_mutate_path_param_semicolon():
    out = mutate(u("/page.jsp;param1;param2"), T.PATH_PARAM_SEMICOLON, PAYLOAD, slash_padding=2)
    assert out.url.path == f"/page.jsp;{P}param1;{P}param2//"


def test_mutate_encoded_query():
    out = mutate(u("/page.html", "k1=v1&k2=v2"), T.ENCODED_QUERY, PAYLOAD, slash_padding=2)
    assert out.url.path == f"/page.html%3Fk1={P}v1&k2={P}v2//"
    assert out.url.query is None


def test_mutate_encoded_path_canonical_equivalence():
    original = u("/dir/page.aspx")
    out = mutate(original, T.ENCODED_PATH, PAYLOAD, slash_padding=0)
    assert server_view(out.url) == server_view(original)
    assert P in out.url.path


def test_mutate_cookie():
    out = mutate(
        u("/page.php"), T.COOKIE, PAYLOAD, slash_padding=2, cookies={"k1": "v1", "k2": "v2"}
    )
    assert out.url.path == "/page.php//"
    assert out.extra_cookies == {"k1": P + "v1", "k2": P + "v2"}
    assert P not in serialize_url(out.url)


def test_mutate_cookie_keeps_query():
    out = mutate(u("/page.php", "key=value"), T.COOKIE, PAYLOAD, slash_padding=2, cookies={"k": "v"})
    assert serialize_url(out.url).endswith("/page.php//?key=value")


def test_mutate_rejects_inapplicable():
    with pytest.raises(TechniqueNotApplicable):
        mutate(u("/page.asp"), T.ENCODED_QUERY, PAYLOAD)


def test_expand_stylesheet_targets():
    mutated = mutate(u("/page.asp"), T.PATH_PARAM_SIMPLE, PAYLOAD, slash_padding=2)
    targets = expand_stylesheet_targets(mutated, ["../style.css"])
    assert [t.path for t in targets] == [f"/page.asp/{P}/style.css"]


def test_expand_deduplicates_preserving_order():
    mutated = mutate(u("/page.asp"), T.PATH_PARAM_SIMPLE, PAYLOAD)
    targets = expand_stylesheet_targets(mutated, ["a.css", "b.css", "a.css"])
    assert [t.path.rsplit("/", 1)[1] for t in targets] == ["a.css", "b.css"]


@pytest.mark.parametrize("depth", range(20))
def test_padding_sufficiency(depth):
    mutated = mutate(u("/page.asp"), T.PATH_PARAM_SIMPLE, PAYLOAD, slash_padding=20)
    ref = "../" * depth + "style.css"
    resolved = expand_stylesheet_targets(mutated, [ref])[0]
    assert P in resolved.path


_PATHS = st.lists(
    st.sampled_from(["a", "dir", "page.aspx", "x7", "p%41q", "idx.php", "v-2"]),
    min_size=1,
    max_size=4,
).map(lambda segs: "/" + "/".join(segs))


@settings(max_examples=200)
@given(_PATHS)
def test_encoded_path_equivalence_on_corpus(path):
    original = u(path)
    out = mutate(original, T.ENCODED_PATH, PAYLOAD)
    assert server_view(out.url) == server_view(original)


@settings(max_examples=100)
@given(_PATHS, st.sampled_from(list(T)))
def test_host_scheme_preserved_and_views_diverge(path, technique):
    original = u(path, "k=v")
    cookies = {"sid": "abc"}
    if technique not in applicable_techniques(original, cookies):
        return
    out = mutate(original, technique, PAYLOAD, cookies=cookies)
    assert out.url.host == original.host
    assert out.url.scheme == original.scheme
    diverged = browser_base_directory(out.url) != browser_base_directory(original)
    assert diverged or out.extra_cookies != {}
