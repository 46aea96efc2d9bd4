import json
import pathlib

import pytest
import requests

from rposcan.httpclient import HttpRequest
from rposcan.mock_target import (
    DOCTYPE_QUIRKS,
    InProcessClient,
    PortInUse,
    Routing,
    Sink,
    SinkFilter,
    TargetConfig,
    compute_ground_truth,
    config_from_dict,
    config_to_dict,
    fixture_matrix,
    handle_request,
    load_matrix,
    route_request,
    serve,
)
from rposcan.rendering import default_profiles
from rposcan.urls import parse_url, server_view

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def _get(config, target, cookies=None, headers=None):
    request = HttpRequest(
        url="http://mock.test" + target, headers=headers or {}, cookies=cookies or {}
    )
    return handle_request(config, request)


def test_pathinfo_serves_page_for_suffixed_url():
    config = TargetConfig(name="t", routing=Routing.PATH_INFO_REWRITE)
    plain = _get(config, "/app/page.php")
    suffixed = _get(config, "/app/page.php/PAYLOAD//")
    assert plain.status == 200
    assert suffixed.status == 200
    assert b"PAYLOAD" in suffixed.body  # echo-url sink
    assert b'rel="stylesheet"' in suffixed.body


def test_exactfile_404s_suffixed_url_and_echoes():
    config = TargetConfig(name="t", routing=Routing.EXACT_FILE)
    resp = _get(config, "/app/page.php/PAYLOAD//")
    assert resp.status == 404
    assert b"/app/page.php/PAYLOAD//" in resp.body

    silent = TargetConfig(name="t", routing=Routing.EXACT_FILE, error_page_echoes_url=False)
    resp = _get(silent, "/app/page.php/PAYLOAD//")
    assert resp.status == 404
    assert b"PAYLOAD" not in resp.body


def test_encoded_slash_decode_routes_by_canonical_path():
    config = TargetConfig(
        name="t", routing=Routing.ENCODED_SLASH_DECODE, page_path="/app/page.aspx"
    )
    mutated = "/app/PAYLOAD%2F..%2Fpage.aspx"
    canonical = server_view(parse_url("http://mock.test" + mutated)).canonical_path
    assert canonical == "/app/page.aspx"
    resp = _get(config, mutated)
    assert resp.status == 200
    assert b"PAYLOAD" in resp.body


def test_semicolon_routing_strips_params():
    config = TargetConfig(
        name="t", routing=Routing.SEMICOLON_PARAMS, page_path="/app/page.jsp"
    )
    resp = _get(config, "/app/page.jsp;Pp1;Pp2//")
    assert resp.status == 200


def test_encoded_query_resurrection():
    config = TargetConfig(
        name="t",
        routing=Routing.ENCODED_SLASH_DECODE,
        sinks=frozenset({Sink.ECHO_QUERY_VALUES}),
    )
    kind, pairs = route_request(config, "/app/page.php%3Fk1=PAYLOADv1&k2=v2//")
    assert kind == "page"
    assert ("k1", "PAYLOADv1") in pairs


def test_cookie_echo_sink():
    config = TargetConfig(
        name="t",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_COOKIE_VALUES}),
    )
    resp = _get(config, "/app/page.php//", cookies={"sid": "PAYLOADabc"})
    assert b"PAYLOADabc" in resp.body


def test_referrer_echo_sink_decodes_once():
    config = TargetConfig(
        name="t",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_REFERRER}),
    )
    resp = _get(config, "/app/page.php//", headers={"Referer": "http://x/%7BPAYLOAD%7D"})
    assert b"{PAYLOAD}" in resp.body


def test_sink_filters():
    raw = TargetConfig(name="t", routing=Routing.PATH_INFO_REWRITE)
    sanitized = TargetConfig(
        name="t", routing=Routing.PATH_INFO_REWRITE, sink_filter=SinkFilter.SANITIZE
    )
    dropped = TargetConfig(
        name="t",
        routing=Routing.PATH_INFO_REWRITE,
        sink_filter=SinkFilter.DROP,
        error_page_echoes_url=False,
    )
    target = "/app/page.php/%7Bpayload%7D//"
    assert b"{payload}" in _get(raw, target).body
    body = _get(sanitized, target).body
    assert b"payload" in body and b"{payload}" not in body
    assert b"payload" not in _get(dropped, target).body


def test_headers_and_doctype_emission():
    config = TargetConfig(
        name="t",
        routing=Routing.PATH_INFO_REWRITE,
        doctype=DOCTYPE_QUIRKS,
        nosniff=True,
        x_frame_options="DENY",
        x_ua_compatible="IE=edge",
        emit_base_tag=True,
    )
    resp = _get(config, "/app/page.php")
    assert resp.headers["X-Content-Type-Options"] == "nosniff"
    assert resp.headers["X-Frame-Options"] == "DENY"
    assert resp.headers["X-UA-Compatible"] == "IE=edge"
    assert b"<!DOCTYPE html PUBLIC" in resp.body
    assert b"<base href=" in resp.body


def test_real_stylesheet_served_as_css():
    config = TargetConfig(
        name="t",
        routing=Routing.ENCODED_SLASH_DECODE,
        stylesheet_refs=["style.css"],
        serve_real_stylesheets=True,
    )
    resp = _get(config, "/app/style.css")
    assert resp.status == 200
    assert resp.headers["Content-Type"] == "text/css"


def test_handle_request_deterministic():
    config = TargetConfig(name="t", routing=Routing.PATH_INFO_REWRITE)
    request = HttpRequest(url="http://mock.test/app/page.php/x//", cookies={"a": "1"})
    first = handle_request(config, request)
    second = handle_request(config, request)
    assert first.body == second.body
    assert first.headers == second.headers
    assert first.status == second.status


def test_in_process_client_requires_known_host():
    from rposcan.httpclient import NetworkError

    client = InProcessClient({"known.test": TargetConfig(name="t", routing=Routing.EXACT_FILE)})
    with pytest.raises(NetworkError):
        client.fetch(HttpRequest(url="http://unknown.test/x"))


def test_serve_liveness_and_shutdown():
    config = TargetConfig(name="t", routing=Routing.PATH_INFO_REWRITE)
    handle = serve(config, port=0)
    try:
        url = f"http://127.0.0.1:{handle.port}/app/page.php/x//"
        resp = requests.get(url, timeout=5)
        assert resp.status_code == 200
        assert "/app/page.php/x//" in resp.text
    finally:
        handle.shutdown()
    with pytest.raises(requests.ConnectionError):
        requests.get(f"http://127.0.0.1:{handle.port}/", timeout=2)


def test_two_servers_behave_independently():
    first = serve(TargetConfig(name="a", routing=Routing.PATH_INFO_REWRITE), port=0)
    second = serve(TargetConfig(name="b", routing=Routing.EXACT_FILE), port=0)
    try:
        target = "/app/page.php/x//"
        a = requests.get(f"http://127.0.0.1:{first.port}{target}", timeout=5)
        b = requests.get(f"http://127.0.0.1:{second.port}{target}", timeout=5)
        assert a.status_code == 200
        assert b.status_code == 404
    finally:
        first.shutdown()
        second.shutdown()


def test_port_in_use():
    config = TargetConfig(name="t", routing=Routing.EXACT_FILE)
    handle = serve(config, port=0)
    try:
        with pytest.raises(PortInUse):
            serve(config, port=handle.port)
    finally:
        handle.shutdown()


def test_config_round_trips_through_json():
    config = TargetConfig(
        name="t",
        routing=Routing.SEMICOLON_PARAMS,
        sinks=frozenset({Sink.ECHO_URL, Sink.ECHO_COOKIE_VALUES}),
        seed_cookies={"a": "1"},
        doctype=DOCTYPE_QUIRKS,
        sink_filter=SinkFilter.SANITIZE,
    )
    assert config_from_dict(json.loads(json.dumps(config_to_dict(config)))) == config


def test_committed_matrix_matches_regenerated():
    committed = load_matrix(str(FIXTURES / "mock_matrix.json"))
    regenerated = fixture_matrix(default_profiles())
    assert len(committed) == len(regenerated)
    for (c_cfg, c_truth), (r_cfg, r_truth) in zip(committed, regenerated):
        assert c_cfg == r_cfg
        assert c_truth == r_truth


def test_ground_truth_consistent_with_flags():
    profiles = default_profiles()
    for config, truth in fixture_matrix(profiles):
        recomputed = compute_ground_truth(config, profiles)
        assert recomputed == truth, config.name
        if truth.vulnerable:
            assert truth.technique is not None
        else:
            assert truth.reason is not None
