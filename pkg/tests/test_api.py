import pytest
from fastapi.testclient import TestClient

import config
from conftest import fixture_text
from main import app

client = TestClient(app)


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setattr(config, 'QPR_API_KEY', 'secret')
    return 'secret'


def test_root_and_health():
    assert client.get('/').json()['health'] == '/api/v1/health'
    assert client.get('/api/v1/health').json() == {'status': 'healthy', 'service': 'QP Reduction API'}


def test_reduce_report():
    response = client.post('/api/v1/reduce', json={'source': fixture_text('euler.qp'), 'policy': 'cvm'})
    assert response.status_code == 200
    data = response.json()
    assert data['schema'] == 'qpr-report/1'
    assert data['reduction']['B_prime'] == [['1', '0', '0'], ['1', '1', '0'], ['1', '0', '1']]
    assert 'error' not in data


def test_not_reducible_is_still_a_report():
    response = client.post('/api/v1/conditions', json={'source': fixture_text('maxwell_bloch.qp')})
    assert response.status_code == 200
    assert response.json()['exit_status'] == 2


def test_input_error_is_bad_request():
    response = client.post('/api/v1/parse', json={'source': "x' = b*x\n"})
    assert response.status_code == 400
    detail = response.json()['detail']
    assert detail['type'] == 'UnknownSymbolError'
    assert (detail['line'], detail['col']) == (1, 6)


def test_missing_source_is_rejected():
    assert client.post('/api/v1/parse', json={}).status_code == 422


def test_api_key(api_key):
    body = {'source': fixture_text('halphen.qp')}
    assert client.post('/api/v1/classify', json=body).status_code == 401
    assert client.post('/api/v1/classify', json=body, headers={'X-API-Key': 'wrong'}).status_code == 401
    response = client.post('/api/v1/classify', json=body, headers={'X-API-Key': api_key})
    assert response.status_code == 200
    assert response.json()['case'] == 'CaseII'
