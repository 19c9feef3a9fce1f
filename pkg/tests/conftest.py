import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multiactive import corpus_path, parse_abs, parse_masp

ABS_CORPUS = [
    "bank_account.abs",
    "leader_election.abs",
    "chat.abs",
    "mapreduce.abs",
    "futures_of_futures.abs",
]
MASP_CORPUS = ["circular_hard.masp", "circular_soft.masp", "peer_policy.masp"]


def load_abs(name):
    return parse_abs(corpus_path(name).read_text(), filename=name)


def load_masp(name):
    return parse_masp(corpus_path(name).read_text(), filename=name)


@pytest.fixture
def bank():
    return load_abs("bank_account.abs")


@pytest.fixture(params=ABS_CORPUS)
def abs_corpus_program(request):
    return request.param, load_abs(request.param)


@pytest.fixture(params=MASP_CORPUS)
def masp_corpus_program(request):
    return request.param, load_masp(request.param)
