"""Fixtures assembling the whole desk environment in-process.

Both sandbox servers run as ASGI apps behind starlette test clients; the
gateway talks to them through the same HTTP clients it would use against
real servers, so every test exercises the full wire format.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import pytest
from starlette.testclient import TestClient

from phr_timeline.accounts import AccountService, AccountStore, PasswordHasher
from phr_timeline.clock import Clock
from phr_timeline.gateway import GatewayConfig, create_gateway_app
from phr_timeline.harness import DatasetBundle, HarnessEnvironment, generate_longitudinal_dataset
from phr_timeline.hi_service import HiClient, HiRegistry, create_hi_app
from phr_timeline.pcehr_service import PcehrClient, PcehrRepository, create_pcehr_app
from phr_timeline.taxonomy import TaxonomyTable, default_taxonomy

from tests.helpers import REFERENCE_DATE

warnings.filterwarnings("ignore", category=DeprecationWarning)

TEST_ADMIN_TOKEN = "test-admin-token"
# Hashing stays real but cheap; production strength is a config knob.
TEST_HASH_ITERATIONS = 600


@dataclass
class DeskEnvironment:
    bundle: DatasetBundle
    clock: Clock
    registry: HiRegistry
    repository: PcehrRepository
    hi_client: HiClient
    pcehr_client: PcehrClient
    store: AccountStore
    service: AccountService
    config: GatewayConfig
    gateway_http: TestClient
    harness_env: HarnessEnvironment

    def activate(self) -> None:
        response = self.gateway_http.post(
            "/api/admin/activate",
            json=self.bundle.organization,
            headers={"X-Admin-Token": TEST_ADMIN_TOKEN},
        )
        assert response.status_code == 200, response.text


def build_desk_environment(
    n_patients: int = 5,
    years: int = 3,
    seed: int = 42,
    auto_connect: bool = False,
    seed_sandboxes: bool = True,
    store_path=None,
) -> DeskEnvironment:
    bundle = generate_longitudinal_dataset(n_patients, years, seed)
    clock = Clock.fixed(bundle.manifest["reference_date"])
    registry = HiRegistry()
    repository = PcehrRepository(clock=clock)
    hi_client = HiClient(TestClient(create_hi_app(registry)))
    pcehr_client = PcehrClient(TestClient(create_pcehr_app(repository)))
    store = AccountStore(store_path)
    service = AccountService(
        store=store,
        hi_client=hi_client,
        pcehr_client=pcehr_client,
        taxonomy=default_taxonomy(),
        clock=clock,
        hasher=PasswordHasher(iterations=TEST_HASH_ITERATIONS),
        auto_connect=auto_connect,
    )
    config = GatewayConfig(
        clock_override=bundle.manifest["reference_date"],
        admin_token=TEST_ADMIN_TOKEN,
        organization=bundle.organization,
    )
    gateway_http = TestClient(create_gateway_app(config, service=service))
    harness_env = HarnessEnvironment(
        gateway_http=gateway_http,
        hi=hi_client,
        pcehr=pcehr_client,
        bundle=bundle,
        admin_token=TEST_ADMIN_TOKEN,
    )
    desk = DeskEnvironment(
        bundle=bundle,
        clock=clock,
        registry=registry,
        repository=repository,
        hi_client=hi_client,
        pcehr_client=pcehr_client,
        store=store,
        service=service,
        config=config,
        gateway_http=gateway_http,
        harness_env=harness_env,
    )
    if seed_sandboxes:
        harness_env.seed_sandboxes()
    return desk


@pytest.fixture
def clock() -> Clock:
    return Clock.fixed(REFERENCE_DATE)


@pytest.fixture(scope="session")
def taxonomy_table() -> TaxonomyTable:
    return default_taxonomy()


@pytest.fixture
def desk() -> DeskEnvironment:
    return build_desk_environment()


@pytest.fixture
def activated_desk() -> DeskEnvironment:
    desk = build_desk_environment()
    desk.activate()
    return desk
