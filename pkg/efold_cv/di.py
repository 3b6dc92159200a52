from injector import Injector

from efold_cv.settings.settings import Settings, unsafe_typed_settings


def create_application_injector(settings: Settings | None = None) -> Injector:
    """Container with `Settings` bound; components and services auto-bind.

    IngestComponent and HarnessService are singletons, so one container
    shares one dataset cache across every experiment it runs.
    """
    injector = Injector(auto_bind=True)
    injector.binder.bind(Settings, to=settings or unsafe_typed_settings)
    return injector


# Entrypoints only. Tests and library callers build their own container.
global_injector: Injector = create_application_injector()
