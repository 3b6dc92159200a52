import os
from pathlib import Path

from hypothesis import HealthCheck, settings

root_path = Path(__file__).parents[1]
# settings profiles, bundled datasets and experiments resolve from the project root
os.chdir(root_path)

# learners fit on every example, so wall-clock deadlines only produce flakes
settings.register_profile(
    "efold", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "efold"))

pytest_plugins = [
    ".".join(fixture.relative_to(root_path).with_suffix("").parts)
    for fixture in sorted((root_path / "tests" / "fixtures").glob("[!_]*.py"))
]
