import os

from hypothesis import settings

# property tests draw the same examples on every run, matching the package's
# byte-deterministic output policy; export HYPOTHESIS_PROFILE=explore to search
settings.register_profile("fixed", derandomize=True)
settings.register_profile("explore", derandomize=False, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fixed"))
