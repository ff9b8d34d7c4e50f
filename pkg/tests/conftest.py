import hypothesis

hypothesis.settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    derandomize=True,
)
hypothesis.settings.load_profile("suite")
