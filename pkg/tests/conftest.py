from hypothesis import HealthCheck, settings

settings.register_profile(
    "walkembed",
    deadline=None,  # exact-arithmetic examples vary wildly in cost
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("walkembed")
