from django.urls import path, include
from .views import DefaultConfigView, SimulationView

app_name = 'api'

urlpatterns = [
    # API Version 1
    path('v1/', include([
        path('config/default/', DefaultConfigView.as_view(), name='default_config'),
        path('simulations/', SimulationView.as_view(), name='simulations'),
    ])),
]
