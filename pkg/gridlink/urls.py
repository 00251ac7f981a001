from django.urls import path, include

urlpatterns = [
    # API application
    path('api/', include('api.urls')),
]
