from django.urls import path, include
from rest_framework.routers import DefaultRouter
from rest_framework_simplejwt.views import TokenObtainPairView, TokenRefreshView
from .views import (BoundsView, EstimateView, ExperimentRunViewSet, MeView,
                    OracleView, TrialResultViewSet)

router = DefaultRouter()
router.register(r'runs', ExperimentRunViewSet)
router.register(r'trials', TrialResultViewSet)

urlpatterns = [
    path('auth/token/',
         TokenObtainPairView.as_view(),
         name='token_obtain_pair'),
    path('auth/refresh/', TokenRefreshView.as_view(), name='token_refresh'),
    path('auth/me/', MeView.as_view(), name='auth_me'),
    path('estimate/', EstimateView.as_view(), name='estimate'),
    path('oracle/', OracleView.as_view(), name='oracle'),
    path('bounds/', BoundsView.as_view(), name='bounds'),
    path('', include(router.urls)),
]
