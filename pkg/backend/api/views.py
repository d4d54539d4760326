from rest_framework import viewsets
from rest_framework.decorators import action
from rest_framework.response import Response
from rest_framework.views import APIView
from rest_framework.permissions import IsAuthenticated
from rest_framework import status as http_status

from .models import ExperimentRun, TrialResult
from .serializers import (BoundsRequestSerializer, EstimateRequestSerializer,
                          ExperimentRunSerializer, InstanceSerializer,
                          TrialResultSerializer, UserSerializer)
from .quantum.errors import ShadowCutError, SizeLimitError
from . import services


def _domain_error(e: ShadowCutError) -> Response:
    if isinstance(e, SizeLimitError):
        return Response({"detail": str(e)},
                        status=http_status.HTTP_413_REQUEST_ENTITY_TOO_LARGE)
    return Response({"detail": str(e)},
                    status=http_status.HTTP_400_BAD_REQUEST)


class ExperimentRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = ExperimentRun.objects.select_related("created_by").all(
    ).order_by("-created_at")
    serializer_class = ExperimentRunSerializer

    @action(detail=True, methods=["get"], url_path="unobserved_stats")
    def unobserved_stats(self, request, pk=None):
        run = self.get_object()
        return Response({
            "run": run.id,
            "rows": services.unobserved_stats_for_run(run)
        })


class TrialResultViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = TrialResult.objects.all()
    serializer_class = TrialResultSerializer

    def get_queryset(self):
        qs = super().get_queryset()
        for key in ("run", "trial", "n_fragments", "shots", "obs_size"):
            value = self.request.query_params.get(key)
            if value in (None, ""):
                continue
            try:
                qs = qs.filter(**{key: int(value)})
            except ValueError:
                return qs.none()
        unobserved_ = self.request.query_params.get("unobserved")
        if unobserved_ is not None and unobserved_ != "":
            flag = str(unobserved_).lower() in ("true", "1", "yes", "y", "on")
            qs = qs.filter(unobserved=flag)
        return qs


class EstimateView(APIView):
    """
    POST /api/estimate/
      {circuit, cuts?, observable, shots, seed?, groups?, exact?}
    shots are per kappa/Gamma fragment.
    """
    permission_classes = [IsAuthenticated]

    def post(self, request):
        try:
            # oversized Haar gates surface here as SizeLimitError
            s = EstimateRequestSerializer(data=request.data)
            s.is_valid(raise_exception=True)
            d = s.validated_data
            report = services.estimate_observable(d["circuit"],
                                                  d["cuts"],
                                                  d["observable"],
                                                  shots=d["shots"],
                                                  seed=d["seed"],
                                                  groups=d["groups"],
                                                  with_exact=d["exact"])
        except ShadowCutError as e:
            return _domain_error(e)
        return Response(report.to_json())


class OracleView(APIView):
    permission_classes = [IsAuthenticated]

    def post(self, request):
        try:
            s = InstanceSerializer(data=request.data)
            s.is_valid(raise_exception=True)
            d = s.validated_data
            result = services.oracle_check(d["circuit"], d["cuts"],
                                           d["observable"])
        except ShadowCutError as e:
            return _domain_error(e)
        return Response(result)


class BoundsView(APIView):
    permission_classes = [IsAuthenticated]

    def post(self, request):
        try:
            s = BoundsRequestSerializer(data=request.data)
            s.is_valid(raise_exception=True)
            d = s.validated_data
            quotes = services.bounds_for_instance(d["circuit"], d["cuts"],
                                                  d["observable"],
                                                  d["epsilon"], d["delta"],
                                                  d.get("o_norm"))
        except ShadowCutError as e:
            return _domain_error(e)
        return Response({"quotes": quotes})


class MeView(APIView):
    permission_classes = [IsAuthenticated]

    def get(self, request):
        return Response(UserSerializer(request.user).data)
