from rest_framework import serializers
from django.contrib.auth.models import User
import numpy as np

from .models import ExperimentRun, TrialResult
from .quantum.cutter import CutSpec
from .quantum.errors import ShadowCutError, SizeLimitError
from .quantum.pauli import Observable, PauliString
from .quantum.simulator import Circuit, Gate


class UserSerializer(serializers.ModelSerializer):

    class Meta:
        model = User
        fields = ['id', 'username', 'email', 'first_name', 'last_name']


# ---------------- circuits / cuts / observables ----------------
# wires and gate ordinals are 1-based in every JSON payload


class GateSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["haar", "named", "matrix"])
    qubits = serializers.ListField(child=serializers.IntegerField(min_value=1),
                                   allow_empty=False)
    seed = serializers.IntegerField(required=False, min_value=0)
    name = serializers.CharField(required=False)
    re = serializers.ListField(child=serializers.ListField(
        child=serializers.FloatField()),
                               required=False)
    im = serializers.ListField(child=serializers.ListField(
        child=serializers.FloatField()),
                               required=False)

    def validate(self, attrs):
        kind = attrs["kind"]
        if kind == "haar" and "seed" not in attrs:
            raise serializers.ValidationError(
                {"seed": "Haar gates need a seed."})
        if kind == "named" and not attrs.get("name"):
            raise serializers.ValidationError(
                {"name": "Named gates need a name."})
        if kind == "matrix" and "re" not in attrs:
            raise serializers.ValidationError(
                {"re": "Matrix gates need at least the real part."})
        return attrs


def build_gate(data) -> Gate:
    qubits = [q - 1 for q in data["qubits"]]
    if data["kind"] == "haar":
        return Gate.haar(qubits, data["seed"])
    if data["kind"] == "named":
        return Gate.named(data["name"], qubits)
    re = np.array(data["re"], dtype=float)
    im = np.array(data.get("im") or np.zeros_like(re), dtype=float)
    if re.shape != im.shape:
        raise ShadowCutError("re and im parts differ in shape")
    return Gate(tuple(qubits), re + 1j * im)


class CircuitSerializer(serializers.Serializer):
    n_qubits = serializers.IntegerField(min_value=1)
    gates = GateSerializer(many=True)

    def validate(self, attrs):
        n = attrs["n_qubits"]
        for i, g in enumerate(attrs["gates"]):
            if max(g["qubits"]) > n:
                raise serializers.ValidationError({
                    "gates":
                    f"gate {i + 1} uses wire {max(g['qubits'])} of {n}."
                })
        try:
            attrs["circuit"] = Circuit(n, tuple(
                build_gate(g) for g in attrs["gates"]))
        except SizeLimitError:
            # keeps its own status: 413 in views, exit 3 in commands
            raise
        except ShadowCutError as e:
            raise serializers.ValidationError({"gates": str(e)})
        return attrs


def circuit_to_json(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        qubits = [q + 1 for q in g.qubits]
        if g.kind == "haar":
            gates.append({"kind": "haar", "qubits": qubits, "seed": g.seed})
        elif g.kind == "named":
            gates.append({"kind": "named", "name": g.name, "qubits": qubits})
        else:
            gates.append({
                "kind": "matrix",
                "qubits": qubits,
                "re": g.matrix.real.tolist(),
                "im": g.matrix.imag.tolist(),
            })
    return {"n_qubits": circuit.n_qubits, "gates": gates}


def parse_circuit(data) -> Circuit:
    s = CircuitSerializer(data=data)
    s.is_valid(raise_exception=True)
    return s.validated_data["circuit"]


class CutSerializer(serializers.Serializer):
    wire = serializers.IntegerField(min_value=1)
    after_gate = serializers.IntegerField(min_value=1)


class CutsSerializer(serializers.Serializer):
    cuts = CutSerializer(many=True)

    def validate(self, attrs):
        attrs["specs"] = [CutSpec.from_json(c) for c in attrs["cuts"]]
        return attrs


def parse_cuts(data) -> list:
    s = CutsSerializer(data=data)
    s.is_valid(raise_exception=True)
    return s.validated_data["specs"]


def cuts_to_json(cuts) -> dict:
    return {"cuts": [c.to_json() for c in cuts]}


class ObservableField(serializers.Field):
    """
    Either the text form ("0.5*X1 Z2 + Y3") or
    {"terms": [{"coeff": 0.5, "ops": {"1": "X", "2": "Z"}}]}.
    """

    def to_internal_value(self, data):
        try:
            if isinstance(data, str):
                return Observable.parse(data)
            if isinstance(data, dict) and isinstance(data.get("terms"), list):
                terms = []
                for t in data["terms"]:
                    ops = {int(q) - 1: a for q, a in t.get("ops", {}).items()}
                    if any(q < 0 for q in ops):
                        raise ShadowCutError("qubit keys are 1-based")
                    terms.append(PauliString(ops, float(t.get("coeff", 1.0))))
                if not terms:
                    raise ShadowCutError("observable has no terms")
                return Observable(terms)
        except (ShadowCutError, TypeError, ValueError) as e:
            raise serializers.ValidationError(str(e))
        raise serializers.ValidationError(
            "Expected observable text or {\"terms\": [...]}.")

    def to_representation(self, value):
        return observable_to_json(value)


def observable_to_json(observable: Observable) -> dict:
    return {
        "terms": [{
            "coeff": t.coeff,
            "ops": {str(q + 1): a for q, a in t.items()}
        } for t in observable.terms]
    }


class InstanceSerializer(serializers.Serializer):
    """Circuit + cuts + observable, the input of estimate/oracle/bounds."""
    circuit = CircuitSerializer()
    cuts = CutSerializer(many=True, required=False, default=list)
    observable = ObservableField()

    def validate(self, attrs):
        circuit = attrs["circuit"]["circuit"]
        support = attrs["observable"].support
        if support and max(support) >= circuit.n_qubits:
            raise serializers.ValidationError({
                "observable":
                f"qubit {max(support) + 1} outside a "
                f"{circuit.n_qubits}-qubit circuit."
            })
        attrs["circuit"] = circuit
        attrs["cuts"] = [CutSpec.from_json(c) for c in attrs["cuts"]]
        return attrs


class EstimateRequestSerializer(InstanceSerializer):
    shots = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, default=0)
    groups = serializers.IntegerField(min_value=1, default=1)
    exact = serializers.BooleanField(default=True)


class BoundsRequestSerializer(InstanceSerializer):
    epsilon = serializers.FloatField(min_value=0, max_value=1)
    delta = serializers.FloatField(min_value=0, max_value=1)
    o_norm = serializers.FloatField(required=False, allow_null=True)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        for key in ("epsilon", "delta"):
            if not 0 < attrs[key] < 1:
                raise serializers.ValidationError(
                    {key: "Must lie strictly between 0 and 1."})
        return attrs


# ---------------- experiment runs ----------------


class TrialResultSerializer(serializers.ModelSerializer):

    class Meta:
        model = TrialResult
        fields = [
            "id", "run", "trial", "n_fragments", "shots", "obs_size",
            "estimate", "exact", "abs_error", "unobserved", "seed"
        ]


class ExperimentRunSerializer(serializers.ModelSerializer):
    rows = serializers.IntegerField(source="results.count", read_only=True)
    created_by = serializers.SerializerMethodField(read_only=True)

    def get_created_by(self, obj):
        u = getattr(obj, "created_by", None)
        if not u:
            return None
        return {"id": u.id, "username": getattr(u, "username", None)}

    class Meta:
        model = ExperimentRun
        fields = [
            "id", "clusters", "cluster_size", "trials", "base_seed",
            "penalty_mode", "estimator", "config", "meta", "csv_path",
            "complete", "created_at", "created_by", "rows"
        ]
        read_only_fields = fields
