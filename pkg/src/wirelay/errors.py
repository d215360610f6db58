"""Exception types shared across the toolkit."""


class WirelayError(Exception):
    """Base class for all toolkit errors."""


class PatternMissing(WirelayError):
    """Mesh input carries no 2D pattern (texture) coordinates."""


class NonManifold(WirelayError):
    """An edge has more than two incident faces."""

    def __init__(self, edge, count):
        super().__init__(f"edge {edge} has {count} incident faces")
        self.edge = edge
        self.count = count


class DegenerateFace(WirelayError):
    """A face has (near-)zero rest-pattern area."""

    def __init__(self, face_index, area=None):
        msg = f"face {face_index} is degenerate in pattern space"
        if area is not None:
            msg += f" (area={area:.3e} m^2)"
        super().__init__(msg)
        self.face_index = face_index
        self.area = area


class SeamEdge(WirelayError):
    """Edge crosses pattern pieces; no strip rectangle exists for it."""

    def __init__(self, edge_index):
        super().__init__(f"edge {edge_index} crosses pattern pieces")
        self.edge_index = edge_index


class MotionMismatch(WirelayError):
    """Motion frames do not align with the mesh vertex set."""


class DisconnectedTerminals(WirelayError):
    """Terminal set spans more than one connected component."""

    def __init__(self, components):
        comps = "; ".join(
            "{" + ", ".join(str(v) for v in sorted(c)) + "}" for c in components
        )
        super().__init__(f"terminals split across components: {comps}")
        self.components = [frozenset(c) for c in components]


class TerminalCapExceeded(WirelayError):
    """Too many terminals for the exact solver."""

    def __init__(self, count, cap):
        super().__init__(f"{count} terminals exceed exact-solver cap {cap}")
        self.count = count
        self.cap = cap


class OracleTooLarge(WirelayError):
    """Instance too large for the brute-force oracle."""


class CannotSatisfyCurvature(WirelayError):
    """No admissible fillet exists at a polyline corner."""

    def __init__(self, corner_index, detail=""):
        msg = f"cannot satisfy curvature bound at corner {corner_index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.corner_index = corner_index


class EmbeddingFailure(WirelayError):
    """A curve sample fell outside every pattern face."""


class ConfigError(WirelayError):
    """Invalid project configuration."""
