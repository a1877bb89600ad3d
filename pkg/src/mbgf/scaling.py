"""Scaling rules alpha_i(x, t) defining the balanced hull C_alpha.

Three variants ship: constant positive values, gradient-norm scaling
alpha_i = ||grad f_i(x)|| + eta, and its clamped form.  Each rule declares
bounds [alpha_min, alpha_max] valid on a problem's region and a Lipschitz
constant L_alpha of (x, t) -> alpha_i(x, t), which the Hausdorff continuity
check and the rate constants consume.  Rules may depend on t through the
interface, but none of the shipped ones do.
"""

import numpy as np

from .errors import ConfigError, DegenerateScalingError, InvalidInputError

DEGENERATE_GRAD_TOL = 1e-14


class ScalingRule:
    """One of the shipped scaling variants plus its parameters.

    Use the constant/gradnorm_eta/gradnorm_eta_clamped constructors rather
    than instantiating directly.
    """

    __slots__ = ("variant", "values", "eta", "clamp_lo", "clamp_hi")

    def __init__(self, variant, values=None, eta=None, clamp_lo=None, clamp_hi=None):
        self.variant = variant
        self.values = values
        self.eta = eta
        self.clamp_lo = clamp_lo
        self.clamp_hi = clamp_hi

    # -- evaluation ------------------------------------------------------

    def _alpha_of_norms(self, norms):
        # norms: (..., m) gradient norms; shared by alpha() and the flow
        # integrators, which already have the gradients in hand.
        if self.variant == "constant":
            return np.broadcast_to(self.values, norms.shape).copy()
        if self.variant == "gradnorm_eta" and self.eta == 0.0:
            small = norms < DEGENERATE_GRAD_TOL
            if np.any(small):
                idx = int(np.argwhere(small)[0][-1])
                raise DegenerateScalingError(
                    f"gradnorm scaling with eta = 0 hit a vanishing gradient "
                    f"(objective {idx}, norm {float(norms[..., idx].min()):.3e})",
                    index=idx, grad_norm=float(norms[..., idx].min()))
        a = norms + self.eta
        if self.variant == "gradnorm_eta_clamped":
            a = np.clip(a, self.clamp_lo, self.clamp_hi)
        return a

    def alpha(self, p, x, t):
        del t  # no shipped rule is time-dependent
        if self.variant == "constant":
            if len(self.values) != p.m:
                raise InvalidInputError(
                    f"constant scaling has {len(self.values)} values for {p.m} objectives")
            x = np.asarray(x, dtype=float)
            shape = x.shape[:-1] if x.ndim > 1 else ()
            return np.broadcast_to(self.values, shape + (p.m,)).copy()
        g = p.grads(x)
        return self._alpha_of_norms(np.linalg.norm(g, axis=-1))

    # -- declared metadata -------------------------------------------------

    def declared_bounds(self, p):
        """(alpha_min, alpha_max) valid on the problem region."""
        if self.variant == "constant":
            return float(self.values.min()), float(self.values.max())
        if self.variant == "gradnorm_eta":
            if self.eta == 0.0:
                raise InvalidInputError(
                    "gradnorm scaling with eta = 0 has no positive global lower bound")
            return float(self.eta), float(p.grad_bound + self.eta)
        lo = max(self.clamp_lo, self.eta)
        hi = min(self.clamp_hi, p.grad_bound + self.eta)
        return float(lo), float(hi)

    def declared_l_alpha(self, p):
        """Lipschitz constant of the rule on the region.

        The norm of an L-Lipschitz gradient is L-Lipschitz and clamping is
        nonexpansive, so the problem's largest regional L works for both
        gradnorm variants.
        """
        if self.variant == "constant":
            return 0.0
        return float(p.lipschitz.max())

    # -- config syntax ----------------------------------------------------

    def spec_string(self):
        if self.variant == "constant":
            return "const:" + ",".join(f"{v:.17g}" for v in self.values)
        s = f"gradnorm:eta={self.eta:.17g}"
        if self.variant == "gradnorm_eta_clamped":
            s += f",min={self.clamp_lo:.17g},max={self.clamp_hi:.17g}"
        return s

    def __repr__(self):
        return f"ScalingRule({self.spec_string()!r})"


def constant(values):
    """alpha_i(x, t) = values[i], each > 0."""
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.ndim != 1 or v.size < 1 or not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise InvalidInputError("constant scaling needs finite positive values")
    return ScalingRule("constant", values=v)


def gradnorm_eta(eta):
    """alpha_i(x, t) = ||grad f_i(x)|| + eta, eta >= 0."""
    eta = float(eta)
    if not np.isfinite(eta) or eta < 0.0:
        raise InvalidInputError("eta must be a finite real >= 0")
    return ScalingRule("gradnorm_eta", eta=eta)


def gradnorm_eta_clamped(eta, alpha_min, alpha_max):
    """Gradient-norm scaling clamped into [alpha_min, alpha_max]."""
    eta = float(eta)
    lo = float(alpha_min)
    hi = float(alpha_max)
    if not np.isfinite(eta) or eta < 0.0:
        raise InvalidInputError("eta must be a finite real >= 0")
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo <= 0.0 or hi < lo:
        raise InvalidInputError("clamp bounds need 0 < alpha_min <= alpha_max")
    return ScalingRule("gradnorm_eta_clamped", eta=eta, clamp_lo=lo, clamp_hi=hi)


def evaluate_scaling(rule, p, x, t):
    """Vector of m scaling values alpha_i(x, t)."""
    return rule.alpha(p, x, t)


def scaled_hull_generators(rule, p, x, t):
    """The m generators grad f_i(x) / alpha_i(x, t) of C_alpha."""
    g = p.grads(x)
    if rule.variant == "constant":
        if len(rule.values) != p.m:
            raise InvalidInputError(
                f"constant scaling has {len(rule.values)} values for {p.m} objectives")
        a = np.broadcast_to(rule.values, g.shape[:-1])
    else:
        a = rule._alpha_of_norms(np.linalg.norm(g, axis=-1))
    return g / a[..., None]


def parse_scaling(text):
    """Parse the config syntax: const:1,1 | gradnorm:eta=0.1 |
    gradnorm:eta=0.1,min=0.5,max=10."""
    text = text.strip()
    head, sep, rest = text.partition(":")
    if not sep:
        raise ConfigError(f"scaling: expected 'const:...' or 'gradnorm:...', got {text!r}")
    if head == "const":
        try:
            values = [float(v) for v in rest.split(",") if v != ""]
        except ValueError:
            raise ConfigError(f"scaling: bad constant values {rest!r}") from None
        if not values:
            raise ConfigError("scaling: const needs at least one value")
        try:
            return constant(values)
        except InvalidInputError as e:
            raise ConfigError(f"scaling: {e}") from None
    if head == "gradnorm":
        kv = {}
        for part in rest.split(","):
            key, s, val = part.partition("=")
            if not s:
                raise ConfigError(f"scaling: expected key=value, got {part!r}")
            if key not in ("eta", "min", "max"):
                raise ConfigError(f"scaling: unknown key {key!r}")
            if key in kv:
                raise ConfigError(f"scaling: duplicate key {key!r}")
            try:
                kv[key] = float(val)
            except ValueError:
                raise ConfigError(f"scaling: bad value for {key!r}: {val!r}") from None
        if "eta" not in kv:
            raise ConfigError("scaling: gradnorm needs eta=...")
        try:
            if "min" in kv or "max" in kv:
                if not ("min" in kv and "max" in kv):
                    raise ConfigError("scaling: clamped gradnorm needs both min= and max=")
                return gradnorm_eta_clamped(kv["eta"], kv["min"], kv["max"])
            return gradnorm_eta(kv["eta"])
        except InvalidInputError as e:
            raise ConfigError(f"scaling: {e}") from None
    raise ConfigError(f"scaling: unknown variant {head!r}")
