"""Verification suites over configured parameter points.

Each suite replays one block of identities at every configured point and
returns a VerificationReport.  The default point set ships as package data
(default_config.json); a user configuration may replace any point group
wholesale, but every group it keeps must stay nonempty and the truncation
degree must stay at least 4.
"""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .algebra import LaurentPoly, ParamPoint, format_rational, rat
from .askey_wilson import (
    FULL_BASE,
    HALF_BASE,
    aw_apply,
    aw_eigenvalue,
    aw_poly,
    even_sum_forms,
    fourfold_poly,
    odd_sum_check,
    phi_series,
    psi_series,
    simplified_series,
)
from .b2 import (
    B2Weight,
    b2_character_polytope,
    b2_character_series,
    b2_conjecture_check,
    b2_row_threefold,
    f_b2_poly,
)
from .koornwinder import g_row_general, kernel_identity_check, koorn_oracle
from .macdonald_bcd import (
    FAMILY_B,
    FAMILY_C,
    FAMILY_D,
    TYPE_B,
    TYPE_C,
    FamilyTag,
    lassalle_form,
    mac_row,
    simplification_lemma_check,
    specialize_params,
)
from .qseries import qpoch, qpoch_multi
from .reports import CaseResult, VerificationReport

CONFIG_FILE = "default_config.json"

# point-group keys that are not ParamPoint fields
_EXTRA_KEYS = ("beta", "sqrt_param")


@dataclass(frozen=True)
class ConfiguredPoint:
    """A parameter point plus the extras some suites need: beta ties
    t = q^beta for the kernel identity, sqrt_param carries the free family
    parameter for the B and C specializations."""

    point: ParamPoint
    beta: Optional[int] = None
    sqrt_param: Optional[Fraction] = None

    @classmethod
    def from_json_obj(cls, obj) -> "ConfiguredPoint":
        fields = {k: v for k, v in obj.items() if k not in _EXTRA_KEYS}
        beta = obj.get("beta")
        sqrt_param = obj.get("sqrt_param")
        return cls(
            ParamPoint.from_json_obj(fields),
            beta=None if beta is None else int(beta),
            sqrt_param=None if sqrt_param is None else rat(sqrt_param),
        )

    def to_json_obj(self) -> dict:
        out = self.point.to_json_obj()
        if self.beta is not None:
            out["beta"] = self.beta
        if self.sqrt_param is not None:
            out["sqrt_param"] = format_rational(self.sqrt_param)
        return out


@dataclass(frozen=True)
class RunConfig:
    """Everything a verification run depends on besides the suite name."""

    degree: int = 12
    max_weight: int = 3
    groups: dict = field(default_factory=dict)
    cache_dir: Optional[str] = None

    def __post_init__(self):
        if self.degree < 4:
            raise ValueError("truncation degree must be at least 4")
        if self.max_weight < 0:
            raise ValueError("weight bound must be nonnegative")
        for name, pts in self.groups.items():
            if not pts:
                raise ValueError(f"point group {name!r} is empty")

    def points(self, group: str):
        if group not in self.groups:
            raise ValueError(f"no points configured for group {group!r}")
        return self.groups[group]

    @classmethod
    def from_json_obj(cls, obj, base: "RunConfig" = None) -> "RunConfig":
        if obj.get("schema") != 1:
            raise ValueError("configuration must declare schema 1")
        groups = dict(base.groups) if base is not None else {}
        for name, pts in obj.get("points", {}).items():
            groups[name] = tuple(ConfiguredPoint.from_json_obj(p) for p in pts)
        return cls(
            degree=int(obj.get("degree", base.degree if base else 12)),
            max_weight=int(obj.get("max_weight", base.max_weight if base else 3)),
            groups=groups,
            cache_dir=obj.get("cache_dir", base.cache_dir if base else None),
        )


def default_config() -> RunConfig:
    text = resources.files(__package__).joinpath(CONFIG_FILE).read_text()
    return RunConfig.from_json_obj(json.loads(text))


def _run_case(report, case_id, anchor, point_obj, degrees, check) -> None:
    t0 = time.perf_counter()
    mismatch = check()
    report.add(
        CaseResult(
            case_id,
            anchor,
            point_obj,
            degrees,
            "pass" if mismatch is None else "fail",
            mismatch,
            time.perf_counter() - t0,
        )
    )


def _merge(report, sub, old_prefix, new_prefix) -> None:
    for case in sub.cases:
        if case.case_id.startswith(old_prefix):
            case.case_id = new_prefix + case.case_id[len(old_prefix):]
        else:
            case.case_id = new_prefix + case.case_id
        report.add(case)


def _poly_mismatch(got, want) -> Optional[dict]:
    diff = got - want
    if diff.is_zero():
        return None
    exps, _ = diff.leading()
    return {
        "monomial": list(exps),
        "expected": format_rational(want.coeff(exps)),
        "got": format_rational(got.coeff(exps)),
    }


def _value_mismatch(got, want, label) -> Optional[dict]:
    if got == want:
        return None
    return {
        "value": label,
        "expected": format_rational(want),
        "got": format_rational(got),
    }


def _series_mismatch(got, want, top) -> Optional[dict]:
    for j in range(top + 1):
        if got.coeff(j) != want.coeff(j):
            return {
                "power": j,
                "expected": format_rational(want.coeff(j)),
                "got": format_rational(got.coeff(j)),
            }
    return None


def suite_askey_wilson(cfg: RunConfig) -> VerificationReport:
    """Fourfold expansion, difference equation, series recombination, and
    the terminating rescale, at every configured four-parameter point."""
    rep = VerificationReport("askey-wilson")
    for i, cp in enumerate(cfg.points("askey-wilson"), 1):
        P = cp.point
        pj = P.to_json_obj()
        for lam in range(7):

            def fourfold_check(P=P, lam=lam):
                return _poly_mismatch(fourfold_poly(lam, P), aw_poly(lam, P))

            _run_case(
                rep,
                f"aw-fourfold-p{i}-l{lam}",
                "fourfold-expansion",
                pj,
                {"weight": lam},
                fourfold_check,
            )
        for n in range(7):

            def eigen_check(P=P, n=n):
                poly = aw_poly(n, P)
                return _poly_mismatch(aw_apply(poly, P), aw_eigenvalue(n, P) * poly)

            _run_case(
                rep,
                f"aw-eigen-p{i}-n{n}",
                "difference-equation",
                pj,
                {"weight": n},
                eigen_check,
            )

        def recombine_check(P=P):
            P.require("s")
            return _series_mismatch(
                psi_series(P.s, P, cfg.degree),
                phi_series(P.s, P, cfg.degree),
                cfg.degree,
            )

        _run_case(
            rep,
            f"aw-series-p{i}",
            "series-recombination",
            pj,
            {"truncation": cfg.degree},
            recombine_check,
        )
        for m in range(1, 5):

            def rescale_check(P=P, m=m):
                a, q = P.a, P.q
                ser = psi_series(q**-m, P, 2 * m + 2)
                for j in range(2 * m + 1, 2 * m + 3):
                    if ser.coeff(j) != 0:
                        return {
                            "power": j,
                            "expected": "0",
                            "got": format_rational(ser.coeff(j)),
                        }
                head = qpoch(P.abcd() * q ** (m - 1), q, m) / qpoch_multi(
                    (a * P.b, a * P.c, a * P.d), q, m
                )
                rescaled = LaurentPoly(
                    1,
                    {(j - m,): a**m * head * ser.coeff(j) for j in range(2 * m + 1)},
                )
                bare = aw_poly(m, P) * (
                    a**m / qpoch_multi((a * P.b, a * P.c, a * P.d), q, m)
                )
                return _poly_mismatch(rescaled, bare)

            _run_case(
                rep,
                f"aw-rescale-p{i}-m{m}",
                "terminating-rescale",
                pj,
                {"weight": m},
                rescale_check,
            )
    return rep


def suite_bibasic(cfg: RunConfig) -> VerificationReport:
    """Even-sum forms, the a/c swap, odd closed forms, and both tied-point
    collapses of the fourfold series."""
    rep = VerificationReport("bibasic")
    half = cfg.degree // 2
    simp_deg = max(4, cfg.degree - 2)
    for i, cp in enumerate(cfg.points("askey-wilson"), 1):
        P = cp.point
        P.require("s")
        s = P.s
        pj = P.to_json_obj()

        def even_check(P=P, s=s):
            forms = even_sum_forms(s, P, half)
            routes = (
                ("closed", forms.closed),
                ("bibasic-split", forms.bibasic_split),
                ("bibasic-coupled", forms.bibasic_coupled),
            )
            for K in range(half + 1):
                for name, vals in routes:
                    if vals[K] != forms.raw[K]:
                        return {
                            "power": 2 * K,
                            "route": name,
                            "expected": format_rational(forms.raw[K]),
                            "got": format_rational(vals[K]),
                        }
            return None

        _run_case(
            rep,
            f"bib-even-p{i}",
            "even-sum-forms",
            pj,
            {"max_power": 2 * half},
            even_check,
        )

        def watson_check(P=P, s=s):
            swapped = P.replace(a=P.c, c=P.a)
            first = even_sum_forms(s, P, half).closed
            second = even_sum_forms(s, swapped, half).closed
            for K in range(half + 1):
                if first[K] != second[K]:
                    return {
                        "power": 2 * K,
                        "expected": format_rational(first[K]),
                        "got": format_rational(second[K]),
                    }
            return None

        _run_case(
            rep,
            f"bib-watson-p{i}",
            "watson-symmetry",
            pj,
            {"max_power": 2 * half},
            watson_check,
        )
        for l in range(7):

            def odd_check(P=P, s=s, l=l):
                direct, closed = odd_sum_check(l, s, P)
                return _value_mismatch(direct, closed, f"odd sum, degree {l}")

            _run_case(
                rep,
                f"bib-odd-p{i}-l{l}",
                "odd-sum-closed",
                pj,
                {"degree": l},
                odd_check,
            )
    for variant, group, anchor in (
        (HALF_BASE, "tied-half", "half-base-collapse"),
        (FULL_BASE, "tied-full", "full-base-collapse"),
    ):
        for i, cp in enumerate(cfg.points(group), 1):
            P = cp.point
            P.require("s")

            def tied_check(P=P, variant=variant):
                return _series_mismatch(
                    simplified_series(variant, P.s, P, simp_deg),
                    phi_series(P.s, P, simp_deg),
                    simp_deg,
                )

            _run_case(
                rep,
                f"bib-{group}-p{i}",
                anchor,
                P.to_json_obj(),
                {"truncation": simp_deg},
                tied_check,
            )
    for variant, group in ((TYPE_C, "lemma-c"), (TYPE_B, "lemma-b")):
        for i, cp in enumerate(cfg.points(group), 1):
            cp.point.require("s")
            sub = simplification_lemma_check(variant, cp.point.s, cp.point, simp_deg)
            _merge(rep, sub, "lemma-", f"bib-p{i}-lemma-")
    return rep


def suite_koornwinder(cfg: RunConfig, ranks=None, rows=None) -> VerificationReport:
    """One-row formula against the cached operator oracle, scaled by the
    row head (t;q)_r / (q;q)_r."""
    rep = VerificationReport("koornwinder")
    for i, cp in enumerate(cfg.points("koornwinder"), 1):
        P = cp.point
        pj = P.to_json_obj()
        for n in ranks or (1, 2, 3):
            default_rows = range(5 if n < 3 else 4)
            for r in rows if rows is not None else default_rows:

                def row_check(P=P, n=n, r=r):
                    head = qpoch(P.t, P.q, r) / qpoch(P.q, P.q, r)
                    want = koorn_oracle((r,), P, n) * head
                    return _poly_mismatch(g_row_general(r, P, n), want)

                _run_case(
                    rep,
                    f"koorn-p{i}-n{n}-r{r:02d}",
                    "row-head-ratio",
                    pj,
                    {"rank": n, "row": r},
                    row_check,
                )
    return rep


def family_tag(family: str, cp: ConfiguredPoint) -> FamilyTag:
    if family == FAMILY_D:
        return FamilyTag(FAMILY_D)
    if cp.sqrt_param is None:
        raise ValueError(f"family {family} needs sqrt_param on the configured point")
    return FamilyTag(family, cp.sqrt_param)


def suite_lassalle(cfg: RunConfig, families=None, ranks=None, rows=None) -> VerificationReport:
    """Both one-row displays for the three classical specializations against
    the operator oracle at the specialized point."""
    rep = VerificationReport("lassalle")
    for i, cp in enumerate(cfg.points("macdonald"), 1):
        pj = cp.to_json_obj()
        for fam in families or (FAMILY_B, FAMILY_C, FAMILY_D):
            tag = family_tag(fam, cp)
            Q = specialize_params(tag, cp.point)
            for n in ranks or (1, 2):
                for r in rows if rows is not None else range(5):
                    stem = f"las-{fam.lower()}-p{i}-n{n}-r{r}"
                    degrees = {"family": fam, "rank": n, "row": r}

                    def row_check(tag=tag, Q=Q, P=cp.point, n=n, r=r):
                        return _poly_mismatch(
                            mac_row(tag, r, P, n), koorn_oracle((r,), Q, n)
                        )

                    _run_case(rep, stem + "-row", "family-row", pj, degrees, row_check)

                    def positive_check(tag=tag, Q=Q, P=cp.point, n=n, r=r):
                        return _poly_mismatch(
                            lassalle_form(tag, r, P, n), koorn_oracle((r,), Q, n)
                        )

                    _run_case(
                        rep, stem + "-positive", "positive-power-row", pj, degrees,
                        positive_check,
                    )
    return rep


def suite_b2(cfg: RunConfig) -> VerificationReport:
    """Rank-two conjecture sweep up to the configured weight bound, the
    threefold single-row formula, and the one-parameter character collapse."""
    rep = VerificationReport("b2")
    bound = cfg.max_weight
    for i, cp in enumerate(cfg.points("b2"), 1):
        P = cp.point
        pj = P.to_json_obj()
        for total in range(bound + 1):
            for r1 in range(total + 1):
                _merge(rep, b2_conjecture_check(r1, total - r1, P), "b2-", f"b2-p{i}-")
        for r in range(bound + 1):

            def threefold_check(P=P, r=r):
                return _poly_mismatch(b2_row_threefold(r, P), f_b2_poly(B2Weight(r, 0), P))

            _run_case(
                rep,
                f"b2-p{i}-threefold-r{r}",
                "threefold-row",
                pj,
                {"row": r},
                threefold_check,
            )
    for i, cp in enumerate(cfg.points("b2-character"), 1):
        P = cp.point
        pj = P.to_json_obj()
        for total in range(min(bound, 2) + 1):
            for r1 in range(total + 1):
                r2 = total - r1

                def char_check(P=P, r1=r1, r2=r2):
                    return _poly_mismatch(
                        b2_character_series(B2Weight(r1, r2), P),
                        b2_character_polytope(r1, r2),
                    )

                _run_case(
                    rep,
                    f"b2-char-c{i}-r{r1}{r2}",
                    "character-collapse",
                    pj,
                    {"weight": [r1, r2]},
                    char_check,
                )
    return rep


def suite_kernel(cfg: RunConfig) -> VerificationReport:
    """Truncated kernel-function identity at rank two for each tied point."""
    rep = VerificationReport("kernel")
    for i, cp in enumerate(cfg.points("kernel"), 1):
        if cp.beta is None:
            raise ValueError("kernel points must carry beta")
        sub = kernel_identity_check(2, cp.beta, 6, cp.point)
        _merge(rep, sub, "kernel-", f"kernel-p{i}-")
    return rep


SUITES = {
    "askey-wilson": suite_askey_wilson,
    "bibasic": suite_bibasic,
    "koornwinder": suite_koornwinder,
    "lassalle": suite_lassalle,
    "b2": suite_b2,
    "kernel": suite_kernel,
}

SUITE_NAMES = ("all",) + tuple(sorted(SUITES))


def run_suite(name: str, cfg: RunConfig, families=None, ranks=None, rows=None):
    """Run one named suite, or every suite merged under the name "all"."""
    narrowed = {"families": families, "ranks": ranks, "rows": rows}
    if name == "all":
        if any(v is not None for v in narrowed.values()):
            raise ValueError("the combined suite takes no narrowing options")
        rep = VerificationReport("all")
        for key in sorted(SUITES):
            for case in SUITES[key](cfg).cases:
                rep.add(case)
        return rep
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    if name == "koornwinder":
        return suite_koornwinder(cfg, ranks=ranks, rows=rows)
    if name == "lassalle":
        return suite_lassalle(cfg, families=families, ranks=ranks, rows=rows)
    if any(v is not None for v in narrowed.values()):
        raise ValueError(f"suite {name!r} takes no narrowing options")
    return SUITES[name](cfg)
