"""Experiment orchestration: configs, subcommands, reports, witness replay.

Reports separate a deterministic ``body`` from volatile ``meta`` (wall
clock): identical config and seed produce byte-identical body JSON.  Every
refutation or found witness is stored self-contained under ``witnesses`` so
``replay`` can re-evaluate it against nothing but the config echo.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict

from . import words as W
from .actions import GroupModel, act, group_from_json, orbit_points
from .algebra import (
    brooks,
    brooks_qm,
    check_sigma_invariance,
    extension_defect,
    homogeneity_suite,
    homogeneous_brooks_qm,
    orbit_average,
    restriction_check,
    sigma_act,
    swap_extension,
    transfer_extend,
    word_length_qm,
)
from .contraction import (
    CertBudget,
    ConstantLedger,
    certify_contracting,
    check_dichotomy,
    check_reverse_triangle,
    check_stability,
    check_thin_triangle,
    check_variation,
    projection_diameter_under_ball,
)
from .errors import BudgetError, CatqmError, ConfigError, InputError
from .expressway import (
    ExpresswaySystem,
    LambdaSamples,
    check_lambda_properties,
    check_witness_confinement,
    defect_estimate,
    enumerate_relevant_expressways,
    homogenize,
    independence_matrix,
    modified_length,
    phi_evaluator,
    phi_sigma,
)
from .rank_one import (
    half_flat_control,
    independence_test,
    rank_one_test,
    schottky_exponent,
)
from .samplers import (
    dd_triples_random,
    dd_triples_tree_exhaustive,
    defect_pairs_exhaustive,
    ft_quads_random,
    ft_quads_tree_exhaustive,
    halfplane_thin_configs,
    halfplane_variation_configs,
    random_words,
    rng_for,
    tree_dichotomy_configs,
    tree_triples_exhaustive,
    tree_variation_configs,
)
from .spaces import space_from_json, check_dd, check_ft, vertex
from .wpd import (
    build_family,
    conjugate_power_test,
    equiv_search,
    sampled_hausdorff,
    wpd_count,
)

SCHEMA = "catqm-report/1"
CONFIG_SCHEMA = "catqm-config/1"

SUBCOMMANDS = ("axioms", "contract", "qm", "rank1", "schottky", "wpd",
               "equiv", "algebra", "all")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


@dataclass
class Budgets:
    ball_radius: int = 5
    ball_samples: int = 64
    n_max: int = 6
    power_max: int = 5
    word_len_max: int = 4
    enum_margin: float = 2.0
    candidate_cap: int = 20000
    center_radius: float = 4.0
    grid_max: int = 8
    sample_count: int = 200
    defect_radius: int = 3
    equiv_k: float = 2.0
    wpd_c: float = 2.0
    schottky_e: float = 1.0
    schottky_cap: int = 8
    family_count: int = 2

    def validate(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise ConfigError(f"budget {name} must be positive, got {value}")

    def scaled(self, factor: float) -> "Budgets":
        if factor <= 0:
            raise ConfigError("budget scale must be positive")
        data = asdict(self)
        for name, value in data.items():
            if isinstance(value, int):
                data[name] = max(1, int(round(value * factor)))
            else:
                data[name] = value * factor
        return Budgets(**data)


@dataclass
class ExperimentConfig:
    space: object
    group: GroupModel
    sigma_word: W.Word
    basepoint: object
    C: float
    B: float
    budgets: Budgets
    seed: int
    tolerance: float
    independence_words: list = field(default_factory=list)
    companion_word: W.Word | None = None
    raw: dict = field(default_factory=dict)

    @property
    def ledger(self) -> ConstantLedger:
        return ConstantLedger(C=self.C, B=self.B)

    def cert_budget(self) -> CertBudget:
        return CertBudget(center_radius=self.budgets.center_radius,
                          ball_samples=self.budgets.ball_samples)

    def system(self) -> ExpresswaySystem:
        return ExpresswaySystem(
            self.space, self.group, self.sigma_word, self.basepoint,
            ledger=self.ledger, margin=self.budgets.enum_margin,
            enum_radius=self.budgets.ball_radius,
            candidate_cap=self.budgets.candidate_cap)

    def echo(self) -> dict:
        return self.raw


def config_from_json(data: dict) -> ExperimentConfig:
    if data.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(f"config schema must be {CONFIG_SCHEMA!r}")
    try:
        space = space_from_json(data["space"])
        group = group_from_json(data["group"])
        sigma = W.from_string(data["sigma_word"])
        if "basepoint" in data and data["basepoint"] != "default":
            basepoint = space.point_from_json(data["basepoint"])
        else:
            basepoint = space.basepoint()
        constants = data.get("constants", {})
        budgets = Budgets(**data.get("budgets", {}))
        budgets.validate()
        companion = data.get("companion_word")
        return ExperimentConfig(
            space=space, group=group, sigma_word=sigma, basepoint=basepoint,
            C=float(constants.get("C", 1.0)), B=float(constants.get("B", 1.0)),
            budgets=budgets, seed=int(data.get("seed", 0)),
            tolerance=float(data.get("tolerance", 1e-6)),
            independence_words=[W.from_string(w)
                                for w in data.get("independence_words", [])],
            companion_word=None if companion is None else W.from_string(companion),
            raw=data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_json(data)


def _companion(cfg: ExperimentConfig) -> W.Word:
    if cfg.companion_word is not None:
        return cfg.companion_word
    # default companion: the base word with the first two generators swapped
    swap = {1: 2, 2: 1}
    return tuple((swap.get(x, x) if x > 0 else -swap.get(-x, -x))
                 for x in reversed(cfg.sigma_word))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def run_axioms(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    budgets = cfg.budgets
    if space.kind == "tree":
        dd_sampler = dd_triples_tree_exhaustive(space, 3, 2)
        ft_sampler = ft_quads_tree_exhaustive(space, min(4, budgets.ball_radius))
    else:
        dd_sampler = dd_triples_random(space, cfg.seed, budgets.sample_count)
        ft_sampler = ft_quads_random(space, cfg.seed, budgets.sample_count)
    dd = check_dd(space, dd_sampler, cfg.C, cfg.tolerance)
    ft = check_ft(space, ft_sampler, cfg.C, cfg.tolerance)
    violations = [{"check": "dd", **v.data} for v in dd]
    violations += [{"check": "ft", **v.data} for v in ft]

    rng = rng_for(cfg.seed, "axioms-extra")
    from .samplers import random_point
    triangle_bad = 0
    idem_bad = 0
    for _ in range(min(200, budgets.sample_count)):
        x, y, z = (random_point(space, rng) for _ in range(3))
        if space.distance(x, z) > space.distance(x, y) + space.distance(y, z) + cfg.tolerance:
            triangle_bad += 1
        if space.distance(x, y) > 0.25:
            seg = space.geodesic(x, y)
            p1 = space.project(z, seg)
            p2 = space.project(p1.point, seg)
            if space.distance(p1.point, p2.point) > cfg.tolerance + 1e-6:
                idem_bad += 1
    if triangle_bad:
        violations.append({"check": "triangle-inequality", "count": triangle_bad})
    if idem_bad:
        violations.append({"check": "projection-idempotence", "count": idem_bad})
    section = {
        "dd_violations": len(dd),
        "ft_violations": len(ft),
        "triangle_violations": triangle_bad,
        "idempotence_violations": idem_bad,
        "C": cfg.C,
    }
    return section, violations, []


def _tree_lemma_suite(cfg: ExperimentConfig) -> tuple[dict, list]:
    space, ledger = cfg.space, cfg.ledger
    budget = cfg.cert_budget()
    radius = min(4, cfg.budgets.ball_radius)
    counts = {}
    violations = []

    def tally(name, outcome):
        bucket = counts.setdefault(name, {"holds": 0, "skipped": 0, "violated": 0})
        bucket[outcome.status] += 1
        if outcome.status == "violated":
            violations.append({"lemma": name, "value": outcome.value,
                               "bound": outcome.bound, "witness": outcome.witness})

    for a, b, c in tree_triples_exhaustive(space, radius):
        tally("thin_triangle", check_thin_triangle(space, a, b, c, ledger, cfg.tolerance))
        tally("near_collinearity", check_reverse_triangle(space, a, b, c, ledger, cfg.tolerance))
    for seg, x, y in tree_dichotomy_configs(space, min(3, radius)):
        tally("dichotomy", check_dichotomy(space, seg, x, y, ledger, cfg.tolerance))
    for seg_ab, seg_pq in tree_variation_configs(space, min(3, radius)):
        tally("variation", check_variation(space, seg_ab, seg_pq, ledger, cfg.tolerance))
    # endpoint stability on a deterministic family
    stab = {"holds": 0, "violated": 0}
    base = space.geodesic(vertex(""), vertex("a" * min(5, radius + 2)))
    for u in W.ball(space.rank, 1):
        for v in W.ball(space.rank, 1):
            a2 = vertex(W.to_string(u))
            b2 = act(space, cfg.group.from_word("a" * min(5, radius + 2)), vertex(W.to_string(v)))
            cert = check_stability(space, base, a2, b2, D=2.0, ledger=ledger, budget=budget)
            key = "violated" if cert.refuted else "holds"
            stab[key] += 1
            if cert.refuted:
                violations.append({"lemma": "stability", "witness": cert.to_json(space)})
    counts["stability"] = {"holds": stab["holds"], "skipped": 0,
                           "violated": stab["violated"]}
    return counts, violations


def _halfplane_lemma_suite(cfg: ExperimentConfig, count: int) -> tuple[dict, list]:
    space, ledger = cfg.space, cfg.ledger
    counts = {}
    violations = []

    def tally(name, outcome):
        bucket = counts.setdefault(name, {"holds": 0, "skipped": 0, "violated": 0})
        bucket[outcome.status] += 1
        if outcome.status == "violated":
            violations.append({"lemma": name, "value": outcome.value,
                               "bound": outcome.bound, "witness": outcome.witness})

    for a, b, c in halfplane_thin_configs(space, cfg.seed, count):
        tally("thin_triangle", check_thin_triangle(space, a, b, c, ledger, cfg.tolerance))
        tally("near_collinearity", check_reverse_triangle(space, a, b, c, ledger, cfg.tolerance))
    for seg_ab, seg_pq in halfplane_variation_configs(space, cfg.seed, count):
        tally("variation", check_variation(space, seg_ab, seg_pq, ledger, cfg.tolerance))
    return counts, violations


def run_contract(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    budget = cfg.cert_budget()
    witnesses = []
    violations = []
    section: dict = {"ledger": cfg.ledger.table()}

    if space.kind == "tree":
        sys_obj = cfg.system()
        cert = certify_contracting(space, sys_obj.sigma_segment, cfg.B, budget)
        section["sigma_certificate"] = cert.to_json(space)
        if cert.refuted:
            violations.append({"check": "sigma-contraction",
                               "witness": cert.to_json(space)["witness"]})
            witnesses.append(_attach_segment(cert, space))
        counts, lemma_violations = _tree_lemma_suite(cfg)
        section["lemma_suite"] = counts
        violations += lemma_violations
    elif space.kind == "half-plane":
        counts, lemma_violations = _halfplane_lemma_suite(
            cfg, cfg.budgets.sample_count)
        section["lemma_suite"] = counts
        violations += lemma_violations
    else:
        # flat spaces are the negative control: contraction must refute
        sweep = [cfg.B, 10.0, 100.0]
        seg = _flat_axis_segment(cfg, max(sweep))
        table = half_flat_control(space, seg, sweep, budget)
        section["half_flat"] = [{"B": r.B, "refuted": r.refuted} for r in table]
        for r in table:
            if not r.refuted:
                violations.append({"check": "half-flat-control", "B": r.B})
            elif r.witness is not None:
                witnesses.append({**r.witness,
                                  "segment": [space.point_to_json(seg.start),
                                              space.point_to_json(seg.end)]})
    return section, violations, witnesses


def run_qm(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    sys_obj = cfg.system()
    budget = cfg.cert_budget()
    violations = []
    witnesses = []
    section: dict = {"system": sys_obj.describe()}

    cert = sys_obj.certify_base(budget)
    section["sigma_certificate"] = cert.to_json(space)
    if cert.refuted:
        violations.append({"check": "sigma-contraction",
                           "witness": cert.to_json(space)["witness"]})
        witnesses.append(_attach_segment(cert, space))

    x0 = sys_obj.basepoint
    lam_table = []
    phi_table_rows = []
    worst_conf = 0.0
    for n in range(1, cfg.budgets.n_max + 1):
        g = cfg.group.from_word(W.power(cfg.sigma_word, n))
        gx0 = act(space, g, x0)
        fwd = modified_length(sys_obj, x0, gx0)
        bwd = modified_length(sys_obj, gx0, x0)
        lam_table.append({"n": n, "forward": fwd.value, "back": bwd.value,
                          "expressways": fwd.expressways})
        phi_table_rows.append({"n": n, "phi": bwd.value - fwd.value})
        for res, a, b in ((fwd, x0, gx0), (bwd, gx0, x0)):
            ok, dev = check_witness_confinement(sys_obj, res, a, b)
            worst_conf = max(worst_conf, dev)
            if not ok:
                violations.append({"check": "witness-confinement", "n": n,
                                   "deviation": dev, "bound": sys_obj.ledger.D})
            wit = res.to_json(space)
            wit["a"] = space.point_to_json(a)
            wit["b"] = space.point_to_json(b)
            witnesses.append(wit)
    section["lambda_table"] = lam_table
    section["phi_table"] = phi_table_rows
    section["confinement_max_deviation"] = worst_conf

    # interface properties of the modified length
    rng = rng_for(cfg.seed, "lambda-props")
    if space.kind == "tree":
        sample_words = random_words(space.rank, cfg.seed, 12, 5)
        pts = [vertex(W.to_string(w)) for w in sample_words]
        pairs = tuple((pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2))
        moves = tuple((a, b, act(space, cfg.group.from_word((1,)), a),
                       act(space, cfg.group.from_word((2,)), b))
                      for a, b in pairs[:4])
        gs = tuple(random_words(space.rank, cfg.seed + 1, 4, 3))
        mid = act(space, cfg.group.from_word(W.power(cfg.sigma_word, 2)), x0)
        far = act(space, cfg.group.from_word(W.power(cfg.sigma_word, 4)), x0)
        samples = LambdaSamples(pairs, moves, gs, ((x0, mid, far),))
    else:
        from .samplers import random_point
        pairs = tuple((random_point(space, rng), random_point(space, rng))
                      for _ in range(6))
        samples = LambdaSamples(pairs, (), (), ())
    lam_violations = check_lambda_properties(sys_obj, samples, cfg.tolerance)
    section["lambda_property_violations"] = lam_violations
    violations += [{"check": "lambda-property", **v} for v in lam_violations]

    # defect, homogenization, independence
    pairs_iter = defect_pairs_exhaustive(space.rank, cfg.budgets.defect_radius) \
        if sys_obj.is_exact_tree() else _sampled_pairs(cfg)
    report = defect_estimate(sys_obj, pairs_iter)
    section["defect"] = {"value": report.value, "pairs": report.pairs_checked,
                         "argmax": None if report.pair is None else
                         [W.to_string(report.pair[0]), W.to_string(report.pair[1])]}

    hom_rows = []
    for word in [cfg.sigma_word] + random_words(space.rank, cfg.seed + 2, 3, 3):
        value, err = homogenize(sys_obj, word, min(16, 4 * cfg.budgets.n_max),
                                defect_bound=report.value)
        hom_rows.append({"g": W.to_string(word), "value": value, "error": err})
    section["homogenized"] = hom_rows

    indep_words = cfg.independence_words or [cfg.sigma_word]
    try:
        systems = [ExpresswaySystem(space, cfg.group, w, x0, ledger=cfg.ledger,
                                    margin=cfg.budgets.enum_margin,
                                    enum_radius=cfg.budgets.ball_radius,
                                    candidate_cap=cfg.budgets.candidate_cap)
                   for w in indep_words]
        testers = [W.power(w, 2) for w in indep_words]
        matrix, rank = independence_matrix(systems, testers, n_max=8)
        section["independence"] = {"words": [W.to_string(w) for w in indep_words],
                                   "matrix": matrix.tolist(), "rank": rank}
        if rank < len(systems):
            violations.append({"check": "independence-rank", "rank": rank,
                               "expected": len(systems)})
    except ConfigError as exc:
        section["independence"] = {"skipped": str(exc)}
    return section, violations, witnesses


def _sampled_pairs(cfg: ExperimentConfig):
    ws = random_words(cfg.space.rank if hasattr(cfg.space, "rank") else 2,
                      cfg.seed, 12, 3)
    return [(g, h) for g in ws[:6] for h in ws[6:]]


def run_rank1(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    budget = cfg.cert_budget()
    violations = []
    witnesses = []
    section: dict = {}
    x0 = cfg.basepoint
    g = cfg.group.from_word(cfg.sigma_word)
    if space.kind in ("euclidean",) or (space.kind == "product"
                                        and "euclidean" in (space.left.kind, space.right.kind)):
        sweep = [0.1, cfg.B, 10.0]
        seg = _flat_axis_segment(cfg, max(sweep))
        table = half_flat_control(space, seg, sweep, budget)
        section["half_flat"] = [{"B": r.B, "refuted": r.refuted} for r in table]
        for r in table:
            if not r.refuted:
                violations.append({"check": "half-flat-control", "B": r.B})
            elif r.witness is not None:
                witnesses.append({**r.witness,
                                  "segment": [space.point_to_json(seg.start),
                                              space.point_to_json(seg.end)]})
        result = rank_one_test(space, cfg.group, g, x0, cfg.B,
                               min(3, cfg.budgets.n_max), budget)
        section["rank_one"] = {"certified": result.certified}
        if result.certified:
            violations.append({"check": "flat-rank-one-control",
                               "detail": "flat axis must refute rank 1"})
        return section, violations, witnesses

    B_scale = _rank_one_scale(cfg)
    result = rank_one_test(space, cfg.group, g, x0, B_scale,
                           cfg.budgets.n_max, budget)
    if result.certified:
        section["rank_one"] = {
            "certified": True, "B": B_scale,
            "growth_floor": result.growth_floor,
            "worst_orbit_deviation": max(e.orbit_to_geodesic for e in result.evidence),
            "worst_geodesic_deviation": max(e.geodesic_to_orbit for e in result.evidence)}
    else:
        section["rank_one"] = {"certified": False, "B": B_scale,
                               "n": result.n, "reason": result.reason}
        violations.append({"check": "rank-one", "B": B_scale,
                           "witness": result.witness})
    companion = _companion(cfg)
    profile = independence_test(space, cfg.group, g,
                                cfg.group.from_word(companion), x0,
                                cfg.budgets.grid_max,
                                threshold=3.0 * B_scale)
    section["independence_profile"] = {
        "companion": W.to_string(companion),
        "values": list(profile.values),
        "tail_increasing": profile.tail_increasing,
        "passed": profile.passed}
    if not profile.passed:
        violations.append({"check": "independence-profile",
                           "values": list(profile.values)})
    return section, violations, witnesses


def _flat_axis_segment(cfg: ExperimentConfig, max_B: float):
    """Orbit segment of the flat control, long enough that the widest
    refuting shadow 2(h-1) with h = max_B/2 + 2 fits inside it."""
    space = cfg.space
    x0 = cfg.basepoint
    g = cfg.group.from_word(cfg.sigma_word)
    step = space.distance(x0, act(space, g, x0))
    if step <= 0:
        raise ConfigError("flat control needs a moving generator")
    need = 2.0 * (max_B / 2.0 + 2.0) + 10.0
    k = max(2, math.ceil(need / step))
    return space.geodesic(x0, act(space, cfg.group.power(g, k), x0))


def _rank_one_scale(cfg: ExperimentConfig) -> float:
    if cfg.space.kind == "tree":
        # orbit points sit on a line spaced |sigma| apart, so the true
        # Hausdorff scale is half the spacing
        return max(cfg.B, len(cfg.sigma_word) / 2.0 + 0.5)
    return max(cfg.B, 5.0)


def run_schottky(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    violations = []
    section: dict = {}
    g = cfg.group.from_word(cfg.sigma_word)
    h = cfg.group.from_word(_companion(cfg))
    try:
        result = schottky_exponent(space, cfg.group, g, h,
                                   cfg.budgets.schottky_e,
                                   cfg.budgets.word_len_max, cfg.basepoint,
                                   n_cap=cfg.budgets.schottky_cap)
        table = {w: list(v) for w, v in sorted(result.displacements.items())}
        section["schottky"] = {"N": result.N, "E": result.E,
                               "word_len_max": result.word_len_max,
                               "words": len(table)}
        witnesses = [{"kind": "schottky-displacements", "N": result.N,
                      "E": result.E, "g": W.to_string(g.word),
                      "h": W.to_string(h.word), "table": table}]
    except BudgetError as exc:
        section["schottky"] = {"N": None, "tried": sorted(exc.partial)}
        violations.append({"check": "schottky-exponent",
                           "detail": "no exponent within budget"})
        witnesses = []
    return section, violations, witnesses


def run_wpd(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    violations = []
    section: dict = {}
    g = cfg.group.from_word(cfg.sigma_word)
    x0 = cfg.basepoint
    M = 1
    target = max(12.0, 3.0 * cfg.budgets.wpd_c)
    while space.distance(x0, act(space, cfg.group.power(g, M), x0)) < target and M < 64:
        M += 1
    radius = min(cfg.budgets.ball_radius + 1, 6)
    zero = wpd_count(space, cfg.group, g, 0.0, M, radius, x0)
    section["count_c0"] = zero.to_json()
    if zero.count != 1 or zero.matching != (W.IDENTITY,):
        violations.append({"check": "wpd-free-action", "matching": zero.to_json()})
    small = wpd_count(space, cfg.group, g, cfg.budgets.wpd_c, M, radius, x0)
    bigger = wpd_count(space, cfg.group, g, cfg.budgets.wpd_c, M, radius + 2, x0)
    section["count_small"] = small.to_json()
    section["count_small_radius_grown"] = bigger.to_json()
    stable = small.count == bigger.count
    section["radius_stable"] = stable
    if not stable:
        violations.append({"check": "wpd-stability", "small": small.count,
                           "grown": bigger.count})
    witnesses = [small.to_json() | {"x0": space.point_to_json(x0)}]
    return section, violations, witnesses


def run_equiv(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    space = cfg.space
    violations = []
    witnesses = []
    section: dict = {}
    g = cfg.sigma_word
    conj = W.multiply(W.multiply((1,), g), (-1,))
    K = cfg.budgets.equiv_k
    power_max = cfg.budgets.power_max
    radius = min(cfg.budgets.ball_radius + 1, 6)

    found = equiv_search(space, cfg.group, cfg.group.from_word(g),
                         cfg.group.from_word(conj), K, power_max, radius,
                         cfg.basepoint)
    section["conjugate_search"] = None if found is None else found.to_json()
    if found is None:
        violations.append({"check": "equiv-conjugate",
                           "detail": "conjugate orbits must match"})
    else:
        witnesses.append(found.to_json() | {
            "g": W.to_string(g), "h": W.to_string(conj), "K": K})

    reversed_found = equiv_search(space, cfg.group, cfg.group.from_word(g),
                                  cfg.group.from_word(W.inverse(g)), K,
                                  power_max, radius, cfg.basepoint)
    section["inverse_search"] = (None if reversed_found is None
                                 else reversed_found.to_json())
    if reversed_found is not None:
        violations.append({"check": "equiv-inverse",
                           "detail": "reversed orbit matched unexpectedly",
                           "witness": reversed_found.to_json()})

    section["conjugate_power"] = {
        "g_vs_conjugate": conjugate_power_test(g, conj, power_max),
        "g_vs_inverse": conjugate_power_test(g, W.inverse(g), power_max)}
    if section["conjugate_power"]["g_vs_conjugate"] is None:
        violations.append({"check": "conjugate-power", "detail": "missed conjugacy"})
    if section["conjugate_power"]["g_vs_inverse"] is not None:
        violations.append({"check": "conjugate-power",
                           "detail": "false positive on the inverse"})

    try:
        family = build_family(g, _companion(cfg), cfg.budgets.family_count,
                              N=2, power_max=power_max)
        section["family"] = family.to_json()
    except BudgetError as exc:
        section["family"] = {"members": [W.to_string(w) for w in exc.partial]}
        violations.append({"check": "family-budget", "detail": str(exc)})
    return section, violations, witnesses


def run_algebra(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    violations = []
    section: dict = {}
    ext = swap_extension()
    w = cfg.sigma_word if len(cfg.sigma_word) >= 2 else W.from_string("aab")
    base = homogeneous_brooks_qm(w)
    section["extension"] = ext.describe()
    section["base"] = base.name

    averaged = orbit_average(ext, base)
    inv = check_sigma_invariance(ext, averaged, radius=3)
    section["average_invariant"] = not inv
    if inv:
        violations.append({"check": "orbit-average-invariance", "witness": inv[0]})

    transferred = transfer_extend(ext, averaged)
    report = restriction_check(ext, transferred, averaged,
                               word_radius=min(6, cfg.budgets.ball_radius + 2),
                               pair_radii=(3, 4))
    section["restriction"] = {
        "words_checked": report.words_checked,
        "max_gap": report.max_restriction_gap,
        "defects": {str(k): v for k, v in sorted(report.defects.items())},
        "growth": report.growth}
    if report.max_restriction_gap > cfg.tolerance:
        violations.append({"check": "restriction-gap",
                           "gap": report.max_restriction_gap})
    if report.growth > 1.0:
        violations.append({"check": "defect-growth", "growth": report.growth})

    hom = homogeneity_suite(base, random_words(2, cfg.seed, 8, 4), n_max=4,
                            conjugators=[(1,), (2, 1)], tolerance=cfg.tolerance)
    section["homogeneity_violations"] = hom
    if hom:
        violations.append({"check": "homogeneity", "witness": hom[0]})

    raw = brooks_qm(w)
    raw_hom = homogeneity_suite(raw, [(1, 1, 2)], n_max=3,
                                conjugators=[(1,)], tolerance=cfg.tolerance)
    section["raw_brooks_conjugacy_breaks"] = bool(raw_hom)
    length_breaks = homogeneity_suite(word_length_qm(), [(1, 2, -1)], n_max=2,
                                      tolerance=cfg.tolerance)
    section["word_length_breaks"] = bool(length_breaks)
    if not length_breaks:
        violations.append({"check": "negative-control",
                           "detail": "word length looked homogeneous"})
    return section, violations, []


_RUNNERS = {
    "axioms": run_axioms,
    "contract": run_contract,
    "qm": run_qm,
    "rank1": run_rank1,
    "schottky": run_schottky,
    "wpd": run_wpd,
    "equiv": run_equiv,
    "algebra": run_algebra,
}


def run(subcommand: str, cfg: ExperimentConfig) -> tuple[dict, int]:
    """Execute a subcommand; returns (report, exit code)."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    started = time.monotonic()
    names = list(_RUNNERS) if subcommand == "all" else [subcommand]
    results = {}
    violations = []
    witnesses = []
    status = "ok"
    code = EXIT_OK
    try:
        for name in names:
            section, sec_violations, sec_witnesses = _RUNNERS[name](cfg)
            results[name] = section
            violations += [{"subcommand": name, **v} for v in sec_violations]
            witnesses += sec_witnesses
        if violations:
            status, code = "violation", EXIT_VIOLATION
    except (BudgetError, ConfigError, InputError) as exc:
        status, code = "error", EXIT_CONFIG
        results["error"] = {"type": type(exc).__name__, "message": str(exc)}
    body = {
        "schema": SCHEMA,
        "subcommand": subcommand,
        "config": cfg.echo(),
        "results": results,
        "violations": violations,
        "witnesses": witnesses,
        "status": status,
    }
    report = {"meta": {"wall_clock_s": time.monotonic() - started,
                       "tool": "catqm"},
              "body": body}
    return report, code


def canonical_body(report: dict) -> str:
    return json.dumps(report["body"], sort_keys=True)


# ---------------------------------------------------------------------------
# Witness replay
# ---------------------------------------------------------------------------

def replay(report_or_path) -> bool:
    """Re-evaluate every witness in a report; True iff each reproduces its
    claimed quantity within tolerance."""
    if isinstance(report_or_path, str):
        with open(report_or_path, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    else:
        report = report_or_path
    body = report.get("body", report)
    if body.get("schema") != SCHEMA:
        raise ConfigError(f"report schema must be {SCHEMA!r}")
    cfg = config_from_json(body["config"])
    for witness in body.get("witnesses", []):
        if not _replay_one(cfg, witness):
            return False
    return True


def _replay_one(cfg: ExperimentConfig, witness: dict) -> bool:
    space = cfg.space
    kind = witness.get("kind")
    tol = max(cfg.tolerance, 1e-6)
    if kind == "contraction-refutation":
        seg = space.geodesic(space.point_from_json(witness["segment"][0]),
                             space.point_from_json(witness["segment"][1]))
        center = space.point_from_json(witness["center"])
        diam = projection_diameter_under_ball(space, seg, center,
                                              witness["radius"],
                                              witness["samples"])
        return abs(diam - witness["diameter"]) <= tol * max(1.0, witness["diameter"])
    if kind == "lambda-witness":
        sys_obj = cfg.system()
        total = 0.0
        n_exp = 0
        prev = None
        for step in witness["path"]:
            pt = space.point_from_json(step["point"])
            if prev is not None:
                if step["edge"] == "expressway":
                    g = cfg.group.from_word(step["translate"])
                    start = act(space, g, sys_obj.basepoint)
                    end = act(space, cfg.group.multiply(g, sys_obj._sigma_iso),
                              sys_obj.basepoint)
                    if (space.distance(start, prev) > tol
                            or space.distance(end, pt) > tol):
                        return False
                    total += sys_obj.L - 1.0
                    n_exp += 1
                else:
                    total += space.distance(prev, pt)
            prev = pt
        return (abs(total - witness["value"]) <= tol
                and n_exp == witness["expressways"])
    if kind == "equiv-witness":
        g = cfg.group.from_word(witness["g"])
        h = cfg.group.from_word(witness["h"])
        gamma = cfg.group.from_word(witness["gamma"])
        x0 = cfg.basepoint
        seg1 = space.geodesic(x0, act(space, cfg.group.power(g, witness["m"]), x0))
        hx = act(space, cfg.group.power(h, witness["n"]), x0)
        seg2 = space.geodesic(act(space, gamma, x0),
                              act(space, gamma, hx))
        d = sampled_hausdorff(space, seg1, seg2)
        return abs(d - witness["hausdorff"]) <= tol and d <= witness["K"] + tol
    if kind == "schottky-displacements":
        g = cfg.group.from_word(witness["g"])
        h = cfg.group.from_word(witness["h"])
        N = witness["N"]
        basis = {1: cfg.group.power(g, N), 2: cfg.group.power(h, N)}
        basis[-1] = cfg.group.inverse(basis[1])
        basis[-2] = cfg.group.inverse(basis[2])
        x0 = cfg.basepoint
        for wstr, (length, disp) in witness["table"].items():
            iso = cfg.group.identity()
            for ch in W.from_string(wstr):
                iso = cfg.group.multiply(iso, basis[ch])
            actual = space.distance(x0, act(space, iso, x0))
            if abs(actual - disp) > tol or actual < length * witness["E"] - tol:
                return False
        return True
    if kind == "wpd-matches":
        g = cfg.group.from_word(witness["g"])
        x0 = space.point_from_json(witness["x0"])
        far = act(space, cfg.group.power(g, witness["M"]), x0)
        for wstr in witness["matching"]:
            iso = cfg.group.from_word(wstr)
            if (space.distance(x0, act(space, iso, x0)) > witness["c"] + tol
                    or space.distance(far, act(space, iso, far)) > witness["c"] + tol):
                return False
        return True
    # unknown kinds fail closed so schema drift is caught
    return False


def _attach_segment(cert, space) -> dict:
    data = cert.to_json(space)
    witness = data["witness"]
    witness["segment"] = data["segment"]
    return witness
