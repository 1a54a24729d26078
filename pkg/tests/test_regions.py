"""Rate-bound families, support maxima, capacities, and the frontier search."""

import math

import numpy as np
import pytest

from wtgp.channels import GpModel, WiretapModel, analogous_gpbc, informed_lift
from wtgp.divergence import mutual_information
from wtgp.errors import ClassificationError, ShapeError
from wtgp.pmf import Axis, FinitePmf, JointPmf
from wtgp.regions import (
    FAMILIES,
    AuxiliaryDist,
    RateBounds,
    SearchParams,
    aux_from_dict,
    aux_to_dict,
    blahut_arimoto,
    brute_force_oracle,
    default_u_size,
    eval_rate_bounds,
    export_region,
    family_side,
    gp_capacity,
    hausdorff_distance,
    rate_bounds_from_joint,
    reduce_auxiliary,
    region_frontier,
    single_letter_joint,
    support_maximum,
    sweep_directions,
    two_auxiliary_bounds,
    wt_capacity,
)

BA_BSC01 = 0.5310044064107188  # 1 - h(0.1)
DEGRADED_01_02 = 0.25293250129802924  # h(0.2) - h(0.1)


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc(p):
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def product_wiretap(p1, p2, pz):
    law = np.einsum("xa,xb,xc->xabc", bsc(p1), bsc(p2), bsc(pz))
    return WiretapModel(law=law)


def noiseless_const_z():
    """Y1 = Y2 = X, Z constant."""
    law = np.zeros((2, 2, 2, 1))
    for x in range(2):
        law[x, x, x, 0] = 1.0
    return WiretapModel(law=law)


def degraded_wiretap(q1=0.1, q2=0.2):
    """Y1 = BSC(q1)(X), Z = BSC(q2)(X) with the eavesdropper degraded."""
    law = np.einsum("xa,xc->xac", bsc(q1), bsc(q2))[:, :, None, :]
    return WiretapModel(law=law)


def random_sd_model(rng):
    f = rng.integers(0, 2, size=2)
    rows = rng.dirichlet(np.ones(4), size=2)
    law = np.zeros((2, 2, 2, 2))
    for x in range(2):
        law[x, f[x]] = rows[x].reshape(2, 2)
    return WiretapModel(law=law)


def quick_params(**kw):
    kw.setdefault("restarts", 8)
    kw.setdefault("capacity_restarts", 16)
    kw.setdefault("directions", 16)
    return SearchParams(**kw)


class TestBlahutArimoto:
    def test_bsc_oracle(self):
        cap = blahut_arimoto(bsc(0.1))
        assert abs(cap - (1.0 - h2(0.1))) <= 1e-10
        assert abs(cap - BA_BSC01) <= 1e-10

    def test_useless_channel(self):
        assert blahut_arimoto(np.full((3, 2), 0.5)) <= 1e-10

    def test_identity_channel(self):
        assert abs(blahut_arimoto(np.eye(4)) - 2.0) <= 1e-10


class TestRateBoundsFromJoint:
    def rand_joint(self, rng, sizes=(2, 2, 2, 2, 2)):
        names = ["u", "x", "y1", "y2", "z"]
        mass = rng.dirichlet(np.ones(int(np.prod(sizes))))
        return JointPmf([Axis(n, s) for n, s in zip(names, sizes)], mass)

    def test_axes_checked(self):
        j = JointPmf([Axis("u", 2), Axis("x", 2)], np.full((2, 2), 0.25))
        with pytest.raises(ShapeError):
            rate_bounds_from_joint("SD-WT", j)

    def test_sd_formulas_on_canonical_fixture(self):
        aux = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", 2), Axis("x", 2)], np.eye(2) / 2.0),
        )
        joint = single_letter_joint(noiseless_const_z(), aux)
        b = rate_bounds_from_joint("SD-WT", joint)
        assert abs(b.r1 - 1.0) <= 1e-12
        assert abs(b.r2 - 1.0) <= 1e-12
        assert abs(b.r_sum - 1.0) <= 1e-12

    def test_pd_ir_degenerate_inner_layer(self):
        # U = X makes the private rate I(X;Y1|U,Z) vanish while the
        # common layer keeps H(U) = 1 toward the noiseless receiver 2.
        aux = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", 2), Axis("x", 2)], np.eye(2) / 2.0),
        )
        joint = single_letter_joint(noiseless_const_z(), aux)
        b = rate_bounds_from_joint("PD-IR-WT", joint)
        assert abs(b.r1) <= 1e-12
        assert abs(b.r2 - 1.0) <= 1e-12
        assert b.r_sum is None

    def test_analogous_families_agree_bitwise(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            j = self.rand_joint(rng)
            for wt_fam, gp_fam in [("SD-WT", "SD-GP"), ("PD-IR-WT", "PD-IR-GP")]:
                a = rate_bounds_from_joint(wt_fam, j)
                b = rate_bounds_from_joint(gp_fam, j)
                assert (a.r1, a.r2, a.r_sum) == (b.r1, b.r2, b.r_sum)
                assert (a.raw_r1, a.raw_r2, a.raw_sum) == (
                    b.raw_r1,
                    b.raw_r2,
                    b.raw_sum,
                )
            a = rate_bounds_from_joint("PD-IR-WT-COOP", j, coop_capacity=0.1)
            b = rate_bounds_from_joint("PD-IR-GP-COOP", j, coop_capacity=0.1)
            assert (a.r1, a.r2, a.r_sum) == (b.r1, b.r2, b.r_sum)

    def test_coop_adds_conferencing_rate(self):
        rng = np.random.default_rng(21)
        j = self.rand_joint(rng)
        plain = rate_bounds_from_joint("PD-IR-WT", j)
        coop = rate_bounds_from_joint("PD-IR-WT-COOP", j, coop_capacity=0.25)
        assert abs(coop.raw_r2 - (plain.raw_r2 + 0.25)) <= 1e-12
        assert coop.r_sum is not None

    def test_coop_requires_capacity(self):
        j = self.rand_joint(np.random.default_rng(22))
        with pytest.raises(ValueError):
            rate_bounds_from_joint("PD-IR-WT-COOP", j)

    def test_axis_order_invariance(self):
        # reordering permutes the reduction order, so only roundoff-level
        # agreement is guaranteed
        rng = np.random.default_rng(23)
        j = self.rand_joint(rng)
        r = j.reordered(["z", "y2", "x", "u", "y1"])
        a = rate_bounds_from_joint("SD-WT", j)
        b = rate_bounds_from_joint("SD-WT", r)
        assert abs(a.r1 - b.r1) <= 1e-12
        assert abs(a.r2 - b.r2) <= 1e-12
        assert abs(a.r_sum - b.r_sum) <= 1e-12


class TestSupportMaximum:
    def bounds(self, r1, r2, rs):
        return RateBounds("SD-WT", r1, r2, rs, r1, r2, rs)

    def test_worked_example(self):
        s = support_maximum(self.bounds(0.6, 0.8, 1.0), 2.0, 1.0)
        assert abs(s.value - 1.6) <= 1e-15
        assert (s.r1, s.r2) == (0.6, 0.4)

    def test_no_sum_constraint(self):
        b = RateBounds("PD-IR-WT", 0.5, 0.7, None, 0.5, 0.7, None)
        s = support_maximum(b, 1.0, 1.0)
        assert abs(s.value - 1.2) <= 1e-15
        assert (s.r1, s.r2) == (0.5, 0.7)

    def test_tie_breaks_lexicographic(self):
        s = support_maximum(self.bounds(1.0, 1.0, 1.0), 1.0, 1.0)
        assert (s.r1, s.r2) == (1.0, 0.0)

    def test_axis_directions(self):
        b = self.bounds(0.6, 0.8, 1.0)
        assert support_maximum(b, 1.0, 0.0).value == 0.6
        assert support_maximum(b, 0.0, 1.0).value == 0.8

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            support_maximum(self.bounds(1, 1, 1), 0.0, 0.0)
        with pytest.raises(ValueError):
            support_maximum(self.bounds(1, 1, 1), -1.0, 1.0)


class TestCapacities:
    def test_fully_revealed_secrecy_is_zero(self):
        # Z = Y1: whatever receiver 1 learns, the eavesdropper learns too.
        law = np.zeros((2, 2, 1, 2))
        for x in range(2):
            for y in range(2):
                law[x, y, 0, y] = bsc(0.1)[x, y]
        res = wt_capacity(WiretapModel(law=law), quick_params())
        assert abs(res.value) <= 1e-9

    def test_noiseless_receiver_constant_state(self):
        law = np.zeros((2, 2, 1, 1))
        law[0, 0, 0, 0] = 1.0
        law[1, 1, 0, 0] = 1.0
        res = wt_capacity(WiretapModel(law=law), quick_params())
        assert abs(res.value - 1.0) <= 1e-4

    def test_degraded_pair_matches_entropy_difference(self):
        res = wt_capacity(degraded_wiretap(0.1, 0.2))
        assert abs(res.value - DEGRADED_01_02) <= 1e-6

    def test_informed_constant_state_matches_ba(self):
        law = np.einsum("xa->xa", bsc(0.1)).reshape(2, 2, 1, 1)
        model = WiretapModel(law=law, informed_receiver=True)
        res = wt_capacity(model, quick_params())
        assert abs(res.value - BA_BSC01) <= 1e-4

    def test_gp_additive_state_cancels(self):
        # y = x xor z with z known at the encoder: full 1 bit flows
        law = np.zeros((2, 2, 2, 1))
        for x in range(2):
            for z in range(2):
                law[x, z, x ^ z, 0] = 1.0
        model = GpModel(state_dist=FinitePmf([0.5, 0.5]), law=law)
        res = gp_capacity(model, quick_params())
        assert abs(res.value - 1.0) <= 1e-3

    def test_gp_constant_state_matches_ba(self):
        law = bsc(0.1).reshape(2, 1, 2, 1)
        model = GpModel(state_dist=FinitePmf([1.0]), law=law)
        res = gp_capacity(model, quick_params())
        assert abs(res.value - BA_BSC01) <= 1e-4

    def test_point_to_point_required(self):
        with pytest.raises(ValueError):
            wt_capacity(product_wiretap(0.1, 0.3, 0.25), quick_params())


class TestFrontier:
    def test_canonical_sd_frontier(self):
        # 17 directions place one ray exactly on the diagonal
        region = region_frontier(
            "SD-WT", noiseless_const_z(), quick_params(), sweep_directions(17)
        )
        pts = [(p.r1, p.r2) for p in region.boundary]
        assert any(abs(a - 1) <= 1e-6 and abs(b) <= 1e-6 for a, b in pts)
        assert any(abs(a) <= 1e-6 and abs(b - 1) <= 1e-6 for a, b in pts)
        diag = [s for s in region.supports if abs(s.lam1 - s.lam2) <= 1e-12]
        assert diag and abs(diag[0].value * math.sqrt(2.0) - 1.0) <= 1e-6

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            region_frontier("SD-??", noiseless_const_z(), quick_params())

    def test_family_model_side_checked(self):
        with pytest.raises(ClassificationError):
            region_frontier(
                "SD-GP", noiseless_const_z(), quick_params()
            )

    def test_oracle_matches_search_on_canonical_fixture(self):
        model = noiseless_const_z()
        dirs = sweep_directions(17)
        region = region_frontier("SD-WT", model, quick_params(), dirs)
        oracle = brute_force_oracle(model, "SD-WT", delta=0.1, directions=dirs)
        search_pts = [(p.r1, p.r2) for p in region.boundary]
        oracle_pts = [(s.r1, s.r2) for s in oracle.supports]
        assert hausdorff_distance(search_pts, oracle_pts) <= 1e-3

    def test_search_not_below_coarse_oracle(self):
        rng = np.random.default_rng(24)
        model = random_sd_model(rng)
        dirs = sweep_directions(8)
        region = region_frontier(
            "SD-WT", model, quick_params(directions=8)
        )
        oracle = brute_force_oracle(model, "SD-WT", delta=0.1, directions=dirs)
        for s, o in zip(region.supports, oracle.supports):
            assert s.value >= o.value - 1e-3

    def test_capacity_oracle_degraded(self):
        oracle = brute_force_oracle(degraded_wiretap(), delta=0.1, u_size=3)
        assert abs(oracle.value - DEGRADED_01_02) <= 5e-3


class TestHausdorff:
    def test_identical(self):
        pts = [(0.0, 1.0), (1.0, 0.0), (0.7, 0.7)]
        assert hausdorff_distance(pts, pts) == 0.0

    def test_scaled_square(self):
        # direction-sampled support differences approach the true Hausdorff
        # distance from below as the grid refines
        a = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        b = [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        d = hausdorff_distance(a, b)
        assert abs(d - math.sqrt(2.0) / 2.0) <= 1e-5
        assert d <= math.sqrt(2.0) / 2.0 + 1e-12


class TestAuxiliaryReduction:
    def rand_vtx(self, rng):
        mass = rng.dirichlet(np.ones(8))
        return JointPmf([Axis("v", 2), Axis("t", 2), Axis("x", 2)], mass)

    def test_dominance_and_case_selection(self):
        rng = np.random.default_rng(25)
        for _ in range(200):
            model = random_sd_model(rng)
            p_vtx = self.rand_vtx(rng)
            red = reduce_auxiliary(p_vtx, model)
            assert red.case in (1, 2)
            if red.case == 1:
                assert red.case1_margin <= 1e-12
            else:
                assert red.case1_margin > -1e-12
                assert red.case2_margin >= -1e-12
            two = two_auxiliary_bounds(p_vtx, model)
            one = eval_rate_bounds("SD-WT", red.aux, model)
            assert one.r1 >= two.r1 - 1e-9
            assert one.r2 >= two.r2 - 1e-9
            assert one.r_sum >= two.r_sum - 1e-9

    def test_case1_keeps_cardinality(self):
        # independent T never helps receiver 2: U = V suffices
        rng = np.random.default_rng(26)
        model = random_sd_model(rng)
        pv = rng.dirichlet(np.ones(2))
        pt = rng.dirichlet(np.ones(2))
        px = rng.dirichlet(np.ones(2))
        mass = np.einsum("v,t,x->vtx", pv, pt, px)
        red = reduce_auxiliary(
            JointPmf([Axis("v", 2), Axis("t", 2), Axis("x", 2)], mass), model
        )
        assert red.aux.dist.axis_size("u") == 2


class TestAuxiliarySerialization:
    def test_round_trip(self):
        aux = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", 3), Axis("x", 2)], np.full((3, 2), 1 / 6)),
        )
        back = aux_from_dict(aux_to_dict(aux))
        assert back.side == "wiretap"
        np.testing.assert_array_equal(back.dist.mass, aux.dist.mass)

    def test_u_cap_enforced(self):
        assert default_u_size(degraded_wiretap()) == 3
        model = noiseless_const_z()
        big = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", 5), Axis("x", 2)], np.full((5, 2), 0.1)),
        )
        with pytest.raises(ValueError):
            eval_rate_bounds("SD-WT", big, model)
        ok = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", 5), Axis("x", 2)], np.full((5, 2), 0.1)),
            allow_large_u=True,
        )
        eval_rate_bounds("SD-WT", ok, model)


class TestInformedLiftConsistency:
    def test_informed_capacity_equals_lifted_objective(self):
        # the informed objective I(X;Y1|Z) evaluated directly must agree
        # with I(X;(Y1,Z)) - I(X;Z) on the lifted model
        model = WiretapModel(
            law=np.einsum("xa,xc->xac", bsc(0.1), bsc(0.25))[:, :, None, :],
            informed_receiver=True,
        )
        lifted = informed_lift(model)
        p_x = JointPmf([Axis("u", 1), Axis("x", 2)], [[0.5, 0.5]])
        aux = AuxiliaryDist("wiretap", p_x)
        j = single_letter_joint(model, aux)
        direct = mutual_information(j, {"x"}, {"y1", "z"}) - mutual_information(
            j, {"x"}, {"z"}
        )
        jl = single_letter_joint(lifted, aux)
        lifted_val = mutual_information(jl, {"x"}, {"y1"}) - mutual_information(
            jl, {"x"}, {"z"}
        )
        assert abs(direct - lifted_val) <= 1e-12


class TestExportRegion:
    def test_csv_and_json(self, tmp_path):
        region = region_frontier("SD-WT", noiseless_const_z(), quick_params())
        csv_path = tmp_path / "region.csv"
        json_path = tmp_path / "region.json"
        export_region(region, csv_path, json_path)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "lambda1,lambda2,support_value,R1,R2"
        assert len(lines) == 1 + len(region.supports)
        assert json_path.exists()


def test_family_side_labels():
    assert family_side("SD-WT") == "wiretap"
    assert family_side("PD-IR-GP-COOP") == "gp"
    assert set(FAMILIES) == {
        "SD-WT",
        "SD-GP",
        "PD-IR-WT",
        "PD-IR-GP",
        "PD-IR-WT-COOP",
        "PD-IR-GP-COOP",
    }


def test_sweep_directions_cover_quadrant():
    dirs = sweep_directions(5)
    assert dirs[0] == (1.0, 0.0)
    assert abs(dirs[-1][0]) <= 1e-15 and abs(dirs[-1][1] - 1.0) <= 1e-15
    for a, b in dirs:
        assert abs(math.hypot(a, b) - 1.0) <= 1e-12
