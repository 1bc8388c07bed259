import numpy as np
import pytest
from numpy.testing import assert_allclose

from koopdmd import systems
from koopdmd.errors import IntegrationError
from koopdmd.systems import Observable, SystemSpec


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            SystemSpec("pendulum", {}, (0.0,), 0.1, 10)

    def test_missing_param(self):
        with pytest.raises(ValueError, match="rho"):
            SystemSpec("lorenz", {"sigma": 10.0, "beta": 8.0 / 3.0}, (1.0, 1.0, 1.0), 0.01, 10)

    def test_state_dimension(self):
        with pytest.raises(ValueError):
            systems.circle_rotation(omega=1.0, z0=(0.0, 0.0), dt=1.0, steps=5)
        with pytest.raises(ValueError):
            systems.lorenz(z0=(1.0, 1.0), dt=0.01, steps=5)

    def test_linear_map_needs_square_matrix(self):
        with pytest.raises(ValueError):
            systems.linear_map(matrix=[[1.0, 0.0]], z0=(1.0, 0.0), dt=1.0, steps=3)

    def test_positive_steps_and_dt(self):
        with pytest.raises(ValueError):
            systems.circle_rotation(omega=1.0, z0=(0.0,), dt=0.0, steps=5)
        with pytest.raises(ValueError):
            systems.circle_rotation(omega=1.0, z0=(0.0,), dt=1.0, steps=0)


class TestMaps:
    def test_circle_rotation_exact(self):
        traj = systems.integrate(systems.circle_rotation(omega=0.3, z0=(0.7,), dt=2.0, steps=50))
        want = np.mod(0.7 + 0.3 * 2.0 * np.arange(51), 2.0 * np.pi)
        assert_allclose(traj.states[:, 0], want, rtol=0, atol=1e-12)
        assert traj.states.shape == (51, 1)

    def test_torus_rotation_exact(self):
        spec = systems.torus_rotation(omega1=0.97624, omega2=0.60892, z0=(0.0, 1.0), dt=0.1, steps=40)
        traj = systems.integrate(spec)
        k = np.arange(41)
        assert_allclose(traj.states[:, 0], np.mod(0.97624 * 0.1 * k, 2 * np.pi), atol=1e-12)
        assert_allclose(traj.states[:, 1], np.mod(1.0 + 0.60892 * 0.1 * k, 2 * np.pi), atol=1e-12)

    def test_torus_orbit_fills_in(self):
        # an incommensurate rotation never revisits a point, and the gap to
        # the nearest previously visited point shrinks as the orbit grows
        spec = systems.torus_rotation(omega1=1.0, omega2=np.sqrt(2.0), z0=(0.0, 0.0), dt=1.0, steps=2000)
        states = systems.integrate(spec).states

        def min_gap(pts):
            d = pts[:, None, :] - pts[None, :, :]
            d = np.abs(d)
            d = np.minimum(d, 2 * np.pi - d)
            r = np.sqrt((d ** 2).sum(-1))
            np.fill_diagonal(r, np.inf)
            return r.min()

        gaps = [min_gap(states[:n]) for n in (500, 1000, 2000)]
        assert gaps[0] > gaps[1] > gaps[2] > 0.0

    def test_linear_map_powers(self):
        a = np.array([[0.0, 1.0], [-0.25, 0.0]])
        traj = systems.integrate(systems.linear_map(matrix=a, z0=(1.0, 0.0), dt=1.0, steps=4))
        want = np.array([np.linalg.matrix_power(a, k) @ [1.0, 0.0] for k in range(5)])
        assert_allclose(traj.states, want, atol=1e-14)


class TestFlows:
    def test_decay_flow_fourth_order(self):
        # dz/dt = -z from z=1: halving the step from 0.4 to 0.2 should cut
        # the endpoint error by roughly 2^4
        deriv = lambda z: -z
        t_end = 4.0
        errs = []
        for dt in (0.4, 0.2):
            states = systems.integrate_flow(deriv, np.array([1.0]), dt, int(t_end / dt), max_substep=dt)
            errs.append(abs(states[-1, 0] - np.exp(-t_end)))
        ratio = errs[0] / errs[1]
        assert errs[1] < 1e-5
        assert 12.0 < ratio < 30.0

    def test_lorenz_stays_bounded(self):
        spec = systems.lorenz(z0=(1.0, 1.0, 1.0), dt=0.01, steps=20_000)
        traj = systems.integrate(spec)
        assert np.max(np.abs(traj.states)) < 100.0

    def test_lorenz_halved_step_agreement(self):
        # chaotic, so only short-horizon agreement is meaningful
        z0 = (1.0, 1.0, 1.0)
        coarse = systems.integrate(systems.lorenz(z0=z0, dt=0.01, steps=1000))
        fine = systems.integrate(systems.lorenz(z0=z0, dt=0.005, steps=2000))
        gap = np.max(np.abs(coarse.states - fine.states[::2]))
        assert gap <= 1e-3

    def test_van_der_pol_amplitude_settles(self):
        spec = systems.van_der_pol(mu=0.3, z0=(4.0, 4.0), dt=0.1, steps=1500)
        traj = systems.integrate(spec)
        x = traj.states[:, 0]
        # peak amplitude per late window varies by well under a percent
        windows = [x[500 + 250 * i: 500 + 250 * (i + 1)] for i in range(4)]
        peaks = np.array([np.max(np.abs(w)) for w in windows])
        assert np.ptp(peaks) / peaks.mean() < 0.01

    def test_van_der_pol_phase_locks_across_starts(self):
        # two starts converge to the same cycle: after the transient, states
        # at matching phase agree closely
        a = systems.integrate(systems.van_der_pol(mu=0.3, z0=(4.0, 4.0), dt=0.1, steps=350)).states
        b = systems.integrate(systems.van_der_pol(mu=0.3, z0=(0.0, 4.0), dt=0.1, steps=350)).states
        pa = np.arctan2(a[150:, 1], a[150:, 0])
        pb = np.arctan2(b[150:, 1], b[150:, 0])
        worst = 0.0
        for i, ph in enumerate(pa):
            diff = np.abs(np.angle(np.exp(1j * (pb - ph))))
            j = int(np.argmin(diff))
            if diff[j] < 0.02:
                worst = max(worst, float(np.linalg.norm(a[150 + i] - b[150 + j])))
        assert 0.0 < worst < 0.05

    def test_blow_up_raises(self):
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(IntegrationError, match="step"):
                systems.integrate_flow(lambda z: z * z, np.array([1e200]), 1.0, 5)

    def test_substep_limit_refines(self):
        # a large requested dt is integrated with internal substeps, so the
        # result matches a directly fine-stepped run
        deriv = lambda z: -z
        coarse = systems.integrate_flow(deriv, np.array([1.0]), 0.5, 4)  # substeps kick in
        fine = systems.integrate_flow(deriv, np.array([1.0]), 0.005, 400, max_substep=0.005)
        assert_allclose(coarse[-1], fine[-1], atol=1e-12)


class TestTransientSkip:
    def test_drops_leading_states(self):
        traj = systems.integrate(systems.circle_rotation(omega=1.0, z0=(0.0,), dt=1.0, steps=10))
        kept = systems.transient_skip(traj, 4)
        assert kept.states.shape == (7, 1)
        assert_allclose(kept.states[0], traj.states[4])

    def test_zero_skip_identity(self):
        traj = systems.integrate(systems.circle_rotation(omega=1.0, z0=(0.0,), dt=1.0, steps=5))
        assert systems.transient_skip(traj, 0) is traj

    def test_skip_too_large(self):
        traj = systems.integrate(systems.circle_rotation(omega=1.0, z0=(0.0,), dt=1.0, steps=5))
        with pytest.raises(ValueError):
            systems.transient_skip(traj, 6)


class TestObservables:
    def _traj(self):
        states = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        return systems.Trajectory(states, 0.5, "vanderpol")

    def test_coordinate(self):
        ts = systems.observe(self._traj(), Observable("coordinate", index=1))
        assert_allclose(ts.values, [0.2, 0.4, 0.6])
        assert ts.dt == 0.5
        assert ts.label == "z2"

    def test_sum(self):
        ts = systems.observe(self._traj(), Observable("sum", indices=(0, 1)))
        assert_allclose(ts.values, [0.3, 0.7, 1.1])
        assert ts.label == "z1+z2"

    def test_cos_angle(self):
        ts = systems.observe(self._traj(), Observable("cos_angle", index=0))
        assert_allclose(ts.values, np.cos([0.1, 0.3, 0.5]))
        assert ts.label == "cos_z1"

    def test_kinetic_energy(self):
        ts = systems.observe(self._traj(), Observable("kinetic_energy"))
        assert_allclose(ts.values, 0.5 * np.array([0.05, 0.25, 0.61]))
        assert ts.label == "ke"

    def test_custom_expression(self):
        obs = Observable("custom", expression="cos(z1) + 0.6*cos(z2) + 0.3*cos(z1 - z2)")
        ts = systems.observe(self._traj(), obs)
        z1, z2 = self._traj().states.T
        assert_allclose(ts.values, np.cos(z1) + 0.6 * np.cos(z2) + 0.3 * np.cos(z1 - z2))

    def test_custom_rejects_unknown_names(self):
        obs = Observable("custom", expression="__import__('os').getpid()")
        with pytest.raises(ValueError):
            systems.observe(self._traj(), obs)

    def test_custom_must_vary_with_samples(self):
        obs = Observable("custom", expression="1.0")
        with pytest.raises(ValueError):
            systems.observe(self._traj(), obs)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            systems.observe(self._traj(), Observable("coordinate", index=5))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Observable("norm")


class TestSeededSystems:
    def test_lorenz_initial_state_reproducible(self):
        a = systems.lorenz_initial_state(3)
        b = systems.lorenz_initial_state(3)
        c = systems.lorenz_initial_state(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.linalg.norm(a - np.ones(3)) < 1.0  # small jitter around (1,1,1)

    @pytest.mark.parametrize("seed", [0, 1, 7])
    def test_seeded_linear_system_properties(self, seed):
        spec = systems.seeded_linear_system(seed, dim=4, steps=8)
        a = np.asarray(spec.params["matrix"])
        assert a.shape == (4, 4)
        evals = np.linalg.eigvals(a)
        assert_allclose(np.max(np.abs(evals)), 0.95, atol=1e-10)
        pair = np.abs(evals[:, None] - evals[None, :])
        np.fill_diagonal(pair, np.inf)
        assert pair.min() >= 0.05
        # the generating trajectory iterates the map
        traj = systems.integrate(spec)
        assert traj.states.shape == (9, 4)
        assert_allclose(traj.states[1:], (a @ traj.states[:-1].T).T, atol=1e-12)
        krylov = np.column_stack(
            [np.linalg.matrix_power(a, k) @ traj.states[0] for k in range(4)]
        )
        assert np.linalg.cond(krylov) <= 1e6

    def test_seeded_linear_system_reproducible(self):
        s1 = systems.seeded_linear_system(5, dim=4)
        s2 = systems.seeded_linear_system(5, dim=4)
        assert np.array_equal(s1.params["matrix"], s2.params["matrix"])
        assert np.array_equal(s1.z0, s2.z0)
