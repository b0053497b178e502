import numpy as np
import pytest

from annealsched import dynamics

NORM_TOL = 1e-9


class StateAudit:
    """Checks every state produced by the integrator during the test session.

    Each final state must be normalized to within NORM_TOL and satisfy the
    energy sandwich (1 - F)(E1 - E0) <= <E> - E0 <= (1 - F)(Emax - E0),
    with F the probability on the ground manifold.
    """

    def __init__(self):
        self.states = 0
        self.sandwich_checks = 0
        self.max_norm_error = 0.0

    def check(self, h, psi):
        probs = np.abs(psi) ** 2
        norms = probs.sum(axis=1)
        err = float(np.max(np.abs(norms - 1.0)))
        self.max_norm_error = max(self.max_norm_error, err)
        self.states += psi.shape[0]
        assert err < NORM_TOL, f"norm drift {err:.3e} after evolution"

        e1 = h.excited_energy()
        if e1 is None:
            return
        e0 = h.ground_energy
        fid = probs[:, h.ground_index_array()].sum(axis=1)
        excess = probs @ h.diag - e0 * norms
        outside = norms - fid
        scale = max(1.0, float(h.diag.max() - e0))
        lower = outside * (e1 - e0)
        upper = outside * (float(h.diag.max()) - e0)
        slack = 1e-12 * scale
        assert np.all(lower <= excess + slack), "energy below the (1-F)*gap bound"
        assert np.all(excess <= upper + slack), "energy above the (1-F)*Emax bound"
        self.sandwich_checks += psi.shape[0]


@pytest.fixture(scope="session", autouse=True)
def state_audit():
    audit = StateAudit()
    original = dynamics._propagate

    def audited(h, s_mid, lengths, driver_sign):
        psi = original(h, s_mid, lengths, driver_sign)
        audit.check(h, psi)
        return psi

    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(dynamics, "_propagate", audited)
        yield audit


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record and print a PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_number):
            terminalreporter.write_line(line)


def _criterion_number(line):
    return int(line.split("criterion")[1].split(":")[0])
