"""Problem files and the command line, end to end.

Tasks can be driven from sectioned text files; the CLI prints a report and
exits 0 on pass/witness, 1 on fail/bounded-no, 2 on input errors.  This
script writes two files into a temporary directory and invokes the CLI
in-process.

Run:  python3 demos/05_problem_files.py
"""

import tempfile
from pathlib import Path

from flatconn.cli import run

FLAT = """\
[chart]
n = 2
m = 1
kind = connection

[connection]
v1 = x2
v2 = x1

[task]
name = check-flat
"""

LIFT = """\
[chart]
n = 2
m = 1
kind = evolution
names = x, t
params = lam

[equation]
f1 = u[3] + 6*u[0]*u[1]

[flatrep]
fibers = 1
a1 = lam + u[0] + y1^2
a2 = u[2] + 2*u[0]^2 - 2*lam*u[0] - 4*lam^2 + 2*u[1]*y1 + y1^2*(2*u[0] - 4*lam)

[symmetry]
phi1 = u[1]

[ansatz]
degree = 4
symbols = x1, x2, y1, u[0], u[1], u[2], u[3], lam

[task]
name = lift
"""

with tempfile.TemporaryDirectory() as tmp:
    flat = Path(tmp) / "flat_xy.prob"
    flat.write_text(FLAT)
    lift = Path(tmp) / "kdv_lift.prob"
    lift.write_text(LIFT)

    print("$ flatconn check-flat flat_xy.prob --json")
    code = run(["check-flat", str(flat), "--json"])
    print("exit code:", code)

    print("\n$ flatconn lift kdv_lift.prob")
    code = run(["lift", str(lift)])
    print("exit code:", code)

    print("\n$ flatconn kdv-lift galilean --lambda 1")
    code = run(["kdv-lift", "galilean", "--lambda", "1"])
    print("exit code:", code)
