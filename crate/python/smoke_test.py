"""Quick end-to-end check of the semicert_py extension."""

import semicert_py as sc

p = sc.Polynomial("x^2 - 2*x*y + y^2", ["x", "y"])
assert p.degree() == 2
assert p.evaluate(["1/2", "3/2"]) == "1"

m = sc.Matrix([["x^2 + 1", "x"], ["x", "1"]], ["x"])
assert m.shape == (2, 2)
assert str(m.determinant()) == "1"
assert m.smith() == ["1", "1"]

f = sc.Polynomial("x^4 + 1", ["x"])
rep, residual, exact = sc.detrep(f)
assert residual < 1e-8, residual
assert rep.represents(f) or not exact

branch, cert = sc.certify_quadratic(["1", "0", "1", "0", "0", "2"])
assert branch == "SchurPositive", branch
report = cert.verify()
assert report.passed and report.identities_exact

branch, reason = sc.certify_quadratic(["0", "0", "0", "0", "-1", "0"])
assert branch is None and isinstance(reason, str)

certs = dict(sc.gallery_certificates())
choi = certs["choi-cyclic"]
assert choi.num_pieces == 3
again = sc.Certificate.from_text(choi.to_text())
assert again.verify(samples=50, seed=1).passed

ok, table = sc.run_gallery("mlambda-cert", samples=50)
assert ok, table

try:
    sc.Matrix.from_text("not a matrix")
except ValueError:
    pass
else:
    raise AssertionError("bad input accepted")

print("semicert_py smoke test: OK")
