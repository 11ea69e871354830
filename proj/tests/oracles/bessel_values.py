"""K_nu(z) and ln K_nu(z) reference values at 40 significant digits (mpmath)."""
import mpmath as mp

mp.mp.dps = 40
CASES = [
    (1, 1), (0.3, 0.5), (2.7, 3.3), (7.25, 0.01), (0.01, 1e-6), (50, 100),
    (49.5, 2), (20, 30), (3, 1e-3), (12.6, 50), (0.999999, 0.7), (1.000001, 0.7),
    (2, 2), (33.3, 7.7), (0.5001, 1.9),
]

for nu, z in CASES:
    k = mp.besselk(mp.mpf(nu), mp.mpf(z))
    print(f"{{{nu}, {z}, {mp.nstr(k, 20)}, {mp.nstr(mp.log(k), 20)}}},")
for nu, z in [(15, 1), (50, 1e-6)]:
    print(f"ln K_{nu}({z}) = {mp.nstr(mp.log(mp.besselk(nu, mp.mpf(z))), 22)}")

# 2^(1-nu)/Gamma(nu): maximum on (0, 5)
f = lambda nu: 2 ** (1 - nu) / mp.gamma(nu)
peak = mp.findroot(lambda nu: mp.diff(f, nu), 0.93)
print("constant part peak:", mp.nstr(peak, 12), mp.nstr(f(peak), 13))
print("constant part at 0.87, 0.9, 0.99:", [mp.nstr(f(v), 10) for v in (0.87, 0.9, 0.99)])
