"""sup_{d in [0,3] step 0.01} |Corr_{nu=50, l=1} - exp(-d^2/2)| under x = sqrt(2 nu) d / l."""
import mpmath as mp

mp.mp.dps = 40
nu = mp.mpf(50)
best = (0, 0)
for i in range(301):
    d = mp.mpf(i) / 100
    if d == 0:
        continue
    x = mp.sqrt(2 * nu) * d
    c = 2 ** (1 - nu) / mp.gamma(nu) * x ** nu * mp.besselk(nu, x)
    err = abs(c - mp.exp(-d * d / 2))
    if err > best[0]:
        best = (err, d)
print("sup error", mp.nstr(best[0], 14), "at d =", best[1])
