"""Direct nu = 3/2 closed-form oracle for the two joint-covariance settings."""
import numpy as np

def c32(kappa, d):
    x = kappa * np.abs(d)
    return (1 + x) * np.exp(-x)

s = np.linspace(-1, 1, 101)
delta = s[1] - s[0]
D = s[:, None] - s[None, :]
B = np.maximum(0, 1 - np.abs(D) / 0.4) * delta
far = np.abs(D) >= 0.2 - 1e-9
lag = np.isclose(np.abs(D), 0.2)
for k11, k21 in [(75, 1.5), (1.5, 75)]:
    c11 = c32(k11, D)
    c2g1 = c32(k21, D)
    c21 = B @ c11
    c22 = c21 @ B.T + c2g1
    print(f"kappa11={k11} kappa21={k21}")
    print("  C11 max at lags>=0.2:", c11[far].max(), " C11 min at lag 0.2:", c11[lag].min())
    print("  C22 max at lags>=0.2:", c22[far].max(), " C22 min at lag 0.2:", c22[lag].min())
    print("  C2|1 max at lags>=0.2:", c2g1[far].max())
    J = np.block([[c11, c21.T], [c21, c22]])
    print("  min eigenvalue / trace:", np.linalg.eigvalsh(J).min() / np.trace(J))
