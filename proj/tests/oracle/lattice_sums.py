# Independent mpmath values frozen into test_window.cpp / test_completeness.cpp.
# rho(s) = (1/pi) int_0^eps rho_hat(t) cos(s t) dt, plateau rho_hat with p = 0.05.
import mpmath as mp

mp.mp.dps = 30
eps, p = mp.mpf("0.5"), mp.mpf("0.05")
a = p * eps


def step(s):
    return 1 / (1 + mp.e ** (1 / (1 - s) - 1 / s))


def rho(s):
    f = lambda t: step((t - a) / (eps - a)) * mp.cos(s * t)
    return (mp.sin(s * a) / s + mp.quad(f, mp.linspace(a, eps, 40))) / mp.pi


# Interval lattice: pi sum_{j>=1} rho(lam - j pi) = 1 - pi sum_{j>=0} rho(lam + j pi).
for lam in (60, 100, 200):
    neg = mp.pi * mp.fsum(rho(lam + j * mp.pi) for j in range(400))
    print("lattice", lam, mp.nstr(1 - neg, 17))

# Disc, order 0 Dirichlet zeros: pi sum_l rho(100 - j_{0,l}) over zeros below 480.
zs = []
l = 1
while True:
    z = mp.besseljzero(0, l)
    if z > 480:
        break
    zs.append(z)
    l += 1
print("disc_k0_100", mp.nstr(mp.pi * mp.fsum(rho(100 - z) for z in zs), 17))
