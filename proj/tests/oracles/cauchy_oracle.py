# Cauchy transforms of mu(.; i) for the two catalogue functions at k = 1/sqrt(2),
# integrated in u with x = +-u^2 by mpmath at 30 digits.
from mpmath import mp, mpf, mpc, sqrt, pi, cos, quad, ellipk
mp.dps = 30
k = 1/sqrt(2)
K = ellipk(k*k); Kp = ellipk(1-k*k)
w = mpc(K, -Kp)
def f(z):
    return 2/sqrt(pi)*cos(sqrt(z)*w/2)
def mu_iv(x):
    return 1/(pi*abs(f(mpc(x,0)))**2)
def mu_tilde(x):
    fx = f(mpc(x,0)); b = fx.real; d = -fx.imag
    return 1/(pi*(b*b + (d - x*b)**2))
def cauchy(mu, z, pts):
    g = lambda u, s: 2*u*mu(s*u*u)/(s*u*u - z)
    pos = quad(lambda u: g(u, 1), pts)
    neg = quad(lambda u: g(u, -1), pts)
    return pos + neg
pts = [0] + [mpf(j)/2 for j in range(1, 40)] + [30, 60, 120]
for z in [mpc(0,1), mpc(1,2), mpc(2,3)]:
    print('iv', z, mp.nstr(cauchy(mu_iv, z, pts), 22))
# tilde: breakpoints at the near-axis zeros (u = sqrt|x|) with the zero widths
zs = [3.792651589401147, 26.25819974459687, 72.03091057824794]
tp = sorted(set([mpf(0)] + [sqrt(mpf(x)) + d for x in zs for d in (-0.05, -0.01, -0.002, 0, 0.002, 0.01, 0.05)] + [mpf(j)/2 for j in range(1, 40)] + [30, 60, 120]))
for z in [mpc(0,1), mpc(1,2)]:
    print('tilde', z, mp.nstr(cauchy(mu_tilde, z, tp), 22))
