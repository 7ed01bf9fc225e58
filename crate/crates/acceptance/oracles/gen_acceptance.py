"""Reference values for the acceptance target, independent of the Rust code.

Run with `python3 gen_acceptance.py`; needs mpmath.
"""
import mpmath as mp

mp.mp.dps = 40


def ml(alpha, z):
    z = mp.mpc(z)
    return mp.nsum(lambda j: z**j / mp.gamma(j * alpha + 1), [0, mp.inf])


def rust(v):
    v = mp.mpc(v)
    return f"c({mp.nstr(v.real, 20, min_fixed=-3, max_fixed=3)}, {mp.nstr(v.imag, 20, min_fixed=-3, max_fixed=3)})"


golden = mp.pi * (3 - mp.sqrt(5))
print("// E_{1/2}(z) on every 8th sunflower point of the radius-3 disk, z rounded to doubles")
for k in range(0, 200, 8):
    z = 3 * mp.sqrt((k + mp.mpf("0.5")) / 200) * mp.expj(golden * k)
    z = mp.mpc(float(z.real), float(z.imag))
    print(f"    (c({float(z.real)!r}, {float(z.imag)!r}), {rust(ml(mp.mpf('0.5'), z))}),")

print("// E_{1/2}(lam (t/2i)^{1/2})")
for lam in ["0.25", "0.5", "1", "2"]:
    for t in ["0.1", "1", "10"]:
        z = mp.mpf(lam) * mp.sqrt(mp.mpf(t) / mp.mpc(0, 2))
        print(f"    ({lam}, {t}, {rust(ml(mp.mpf('0.5'), z))}),")

print("// E_{1/2}(0.5 (1/i)^{1/2})")
z = mp.mpf("0.5") * mp.sqrt(1 / mp.mpc(0, 1))
print("   ", rust(ml(mp.mpf("0.5"), z)))
