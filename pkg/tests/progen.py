"""Random loop shapes (for hypothesis) and whole integer programs (for gcc runs)."""

import random

from hypothesis import strategies as st

SIZE = 48  # array extent; affine offsets keep every index inside it
MAX_N = 8


def index_shape(allow_table=True):
    aff = st.tuples(st.just("aff"), st.integers(-2, 2), st.integers(16, 24))
    if not allow_table:
        return aff
    tab = st.tuples(st.just("tab"), st.integers(0, 3))
    return st.one_of(aff, aff, tab)


def statement(allow_table=True):
    ref = st.tuples(st.sampled_from("AB"), index_shape(allow_table))
    return st.tuples(ref, st.sampled_from(["=", "+="]), st.lists(ref, max_size=2))


@st.composite
def loop_case(draw, allow_table=True):
    shape = draw(st.lists(statement(allow_table), min_size=1, max_size=3))
    n = draw(st.integers(1, MAX_N))
    table = draw(st.lists(st.integers(0, SIZE - 4), min_size=n, max_size=n))
    return shape, n, table


@st.composite
def parallel_leaning_case(draw):
    """Loops whose writes mostly share one affine form, so the fast path fires often."""
    a = draw(st.sampled_from([-2, -1, 1, 2]))
    b = draw(st.integers(16, 24))
    arr = draw(st.sampled_from("AB"))
    other = "B" if arr == "A" else "A"
    shape = [((arr, ("aff", a, b)), draw(st.sampled_from(["=", "+="])),
             draw(st.lists(st.tuples(st.sampled_from([arr, other]), index_shape(False)),
                           max_size=2)))]
    n = draw(st.integers(1, MAX_N))
    return shape, n, [0] * n


# ------------------------------------------------------------ whole programs


def _loop_kinds(rng, k):
    """Source lines for one loop of program ``k``; uses n, A, B, C, t, out, s."""
    kind = rng.choice(["map", "shift", "reduce", "indirect", "indep", "cond", "nested",
                       "while", "mul", "divmod"])
    c1, c2 = rng.randint(1, 5), rng.randint(1, 9)
    if kind == "map":
        return [f"for (int i = 0; i < n; i++)", f"  A[i] = B[i] * {c1} - C[i] + {c2};"]
    if kind == "shift":
        return [f"for (int i = 1; i < n; i++)", f"  B[i] = B[i - 1] + {c1} * C[i];"]
    if kind == "reduce":
        return ["#pragma pencil reduction (+:s)", "for (int i = 0; i < n; i++)",
                f"  s += A[i] % {c2 + 2};"]
    if kind == "indirect":
        return ["for (int i = 0; i < n; i++)", f"  C[t[i]] += B[i] + {c1};"]
    if kind == "indep":
        return ["#pragma pencil independent", "for (int i = 0; i < n; i++)",
                f"  A[t[i]] = C[i] - {c2};"]
    if kind == "cond":
        return ["for (int i = 0; i < n; i++) {",
                f"  if (B[i] > {c1})", f"    C[i] = B[i] / 3 - {c2};",
                "  else", f"    C[i] = -B[i] % {c1 + 1};", "}"]
    if kind == "nested":
        return ["for (int i = 0; i < n; i++)", f"  for (int j = 0; j < {c1}; j++)",
                "    A[i] += j * B[i] - C[j % n];"]
    if kind == "while":
        return ["w = 0;", f"while (w < {c1}) {{", "  out[1] += w * s;", "  w++;", "}"]
    if kind == "mul":
        # p restarts so the product stays far from int overflow
        return ["p = 1;", "#pragma pencil reduction (*:p)", "for (int i = 0; i < n; i++)",
                "  p *= 1 + A[i] % 2;"]
    return ["for (int i = 0; i < n; i++)", f"  B[i] = (A[i] - {c2 * 7}) / {c1 + 1} + A[i] % {c1 + 2};"]


def random_program(k, rng=None):
    """(source, entry, scalars, arrays) for generated program number ``k``."""
    rng = rng or random.Random(1000 + k)
    n = rng.randint(1, 8)
    lines = [f"void prog{k}(int n, int A[restrict const static n], int B[restrict const static n],",
             "           int C[restrict const static n], int t[restrict const static n],",
             "           int out[restrict const static 3])", "{",
             "  int s;", "  int p;", "  int w;", "  s = 0;", "  p = 1;", "  w = 0;"]
    for _ in range(rng.randint(2, 5)):
        lines += ["  " + x for x in _loop_kinds(rng, k)]
    lines += ["  out[0] = s;", "  out[2] = p + w;", "}"]
    perm = list(range(n))
    rng.shuffle(perm)
    t = perm if rng.random() < 0.5 else [rng.randrange(n) for _ in range(n)]
    arrays = {
        "A": [rng.randint(-20, 20) for _ in range(n)],
        "B": [rng.randint(-20, 20) for _ in range(n)],
        "C": [rng.randint(-20, 20) for _ in range(n)],
        "t": t,
        "out": [0, 0, 0],
    }
    return "\n".join(lines) + "\n", f"prog{k}", {"n": n}, arrays


def random_summary(rng):
    """(source, scalars) of a random access-summary function over arrays X, Y."""
    n = rng.randint(0, 6)
    m = rng.randint(0, 4)
    lines = ["void summ(int n, int m, int X[restrict const static 64], int Y[restrict const static 64])",
             "{"]

    def index(vars_):
        v = rng.choice(vars_) if vars_ else None
        a, b = rng.randint(0, 3), rng.randint(0, 20)
        return f"{a} * {v} + {b}" if v else str(b)

    def stmts(depth, vars_):
        out = []
        for _ in range(rng.randint(1, 3)):
            r = rng.random()
            pad = "  " * (depth + 1)
            if r < 0.45 or depth >= 3:
                macro = rng.choice(["DEF", "USE", "MAY_DEF"])
                out.append(f"{pad}{macro}({rng.choice('XY')}[{index(vars_)}]);")
            elif r < 0.75:
                v = "ijk"[depth]
                bound = rng.choice(["n", "m", str(rng.randint(0, 5))])
                out.append(f"{pad}for (int {v} = 0; {v} < {bound}; {v}++) {{")
                out += stmts(depth + 1, vars_ + [v])
                out.append(f"{pad}}}")
            else:
                lhs = rng.choice(vars_ + ["n", "m"])
                out.append(f"{pad}if ({lhs} % 2 == {rng.randint(0, 1)}) {{")
                out += stmts(depth + 1, vars_)
                out.append(f"{pad}}} else {{")
                out += stmts(depth + 1, vars_)
                out.append(f"{pad}}}")
        return out

    lines += stmts(0, [])
    lines.append("}")
    return "\n".join(lines) + "\n", {"n": n, "m": m}


def random_loop_case(rng, allow_table=True):
    """Plain-``random`` twin of ``loop_case`` for fixed-seed sweeps."""
    def idx():
        if allow_table and rng.random() < 1 / 3:
            return ("tab", rng.randint(0, 3))
        return ("aff", rng.randint(-2, 2), rng.randint(16, 24))

    def ref():
        return (rng.choice("AB"), idx())

    shape = [(ref(), rng.choice(["=", "+="]), [ref() for _ in range(rng.randint(0, 2))])
            for _ in range(rng.randint(1, 3))]
    n = rng.randint(1, MAX_N)
    return shape, n, [rng.randint(0, SIZE - 4) for _ in range(n)]
