#!/usr/bin/env python3
"""Generate the bundled MiniC corpus.

Each problem has a correct program, a test file and faulty versions made by
one textual edit of the correct program. Test generators make the inputs
that trigger each fault rare, so every fault is revealed by few tests.

Usage: gen_corpus.py OUT_DIR
"""

import random
import sys
from pathlib import Path

N_TESTS = 40

PROBLEMS = {}


def problem(name, source, faults):
    def register(gen):
        PROBLEMS[name] = (source, faults, gen)
        return gen

    return register


ROTATE = """\
void load(int *s, int n) {
    int i;
    i = 0;
    while (i < n) {
        read s[i];
        i++;
    }
}

void rotate(int *s, int l, int r) {
    int t[64];
    int k;
    int len;
    int i;
    int j;
    read k;
    len = r - l + 1;
    k = k % len;
    if (k < 0) {
        k = k + len;
    }
    i = 0;
    while (i < len) {
        j = i + k;
        if (j >= len) {
            j = j - len;
        }
        t[j] = s[l + i];
        i++;
    }
    i = 0;
    while (i < len) {
        s[l + i] = t[i];
        i++;
    }
}

void dump(int *s, int n) {
    int i;
    i = 0;
    while (i < n) {
        print s[i];
        i++;
    }
}

int main() {
    int s[64];
    int n;
    int m;
    int l;
    int r;
    read n;
    load(s, n);
    read m;
    while (m-- > 0) {
        read l;
        read r;
        rotate(s, l, r);
    }
    dump(s, n);
    return 0;
}
"""


@problem(
    "rotate",
    ROTATE,
    {
        "large_shift": ("    k = k % len;\n", "    if (k >= len) {\n        k = k - len;\n    }\n"),
        "negative_shift": ("    if (k < 0) {\n        k = k + len;\n    }\n", ""),
    },
)
def gen_rotate(rng, rare):
    n = rng.randint(3, 12)
    s = [rng.randint(-50, 50) for _ in range(n)]
    qs = []
    for _ in range(rng.randint(1, 3)):
        l = rng.randint(0, n - 1)
        r = rng.randint(l, n - 1)
        ln = r - l + 1
        k = rng.randint(0, max(0, ln - 1))
        qs.append([l, r, k])
    if rare == 1:
        q = qs[0]
        q[0], q[1] = 0, n - 1
        q[2] = rng.randint(2 * n, 4 * n) + 1
    elif rare == 2:
        q = qs[-1]
        q[0], q[1] = 0, n - 1
        q[2] = -rng.randint(1, n - 1)
    return [n] + s + [len(qs)] + [x for q in qs for x in q]


MAXSUB = """\
int main() {
    int n;
    int x;
    int best;
    int cur;
    int i;
    read n;
    if (n == 0) {
        print 0;
        return 0;
    }
    read x;
    best = x;
    cur = x;
    i = 1;
    while (i < n) {
        read x;
        if (cur < 0) {
            cur = x;
        } else {
            cur = cur + x;
        }
        if (cur > best) {
            best = cur;
        }
        i++;
    }
    print best;
    return 0;
}
"""


@problem(
    "maxsub",
    MAXSUB,
    {
        "zero_best": ("    best = x;\n", "    best = 0;\n"),
        "empty_input": ("    if (n == 0) {\n        print 0;\n        return 0;\n    }\n", ""),
    },
)
def gen_maxsub(rng, rare):
    n = rng.randint(2, 15)
    xs = [rng.randint(-20, 30) for _ in range(n)]
    xs[rng.randrange(n)] = rng.randint(1, 30)
    if rare == 1:
        xs = [rng.randint(-30, -1) for _ in range(n)]
    elif rare == 2:
        return [0]
    return [n] + xs


GCD = """\
int gcd(int a, int b) {
    int t;
    a = abs(a);
    b = abs(b);
    while (b != 0) {
        t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int main() {
    int q;
    int a;
    int b;
    int g;
    read q;
    while (q > 0) {
        read a;
        read b;
        g = gcd(a, b);
        print g;
        if (g != 0) {
            print a / g * b;
        } else {
            print 0;
        }
        q--;
    }
    return 0;
}
"""


@problem(
    "gcd",
    GCD,
    {
        "no_abs": ("    a = abs(a);\n    b = abs(b);\n", ""),
        "no_abs_a": ("    a = abs(a);\n", ""),
        "zero_guard": ("        if (g != 0) {\n", "        if (g > 1) {\n"),
    },
)
def gen_gcd(rng, rare):
    pairs = []
    for _ in range(rng.randint(1, 4)):
        g = rng.randint(2, 9)
        pairs.append([g * rng.randint(1, 20), g * rng.randint(1, 20)])
    if rare == 1:
        pairs[0][rng.randrange(2)] *= -1
    elif rare == 2:
        pairs[-1] = [rng.choice([7, 9, 11, 13]), rng.choice([4, 8, 10])]
    return [len(pairs)] + [x for p in pairs for x in p]


BSEARCH = """\
int lower(int *a, int n, int q) {
    int lo;
    int hi;
    int mid;
    lo = 0;
    hi = n;
    while (lo < hi) {
        mid = (lo + hi) / 2;
        if (a[mid] < q) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

int main() {
    int a[64];
    int n;
    int m;
    int q;
    int i;
    read n;
    i = 0;
    while (i < n) {
        read a[i];
        i++;
    }
    read m;
    while (m > 0) {
        read q;
        print lower(a, n, q);
        m--;
    }
    return 0;
}
"""


@problem(
    "bsearch",
    BSEARCH,
    {
        "short_range": ("    hi = n;\n", "    hi = n - 1;\n"),
        "upper_bound": ("        if (a[mid] < q) {\n", "        if (a[mid] <= q) {\n"),
    },
)
def gen_bsearch(rng, rare):
    n = rng.randint(3, 14)
    a = sorted(rng.sample(range(0, 200, 2), n))
    qs = [rng.randint(a[0], a[-1] - 1) | 1 for _ in range(rng.randint(1, 4))]
    if rare == 1:
        qs[0] = a[-1] + rng.randint(1, 20)
    elif rare == 2:
        qs[-1] = rng.choice(a)
    return [n] + a + [len(qs)] + qs


ISORT = """\
void sort(int *a, int n) {
    int i;
    int j;
    int x;
    i = 1;
    while (i < n) {
        x = a[i];
        j = i;
        while (j > 0 && a[j - 1] > x) {
            a[j] = a[j - 1];
            j--;
        }
        a[j] = x;
        i++;
    }
}

int main() {
    int a[64];
    int n;
    int i;
    read n;
    i = 0;
    while (i < n) {
        read a[i];
        i++;
    }
    sort(a, n);
    i = 0;
    while (i < n) {
        print a[i];
        i++;
    }
    print a[n / 2];
    return 0;
}
"""


@problem(
    "isort",
    ISORT,
    {
        "skips_front": ("        while (j > 0 && a[j - 1] > x) {\n", "        while (j > 1 && a[j - 1] > x) {\n"),
        "low_median": ("    print a[n / 2];\n", "    print a[(n - 1) / 2];\n"),
    },
)
def gen_isort(rng, rare):
    n = rng.randrange(3, 15, 2)
    a = [rng.randint(0, 99) for _ in range(n)]
    lo = min(a)
    a.remove(lo)
    a = [lo] + a
    if rare == 1:
        a = a[1:] + [lo - rng.randint(1, 9)]
    elif rare == 2:
        a.append(rng.randint(0, 99))
    return [len(a)] + a


CALC = """\
int apply(int op, int a, int b) {
    int r;
    r = 0;
    switch (op) {
    case 1:
        r = a + b;
    case 2:
        r = a - b;
    case 3:
        r = a * b;
    case 4:
        if (b == 0) {
            r = 0;
        } else {
            r = a / b;
        }
    case 5:
        if (b == 0) {
            r = 0;
        } else {
            r = a % b;
        }
    default:
        r = -1;
    }
    return r;
}

int main() {
    int q;
    int op;
    int a;
    int b;
    read q;
    while (q > 0) {
        read op;
        read a;
        read b;
        print apply(op, a, b);
        q--;
    }
    return 0;
}
"""


@problem(
    "calc",
    CALC,
    {
        "divide_by_zero": (
            "        if (b == 0) {\n            r = 0;\n        } else {\n            r = a / b;\n        }\n",
            "        r = a / b;\n",
        ),
        "mod_as_div": ("            r = a % b;\n", "            r = a / b;\n"),
        "default_zero": ("        r = -1;\n", "        r = 0;\n"),
    },
)
def gen_calc(rng, rare):
    qs = []
    for _ in range(rng.randint(1, 4)):
        qs.append([rng.randint(1, 4), rng.randint(-50, 50), rng.randint(1, 12)])
    if rare == 1:
        qs[0] = [4, rng.randint(1, 50), 0]
    elif rare == 2:
        qs[-1] = [5, rng.randint(20, 90), rng.randint(3, 7)]
    elif rare == 3:
        qs[0] = [rng.choice([0, 6, 9]), rng.randint(1, 9), rng.randint(1, 9)]
    return [len(qs)] + [x for q in qs for x in q]


DIGITS = """\
int digits(int x) {
    int c;
    c = 1;
    while (x > 9 || x < -9) {
        x = x / 10;
        c++;
    }
    return c;
}

int main() {
    int q;
    int x;
    read q;
    while (q > 0) {
        read x;
        print digits(x);
        q--;
    }
    return 0;
}
"""


@problem(
    "digits",
    DIGITS,
    {
        "zero_digits": (
            "    c = 1;\n    while (x > 9 || x < -9) {\n",
            "    c = 0;\n    while (x != 0) {\n",
        ),
        "negative_digits": ("    while (x > 9 || x < -9) {\n", "    while (x > 9) {\n"),
    },
)
def gen_digits(rng, rare):
    xs = [rng.randint(1, 10 ** rng.randint(1, 7)) for _ in range(rng.randint(1, 4))]
    if rare == 1:
        xs[0] = 0
    elif rare == 2:
        xs[-1] = -rng.randint(10, 99999)
    return [len(xs)] + xs


RANGESUM = """\
void prefix(int *a, int *p, int n) {
    int i;
    p[0] = 0;
    i = 0;
    while (i < n) {
        p[i + 1] = p[i] + a[i];
        i++;
    }
}

int main() {
    int a[64];
    int p[65];
    int n;
    int m;
    int l;
    int r;
    int i;
    read n;
    i = 0;
    while (i < n) {
        read a[i];
        i++;
    }
    prefix(a, p, n);
    read m;
    while (m > 0) {
        read l;
        read r;
        if (r >= n) {
            r = n - 1;
        }
        print p[r + 1] - p[l];
        m--;
    }
    return 0;
}
"""


@problem(
    "rangesum",
    RANGESUM,
    {
        "no_clamp": ("        if (r >= n) {\n            r = n - 1;\n        }\n", ""),
        "start_skipped": ("    i = 0;\n    while (i < n) {\n        p[i + 1]", "    i = 1;\n    while (i < n) {\n        p[i + 1]"),
    },
)
def gen_rangesum(rng, rare):
    n = rng.randint(3, 15)
    a = [rng.randint(-20, 40) for _ in range(n)]
    qs = []
    for _ in range(rng.randint(1, 4)):
        l = rng.randint(1, n - 1)
        qs.append([l, rng.randint(l, n - 1)])
    if rare == 1:
        qs[0][1] = n + rng.randint(0, 5)
        a[n - 1] = rng.randint(1, 9)
    elif rare == 2:
        qs[-1][0] = 0
        a[0] = rng.randint(1, 9)
    return [n] + a + [len(qs)] + [x for q in qs for x in q]


TRIANGLE = """\
int kind(int a, int b, int c) {
    if (a + b <= c || a + c <= b || b + c <= a) {
        return 0;
    }
    if (a == b && b == c) {
        return 1;
    }
    if (a == b || b == c || a == c) {
        return 2;
    }
    return 3;
}

int main() {
    int q;
    int a;
    int b;
    int c;
    read q;
    while (q > 0) {
        read a;
        read b;
        read c;
        print kind(a, b, c);
        q--;
    }
    return 0;
}
"""


@problem(
    "triangle",
    TRIANGLE,
    {
        "missing_ac": ("    if (a == b || b == c || a == c) {\n", "    if (a == b || b == c) {\n"),
        "unsorted_check": ("    if (a + b <= c || a + c <= b || b + c <= a) {\n", "    if (a + b <= c) {\n"),
        "degenerate": ("    if (a + b <= c || a + c <= b", "    if (a + b < c || a + c <= b"),
    },
)
def gen_triangle(rng, rare):
    qs = []
    for _ in range(rng.randint(1, 3)):
        a, b = rng.randint(3, 30), rng.randint(3, 30)
        c = rng.randint(abs(a - b) + 1, a + b - 1)
        if c in (a, b):
            c = max(a, b) + 1 if max(a, b) + 1 < a + b else c
        qs.append([a, b, c])
    if rare == 1:
        a = rng.randint(4, 20)
        qs[0] = [a, a + rng.randint(1, 3), a]
    elif rare == 2:
        a, b = rng.randint(2, 9), rng.randint(2, 9)
        qs[-1] = [a + b + rng.randint(1, 5), a, b]
    elif rare == 3:
        a, b = rng.randint(2, 9), rng.randint(2, 9)
        qs[0] = [a, b, a + b]
    return [len(qs)] + [x for q in qs for x in q]


BRACKETS = """\
int main() {
    int n;
    int t;
    int depth;
    int ok;
    read n;
    depth = 0;
    ok = 1;
    while (n > 0) {
        read t;
        if (t == 1) {
            depth++;
        } else if (t == 2) {
            depth--;
            if (depth < 0) {
                ok = 0;
            }
        }
        n--;
    }
    if (depth != 0) {
        ok = 0;
    }
    print ok;
    return 0;
}
"""


@problem(
    "brackets",
    BRACKETS,
    {
        "no_underflow": ("            if (depth < 0) {\n                ok = 0;\n            }\n", ""),
        "others_close": ("        } else if (t == 2) {\n", "        } else {\n"),
    },
)
def gen_brackets(rng, rare):
    seq = []
    depth = 0
    for _ in range(rng.randint(2, 16)):
        if depth > 0 and rng.random() < 0.5:
            seq.append(2)
            depth -= 1
        else:
            seq.append(1)
            depth += 1
    if rng.random() < 0.6:
        seq += [2] * depth
    if rare == 1:
        seq = [2] + seq + [1]
    elif rare == 2:
        seq.insert(rng.randrange(len(seq) + 1), 3)
    return [len(seq)] + seq


MAX3 = """\
int max3(int a, int b, int c) {
    if (a >= b && a >= c) {
        return a;
    }
    if (b >= c) {
        return b;
    }
    return c;
}

int clamp(int x, int lo, int hi) {
    if (x < lo) {
        return lo;
    }
    if (x > hi) {
        return hi;
    }
    return x;
}

int main() {
    int q;
    int a;
    int b;
    int c;
    int m;
    read q;
    while (q > 0) {
        read a;
        read b;
        read c;
        m = max3(a, b, c);
        print m;
        print clamp(a, c, 50);
        q--;
    }
    return 0;
}
"""


@problem(
    "max3",
    MAX3,
    {
        "ignores_c": ("    if (b >= c) {\n        return b;\n    }\n    return c;\n", "    return b;\n"),
        "no_upper_clamp": ("    if (x > hi) {\n        return hi;\n", "    if (x > hi) {\n        return x;\n"),
    },
)
def gen_max3(rng, rare):
    qs = []
    for _ in range(rng.randint(1, 3)):
        c = rng.randint(1, 40)
        a = rng.randint(c, 48)
        b = rng.randint(c, 48)
        qs.append([a, b, c])
    if rare == 1:
        a = rng.randint(1, 20)
        qs[0] = [a, a + rng.randint(0, 5), a + rng.randint(10, 30)]
    elif rare == 2:
        qs[-1][0] = rng.randint(51, 90)
    return [len(qs)] + [x for q in qs for x in q]


def rare_slots(rng, n_kinds):
    """Assign each rare input kind to a few distinct tests."""
    slots = [0] * N_TESTS
    free = list(range(N_TESTS))
    rng.shuffle(free)
    for kind in range(1, n_kinds + 1):
        for _ in range(rng.randint(2, 6)):
            slots[free.pop()] = kind
    return slots


def main():
    out = Path(sys.argv[1])
    for name, (source, faults, gen) in sorted(PROBLEMS.items()):
        rng = random.Random(f"corpus/{name}")
        d = out / name
        (d / "faulty").mkdir(parents=True, exist_ok=True)
        (d / "correct.mc").write_text(source)
        slots = rare_slots(rng, 3)
        tests = [gen(rng, s) for s in slots]
        (d / "tests.txt").write_text("".join(" ".join(map(str, t)) + "\n" for t in tests))
        for fault, (old, new) in sorted(faults.items()):
            assert source.count(old) == 1, (name, fault)
            (d / "faulty" / f"{fault}.mc").write_text(source.replace(old, new))


if __name__ == "__main__":
    main()
