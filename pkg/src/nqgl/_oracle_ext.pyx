# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled evaluator for the exhaustive small-frame oracle.

Same contract as ``_oracle_py.find_refutation``; frames hold at most 16
worlds so every world set fits in an unsigned int.
"""

DEF MAX_PROG = 512
DEF MAX_WORLDS = 16
DEF MAX_ATOMS = 8

cdef enum:
    OP_TOP = 0
    OP_BOT = 1
    OP_ATOM = 2
    OP_NOT = 3
    OP_AND = 4
    OP_IMP = 5
    OP_BOX = 6


cdef unsigned int _eval(int nprog, int* ops, int* args, unsigned int* val,
                        unsigned int* succ, int n) nogil:
    cdef unsigned int stack[MAX_PROG]
    cdef int sp = 0
    cdef unsigned int full = (1u << n) - 1u
    cdef unsigned int a, b, r
    cdef int i, w, op
    for i in range(nprog):
        op = ops[i]
        if op == OP_ATOM:
            stack[sp] = val[args[i]]
            sp += 1
        elif op == OP_TOP:
            stack[sp] = full
            sp += 1
        elif op == OP_BOT:
            stack[sp] = 0
            sp += 1
        elif op == OP_NOT:
            stack[sp - 1] = full & ~stack[sp - 1]
        elif op == OP_AND:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] & stack[sp]
        elif op == OP_IMP:
            sp -= 1
            stack[sp - 1] = (full & ~stack[sp - 1]) | stack[sp]
        else:
            a = stack[sp - 1]
            r = 0
            for w in range(n):
                if succ[w] & ~a == 0:
                    r |= 1u << w
            stack[sp - 1] = r
    return stack[sp - 1]


def find_refutation(ops, args, int n_atoms, frames):
    cdef int nprog = len(ops)
    if nprog > MAX_PROG:
        raise ValueError("formula too large for the compiled oracle")
    if n_atoms > MAX_ATOMS:
        raise ValueError("too many atoms for the compiled oracle")
    cdef int c_ops[MAX_PROG]
    cdef int c_args[MAX_PROG]
    cdef unsigned int succ[MAX_WORLDS]
    cdef unsigned int val[MAX_ATOMS]
    cdef unsigned int full, res, bad
    cdef unsigned long long code, total
    cdef int i, n, fi, world
    for i in range(nprog):
        c_ops[i] = ops[i]
        c_args[i] = args[i]
    for fi in range(len(frames)):
        frame = frames[fi]
        n = len(frame)
        if n > MAX_WORLDS:
            raise ValueError("frame too large for the compiled oracle")
        for i in range(n):
            succ[i] = frame[i]
        full = (1u << n) - 1u
        total = 1ULL << (n * n_atoms)
        code = 0
        while code < total:
            for i in range(n_atoms):
                val[i] = <unsigned int>((code >> (i * n)) & full)
            res = _eval(nprog, c_ops, c_args, val, succ, n)
            if res != full:
                bad = full & ~res
                world = 0
                while not (bad >> world) & 1u:
                    world += 1
                return fi, tuple(val[i] for i in range(n_atoms)), world
            code += 1
    return None
