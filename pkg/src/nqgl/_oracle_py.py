"""Pure-Python evaluator for the exhaustive small-frame oracle.

Formulas arrive compiled to a postfix program; every world set is a bitmask
over the frame's worlds.  Mirrors ``_oracle_ext.pyx`` instruction for
instruction.
"""

OP_TOP, OP_BOT, OP_ATOM, OP_NOT, OP_AND, OP_IMP, OP_BOX = range(7)


def eval_program(ops, args, val, succ, n):
    full = (1 << n) - 1
    stack = []
    push = stack.append
    pop = stack.pop
    for op, arg in zip(ops, args):
        if op == OP_ATOM:
            push(val[arg])
        elif op == OP_TOP:
            push(full)
        elif op == OP_BOT:
            push(0)
        elif op == OP_NOT:
            push(full & ~pop())
        elif op == OP_AND:
            b = pop()
            push(pop() & b)
        elif op == OP_IMP:
            b = pop()
            push((full & ~pop()) | b)
        else:
            a = pop()
            r = 0
            for w in range(n):
                if succ[w] & ~a == 0:
                    r |= 1 << w
            push(r)
    return stack[-1]


def find_refutation(ops, args, n_atoms, frames):
    """First (frame index, valuation masks, world) falsifying the program.

    ``frames`` is a sequence of successor-mask lists.  Returns None when the
    formula holds everywhere.
    """
    for fi, succ in enumerate(frames):
        n = len(succ)
        full = (1 << n) - 1
        for code in range(1 << (n * n_atoms)):
            val = [(code >> (i * n)) & full for i in range(n_atoms)]
            res = eval_program(ops, args, val, succ, n)
            if res != full:
                bad = full & ~res
                world = (bad & -bad).bit_length() - 1
                return fi, tuple(val), world
    return None


def count_evaluations(n_atoms, frames):
    return sum(1 << (len(succ) * n_atoms) for succ in frames)
