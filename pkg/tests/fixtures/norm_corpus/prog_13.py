def outer(base):
    scale = 3
    def inner(v):
        nonlocal scale
        scale += 1
        return v * scale + base
    return inner

f = outer(10)
print(f(1), f(2))
