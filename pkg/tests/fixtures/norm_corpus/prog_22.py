def alpha8(beta8, gamma8=2):
    delta8 = beta8 - gamma8
    if delta8 > 4:
        return delta8
    return delta8 * 2
print(alpha8(8), alpha8(8, 3))
